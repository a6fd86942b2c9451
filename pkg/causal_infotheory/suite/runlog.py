import os
from typing import List
import h5py
import numpy as np
from dotmap import DotMap
from ..utils import write_to_hdf5
from .hunt import HuntResult


class HuntLog(object):
    """Per-trial record of a hunt, stored as `<out>/logs/log_<kind>.hdf5`.

    Datasets: trials/trial, trials/found, trials/margin (nan when a model
    offers no query) and meta/kind, meta/seed, meta/budget,
    meta/witness_paths.
    """

    def __init__(self, out_dir: str, kind: str):
        self.log_dir = os.path.join(out_dir, "logs")
        os.makedirs(self.log_dir, exist_ok=True)
        self.log_fname = os.path.join(self.log_dir, f"log_{kind}.hdf5")
        # A rerun replaces the previous log of the same kind.
        if os.path.exists(self.log_fname):
            os.remove(self.log_fname)

    def save(self, result: HuntResult, witness_paths: List[str]) -> str:
        outcomes = result.outcomes
        write_to_hdf5(self.log_fname, "trials/trial", [o.trial for o in outcomes], "int64")
        write_to_hdf5(self.log_fname, "trials/found", [o.found for o in outcomes], "int8")
        write_to_hdf5(self.log_fname, "trials/margin", [o.margin for o in outcomes], "float64")
        write_to_hdf5(self.log_fname, "meta/kind", [result.kind])
        write_to_hdf5(self.log_fname, "meta/seed", [str(result.seed)])
        write_to_hdf5(self.log_fname, "meta/budget", [result.budget], "int64")
        write_to_hdf5(self.log_fname, "meta/witness_paths", witness_paths)
        return self.log_fname


def load_hunt_log(path: str) -> DotMap:
    """Reload a hunt log from its `.hdf5` path or an output directory.

    Strings come back decoded; meta/seed is an int again.
    """
    if path.endswith(".hdf5"):
        log_fname = path
    else:
        log_dir = os.path.join(path, "logs")
        log_paths = sorted(
            os.path.join(log_dir, f) for f in os.listdir(log_dir) if f.endswith(".hdf5")
        )
        assert len(log_paths) > 0, f"No hunt log in {log_dir}"
        log_fname = log_paths[0]
    assert os.path.exists(log_fname), f"File {log_fname} does not exist."

    log = {"trials": {}, "meta": {}}
    with h5py.File(log_fname, mode="r") as h5f:
        for group in log:
            for key in h5f[group].keys():
                data = h5f[group][key][:]
                if data.dtype.kind == "S":
                    data = [item.decode("utf-8") for item in data]
                log[group][key] = data
    log["meta"]["kind"] = log["meta"]["kind"][0]
    log["meta"]["seed"] = int(log["meta"]["seed"][0])
    log["meta"]["budget"] = int(log["meta"]["budget"][0])
    log["trials"]["found"] = np.asarray(log["trials"]["found"], dtype=bool)
    return DotMap(log, _dynamic=False)

import os
import re
from typing import Any, Union
import commentjson
import h5py
import numpy as np
import yaml
from dotmap import DotMap


def load_config(
    config_fname: str, return_dotmap: bool = False
) -> Union[dict, DotMap]:
    """Load a generator/run configuration, YAML or JSON by file ending.

    Args:
        config_fname (str):
            Path to a `.yaml`/`.yml` or `.json` file (JSON may hold comments).
        return_dotmap (bool, optional):
            Return a dot indexable dictionary. Defaults to False.

    Raises:
        ValueError: Only YAML/JSON files can be loaded.

    Returns:
        Union[dict, DotMap]: Loaded configuration.
    """
    _, fext = os.path.splitext(config_fname)
    if fext in (".yaml", ".yml"):
        config = load_yaml_config(config_fname)
    elif fext == ".json":
        config = load_json_config(config_fname)
    else:
        raise ValueError("Only YAML & JSON configuration can be loaded.")
    config = config if config is not None else {}
    return DotMap(config) if return_dotmap else config


def _float_resolving_loader() -> type:
    # Plain SafeLoader reads `1e-6` as a string.
    class Loader(yaml.SafeLoader):
        pass

    Loader.add_implicit_resolver(
        "tag:yaml.org,2002:float",
        re.compile(
            """^(?:
        [-+]?(?:[0-9][0-9_]*)\\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\\.[0-9_]+(?:[eE][-+][0-9]+)?
        |[-+]?\\.(?:inf|Inf|INF)
        |\\.(?:nan|NaN|NAN))$""",
            re.X,
        ),
        list("-+0123456789."),
    )
    return Loader


def load_yaml_config(config_fname: str) -> dict:
    with open(config_fname) as file:
        return yaml.load(file, Loader=_float_resolving_loader())


def load_json_config(config_fname: str) -> dict:
    with open(config_fname, "r") as file:
        return commentjson.loads(file.read())


def write_to_hdf5(
    log_fname: str, log_path: str, data_to_log: Any, dtype: str = "S5000"
) -> None:
    """Write one dataset into an hdf5 file, replacing an older one.

    Args:
        log_fname (str): Path of the hdf5 file (created if missing).
        log_path (str): Dataset path inside the file, e.g. `trials/margin`.
        data_to_log (Any): Strings for the default string dtype, numbers otherwise.
        dtype (str, optional): Storage dtype. Defaults to "S5000".
    """
    if dtype.startswith("S"):
        data_to_store = [str(t).encode("utf-8", "ignore") for t in data_to_log]
    else:
        data_to_store = np.asarray(data_to_log, dtype=dtype)

    # Empty datasets cannot be chunked, so they go uncompressed.
    compress = {"compression": "gzip", "compression_opts": 4} if len(data_to_store) else {}
    with h5py.File(log_fname, "a") as h5f:
        if h5f.get(log_path):
            del h5f[log_path]
        h5f.create_dataset(name=log_path, data=data_to_store, dtype=dtype, **compress)
        h5f.flush()

import h5py
import numpy as np
import pytest
from causal_infotheory.dsl import SourceSpan
from causal_infotheory.errors import ParseError
from causal_infotheory.utils import (
    load_config,
    print_columns,
    print_dist_table,
    print_hunt_summary,
    print_quantity,
    print_reports,
    print_storage,
    print_validation,
    print_welcome,
    write_to_hdf5,
)


def test_load_config():
    """YAML and commented JSON, plain or dot indexable."""
    config = load_config("tests/fixtures/gen_config.yaml", True)
    assert config.seed == 7
    assert config.edge_probability == "1/2"
    config = load_config("tests/fixtures/gen_config.json")
    assert config["edge_probability"] == 0.25
    with pytest.raises(ValueError):
        load_config("tests/fixtures/paper_ex1.scm")


def test_yaml_scientific_floats(tmp_path):
    fname = tmp_path / "tiny.yaml"
    fname.write_text("tolerance: 1e-9\n")
    assert load_config(str(fname))["tolerance"] == 1e-9


def test_write_to_hdf5(tmp_path):
    """Strings and numbers land as datasets; rewriting replaces them."""
    fname = str(tmp_path / "log.hdf5")
    write_to_hdf5(fname, "meta/kind", ["dpi"])
    write_to_hdf5(fname, "trials/margin", [0.5, float("nan")], dtype="float64")
    write_to_hdf5(fname, "trials/margin", [0.25], dtype="float64")
    write_to_hdf5(fname, "trials/trial", [], dtype="int64")
    with h5py.File(fname, "r") as h5f:
        assert h5f["meta/kind"][0].decode() == "dpi"
        np.testing.assert_array_equal(h5f["trials/margin"][:], [0.25])
        assert len(h5f["trials/trial"][:]) == 0


def test_comms():
    """Rich printers run on typical payloads."""
    print_welcome("paper_ex1")
    print_welcome()
    print_validation("ok.scm", [])
    error = ParseError(
        "cycle X -> Y -> X", SourceSpan(40, 41, 2, 7), ["acyclic parent structure"], "semantic"
    )
    print_validation("cycle.scm", [error])
    print_dist_table("p(Y)", ["Y"], [(["0"], "1/2"), (["1"], "1/2")])
    print_columns("p(Y)", ["Y"], [("0",), ("1",)], [("do(X=0)", ["1", "0"])])
    print_quantity("Hc", "1.000000000000", {"target": ["Y"], "given": []}, {"max-slack": "0.000000000000"})
    print_reports(
        [{"prop": "Prop-3.2", "status": "pass", "lhs": "1.0", "rhs": "1.0", "slack": "0.0"}]
    )
    print_hunt_summary("dpi", 10, 4, 1)
    print_hunt_summary("dpi", 10, 10, 0)
    print_storage(["witnesses/dpi_s0_t3.scm"], "witnesses/logs/log_dpi.hdf5")

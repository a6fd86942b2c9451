from .helpers import load_config, load_yaml_config, load_json_config, write_to_hdf5
from .comms import (
    print_welcome,
    print_validation,
    print_dist_table,
    print_columns,
    print_quantity,
    print_reports,
    print_hunt_summary,
    print_storage,
)

__all__ = [
    "load_config",
    "load_yaml_config",
    "load_json_config",
    "write_to_hdf5",
    "print_welcome",
    "print_validation",
    "print_dist_table",
    "print_columns",
    "print_quantity",
    "print_reports",
    "print_hunt_summary",
    "print_storage",
]

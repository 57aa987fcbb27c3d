from pinnbench.harness.catalog import list_cases, list_methods
from pinnbench.harness.config import RunConfig, parse_config, parse_config_dict
from pinnbench.harness.export import dumps, export, export_csv, export_json, load_json, recompute
from pinnbench.harness.runner import METRICS, ResultRecord, aggregate, run_all, run_task, schedule

__all__ = [
    "METRICS",
    "ResultRecord",
    "RunConfig",
    "aggregate",
    "dumps",
    "export",
    "export_csv",
    "export_json",
    "list_cases",
    "list_methods",
    "load_json",
    "parse_config",
    "parse_config_dict",
    "recompute",
    "run_all",
    "run_task",
    "schedule",
]

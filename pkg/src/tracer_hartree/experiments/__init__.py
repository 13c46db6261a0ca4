"""Declarative experiments: configs, run orchestration, records and the CLI."""

from .config import ExperimentConfig, load_config, parse_config
from .records import Record, Series, read_records
from .registry import CLAIMS, QUANTITIES
from .runner import RunResult, execute, verify, write_outputs

__all__ = ["CLAIMS", "ExperimentConfig", "QUANTITIES", "Record", "RunResult", "Series", "execute",
           "load_config", "parse_config", "read_records", "verify", "write_outputs"]

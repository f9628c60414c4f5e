"""Scenario parsing, experiment runners and result output."""

from .experiments import run_experiment
from .results import ResultTable, emit, read_table
from .scenario import Scenario, ScenarioError, dump_scenario, parse_scenario

__all__ = ["run_experiment", "ResultTable", "emit", "read_table", "Scenario", "ScenarioError",
           "dump_scenario", "parse_scenario"]

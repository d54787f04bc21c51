"""Command-line front end: file formats, verification suites and compute tasks."""
from avjets.cli.formats import parse_atlas, parse_rep, serialize_atlas, serialize_rep
from avjets.cli.main import main
from avjets.cli.suites import SUITES, SuiteConfig, run_suite
from avjets.cli.tasks import OPERATIONS, run_task

__all__ = ["parse_atlas", "parse_rep", "serialize_atlas", "serialize_rep", "main", "SUITES", "SuiteConfig",
           "run_suite", "OPERATIONS", "run_task"]

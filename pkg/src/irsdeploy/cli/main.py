"""Command line: ``irsdeploy <experiment> [--scenario F] [--out DIR] [--seed S] [--jobs N]``."""

import argparse
import os
import sys
from importlib import resources

from .experiments import ExperimentError, run_experiment
from .results import emit, render_report
from .scenario import EXPERIMENTS, ScenarioError, dump_scenario, parse_scenario, parse_scenario_text


def default_scenario(name):
    """The bundled scenario for experiment ``name``."""
    text = resources.files("irsdeploy").joinpath("scenarios", f"{name}.yaml").read_text()
    return parse_scenario_text(text, f"<default {name}.yaml>")


def build_parser():
    p = argparse.ArgumentParser(prog="irsdeploy", description="Run an IRS deployment experiment.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--scenario", help="scenario YAML file (default: the bundled one)")
    p.add_argument("--out", help="directory for result tables; without it a report goes to stdout")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--format", choices=("delimited", "report", "both"), default="both",
                   help="what to write under --out")
    return p


def _u64(seed):
    if not 0 <= seed < 2 ** 64:
        raise ScenarioError(f"--seed must be in [0, 2^64), got {seed}")
    return seed


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        scn = parse_scenario(args.scenario) if args.scenario else default_scenario(args.experiment)
        if args.seed is not None:
            scn = scn.with_seed(_u64(args.seed))
        tables = run_experiment(args.experiment, scn, args.jobs)
        if args.out is None:
            sys.stdout.write(render_report(tables, f"{args.experiment} (seed {scn.seed})"))
            return 0
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"{args.experiment}_scenario.yaml"), "w") as fh:
            fh.write(dump_scenario(scn))
        if args.format in ("delimited", "both"):
            for t in tables:
                emit(t, os.path.join(args.out, f"{t.name}.csv"))
        if args.format in ("report", "both"):
            emit(tables, os.path.join(args.out, f"{args.experiment}_report.txt"), "report")
    except (ScenarioError, ExperimentError, OSError, ValueError) as exc:
        print(f"irsdeploy: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

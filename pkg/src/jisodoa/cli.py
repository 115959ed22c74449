"""Command line entry point: ``jisodoa {spectrum,sweep,selftest}``."""

import argparse
import logging
import sys

import numpy as np

from . import bench
from .array_model import config_from_mapping, generate_snapshots, read_mapping
from .linalg_kernel import ContractError

PLAN_KEYS = ("snapshot_sweep", "trials", "estimators")


def _load(args):
    data = read_mapping(args.config)
    scenario = config_from_mapping(data, extra_keys=PLAN_KEYS)
    if args.seed is not None:
        scenario = scenario.replace(rng_seed=args.seed)
    estimators = args.estimators or data.get("estimators", bench.ESTIMATORS)
    return data, scenario, bench.parse_estimators(estimators)


def cmd_spectrum(args):
    _, scenario, estimators = _load(args)
    bench.check_scenario_for(scenario, estimators)
    X = generate_snapshots(scenario, np.random.default_rng(scenario.rng_seed))
    outputs = bench.estimator_outputs(X, scenario, estimators)
    for path in bench.emit_outputs(None, outputs, args.out):
        print(path)
    return 0


def cmd_sweep(args):
    data, scenario, estimators = _load(args)
    trials = args.trials if args.trials is not None else data.get("trials", 100)
    plan = bench.ExperimentPlan(
        scenario=scenario,
        estimators=estimators,
        snapshot_sweep=data.get("snapshot_sweep", bench.DEFAULT_SWEEP),
        trials=trials,
        master_seed=scenario.rng_seed,
        workers=args.workers,
    )
    table = bench.run_sweep(plan, progress=lambda n: logging.debug("block done (N=%d)", n))
    for est in plan.estimators:
        curve = " ".join(f"{p:.3f}" for p in table.curve(est))
        print(f"{est:>10s}: {curve}")
    for path in bench.emit_outputs(table, None, args.out):
        print(path)
    return 0


def cmd_selftest(args):
    from .selftest import run_selftest
    return 0 if run_selftest(seed=args.seed or 0) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="jisodoa", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_config=True):
        sp.add_argument("--config", required=needs_config, help="JSON or YAML scenario file")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--seed", type=int, help="overrides rng_seed from the config")
        sp.add_argument("--trials", type=int)
        sp.add_argument("--estimators", help="comma separated, e.g. capon,jiso")
        sp.add_argument("--workers", type=int, default=1)

    common(sub.add_parser("spectrum", help="spectra of one simulated dataset"))
    common(sub.add_parser("sweep", help="probability of resolution versus N"))
    common(sub.add_parser("selftest", help="run the built-in invariant checks"), False)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"spectrum": cmd_spectrum, "sweep": cmd_sweep, "selftest": cmd_selftest}
    try:
        return handlers[args.command](args)
    except (ContractError, TypeError) as exc:
        print(f"jisodoa: contract violation: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"jisodoa: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

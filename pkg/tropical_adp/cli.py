"""Command-line interface: ``gen``, ``solve``, ``approx`` and ``experiment``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from dotenv import load_dotenv

from .aqi import aqi, error_bound_report, greedy_and_evaluate, vaqi
from .bellman import state_values_from_q, sup_distance
from .config import FeatureSpec, InfinitySpec, SolverChoice, SolverSettings, TestMatrixSpec
from .errors import InvalidArgumentError, OutputError, TropicalAdpError
from .experiments import build_config, emit_outputs, random_mdp, run_experiment, write_json
from .experiments.schemas import ExperimentConfig
from .features import build_features, build_test_matrix
from .logging_utils import configure_logging
from .mdp import Mdp
from .minplus import save_matrix_csv
from .solvers import policy_iteration, q_value_iteration, value_iteration

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parents[1]


def _emit(payload: Dict[str, Any], out_dir: Optional[str], file_name: str) -> None:
    if out_dir is None:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
        return
    directory = Path(out_dir)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"Cannot create output directory {directory}: {exc}", path=str(directory)) from exc
    path = write_json(directory / file_name, payload)
    logger.info("Wrote results", extra={"path": str(path)})


def cmd_gen(args: argparse.Namespace, settings: SolverSettings) -> int:
    low, high = args.reward_range
    mdp = random_mdp(args.n, args.d, (low, high), args.seed, args.alpha)
    if args.out is None:
        json.dump(mdp.to_dict(), sys.stdout)
        sys.stdout.write("\n")
    else:
        mdp.save(args.out)
        logger.info("Wrote random MDP", extra={"path": args.out, "n": mdp.n, "d": mdp.d})
    return 0


def cmd_solve(args: argparse.Namespace, settings: SolverSettings) -> int:
    mdp = Mdp.load(args.mdp_file)
    tol = args.tol or settings.oracle_tol
    max_iter = args.max_iter or settings.max_iter
    j_star = value_iteration(mdp, tol, max_iter)
    q_star = q_value_iteration(mdp, tol, max_iter)
    policy, j_policy = policy_iteration(mdp)
    _emit(
        {
            "J_star": j_star.tolist(),
            "Q_star": q_star.tolist(),
            "policy": policy.tolist(),
            "J_policy": j_policy.tolist(),
            "value_iteration_vs_policy_iteration": sup_distance(j_star, j_policy),
        },
        args.out,
        "solution.json",
    )
    return 0


def cmd_approx(args: argparse.Namespace, settings: SolverSettings) -> int:
    mdp = Mdp.load(args.mdp_file)
    tol = args.tol or settings.tol
    max_iter = args.max_iter or settings.max_iter
    feature_spec = FeatureSpec.from_string(args.features, infinity=args.inf)
    basis = build_features(feature_spec, mdp)
    w = build_test_matrix(args.w, basis, np.random.default_rng(args.seed))

    q_star = q_value_iteration(mdp, settings.oracle_tol, max_iter)
    j_star = state_values_from_q(q_star)
    payload: Dict[str, Any] = {"features": str(feature_spec), "infinity": str(args.inf), "w": str(args.w)}
    for name, test_matrix in (("aqi", None), ("vaqi", w)):
        if test_matrix is None:
            result = aqi(mdp, basis, tol, max_iter)
        else:
            result = vaqi(mdp, basis, test_matrix, tol, max_iter)
        bound = error_bound_report(mdp, basis, test_matrix, result, q_star)
        policy, j_policy = greedy_and_evaluate(mdp, result.q_approx)
        payload[name] = {
            **result.to_dict(),
            "bound": bound.to_dict(),
            "policy": policy.tolist(),
            "J_policy": j_policy.tolist(),
            "value_error": sup_distance(j_star, result.value_approx),
            "policy_error": sup_distance(j_star, j_policy),
        }
    _emit(payload, args.out, "approx.json")
    if args.out is not None:
        save_matrix_csv(basis, Path(args.out) / "features.csv")
    return 0


def cmd_experiment(args: argparse.Namespace, settings: SolverSettings) -> int:
    config = _experiment_config(args, settings)
    report = run_experiment(config)
    emit_outputs(report, args.out)
    json.dump(report.errors, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _experiment_config(args: argparse.Namespace, settings: SolverSettings) -> ExperimentConfig:
    overrides: Dict[str, Any] = {
        "n": args.n,
        "d": args.d,
        "alpha": args.alpha,
        "k": args.k,
        "seed": args.seed,
        "w": args.w,
        "infinity": args.inf,
        "features": args.features,
        "solvers": args.solvers,
        "tol": args.tol,
        "max_iter": args.max_iter,
    }
    if args.config is not None:
        return ExperimentConfig.from_file(args.config, **overrides)
    defaults = {"tol": settings.tol, "oracle_tol": settings.oracle_tol, "max_iter": settings.max_iter}
    defaults.update({key: value for key, value in overrides.items() if value is not None})
    return build_config(**defaults)


def _solver_list(value: str) -> str:
    for item in value.split(","):
        SolverChoice.from_string(item)
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tropical-adp",
        description="Exact and min-plus approximate dynamic programming for finite discounted MDPs.",
    )
    parser.add_argument("--log-level", default=None, help="Logging level (overrides TROPICAL_ADP_LOG_LEVEL)")
    parser.add_argument("--log-format", choices=("text", "json"), default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate a random MDP file")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--d", type=int, required=True)
    gen.add_argument("--alpha", type=float, default=0.9)
    gen.add_argument("--reward-range", type=int, nargs=2, default=(1, 10), metavar=("LO", "HI"))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None, help="Output file (stdout when omitted)")
    gen.set_defaults(handler=cmd_gen)

    solve = sub.add_parser("solve", help="Exact solvers on an MDP file")
    solve.add_argument("mdp_file")
    solve.add_argument("--tol", type=float, default=None)
    solve.add_argument("--max-iter", type=int, default=None)
    solve.add_argument("--out", default=None, help="Output directory (stdout when omitted)")
    solve.set_defaults(handler=cmd_solve)

    approx = sub.add_parser("approx", help="AQI and VAQI on an MDP file")
    approx.add_argument("mdp_file")
    approx.add_argument("--features", default="bins:5", help="bins:K | full | file:PATH")
    approx.add_argument("--inf", type=InfinitySpec.from_string, default=InfinitySpec(), help="exact | sentinel:V")
    approx.add_argument(
        "--w", type=TestMatrixSpec.from_string, default=TestMatrixSpec(), help="identity | features | random:M"
    )
    approx.add_argument("--seed", type=int, default=0)
    approx.add_argument("--tol", type=float, default=None)
    approx.add_argument("--max-iter", type=int, default=None)
    approx.add_argument("--out", default=None, help="Output directory (stdout when omitted)")
    approx.set_defaults(handler=cmd_approx)

    experiment = sub.add_parser("experiment", help="Full random-MDP experiment")
    experiment.add_argument("--config", default=None, help="JSON config file; flags override its values")
    experiment.add_argument("--n", type=int, default=None)
    experiment.add_argument("--d", type=int, default=None)
    experiment.add_argument("--alpha", type=float, default=None)
    experiment.add_argument("--k", type=int, default=None)
    experiment.add_argument("--seed", type=int, default=None)
    experiment.add_argument("--features", default=None)
    experiment.add_argument("--w", default=None)
    experiment.add_argument("--inf", default=None)
    experiment.add_argument("--solvers", type=_solver_list, default=None, help="e.g. exact,aqi,vaqi,ape,api")
    experiment.add_argument("--tol", type=float, default=None)
    experiment.add_argument("--max-iter", type=int, default=None)
    experiment.add_argument("--out", default="results")
    experiment.set_defaults(handler=cmd_experiment)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv(PROJECT_ROOT / ".env", override=False)
    args = build_parser().parse_args(argv)

    try:
        settings = SolverSettings.from_env()
        if args.log_level:
            settings.log_level = args.log_level.upper()
        if args.log_format:
            settings.log_format = args.log_format
        configure_logging(settings)
    except ValueError as exc:
        error = InvalidArgumentError(str(exc))
        print(json.dumps(error.to_dict()), file=sys.stderr)
        return error.exit_code

    try:
        return args.handler(args, settings)
    except TropicalAdpError as exc:
        logger.error("Command %s failed: %s", args.command, exc, extra={"exit_code": exc.exit_code})
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        error = InvalidArgumentError(str(exc))
        logger.error("Command %s failed: %s", args.command, exc, extra={"exit_code": error.exit_code})
        print(json.dumps(error.to_dict()), file=sys.stderr)
        return error.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""
Command-line front end.

    rioc simulate  scenario.json [--epsilon E] [--out sol.csv] [--plot]
    rioc optimize  scenario.json [--epsilon E] [--out opt.csv] [--plot]
    rioc sweep     scenario.json [--eps-list 1e-1,1e-2] [--cold-start] [--out sweep.csv] [--plot]
    rioc gradcheck scenario.json [--epsilon E] [--directions K] [--tau T] [--out grad.json]
    rioc check     scenario.json --tuple sol.csv [--epsilon E] [--limit] [--out report.json]

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pydantic

from . import __version__
from .adjoint import gradient_check, random_direction
from .errors import SolverError, ValidationError
from .export import (
    read_solution_csv,
    write_json,
    write_solution_csv,
    write_sweep_csv,
)
from .forward import TOL_FEAS, complementarity_residual, feasibility_violation, solve, tol_comp
from .optimizer import minimize_viscous, vanishing_viscosity_sweep
from .plot import solution_chart, sweep_chart, write_svg
from .scenario import Scenario
from .stationarity import check_limit, check_viscous

logger = logging.getLogger("rioc")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3


def thread_count() -> int:
    """Worker cap from RIOC_THREADS (default 1)."""
    raw = os.environ.get("RIOC_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"RIOC_THREADS must be an integer, got {raw!r}")
    if value < 1:
        raise ValidationError(f"RIOC_THREADS must be >= 1, got {value}")
    return value


def parse_eps_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise ValidationError(f"invalid --eps-list: {text!r}")


def _load(args: argparse.Namespace) -> Scenario:
    scenario = Scenario.load(args.scenario)
    if getattr(args, "seed", None) is not None:
        scenario = scenario.model_copy(update={"seed": args.seed})
    return scenario


def _epsilon(args: argparse.Namespace, scenario: Scenario) -> Optional[float]:
    return args.epsilon if args.epsilon is not None else scenario.epsilon


def _out(args: argparse.Namespace, scenario: Scenario, suffix: str) -> Path:
    return Path(args.out) if args.out else Path(f"{scenario.name}_{args.command}{suffix}")


# Commands

def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = _load(args)
    params = scenario.to_params(_epsilon(args, scenario))
    ell = scenario.control_trajectory()
    sol = solve(params, ell, scenario.grid)
    out = _out(args, scenario, ".csv")
    write_solution_csv(out, sol.q, sol.z, sol.H, ell=ell, energy_residual=sol.energy_residual)
    logger.info("wrote %s (eps=%g, max energy residual %.3e)",
                out, params.epsilon, float(np.max(sol.energy_residual)))
    if not params.is_viscous:
        feas = feasibility_violation(sol)
        comp = complementarity_residual(sol)
        if feas > TOL_FEAS or comp > tol_comp(scenario.grid, ell):
            logger.warning("rate-independent residuals above tolerance: feasibility %.3e, complementarity %.3e",
                           feas, comp)
    if args.plot:
        write_svg(out.with_suffix(".svg"), solution_chart(sol.q, sol.z, title=scenario.name))
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    scenario = _load(args)
    eps = _epsilon(args, scenario)
    if not eps:
        raise ValidationError("optimize needs a positive viscosity (--epsilon or scenario.epsilon)")
    params = scenario.to_params(eps)
    obj = scenario.to_objective()
    opts = scenario.optimizer.options(epsilon=eps)
    if obj.include_proximal:
        opts = opts.model_copy(update={"include_proximal": True, "anchor": obj.proximal_anchor})
    result = minimize_viscous(scenario.initial_control(), params, obj.with_anchor(None, include_proximal=False), opts)
    report = check_viscous(result.ell, result.forward.q, result.adjoint.xi, result.adjoint.lam,
                           params, obj, grad_tol=opts.grad_tol)

    out = _out(args, scenario, ".csv")
    write_solution_csv(out, result.forward.q, result.forward.z, result.forward.H,
                       xi=result.adjoint.xi, lam=result.adjoint.lam, ell=result.ell)
    write_json(out.with_suffix(".json"), {
        "epsilon": eps,
        "objective": result.objective,
        "grad_norm": result.grad_norm,
        "iterations": result.iterations,
        "converged": result.converged,
        "log": [entry.model_dump(mode="json") for entry in result.log],
        "stationarity": report.model_dump(mode="json"),
    })
    if args.plot:
        write_svg(out.with_suffix(".svg"),
                  solution_chart(result.forward.q, result.forward.z, result.adjoint.xi, title=scenario.name))
    logger.info("optimize: J=%.8e after %d iterations, stationarity %s",
                result.objective, result.iterations, report.classification)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario = _load(args)
    eps_list = parse_eps_list(args.eps_list) if args.eps_list else scenario.optimizer.eps_list
    params = scenario.to_params(eps_list[0])
    obj = scenario.to_objective()
    warm = scenario.optimizer.warm_start and not args.cold_start
    sweep = vanishing_viscosity_sweep(eps_list, params, obj, scenario.initial_control(),
                                      opts=scenario.optimizer.options(), warm_start=warm,
                                      workers=thread_count())
    limit = sweep.limit_candidate
    limit_report = check_limit(limit.ell, sweep.reference_q, limit.adjoint.xi, limit.adjoint.lam,
                               params, obj.with_anchor(None, include_proximal=False))

    out = _out(args, scenario, ".csv")
    write_sweep_csv(out, sweep.rows)
    write_json(out.with_suffix(".json"), {
        "rows": [row.model_dump(mode="json") for row in sweep.rows],
        "limit": limit_report.model_dump(mode="json"),
    })
    if args.plot:
        write_svg(out.with_suffix(".svg"), sweep_chart(sweep.rows, title=scenario.name))
    logger.info("sweep over %d viscosities: limit classification %s", len(eps_list), limit_report.classification)
    return EXIT_OK


def cmd_gradcheck(args: argparse.Namespace) -> int:
    scenario = _load(args)
    eps = _epsilon(args, scenario)
    if not eps:
        raise ValidationError("gradcheck needs a positive viscosity (--epsilon or scenario.epsilon)")
    params = scenario.to_params(eps)
    ell = scenario.control_trajectory()
    rng = np.random.default_rng(scenario.seed)
    directions = [random_direction(scenario.grid, scenario.n, rng) for _ in range(args.directions)]
    rows = gradient_check(params, ell, scenario.to_objective(), directions, tau=args.tau)
    out = _out(args, scenario, ".json")
    write_json(out, [row.model_dump(mode="json") for row in rows])
    worst = max(row.rel_error for row in rows)
    logger.info("gradcheck: %d directions, worst relative error %.3e", len(rows), worst)
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    scenario = _load(args)
    table = read_solution_csv(args.tuple)
    if table.grid != scenario.grid:
        raise ValidationError(f"tuple grid {table.grid} differs from scenario grid {scenario.grid}")
    missing = [name for name in ("q", "xi", "lam", "ell") if name not in table.groups]
    if missing:
        raise ValidationError(f"tuple file lacks column groups {missing}")
    ell = table.trajectory("ell")
    q = table.trajectory("q")
    xi = table.trajectory("xi")
    lam = table.multiplier()
    obj = scenario.to_objective()
    if args.limit:
        params = scenario.to_params(0.0)
        report = check_limit(ell, q, xi, lam, params, obj.with_anchor(None, include_proximal=False))
    else:
        eps = _epsilon(args, scenario)
        if not eps:
            raise ValidationError("viscous check needs a positive viscosity; use --limit for the limit system")
        report = check_viscous(ell, q, xi, lam, scenario.to_params(eps), obj)
    out = _out(args, scenario, ".json")
    write_json(out, report)
    logger.info("check: %s system classified %s", report.system, report.classification)
    return EXIT_OK


# Parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rioc",
        description="Rate-independent evolutions with history: simulation, optimal control and stationarity checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    def _common(p: argparse.ArgumentParser, epsilon: bool = True) -> None:
        p.add_argument("scenario", help="Scenario JSON file")
        p.add_argument("--out", help="Output file (default: <name>_<command>.<ext>)")
        p.add_argument("--seed", type=int, default=None, help="Override the scenario seed")
        if epsilon:
            p.add_argument("--epsilon", type=float, default=None, help="Override the scenario viscosity")

    p = sub.add_parser("simulate", help="Forward solve; CSV of q, z, H and energy residuals")
    _common(p)
    p.add_argument("--plot", action="store_true", help="Also write an SVG chart")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="Steepest descent for the viscous control problem")
    _common(p)
    p.add_argument("--plot", action="store_true", help="Also write an SVG chart")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="Vanishing-viscosity sweep")
    _common(p, epsilon=False)
    p.add_argument("--eps-list", default=None, help="Comma-separated, strictly decreasing viscosities")
    p.add_argument("--cold-start", action="store_true", help="Solve every viscosity from the initial control")
    p.add_argument("--plot", action="store_true", help="Also write an SVG chart")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gradcheck", help="Finite differences against the adjoint gradient")
    _common(p)
    p.add_argument("--directions", type=int, default=3, help="Number of random directions")
    p.add_argument("--tau", type=float, default=1e-5, help="Finite-difference step")
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("check", help="Stationarity check of a stored tuple")
    _common(p)
    p.add_argument("--tuple", required=True, help="Solution CSV with q, xi, lam and ell columns")
    p.add_argument("--limit", action="store_true", help="Check the limit system instead of the viscous one")
    p.set_defaults(func=cmd_check)

    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    if getattr(args, "directions", 1) < 1:
        parser.error("--directions must be at least 1")
    try:
        return args.func(args)
    except (ValidationError, pydantic.ValidationError, ValueError, FileNotFoundError) as exc:
        logger.error("invalid input: %s", exc)
        return EXIT_INVALID
    except SolverError as exc:
        logger.error("solver failure: %s", exc)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands: simulate | equilibria | sweep | optimize | phase-field.
Every command reads one scenario file (--scenario), writes its outputs
under --out, and is deterministic: repeated runs with fixed-step
integration produce byte-identical files.

Exit codes: 0 success, 1 runtime/integration failure, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .control import Constant
from .engine import IntegrationError, integrate, phase_field
from .equilibria import (
    DiscriminantParams,
    continuous_control_equilibria,
    discriminant_lambda_bounds,
)
from .lumped import (
    AsymmetricRates,
    TwoClassParams,
    TwoClassState,
    lumped_field,
    lumped_symmetric_equilibrium,
    sweep_delay_vs_u,
    two_class_field,
    _steady_state,
)
from .mayer import OCProblem, OptimizerConfig, evaluate_objective, solve_mayer
from .model import one_segment_equilibrium, one_segment_field, two_segment_field
from .output import trajectory_rows, write_csv, write_json
from .scenario import ConfigParseError, Scenario

__all__ = ["main"]

_LABELS = {
    "one-segment": ("x_l", "x_s"),
    "two-segment": ("x_l", "x_a", "x_b", "x_s"),
    "lumped": ("x_l", "x_r", "x_n1", "x_s"),
    "two-class": (
        "x_l_lo",
        "x_l_hi",
        "x_r_lo",
        "x_r_hi",
        "x_n1_lo",
        "x_n1_hi",
        "x_s_lo",
        "x_s_hi",
    ),
}


def _field_for(scenario: Scenario):
    if scenario.model == "one-segment":
        return one_segment_field(scenario.params)
    if scenario.model == "two-segment":
        return two_segment_field(scenario.params)
    if scenario.model == "lumped":
        return lumped_field(scenario.params)
    return two_class_field(scenario.params)


def _rarity_for(model: str):
    if model == "two-class":
        return lambda x: (x[2] + x[3], x[4] + x[5])  # aggregate rare/bulk holders
    return (1, 2)


def _parallel_map(fn, items, threads: int):
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _cmd_simulate(scenario: Scenario, out: Path, fmt: str, threads: int) -> None:
    field = _field_for(scenario)
    control = scenario.controller
    if scenario.model == "one-segment":
        control = None
    traj = integrate(
        field,
        np.array(scenario.initial_state),
        control,
        scenario.integrator,
        rarity=_rarity_for(scenario.model),
    )
    labels = _LABELS[scenario.model]
    header, rows = trajectory_rows(traj, labels)
    if fmt == "json":
        payload = {
            "name": scenario.name,
            "columns": header,
            "rows": [[float(v) for v in row] for row in rows],
        }
        write_json(out / f"{scenario.name}_trajectory.json", payload)
    else:
        write_csv(out / f"{scenario.name}_trajectory.csv", header, rows)


def _two_class_equilibria_report(scenario: Scenario) -> dict:
    p: TwoClassParams = scenario.params
    u = 0.5
    if isinstance(scenario.controller, Constant):
        u = scenario.controller.u
    field = two_class_field(p)
    x, converged = _steady_state(
        field, np.array(scenario.initial_state), u, scenario.integrator
    )
    s = TwoClassState.from_array(np.maximum(x, 0.0))
    return {
        "u": u,
        "converged": converged,
        "state": s.as_dict(),
        "sojourn": (s.x_l + s.x_r + s.x_n1) / (p.lo.lambda_l + p.hi.lambda_l),
        "sojourn_lo": (s.x_l_lo + s.x_r_lo + s.x_n1_lo) / p.lo.lambda_l,
        "sojourn_hi": (s.x_l_hi + s.x_r_hi + s.x_n1_hi) / p.hi.lambda_l,
    }


def _cmd_equilibria(scenario: Scenario, out: Path, fmt: str, threads: int) -> None:
    p = scenario.params
    if scenario.model == "two-segment":
        payload = continuous_control_equilibria(p).to_report(p)
    elif scenario.model == "one-segment":
        x_l, x_s = one_segment_equilibrium(p)
        payload = {
            "equilibrium": {"x_l": x_l, "x_s": x_s},
            "sojourn": x_l / p.lambda_l,
        }
    elif scenario.model == "lumped":
        try:
            eq = lumped_symmetric_equilibrium(p)
        except AsymmetricRates as err:
            raise ConfigParseError(
                f"lumped equilibrium report needs beta_r = beta_n1: {err}"
            ) from err
        payload = {
            "u": 0.5,
            "state": eq.as_dict(),
            "sojourn": (eq.x_l + eq.x_r + eq.x_n1) / p.lambda_l,
        }
    else:
        payload = _two_class_equilibria_report(scenario)
    payload["name"] = scenario.name
    payload["model"] = scenario.model
    if fmt == "csv":
        rows = _flatten_for_csv(payload)
        write_csv(out / f"{scenario.name}_equilibria.csv", ("key", "value"), rows)
    else:
        write_json(out / f"{scenario.name}_equilibria.json", payload)


def _flatten_for_csv(payload, prefix: str = ""):
    rows = []
    if isinstance(payload, dict):
        for key in sorted(payload):
            rows.extend(_flatten_for_csv(payload[key], f"{prefix}{key}."))
    elif isinstance(payload, (list, tuple)):
        for i, item in enumerate(payload):
            rows.extend(_flatten_for_csv(item, f"{prefix}{i}."))
    else:
        rows.append((prefix.rstrip("."), payload))
    return rows


def _cmd_sweep(scenario: Scenario, out: Path, fmt: str, threads: int) -> None:
    spec = scenario.sweep
    if spec is None:
        raise ConfigParseError("scenario has no 'sweep' block")
    if spec.parameter == "u":
        points = sweep_delay_vs_u(
            scenario.params,
            spec.values,
            per_class=spec.per_class,
            cfg=scenario.integrator,
            x0=np.array(scenario.initial_state),
        )
        header = ["u", "sojourn"]
        if spec.per_class:
            header += ["sojourn_lo", "sojourn_hi"]
        header.append("converged")
        labels = _LABELS[scenario.model]
        header.extend(labels)
        rows = []
        for q in points:
            row = [q.u, q.sojourn]
            if spec.per_class:
                row += [q.sojourn_lo, q.sojourn_hi]
            row.append(q.converged)
            row.extend(q.state)
            rows.append(row)
    else:
        base = DiscriminantParams.from_params(scenario.params)
        lam0, lam1 = discriminant_lambda_bounds(base)

        def classify(lambda_s: float):
            eqs = continuous_control_equilibria(base.swarm_params(lambda_s))
            return (
                lambda_s,
                lam0,
                lam1,
                eqs.classification,
                len(eqs.off_diagonal),
                eqs.on_diagonal.x_a,
                eqs.on_diagonal.leecher_side_total / base.swarm_params(lambda_s).lambda_l,
            )

        header = [
            "lambda_s",
            "lambda0",
            "lambda1",
            "classification",
            "n_off_diagonal",
            "x_ab_on_diagonal",
            "sojourn_on_diagonal",
        ]
        rows = _parallel_map(classify, spec.values, threads)

    if fmt == "json":
        payload = {
            "name": scenario.name,
            "columns": list(header),
            "rows": [list(map(_jsonable, row)) for row in rows],
        }
        write_json(out / f"{scenario.name}_sweep.json", payload)
    else:
        write_csv(out / f"{scenario.name}_sweep.csv", header, rows)


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return float(value)
    return value


def _cmd_optimize(scenario: Scenario, out: Path, fmt: str, threads: int) -> None:
    spec = scenario.optimal_control
    if spec is None:
        raise ConfigParseError("scenario has no 'optimal_control' block")
    from .model import SwarmState

    x0 = SwarmState.from_array(np.array(scenario.initial_state))
    prob = OCProblem(
        params=scenario.params,
        x0=x0,
        horizon=spec.horizon,
        n_intervals=spec.n_intervals,
    )
    sol = solve_mayer(prob, OptimizerConfig(max_iter=spec.max_iter))

    h = spec.horizon / spec.n_intervals
    write_csv(
        out / f"{scenario.name}_control.csv",
        ("interval_start", "u"),
        [(k * h, u) for k, u in enumerate(sol.u_grid)],
    )
    header, rows = trajectory_rows(sol.trajectory, _LABELS["two-segment"])
    write_csv(out / f"{scenario.name}_oc_trajectory.csv", header, rows)

    from .control import BangBang, ContinuousRarest

    baselines = {
        "constant-half": evaluate_objective(scenario.params, x0, Constant(0.5), spec.horizon),
        "rarest-first": evaluate_objective(scenario.params, x0, ContinuousRarest(), spec.horizon),
        "bang-bang": evaluate_objective(scenario.params, x0, BangBang(), spec.horizon),
    }
    write_json(
        out / f"{scenario.name}_summary.json",
        {
            "name": scenario.name,
            "horizon": spec.horizon,
            "n_intervals": spec.n_intervals,
            "objective": sol.objective,
            "converged": sol.converged,
            "baseline_objectives": baselines,
        },
    )


def _cmd_phase_field(scenario: Scenario, out: Path, fmt: str, threads: int) -> None:
    spec = scenario.phase_field
    if spec is None:
        raise ConfigParseError("scenario has no 'phase_field' block")
    if scenario.controller is None:
        raise ConfigParseError("phase-field requires a controller in the scenario")
    result = phase_field(
        scenario.params,
        scenario.controller,
        spec.x_a,
        spec.x_b,
        resolution=spec.resolution,
        slaved=spec.slaved,
        cfg=scenario.integrator,
        corner_trajectories=spec.trajectories,
    )
    rows = []
    for i, a in enumerate(result.x_a):
        for j, b in enumerate(result.x_b):
            rows.append((a, b, result.dx_a[i, j], result.dx_b[i, j]))
    write_csv(out / f"{scenario.name}_arrows.csv", ("x_a", "x_b", "dx_a", "dx_b"), rows)

    if spec.trajectories:
        rows = []
        for idx, traj in enumerate(result.trajectories):
            for i, t in enumerate(traj.times):
                u = traj.controls[i] if traj.controls is not None else ""
                rows.append((idx, t, *traj.states[i], u))
        write_csv(
            out / f"{scenario.name}_phase_trajectories.csv",
            ("trajectory", "t", "x_l", "x_a", "x_b", "x_s", "u"),
            rows,
        )


_COMMANDS = {
    "simulate": _cmd_simulate,
    "equilibria": _cmd_equilibria,
    "sweep": _cmd_sweep,
    "optimize": _cmd_optimize,
    "phase-field": _cmd_phase_field,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmdyn",
        description="Epidemic swarm dynamics: simulation, equilibria, sweeps, optimal control.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "integrate the scenario and write the trajectory"),
        ("equilibria", "stationary-point report for the scenario's model"),
        ("sweep", "delay-vs-control or seeder-arrival-rate sweep"),
        ("optimize", "piecewise-constant terminal-cost control optimisation"),
        ("phase-field", "vector-field arrows and corner trajectories in (x_a, x_b)"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--scenario", required=True, type=Path, help="scenario JSON file")
        cmd.add_argument("--out", type=Path, default=Path("."), help="output directory")
        cmd.add_argument(
            "--format",
            choices=("csv", "json"),
            default=None,
            help="output format (default: csv; equilibria defaults to json)",
        )
        cmd.add_argument("--threads", type=int, default=1, help="parallel workers for sweeps")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    fmt = args.format or ("json" if args.command == "equilibria" else "csv")
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        scenario = Scenario.load(args.scenario)
        _COMMANDS[args.command](scenario, args.out, fmt, args.threads)
    except ConfigParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except IntegrationError as err:
        print(f"integration error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

    supersigma verify <suite> [--config path] [--seed n] [--json out.json]
    supersigma calibrate [--config path] [--seed n] [--json out.json]
    supersigma flow --steps N --dt x [--config path] [--seed n] [--json out]
    supersigma decompose --fixture path [--json out]

The default configuration may be pointed at with the SUPERSIGMA_CONFIG
environment variable; --config overrides it.  All subcommands print a JSON
document and exit with status 0 exactly when every check passed.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .config import CONFIG_ENV_VAR, SuiteConfig
from .deformations import decompose_gravitino, decompose_metric, MetricDeformation
from .gridfield import GrassmannField, Grid
from .report import CheckReport, SuiteReport, render_report
from .sigma2d import harmonic_flow
from .spin_surface import GravitinoField, SpinorField, SurfaceGeometry
from .suites import SUITE_NAMES, calibrate, run_suite

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="supersigma",
        description="Verification harness for the supersymmetric sigma-model library.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help=f"config JSON path (default: ${CONFIG_ENV_VAR})")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--json", dest="json_out", help="write the JSON report to this path")

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite", choices=SUITE_NAMES + ["all"])
    add_common(p_verify)

    p_cal = sub.add_parser("calibrate", help="calibrate action/variation signs")
    add_common(p_cal)

    p_flow = sub.add_parser("flow", help="run the harmonic gradient flow")
    p_flow.add_argument("--steps", type=int, required=True)
    p_flow.add_argument("--dt", type=float, required=True)
    add_common(p_flow)

    p_dec = sub.add_parser("decompose", help="decompose a deformation fixture")
    p_dec.add_argument("--fixture", required=True, help="fixture JSON path")
    add_common(p_dec)
    return parser


def _load_config(args) -> SuiteConfig:
    if getattr(args, "config", None):
        config = SuiteConfig.load(args.config)
    else:
        config = SuiteConfig.from_environment()
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    return config


def _emit(document: str, args) -> None:
    if getattr(args, "json_out", None):
        with open(args.json_out, "w") as fh:
            fh.write(document)
    sys.stdout.write(document)


def _report(config: SuiteConfig, checks: list[CheckReport]) -> SuiteReport:
    return SuiteReport(seed=config.seed, config_hash=config.config_hash(),
                       conventions=config.conventions.to_dict(), checks=checks)


def _cmd_verify(args) -> int:
    config = _load_config(args)
    checks = run_suite(config, args.suite)
    report = _report(config, checks)
    _emit(render_report(report), args)
    return 0 if report.all_passed else 1


def _cmd_calibrate(args) -> int:
    config = _load_config(args)
    updated, cal = calibrate(config)
    if getattr(args, "config", None):
        updated.save(args.config)
    document = json.dumps({"conventions": cal.to_dict()}, indent=2, sort_keys=True) + "\n"
    _emit(document, args)
    return 0


def _cmd_flow(args) -> int:
    config = _load_config(args)
    rng = np.random.default_rng([config.seed, SUITE_NAMES.index("flow")])
    grid = Grid(config.grid_shape, config.periods)
    geom = SurfaceGeometry.flat(grid, config.n_gen)
    winding = np.eye(2)
    coords = grid.coordinates()
    phi0 = []
    for _ in range(2):
        p = np.zeros(grid.shape)
        for _ in range(4):
            kx = int(rng.integers(2, 5)) * (1 if rng.integers(0, 2) else -1)
            ky = int(rng.integers(2, 5))
            p += 0.2 * rng.normal() * np.cos(kx * coords[0] + ky * coords[1]
                                             + rng.uniform(0, 2 * np.pi))
        phi0.append(p)
    result = harmonic_flow(geom, phi0, steps=args.steps, dt=args.dt, winding=winding)
    document = json.dumps({
        "converged": result.converged,
        "steps_taken": result.steps_taken,
        "initial_energy": result.energies[0],
        "final_energy": result.energies[-1],
    }, indent=2, sort_keys=True) + "\n"
    _emit(document, args)
    return 0 if result.converged else 1


def _field_from_values(grid: Grid, n_gen: int, values, mask: int) -> GrassmannField:
    return GrassmannField(grid, n_gen, {mask: np.asarray(values, dtype=float)})


def _cmd_decompose(args) -> int:
    config = _load_config(args)
    with open(args.fixture) as fh:
        fixture = json.load(fh)
    grid = Grid(tuple(fixture["shape"]), tuple(fixture.get("periods", config.periods)))
    n_gen = config.n_gen
    geom = SurfaceGeometry.flat(grid, n_gen)
    chi0 = GravitinoField.zero(grid, n_gen)
    kind = fixture["kind"]
    if kind == "metric":
        t = fixture["tensor"]
        g11 = _field_from_values(grid, n_gen, t["11"], 0)
        g12 = _field_from_values(grid, n_gen, t["12"], 0)
        g22 = _field_from_values(grid, n_gen, t["22"], 0)
        result = decompose_metric(geom, chi0, MetricDeformation([[g11, g12], [g12, g22]]))
    elif kind == "gravitino":
        # Numeric fixture components are placed on the first odd generator.
        comps = fixture["components"]
        mask = 0b1
        dchi = GravitinoField([
            SpinorField([_field_from_values(grid, n_gen, comps[f"chi{a}"][s], mask)
                         for s in range(2)])
            for a in (1, 2)])
        result = decompose_gravitino(geom, chi0, dchi)
    else:
        raise ValueError(f"unknown fixture kind {kind!r}; expected metric or gravitino")
    document = json.dumps({
        "kind": kind,
        "residual_norms": result.residual_norms(),
        "null_directions": result.null_directions,
    }, indent=2, sort_keys=True) + "\n"
    _emit(document, args)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "verify": _cmd_verify,
        "calibrate": _cmd_calibrate,
        "flow": _cmd_flow,
        "decompose": _cmd_decompose,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

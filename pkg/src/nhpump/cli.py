"""Command-line front end: sweeps and figure data as CSV plus a JSON manifest.

Subcommands: spectrum, gapscan, chern, pump, gbz, oracle. Exit codes are 0 on
success, 2 for usage errors, 3 for domain errors (the error class is printed
on stderr) and 1 for anything else.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_TOLERANCES, TWO_PI, Band, Boundary, DriveParams, TorusGrid, resolve_preset
from .eigen import principal_energy
from .errors import DomainError
from .gapscan import gapless_intervals, min_gap
from .gbz import gbz_contour, gbz_radius, obc_spectrum_gbz
from .io import RunManifest, default_run_dir, write_csv, write_manifest
from .model import bloch_vector_grid, momentum_radius
from .pump import bod_cycle
from .realspace import build_chain, exact_spectrum, spectral_distance
from .reporting import build_summary_message, quartile_deviation
from .topology import chern_derivative, chern_plaquette
from .workers import resolve_jobs, run_ordered

logger = logging.getLogger(__name__)

COMMANDS = ("spectrum", "gapscan", "chern", "pump", "gbz", "oracle")


def _env_float(name: str, default: float) -> float:
    return float(os.environ.get(name, default))


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument(
        "--gamma",
        type=float,
        default=_env_float("NHPUMP_GAMMA", 0.3),
        help="Nonreciprocity gamma (default: 0.3)",
    )
    parent.add_argument("--delta", type=float, default=1.0, help="Staggered potential amplitude (0 gives SSH)")
    parent.add_argument("--output-dir", help="Directory for CSV and manifests (default: runs/<timestamp>_<command>)")
    parent.add_argument("--jobs", default=None, help="Worker processes for sweeps (fallback: NHPUMP_JOBS)")
    parent.add_argument("--preset", help="Named defaults from the shipped presets file (or NHPUMP_PRESETS)")
    parent.add_argument("--debug", action="store_true", help="Enable verbose debug logging")
    return parent


def _add_boundary(p: argparse.ArgumentParser) -> None:
    p.add_argument("--boundary", choices=[b.value for b in Boundary], default="pbc", help="pbc (Bloch) or obc (GBZ)")


def _add_mu_sweep(p: argparse.ArgumentParser, n_mu: int) -> None:
    p.add_argument("--mu-min", type=float, default=-1.0)
    p.add_argument("--mu-max", type=float, default=1.0)
    p.add_argument("--n-mu", type=int, default=n_mu)


def build_parser() -> Tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    parent = _common_parent()
    parser = argparse.ArgumentParser(
        prog="nhpump",
        description="Biorthogonal Chern numbers and charge pumping in the driven non-Hermitian Rice-Mele chain",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands: Dict[str, argparse.ArgumentParser] = {}

    p = sub.add_parser("spectrum", parents=[parent], help="E(k) or E(theta) at fixed drive phase")
    _add_boundary(p)
    p.add_argument("--mu", type=float)
    p.add_argument("--t", type=float, default=0.0, help="Drive phase")
    p.add_argument("--n", type=int, default=401, help="Momentum samples")
    p.add_argument("--n-t", type=int, default=0, help="Also write spectra at this many drive phases over a cycle")
    commands["spectrum"] = p

    p = sub.add_parser("gapscan", parents=[parent], help="Gapless mu intervals and exceptional points")
    _add_boundary(p)
    _add_mu_sweep(p, 201)
    p.add_argument("--grid", type=int, default=64, help="Coarse torus grid per direction")
    p.add_argument("--tol", type=float, default=DEFAULT_TOLERANCES.gapless_tol, help="Gapless threshold on min |E|")
    commands["gapscan"] = p

    p = sub.add_parser("chern", parents=[parent], help="Chern number sweep (plaquette and derivative)")
    _add_boundary(p)
    _add_mu_sweep(p, 81)
    p.add_argument("--grid", type=int, default=128, help="Torus grid per direction")
    p.add_argument("--band", choices=[b.value for b in Band], default="minus")
    commands["chern"] = p

    p = sub.add_parser("pump", parents=[parent], help="Biorthogonal displacement over one drive cycle")
    _add_boundary(p)
    _add_mu_sweep(p, 31)
    p.add_argument("--mu", type=float, action="append", help="Explicit mu value (repeatable, overrides the sweep)")
    p.add_argument("--band", choices=[b.value for b in Band], default="minus")
    p.add_argument("--adiabatic-factor", "--A", dest="adiabatic_factor", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=4000, help="RK4 steps per cycle")
    p.add_argument("--n-k", type=int, default=64, help="Momentum points")
    commands["pump"] = p

    p = sub.add_parser("gbz", parents=[parent], help="phi-sweep of the generalized Brillouin zone")
    p.add_argument("--mu", type=float)
    p.add_argument("--t", type=float, default=0.3)
    p.add_argument("--n-phi", type=int, default=64)
    commands["gbz"] = p

    p = sub.add_parser("oracle", parents=[parent], help="Finite open chains against the GBZ spectrum")
    p.add_argument("--mu", type=float)
    p.add_argument("--t", type=float, default=0.3)
    p.add_argument("--n-cells", default="15,30,60", help="Comma-separated chain lengths")
    commands["oracle"] = p

    return parser, commands


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser, commands = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--preset")
    known, _ = pre.parse_known_args(list(argv))
    if known.preset:
        try:
            bundle = resolve_preset(known.preset)
        except (KeyError, FileNotFoundError, ValueError) as exc:
            parser.error(str(exc).strip("'\""))
        if bundle.command not in commands:
            parser.error(f"preset '{bundle.key}' targets unknown command '{bundle.command}'")
        commands[bundle.command].set_defaults(**bundle.options)

    args = parser.parse_args(list(argv))
    if args.command in {"spectrum", "gbz", "oracle"} and args.mu is None:
        commands[args.command].error("--mu is required")
    return args


def configure_logging(debug: bool) -> None:
    logging.basicConfig(level=logging.DEBUG if debug else logging.INFO, format="[%(levelname)s] %(message)s")


def _output_dir(args: argparse.Namespace) -> Path:
    if args.output_dir:
        path = Path(args.output_dir).expanduser().resolve()
    else:
        path = default_run_dir(args.command)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _params(args: argparse.Namespace, mu: float) -> DriveParams:
    return DriveParams(
        mu=mu,
        gamma=args.gamma,
        delta=args.delta,
        adiabatic_factor=getattr(args, "adiabatic_factor", 1.0),
    )


def _mu_values(args: argparse.Namespace) -> List[float]:
    if getattr(args, "mu", None):
        return [float(mu) for mu in args.mu]
    return [float(mu) for mu in np.linspace(args.mu_min, args.mu_max, args.n_mu)]


def _finite(value: Optional[float]) -> float:
    return float("nan") if value is None else float(value)


# ---------------------------------------------------------------------------
# sweep tasks (module level so they pickle into worker processes)


def _refined_gap(p: DriveParams, boundary: str) -> float:
    """min |E| after subdivision and polish; grid nodes alone miss off-grid closures."""
    return min_gap(p, Boundary(boundary)).min_abs_e


def _chern_task(task: Tuple[float, Dict[str, Any]]) -> List[Any]:
    mu, opts = task
    p = DriveParams(mu=mu, gamma=opts["gamma"], delta=opts["delta"])
    grid = TorusGrid(opts["grid"], opts["grid"], opts["boundary"])
    band = Band(opts["band"])
    try:
        gap = _refined_gap(p, opts["boundary"])
        if gap < DEFAULT_TOLERANCES.gapless_tol:
            logger.info("chern mu=%g: gapless (refined min |E| = %.2e)", mu, gap)
            return [mu, float("nan"), float("nan"), False, gap]
        plaquette = chern_plaquette(p, band, grid, strict=False)
        derivative = chern_derivative(p, band, grid)
    except DomainError as exc:
        logger.info("chern mu=%g: %s (%s)", mu, type(exc).__name__, exc)
        return [mu, float("nan"), float("nan"), False, float("nan")]
    return [mu, plaquette.value, derivative.value, plaquette.converged, gap]


def _pump_task(task: Tuple[float, Dict[str, Any]]) -> Dict[str, Any]:
    mu, opts = task
    p = DriveParams(mu=mu, gamma=opts["gamma"], delta=opts["delta"], adiabatic_factor=opts["adiabatic_factor"])
    grid = TorusGrid(opts["n_k"], opts["n_k"], opts["boundary"])
    try:
        gap = _refined_gap(p, opts["boundary"])
        gapless = gap < DEFAULT_TOLERANCES.gapless_tol
        result = bod_cycle(p, Band(opts["band"]), grid, n_steps=opts["steps"], with_chern=not gapless)
        radius = momentum_radius(p, grid.boundary)
    except DomainError as exc:
        logger.info("pump mu=%g: %s (%s)", mu, type(exc).__name__, exc)
        return {"mu": mu, "error": type(exc).__name__}
    chern = result.chern_reference
    converged = bool(chern is not None and chern.converged)
    return {
        "mu": mu,
        "re_bod": result.bod.real,
        "im_bod": result.bod.imag,
        "chern": chern.integer_value if converged else None,
        "converged": converged,
        "gapless": gapless,
        "min_abs_e": gap,
        "gbz_radius": radius,
        "max_abs_im": result.im_stats.max_abs_im,
        "im_range": result.im_stats.im_range,
        "max_overlap_drift": result.max_overlap_drift,
        "im_series": result.im_stats.im_series,
    }


def _oracle_task(task: Tuple[int, Dict[str, Any]]) -> Dict[str, Any]:
    n_cells, opts = task
    p = DriveParams(mu=opts["mu"], gamma=opts["gamma"], delta=opts["delta"])
    chain = exact_spectrum(build_chain(p, opts["t"], n_cells))
    predicted = obc_spectrum_gbz(p, opts["t"], 4 * n_cells)
    return {"n_cells": n_cells, "chain": chain, "gbz": predicted, "distance": spectral_distance(chain, predicted)}


# ---------------------------------------------------------------------------
# commands


def run_spectrum(args: argparse.Namespace, out_dir: Path, manifest: RunManifest) -> List[str]:
    boundary = Boundary(args.boundary)
    p = _params(args, args.mu)
    momenta = TWO_PI * np.arange(args.n) / args.n
    energy = principal_energy(bloch_vector_grid(p, momenta, args.t, boundary))
    header = ["momentum", "re_e_plus", "im_e_plus", "re_e_minus", "im_e_minus"]
    rows = [[k, e.real, e.imag, -e.real, -e.imag] for k, e in zip(momenta, energy)]
    path = out_dir / "spectrum.csv"
    write_csv(path, header, rows)
    outputs = [path.name]

    if args.n_t:
        phases = TWO_PI * np.arange(args.n_t) / args.n_t
        cycle = principal_energy(bloch_vector_grid(p, momenta[None, :], phases[:, None], boundary))
        cycle_rows = [
            [t, k, e.real, e.imag, -e.real, -e.imag]
            for t, row in zip(phases, cycle)
            for k, e in zip(momenta, row)
        ]
        cycle_path = out_dir / "spectrum_cycle.csv"
        write_csv(cycle_path, ["drive_phase"] + header, cycle_rows)
        outputs.append(cycle_path.name)

    manifest.parameters.update(p.as_dict(), boundary=boundary.value, drive_phase=args.t)
    manifest.grids.update(n_momentum=args.n, n_phase=args.n_t)
    manifest.derived.update(min_abs_e=float(np.min(np.abs(energy))))
    if boundary is Boundary.OBC:
        manifest.derived["gbz_radius"] = gbz_radius(p)
    return outputs


def run_gapscan(args: argparse.Namespace, out_dir: Path, manifest: RunManifest) -> List[str]:
    boundary = Boundary(args.boundary)
    scan = gapless_intervals(
        args.gamma,
        (args.mu_min, args.mu_max),
        args.n_mu,
        boundary,
        args.tol,
        delta=args.delta,
        grid_size=args.grid,
        jobs=resolve_jobs(args.jobs),
    )
    rows_path = out_dir / "gapscan.csv"
    write_csv(
        rows_path,
        ["mu", "min_abs_e", "argmin_momentum", "argmin_phase", "ep_defect"],
        (report.as_row() for report in scan.reports),
    )
    intervals_path = out_dir / "gapscan_intervals.csv"
    write_csv(intervals_path, ["mu_lo", "mu_hi"], scan.intervals)

    manifest.parameters.update(gamma=args.gamma, delta=args.delta, boundary=boundary.value, tol=args.tol)
    manifest.grids.update(mu_min=args.mu_min, mu_max=args.mu_max, n_mu=args.n_mu, torus=args.grid)
    manifest.derived.update(scan.summary())
    return [rows_path.name, intervals_path.name]


def run_chern(args: argparse.Namespace, out_dir: Path, manifest: RunManifest) -> List[str]:
    opts = {"gamma": args.gamma, "delta": args.delta, "grid": args.grid, "boundary": args.boundary, "band": args.band}
    rows = run_ordered(_chern_task, [(mu, opts) for mu in _mu_values(args)], resolve_jobs(args.jobs))
    path = out_dir / "chern.csv"
    write_csv(path, ["mu", "c_plaquette", "c_derivative", "converged", "min_abs_e"], rows)

    plateaus = sorted({int(round(row[1])) for row in rows if row[3]})
    manifest.parameters.update(opts)
    manifest.grids.update(mu_min=args.mu_min, mu_max=args.mu_max, n_mu=args.n_mu, torus=args.grid)
    manifest.derived.update(
        plateaus=plateaus,
        not_converged=sum(1 for row in rows if not row[3]),
        gapless=[row[0] for row in rows if row[4] < DEFAULT_TOLERANCES.gapless_tol],
    )
    return [path.name]


def run_pump(args: argparse.Namespace, out_dir: Path, manifest: RunManifest) -> List[str]:
    opts = {
        "gamma": args.gamma,
        "delta": args.delta,
        "boundary": args.boundary,
        "band": args.band,
        "adiabatic_factor": args.adiabatic_factor,
        "steps": args.steps,
        "n_k": args.n_k,
    }
    results = run_ordered(_pump_task, [(mu, opts) for mu in _mu_values(args)], resolve_jobs(args.jobs))

    header = ["mu", "re_bod", "im_bod", "chern", "max_abs_im", "im_range", "min_abs_e", "gapless"]
    rows = [[r["mu"]] + [_finite(r.get(key)) for key in header[1:-1]] + [r.get("gapless")] for r in results]
    path = out_dir / "pump.csv"
    write_csv(path, header, rows)

    series_path = out_dir / "im_series.csv"
    write_csv(
        series_path,
        ["mu", "time", "im_max", "im_min"],
        ([r["mu"], t, hi, lo] for r in results for t, hi, lo in r.get("im_series", [])),
    )

    deviation = quartile_deviation(r for r in results if "error" not in r)
    manifest.parameters.update(opts)
    manifest.grids.update(n_momentum=args.n_k, n_steps=args.steps)
    manifest.derived.update(
        failed={str(r["mu"]): r["error"] for r in results if "error" in r},
        runs={
            str(r["mu"]): {
                "chern": r["chern"],
                "converged": r["converged"],
                "gapless": r["gapless"],
                "bod": [r["re_bod"], r["im_bod"]],
                "gbz_radius": r["gbz_radius"],
                "min_abs_e": r["min_abs_e"],
            }
            for r in results
            if "error" not in r
        },
        max_overlap_drift=max((r.get("max_overlap_drift", 0.0) for r in results), default=0.0),
        deviation=deviation.as_dict() if deviation else None,
    )
    return [path.name, series_path.name]


def run_gbz(args: argparse.Namespace, out_dir: Path, manifest: RunManifest) -> List[str]:
    p = _params(args, args.mu)
    contour = gbz_contour(p, args.t, args.n_phi)
    rows = [
        [phi, beta.real, beta.imag, abs(beta), contour.radius] for phi, pair in contour.samples for beta in pair
    ]
    path = out_dir / "gbz.csv"
    write_csv(path, ["phi", "re_beta", "im_beta", "abs_beta", "gbz_radius"], rows)

    manifest.parameters.update(p.as_dict(), drive_phase=args.t)
    manifest.grids.update(n_phi=args.n_phi)
    manifest.derived.update(
        gbz_radius=contour.radius,
        closed_form_radius=gbz_radius(p),
        complex_branch=contour.complex_branch,
        max_root_mismatch=contour.max_root_mismatch,
    )
    return [path.name]


def run_oracle(args: argparse.Namespace, out_dir: Path, manifest: RunManifest) -> List[str]:
    sizes = [int(part) for part in str(args.n_cells).split(",") if part.strip()]
    opts = {"mu": args.mu, "gamma": args.gamma, "delta": args.delta, "t": args.t}
    results = run_ordered(_oracle_task, [(n, opts) for n in sizes], resolve_jobs(args.jobs))

    spectra_path = out_dir / "oracle_spectra.csv"
    write_csv(
        spectra_path,
        ["n_cells", "source", "re_e", "im_e"],
        (
            [r["n_cells"], source, e.real, e.imag]
            for r in results
            for source in ("chain", "gbz")
            for e in r[source]
        ),
    )
    distances_path = out_dir / "oracle_distances.csv"
    write_csv(distances_path, ["n_cells", "spectral_distance"], ([r["n_cells"], r["distance"]] for r in results))

    manifest.parameters.update(opts)
    manifest.grids.update(n_cells=sizes, theta_points_per_cell=4)
    manifest.derived.update(
        distances={str(r["n_cells"]): r["distance"] for r in results},
        gbz_radius=gbz_radius(_params(args, args.mu)),
    )
    return [spectra_path.name, distances_path.name]


RUNNERS: Dict[str, Callable[[argparse.Namespace, Path, RunManifest], List[str]]] = {
    "spectrum": run_spectrum,
    "gapscan": run_gapscan,
    "chern": run_chern,
    "pump": run_pump,
    "gbz": run_gbz,
    "oracle": run_oracle,
}


def _highlights(manifest: RunManifest) -> List[str]:
    derived = manifest.derived
    lines: List[str] = []
    if "gbz_radius" in derived:
        lines.append(f"GBZ radius: {derived['gbz_radius']:.12g}")
    if "intervals" in derived:
        spans = ", ".join(f"[{lo:.4f}, {hi:.4f}]" for lo, hi in derived["intervals"]) or "none"
        lines.append(f"Gapless intervals: {spans}")
    if "plateaus" in derived:
        lines.append(f"Chern plateaus: {derived['plateaus']} ({derived['not_converged']} point(s) not converged)")
    if "distances" in derived:
        lines.append("Hausdorff distance: " + ", ".join(f"N={n}: {d:.4g}" for n, d in derived["distances"].items()))
    deviation = derived.get("deviation")
    if deviation:
        lines.append(
            "Mean |Re BOD - C|: top Im-range quartile "
            f"{deviation['top_quartile_mean']:.4f}, bottom {deviation['bottom_quartile_mean']:.4f}"
        )
    return lines


def main(argv: Sequence[str]) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    configure_logging(args.debug)
    manifest = RunManifest(command=args.command, argv=list(argv))
    manifest.tolerances.update(DEFAULT_TOLERANCES.as_dict())
    try:
        out_dir = _output_dir(args)
        outputs = RUNNERS[args.command](args, out_dir, manifest)
        manifest.outputs.extend(outputs)
        manifest.finish()
        for name in outputs:
            write_manifest(out_dir / name, manifest)
    except DomainError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except KeyboardInterrupt:
        print("\nstop: interrupted by user", file=sys.stderr)
        return 130
    except Exception as exc:
        logger.debug("unhandled error", exc_info=True)
        print(f"fatal: {exc}", file=sys.stderr)
        return 1

    summary = {
        "command": args.command,
        "parameters": {k: v for k, v in manifest.parameters.items() if isinstance(v, (int, float, str))},
        "highlights": _highlights(manifest),
        "outputs": manifest.outputs,
        "elapsed_seconds": manifest.elapsed_seconds,
    }
    print(build_summary_message(summary, out_dir))
    return 0


def cli() -> None:
    raise SystemExit(main(sys.argv[1:]))


if __name__ == "__main__":
    cli()

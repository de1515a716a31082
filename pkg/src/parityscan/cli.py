"""Command-line interface.

Subcommands:
  scan            run a configured scan and write the surface artifacts
  exact           analytic surface only (Monte Carlo suppressed)
  compare         Monte Carlo vs analytic z-score report
  reproduce-fig2  one-command reproduction of the three demonstration panels

Exit codes: 0 success, 2 configuration error, 3 runtime or numerical error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, load_config
from .detection import DetectorModel
from .errors import ConfigError, DomainError, TruncationOverflow
from .estimator import ScanGrid, SeedSpec, WignerSurface, scan
from .fock import TruncationPolicy
from .output import write_surface
from .states import PhaseDiffusionSpec, coherent, phase_diffused_coherent, vacuum

# Parameters of the demonstration panels.  The detector carries the default
# (measured-bound) imperfections; the coherent amplitude is set so that the
# detected mean photon number eta*T*|alpha0|^2 equals 1.34.  The phase-diffused
# panel needs a larger amplitude: the angular width of the parity kernel is
# 1/(2 r), so only a sufficiently long lever arm resolves the turning-point
# peaks to within one phase step of the scan.
FIG2_DETECTOR = DetectorModel()
FIG2_N_INTERVALS = 8000
FIG2_GRID = dict(n_radial=20, n_phases=40)
FIG2_COHERENT_DETECTED_MEAN = 1.34
FIG2_DIFFUSED_ALPHA0_MAG = 4.0
FIG2_DIFFUSED_AMPLITUDE = 7.75 * 2.0 * math.pi / 40.0
FIG2_DIFFUSED_NODES = 64
FIG2_DIFFUSED_CUTOFF = 128
FIG2_DIFFUSED_MAX_N_VAC = 16.0
FIG2_DEFAULT_SEED = 20240131


def fig2_coherent_amplitude(model: DetectorModel = FIG2_DETECTOR) -> float:
    return math.sqrt(FIG2_COHERENT_DETECTED_MEAN / model.eta_t)


def _angular_maxima(ring: np.ndarray, phases: np.ndarray) -> list[float]:
    """Phases of strict cyclic local maxima, wrapped to (-pi, pi]."""
    left = np.roll(ring, 1)
    right = np.roll(ring, -1)
    mask = (ring > left) & (ring > right)
    locs = phases[mask]
    return sorted(float(p - 2.0 * math.pi) if p > math.pi else float(p) for p in locs)


def vacuum_symmetry_report(surface: WignerSurface, n_intervals: int) -> dict:
    """Maximum angular deviation from the per-radius mean, in units of the
    predicted statistical error at that radius."""
    pi_hat = surface.value_grid("pi_hat")
    exact = surface.value_grid("exact_pi")
    worst = 0.0
    for i in range(pi_hat.shape[0]):
        row = pi_hat[i]
        if np.any(np.isnan(row)):
            continue
        spread = float(np.max(np.abs(row - row.mean())))
        sigma = math.sqrt(max(0.0, 1.0 - exact[i, 0] ** 2) / n_intervals)
        if sigma == 0.0:
            ratio = 0.0 if spread == 0.0 else math.inf
        else:
            ratio = spread / sigma
        worst = max(worst, ratio)
    return {"max_spread_sigmas": worst}


def diffused_peak_report(surface: WignerSurface, amplitude: float, center: float) -> dict:
    """Locate the angular maxima of the analytic surface on its ridge ring.

    Peak finding runs on the exact surface (the Monte Carlo one carries
    ~1/sqrt(N) noise that fakes local maxima); the Monte Carlo values at the
    located nodes are reported alongside.
    """
    exact = surface.value_grid("exact_pi")
    ring_index = int(np.unravel_index(np.nanargmax(exact), exact.shape)[0])
    phases = np.asarray(surface.grid.phases)
    locs = _angular_maxima(exact[ring_index], phases)
    step = 2.0 * math.pi / len(phases)
    targets = [center - amplitude, center + amplitude]
    errors = []
    for loc in locs:
        errors.append(min(abs(loc - t) for t in targets))
    mc = surface.value_grid("pi_hat")
    mc_at_peaks = [
        float(mc[ring_index, int(round((loc % (2.0 * math.pi)) / step)) % len(phases)])
        for loc in locs
    ]
    return {
        "ring_index": ring_index,
        "ring_n_vac": surface.grid.radial_levels[ring_index],
        "maxima_phases": locs,
        "targets": targets,
        "errors": errors,
        "phase_step": step,
        "within_one_step": bool(locs) and all(e <= step for e in errors),
        "n_maxima": len(locs),
        "mc_at_peaks": mc_at_peaks,
    }


def reproduce_fig2(
    out_dir: str | Path,
    master_seed: int = FIG2_DEFAULT_SEED,
    workers: int = 1,
) -> dict:
    """Run the vacuum, weak-coherent, and phase-diffused scans; write artifacts.

    Returns the summary dictionary that is also rendered to summary.txt.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model = FIG2_DETECTOR
    base_policy = TruncationPolicy()
    base_grid = ScanGrid.uniform(**FIG2_GRID, max_n_vac=4.0)
    alpha0 = fig2_coherent_amplitude(model)
    diffused_spec = PhaseDiffusionSpec(
        center_phase=0.0,
        modulation_amplitude=FIG2_DIFFUSED_AMPLITUDE,
        nodes=FIG2_DIFFUSED_NODES,
    )
    diffused_policy = TruncationPolicy(cutoff=FIG2_DIFFUSED_CUTOFF)
    panels = {
        "vacuum": (vacuum(base_policy), base_grid),
        "coherent": (coherent(alpha0, base_policy), base_grid),
        "phase_diffused": (
            phase_diffused_coherent(FIG2_DIFFUSED_ALPHA0_MAG, diffused_spec, diffused_policy),
            ScanGrid.uniform(**FIG2_GRID, max_n_vac=FIG2_DIFFUSED_MAX_N_VAC),
        ),
    }

    surfaces: dict[str, WignerSurface] = {}
    summary: dict = {
        "seed": master_seed,
        "n_intervals": FIG2_N_INTERVALS,
        "detector": {
            "eta": model.eta,
            "transmission": model.transmission,
            "visibility": model.visibility,
            "xi": model.xi,
            "ordering_s": model.ordering_s,
        },
        "coherent_alpha0": alpha0,
        "panels": {},
    }
    for k, (name, (rho, grid)) in enumerate(panels.items()):
        surface = scan(
            rho,
            model,
            grid,
            n_intervals=FIG2_N_INTERVALS,
            seed=SeedSpec(master_seed + k),
            mode="both",
            workers=workers,
        )
        surfaces[name] = surface
        write_surface(surface, out_dir, basename=name, formats=("csv", "json", "matrix"))
        pi_hat = surface.value_grid("pi_hat")
        summary["panels"][name] = {
            "max_pi_hat": float(np.nanmax(pi_hat)),
            "min_pi_hat": float(np.nanmin(pi_hat)),
            "max_exact": float(np.nanmax(surface.value_grid("exact_pi"))),
            "invalid_points": surface.metadata["invalid_points"],
        }

    summary["vacuum_symmetry"] = vacuum_symmetry_report(surfaces["vacuum"], FIG2_N_INTERVALS)
    summary["coherent_peak"] = summary["panels"]["coherent"]["max_pi_hat"]
    summary["coherent_peak_expected"] = math.exp(
        -2.0 * (1.0 - model.xi) * model.eta_t * alpha0**2
    )
    summary["peak_ratio_coherent_to_vacuum"] = (
        summary["panels"]["coherent"]["max_pi_hat"]
        / summary["panels"]["vacuum"]["max_pi_hat"]
    )
    summary["diffused_peaks"] = diffused_peak_report(
        surfaces["phase_diffused"], FIG2_DIFFUSED_AMPLITUDE, 0.0
    )

    report = _render_fig2_summary(summary)
    (out_dir / "summary.txt").write_text(report)
    return summary


def _render_fig2_summary(summary: dict) -> str:
    lines = [
        "Displaced-parity scan reproduction (three panels)",
        f"seed={summary['seed']}  N={summary['n_intervals']} intervals/point",
        "detector: eta={eta:.3f} T={transmission:.3f} v={visibility:.3f} "
        "xi={xi:.4f} s={ordering_s:.4f}".format(**summary["detector"]),
        "",
    ]
    for name, panel in summary["panels"].items():
        lines.append(
            f"panel {name}: pi_hat in [{panel['min_pi_hat']:+.4f}, "
            f"{panel['max_pi_hat']:+.4f}], exact max {panel['max_exact']:+.4f}, "
            f"invalid points {panel['invalid_points']}"
        )
    vs = summary["vacuum_symmetry"]["max_spread_sigmas"]
    lines += [
        "",
        f"vacuum phase symmetry: max angular deviation {vs:.2f} sigma",
        f"coherent peak: {summary['coherent_peak']:.4f} "
        f"(expected {summary['coherent_peak_expected']:.4f}); "
        f"ratio to vacuum peak {summary['peak_ratio_coherent_to_vacuum']:.4f}",
    ]
    dp = summary["diffused_peaks"]
    peaks = ", ".join(f"{p:+.4f}" for p in dp["maxima_phases"])
    tgts = ", ".join(f"{t:+.4f}" for t in dp["targets"])
    lines += [
        f"phase-diffused ridge ring: index {dp['ring_index']} "
        f"(n_vac={dp['ring_n_vac']:.3f})",
        f"  angular maxima: [{peaks}] at targets [{tgts}]",
        f"  {dp['n_maxima']} maxima, max |error| "
        f"{max(dp['errors'], default=float('nan')):.4f} rad vs phase step "
        f"{dp['phase_step']:.4f} rad -> within one step: {dp['within_one_step']}",
        "",
    ]
    return "\n".join(lines) + "\n"


def _run_configured(cfg: RunConfig) -> WignerSurface:
    rho = cfg.build_state()
    surface = scan(
        rho,
        cfg.detector,
        cfg.grid,
        n_intervals=cfg.n_intervals,
        seed=cfg.seed,
        mode=cfg.mode,
        workers=cfg.workers,
    )
    surface.metadata["config"] = cfg.to_mapping()
    return surface


def _apply_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    return cfg.with_overrides(
        seed=None if args.seed is None else SeedSpec(args.seed),
        mode=getattr(args, "mode", None),
        output_dir=args.out,
        formats=None if not args.format else tuple(args.format),
        workers=args.workers,
    )


def _cmd_scan(args: argparse.Namespace, forced_mode: str | None = None) -> int:
    cfg = load_config(args.config)
    cfg = _apply_overrides(cfg, args)
    if forced_mode is not None:
        cfg = cfg.with_overrides(mode=forced_mode)
    surface = _run_configured(cfg)
    written = write_surface(surface, cfg.output_dir, cfg.basename, cfg.formats)
    for fmt, path in written.items():
        print(f"wrote {fmt}: {path}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    cfg = _apply_overrides(cfg, args).with_overrides(mode="both")
    surface = _run_configured(cfg)
    z = np.array([pt.z for pt in surface.points if pt.valid and pt.z is not None])
    if z.size == 0:
        print("no valid points to compare")
        return 3
    print(f"points compared: {z.size}")
    print(f"max |z|: {np.abs(z).max():.3f}")
    for thr in (1.0, 2.0, 3.0):
        frac = float(np.mean(np.abs(z) > thr))
        print(f"fraction |z| > {thr:.0f}: {frac:.4f}")
    worst = int(np.abs(z).argmax())
    pts = [pt for pt in surface.points if pt.valid and pt.z is not None]
    wp = pts[worst]
    print(
        f"worst point: radial {wp.radial_index}, phase {wp.phase_index}, "
        f"pi_hat {wp.pi_hat:+.4f}, exact {wp.exact_pi:+.4f}"
    )
    if args.out is not None:
        written = write_surface(surface, args.out, cfg.basename, cfg.formats)
        for fmt, path in written.items():
            print(f"wrote {fmt}: {path}")
    return 0


def _cmd_reproduce_fig2(args: argparse.Namespace) -> int:
    seed = FIG2_DEFAULT_SEED if args.seed is None else args.seed
    summary = reproduce_fig2(args.out, master_seed=seed, workers=args.workers or 1)
    print(_render_fig2_summary(summary), end="")
    print(f"artifacts in {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parityscan",
        description="Wigner-function scans by displaced-parity photon counting",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, needs_config: bool = True) -> None:
        if needs_config:
            p.add_argument("--config", required=True, help="TOML run configuration")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument(
            "--format", action="append", default=None, choices=["csv", "json", "matrix"],
            help="output format (repeatable)",
        )
        p.add_argument("--workers", type=int, default=None, help="parallel grid workers")

    p_scan = sub.add_parser("scan", help="run a scan as configured")
    common(p_scan)
    p_scan.add_argument(
        "--mode", choices=["monte_carlo", "exact", "both"], default=None,
        help="override the scan mode",
    )

    p_exact = sub.add_parser("exact", help="analytic surface only")
    common(p_exact)

    p_cmp = sub.add_parser("compare", help="Monte Carlo vs analytic z-score report")
    common(p_cmp)

    p_fig = sub.add_parser("reproduce-fig2", help="reproduce the three demo panels")
    p_fig.add_argument("--out", default="fig2_out", help="output directory")
    p_fig.add_argument("--seed", type=int, default=None, help="master seed")
    p_fig.add_argument("--workers", type=int, default=None, help="parallel grid workers")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "scan":
            return _cmd_scan(args)
        if args.command == "exact":
            return _cmd_scan(args, forced_mode="exact")
        if args.command == "compare":
            return _cmd_compare(args)
        if args.command == "reproduce-fig2":
            return _cmd_reproduce_fig2(args)
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, TruncationOverflow, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())

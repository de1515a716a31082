"""Surface serialization: CSV records, JSON with metadata, plain-text matrix.

Floats are written with 17 significant digits in the CSV and matrix formats
and with Python's shortest round-trip representation in JSON; both encode
the identical IEEE-754 values, so artifacts can be compared and re-loaded
bit-exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import DomainError
from .estimator import SurfacePoint, WignerSurface

CSV_COLUMNS = (
    "radial_index",
    "phase_index",
    "re_beta",
    "im_beta",
    "pi_hat",
    "sigma",
    "exact_pi",
    "z",
    "even_count",
    "odd_count",
    "valid",
)


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return format(value, ".17g")


def _record(pt: SurfacePoint) -> dict[str, Any]:
    return {
        "radial_index": pt.radial_index,
        "phase_index": pt.phase_index,
        "re_beta": pt.beta.real,
        "im_beta": pt.beta.imag,
        "pi_hat": pt.pi_hat,
        "sigma": pt.sigma,
        "exact_pi": pt.exact_pi,
        "z": pt.z,
        "even_count": pt.even_count,
        "odd_count": pt.odd_count,
        "valid": pt.valid,
    }


def surface_to_csv_text(surface: WignerSurface) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for pt in surface.points:
        rec = _record(pt)
        lines.append(",".join(_fmt(rec[col]) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def surface_to_json_obj(surface: WignerSurface) -> dict[str, Any]:
    return {
        "schema_version": 1,
        "mode": surface.mode,
        "n_intervals": surface.n_intervals,
        "seed": None if surface.seed is None else surface.seed.master_seed,
        "metadata": dict(surface.metadata),
        "grid": {
            "radial_levels": list(surface.grid.radial_levels),
            "phases": list(surface.grid.phases),
        },
        "records": [_record(pt) for pt in surface.points],
    }


def surface_to_matrix_text(surface: WignerSurface) -> str:
    """Radial-by-phase table of pi_hat (exact values when no Monte Carlo data).

    One radial level per line, space-separated, ``nan`` for missing points;
    ready for contour plotting.
    """
    use_mc = surface.mode in ("monte_carlo", "both")
    lines = []
    for i in range(len(surface.grid.radial_levels)):
        row = []
        for j in range(len(surface.grid.phases)):
            pt = surface.point_record(i, j)
            val = pt.pi_hat if use_mc else pt.exact_pi
            row.append("nan" if val is None else format(val, ".17g"))
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"


def write_surface(
    surface: WignerSurface,
    directory: str | Path,
    basename: str = "surface",
    formats: tuple[str, ...] = ("csv", "json"),
) -> dict[str, Path]:
    """Write the surface in the requested formats; returns the paths written."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}
    for fmt in formats:
        if fmt == "csv":
            path = directory / f"{basename}.csv"
            path.write_text(surface_to_csv_text(surface))
        elif fmt == "json":
            path = directory / f"{basename}.json"
            path.write_text(json.dumps(surface_to_json_obj(surface), indent=1) + "\n")
        elif fmt == "matrix":
            path = directory / f"{basename}.matrix.txt"
            path.write_text(surface_to_matrix_text(surface))
        else:
            raise DomainError(f"unknown output format {fmt!r}")
        written[fmt] = path
    return written


def read_surface_json(path: str | Path) -> dict[str, Any]:
    """Load a JSON surface artifact back into plain Python objects."""
    with open(path, "r") as fh:
        return json.load(fh)

"""Monte Carlo simulation of the counting experiment and phase-space scans.

Each counting interval's click number is drawn directly from the exact
per-interval distribution (arrival times are irrelevant once dead time is
neglected), the parity estimator is the alternating sum of empirical
frequencies, and its variance follows (1 - Pi^2)/N.

Reproducibility contract: every grid point owns an RNG substream derived
from (master_seed, radial_index, phase_index), so scan output is
bit-identical regardless of evaluation order or the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from .counts import CountDistribution
from .detection import DetectorModel, ProbePoint, _full_from_lossy, exact_pi
from .errors import DomainError, TruncationOverflow
from .fock import DensityMatrix, loss_channel

MODES = ("monte_carlo", "exact", "both")


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus the substream rule for per-point generators.

    Point (i, j) uses the stream PCG64(SeedSequence(entropy=master_seed,
    spawn_key=(i, j))), a splittable hash of the three integers.
    """

    master_seed: int = 0

    def __post_init__(self) -> None:
        if not (0 <= int(self.master_seed) < 2**64):
            raise DomainError(f"master_seed must be a u64, got {self.master_seed!r}")

    def point_stream(self, radial_index: int, phase_index: int) -> np.random.Generator:
        ss = np.random.SeedSequence(
            entropy=self.master_seed, spawn_key=(radial_index, phase_index)
        )
        return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class ScanGrid:
    """Polar scan grid: radial levels in mean probe photons, phases in radians.

    Points are ordered row-major, radial level first: (0,0), (0,1), ...
    """

    radial_levels: tuple[float, ...]
    phases: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "radial_levels", tuple(float(x) for x in self.radial_levels))
        object.__setattr__(self, "phases", tuple(float(x) for x in self.phases))
        r, p = self.radial_levels, self.phases
        if not r or not p:
            raise DomainError("grid must have at least one radial level and one phase")
        if r[0] < 0.0 or any(not math.isfinite(x) for x in r):
            raise DomainError("radial levels must be finite and >= 0")
        if any(b <= a for a, b in zip(r, r[1:])):
            raise DomainError("radial levels must be strictly increasing")
        if any(not (0.0 <= x < 2.0 * math.pi) for x in p):
            raise DomainError("phases must lie in [0, 2*pi)")
        if any(b <= a for a, b in zip(p, p[1:])):
            raise DomainError("phases must be strictly increasing")

    @classmethod
    def uniform(cls, n_radial: int = 20, n_phases: int = 40, max_n_vac: float = 4.0) -> "ScanGrid":
        """Radial levels uniform in amplitude sqrt(n_vac) from 0 to sqrt(max_n_vac)."""
        if n_radial < 1 or n_phases < 1:
            raise DomainError("grid sizes must be >= 1")
        if max_n_vac <= 0.0:
            raise DomainError("max_n_vac must be > 0")
        amps = np.linspace(0.0, math.sqrt(max_n_vac), n_radial)
        phases = 2.0 * math.pi * np.arange(n_phases) / n_phases
        return cls(tuple(amps**2), tuple(phases))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.radial_levels), len(self.phases))

    @property
    def size(self) -> int:
        return len(self.radial_levels) * len(self.phases)

    def point(self, radial_index: int, phase_index: int) -> ProbePoint:
        return ProbePoint.from_polar(
            self.radial_levels[radial_index], self.phases[phase_index]
        )


@dataclass(frozen=True)
class ParityEstimate:
    """Monte Carlo parity estimate from one sequence of counting intervals."""

    pi_hat: float
    variance: float
    n_intervals: int
    even_count: int
    odd_count: int
    histogram: tuple[int, ...]

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)


def sample_counts(
    p: CountDistribution, n_intervals: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw n_intervals click numbers by inverse CDF; returns the histogram.

    The cumulative table is precomputed once; any draw landing in the
    truncation deficit is assigned to the last bin, keeping the sampling law
    a proper distribution with bias bounded by the deficit.
    """
    if n_intervals < 1:
        raise DomainError(f"n_intervals must be >= 1, got {n_intervals}")
    cdf = np.cumsum(p.probs)
    u = rng.random(n_intervals)
    idx = np.searchsorted(cdf, u, side="right")
    np.clip(idx, 0, len(p) - 1, out=idx)
    return np.bincount(idx, minlength=len(p)).astype(np.int64)


def estimate_parity(hist: np.ndarray) -> ParityEstimate:
    """Alternating-sum parity estimate and its variance (1 - pi_hat^2)/N."""
    hist = np.asarray(hist)
    if hist.ndim != 1 or hist.size == 0 or hist.min() < 0:
        raise DomainError("histogram must be a nonempty vector of counts >= 0")
    n = int(hist.sum())
    if n < 1:
        raise DomainError("histogram must contain at least one interval")
    even = int(hist[0::2].sum())
    odd = int(hist[1::2].sum())
    pi_hat = (even - odd) / n
    return ParityEstimate(
        pi_hat=pi_hat,
        variance=(1.0 - pi_hat**2) / n,
        n_intervals=n,
        even_count=even,
        odd_count=odd,
        histogram=tuple(int(x) for x in hist),
    )


@dataclass(frozen=True)
class SurfacePoint:
    """One scan-grid record; Monte Carlo fields are None in exact mode and
    vice versa.  valid=False marks points lost to truncation overflow."""

    radial_index: int
    phase_index: int
    beta: complex
    pi_hat: Optional[float] = None
    sigma: Optional[float] = None
    exact_pi: Optional[float] = None
    z: Optional[float] = None
    even_count: Optional[int] = None
    odd_count: Optional[int] = None
    valid: bool = True


@dataclass
class WignerSurface:
    """Scan result: per-point records in grid order plus run metadata."""

    grid: ScanGrid
    mode: str
    n_intervals: Optional[int]
    seed: Optional[SeedSpec]
    points: list[SurfacePoint]
    metadata: dict = field(default_factory=dict)

    def point_record(self, radial_index: int, phase_index: int) -> SurfacePoint:
        return self.points[radial_index * len(self.grid.phases) + phase_index]

    def value_grid(self, attr: str = "pi_hat") -> np.ndarray:
        """Dense (radial x phase) array of one record field; NaN where absent."""
        out = np.full(self.grid.shape, np.nan)
        for pt in self.points:
            val = getattr(pt, attr)
            if val is not None:
                out[pt.radial_index, pt.phase_index] = val
        return out


def _z_score(pi_hat: float, exact: float, n_intervals: int) -> float:
    var_hat = (1.0 - pi_hat**2) / n_intervals
    if var_hat > 0.0:
        return (pi_hat - exact) / math.sqrt(var_hat)
    var_pred = (1.0 - exact**2) / n_intervals
    if var_pred > 0.0:
        return (pi_hat - exact) / math.sqrt(var_pred)
    diff = pi_hat - exact
    return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)


def scan(
    rho: DensityMatrix,
    model: DetectorModel,
    grid: ScanGrid,
    n_intervals: int = 8000,
    seed: SeedSpec = SeedSpec(0),
    mode: str = "both",
    workers: int = 1,
) -> WignerSurface:
    """Evaluate the parity surface over the grid.

    mode "exact" stores the analytic Pi per point, "monte_carlo" simulates
    N counting intervals per point, "both" stores both plus the z-score
    (pi_hat - Pi)/sigma.  Points whose displaced state overflows the cutoff
    are emitted with valid=False instead of aborting the scan.  With
    workers > 1 the points are evaluated concurrently; the output is
    bit-identical to the serial result.
    """
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    want_mc = mode in ("monte_carlo", "both")
    want_exact = mode in ("exact", "both")
    if want_mc and n_intervals < 1:
        raise DomainError(f"n_intervals must be >= 1, got {n_intervals}")

    lossy = loss_channel(rho, model.eta_t) if want_mc else None
    n_phases = len(grid.phases)

    def eval_point(flat_index: int) -> tuple[SurfacePoint, float]:
        i, j = divmod(flat_index, n_phases)
        point = grid.point(i, j)
        deficit = 0.0
        try:
            exact = exact_pi(rho, model, point) if want_exact else None
            est = None
            if want_mc:
                dist = _full_from_lossy(lossy, model, point)
                deficit = dist.deficit
                hist = sample_counts(dist, n_intervals, seed.point_stream(i, j))
                est = estimate_parity(hist)
        except TruncationOverflow:
            return SurfacePoint(i, j, point.beta, valid=False), 0.0
        z = None
        if est is not None and exact is not None:
            z = _z_score(est.pi_hat, exact, n_intervals)
        return (
            SurfacePoint(
                radial_index=i,
                phase_index=j,
                beta=point.beta,
                pi_hat=None if est is None else est.pi_hat,
                sigma=None if est is None else est.sigma,
                exact_pi=exact,
                z=z,
                even_count=None if est is None else est.even_count,
                odd_count=None if est is None else est.odd_count,
            ),
            deficit,
        )

    indices = range(grid.size)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(eval_point, indices))
    else:
        results = [eval_point(k) for k in indices]

    points = [r[0] for r in results]
    from . import __version__

    metadata = {
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "max_count_deficit": max((r[1] for r in results), default=0.0),
        "invalid_points": sum(1 for p in points if not p.valid),
        "workers": workers,
    }
    return WignerSurface(
        grid=grid,
        mode=mode,
        n_intervals=n_intervals if want_mc else None,
        seed=seed if want_mc else None,
        points=points,
        metadata=metadata,
    )

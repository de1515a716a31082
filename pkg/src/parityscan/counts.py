"""Photocount statistics: count distributions, Poisson laws, convolution, parity.

A count distribution is the probability vector p_n of detecting n photons in
one counting interval.  Distributions are never renormalized: probability lost
to truncation stays lost and is reported as ``deficit``, because silently
rescaling would bias the alternating-sum parity.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

_NEGATIVE_TOL = 1e-12
_OVERSHOOT_TOL = 1e-12


class CountDistribution:
    """Probability vector over photocount outcomes n = 0 .. n_max."""

    __slots__ = ("_probs",)

    def __init__(self, probs) -> None:
        arr = np.asarray(probs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("count distribution must be a nonempty 1-d vector")
        if not np.all(np.isfinite(arr)):
            raise DomainError("count distribution contains non-finite entries")
        if arr.min() < -_NEGATIVE_TOL:
            raise DomainError(
                f"count distribution has negative entry {arr.min():.3e}"
            )
        arr = np.where(arr < 0.0, 0.0, arr)
        total = float(arr.sum())
        if total > 1.0 + _OVERSHOOT_TOL:
            raise DomainError(f"count distribution sums to {total!r} > 1")
        arr.flags.writeable = False
        self._probs = arr

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def n_max(self) -> int:
        return self._probs.size - 1

    @property
    def total(self) -> float:
        return float(self._probs.sum())

    @property
    def deficit(self) -> float:
        """Probability mass lost to truncation (clipped at zero)."""
        return max(0.0, 1.0 - self.total)

    def mean(self) -> float:
        return float(np.arange(self._probs.size) @ self._probs)

    def __len__(self) -> int:
        return self._probs.size

    def __repr__(self) -> str:
        return (
            f"CountDistribution(n_max={self.n_max}, mean={self.mean():.6g}, "
            f"deficit={self.deficit:.3g})"
        )


def poisson_distribution(mean: float, n_max: int, tail_tol: float = 1e-9) -> CountDistribution:
    """Poisson photocount law truncated at n_max.

    Raises DomainError if the truncated tail mass exceeds ``tail_tol``.
    """
    if not (mean >= 0.0 and math.isfinite(mean)):
        raise DomainError(f"Poisson mean must be finite and >= 0, got {mean!r}")
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    p = np.zeros(n_max + 1)
    p[0] = math.exp(-mean)
    for n in range(1, n_max + 1):
        p[n] = p[n - 1] * mean / n
    tail = 1.0 - p.sum()
    if tail > tail_tol:
        raise DomainError(
            f"Poisson(mean={mean:.6g}) leaves tail mass {tail:.3e} above "
            f"n_max={n_max} (tolerance {tail_tol:.3g})"
        )
    return CountDistribution(p)


def convolve(a: CountDistribution, b: CountDistribution) -> CountDistribution:
    """Distribution of the sum of two independent count variables.

    The output is truncated to the longer of the two input lengths; the
    truncated mass adds to the tracked deficit instead of being renormalized.
    """
    length = max(len(a), len(b))
    full = np.convolve(a.probs, b.probs)
    return CountDistribution(full[:length])


def parity_of_distribution(p: CountDistribution) -> float:
    """Alternating sum sum_n (-1)^n p_n of the photocount distribution."""
    probs = p.probs
    return float(probs[0::2].sum() - probs[1::2].sum())

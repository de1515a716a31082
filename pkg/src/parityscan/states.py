"""Signal-state constructors: vacuum, coherent, Fock, and phase-diffused mixtures."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, TruncationOverflow
from .fock import DEFAULT_POLICY, DensityMatrix, TruncationPolicy, coherent_amplitudes

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class PhaseDiffusionSpec:
    """Harmonic phase modulation, frozen per counting interval.

    The optical phase follows theta(t) = center_phase + modulation_amplitude
    * sin(w t).  Counting intervals are far shorter than the modulation
    period, so each interval sees a static phase; averaging uniformly over
    the modulation cycle induces the arcsine phase density with its weight
    piled up at the turning points center_phase +/- modulation_amplitude.
    """

    center_phase: float = 0.0
    modulation_amplitude: float = 0.8
    nodes: int = 64

    def __post_init__(self) -> None:
        if not math.isfinite(self.center_phase):
            raise DomainError("center_phase must be finite")
        if not (0.0 < self.modulation_amplitude <= math.pi):
            raise DomainError(
                f"modulation_amplitude must be in (0, pi], got {self.modulation_amplitude!r}"
            )
        if self.nodes < 3:
            raise DomainError(f"nodes must be >= 3, got {self.nodes}")

    def phases(self) -> np.ndarray:
        """Midpoint-rule phase nodes theta_j = theta0 + A sin(2 pi (j+1/2)/M).

        Uniform sampling of the time variable avoids the integrable endpoint
        singularities of the arcsine density and converges spectrally in M.
        """
        u = 2.0 * math.pi * (np.arange(self.nodes) + 0.5) / self.nodes
        return self.center_phase + self.modulation_amplitude * np.sin(u)


def vacuum(policy: TruncationPolicy = DEFAULT_POLICY) -> DensityMatrix:
    """The vacuum state |0><0|."""
    mat = np.zeros((policy.dim, policy.dim), dtype=complex)
    mat[0, 0] = 1.0
    return DensityMatrix(mat, tail_tol=policy.tail_tol)


def _check_coherent_headroom(alpha_mag_sq: float, policy: TruncationPolicy) -> None:
    if alpha_mag_sq > policy.cutoff / 4.0:
        raise TruncationOverflow(
            f"|alpha|^2 = {alpha_mag_sq:.4g} exceeds the headroom bound "
            f"cutoff/4 = {policy.cutoff / 4.0:.4g}"
        )


def coherent(alpha0: complex, policy: TruncationPolicy = DEFAULT_POLICY) -> DensityMatrix:
    """The coherent state |alpha0><alpha0|.

    Requires |alpha0|^2 <= cutoff/4 so that the Poisson photon distribution
    keeps many-sigma headroom below the cutoff.
    """
    alpha0 = complex(alpha0)
    if not (math.isfinite(alpha0.real) and math.isfinite(alpha0.imag)):
        raise DomainError(f"coherent amplitude must be finite, got {alpha0!r}")
    _check_coherent_headroom(abs(alpha0) ** 2, policy)
    c = coherent_amplitudes(alpha0, policy.dim)
    return DensityMatrix(np.outer(c, c.conj()), tail_tol=policy.tail_tol)


def fock(n: int, policy: TruncationPolicy = DEFAULT_POLICY) -> DensityMatrix:
    """The number state |n><n|."""
    if not (0 <= n <= policy.cutoff):
        raise DomainError(f"Fock index n={n} outside 0..{policy.cutoff}")
    mat = np.zeros((policy.dim, policy.dim), dtype=complex)
    mat[n, n] = 1.0
    return DensityMatrix(mat, tail_tol=policy.tail_tol)


def phase_diffused_coherent(
    alpha0_mag: float,
    spec: PhaseDiffusionSpec = PhaseDiffusionSpec(),
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> DensityMatrix:
    """Equal-weight mixture of coherent states over the modulated phase."""
    if not (alpha0_mag >= 0.0 and math.isfinite(alpha0_mag)):
        raise DomainError(f"alpha0_mag must be finite and >= 0, got {alpha0_mag!r}")
    _check_coherent_headroom(alpha0_mag**2, policy)
    mat = np.zeros((policy.dim, policy.dim), dtype=complex)
    for theta in spec.phases():
        c = coherent_amplitudes(alpha0_mag * np.exp(1j * theta), policy.dim)
        mat += np.outer(c, c.conj())
    mat /= spec.nodes
    return DensityMatrix(mat, tail_tol=policy.tail_tol)


def mixture(components: Sequence[tuple[float, DensityMatrix]]) -> DensityMatrix:
    """Convex combination sum_j w_j rho_j of density matrices."""
    if not components:
        raise DomainError("mixture requires at least one component")
    weights = [w for w, _ in components]
    if min(weights) < 0.0:
        raise DomainError(f"mixture weight {min(weights)!r} is negative")
    if abs(sum(weights) - 1.0) > WEIGHT_SUM_TOL:
        raise DomainError(f"mixture weights sum to {sum(weights)!r}, expected 1")
    dim = components[0][1].dim
    if any(rho.dim != dim for _, rho in components):
        raise DomainError("mixture components must share one dimension")
    mat = np.zeros((dim, dim), dtype=complex)
    for w, rho in components:
        mat += w * rho.matrix
    return DensityMatrix(mat, tail_tol=components[0][1].tail_tol)

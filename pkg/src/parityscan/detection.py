"""The measurement chain: probe displacement, losses, mode mismatch, dark counts.

The probe coordinate beta is always detected-referred, i.e. calibrated by the
mean count number with the signal blocked.  Imperfections enter as

* a combined power transmission eta*T (beam splitter plus quantum
  efficiency), physically indistinguishable in the count statistics;
* a mode overlap xi = v/(2-v) derived from the interference visibility v:
  the matched probe component displaces the signal by sqrt(xi)*beta, the
  orthogonal remainder contributes independent Poisson counts of mean
  (1-xi)|beta|^2;
* an optional independent Poisson dark-count background.

The full per-interval count distribution is the convolution of the three
parts, and its alternating-sum parity factorizes into the product of the
parts' parities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .counts import (
    CountDistribution,
    convolve,
    parity_of_distribution,
    poisson_distribution,
)
from .errors import DomainError
from .fock import DensityMatrix, apply_displacement, diagonal, loss_channel
from .quasiprob import OrderingParameter, quasidist

__all__ = [
    "DetectorModel",
    "IDEAL_DETECTOR",
    "ProbePoint",
    "matched_count_distribution",
    "full_count_distribution",
    "poisson_distribution",
    "convolve",
    "parity_of_distribution",
    "exact_pi",
    "coherent_closed_form",
]


@dataclass(frozen=True)
class DetectorModel:
    """Detection-chain parameters.

    Defaults are the conservative bound values of the targeted experiment:
    quantum efficiency 70%, beam-splitter transmission 98.6%, interference
    visibility 98.5%, no dark counts.
    """

    eta: float = 0.70
    transmission: float = 0.986
    visibility: float = 0.985
    dark_mean: float = 0.0

    def __post_init__(self) -> None:
        for name in ("eta", "transmission", "visibility"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and 0.0 < val <= 1.0):
                raise DomainError(f"{name} must be in (0, 1], got {val!r}")
        if not (self.dark_mean >= 0.0 and math.isfinite(self.dark_mean)):
            raise DomainError(f"dark_mean must be finite and >= 0, got {self.dark_mean!r}")

    @property
    def eta_t(self) -> float:
        """Combined power transmission of the whole chain."""
        return self.eta * self.transmission

    @property
    def xi(self) -> float:
        """Squared mode overlap between signal and probe, xi = v/(2-v)."""
        return self.visibility / (2.0 - self.visibility)

    @property
    def ordering_s(self) -> float:
        """Ordering parameter -(1 - eta T)/(eta T) the losses map parity onto."""
        return -(1.0 - self.eta_t) / self.eta_t


IDEAL_DETECTOR = DetectorModel(eta=1.0, transmission=1.0, visibility=1.0, dark_mean=0.0)


@dataclass(frozen=True)
class ProbePoint:
    """Detected-referred phase-space coordinate beta = e^{i phi} sqrt(n_vac)."""

    beta: complex

    def __post_init__(self) -> None:
        b = complex(self.beta)
        if not (math.isfinite(b.real) and math.isfinite(b.imag)):
            raise DomainError(f"probe amplitude must be finite, got {self.beta!r}")
        object.__setattr__(self, "beta", b)

    @classmethod
    def from_polar(cls, n_vac: float, phase: float) -> "ProbePoint":
        if n_vac < 0.0:
            raise DomainError(f"n_vac must be >= 0, got {n_vac!r}")
        return cls(math.sqrt(n_vac) * complex(math.cos(phase), math.sin(phase)))

    @property
    def radius(self) -> float:
        return abs(self.beta)

    @property
    def phase(self) -> float:
        return math.atan2(self.beta.imag, self.beta.real) % (2.0 * math.pi)

    @property
    def n_vac(self) -> float:
        return abs(self.beta) ** 2


def matched_count_distribution(
    rho: DensityMatrix, model: DetectorModel, point: ProbePoint
) -> CountDistribution:
    """Count statistics of the mode-matched branch of the probe.

    Applies the loss channel eta*T first and then the displacement by the
    matched probe amplitude; by the loss/displacement covariance this equals
    displacing the input by sqrt(xi/(eta T)) beta and then losing eta*T, but
    keeps the displaced support lower.  The displacement enters with the sign
    that makes the parity probe the quasidistribution *at* beta, i.e. the
    state is conjugated by D^dag(sqrt(xi) beta).
    """
    lossy = loss_channel(rho, model.eta_t)
    return _matched_from_lossy(lossy, model, point)


def _matched_from_lossy(
    lossy: DensityMatrix, model: DetectorModel, point: ProbePoint
) -> CountDistribution:
    displaced = apply_displacement(lossy, -math.sqrt(model.xi) * point.beta)
    return diagonal(displaced)


def full_count_distribution(
    rho: DensityMatrix, model: DetectorModel, point: ProbePoint
) -> CountDistribution:
    """Complete per-interval click-number distribution p_n(beta)."""
    lossy = loss_channel(rho, model.eta_t)
    return _full_from_lossy(lossy, model, point)


def _full_from_lossy(
    lossy: DensityMatrix, model: DetectorModel, point: ProbePoint
) -> CountDistribution:
    dist = _matched_from_lossy(lossy, model, point)
    mismatch_mean = (1.0 - model.xi) * point.n_vac
    if mismatch_mean > 0.0:
        dist = convolve(
            dist, poisson_distribution(mismatch_mean, lossy.cutoff, lossy.tail_tol)
        )
    if model.dark_mean > 0.0:
        dist = convolve(
            dist, poisson_distribution(model.dark_mean, lossy.cutoff, lossy.tail_tol)
        )
    return dist


def exact_pi(rho: DensityMatrix, model: DetectorModel, point: ProbePoint) -> float:
    """Exact parity Pi(beta) of the full detection chain.

    Evaluated by the factorized route: the mismatch and dark-count branches
    contribute exp(-2 (1-xi)|beta|^2) and exp(-2 lambda_d), and the matched
    branch equals (pi / (2 eta T)) times the s-ordered quasidistribution of
    the *input* state at the loss-rescaled point sqrt(xi/(eta T)) beta with
    s = -(1 - eta T)/(eta T).  This route shares no code with the Kraus-based
    count-statistics pipeline, which must agree with it to ~1e-8.
    """
    eta_t = model.eta_t
    shifted = math.sqrt(model.xi / eta_t) * point.beta
    w = quasidist(rho, shifted, OrderingParameter(model.ordering_s))
    factor = math.exp(-2.0 * (1.0 - model.xi) * point.n_vac - 2.0 * model.dark_mean)
    return factor * math.pi / (2.0 * eta_t) * w


def coherent_closed_form(
    alpha0: complex, model: DetectorModel, point: ProbePoint
) -> float:
    """Gaussian closed form of Pi(beta) for a coherent input |alpha0>.

    A Gaussian of unchanged unit width centered at the attenuated amplitude
    sqrt(xi eta T) alpha0, scaled by exp(-2 (1-xi) eta T |alpha0|^2) and the
    dark-count factor exp(-2 lambda_d).
    """
    alpha0 = complex(alpha0)
    center = math.sqrt(model.xi * model.eta_t) * alpha0
    return math.exp(
        -2.0 * abs(point.beta - center) ** 2
        - 2.0 * (1.0 - model.xi) * model.eta_t * abs(alpha0) ** 2
        - 2.0 * model.dark_mean
    )

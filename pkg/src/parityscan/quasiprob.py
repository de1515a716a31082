"""s-ordered quasidistribution evaluation and the displaced-parity expectation.

These series evaluations serve as the analytic ground truth against which the
count-statistics pipeline in :mod:`parityscan.detection` is checked: losses
and mode mismatch map a parity measurement onto a quasidistribution with a
negative ordering parameter, so both routes must agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TruncationOverflow
from .fock import DensityMatrix, displacement_matrix


@dataclass(frozen=True)
class OrderingParameter:
    """Quasidistribution ordering: s=0 is Wigner, s=-1 is Husimi Q.

    s must be strictly below 1; the s=1 (P function) limit is singular for
    the series used here.
    """

    s: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.s):
            raise DomainError("ordering parameter must be finite")
        if self.s >= 1.0:
            raise DomainError(f"ordering parameter must be < 1, got {self.s!r}")


WIGNER = OrderingParameter(0.0)
HUSIMI_Q = OrderingParameter(-1.0)


def displaced_number_diagonal(rho: DensityMatrix, alpha: complex) -> np.ndarray:
    """Populations <n| D^dag(alpha) rho D(alpha) |n> for n = 0..cutoff."""
    D = displacement_matrix(alpha, rho.dim)
    return np.einsum("mn,mn->n", D.conj(), rho.matrix @ D).real


def _check_series_tail(rho: DensityMatrix, diag: np.ndarray, abs_q: float) -> None:
    # Populations pushed past the cutoff enter the series with weight at most
    # |q|^dim; reject the evaluation if that bound exceeds the tail tolerance.
    deficit = max(0.0, rho.trace - float(diag.sum()))
    bound = min(abs_q, 1.0) ** rho.dim * deficit if abs_q <= 1.0 else deficit
    if bound > rho.tail_tol:
        raise TruncationOverflow(
            f"displaced populations lose mass {deficit:.3e} past cutoff "
            f"{rho.cutoff}; series error bound {bound:.3e} exceeds tail_tol "
            f"{rho.tail_tol:.3g}"
        )


def parity_operator_expectation(rho: DensityMatrix, alpha: complex) -> float:
    """Expectation of the displaced photon-number parity at phase-space point alpha.

    Computed literally as sum_n (-1)^n <n|D^dag(alpha) rho D(alpha)|n>; the
    parity operator is never materialized as a matrix.  Multiply by 2/pi to
    obtain the Wigner function value.
    """
    diag = displaced_number_diagonal(rho, alpha)
    _check_series_tail(rho, diag, 1.0)
    return float(diag[0::2].sum() - diag[1::2].sum())


def quasidist(rho: DensityMatrix, alpha: complex, ordering: OrderingParameter) -> float:
    """s-ordered quasidistribution W(alpha; s).

    Evaluated as (2 / (pi (1-s))) sum_n ((s+1)/(s-1))^n times the displaced
    number populations.  The geometric weights damp the series for s < 0, so
    summing over the full truncated dimension is both exact to rounding and
    cheap; at s=0 the weights reduce term by term to the parity signs.
    """
    s = ordering.s
    diag = displaced_number_diagonal(rho, alpha)
    q = (s + 1.0) / (s - 1.0)
    _check_series_tail(rho, diag, abs(q))
    weights = q ** np.arange(rho.dim)
    return float(2.0 / (math.pi * (1.0 - s)) * (weights @ diag))


def gaussian_quasidist_oracle(
    alpha0: complex, alpha: complex, ordering: OrderingParameter
) -> float:
    """Closed form of W(alpha; s) for the coherent state |alpha0>.

    W(alpha; s) = 2/(pi (1-s)) * exp(-2 |alpha - alpha0|^2 / (1-s)).
    """
    s = ordering.s
    one_minus = 1.0 - s
    d2 = abs(complex(alpha) - complex(alpha0)) ** 2
    return 2.0 / (math.pi * one_minus) * math.exp(-2.0 * d2 / one_minus)

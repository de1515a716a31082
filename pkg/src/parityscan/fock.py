"""Truncated Fock-space linear algebra.

Dense complex matrices on the number basis |0> .. |cutoff>, the displacement
operator D(alpha) = exp(alpha a^dag - conj(alpha) a), and the photon-loss
channel.  Everything here is a pure function of its inputs; DensityMatrix
instances are immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .counts import CountDistribution
from .errors import DomainError, TruncationOverflow

HERMITICITY_TOL = 1e-12
NEGATIVE_DIAG_TOL = 1e-12
DIAG_CLAMP = 1e-14
TRACE_OVERSHOOT_TOL = 1e-12


@dataclass(frozen=True)
class TruncationPolicy:
    """Fock cutoff and the admissible probability mass above it.

    The default cutoff of 48 leaves ample headroom for the weak fields this
    package targets (coherent amplitudes up to |alpha|^2 ~ cutoff/4 plus
    probe displacements of a couple of photons).
    """

    cutoff: int = 48
    tail_tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.cutoff < 1:
            raise DomainError(f"cutoff must be >= 1, got {self.cutoff}")
        if not (0.0 < self.tail_tol < 1.0):
            raise DomainError(f"tail_tol must be in (0, 1), got {self.tail_tol}")

    @property
    def dim(self) -> int:
        return self.cutoff + 1


DEFAULT_POLICY = TruncationPolicy()


class DensityMatrix:
    """Hermitian, positive-diagonal operator with trace 1 up to truncation loss.

    Construction re-hermitizes the matrix, (m + m^dag)/2, to suppress
    floating-point drift, and rejects matrices whose Hermiticity defect,
    negative diagonal, or trace deficit exceed the declared tolerances.
    """

    __slots__ = ("_mat", "_tail_tol")

    def __init__(self, matrix, tail_tol: float = DEFAULT_POLICY.tail_tol) -> None:
        mat = np.array(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
            raise DomainError(f"density matrix must be square, got shape {mat.shape}")
        if not np.all(np.isfinite(mat.view(float))):
            raise DomainError("density matrix contains non-finite entries")
        defect = np.abs(mat - mat.conj().T).max()
        if defect > HERMITICITY_TOL:
            raise DomainError(f"Hermiticity defect {defect:.3e} exceeds {HERMITICITY_TOL:.0e}")
        mat = 0.5 * (mat + mat.conj().T)
        diag = mat.diagonal().real
        if diag.min() < -NEGATIVE_DIAG_TOL:
            raise DomainError(
                f"diagonal entry {diag.min():.3e} below -{NEGATIVE_DIAG_TOL:.0e}"
            )
        tr = float(diag.sum())
        if tr > 1.0 + TRACE_OVERSHOOT_TOL:
            raise DomainError(f"trace {tr!r} exceeds 1")
        if tr < 1.0 - tail_tol:
            raise TruncationOverflow(
                f"trace deficit {1.0 - tr:.3e} exceeds tail_tol {tail_tol:.3g}"
            )
        mat.flags.writeable = False
        self._mat = mat
        self._tail_tol = float(tail_tol)

    @property
    def matrix(self) -> np.ndarray:
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    @property
    def cutoff(self) -> int:
        return self.dim - 1

    @property
    def tail_tol(self) -> float:
        return self._tail_tol

    @property
    def trace(self) -> float:
        return float(self._mat.diagonal().real.sum())

    def mean_photon_number(self) -> float:
        return float(np.arange(self.dim) @ self._mat.diagonal().real)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim}, trace={self.trace:.12g})"


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Number-basis amplitudes <n|alpha> = e^{-|a|^2/2} a^n / sqrt(n!)."""
    if dim < 1:
        raise DomainError("dim must be >= 1")
    c = np.zeros(dim, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, dim):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c


def displacement_matrix(alpha: complex, dim: int) -> np.ndarray:
    """Matrix elements <m|D(alpha)|n> on the truncated number basis.

    Built column by column: column 0 holds the coherent-state amplitudes and

        D[m, n+1] = (sqrt(m) D[m-1, n] - conj(alpha) D[m, n]) / sqrt(n+1),

    which follows from D a^dag = (a^dag - conj(alpha)) D.  The recurrence only
    ever reads entries with a smaller or equal row index, so every stored
    element equals its untruncated value up to rounding.
    """
    if dim < 1:
        raise DomainError("dim must be >= 1")
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise DomainError(f"displacement amplitude must be finite, got {alpha!r}")
    D = np.zeros((dim, dim), dtype=complex)
    D[:, 0] = coherent_amplitudes(alpha, dim)
    if dim == 1:
        return D
    sqrt_row = np.sqrt(np.arange(dim))
    ac = alpha.conjugate()
    for n in range(dim - 1):
        col = D[:, n]
        nxt = np.empty(dim, dtype=complex)
        nxt[0] = -ac * col[0]
        nxt[1:] = sqrt_row[1:] * col[:-1] - ac * col[1:]
        D[:, n + 1] = nxt / math.sqrt(n + 1)
    return D


def apply_displacement(rho: DensityMatrix, alpha: complex) -> DensityMatrix:
    """Conjugate the state by the displacement operator: D(alpha) rho D(alpha)^dag.

    Raises TruncationOverflow if the displaced state loses more trace past the
    cutoff than the state's tail tolerance allows.
    """
    D = displacement_matrix(alpha, rho.dim)
    out = D @ rho.matrix @ D.conj().T
    deficit = rho.trace - float(out.diagonal().real.sum())
    if deficit > rho.tail_tol:
        raise TruncationOverflow(
            f"displacement by {alpha!r} pushes trace mass {deficit:.3e} past "
            f"cutoff {rho.cutoff} (tail_tol {rho.tail_tol:.3g})"
        )
    return DensityMatrix(out, tail_tol=rho.tail_tol)


def loss_channel(rho: DensityMatrix, transmissivity: float) -> DensityMatrix:
    """Pure photon loss of power transmissivity eta.

    Kraus operators A_k subtract k photons with binomial amplitudes
    sqrt(C(n,k) eta^{n-k} (1-eta)^k); they resolve the identity exactly on the
    truncated space, so the channel preserves trace to rounding.
    """
    eta = float(transmissivity)
    if not (0.0 <= eta <= 1.0):
        raise DomainError(f"transmissivity must be in [0, 1], got {eta!r}")
    if eta == 1.0:
        return rho
    dim = rho.dim
    mat = rho.matrix
    out = np.zeros((dim, dim), dtype=complex)
    one_minus = 1.0 - eta
    for k in range(dim):
        # c(n)^2 = C(n,k) (1-eta)^k eta^(n-k), built by the ratio recurrence
        # c(n)^2 / c(n-1)^2 = eta * n / (n - k).
        c2 = np.empty(dim - k)
        c2[0] = one_minus**k
        if dim - k > 1:
            n_arr = np.arange(k + 1, dim, dtype=float)
            c2[1:] = c2[0] * np.cumprod(eta * n_arr / (n_arr - k))
        c = np.zeros(dim)
        c[k:] = np.sqrt(c2)
        weighted = mat * np.outer(c, c)
        out[: dim - k, : dim - k] += weighted[k:, k:]
    return DensityMatrix(out, tail_tol=rho.tail_tol)


def diagonal(rho: DensityMatrix) -> CountDistribution:
    """Number-basis populations <n|rho|n> as a count distribution.

    Entries of magnitude below 1e-14 are clamped to zero to scrub rounding
    noise; genuinely negative populations were already rejected upstream.
    """
    d = rho.matrix.diagonal().real.copy()
    d[np.abs(d) < DIAG_CLAMP] = 0.0
    d[d < 0.0] = 0.0
    return CountDistribution(d)


def purity(rho: DensityMatrix) -> float:
    """Tr rho^2."""
    return float(np.vdot(rho.matrix, rho.matrix).real)


def fidelity(a: DensityMatrix, b: DensityMatrix) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2.

    When either state is pure this reduces to the trace overlap Tr(a b),
    which is evaluated directly; the general branch goes through an
    eigendecomposition and is accurate only to ~1e-7 for rank-deficient
    states (square roots amplify eigenvalue noise).
    """
    if a.dim != b.dim:
        raise DomainError("fidelity requires equal dimensions")
    if purity(a) >= 1.0 - 1e-12 or purity(b) >= 1.0 - 1e-12:
        return float(np.vdot(a.matrix, b.matrix).real)
    evals, vecs = np.linalg.eigh(a.matrix)
    evals = np.clip(evals, 0.0, None)
    sqrt_a = (vecs * np.sqrt(evals)) @ vecs.conj().T
    inner = sqrt_a @ b.matrix @ sqrt_a
    ev = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    ev = np.where(ev < a.dim * np.finfo(float).eps * max(1.0, ev.max()), 0.0, ev)
    return float(np.sqrt(np.clip(ev, 0.0, None)).sum() ** 2)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Trace distance 0.5 * ||a - b||_1."""
    if a.dim != b.dim:
        raise DomainError("trace distance requires equal dimensions")
    ev = np.linalg.eigvalsh(a.matrix - b.matrix)
    return float(0.5 * np.abs(ev).sum())

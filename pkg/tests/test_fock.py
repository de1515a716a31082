import math

import numpy as np
import pytest
from scipy.linalg import expm

from parityscan import (
    DensityMatrix,
    DomainError,
    TruncationOverflow,
    TruncationPolicy,
    apply_displacement,
    coherent,
    coherent_amplitudes,
    diagonal,
    displacement_matrix,
    fidelity,
    fock,
    loss_channel,
    vacuum,
)

POLICY48 = TruncationPolicy(cutoff=48)


def displacement_expm(alpha, dim):
    """Independent oracle: matrix exponential of alpha a^dag - conj(alpha) a."""
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def random_low_energy_state(rng, dim, tail_tol=1e-9):
    """Random mixture of a few coherent states with |alpha| <= 1.5."""
    mat = np.zeros((dim, dim), dtype=complex)
    weights = rng.dirichlet(np.ones(4))
    for w in weights:
        alpha = 1.5 * math.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        c = coherent_amplitudes(alpha, dim)
        mat += w * np.outer(c, c.conj())
    return DensityMatrix(mat, tail_tol=tail_tol)


class TestPolicy:
    def test_defaults(self):
        p = TruncationPolicy()
        assert p.cutoff == 48 and p.tail_tol == 1e-9 and p.dim == 49

    @pytest.mark.parametrize("kwargs", [dict(cutoff=0), dict(tail_tol=0.0), dict(tail_tol=1.0)])
    def test_validation(self, kwargs):
        with pytest.raises(DomainError):
            TruncationPolicy(**kwargs)


class TestDensityMatrix:
    def test_rejects_non_hermitian(self):
        with pytest.raises(DomainError):
            DensityMatrix([[1.0, 0.1], [0.0, 0.0]])

    def test_rejects_negative_diagonal(self):
        with pytest.raises(DomainError):
            DensityMatrix([[1.001, 0.0], [0.0, -1e-3]])

    def test_rejects_trace_deficit(self):
        with pytest.raises(TruncationOverflow):
            DensityMatrix([[0.5, 0.0], [0.0, 0.4]], tail_tol=1e-9)

    def test_hermitizes_rounding_noise(self):
        m = np.array([[0.5, 0.1 + 1e-14j], [0.1, 0.5]], dtype=complex)
        rho = DensityMatrix(m)
        assert np.array_equal(rho.matrix, rho.matrix.conj().T)

    def test_immutable(self):
        rho = vacuum(POLICY48)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 0.0


class TestDisplacementMatrix:
    def test_zero_displacement_is_identity(self):
        np.testing.assert_array_equal(displacement_matrix(0.0, 4), np.eye(4))

    def test_vacuum_amplitude_matches_series(self):
        # oracle: exp(-|alpha|^2/2) summed as a 40-term power series
        series = sum((-0.5) ** k / math.factorial(k) for k in range(40))
        assert series == pytest.approx(0.6065306597126334, abs=1e-15)
        D = displacement_matrix(1.0, 48)
        assert D[0, 0].real == pytest.approx(0.6065306597126334, abs=1e-12)
        assert D[0, 0].imag == 0.0

    @pytest.mark.parametrize("alpha", [1.0, 0.7 - 1.3j, 2.0 + 0.5j])
    def test_matches_matrix_exponential(self, alpha):
        D = displacement_matrix(alpha, 40)
        oracle = displacement_expm(alpha, 70)[:40, :40]
        np.testing.assert_allclose(D[:20, :20], oracle[:20, :20], atol=1e-11)

    def test_one_one_element_vanishes_at_unit_amplitude(self):
        # <1|D(alpha)|1> = (1 - |alpha|^2) e^{-|alpha|^2/2} = 0 at |alpha|^2 = 1
        oracle = displacement_expm(1.0, 40)
        assert abs(oracle[1, 1]) < 1e-12
        assert abs(displacement_matrix(1.0, 48)[1, 1]) < 1e-12

    def test_unitarity_leak_bounded_on_safe_block(self):
        # The low-index block whose columns keep a 6-sigma photon-number
        # margin below the cutoff is unitary to 1e-8.
        for dim in (48, 64):
            for amp in (1.0, 2.0, 3.0):
                K = 0
                while K + amp**2 + 6.0 * amp * math.sqrt(2 * K + 1) + 6.0 <= dim:
                    K += 1
                assert K >= 2
                D = displacement_matrix(amp, dim)
                G = D.conj().T @ D - np.eye(dim)
                assert np.abs(G[:K, :K]).max() <= 1e-8


class TestApplyDisplacement:
    def test_vacuum_to_coherent(self):
        displaced = apply_displacement(vacuum(POLICY48), 1.2 - 0.3j)
        target = coherent(1.2 - 0.3j, POLICY48)
        assert np.abs(displaced.matrix - target.matrix).max() <= 1e-12

    def test_zero_is_identity(self):
        rho = fock(2, POLICY48)
        out = apply_displacement(rho, 0.0)
        np.testing.assert_allclose(out.matrix, rho.matrix, atol=1e-15)

    def test_displaced_fock_matches_displacement_column(self):
        # populations of D(1)|1> are the squared column-1 amplitudes
        policy = TruncationPolicy(cutoff=40)
        displaced = apply_displacement(fock(1, policy), 1.0)
        column = displacement_matrix(1.0, policy.dim)[:, 1]
        np.testing.assert_allclose(
            displaced.matrix.diagonal().real, np.abs(column) ** 2, atol=1e-12
        )

    def test_roundtrip_inverse(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            rho = random_low_energy_state(rng, POLICY48.dim)
            a = 2.0 * math.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            back = apply_displacement(apply_displacement(rho, a), -a)
            assert np.abs(back.matrix - rho.matrix).max() <= 1e-9

    def test_overflow_raises(self):
        small = TruncationPolicy(cutoff=8)
        with pytest.raises(TruncationOverflow):
            apply_displacement(vacuum(small), 4.0)


class TestLossChannel:
    def test_single_photon_half_loss(self):
        # brute force over the two Kraus operators of a 2-level problem:
        # A0 = diag(1, sqrt(eta)), A1 = sqrt(1-eta)|0><1|
        rho = loss_channel(fock(1, POLICY48), 0.5)
        d = rho.matrix.diagonal().real
        assert d[0] == pytest.approx(0.5, abs=1e-12)
        assert d[1] == pytest.approx(0.5, abs=1e-12)
        assert np.abs(d[2:]).max() < 1e-15

    def test_identity_at_unit_transmissivity(self):
        rho = coherent(1.0, POLICY48)
        assert loss_channel(rho, 1.0) is rho

    def test_full_loss_gives_vacuum(self):
        rho = coherent(1.5, POLICY48)
        out = loss_channel(rho, 0.0)
        assert out.matrix[0, 0].real == pytest.approx(1.0, abs=1e-12)

    def test_coherent_maps_to_attenuated_coherent(self):
        for eta in (0.25, 0.69):
            for alpha in (0.8, 2.0, 1.1 + 0.9j):
                lossy = loss_channel(coherent(alpha, POLICY48), eta)
                target = apply_displacement(vacuum(POLICY48), math.sqrt(eta) * alpha)
                assert fidelity(lossy, target) > 1.0 - 1e-10

    @pytest.mark.parametrize("eta", [0.0, 0.25, 0.69, 1.0])
    def test_preserves_trace_and_diagonal_positivity(self, eta):
        rng = np.random.default_rng(11)
        rho = random_low_energy_state(rng, POLICY48.dim)
        out = loss_channel(rho, eta)
        assert out.trace == pytest.approx(rho.trace, abs=1e-12)
        assert out.matrix.diagonal().real.min() >= -1e-14

    def test_diagonal_states_stay_diagonal(self):
        rho = loss_channel(fock(3, POLICY48), 0.37)
        off = rho.matrix - np.diag(rho.matrix.diagonal())
        assert np.abs(off).max() == 0.0

    def test_out_of_range_raises(self):
        with pytest.raises(DomainError):
            loss_channel(vacuum(POLICY48), 1.01)
        with pytest.raises(DomainError):
            loss_channel(vacuum(POLICY48), -0.01)

    def test_commutes_with_displacement_covariantly(self):
        # lose(displace(rho, a), eta) == displace(lose(rho, eta), sqrt(eta) a)
        rng = np.random.default_rng(23)
        for eta in (0.5, 0.69, 0.9):
            rho = random_low_energy_state(rng, POLICY48.dim)
            a = 2.0 * math.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            lhs = loss_channel(apply_displacement(rho, a), eta)
            rhs = apply_displacement(loss_channel(rho, eta), math.sqrt(eta) * a)
            assert np.abs(lhs.matrix - rhs.matrix).max() <= 1e-9


class TestDiagonal:
    def test_vacuum(self):
        d = diagonal(vacuum(POLICY48))
        assert d.probs[0] == 1.0 and np.all(d.probs[1:] == 0.0)

    def test_coherent_is_poisson(self):
        # oracle: e^-lambda lambda^n / n! at lambda = |alpha0|^2 = 1
        d = diagonal(coherent(1.0, POLICY48))
        for n in range(12):
            assert d.probs[n] == pytest.approx(
                math.exp(-1.0) / math.factorial(n), abs=1e-13
            )

    def test_mixture_is_linear(self):
        mat = 0.5 * vacuum(POLICY48).matrix + 0.5 * fock(1, POLICY48).matrix
        d = diagonal(DensityMatrix(mat))
        assert d.probs[0] == 0.5 and d.probs[1] == 0.5
        assert np.all(d.probs[2:] == 0.0)

import math

import numpy as np
import pytest

from parityscan import (
    DensityMatrix,
    DomainError,
    IDEAL_DETECTOR,
    PhaseDiffusionSpec,
    ProbePoint,
    TruncationOverflow,
    TruncationPolicy,
    coherent,
    diagonal,
    exact_pi,
    fidelity,
    fock,
    mixture,
    parity_operator_expectation,
    phase_diffused_coherent,
    trace_distance,
    vacuum,
)

POLICY48 = TruncationPolicy(cutoff=48)

# detected mean 1.34 referred back through eta*T = 0.70 * 0.986
SIGNAL_MEAN = 1.9414662416690815


class TestVacuum:
    def test_matrix(self):
        rho = vacuum(TruncationPolicy(cutoff=4))
        np.testing.assert_array_equal(rho.matrix.diagonal().real, [1, 0, 0, 0, 0])

    def test_trace_exact(self):
        assert vacuum(POLICY48).trace == 1.0

    def test_even_parity_at_origin(self):
        assert parity_operator_expectation(vacuum(POLICY48), 0.0) == pytest.approx(
            1.0, abs=1e-15
        )


class TestCoherent:
    def test_zero_amplitude_is_vacuum(self):
        np.testing.assert_array_equal(
            coherent(0.0, POLICY48).matrix, vacuum(POLICY48).matrix
        )

    def test_signal_referred_mean_photon_number(self):
        rho = coherent(math.sqrt(SIGNAL_MEAN), POLICY48)
        assert rho.mean_photon_number() == pytest.approx(SIGNAL_MEAN, abs=1e-9)

    @pytest.mark.parametrize("mean", [0.25, 1.0, 4.0])
    def test_mean_equals_amplitude_squared(self, mean):
        rho = coherent(math.sqrt(mean) * np.exp(0.4j), POLICY48)
        assert rho.mean_photon_number() == pytest.approx(mean, abs=1e-9)

    def test_headroom_rule(self):
        with pytest.raises(TruncationOverflow):
            coherent(math.sqrt(POLICY48.cutoff / 4 + 1.0), POLICY48)


class TestFock:
    def test_zero_is_vacuum(self):
        np.testing.assert_array_equal(fock(0, POLICY48).matrix, vacuum(POLICY48).matrix)

    def test_one(self):
        d = fock(1, POLICY48).matrix.diagonal().real
        assert d[1] == 1.0 and d.sum() == 1.0

    def test_odd_parity_and_wigner_floor(self):
        rho = fock(1, POLICY48)
        pi_val = exact_pi(rho, IDEAL_DETECTOR, ProbePoint(0.0))
        assert pi_val == pytest.approx(-1.0, abs=1e-12)
        assert 2.0 / math.pi * pi_val == pytest.approx(-0.6366197723675814, abs=1e-12)

    def test_above_cutoff_raises(self):
        with pytest.raises(DomainError):
            fock(POLICY48.cutoff + 1, POLICY48)


class TestPhaseDiffusionSpec:
    def test_defaults(self):
        spec = PhaseDiffusionSpec()
        assert spec.center_phase == 0.0
        assert spec.modulation_amplitude == 0.8
        assert spec.nodes == 64

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(modulation_amplitude=0.0),
            dict(modulation_amplitude=3.5),
            dict(nodes=2),
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(DomainError):
            PhaseDiffusionSpec(**kwargs)


class TestPhaseDiffusedCoherent:
    def test_vanishing_modulation_is_coherent(self):
        spec = PhaseDiffusionSpec(center_phase=0.3, modulation_amplitude=1e-9)
        rho = phase_diffused_coherent(1.2, spec, POLICY48)
        target = coherent(1.2 * np.exp(0.3j), POLICY48)
        assert fidelity(rho, target) > 1.0 - 1e-6

    def test_node_convergence_monotone(self):
        # successive refinements shrink monotonically and the default node
        # count sits at spectral-convergence level
        mag = math.sqrt(2.0)
        spec = lambda m: PhaseDiffusionSpec(modulation_amplitude=0.8, nodes=m)
        ref = phase_diffused_coherent(mag, spec(256), POLICY48)
        dists = [
            trace_distance(phase_diffused_coherent(mag, spec(m), POLICY48), ref)
            for m in (4, 8, 16, 32, 64)
        ]
        assert all(a > b for a, b in zip(dists, dists[1:]))
        # coarse mixtures are visibly off, ~25 nodes reach 1e-3
        assert dists[1] > 1e-3  # M=8
        assert dists[2] < 1e-3  # M=16
        assert dists[-1] < 1e-6  # M=64, the default

    def test_phase_covariance(self):
        mag, delta = 1.1, 0.7
        spec0 = PhaseDiffusionSpec(center_phase=0.2, modulation_amplitude=0.8, nodes=32)
        spec1 = PhaseDiffusionSpec(center_phase=0.2 + delta, modulation_amplitude=0.8, nodes=32)
        rotated = phase_diffused_coherent(mag, spec1, POLICY48)
        phases = np.exp(1j * delta * np.arange(POLICY48.dim))
        conjugated = phases[:, None] * phase_diffused_coherent(mag, spec0, POLICY48).matrix * phases.conj()[None, :]
        assert np.abs(rotated.matrix - conjugated).max() <= 1e-9

    def test_turning_point_peaks_on_angular_scan(self):
        # With an ideal detection chain the exact parity surface of the
        # phase-diffused state, scanned around the ring |beta| = |alpha0|,
        # shows exactly two angular maxima.  The smeared arcsine density
        # pulls each peak inward by ~0.4/|beta| rad, so a long lever arm
        # keeps them within one grid step of the modulation turning points.
        policy = TruncationPolicy(cutoff=255)
        mag = 6.0
        amplitude = 15.75 * 2.0 * math.pi / 80.0
        spec = PhaseDiffusionSpec(modulation_amplitude=amplitude, nodes=64)
        rho = phase_diffused_coherent(mag, spec, policy)
        phases = 2.0 * math.pi * np.arange(80) / 80.0
        ring = np.array(
            [
                exact_pi(rho, IDEAL_DETECTOR, ProbePoint(mag * np.exp(1j * p)))
                for p in phases
            ]
        )
        is_max = (ring > np.roll(ring, 1)) & (ring > np.roll(ring, -1))
        locs = phases[is_max]
        locs = np.where(locs > np.pi, locs - 2.0 * np.pi, locs)
        assert is_max.sum() == 2
        step = 2.0 * math.pi / 80.0
        for loc in locs:
            target = amplitude if loc > 0 else -amplitude
            assert abs(loc - target) <= step

    def test_headroom_propagates(self):
        with pytest.raises(TruncationOverflow):
            phase_diffused_coherent(4.0, PhaseDiffusionSpec(), POLICY48)


class TestMixture:
    def test_single_component_identity(self):
        rho = coherent(0.9, POLICY48)
        out = mixture([(1.0, rho)])
        np.testing.assert_allclose(out.matrix, rho.matrix, atol=1e-15)

    def test_even_vacuum_fock_mix(self):
        out = mixture([(0.5, vacuum(POLICY48)), (0.5, fock(1, POLICY48))])
        d = out.matrix.diagonal().real
        assert d[0] == 0.5 and d[1] == 0.5

    def test_opposite_coherent_pair(self):
        plus = coherent(1.0, POLICY48)
        minus = coherent(-1.0, POLICY48)
        out = mixture([(0.5, plus), (0.5, minus)])
        assert out.trace == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(
            out.matrix, 0.5 * plus.matrix + 0.5 * minus.matrix, atol=1e-15
        )
        # odd off-diagonals cancel between the two projectors
        assert abs(out.matrix[0, 1]) < 1e-15

    def test_diagonal_linearity(self):
        a, b = coherent(0.7, POLICY48), fock(2, POLICY48)
        out = mixture([(0.25, a), (0.75, b)])
        np.testing.assert_allclose(
            diagonal(out).probs,
            0.25 * diagonal(a).probs + 0.75 * diagonal(b).probs,
            atol=1e-13,
        )

    def test_weight_validation(self):
        rho = vacuum(POLICY48)
        with pytest.raises(DomainError):
            mixture([(0.5, rho), (0.4, rho)])
        with pytest.raises(DomainError):
            mixture([(-0.1, rho), (1.1, rho)])
        with pytest.raises(DomainError):
            mixture([])

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            mixture([(0.5, vacuum(POLICY48)), (0.5, vacuum(TruncationPolicy(cutoff=10)))])

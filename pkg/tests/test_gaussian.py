import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opamzi.gaussian import (
    GaussianState,
    apply_beam_splitter,
    apply_loss,
    apply_opa,
    apply_phase_shift,
    beam_splitter_matrix,
    coherent_state,
    homodyne_stats,
    is_physical,
    mean_photon_number,
    omega_sympl,
    opa_matrix,
    rotation_matrix,
    total_photon_number,
    vacuum_state,
)
from opamzi.params import GainConvention, GainSpec, OpaParams, gain_to_opa

OPA_15 = OpaParams(math.sqrt(15.0), math.sqrt(14.0))

angles = st.floats(-10.0, 10.0, allow_nan=False)
squeezings = st.floats(0.0, 2.0)
efficiencies = st.floats(0.0, 1.0)


def opa_from_r(r: float) -> OpaParams:
    return OpaParams(math.cosh(r), math.sinh(r))


def test_vacuum_single_mode():
    v = vacuum_state(1)
    np.testing.assert_array_equal(v.mean, np.zeros(2))
    np.testing.assert_array_equal(v.cov, np.eye(2))
    assert mean_photon_number(v, 0) == 0.0


def test_vacuum_two_modes():
    v = vacuum_state(2)
    np.testing.assert_array_equal(v.mean, np.zeros(4))
    np.testing.assert_array_equal(v.cov, np.eye(4))


def test_vacuum_rejects_zero_modes():
    with pytest.raises(ValueError):
        vacuum_state(0)


def test_coherent_zero_amplitude_is_vacuum():
    c = coherent_state(0.0, 0.0)
    np.testing.assert_array_equal(c.mean, np.zeros(2))
    np.testing.assert_array_equal(c.cov, np.eye(2))


def test_coherent_mean_and_photon_number():
    c = coherent_state(4.0, 0.0)
    np.testing.assert_allclose(c.mean, [4.0, 0.0])
    np.testing.assert_array_equal(c.cov, np.eye(2))
    assert mean_photon_number(c, 0) == pytest.approx(4.0, rel=1e-12)


def test_coherent_large_flux_amplitude():
    c = coherent_state(4.5e13, 0.0)
    assert c.mean[0] == pytest.approx(2.0 * math.sqrt(4.5e13), rel=1e-15)
    assert c.mean[0] == pytest.approx(1.342e7, rel=1e-3)


def test_coherent_rejects_negative_flux():
    with pytest.raises(ValueError):
        coherent_state(-1.0, 0.0)


def test_state_rejects_asymmetric_cov():
    cov = np.eye(2)
    cov[0, 1] = 1e-6
    with pytest.raises(ValueError):
        GaussianState(1, np.zeros(2), cov)


def test_balanced_splitter_splits_energy():
    state = vacuum_state(2)
    mean = state.mean.copy()
    mean[0:2] = coherent_state(2.0).mean
    state = GaussianState(2, mean, state.cov)
    out = apply_beam_splitter(state, 0, 1, 0.5)
    assert mean_photon_number(out, 0) == pytest.approx(1.0, abs=1e-12)
    assert mean_photon_number(out, 1) == pytest.approx(1.0, abs=1e-12)


def test_full_transmission_is_identity():
    state = apply_opa(vacuum_state(2), 0, opa_from_r(0.4))
    out = apply_beam_splitter(state, 0, 1, 1.0)
    np.testing.assert_allclose(out.mean, state.mean, atol=1e-15)
    np.testing.assert_allclose(out.cov, state.cov, atol=1e-15)


def test_mach_zehnder_recovers_input_against_matrix_oracle():
    # oracle: 2x2 complex amplitude algebra for BS * phase(pi) * BS
    bs = np.array([[1.0, 1.0], [-1.0, 1.0]]) / math.sqrt(2.0)
    net = bs @ np.diag([1.0, np.exp(1j * math.pi)]) @ bs
    amps_in = np.array([3.0 + 0.0j, 0.0j])
    amps_out = net @ amps_in

    state = vacuum_state(2)
    mean = state.mean.copy()
    mean[0:2] = coherent_state(9.0).mean
    state = GaussianState(2, mean, state.cov)
    state = apply_beam_splitter(state, 0, 1, 0.5)
    state = apply_phase_shift(state, 1, math.pi)
    state = apply_beam_splitter(state, 0, 1, 0.5)

    for mode in (0, 1):
        assert state.mean[2 * mode] == pytest.approx(2 * amps_out[mode].real, abs=1e-9)
        assert state.mean[2 * mode + 1] == pytest.approx(2 * amps_out[mode].imag, abs=1e-9)
    # one port dark, the other carries everything
    assert mean_photon_number(state, 1) == pytest.approx(0.0, abs=1e-15)
    assert mean_photon_number(state, 0) == pytest.approx(9.0, rel=1e-12)


def test_beam_splitter_rejects_bad_arguments():
    state = vacuum_state(2)
    with pytest.raises(ValueError):
        apply_beam_splitter(state, 0, 0, 0.5)
    with pytest.raises(ValueError):
        apply_beam_splitter(state, 0, 1, 1.5)
    with pytest.raises(ValueError):
        apply_beam_splitter(state, 0, 2, 0.5)


def test_phase_shift_zero_is_identity():
    c = coherent_state(2.0, 0.3)
    out = apply_phase_shift(c, 0, 0.0)
    np.testing.assert_array_equal(out.mean, c.mean)


def test_phase_shift_quarter_turn():
    out = apply_phase_shift(coherent_state(1.0, 0.0), 0, math.pi / 2)
    np.testing.assert_allclose(out.mean, [0.0, 2.0], atol=1e-15)


def test_phase_shift_full_turn():
    c = coherent_state(2.0, 0.1)
    out = apply_phase_shift(c, 0, 2.0 * math.pi)
    np.testing.assert_allclose(out.mean, c.mean, atol=1e-12)
    np.testing.assert_allclose(out.cov, c.cov, atol=1e-12)


def test_unpumped_opa_is_identity():
    c = coherent_state(2.0, 0.4)
    out = apply_opa(c, 0, OpaParams(1.0, 0.0))
    np.testing.assert_allclose(out.mean, c.mean, atol=1e-15)
    np.testing.assert_allclose(out.cov, c.cov, atol=1e-15)


def test_opa_on_vacuum_quadratures_and_photons():
    out = apply_opa(vacuum_state(1), 0, OPA_15)
    amplified = (math.sqrt(15.0) + math.sqrt(14.0)) ** 2
    assert out.cov[0, 0] == pytest.approx(amplified, rel=1e-12)
    assert out.cov[0, 0] == pytest.approx(57.98, rel=1e-3)
    assert out.cov[1, 1] == pytest.approx(1.0 / amplified, rel=1e-12)
    assert out.cov[1, 1] == pytest.approx(0.017246, rel=1e-4)
    assert mean_photon_number(out, 0) == pytest.approx(14.0, rel=1e-12)


def test_opa_seed_power_gain():
    # seed aligned with the amplified quadrature: flux gain (G+g)^2 = 15.06
    from opamzi.constants import photon_flux_from_power, power_from_photon_flux

    opa = gain_to_opa(GainSpec(15.06, GainConvention.PHASE_SENSITIVE_POWER))
    flux_in = photon_flux_from_power(5e-6, 895e-9)
    out = apply_opa(coherent_state(flux_in), 0, opa)
    flux_out = mean_photon_number(out, 0)
    assert flux_out == pytest.approx(15.06 * flux_in + opa.amp_gain_g**2, rel=1e-12)
    assert power_from_photon_flux(flux_out, 895e-9) == pytest.approx(75.3e-6, rel=1e-9)


def test_opa_pump_angle_moves_amplified_quadrature():
    opa = OpaParams(math.cosh(0.4), math.sinh(0.4), pump_quadrature=math.pi / 2)
    out = apply_opa(vacuum_state(1), 0, opa)
    assert out.cov[1, 1] == pytest.approx(math.exp(0.8), rel=1e-12)
    assert out.cov[0, 0] == pytest.approx(math.exp(-0.8), rel=1e-12)


def test_loss_identity_and_total():
    sq = apply_opa(vacuum_state(1), 0, opa_from_r(0.8))
    same = apply_loss(sq, 0, 1.0)
    np.testing.assert_allclose(same.cov, sq.cov, atol=1e-15)
    dead = apply_loss(coherent_state(5.0, 0.2), 0, 0.0)
    np.testing.assert_allclose(dead.mean, np.zeros(2), atol=1e-15)
    np.testing.assert_allclose(dead.cov, np.eye(2), atol=1e-15)


def test_loss_on_squeezed_variance():
    # 0.735 * 0.017246 + 0.265 = 0.27768, about -5.56 dB
    sq = apply_opa(vacuum_state(1), 0, OPA_15)
    out = apply_loss(sq, 0, 0.735)
    expected = 0.735 * (math.sqrt(15.0) - math.sqrt(14.0)) ** 2 + 0.265
    assert out.cov[1, 1] == pytest.approx(expected, rel=1e-12)
    assert 10.0 * math.log10(out.cov[1, 1]) == pytest.approx(-5.56, abs=0.01)


def test_loss_rejects_bad_efficiency():
    with pytest.raises(ValueError):
        apply_loss(vacuum_state(1), 0, 1.2)
    with pytest.raises(ValueError):
        apply_loss(vacuum_state(1), 0, -0.1)


@given(eta1=efficiencies, eta2=efficiencies, r=st.floats(0.0, 1.0))
def test_loss_composition(eta1, eta2, r):
    state = apply_opa(coherent_state(2.0, 0.7), 0, opa_from_r(r))
    once = apply_loss(apply_loss(state, 0, eta1), 0, eta2)
    combined = apply_loss(state, 0, eta1 * eta2)
    np.testing.assert_allclose(once.mean, combined.mean, atol=1e-12)
    np.testing.assert_allclose(once.cov, combined.cov, atol=1e-12)


def test_homodyne_vacuum_floor():
    for angle in (0.0, 0.7, math.pi / 2):
        stats = homodyne_stats(vacuum_state(1), 0, angle)
        assert stats.mean == 0.0
        assert stats.variance == pytest.approx(1.0, rel=1e-15)


def test_homodyne_coherent():
    stats = homodyne_stats(coherent_state(4.0, 0.0), 0, 0.0)
    assert stats.mean == pytest.approx(4.0, rel=1e-12)
    assert stats.variance == pytest.approx(1.0, rel=1e-12)


def test_homodyne_squeezed_vacuum_floor():
    out = apply_opa(vacuum_state(1), 0, OPA_15)
    stats = homodyne_stats(out, 0, math.pi / 2)
    assert stats.variance == pytest.approx(0.017246507621122904, rel=1e-12)
    assert 10 * math.log10(stats.variance) == pytest.approx(-17.63, abs=0.01)


@given(angle=angles, r=squeezings, phase=angles)
def test_homodyne_half_turn_invariance(angle, r, phase):
    state = apply_phase_shift(apply_opa(coherent_state(1.5, 0.0), 0, opa_from_r(r)), 0, phase)
    a = homodyne_stats(state, 0, angle)
    b = homodyne_stats(state, 0, angle + math.pi)
    assert b.variance == pytest.approx(a.variance, rel=1e-9, abs=1e-12)
    assert b.mean == pytest.approx(-a.mean, rel=1e-9, abs=1e-9)


@settings(max_examples=60)
@given(t=efficiencies, phi=angles, r=squeezings, pump=angles)
def test_transforms_are_symplectic(t, phi, r, pump):
    omega = omega_sympl(2)
    for s in (
        beam_splitter_matrix(2, 0, 1, t),
        rotation_matrix(2, 1, phi),
        opa_matrix(2, 0, OpaParams(math.cosh(r), math.sinh(r), pump)),
    ):
        np.testing.assert_allclose(s @ omega @ s.T, omega, atol=1e-12)


@given(t=efficiencies, phi=angles, r=st.floats(0.0, 1.5))
def test_lossless_transforms_preserve_purity(t, phi, r):
    state = coherent_state(3.0, 0.2)
    two = GaussianState(2, np.concatenate([state.mean, np.zeros(2)]), np.eye(4))
    two = apply_opa(two, 0, opa_from_r(r))
    two = apply_beam_splitter(two, 0, 1, t)
    two = apply_phase_shift(two, 1, phi)
    assert np.linalg.det(two.cov) == pytest.approx(1.0, rel=1e-9)


@given(r=st.floats(0.1, 1.5), eta=st.floats(0.05, 0.95))
def test_loss_strictly_increases_det_for_squeezed(r, eta):
    sq = apply_opa(vacuum_state(1), 0, opa_from_r(r))
    lossy = apply_loss(sq, 0, eta)
    assert np.linalg.det(lossy.cov) > np.linalg.det(sq.cov) + 1e-12


@given(t=efficiencies, phi=angles)
def test_passive_elements_conserve_photons(t, phi):
    state = GaussianState(
        2,
        np.concatenate([coherent_state(2.5, 0.3).mean, coherent_state(0.5, 1.0).mean]),
        np.eye(4),
    )
    n0 = total_photon_number(state)
    after = apply_phase_shift(apply_beam_splitter(state, 0, 1, t), 0, phi)
    assert total_photon_number(after) == pytest.approx(n0, abs=1e-9)


@given(r=squeezings)
def test_opa_adds_spontaneous_photons_to_vacuum(r):
    out = apply_opa(vacuum_state(1), 0, opa_from_r(r))
    assert mean_photon_number(out, 0) == pytest.approx(math.sinh(r) ** 2, abs=1e-9)


@given(r=squeezings, eta=efficiencies)
def test_constructed_states_stay_physical(r, eta):
    state = apply_loss(apply_opa(coherent_state(2.0, 0.1), 0, opa_from_r(r)), 0, eta)
    assert is_physical(state)

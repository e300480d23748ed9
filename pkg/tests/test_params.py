import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from opamzi.constants import photon_flux_from_power, power_from_photon_flux
from opamzi.params import (
    GainConvention,
    GainSpec,
    InterferometerConfig,
    LossBudget,
    OpaParams,
    config_replace,
    gain_to_opa,
    opa_to_gain,
)


def test_intensity_convention():
    opa = gain_to_opa(GainSpec(15.0, GainConvention.INTENSITY_G2))
    assert opa.amp_gain_G == pytest.approx(math.sqrt(15.0), rel=1e-15)
    assert opa.amp_gain_g == pytest.approx(math.sqrt(14.0), rel=1e-15)


def test_seed_power_convention():
    opa = gain_to_opa(GainSpec(15.06, GainConvention.PHASE_SENSITIVE_POWER))
    assert opa.amplified_scale == pytest.approx(math.sqrt(15.06), rel=1e-15)
    assert opa.amplified_scale == pytest.approx(3.8807, rel=1e-4)
    assert opa.deamplified_scale == pytest.approx(0.25768, rel=1e-4)
    assert opa.amp_gain_G == pytest.approx(2.0692, rel=1e-4)
    assert opa.amp_gain_g == pytest.approx(1.8115, rel=1e-4)


def test_amplitude_convention_identity():
    opa = gain_to_opa(GainSpec(1.0, GainConvention.AMPLITUDE_G))
    assert opa.amp_gain_G == 1.0
    assert opa.amp_gain_g == 0.0


@pytest.mark.parametrize("convention", list(GainConvention))
def test_gain_value_below_one_rejected(convention):
    with pytest.raises(ValueError):
        GainSpec(0.9, convention)


@pytest.mark.parametrize("convention", list(GainConvention))
@given(value=st.floats(1.0, 1e4))
def test_gain_round_trip(convention, value):
    opa = gain_to_opa(GainSpec(value, convention))
    back = opa_to_gain(opa, convention)
    assert back.convention == convention
    assert back.value == pytest.approx(value, rel=1e-9)


def test_opa_params_invariants():
    with pytest.raises(ValueError):
        OpaParams(2.0, 2.0)  # G^2 - g^2 = 0
    with pytest.raises(ValueError):
        OpaParams(0.5, 0.0)
    opa = OpaParams(math.cosh(0.7), math.sinh(0.7))
    assert opa.squeezing_r == pytest.approx(0.7, rel=1e-12)
    assert opa.deamplified_scale == pytest.approx(math.exp(-0.7), rel=1e-12)


def test_loss_budget_total_efficiency():
    budget = LossBudget(
        internal_loss_L0=0.002,
        detection_efficiency_eta=0.99,
        homodyne_visibility=0.98,
        external_loss_db=0.71,
    )
    expected = 0.998 * 0.99 * 0.98**2 * 10 ** (-0.071)
    assert budget.total_efficiency == pytest.approx(expected, rel=1e-12)
    assert 0.0 <= budget.total_efficiency <= 1.0


def test_loss_budget_validation():
    with pytest.raises(ValueError):
        LossBudget(internal_loss_L0=1.5)
    with pytest.raises(ValueError):
        LossBudget(detection_efficiency_eta=-0.1)
    with pytest.raises(ValueError):
        LossBudget(external_loss_db=-1.0)


GAIN15 = GainSpec(15.0, GainConvention.INTENSITY_G2)


def test_config_requires_exactly_one_input():
    with pytest.raises(ValueError):
        InterferometerConfig(wavelength_lambda=895e-9, gain=GAIN15)
    with pytest.raises(ValueError):
        InterferometerConfig(
            wavelength_lambda=895e-9,
            gain=GAIN15,
            input_flux_alpha_in_sq=1e13,
            input_power_watts=1e-6,
        )


def test_config_derives_flux_from_power():
    cfg = InterferometerConfig(
        wavelength_lambda=895e-9, gain=GAIN15, input_power_watts=10e-6
    )
    assert cfg.input_given == "power"
    assert cfg.input_flux_alpha_in_sq == pytest.approx(4.5e13, rel=2e-3)
    assert cfg.seed_flux == pytest.approx(2.25e13, rel=2e-3)


def test_config_derives_power_from_flux():
    cfg = InterferometerConfig(
        wavelength_lambda=895e-9, gain=GAIN15, input_flux_alpha_in_sq=4.5e13
    )
    assert cfg.input_given == "flux"
    assert cfg.input_power_watts == pytest.approx(
        power_from_photon_flux(4.5e13, 895e-9), rel=1e-15
    )


@given(power=st.floats(1e-9, 1e-3), wavelength=st.floats(300e-9, 2e-6))
def test_flux_power_inverse(power, wavelength):
    flux = photon_flux_from_power(power, wavelength)
    assert power_from_photon_flux(flux, wavelength) == pytest.approx(power, rel=1e-12)


def test_config_default_bias_is_dark_fringe():
    cfg = InterferometerConfig(
        wavelength_lambda=895e-9, gain=GAIN15, input_flux_alpha_in_sq=1.0
    )
    assert cfg.bias_phase == math.pi


def test_config_warns_on_large_modulation():
    with pytest.warns(UserWarning):
        InterferometerConfig(
            wavelength_lambda=895e-9,
            gain=GAIN15,
            input_flux_alpha_in_sq=1.0,
            modulation_delta=0.2,
        )


def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        InterferometerConfig(wavelength_lambda=-1.0, gain=GAIN15, input_flux_alpha_in_sq=1.0)
    with pytest.raises(ValueError):
        InterferometerConfig(
            wavelength_lambda=895e-9, gain=GAIN15, input_flux_alpha_in_sq=-2.0
        )


def test_config_replace_keeps_given_kind():
    cfg = InterferometerConfig(
        wavelength_lambda=895e-9, gain=GAIN15, input_power_watts=10e-6
    )
    moved = config_replace(cfg, gain=GainSpec(5.0, GainConvention.INTENSITY_G2))
    assert moved.input_given == "power"
    assert moved.input_power_watts == cfg.input_power_watts
    refluxed = config_replace(cfg, input_flux_alpha_in_sq=2.0)
    assert refluxed.input_given == "flux"
    assert refluxed.input_flux_alpha_in_sq == 2.0

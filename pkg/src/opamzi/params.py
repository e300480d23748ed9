"""Parameter objects describing the interferometer: OPA gains, losses, full configs.

Gain bookkeeping: a phase-sensitive amplifier is described by amplitude gains
(G, g) with G^2 - g^2 = 1.  The quadrature aligned with the pump is scaled by
(G + g), the conjugate one by (G - g) = 1/(G + g).  Published gain numbers come
in several conventions, so ``GainSpec`` carries the convention explicitly.
"""
from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

from .constants import photon_flux_from_power, power_from_photon_flux

_GAIN_TOL = 1e-12


class GainConvention(Enum):
    """How a scalar gain value maps onto the amplitude gains (G, g)."""

    AMPLITUDE_G = "G"  # value = G
    INTENSITY_G2 = "G2"  # value = G^2
    PHASE_SENSITIVE_POWER = "PSP"  # value = (G + g)^2, the seed power gain


@dataclass(frozen=True)
class GainSpec:
    value: float
    convention: GainConvention

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value < 1.0:
            raise ValueError(
                f"gain value must be >= 1 for convention {self.convention.name}, "
                f"got {self.value}"
            )


@dataclass(frozen=True)
class OpaParams:
    """Amplitude gains of one OPA plus the orientation of its amplified quadrature."""

    amp_gain_G: float
    amp_gain_g: float
    pump_quadrature: float = 0.0

    def __post_init__(self):
        if self.amp_gain_G < 1.0 or self.amp_gain_g < 0.0:
            raise ValueError(
                f"require G >= 1 and g >= 0, got G={self.amp_gain_G}, g={self.amp_gain_g}"
            )
        residual = self.amp_gain_G**2 - self.amp_gain_g**2 - 1.0
        if abs(residual) > _GAIN_TOL * max(1.0, self.amp_gain_G**2):
            raise ValueError(
                f"gains must satisfy G^2 - g^2 = 1, got residual {residual:.3e}"
            )

    @property
    def squeezing_r(self) -> float:
        """Squeezing parameter r = ln(G + g); (G - g) = e^-r."""
        return math.log(self.amp_gain_G + self.amp_gain_g)

    @property
    def amplified_scale(self) -> float:
        return self.amp_gain_G + self.amp_gain_g

    @property
    def deamplified_scale(self) -> float:
        return self.amp_gain_G - self.amp_gain_g


def gain_to_opa(gain: GainSpec, pump_quadrature: float = 0.0) -> OpaParams:
    """Resolve a gain value in any convention into explicit (G, g)."""
    v = gain.value
    if gain.convention is GainConvention.AMPLITUDE_G:
        big_g = v
        small_g = math.sqrt(v * v - 1.0)
    elif gain.convention is GainConvention.INTENSITY_G2:
        big_g = math.sqrt(v)
        small_g = math.sqrt(v - 1.0)
    elif gain.convention is GainConvention.PHASE_SENSITIVE_POWER:
        s = math.sqrt(v)  # G + g
        big_g = 0.5 * (s + 1.0 / s)
        small_g = 0.5 * (s - 1.0 / s)
    else:  # pragma: no cover
        raise ValueError(f"unknown gain convention {gain.convention}")
    return OpaParams(big_g, small_g, pump_quadrature)


def opa_to_gain(opa: OpaParams, convention: GainConvention) -> GainSpec:
    """Inverse of :func:`gain_to_opa` for the requested convention."""
    if convention is GainConvention.AMPLITUDE_G:
        value = opa.amp_gain_G
    elif convention is GainConvention.INTENSITY_G2:
        value = opa.amp_gain_G**2
    else:
        value = (opa.amp_gain_G + opa.amp_gain_g) ** 2
    return GainSpec(value, convention)


@dataclass(frozen=True)
class LossBudget:
    """Optical losses: per-arm internal loss, detection-side efficiencies.

    ``internal_loss_L0`` is applied once in each arm after its OPA.  Detection
    efficiency, homodyne visibility (as v^2) and any external attenuation in dB
    are lumped into a single loss at the monitored output port.
    """

    internal_loss_L0: float = 0.0
    detection_efficiency_eta: float = 1.0
    homodyne_visibility: float = 1.0
    external_loss_db: float = 0.0

    def __post_init__(self):
        for name in ("internal_loss_L0", "detection_efficiency_eta", "homodyne_visibility"):
            x = getattr(self, name)
            if not 0.0 <= x <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {x}")
        if self.external_loss_db < 0.0:
            raise ValueError(f"external_loss_db must be >= 0, got {self.external_loss_db}")

    @property
    def detection_port_efficiency(self) -> float:
        """Combined efficiency applied at the monitored port."""
        return (
            self.detection_efficiency_eta
            * self.homodyne_visibility**2
            * 10.0 ** (-self.external_loss_db / 10.0)
        )

    @property
    def total_efficiency(self) -> float:
        return (1.0 - self.internal_loss_L0) * self.detection_port_efficiency

    @property
    def is_lossless(self) -> bool:
        return self.internal_loss_L0 == 0.0 and self.detection_port_efficiency == 1.0


@dataclass(frozen=True)
class InterferometerConfig:
    """Complete description of one interferometer run.

    Exactly one of ``input_flux_alpha_in_sq`` (photons/s) or
    ``input_power_watts`` is given; the other is derived through
    flux = lambda * P / (h c).  ``seed_flux`` is the effective interferometric
    seed flux, half the stated input flux; it is the flux argument of the
    closed-form sensitivity and of the phase-sensing intensity.
    """

    wavelength_lambda: float
    gain: GainSpec
    input_flux_alpha_in_sq: float | None = None
    input_power_watts: float | None = None
    bias_phase: float = math.pi
    modulation_delta: float = 1e-6
    losses: LossBudget = field(default_factory=LossBudget)
    input_given: str = field(default="", compare=True)

    def __post_init__(self):
        if self.wavelength_lambda <= 0.0 or not math.isfinite(self.wavelength_lambda):
            raise ValueError(f"wavelength must be positive, got {self.wavelength_lambda}")
        flux_given = self.input_flux_alpha_in_sq is not None
        power_given = self.input_power_watts is not None
        if flux_given == power_given:
            raise ValueError("exactly one of input flux and input power must be given")
        if flux_given:
            if self.input_flux_alpha_in_sq < 0.0:
                raise ValueError("input flux must be >= 0")
            object.__setattr__(self, "input_given", "flux")
            object.__setattr__(
                self,
                "input_power_watts",
                power_from_photon_flux(self.input_flux_alpha_in_sq, self.wavelength_lambda),
            )
        else:
            if self.input_power_watts < 0.0:
                raise ValueError("input power must be >= 0")
            object.__setattr__(self, "input_given", "power")
            object.__setattr__(
                self,
                "input_flux_alpha_in_sq",
                photon_flux_from_power(self.input_power_watts, self.wavelength_lambda),
            )
        if not math.isfinite(self.bias_phase):
            raise ValueError("bias phase must be finite")
        if self.modulation_delta < 0.0 or not math.isfinite(self.modulation_delta):
            raise ValueError("modulation delta must be a finite value >= 0")
        if self.modulation_delta > 0.1:
            warnings.warn(
                f"modulation delta {self.modulation_delta} rad is not small; "
                "the linear signal model assumes delta << 1",
                stacklevel=2,
            )
        # validate the gain eagerly
        gain_to_opa(self.gain)

    @property
    def seed_flux(self) -> float:
        """Interferometric seed flux I0 = alpha_in^2 / 2."""
        return 0.5 * self.input_flux_alpha_in_sq

    @property
    def opa(self) -> OpaParams:
        return gain_to_opa(self.gain)


def config_replace(config: InterferometerConfig, **changes) -> InterferometerConfig:
    """``dataclasses.replace`` for configs, rederiving the flux/power pair.

    A constructed config carries both the given and the derived input field;
    this drops the derived one (or the counterpart of a newly supplied one)
    so the exactly-one-input validation can run again.
    """
    if changes.get("input_flux_alpha_in_sq") is not None:
        changes["input_power_watts"] = None
    elif changes.get("input_power_watts") is not None:
        changes["input_flux_alpha_in_sq"] = None
    elif config.input_given == "flux":
        changes.setdefault("input_power_watts", None)
    else:
        changes.setdefault("input_flux_alpha_in_sq", None)
    changes["input_given"] = ""
    return dataclasses.replace(config, **changes)

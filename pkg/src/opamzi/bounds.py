"""Reference sensitivity limits: shot-noise, Heisenberg, quantum Cramer-Rao,
and the frequency-domain minimum detectable phase, plus small dB helpers."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import PLANCK_H, SPEED_OF_LIGHT


def snl(phase_sensing_flux_n: float, two_arm: bool = False) -> float:
    """Shot-noise limit 1/sqrt(N).

    With ``two_arm`` the reference photon number is doubled (N -> 2 N),
    i.e. both arms' phase-sensing flux counts toward the classical resource.
    The flag used must be echoed wherever the value is reported.
    """
    if phase_sensing_flux_n <= 0.0:
        raise ValueError(f"flux must be > 0, got {phase_sensing_flux_n}")
    base = 1.0 / math.sqrt(phase_sensing_flux_n)
    return base / math.sqrt(2.0) if two_arm else base


def hl(phase_sensing_flux_n: float) -> float:
    """Heisenberg limit 1/N."""
    if phase_sensing_flux_n <= 0.0:
        raise ValueError(f"flux must be > 0, got {phase_sensing_flux_n}")
    return 1.0 / phase_sensing_flux_n


def qcrb(probe_amplitude_sq: float, squeezing_r: float) -> float:
    """Cramer-Rao bound 1/sqrt(F_Q) for a pure displaced squeezed probe.

    F_Q = 4 Var(n) = 4 (alpha^2 e^{2r} + sinh^2(2r)/2) under the photon-number
    generator, with the displacement along the antisqueezed quadrature.
    """
    if probe_amplitude_sq < 0.0:
        raise ValueError("probe amplitude squared must be >= 0")
    if squeezing_r < 0.0:
        raise ValueError("squeezing parameter must be >= 0")
    fisher = 4.0 * (
        probe_amplitude_sq * math.exp(2.0 * squeezing_r)
        + 0.5 * math.sinh(2.0 * squeezing_r) ** 2
    )
    if fisher == 0.0:
        raise ValueError("vacuum probe carries no phase information")
    return 1.0 / math.sqrt(fisher)


@dataclass(frozen=True)
class SpectralPoint:
    """Phase spectral density at one analysis frequency.

    ``phi_min`` does not depend on the analysis frequency; the frequency is
    carried as metadata only.
    """

    analysis_frequency_omega: float
    phi_min: float


def min_detectable_phase_spectral(
    squeezing_r: float,
    actual_power_gain: float,
    input_power_watts: float,
    wavelength: float,
    analysis_frequency_omega: float = 0.0,
) -> SpectralPoint:
    """Minimum detectable phase per root hertz,

        phi_min = sqrt(4 h c e^{-2r} / (lambda G' P_in)),

    where G' is the measured power gain of the input light.  At r = 0 this
    equals 2/sqrt(flux) with flux = lambda G' P_in / (h c).
    """
    if squeezing_r < 0.0:
        raise ValueError("squeezing parameter must be >= 0")
    if actual_power_gain <= 0.0 or input_power_watts <= 0.0 or wavelength <= 0.0:
        raise ValueError("gain, power and wavelength must all be positive")
    phi_min = math.sqrt(
        4.0
        * PLANCK_H
        * SPEED_OF_LIGHT
        * math.exp(-2.0 * squeezing_r)
        / (wavelength * actual_power_gain * input_power_watts)
    )
    return SpectralPoint(analysis_frequency_omega, phi_min)


def db_rel(value: float, reference: float) -> float:
    """Power-convention decibels, 10 log10(value / reference)."""
    if value <= 0.0 or reference <= 0.0:
        raise ValueError("dB ratio needs positive value and reference")
    return 10.0 * math.log10(value / reference)


def db_rel_amplitude(value: float, reference: float) -> float:
    """Amplitude-convention decibels, 20 log10(value / reference)."""
    if value <= 0.0 or reference <= 0.0:
        raise ValueError("dB ratio needs positive value and reference")
    return 20.0 * math.log10(value / reference)

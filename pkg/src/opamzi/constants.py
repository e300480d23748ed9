"""Physical constants (CODATA exact values)."""

PLANCK_H = 6.62607015e-34  # J s
SPEED_OF_LIGHT = 299792458.0  # m / s


def photon_flux_from_power(power_watts: float, wavelength_m: float) -> float:
    """Photon flux (s^-1) carried by an optical beam of the given power."""
    return wavelength_m * power_watts / (PLANCK_H * SPEED_OF_LIGHT)


def power_from_photon_flux(flux_per_s: float, wavelength_m: float) -> float:
    """Optical power (W) of a beam with the given photon flux."""
    return flux_per_s * PLANCK_H * SPEED_OF_LIGHT / wavelength_m

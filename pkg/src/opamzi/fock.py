"""Brute-force validation engine in a truncated photon-number basis.

Everything here is built from explicit operator matrices and numerical matrix
exponentials of the quadratic generators, deliberately sharing no algebra with
the Gaussian engine it cross-checks.  Loss is realised by coupling the mode to
an explicit ancilla vacuum through a beam splitter; the ancilla stays in the
(pure) global state, so later moments of the system modes are automatically
those of the reduced state.

Small-regime guards keep the truncation honest: the population of the top Fock
level of every mode must stay below 1e-8, coherent seeds are limited to
alpha^2 <= 9 and squeezing to r <= 0.6.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .gaussian import QuadratureStats
from .interferometer import (
    ArmLossElement,
    BeamSplitterElement,
    ChainElement,
    CoherentInputElement,
    DetectionLossElement,
    OpaElement,
    PhaseShiftElement,
)
from .params import OpaParams

_NORM_TOL = 1e-10
_TOP_LEVEL_TOL = 1e-8
_MAX_MODES = 4
_MAX_COHERENT_ALPHA_SQ = 9.0
_MAX_SQUEEZING_R = 0.6
DEFAULT_CUTOFF = 40
RETRY_CUTOFF = 60


class TruncationError(Exception):
    """The photon-number cutoff is too small for the requested state."""


class RangeError(ValueError):
    """Parameters outside the validated small regime of the oracle."""


@dataclass(frozen=True)
class FockState:
    n_modes: int
    cutoff: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_modes < 1 or self.n_modes > _MAX_MODES:
            raise RangeError(f"oracle supports 1..{_MAX_MODES} modes, got {self.n_modes}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.cutoff**self.n_modes:
            raise ValueError(
                f"amplitude vector must have length {self.cutoff ** self.n_modes}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > _NORM_TOL:
            raise TruncationError(f"state norm {norm} deviates from 1 beyond 1e-10")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.cutoff,) * self.n_modes)


def _check_top_levels(tensor: np.ndarray, cutoff: int):
    for axis in range(tensor.ndim):
        pop = np.sum(np.abs(np.take(tensor, cutoff - 1, axis=axis)) ** 2)
        if pop >= _TOP_LEVEL_TOL:
            raise TruncationError(
                f"top Fock level of mode {axis} holds population {pop:.2e}"
            )


def _annihilation(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, cutoff)), k=1)


def fock_coherent(alpha_sq: float, cutoff: int, phase: float = 0.0) -> FockState:
    """Coherent state with Poissonian amplitudes e^{-a^2/2} alpha^n / sqrt(n!)."""
    if alpha_sq < 0.0:
        raise ValueError("alpha_sq must be >= 0")
    if alpha_sq > _MAX_COHERENT_ALPHA_SQ:
        raise RangeError(
            f"coherent seeds above alpha^2 = {_MAX_COHERENT_ALPHA_SQ} are outside "
            "the validated truncation regime"
        )
    alpha = math.sqrt(alpha_sq) * np.exp(1j * phase)
    n = np.arange(cutoff)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1.0, cutoff)))))
    amps = np.exp(-alpha_sq / 2.0 - 0.5 * log_fact) * alpha**n
    state = FockState(1, cutoff, amps)  # norm guard rejects inadequate cutoffs
    _check_top_levels(state.tensor(), cutoff)
    return state


def _vacuum_tensor(n_modes: int, cutoff: int) -> np.ndarray:
    t = np.zeros((cutoff,) * n_modes, dtype=complex)
    t[(0,) * n_modes] = 1.0
    return t


def _apply_single_mode(tensor: np.ndarray, op: np.ndarray, axis: int) -> np.ndarray:
    out = np.tensordot(op, tensor, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def _apply_two_mode(tensor: np.ndarray, op: np.ndarray, axis_a: int, axis_b: int) -> np.ndarray:
    c = tensor.shape[axis_a]
    t = np.moveaxis(tensor, (axis_a, axis_b), (0, 1))
    flat = t.reshape(c * c, -1)
    flat = op @ flat
    t = flat.reshape(t.shape)
    return np.moveaxis(t, (0, 1), (axis_a, axis_b))


@lru_cache(maxsize=16)
def _bs_unitary(cutoff: int, transmissivity: float) -> np.ndarray:
    """exp(theta (a†b - b†a)) with cos(theta) = sqrt(T), as a dense two-mode
    matrix, exponentiated per total-photon-number sector (the generator never
    changes n_a + n_b, so the blocks are exact)."""
    theta = math.acos(math.sqrt(transmissivity))
    u = np.zeros((cutoff * cutoff, cutoff * cutoff))
    for total in range(2 * cutoff - 1):
        na_lo = max(0, total - (cutoff - 1))
        na_hi = min(total, cutoff - 1)
        idx = [na * cutoff + (total - na) for na in range(na_lo, na_hi + 1)]
        d = len(idx)
        gen = np.zeros((d, d))
        for i, na in enumerate(range(na_lo, na_hi)):
            nb = total - na
            coupling = theta * math.sqrt((na + 1) * nb)
            gen[i + 1, i] = coupling
            gen[i, i + 1] = -coupling
        u[np.ix_(idx, idx)] = expm(gen) if d > 1 else 1.0
    return u


def _opa_unitary(cutoff: int, opa: OpaParams) -> np.ndarray:
    r = opa.squeezing_r
    if r > _MAX_SQUEEZING_R:
        raise RangeError(
            f"squeezing r = {r:.3f} exceeds the oracle's reliable range "
            f"(r <= {_MAX_SQUEEZING_R})"
        )
    a = _annihilation(cutoff)
    gen = 0.5 * r * ((a @ a).T - a @ a)  # (r/2)(a†² - a²)
    u = expm(gen).astype(complex)
    if opa.pump_quadrature != 0.0:
        p = _phase_unitary(cutoff, opa.pump_quadrature)
        u = p @ u @ p.conj().T
    return u


def _phase_unitary(cutoff: int, phi: float) -> np.ndarray:
    return np.diag(np.exp(1j * phi * np.arange(cutoff)))


def _with_ancilla(state: FockState) -> FockState:
    if state.n_modes + 1 > _MAX_MODES:
        raise RangeError("adding a loss ancilla would exceed the mode budget")
    t = np.zeros(state.tensor().shape + (state.cutoff,), dtype=complex)
    t[..., 0] = state.tensor()
    return FockState(state.n_modes + 1, state.cutoff, t.reshape(-1))


def _loss_via_ancilla(state: FockState, mode: int, efficiency: float) -> FockState:
    state = _with_ancilla(state)
    u = _bs_unitary(state.cutoff, efficiency)
    t = _apply_two_mode(state.tensor(), u, mode, state.n_modes - 1)
    return FockState(state.n_modes, state.cutoff, t.reshape(-1))


def fock_apply_element(state: FockState, element: ChainElement) -> FockState:
    """Apply one chain element exactly in the truncated basis.

    Unitary elements preserve the norm; loss couples the mode to a fresh
    ancilla vacuum (which remains part of the state).
    """
    c = state.cutoff
    t = state.tensor()
    if isinstance(element, BeamSplitterElement):
        t = _apply_two_mode(t, _bs_unitary(c, element.transmissivity), element.mode_a, element.mode_b)
        out = FockState(state.n_modes, c, t.reshape(-1))
    elif isinstance(element, PhaseShiftElement):
        t = _apply_single_mode(t, _phase_unitary(c, element.bias), element.mode)
        out = FockState(state.n_modes, c, t.reshape(-1))
    elif isinstance(element, OpaElement):
        t = _apply_single_mode(t, _opa_unitary(c, element.params), element.mode)
        out = FockState(state.n_modes, c, t.reshape(-1))
    elif isinstance(element, DetectionLossElement):
        out = _loss_via_ancilla(state, element.mode, element.efficiency)
    elif isinstance(element, ArmLossElement):
        out = _loss_via_ancilla(state, 0, element.efficiency)
        out = _loss_via_ancilla(out, 1, element.efficiency)
    else:
        raise TypeError(f"oracle cannot apply element {element!r}")
    _check_top_levels(out.tensor(), c)
    return out


def _mode_expectation(state: FockState, op: np.ndarray, mode: int) -> complex:
    t = state.tensor()
    return complex(np.vdot(t, _apply_single_mode(t, op, mode)))


def fock_mode_moments(state: FockState, mode: int) -> tuple[complex, complex, float]:
    """(<a>, <a^2>, <a†a>) of one mode."""
    a = _annihilation(state.cutoff).astype(complex)
    mean_a = _mode_expectation(state, a, mode)
    mean_aa = _mode_expectation(state, a @ a, mode)
    mean_n = _mode_expectation(state, a.conj().T @ a, mode).real
    return mean_a, mean_aa, mean_n


def fock_mean_photon(state: FockState, mode: int) -> float:
    return fock_mode_moments(state, mode)[2]


def fock_homodyne_moments(state: FockState, mode: int, angle: float) -> QuadratureStats:
    """Quadrature mean and variance from the <a>, <a^2>, <a†a> matrix elements."""
    mean_a, mean_aa, mean_n = fock_mode_moments(state, mode)
    rot = np.exp(-1j * angle)
    mean = 2.0 * (rot * mean_a).real
    second = 2.0 * (rot * rot * mean_aa).real + 2.0 * mean_n + 1.0
    return QuadratureStats(mean, second - mean * mean, angle)


@dataclass(frozen=True)
class EngineComparison:
    """Dark-port statistics of the same chain from both engines."""

    mean_gaussian: float
    mean_fock: float
    variance_gaussian: float
    variance_fock: float
    photons_gaussian: float
    photons_fock: float

    @property
    def max_abs_diff(self) -> float:
        return max(
            abs(self.mean_gaussian - self.mean_fock),
            abs(self.variance_gaussian - self.variance_fock),
            abs(self.photons_gaussian - self.photons_fock),
        )


def dark_port_comparison(
    elements: tuple[ChainElement, ...],
    quadrature_angle: float = math.pi / 2,
    cutoff: int = DEFAULT_CUTOFF,
) -> EngineComparison:
    """Run one chain through both engines and collect dark-port moments."""
    from .gaussian import homodyne_stats, mean_photon_number
    from .interferometer import DARK_PORT, propagate

    g_state = propagate(elements)
    g_stats = homodyne_stats(g_state, DARK_PORT, quadrature_angle)
    f_state = run_chain_fock(elements, cutoff)
    f_stats = fock_homodyne_moments(f_state, DARK_PORT, quadrature_angle)
    return EngineComparison(
        mean_gaussian=g_stats.mean,
        mean_fock=f_stats.mean,
        variance_gaussian=g_stats.variance,
        variance_fock=f_stats.variance,
        photons_gaussian=mean_photon_number(g_state, DARK_PORT),
        photons_fock=fock_mean_photon(f_state, DARK_PORT),
    )


def run_chain_fock(
    elements: tuple[ChainElement, ...],
    cutoff: int = DEFAULT_CUTOFF,
    retry_cutoff: int | None = RETRY_CUTOFF,
) -> FockState:
    """Propagate a whole interferometer chain; on a truncation failure the run
    is retried once at the larger cutoff."""
    try:
        return _run_chain(elements, cutoff)
    except TruncationError:
        if retry_cutoff is None or retry_cutoff <= cutoff:
            raise
        return _run_chain(elements, retry_cutoff)


def _run_chain(elements: tuple[ChainElement, ...], cutoff: int) -> FockState:
    if not elements or not isinstance(elements[0], CoherentInputElement):
        raise ValueError("chain must start with a coherent input element")
    seed = elements[0]
    one = fock_coherent(seed.seed_flux, cutoff, seed.phase)
    t = np.multiply.outer(one.tensor(), _vacuum_tensor(1, cutoff))
    state = FockState(2, cutoff, t.reshape(-1))
    for el in elements[1:]:
        state = fock_apply_element(state, el)
        norm = np.linalg.norm(state.amplitudes)
        if abs(norm - 1.0) > _NORM_TOL:
            raise TruncationError(f"norm drifted to {norm} during the chain")
    return state

"""Sweep execution, spectrum-trace synthesis and deterministic table output."""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import bounds
from .configio import SweepSpec, TraceSpec
from .gaussian import homodyne_stats
from .interferometer import (
    DARK_PORT,
    DegenerateSlopeError,
    SensitivityReport,
    build_chain,
    propagate,
    seed_flux_for_phase_sensing_flux,
    simulate_interferometer,
)
from .params import GainSpec, InterferometerConfig, config_replace

SWEEP_COLUMNS = (
    "sweep_variable",
    "value",
    "delta_phi_rad",
    "delta_phi_snl_rad",
    "delta_phi_hl_rad",
    "delta_phi_qcrb_rad",
    "noise_rel_snl_db",
    "snr_improvement_db",
    "phase_sensing_flux_per_s",
)

TRACE_COLUMNS = ("x", "level_db", "snl_db")

_REPORT_COLUMN_FOR = {
    "delta_phi": "delta_phi_rad",
    "delta_phi_snl": "delta_phi_snl_rad",
    "delta_phi_hl": "delta_phi_hl_rad",
    "delta_phi_qcrb": "delta_phi_qcrb_rad",
    "phase_sensing_flux": "phase_sensing_flux_per_s",
    "noise_rel_snl_db": "noise_rel_snl_db",
    "snr_improvement_db": "snr_improvement_db",
    "spectral_density": "spectral_density_per_sqrt_hz",
    "spectral_density_snl": "spectral_density_snl_per_sqrt_hz",
}


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]


def grid_values(spec: SweepSpec) -> np.ndarray:
    if spec.scale == "log":
        return np.geomspace(spec.start, spec.stop, spec.points)
    return np.linspace(spec.start, spec.stop, spec.points)


def config_at(spec: SweepSpec, value: float) -> InterferometerConfig:
    """Fixed baseline with the swept variable replaced by ``value``."""
    base = spec.fixed
    if spec.variable == "gain":
        return config_replace(base, gain=GainSpec(value, base.gain.convention))
    if spec.variable == "input_power":
        return config_replace(base, input_power_watts=value)
    if spec.variable == "efficiency":
        return config_replace(
            base, losses=replace(base.losses, detection_efficiency_eta=value)
        )
    if spec.variable == "phase_sensing_flux":
        seed = seed_flux_for_phase_sensing_flux(base.opa, value)
        return config_replace(base, input_flux_alpha_in_sq=2.0 * seed)
    raise ValueError(f"unknown sweep variable '{spec.variable}'")  # pragma: no cover


def _sweep_row(spec: SweepSpec, value: float) -> tuple:
    nan = float("nan")
    try:
        report = simulate_interferometer(config_at(spec, value))
    except (ValueError, DegenerateSlopeError) as exc:
        row = [spec.variable, value] + [nan] * (len(SWEEP_COLUMNS) - 2)
        row.append(f"error: {exc}")
        row.extend(nan for _ in spec.outputs)
        return tuple(row)
    row = [
        spec.variable,
        value,
        report.delta_phi,
        report.delta_phi_snl,
        report.delta_phi_hl,
        report.delta_phi_qcrb,
        report.noise_rel_snl_db,
        report.snr_improvement_db,
        report.phase_sensing_flux,
        "ok",
    ]
    row.extend(getattr(report, name) for name in spec.outputs)
    return tuple(row)


def run_sweep(spec: SweepSpec, workers: int = 1) -> Table:
    """Evaluate the sweep grid; failed points become flagged rows, the sweep
    itself never aborts.  Rows keep grid order regardless of worker count."""
    values = grid_values(spec)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda v: _sweep_row(spec, v), values))
    else:
        rows = [_sweep_row(spec, v) for v in values]
    columns = SWEEP_COLUMNS + ("status",) + tuple(
        _REPORT_COLUMN_FOR[name] for name in spec.outputs
    )
    return Table(columns, tuple(rows))


def report_table(report: SensitivityReport) -> Table:
    columns = tuple(_REPORT_COLUMN_FOR[name] for name in _REPORT_COLUMN_FOR)
    row = tuple(getattr(report, name) for name in _REPORT_COLUMN_FOR)
    columns += ("gain_convention", "snl_two_arm")
    row += (report.gain_convention, str(report.snl_two_arm).lower())
    return Table(columns, (row,))


def bounds_table(config: InterferometerConfig) -> Table:
    """Reference limits for a config, without running the simulation."""
    opa = config.opa
    i_ps = 0.5 * opa.amplified_scale**2 * config.seed_flux + opa.amp_gain_g**2
    coherent_part = i_ps - opa.amp_gain_g**2
    amplified_flux = opa.amplified_scale**2 * config.seed_flux
    columns = (
        "phase_sensing_flux_per_s",
        "delta_phi_snl_rad",
        "delta_phi_snl_two_arm_rad",
        "delta_phi_hl_rad",
        "delta_phi_qcrb_rad",
        "spectral_density_snl_per_sqrt_hz",
    )
    row = (
        i_ps,
        bounds.snl(i_ps),
        bounds.snl(i_ps, two_arm=True),
        bounds.hl(i_ps),
        bounds.qcrb(coherent_part, opa.squeezing_r),
        2.0 / math.sqrt(amplified_flux),
    )
    return Table(columns, (row,))


def synthesize_trace(spec: TraceSpec, seed: int | None = None) -> Table:
    """Synthetic analyzer trace: dark-port noise floor in dB relative to shot
    noise, a modulation peak of height equal to the small-signal SNR, and the
    0 dB shot-noise reference line.

    With ``span = 0`` the x column is the sample index (zero-span, time-like
    display); otherwise it is absolute frequency in Hz across the span.
    Deterministic unless a jitter seed is given.
    """
    config = spec.noise_floor_source
    report = simulate_interferometer(config)
    floor_lin = 10.0 ** (report.noise_rel_snl_db / 10.0)

    # small-signal power SNR of the phase modulation against the dark-port noise
    state = propagate(build_chain(config))
    var = homodyne_stats(state, DARK_PORT, math.pi / 2).variance
    slope = math.sqrt(var) / report.delta_phi
    snr_lin = (slope * config.modulation_delta) ** 2 / var

    if spec.span > 0.0:
        x = np.linspace(
            spec.center_frequency - spec.span / 2.0,
            spec.center_frequency + spec.span / 2.0,
            spec.points,
        )
        sigma = spec.rbw / (2.0 * math.sqrt(2.0 * math.log(2.0)))  # FWHM = rbw
        shape = np.exp(-0.5 * ((x - spec.signal_frequency) / sigma) ** 2)
    else:
        x = np.arange(spec.points, dtype=float)
        detuning = spec.center_frequency - spec.signal_frequency
        sigma = spec.rbw / (2.0 * math.sqrt(2.0 * math.log(2.0)))
        shape = np.full(spec.points, math.exp(-0.5 * (detuning / sigma) ** 2))

    level_db = 10.0 * np.log10(floor_lin * (1.0 + snr_lin * shape))
    snl_db = np.zeros(spec.points)
    if seed is not None:
        rng = np.random.default_rng(seed)
        level_db = level_db + rng.normal(0.0, 0.15, spec.points)
        snl_db = snl_db + rng.normal(0.0, 0.15, spec.points)

    rows = tuple(
        (float(xi), float(li), float(si)) for xi, li, si in zip(x, level_db, snl_db)
    )
    return Table(TRACE_COLUMNS, rows)


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".12e")


def emit(table: Table, fmt: str = "csv", destination: str | None = None) -> None:
    """Write a table as CSV (RFC 4180, >= 9 significant digits) or JSON.

    ``destination`` is a path, or None / ``-`` for stdout.  Identical tables
    produce byte-identical files.
    """
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([_format_cell(v) for v in row])
        payload = buf.getvalue()
    elif fmt == "json":
        records = [
            {col: (v if isinstance(v, (str, int)) else float(v)) for col, v in zip(table.columns, row)}
            for row in table.rows
        ]
        payload = json.dumps(records, indent=2) + "\n"
    else:
        raise ValueError(f"unknown output format '{fmt}'")

    if destination is None or destination == "-":
        sys.stdout.write(payload)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
    except OSError as exc:
        raise OSError(f"cannot write '{destination}': {exc}") from exc

"""Flat ``key = value`` config files for runs, sweeps and traces.

Format rules:

* one ``key = value`` pair per line, ``#`` starts a comment, blank lines ok;
* every physical quantity carries an explicit unit suffix
  (``W mW uW nW``, ``m um nm``, ``rad mrad``, ``Hz kHz MHz GHz``, ``per_s``,
  ``frac`` for dimensionless fractions, ``dB``) -- a bare number is a parse
  error;
* the gain value carries its convention token: ``G`` (amplitude gain),
  ``G2`` (intensity gain G^2) or ``PSP`` (seed power gain (G+g)^2);
* unknown keys are errors, so misspellings never fall back to defaults.

A file is a sweep when it has ``sweep_variable``, a trace when it has
``center_frequency``, and otherwise a plain interferometer config.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .params import (
    GainConvention,
    GainSpec,
    InterferometerConfig,
    LossBudget,
)

SWEEP_VARIABLES = ("gain", "phase_sensing_flux", "input_power", "efficiency")

REPORT_FIELDS = (
    "delta_phi",
    "delta_phi_snl",
    "delta_phi_hl",
    "delta_phi_qcrb",
    "phase_sensing_flux",
    "noise_rel_snl_db",
    "snr_improvement_db",
    "spectral_density",
    "spectral_density_snl",
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(ValueError):
    pass


# unit token -> (dimension, scale to base unit)
_UNITS = {
    "W": ("power", 1.0),
    "mW": ("power", 1e-3),
    "uW": ("power", 1e-6),
    "nW": ("power", 1e-9),
    "m": ("length", 1.0),
    "um": ("length", 1e-6),
    "nm": ("length", 1e-9),
    "rad": ("angle", 1.0),
    "mrad": ("angle", 1e-3),
    "Hz": ("frequency", 1.0),
    "kHz": ("frequency", 1e3),
    "MHz": ("frequency", 1e6),
    "GHz": ("frequency", 1e9),
    "per_s": ("flux", 1.0),
    "frac": ("fraction", 1.0),
    "dB": ("decibel", 1.0),
}

_GAIN_TOKENS = {
    "G": GainConvention.AMPLITUDE_G,
    "G2": GainConvention.INTENSITY_G2,
    "PSP": GainConvention.PHASE_SENSITIVE_POWER,
}
_GAIN_TOKEN_FOR = {v: k for k, v in _GAIN_TOKENS.items()}

# key -> expected dimension
_CONFIG_QUANTITIES = {
    "input_power": "power",
    "input_flux": "flux",
    "wavelength": "length",
    "bias_phase": "angle",
    "modulation_delta": "angle",
    "internal_loss": "fraction",
    "detection_efficiency": "fraction",
    "homodyne_visibility": "fraction",
    "external_loss": "decibel",
}
_CONFIG_KEYS = set(_CONFIG_QUANTITIES) | {"gain"}
_SWEEP_ONLY_KEYS = {"sweep_variable", "start", "stop", "points", "scale", "outputs"}
_TRACE_QUANTITIES = {
    "center_frequency": "frequency",
    "span": "frequency",
    "rbw": "frequency",
    "signal_frequency": "frequency",
}
_TRACE_ONLY_KEYS = set(_TRACE_QUANTITIES) | {"points"}

_SWEEP_VARIABLE_DIMENSION = {
    "phase_sensing_flux": "flux",
    "input_power": "power",
    "efficiency": "fraction",
}


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    points: int
    scale: str
    fixed: InterferometerConfig
    outputs: tuple[str, ...] = ()

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValidationError(
                f"sweep_variable must be one of {', '.join(SWEEP_VARIABLES)}; "
                f"got '{self.variable}'"
            )
        if self.points < 2:
            raise ValidationError(f"a sweep needs points >= 2, got {self.points}")
        if not self.start < self.stop:
            raise ValidationError(
                f"sweep range must have start < stop, got [{self.start}, {self.stop}]"
            )
        if self.scale not in ("linear", "log"):
            raise ValidationError(f"scale must be 'linear' or 'log', got '{self.scale}'")
        if self.scale == "log" and self.start <= 0.0:
            raise ValidationError("log scale requires start > 0")
        for name in self.outputs:
            if name not in REPORT_FIELDS:
                raise ValidationError(
                    f"unknown output field '{name}'; known fields: "
                    f"{', '.join(REPORT_FIELDS)}"
                )


@dataclass(frozen=True)
class TraceSpec:
    center_frequency: float
    span: float
    rbw: float
    points: int
    signal_frequency: float
    noise_floor_source: InterferometerConfig

    def __post_init__(self):
        if self.rbw <= 0.0:
            raise ValidationError(f"rbw must be > 0, got {self.rbw}")
        if self.span < 0.0:
            raise ValidationError(f"span must be >= 0, got {self.span}")
        if self.points < 2:
            raise ValidationError(f"a trace needs points >= 2, got {self.points}")
        if self.span > 0.0:
            lo = self.center_frequency - self.span / 2.0
            hi = self.center_frequency + self.span / 2.0
            if not lo <= self.signal_frequency <= hi:
                raise ValidationError(
                    f"signal_frequency {self.signal_frequency} Hz lies outside the "
                    f"displayed span [{lo}, {hi}] Hz"
                )


@dataclass
class _RawValue:
    text: str
    line: int
    column: int


def _scan(text: str) -> dict[str, _RawValue]:
    pairs: dict[str, _RawValue] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, len(line) - len(line.lstrip()) + 1)
        key_part, value_part = line.split("=", 1)
        key = key_part.strip()
        value = value_part.strip()
        if not key:
            raise ParseError("missing key before '='", lineno, 1)
        if not value:
            raise ParseError(f"missing value for '{key}'", lineno, line.index("=") + 2)
        if key in pairs:
            raise ValidationError(f"duplicate key '{key}' (line {lineno})")
        pairs[key] = _RawValue(value, lineno, line.index(value_part.strip()) + 1)
    return pairs


def _parse_number(raw: _RawValue, token: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"'{token}' is not a number", raw.line, raw.column) from None


def _parse_quantity(key: str, raw: _RawValue, dimension: str) -> float:
    tokens = raw.text.split()
    if len(tokens) == 1:
        raise ParseError(
            f"'{key}' needs a unit suffix (a bare number is not accepted)",
            raw.line,
            raw.column,
        )
    if len(tokens) != 2:
        raise ParseError(f"expected '<number> <unit>' for '{key}'", raw.line, raw.column)
    value = _parse_number(raw, tokens[0])
    unit = tokens[1]
    if unit not in _UNITS:
        raise ParseError(f"unknown unit '{unit}'", raw.line, raw.column)
    got_dim, scale = _UNITS[unit]
    if got_dim != dimension:
        expected = ", ".join(u for u, (d, _) in _UNITS.items() if d == dimension)
        raise ValidationError(
            f"'{key}' expects a {dimension} unit ({expected}), got '{unit}'"
        )
    return value * scale


def _parse_gain(raw: _RawValue) -> GainSpec:
    tokens = raw.text.split()
    if len(tokens) == 1:
        raise ValidationError(
            "gain needs its convention token: 'G' (amplitude gain G), "
            "'G2' (intensity gain G^2) or 'PSP' (seed power gain (G+g)^2)"
        )
    if len(tokens) != 2:
        raise ParseError("expected '<number> <G|G2|PSP>' for 'gain'", raw.line, raw.column)
    value = _parse_number(raw, tokens[0])
    if tokens[1] not in _GAIN_TOKENS:
        raise ValidationError(
            f"unknown gain convention '{tokens[1]}'; use 'G' (amplitude gain G), "
            "'G2' (intensity gain G^2) or 'PSP' (seed power gain (G+g)^2)"
        )
    return GainSpec(value, _GAIN_TOKENS[tokens[1]])


def _parse_int(key: str, raw: _RawValue) -> int:
    tokens = raw.text.split()
    if len(tokens) != 1:
        raise ParseError(f"'{key}' is a bare integer count", raw.line, raw.column)
    try:
        return int(tokens[0])
    except ValueError:
        raise ParseError(f"'{tokens[0]}' is not an integer", raw.line, raw.column) from None


def _parse_word(key: str, raw: _RawValue, allowed: tuple[str, ...]) -> str:
    word = raw.text.strip()
    if word not in allowed:
        raise ValidationError(f"'{key}' must be one of {', '.join(allowed)}; got '{word}'")
    return word


def _build_config(pairs: dict[str, _RawValue]) -> InterferometerConfig:
    if "gain" not in pairs:
        raise ValidationError("missing required key 'gain'")
    if "wavelength" not in pairs:
        raise ValidationError("missing required key 'wavelength'")
    has_flux = "input_flux" in pairs
    has_power = "input_power" in pairs
    if has_flux == has_power:
        raise ValidationError("give exactly one of 'input_flux' and 'input_power'")

    def quantity(key: str, default: float | None = None) -> float | None:
        if key not in pairs:
            return default
        return _parse_quantity(key, pairs[key], _CONFIG_QUANTITIES[key])

    gain = _parse_gain(pairs["gain"])
    wavelength = quantity("wavelength")
    if wavelength <= 0.0:
        raise ValidationError(f"wavelength must be positive, got {wavelength} m")
    losses = LossBudget(
        internal_loss_L0=quantity("internal_loss", 0.0),
        detection_efficiency_eta=quantity("detection_efficiency", 1.0),
        homodyne_visibility=quantity("homodyne_visibility", 1.0),
        external_loss_db=quantity("external_loss", 0.0),
    )
    kwargs = dict(
        wavelength_lambda=wavelength,
        gain=gain,
        bias_phase=quantity("bias_phase", math.pi),
        modulation_delta=quantity("modulation_delta", 1e-6),
        losses=losses,
    )
    if has_flux:
        kwargs["input_flux_alpha_in_sq"] = quantity("input_flux")
    else:
        kwargs["input_power_watts"] = quantity("input_power")
    try:
        return InterferometerConfig(**kwargs)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _check_keys(pairs: dict[str, _RawValue], allowed: set[str], kind: str):
    unknown = [k for k in pairs if k not in allowed]
    if unknown:
        raise ValidationError(
            f"unknown key(s) for a {kind}: {', '.join(sorted(unknown))}"
        )


def parse_config(text: str) -> InterferometerConfig | SweepSpec | TraceSpec:
    """Parse a config file body into the object its keys describe."""
    pairs = _scan(text)
    if "sweep_variable" in pairs:
        return _build_sweep(pairs)
    if "center_frequency" in pairs:
        return _build_trace(pairs)
    _check_keys(pairs, _CONFIG_KEYS, "config")
    return _build_config(pairs)


def _build_sweep(pairs: dict[str, _RawValue]) -> SweepSpec:
    _check_keys(pairs, _CONFIG_KEYS | _SWEEP_ONLY_KEYS, "sweep")
    variable = _parse_word("sweep_variable", pairs["sweep_variable"], SWEEP_VARIABLES)
    for key in ("start", "stop", "points"):
        if key not in pairs:
            raise ValidationError(f"missing required sweep key '{key}'")
    fixed = _build_config({k: v for k, v in pairs.items() if k in _CONFIG_KEYS})
    if variable == "gain":
        start_spec = _parse_gain(pairs["start"])
        stop_spec = _parse_gain(pairs["stop"])
        if not (start_spec.convention == stop_spec.convention == fixed.gain.convention):
            raise ValidationError(
                "gain sweep endpoints must use the same convention as the "
                "fixed config's gain"
            )
        start, stop = start_spec.value, stop_spec.value
    else:
        dim = _SWEEP_VARIABLE_DIMENSION[variable]
        start = _parse_quantity("start", pairs["start"], dim)
        stop = _parse_quantity("stop", pairs["stop"], dim)
    outputs: tuple[str, ...] = ()
    if "outputs" in pairs:
        outputs = tuple(w.strip() for w in pairs["outputs"].text.split(",") if w.strip())
    scale = "linear"
    if "scale" in pairs:
        scale = _parse_word("scale", pairs["scale"], ("linear", "log"))
    return SweepSpec(
        variable=variable,
        start=start,
        stop=stop,
        points=_parse_int("points", pairs["points"]),
        scale=scale,
        fixed=fixed,
        outputs=outputs,
    )


def _build_trace(pairs: dict[str, _RawValue]) -> TraceSpec:
    _check_keys(pairs, _CONFIG_KEYS | _TRACE_ONLY_KEYS, "trace")
    for key in _TRACE_ONLY_KEYS:
        if key not in pairs:
            raise ValidationError(f"missing required trace key '{key}'")
    fixed = _build_config({k: v for k, v in pairs.items() if k in _CONFIG_KEYS})
    return TraceSpec(
        center_frequency=_parse_quantity("center_frequency", pairs["center_frequency"], "frequency"),
        span=_parse_quantity("span", pairs["span"], "frequency"),
        rbw=_parse_quantity("rbw", pairs["rbw"], "frequency"),
        points=_parse_int("points", pairs["points"]),
        signal_frequency=_parse_quantity("signal_frequency", pairs["signal_frequency"], "frequency"),
        noise_floor_source=fixed,
    )


def render_config(config: InterferometerConfig) -> str:
    """Render a config back to the file format; parse(render(c)) == c."""
    lines = []
    if config.input_given == "power":
        lines.append(f"input_power = {config.input_power_watts!r} W")
    else:
        lines.append(f"input_flux = {config.input_flux_alpha_in_sq!r} per_s")
    lines.append(f"wavelength = {config.wavelength_lambda!r} m")
    token = _GAIN_TOKEN_FOR[config.gain.convention]
    lines.append(f"gain = {config.gain.value!r} {token}")
    lines.append(f"bias_phase = {config.bias_phase!r} rad")
    lines.append(f"modulation_delta = {config.modulation_delta!r} rad")
    lines.append(f"internal_loss = {config.losses.internal_loss_L0!r} frac")
    lines.append(f"detection_efficiency = {config.losses.detection_efficiency_eta!r} frac")
    lines.append(f"homodyne_visibility = {config.losses.homodyne_visibility!r} frac")
    lines.append(f"external_loss = {config.losses.external_loss_db!r} dB")
    return "\n".join(lines) + "\n"

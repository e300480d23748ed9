"""opamzi: Gaussian-state simulation and analysis of a Mach-Zehnder
interferometer with an optical parametric amplifier in each arm."""

from .bounds import (
    SpectralPoint,
    db_rel,
    db_rel_amplitude,
    hl,
    min_detectable_phase_spectral,
    qcrb,
    snl,
)
from .configio import (
    ParseError,
    SweepSpec,
    TraceSpec,
    ValidationError,
    parse_config,
    render_config,
)
from .fock import (
    EngineComparison,
    FockState,
    RangeError,
    TruncationError,
    dark_port_comparison,
    fock_apply_element,
    fock_coherent,
    fock_homodyne_moments,
    fock_mean_photon,
    run_chain_fock,
)
from .gaussian import (
    GaussianState,
    QuadratureStats,
    apply_beam_splitter,
    apply_loss,
    apply_opa,
    apply_phase_shift,
    coherent_state,
    homodyne_stats,
    mean_photon_number,
    total_photon_number,
    vacuum_state,
)
from .interferometer import (
    BRIGHT_PORT,
    DARK_PORT,
    DegenerateSlopeError,
    SensitivityReport,
    build_chain,
    calibrate_total_efficiency,
    enhancement_factor,
    lossless_config,
    phase_sensing_flux,
    propagate,
    seed_flux_for_phase_sensing_flux,
    sensitivity_gain_db,
    sensitivity_lossless,
    simulate_interferometer,
    snr_improvement_db,
)
from .params import (
    GainConvention,
    GainSpec,
    InterferometerConfig,
    LossBudget,
    OpaParams,
    config_replace,
    gain_to_opa,
    opa_to_gain,
)
from .sweep import Table, bounds_table, emit, report_table, run_sweep, synthesize_trace

__all__ = [name for name in dir() if not name.startswith("_")]

"""Two-carrier Kerr interference channel with walk-off memory.

Building blocks: channel coefficients (:mod:`kerrfocus.params`),
interference-focusing ring constellations (:mod:`kerrfocus.focusing`), the
closed-form discrete-time channel (:mod:`kerrfocus.dt_model`), a waveform
oracle that validates it (:mod:`kerrfocus.ct_oracle`) and Monte-Carlo rate
estimation with slope fits (:mod:`kerrfocus.capacity`).
"""

from .params import (
    Coefficients,
    NonIntegerMemory,
    NonPositiveGvm,
    PhysicalParams,
    derive_coefficients,
    direct_coefficients,
)
from .focusing import (
    FrequencySet,
    InfeasiblePower,
    InvalidExplicitSet,
    RingConstellation,
    RingIndexSet,
    ZeroCoupling,
    build_constellation,
    default_phase_count,
    difference_set,
    ring_powers,
    select_rings,
)
from .dt_model import (
    ReceiverOutput,
    SymbolBlock,
    receiver_output_rows,
    rx1_noiseless,
    rx2_noiseless,
    simulate,
    u_factor,
    v1,
    v2,
)
from .ct_oracle import (
    GridTooShort,
    KeyMismatch,
    Waveform,
    build_waveform,
    compare,
    filter_and_sample,
    model_comparison,
    phi1_grid,
    phi2_grid,
    propagate,
    psi12m,
)
from .capacity import (
    DegenerateConstellation,
    GridDegenerate,
    MIEstimate,
    SweepConfig,
    SweepResult,
    amplitude_only_mi,
    log_density,
    mi_monte_carlo,
    prelog_fit,
    sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

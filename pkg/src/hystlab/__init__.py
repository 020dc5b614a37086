"""Forced oscillators with hysteretic damping: models, attractors, diagnostics.

The package covers two damping families. The complex-stiffness family
carries the loss in the spring term and lives naturally in complex state;
the sign-damping family applies a displacement-proportional force opposing
the velocity and stays real. On top of the model definitions sit closed
forms for the linear case, Fourier-series attractors for the nonlinear
complex-stiffness models, an adaptive integrator with blow-up and event
handling, response and escape-threshold sweeps, and basin-of-attraction
maps for the sign-damping cubic.
"""

from .models import (
    BISHOP_VARIANTS,
    REID_VARIANTS,
    VARIANTS,
    Forcing,
    InvalidModelError,
    ModelSpec,
    rhs_bishop,
    rhs_reid,
    sign,
)
from .linear import (
    ForcedSolution,
    FreeSolution,
    ResonanceError,
    TwoBranchSolution,
    free_constants,
    general_solution,
    linear_response,
    particular_amplitude,
)
from .fourier import (
    DEFAULT_TERMS,
    ConvergenceReport,
    FourierAttractor,
    ResonantDenominatorError,
    compute_attractor,
    convergence_report,
    cubic_coefficients,
    oracle_convolution,
    quadratic_coefficients,
)
from .integrate import (
    EventBufferError,
    IntegratorConfig,
    ModalState,
    StepSizeError,
    Trajectory,
    integrate,
    integrate_reid,
    measure_blowup_time,
    reid_dissipation,
    reid_energy,
    resolve_initial,
)
from .response import (
    BracketNotFoundError,
    EscapeResult,
    EscapeSearchConfig,
    MonotonicityError,
    ResponseCurve,
    ResponsePoint,
    critical_amplitude,
    default_omega_grid,
    escape_window,
    probe_escape,
    response_sweep,
)
from .basins import (
    LABEL_ESCAPED,
    LABEL_UNRESOLVED,
    AttractorClass,
    BasinGrid,
    ClassifyConfig,
    ClassifyResult,
    GridConfig,
    StroboscopicOrbit,
    build_basin,
    classify_period,
    confirm_stability,
    strobe_orbit,
)

__version__ = "0.1.0"

__all__ = [
    "BISHOP_VARIANTS",
    "REID_VARIANTS",
    "VARIANTS",
    "Forcing",
    "InvalidModelError",
    "ModelSpec",
    "rhs_bishop",
    "rhs_reid",
    "sign",
    "ForcedSolution",
    "FreeSolution",
    "ResonanceError",
    "TwoBranchSolution",
    "free_constants",
    "general_solution",
    "linear_response",
    "particular_amplitude",
    "DEFAULT_TERMS",
    "ConvergenceReport",
    "FourierAttractor",
    "ResonantDenominatorError",
    "compute_attractor",
    "convergence_report",
    "cubic_coefficients",
    "oracle_convolution",
    "quadratic_coefficients",
    "EventBufferError",
    "IntegratorConfig",
    "ModalState",
    "StepSizeError",
    "Trajectory",
    "integrate",
    "integrate_reid",
    "measure_blowup_time",
    "reid_dissipation",
    "reid_energy",
    "resolve_initial",
    "BracketNotFoundError",
    "EscapeResult",
    "EscapeSearchConfig",
    "MonotonicityError",
    "ResponseCurve",
    "ResponsePoint",
    "critical_amplitude",
    "default_omega_grid",
    "escape_window",
    "probe_escape",
    "response_sweep",
    "LABEL_ESCAPED",
    "LABEL_UNRESOLVED",
    "AttractorClass",
    "BasinGrid",
    "ClassifyConfig",
    "ClassifyResult",
    "GridConfig",
    "StroboscopicOrbit",
    "build_basin",
    "classify_period",
    "confirm_stability",
    "strobe_orbit",
    "__version__",
]

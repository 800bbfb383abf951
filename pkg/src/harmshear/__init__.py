"""Harmonic maps by shear construction, their eta-combinations, and checks on them."""

from .combine import (
    CombinationSpec,
    EtaBound,
    Mode,
    combine,
    combine_multi,
    combined_dilatation,
    eta_bound,
    herglotz_decomposition_check,
    herglotz_weights,
    lemma_identity_check,
    sharpness_witness,
)
from .criteria import (
    D_inverse,
    D_operator,
    check_local_univalence,
    convexity_upgrade,
    css_direction_check,
    default_candidates,
    royster_zeigler_check,
)
from .errors import (
    AccuracyError,
    DegenerateError,
    HarmshearError,
    InvalidBlendError,
    InvalidDilatationError,
    SingularCombinationError,
    SingularInputError,
    UsageError,
)
from .geometry import (
    BoundaryPolygon,
    boundary_polyline,
    direction_convexity_oracle,
    full_convexity_oracle,
    injectivity_winding_check,
    interior_probes,
    starlike_oracle,
    winding_number,
)
from .kernels import (
    BlendFamily,
    BlendParams,
    KernelParams,
    blend_p,
    blend_target,
    p_positive_real,
    phi_antiderivative,
    phi_series,
    psi,
    psi_series,
)
from .report import CheckReport, Grid, Verdict
from .series import (
    DEFAULT_ORDER,
    R_MAX,
    PowerSeries,
    evaluate,
    series_differentiate,
    series_integrate,
    series_mul,
    series_recip,
)
from .shear import (
    DilatationForm,
    DilatationSpec,
    HarmonicMapping,
    ShearSpec,
    dilatation_of,
    identity_mapping,
    shear_construct,
)

__version__ = "0.1.0"

"""Time evolution operator of massless spin-1/2 modes in axisymmetric Bianchi I spacetimes."""

from .asymptotics import (
    AsymptoticTerms,
    WeakAnisotropyScalars,
    appendix_teo,
    asymptotic_kasner_spinors,
    weak_anisotropy_teo,
)
from .background import (
    NAMED_MODELS,
    Background,
    DerivedScalars,
    Mode,
    approx_constants,
    derived_delta,
    derived_scalars,
    named_background,
)
from .diagnostics import (
    ComparisonReport,
    compare,
    dirac_norm_check,
    fit_power_law,
    group_law_residual,
    mode_inner_product,
    orthogonality_partner,
    unitarity_defect,
)
from .errors import DomainError, IntegrationError, SpecfunError
from .exact_models import (
    hypersurface_exact_teo,
    hypersurface_solutions,
    kasner_asymptotic,
    kasner_matching,
    kasner_short_time,
    rw_exact_teo,
    stiff_fluid_solutions,
)
from .oracle import TeoMatrix, WeylModeState, evolve_oracle, evolve_state, omega_matrix, picard_teo
from .teo_core import closed_form_teo, conformal_exact_teo, dirac_teo, rz_functions, short_time_teo

__version__ = "0.1.0"

__all__ = [
    "AsymptoticTerms",
    "WeakAnisotropyScalars",
    "appendix_teo",
    "asymptotic_kasner_spinors",
    "weak_anisotropy_teo",
    "NAMED_MODELS",
    "Background",
    "DerivedScalars",
    "Mode",
    "approx_constants",
    "derived_delta",
    "derived_scalars",
    "named_background",
    "ComparisonReport",
    "compare",
    "dirac_norm_check",
    "fit_power_law",
    "group_law_residual",
    "mode_inner_product",
    "orthogonality_partner",
    "unitarity_defect",
    "DomainError",
    "IntegrationError",
    "SpecfunError",
    "hypersurface_exact_teo",
    "hypersurface_solutions",
    "kasner_asymptotic",
    "kasner_matching",
    "kasner_short_time",
    "rw_exact_teo",
    "stiff_fluid_solutions",
    "TeoMatrix",
    "WeylModeState",
    "evolve_oracle",
    "evolve_state",
    "omega_matrix",
    "picard_teo",
    "closed_form_teo",
    "conformal_exact_teo",
    "dirac_teo",
    "rz_functions",
    "short_time_teo",
    "__version__",
]

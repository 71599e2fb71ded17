"""Three-variable p-adic triple product L-functions for Hida families, at desk scale.

Layers, bottom up: ``padic`` and ``characters`` (Z/p^N arithmetic, Dirichlet
characters), ``iwasawa`` (truncated Lambda and R = Lambda^{(x)3}), ``qexp`` and
``classical`` (q-expansions, level-1 eigenforms), ``ordproj`` (Katz bases, U_p,
Hida's e), ``families`` (Lambda-adic forms), ``triple`` (the pipeline) and ``cli``.
"""

from .errors import (
    ConfigError,
    DataError,
    DegeneracyError,
    DomainError,
    ExtensionNeeded,
    HidaTripleError,
    HypothesisViolation,
    NormalizationError,
    PrecisionError,
)
from .families import (
    LambdaAdicForm,
    build_family_from_grid,
    delta_family,
    eisenstein_family,
)
from .iwasawa import IwasawaElt, REllt, weight_point
from .padic import PadicInt, QpElt
from .qexp import QExp
from .triple import (
    L_raw,
    TripleContext,
    arch_Lfactor,
    build_H,
    congruence_functional,
    mod_euler_adjoint,
    mod_euler_triple,
    normalize_L,
    theta_char,
    validate_hypotheses,
    verify_two_path,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DegeneracyError",
    "DomainError",
    "ExtensionNeeded",
    "HidaTripleError",
    "HypothesisViolation",
    "IwasawaElt",
    "L_raw",
    "LambdaAdicForm",
    "NormalizationError",
    "PadicInt",
    "PrecisionError",
    "QExp",
    "QpElt",
    "REllt",
    "TripleContext",
    "arch_Lfactor",
    "build_H",
    "build_family_from_grid",
    "congruence_functional",
    "delta_family",
    "eisenstein_family",
    "mod_euler_adjoint",
    "mod_euler_triple",
    "normalize_L",
    "theta_char",
    "validate_hypotheses",
    "verify_two_path",
    "weight_point",
]

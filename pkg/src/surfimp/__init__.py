"""Surface impedance of anisotropic elastic half-spaces.

Forward maps (stiffness to boundary impedance), closed forms for
transversely isotropic and orthorhombic media, parameter recovery from
impedance samples, and a one-dimensional wave/resolvent bridge for
validating time-windowed Laplace transforms.
"""

from __future__ import annotations

from .bridge import (
    BridgeReport,
    Medium1D,
    TimeSeries,
    WaveRun,
    bridge_check,
    chi1,
    elliptic_slope,
    finite_laplace,
    halfspace_dn_action,
    simulate_wave_1d,
    solve_wave_1d,
)
from .errors import (
    CflViolation,
    ContourTooClose,
    ConvexityViolation,
    DefectiveSolvent,
    DegenerateProfile,
    InsufficientSamples,
    InvalidDirection,
    InvalidImpedance,
    IoError,
    MissingSample,
    NegativeDiscriminant,
    NegativeRadicand,
    NumericalError,
    ParseError,
    QuadratureFailure,
    RankDeficientDesign,
    RealRootDetected,
    SingularJacobian,
    SingularStep5System,
    SurfimpError,
    UsageError,
    ValidationError,
    ZeroTangent,
)
from .recon import (
    HomogeneousRecovery,
    ImpedanceSample,
    ProfileSamples,
    RationalTriple,
    XrayReport,
    estimate_derivatives,
    gamma_hat,
    rational_recover,
    recover_homogeneous,
    recover_ortho,
    recover_vti,
    recover_vti_gradient,
    xray_check,
)
from .symbol import (
    DirectionPair,
    Factorization,
    Impedance,
    SymbolTriple,
    block_diagonalizer,
    build_symbol,
    factor_contour,
    factor_eigen,
    full_symbol,
    impedance,
    ortho_impedance_closed,
    pullback_symbol,
    symbol_roots,
    vti_impedance_closed,
    vti_impedance_gradient,
)
from .tensors import (
    COMPONENT_NAMES,
    VOIGT_PAIRS,
    Jacobian,
    MaterialParams,
    OrthoParams,
    StiffnessTensor,
    VtiParams,
    from_isotropic,
    from_ortho,
    from_vti,
    strongly_convex,
    transform_tensor,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # tensors
    "COMPONENT_NAMES", "VOIGT_PAIRS", "StiffnessTensor", "MaterialParams",
    "VtiParams", "OrthoParams", "Jacobian", "from_isotropic", "from_vti",
    "from_ortho", "strongly_convex", "transform_tensor",
    # symbol
    "DirectionPair", "SymbolTriple", "Factorization", "Impedance",
    "build_symbol", "full_symbol", "symbol_roots", "factor_eigen",
    "factor_contour", "impedance", "block_diagonalizer",
    "vti_impedance_closed", "vti_impedance_gradient",
    "ortho_impedance_closed", "pullback_symbol",
    # recon
    "ImpedanceSample", "ProfileSamples", "RationalTriple",
    "rational_recover", "estimate_derivatives", "recover_vti",
    "recover_vti_gradient", "recover_ortho", "gamma_hat", "xray_check",
    "XrayReport", "recover_homogeneous", "HomogeneousRecovery",
    # bridge
    "TimeSeries", "Medium1D", "WaveRun", "BridgeReport", "chi1",
    "finite_laplace", "halfspace_dn_action", "simulate_wave_1d",
    "solve_wave_1d", "elliptic_slope", "bridge_check",
    # errors
    "SurfimpError", "ValidationError", "NumericalError", "IoError",
    "UsageError", "ParseError", "ConvexityViolation", "SingularJacobian",
    "InvalidDirection", "ZeroTangent", "RealRootDetected",
    "DefectiveSolvent", "ContourTooClose", "NegativeDiscriminant",
    "InvalidImpedance", "DegenerateProfile", "InsufficientSamples",
    "MissingSample", "NegativeRadicand", "SingularStep5System",
    "RankDeficientDesign", "QuadratureFailure", "CflViolation",
]

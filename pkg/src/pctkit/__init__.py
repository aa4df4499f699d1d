"""Verification-grade construction of variable-mass solvable systems.

The package builds Schrodinger problems with position-dependent mass from
exactly solvable constant-mass references through a coordinate transplant,
and independently confirms that the constructed systems keep the reference
spectrum. Construction and confirmation deliberately share no spectral
code: the former is closed-form, the latter goes through discretization and
Sturm bisection in extended precision.
"""

from .errors import (
    ConfigError,
    ConstraintError,
    ConvergenceError,
    DegreeError,
    DomainError,
    QuadratureError,
    RangeError,
    SingularError,
    ToolkitError,
    UnsupportedError,
    ValidationError,
)
from .massprofiles import (
    ConstraintSpec,
    MassParameters,
    MassProfile,
    map_forward,
    map_forward_quadrature,
    map_inverse,
    map_range,
    mass_d1,
    mass_d2,
    mass_value,
    strict_constraint,
    validate,
)
from .oracles import (
    Grid,
    LevelRow,
    QuadratureSettings,
    TridiagonalOperator,
    VerificationReport,
    count_nodes,
    discretize_constant,
    discretize_pdem,
    eigenvector,
    integrate,
    lowest_eigenvalues,
    orthonormality_matrix,
    residual_norm,
    richardson,
    sturm_count,
)
from .pct import (
    PAPER_FORM_TAGS,
    DeviationReport,
    DeviationRow,
    TargetSystem,
    build_target,
    compare_paper_form,
    mass_correction,
    paper_form_coefficients,
    paper_form_potential,
    resolve_window,
    target_energy,
    target_potential,
    transport_wavefunction,
    verify_target,
)
from .refmodels import (
    LevelEntry,
    ReferenceModel,
    SpectrumTable,
    ref_energy,
    ref_normalization,
    ref_potential,
    ref_spectrum_table,
    ref_wavefunction_raw,
    scaled_mu,
)
from .specfun import PolyEvalSettings, hyp2f1_terminating, pochhammer

__version__ = "1.0.0"

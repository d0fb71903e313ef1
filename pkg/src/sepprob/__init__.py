"""Separability probabilities of generic 4x4 density matrices.

The package covers four connected workflows:

* Monte Carlo estimation of P(det of the partial transpose >= 0) over the
  real, complex and quaternionic Hilbert-Schmidt ensembles
  (:mod:`sepprob.sampler`);
* reconstruction of the distribution of that determinant from exact moment
  sequences by Legendre expansion, including the cumulative probability
  over the nonnegative subinterval (:mod:`sepprob.reconstruct`);
* arbitrary-precision evaluation of the 7F6 hypergeometric family at
  argument 27/64 and fitting/evaluating affine-plus-weights combinations
  of its members (:mod:`sepprob.hyper`, :mod:`sepprob.formula`);
* recognition of exact rationals and a + b*C closed forms from
  high-precision decimals (:mod:`sepprob.recognize`).
"""

__version__ = "0.1.0"

from .constants import ConstantTable, NamedConstant, builtin_table, constant_lookup
from .errors import (
    InputError,
    InsufficientMomentsError,
    NumericalFailureError,
    ParameterPoleError,
    SepprobError,
    VerificationFailureError,
)
from .formula import FitProblem, FormulaConfig, RationalFunction, assemble_P, fit_formula
from .hyper import HypergeometricSpec, family_member_eval, family_member_spec, pfq_eval
from .kernel import BoundedValue, decimal_render, format_rational, parse_rational, pochhammer
from .moments import (
    MomentSequence,
    cubic_test_moments,
    load_moment_file,
    point_mass_moments,
    polynomial_density_moments,
    save_moment_file,
    shift_moments,
    uniform_moments,
)
from .quaternion import Quaternion, QuaternionMatrix
from .recognize import RecognitionCandidate, recognize_affine, to_rational, verify
from .reconstruct import (
    EXACT,
    ConvergenceTrace,
    ExactMode,
    FloatMode,
    LegendreReconstruction,
    convergence_trace,
    interval_probability,
    reconstruct,
    separability_probability,
)
from .sampler import (
    BivariateMomentTable,
    DensityMatrix,
    McResult,
    Ring,
    determinant,
    empirical_moments,
    mc_separability,
    moore_determinant,
    partial_transpose,
    sample_density,
)
from .tables import ProbabilityTable, fitline, table_check

__all__ = [
    "BivariateMomentTable",
    "BoundedValue",
    "ConstantTable",
    "ConvergenceTrace",
    "DensityMatrix",
    "EXACT",
    "ExactMode",
    "FitProblem",
    "FloatMode",
    "FormulaConfig",
    "HypergeometricSpec",
    "InputError",
    "InsufficientMomentsError",
    "LegendreReconstruction",
    "McResult",
    "MomentSequence",
    "NamedConstant",
    "NumericalFailureError",
    "ParameterPoleError",
    "ProbabilityTable",
    "Quaternion",
    "QuaternionMatrix",
    "RationalFunction",
    "RecognitionCandidate",
    "Ring",
    "SepprobError",
    "VerificationFailureError",
    "assemble_P",
    "builtin_table",
    "constant_lookup",
    "convergence_trace",
    "cubic_test_moments",
    "decimal_render",
    "determinant",
    "empirical_moments",
    "family_member_eval",
    "family_member_spec",
    "fit_formula",
    "fitline",
    "format_rational",
    "interval_probability",
    "load_moment_file",
    "mc_separability",
    "moore_determinant",
    "parse_rational",
    "partial_transpose",
    "pfq_eval",
    "pochhammer",
    "point_mass_moments",
    "polynomial_density_moments",
    "reconstruct",
    "recognize_affine",
    "sample_density",
    "save_moment_file",
    "separability_probability",
    "shift_moments",
    "table_check",
    "to_rational",
    "uniform_moments",
    "verify",
]

"""Weight sequences, weight matrices and weight functions, Hermite expansions
in the associated global ultradifferentiable spaces, and nuclearity
diagnostics.

Every check returns a :class:`ConditionReport` whose verdict is ``VERIFIED``,
``VIOLATED`` or ``INCONCLUSIVE`` on a stated finite range.
"""

__version__ = "0.1.0"

from .core import ConditionReport, Verdict, combine_verdicts, enumerate_indices
from .weight_seq import (WeightSequence, associated_function, check_condition, exp_poly, factorial_power,
                         from_index_table, from_order_table, ones, sequence_from_association)
from .weight_matrix import (HypothesisError, WeightMatrix, check_matrix_condition, constant_matrix,
                            hermite_membership_test, matrix_from_tables, polynomial_absorption)
from .weight_func import (GrowthClass, WeightFunction, audit_weight_matrix, from_callable, from_points, gevrey,
                          growth_class, log_power, matrix_from_weight, sandwich_check, validate_weight_function,
                          young_conjugate)
from .hermite import (HermiteExpansion, RationalExpansion, gram_matrix, hermite_eval, ladder_apply,
                      random_expansion, seminorm, seminorm_equivalence_check, sup_norm)
from .expansion import (DecayModel, analyze, classify_sequence, coeff_norm, fourier_check, fourier_transform,
                        synthesize, verify_T_continuity, verify_Tinv_continuity)
from .nuclearity import (Nuclearity, SeriesVerdict, build_koethe, check_quotient_equivalence, gp_series_diagnose,
                         nuclearity_verdict)

__all__ = [name for name in dir() if not name.startswith("_")]

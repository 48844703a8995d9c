"""Invariant, reversible and conservative measures of finite Markov chains,
their extreme points, and exact checks relating them."""
from .backend import Backend, format_scalar, to_fraction
from .chain_core import (JointDistribution, MarkovKernel, apply_T, as_measure,
                         as_observable, is_conservative_kernel, joint_distribution,
                         new_kernel, row_sums, uniform_measure)
from .errors import *  # noqa: F401,F403
from .extremal import (ClassDecomposition, ExtremalReport, MeasurePolytope,
                       class_decomposition, conservative_reversible_polytope,
                       extreme_invariant_measures, extreme_reversible_measures,
                       invariant_polytope, is_extreme_point, reversible_polytope,
                       verify_theorem4)
from .generators import (ABSORBED, ChainRecipe, EmpiricalJoint, empirical_sigma,
                         realize, sample_step, symmetry_statistic)
from .measure_props import (Lemma8Result, MeasureClassReport, Verdict, classify,
                            density_measure, dirichlet_form, is_conservative_measure,
                            is_invariant, is_reversible, lemma8_conditions, lemma9_check,
                            quadratic_form_rhs, remark_check, sigma_components)

__version__ = "0.1.0"

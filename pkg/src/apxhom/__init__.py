"""Exact agreement counting for injections between finite Abelian groups,
plus constructive checks of the sumset inequalities that bound it."""

from .group_core import (
    GroupElement,
    GroupError,
    GroupSpec,
    add,
    dilate_image,
    direct_product,
    invariant_factors,
    kernel_subgroup,
    neg,
    rank,
    scalar_mul,
    unrank,
)
from .setops import (
    ElementSet,
    additive_energy,
    difference,
    dilate,
    iterated_sumset,
    sumset,
    triple_correlation,
)
from .maps import (
    AgreementReport,
    PointMap,
    agreement_probability,
    binary_embedding,
    carry_defect,
    centered_unwrap,
    compose,
    graph_of,
    swap_graph,
)
from .bounds import BoundReport, c_of_r, minimize_c_over_primes, theorem_alpha, theorem_base
from .serialize import parse_spec, render_spec

__version__ = "0.1.0"

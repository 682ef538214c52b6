"""normtower: formal-group local points and norm-subgroup structure over
cyclotomic towers of unramified p-adic fields, verified at finite precision."""

from .curve import (
    CurveParams,
    assert_supersingular,
    curve_from_preset,
    formal_exp,
    formal_group_law,
    formal_log,
    multiplication_by_p_series,
)
from .groupring import (
    GroupRing,
    annihilator,
    delta_of,
    idempotents,
    is_unit,
    omega_family,
    phi_plus_phi_inv,
    q_values,
)
from .honda import HondaLog, honda_exp, honda_log, series_bundle
from .lambda_modules import (
    NotZpFinite,
    Presentation,
    coinvariant_rank_law,
    coinvariants,
    freeness_test,
    kernel_freeness_property,
    module_report,
    present_minus,
    present_plus,
    supplementary_structure_check,
)
from .lattice import (
    Lattice,
    check_exact_sequence,
    cyclicity_check,
    galois_span,
    maximal_ideal_lattice,
    norm_subgroup,
    uniformizer_generates_quotient,
)
from .localpoints import InsufficientDegree, LocalPoint, local_point_direct, local_point_log
from .padic import PrecisionExhausted, ZpContext, teichmuller
from .points import epsilon_log, point_log, verify_trace_relations
from .series import TruncSeries
from .snf import SnfResult, smith_normal_form, snf
from .tower import TowerDesc, TowerElt, build_tower, check_g_iterate, galois_act, trace, uniformizer
from .unramified import FieldDesc, UnramifiedElt, build_unramified, frobenius, valuation

__all__ = [
    "CurveParams", "assert_supersingular", "curve_from_preset", "formal_exp",
    "formal_group_law", "formal_log", "multiplication_by_p_series",
    "GroupRing", "annihilator", "delta_of", "idempotents", "is_unit",
    "omega_family", "phi_plus_phi_inv", "q_values",
    "HondaLog", "honda_exp", "honda_log", "series_bundle",
    "NotZpFinite", "Presentation", "coinvariant_rank_law", "coinvariants",
    "freeness_test", "kernel_freeness_property", "module_report",
    "present_minus", "present_plus", "supplementary_structure_check",
    "Lattice", "check_exact_sequence", "cyclicity_check", "galois_span",
    "maximal_ideal_lattice", "norm_subgroup", "uniformizer_generates_quotient",
    "InsufficientDegree", "LocalPoint", "local_point_direct", "local_point_log",
    "PrecisionExhausted", "ZpContext", "teichmuller",
    "epsilon_log", "point_log", "verify_trace_relations",
    "TruncSeries", "SnfResult", "smith_normal_form", "snf",
    "TowerDesc", "TowerElt", "build_tower", "check_g_iterate", "galois_act",
    "trace", "uniformizer",
    "FieldDesc", "UnramifiedElt", "build_unramified", "frobenius", "valuation",
]

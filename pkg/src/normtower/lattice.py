"""Z_p-lattices spanned by Galois orbits of point logarithms inside k_n, and
the norm-subgroup statements verified through them: rank tables, the exact
sequence, cyclicity, and the maximal-ideal generation lemma.

A Lattice is a coordinate matrix (ambient dimension x generators) at a common
denominator exponent; ranks come from Smith normal form with the precision
margin, and any ambiguous decision is retried once at N + 4 before giving up.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .groupring import CharIdempotent, delta_generator, q_values
from .padic import PrecisionExhausted
from .points import point_log, plusminus_point_log
from .snf import (
    PRECISION_BUMP,
    as_matrix,
    kernel_basis,
    smith_normal_form,
    span_contains_all,
    spans_equal,
    stack_cols,
)
from .tower import TowerDesc, TowerElt, build_tower, tower_eta, tower_one


@dataclass(frozen=True)
class Lattice:
    tower: TowerDesc
    level: int
    den: int
    mat: np.ndarray  # ambient_dim x n_generators

    @property
    def p(self) -> int:
        return self.tower.p

    @property
    def N(self) -> int:
        return self.tower.N

    def rank(self, strict: bool = True) -> int:
        res = smith_normal_form(self.mat, self.p, self.N)
        if strict and res.ambiguous():
            raise PrecisionExhausted("lattice rank inside precision margin")
        return res.rank()

    def divisor_valuations(self) -> list[int]:
        return smith_normal_form(self.mat, self.p, self.N).divisors

    def contains(self, other: "Lattice") -> bool:
        a, b = _common_den(self, other)
        return span_contains_all(a.mat, b.mat, self.p, self.N)

    def equals(self, other: "Lattice") -> bool:
        a, b = _common_den(self, other)
        return spans_equal(a.mat, b.mat, self.p, self.N)


def _common_den(a: Lattice, b: Lattice) -> tuple[Lattice, Lattice]:
    assert a.level == b.level and a.tower is b.tower
    den = max(a.den, b.den)
    am = (a.mat.astype(object) * a.p ** (den - a.den)) % a.p**a.N
    bm = (b.mat.astype(object) * b.p ** (den - b.den)) % b.p**b.N
    return (Lattice(a.tower, a.level, den, as_matrix(am, a.p**a.N)),
            Lattice(b.tower, b.level, den, as_matrix(bm, b.p**b.N)))


def lattice_from_elements(t: TowerDesc, level: int, elems: list[TowerElt]) -> Lattice:
    den = max((e.den for e in elems), default=0)
    cols = [e.vector(den) for e in elems]
    mat = as_matrix(np.array(cols, dtype=object).T, t.q)
    return Lattice(t, level, den, mat)


# ---------------------------------------------------------------------------
# character projection and Galois orbits
# ---------------------------------------------------------------------------

def apply_idempotent(x: TowerElt, eps: CharIdempotent) -> TowerElt:
    """eps_chi * x: the tame group enumerated as powers of the fixed generator."""
    t = x.tower
    g = delta_generator(t.p)
    out = None
    for k, coeff in enumerate(eps.coeffs):
        u = t.delta_exponent(x.level, pow(g, k, t.p)) if x.level >= 0 else 1
        term = x.galois(u, 0).scale_int(coeff)
        out = term if out is None else out + term
    return out


def galois_orbit(x: TowerElt, n: int, include_tame: bool) -> list[TowerElt]:
    """sigma(x) for sigma over Frobenius x wild (x tame, optionally) parts of
    the level-n Galois group."""
    t = x.tower
    if x.level < n:
        x = x.embed(n)
    gamma_u = t.gamma_exponent(n)
    g = delta_generator(t.p)
    tame_us = [t.delta_exponent(n, pow(g, k, t.p)) for k in range(t.p - 1)] \
        if (include_tame and n >= 0) else [1]
    out = []
    wild_count = t.p**n if n >= 0 else 1
    for tu in tame_us:
        y = x.galois(tu, 0) if n >= 0 else x
        for _ in range(wild_count):
            for a in range(t.d):
                out.append(y.galois(1, a) if a else y)
            y = y.galois(gamma_u, 0)
    return out


def galois_span(t: TowerDesc, gens: list[TowerElt], n: int,
                chi: CharIdempotent | None = None) -> Lattice:
    """Z_p-span of the G_n-orbit of the generators (chi-projected when given)."""
    elems: list[TowerElt] = []
    for gen in gens:
        y = gen.embed(n) if gen.level < n else gen
        if chi is not None:
            y = apply_idempotent(y, chi)
        elems.extend(galois_orbit(y, n, include_tame=(chi is None)))
    return lattice_from_elements(t, n, elems)


# ---------------------------------------------------------------------------
# the lattices of the theory
# ---------------------------------------------------------------------------

def norm_subgroup_lattice(t: TowerDesc, n: int, chi=None) -> Lattice:
    """C(m_n): the span of the level-n and level-(-1) point logs (log route)."""
    if n == -1:
        return galois_span(t, [point_log(t, -1)], -1, chi)
    return galois_span(t, [point_log(t, n), point_log(t, -1)], n, chi)


def curve_group_lattice(t: TowerDesc, n: int, chi=None) -> Lattice:
    """The log image of the full group at level n: span of log d_n, log d_(n-1)."""
    if n == -1:
        return galois_span(t, [point_log(t, -1)], -1, chi)
    return galois_span(t, [point_log(t, n), point_log(t, n - 1)], n, chi)


def plusminus_lattice(t: TowerDesc, n: int, sign: str, chi=None) -> Lattice:
    """The plus/minus subgroup at level n: span of the signed points."""
    assert n >= 0
    gens = [plusminus_point_log(t, n, sign), plusminus_point_log(t, 0, "-")]
    return galois_span(t, gens, n, chi)


def norm_subgroup(t: TowerDesc, n: int, sign: str, chi=None) -> Lattice:
    return plusminus_lattice(t, n, sign, chi)


def expected_norm_rank(p: int, d: int, n: int, trivial_chi: bool | None) -> int:
    """Closed-form Z_p-rank of C(m_n)^chi (None = full module, summed over chi)."""
    qn, _, _ = q_values(p, n)
    if n == -1:
        if trivial_chi is None:
            return d
        return d if trivial_chi else 0
    if trivial_chi is None:
        return (p - 1) * d * qn + (d if n % 2 == 1 else 0)
    return d * (qn + 1) if (n % 2 == 1 and trivial_chi) else d * qn


def expected_plusminus_rank(p: int, d: int, n: int, sign: str,
                            trivial_chi: bool | None) -> int:
    """Closed-form Z_p-rank of the plus/minus subgroup's chi-component."""
    _, qp, qm = q_values(p, n)
    if sign == "+":
        per = {True: d * qp, False: d * qp}
    else:
        per = {True: d * (qm + 1), False: d * qm}
    if trivial_chi is None:
        return per[True] + (p - 2) * per[False] if p > 2 else per[True]
    return per[trivial_chi]


def maximal_ideal_lattice(t: TowerDesc, n: int) -> Lattice:
    """m_n as a Z_p-lattice: spanned by p*(basis) and (eta - 1)*(basis)."""
    elems = []
    L = t.level_dim(n)
    if n == -1:
        basis = [tower_one(t, -1)]
    else:
        eta = tower_eta(t, n)
        basis = []
        cur = tower_one(t, n)
        for _ in range(L):
            basis.append(cur)
            cur = cur * eta
    eta_minus_one = (tower_eta(t, n) - tower_one(t, n)) if n >= 0 else None
    for b in basis:
        for i in range(t.d):
            zb = b.scale_field(t.field.pow(t.field.zeta(), i))
            elems.append(zb.scale_int(t.p))
            if eta_minus_one is not None:
                elems.append(eta_minus_one * zb)
    return lattice_from_elements(t, n, elems)


def uniformizer_generates_quotient(t: TowerDesc, n: int) -> bool:
    """m_n / m_(n-1) is generated by the canonical uniformizer as a Galois
    module: span(orbit of pi_n) + m_(n-1) = m_n."""
    from .tower import uniformizer

    assert n >= 0
    orbit = galois_span(t, [uniformizer(t, n)], n, None)
    lower = maximal_ideal_lattice(t, n - 1)
    lower_emb = lattice_from_elements(t, n, _embedded_columns(t, lower, n))
    target = maximal_ideal_lattice(t, n)
    return _stack(orbit, lower_emb).equals(target)


def _embedded_columns(t: TowerDesc, lat: Lattice, n: int) -> list[TowerElt]:
    out = []
    Lsrc = t.level_dim(lat.level)
    for j in range(lat.mat.shape[1]):
        col = lat.mat[:, j]
        coords = np.array(col, dtype=object).reshape(Lsrc, t.d)
        elem = TowerElt(t, lat.level, coords, lat.den, t.N)
        out.append(elem.embed(n))
    return out


def _stack(a: Lattice, b: Lattice) -> Lattice:
    a2, b2 = _common_den(a, b)
    return Lattice(a.tower, a.level, a2.den, stack_cols(a2.mat, b2.mat))


def check_exact_sequence(t: TowerDesc, n: int, chi=None) -> dict:
    """0 -> (level -1 group) -> C_n (+) C_(n-1) -> (full level-n group) -> 0,
    verified as: intersection = the level -1 lattice, sum = the full lattice,
    and rank additivity."""
    assert n >= 0
    Cn = norm_subgroup_lattice(t, n, chi)
    Cn1 = norm_subgroup_lattice(t, n - 1, chi)
    Cn1_at_n = lattice_from_elements(t, n, _embedded_columns(t, Cn1, n)) \
        if n - 1 < n else Cn1
    base = galois_span(t, [point_log(t, -1)], n, chi)
    full = curve_group_lattice(t, n, chi)

    A, B = _common_den(Cn, Cn1_at_n)
    ker = kernel_basis(stack_cols(A.mat, (-B.mat) % t.q), t.p, t.N)
    na = A.mat.shape[1]
    inter_cols = (A.mat.astype(object) @ ker[:na].astype(object)) % t.q
    inter = Lattice(t, n, A.den, as_matrix(inter_cols, t.q))

    summ = _stack(Cn, Cn1_at_n)
    rank_Cn, rank_Cn1 = Cn.rank(), Cn1_at_n.rank()
    rank_inter, rank_sum = inter.rank(), summ.rank()
    ok_inter = inter.equals(base) if inter.mat.shape[1] else base.rank() == 0
    ok_sum = summ.equals(full)
    ok_add = rank_Cn + rank_Cn1 == rank_inter + rank_sum
    return {
        "n": n,
        "rank_Cn": rank_Cn,
        "rank_Cn_lower": rank_Cn1,
        "rank_intersection": rank_inter,
        "rank_sum": rank_sum,
        "intersection_is_base": ok_inter,
        "sum_is_full": ok_sum,
        "rank_additivity": ok_add,
        "ok": ok_inter and ok_sum and ok_add,
    }


def cyclicity_check(t: TowerDesc, n: int) -> dict:
    """Is the level -1 point log inside the Galois span of the level-n one?
    The dichotomy: fails exactly when d = 0 (mod 4) and n is even."""
    assert n >= 0
    span = galois_span(t, [point_log(t, n)], n, None)
    target = point_log(t, -1).embed(n)
    a, b = _common_den(span, lattice_from_elements(t, n, [target]))
    member = span_contains_all(a.mat, b.mat, t.p, t.N)
    expected = not (t.d % 4 == 0 and n % 2 == 0)
    return {"n": n, "d": t.d, "cyclic": member, "expected_cyclic": expected,
            "ok": member == expected}


def generation_check(t: TowerDesc, n: int) -> bool:
    """span(orbit of log d_n) + (level n-1 lattice) = (level n lattice):
    the third requisition on the point system."""
    assert n >= 0
    top = galois_span(t, [point_log(t, n)], n, None)
    lower = curve_group_lattice(t, n - 1, None)
    lower_at_n = lattice_from_elements(t, n, _embedded_columns(t, lower, n))
    return _stack(top, lower_at_n).equals(curve_group_lattice(t, n, None))


def log_image_vs_maximal_ideal(t: TowerDesc, n: int) -> dict:
    """Divisor bookkeeping comparing the log-image lattice with m_n itself
    (reported, never assumed equal: denominators enter from level 2 on)."""
    li = curve_group_lattice(t, n, None)
    mi = maximal_ideal_lattice(t, n)
    a, b = _common_den(li, mi)
    return {
        "n": n,
        "den": a.den,
        "log_lattice_divisors": sum(v for v in a.divisor_valuations() if v < t.N),
        "max_ideal_divisors": sum(v for v in b.divisor_valuations() if v < t.N),
        "equal": a.equals(b),
    }


# ---------------------------------------------------------------------------
# precision-stabilized execution
# ---------------------------------------------------------------------------

def with_precision_retry(p: int, d: int, n_max: int, N: int,
                         fn: Callable[[TowerDesc], object]):
    """Run fn on a tower at N; on a margin-ambiguous decision rerun once at
    N + 4 (stabilization discipline)."""
    try:
        return fn(build_tower(p, d, n_max, N))
    except PrecisionExhausted:
        return fn(build_tower(p, d, n_max, N + PRECISION_BUMP))

"""Weierstrass curves with supersingular reduction: the a_p = 0 gate, the
formal group from the w-expansion, and its logarithm/exponential.

The group law is constructed exactly over Z by the chord construction in
(t, w)-coordinates, so its axioms are checked without any precision caveats;
the logarithm comes from the invariant differential and carries explicit
denominators (v_p(m) at degree m).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .padic import ZpContext, floor_log, is_prime, val_int
from .series import TruncSeries
from .unramified import FieldDesc


@dataclass(frozen=True)
class CurveParams:
    p: int
    a1: int = 0
    a2: int = 0
    a3: int = 0
    a4: int = 0
    a6: int = 0

    def __post_init__(self):
        if not is_prime(self.p) or self.p == 2:
            raise ValueError("need an odd prime of good supersingular reduction")
        if self.discriminant() % self.p == 0:
            raise ValueError("bad reduction: discriminant divisible by p")

    def b_invariants(self) -> tuple[int, int, int, int]:
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b_invariants()
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def count_points(self) -> int:
        """#E(F_p) by brute force, point at infinity included."""
        p = self.p
        n = 1
        for x in range(p):
            rhs = (x**3 + self.a2 * x * x + self.a4 * x + self.a6) % p
            lin = (self.a1 * x + self.a3) % p
            # y^2 + lin*y - rhs = 0: complete the square (p odd)
            disc = (lin * lin + 4 * rhs) % p
            if disc == 0:
                n += 1
            elif pow(disc, (p - 1) // 2, p) == 1:
                n += 2
        return n

    def ap(self) -> int:
        return self.p + 1 - self.count_points()


CURVE_PRESETS = {
    "ss3": dict(a4=-1),          # y^2 = x^3 - x, supersingular at p = 3 mod 4
    "ss23": dict(a6=1),          # y^2 = x^3 + 1, supersingular at p = 2 mod 3
}


def curve_from_preset(name: str, p: int) -> CurveParams:
    if name not in CURVE_PRESETS:
        raise KeyError(f"unknown curve preset {name!r}")
    return CurveParams(p=p, **CURVE_PRESETS[name])


def assert_supersingular(curve: CurveParams) -> int:
    """The standing hypothesis: trace of Frobenius vanishes. Returns #E(F_p)."""
    n = curve.count_points()
    if curve.p + 1 - n != 0:
        raise ValueError(f"a_p = {curve.p + 1 - n} != 0 for p = {curve.p}")
    return n


# ---------------------------------------------------------------------------
# w-expansion and univariate unit series (exact integers)
# ---------------------------------------------------------------------------

def _zmul(a: list[int], b: list[int], D: int) -> list[int]:
    out = [0] * (D + 1)
    for i, x in enumerate(a):
        if x and i <= D:
            for j, y in enumerate(b):
                if y and i + j <= D:
                    out[i + j] += x * y
    return out


def _zadd(a: list[int], b: list[int]) -> list[int]:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


@lru_cache(maxsize=None)
def w_expansion(curve: CurveParams, D: int) -> tuple[int, ...]:
    """w(t) = t^3 (1 + ...) solving the Weierstrass relation, exact over Z,
    through degree D."""
    a1, a2, a3, a4, a6 = curve.a1, curve.a2, curve.a3, curve.a4, curve.a6
    w = [0, 0, 0, 1] + [0] * (D - 3 if D >= 3 else 0)
    w = w[: D + 1]
    for _ in range(D + 1):
        w2 = _zmul(w, w, D)
        w3 = _zmul(w2, w, D)
        new = [0] * (D + 1)
        if D >= 3:
            new[3] = 1
        for k, c in enumerate(w):
            if c:
                if k + 1 <= D:
                    new[k + 1] += a1 * c
                if k + 2 <= D:
                    new[k + 2] += a2 * c
        for k, c in enumerate(w2):
            if c:
                if k <= D:
                    new[k] += a3 * c
                if k + 1 <= D:
                    new[k + 1] += a4 * c
        for k, c in enumerate(w3):
            if c and k <= D:
                new[k] += a6 * c
        if new == w:
            break
        w = new
    return tuple(w)


def _unit_series_data(curve: CurveParams, D: int) -> tuple[list[int], list[int]]:
    """(U, U') with U = (w/t^3)^{-1} as exact-integer series through degree D."""
    w = w_expansion(curve, D + 3)
    u = list(w[3: D + 4])  # w / t^3, constant term 1
    # integer series inverse of a unit with constant term 1
    U = [0] * (D + 1)
    U[0] = 1
    for j in range(1, D + 1):
        s = 0
        for i in range(1, j + 1):
            if i < len(u):
                s += u[i] * U[j - i]
        U[j] = -s
    Uprime = [(j + 1) * U[j + 1] for j in range(D)] + [0]
    return U, Uprime


def formal_log(curve: CurveParams, field: FieldDesc, D: int, prec: int) -> TruncSeries:
    """log(t) = t + ... with log'(0) = 1; denominator v_p(m) at degree m.

    Built from the invariant differential: with x = t^-2 U and y = -t^-3 U,
    dx/dt / (2y + a1 x + a3) = (-2U + tU') / (-2U + a1 t U + a3 t^3); then
    log = t + sum P_m t^(m+1)/(m+1).
    """
    p = field.p
    q = p**prec
    U, Uprime = _unit_series_data(curve, D)
    num = [(-2 * U[j] + (Uprime[j - 1] if j >= 1 else 0)) % q for j in range(D + 1)]
    den = [(-2 * U[j] + curve.a1 * (U[j - 1] if j >= 1 else 0)
            + (curve.a3 if j == 3 else 0)) % q for j in range(D + 1)]
    num_s = TruncSeries.from_int_coeffs(field, num, prec)
    den_s = TruncSeries.from_int_coeffs(field, den, prec)
    P = num_s * den_s.inverse_unit()
    assert P.coeffs[0] == field.one(q), "invariant differential not normalized"
    # integrate: coefficient of t^(m+1) is P_m / (m+1)
    den_exp = max(val_int(m + 1, p, prec) for m in range(D)) if D >= 1 else 0
    zp = ZpContext(p, prec)
    co = [field.zero() for _ in range(D + 1)]
    for m in range(0, D):
        e = val_int(m + 1, p, prec)
        unit = (m + 1) // p**e
        c = field.scalar(p ** (den_exp - e) * zp.inv(unit), P.coeffs[m], q)
        co[m + 1] = c
    return TruncSeries(field, tuple(co), den_exp, prec).canonical()


def composition_work_precision(p: int, D: int, target: int) -> int:
    """Stored digits for reversion/composition pipelines to end with `target`
    effective digits. Reversion re-composes at every degree, and each Horner
    step can consume denominator-sized precision; measured loss grows like
    D^2/4 (p = 3, the worst of the desk primes), padded here with headroom.
    Callers assert the achieved effective precision, so an overrun fails loudly
    rather than silently."""
    return target + D * D // 2 + 4 * D + 16


@lru_cache(maxsize=None)
def formal_exp(curve: CurveParams, field: FieldDesc, D: int, prec: int) -> TruncSeries:
    return formal_log(curve, field, D, prec).reversion()


def multiplication_by_p_series(curve: CurveParams, field: FieldDesc, D: int, target: int) -> TruncSeries:
    """[p](T) = exp(p log T): an integral series (endomorphism over Z_p)."""
    prec = composition_work_precision(field.p, D, target)
    lg = formal_log(curve, field, D, prec)
    ex = formal_exp(curve, field, D, prec)
    mp = ex.compose(lg.scale_int(curve.p)).canonical()
    assert mp.den == 0, "[p]-series failed integrality"
    assert mp.effective_prec >= target
    return mp


# ---------------------------------------------------------------------------
# exact bivariate/trivariate polynomial helpers and the chord group law
# ---------------------------------------------------------------------------

class MPoly:
    """Sparse exact-integer multivariate polynomial truncated at total degree."""

    __slots__ = ("nvars", "cap", "c")

    def __init__(self, nvars: int, cap: int, c: dict | None = None):
        self.nvars = nvars
        self.cap = cap
        self.c = {k: v for k, v in (c or {}).items() if v and sum(k) <= cap}

    @staticmethod
    def const(nvars: int, cap: int, v: int) -> "MPoly":
        return MPoly(nvars, cap, {(0,) * nvars: v})

    @staticmethod
    def var(nvars: int, cap: int, i: int) -> "MPoly":
        k = tuple(int(j == i) for j in range(nvars))
        return MPoly(nvars, cap, {k: 1})

    def __add__(self, o):
        out = dict(self.c)
        for k, v in o.c.items():
            out[k] = out.get(k, 0) + v
        return MPoly(self.nvars, min(self.cap, o.cap), out)

    def __sub__(self, o):
        out = dict(self.c)
        for k, v in o.c.items():
            out[k] = out.get(k, 0) - v
        return MPoly(self.nvars, min(self.cap, o.cap), out)

    def __neg__(self):
        return MPoly(self.nvars, self.cap, {k: -v for k, v in self.c.items()})

    def __mul__(self, o):
        if isinstance(o, int):
            return MPoly(self.nvars, self.cap, {k: v * o for k, v in self.c.items()})
        cap = min(self.cap, o.cap)
        out: dict = {}
        for k1, v1 in self.c.items():
            s1 = sum(k1)
            for k2, v2 in o.c.items():
                if s1 + sum(k2) <= cap:
                    k = tuple(a + b for a, b in zip(k1, k2))
                    out[k] = out.get(k, 0) + v1 * v2
        return MPoly(self.nvars, cap, out)

    __rmul__ = __mul__

    def inverse_unit(self) -> "MPoly":
        c0 = self.c.get((0,) * self.nvars, 0)
        assert c0 in (1, -1), "exact inversion needs constant term +-1"
        rest = MPoly(self.nvars, self.cap, {k: v for k, v in self.c.items() if sum(k) > 0})
        inv = MPoly.const(self.nvars, self.cap, c0)
        term = MPoly.const(self.nvars, self.cap, c0)
        for _ in range(self.cap):
            term = (term * rest) * (-c0)
            if not term.c:
                break
            inv = inv + c0 * term
        return inv

    def evaluate(self, args: list["MPoly"]) -> "MPoly":
        """Substitute args[i] for variable i (args share nvars/cap)."""
        cap = args[0].cap
        nv = args[0].nvars
        out = MPoly(nv, cap)
        pows = []
        for a in args:
            row = [MPoly.const(nv, cap, 1)]
            for _ in range(self.cap):
                row.append(row[-1] * a)
            pows.append(row)
        for k, v in self.c.items():
            term = MPoly.const(nv, cap, v)
            for i, e in enumerate(k):
                if e:
                    term = term * pows[i][e]
            out = out + term
        return out

    def coeff(self, k: tuple[int, ...]) -> int:
        return self.c.get(k, 0)

    def __eq__(self, o):
        return isinstance(o, MPoly) and self.c == o.c

    def __repr__(self):
        return f"MPoly({self.c})"


def _univariate_in(coeffs, nvars: int, cap: int, var: int) -> MPoly:
    out: dict = {}
    for j, c in enumerate(coeffs):
        if c and j <= cap:
            k = tuple(j if i == var else 0 for i in range(nvars))
            out[k] = c
    return MPoly(nvars, cap, out)


def _divide_by_t2_minus_t1(f: MPoly) -> MPoly:
    """Exact division of a bivariate polynomial vanishing on t1 = t2."""
    cap = f.cap
    out: dict = {}
    rem = dict(f.c)
    # arrange as polynomial in t2: divide by (t2 - t1) top down
    maxd2 = max((k[1] for k in rem), default=0)
    for d2 in range(maxd2, 0, -1):
        for k in [k for k in list(rem) if k[1] == d2]:
            v = rem.pop(k)
            if not v:
                continue
            qk = (k[0], d2 - 1)
            out[qk] = out.get(qk, 0) + v
            lk = (k[0] + 1, d2 - 1)
            rem[lk] = rem.get(lk, 0) + v
    assert all(v == 0 for v in rem.values()), "polynomial not divisible by t2 - t1"
    return MPoly(2, cap, out)


def inversion_series(curve: CurveParams, D: int) -> tuple[int, ...]:
    """i(t) = parameter of the group inverse: -t U (U - a1 t U - a3 t^3)^{-1}, exact."""
    U, _ = _unit_series_data(curve, D)
    den = [0] * (D + 1)
    for j in range(D + 1):
        den[j] = U[j] - curve.a1 * (U[j - 1] if j >= 1 else 0) \
            - (curve.a3 if j == 3 else 0)
    # invert den (constant 1), multiply by -t U
    inv = [0] * (D + 1)
    inv[0] = 1
    for j in range(1, D + 1):
        inv[j] = -sum(den[i] * inv[j - i] for i in range(1, j + 1))
    tU = [0] + [-U[j] for j in range(D)]
    out = [0] * (D + 1)
    for i, x in enumerate(tU):
        if x:
            for j, y in enumerate(inv):
                if i + j <= D:
                    out[i + j] += x * y
    return tuple(out)


@lru_cache(maxsize=None)
def formal_group_law(curve: CurveParams, D: int) -> MPoly:
    """F(t1, t2) over Z, exact through total degree D, by the chord construction."""
    if D < 2:
        raise ValueError("need degree >= 2")
    w = w_expansion(curve, D + 3)
    w1 = _univariate_in(w, 2, D + 3, 0)
    w2 = _univariate_in(w, 2, D + 3, 1)
    t1 = MPoly.var(2, D + 3, 0)
    t2 = MPoly.var(2, D + 3, 1)
    m = _divide_by_t2_minus_t1(w2 - w1)
    c = w1 - m * t1
    a1, a2, a3, a4, a6 = curve.a1, curve.a2, curve.a3, curve.a4, curve.a6
    A = MPoly.const(2, D + 3, 1) + a2 * m + a4 * (m * m) + a6 * (m * m * m)
    B = a1 * m + a2 * c + a3 * (m * m) + 2 * a4 * (m * c) + 3 * a6 * (m * m * c)
    t3 = -t1 - t2 - B * A.inverse_unit()
    inv = inversion_series(curve, D)
    # compose: i(t3)
    out = MPoly(2, D)
    t3c = MPoly(2, D, t3.c)
    pows = [MPoly.const(2, D, 1)]
    for _ in range(D):
        pows.append(pows[-1] * t3c)
    for j, cj in enumerate(inv):
        if cj and j <= D:
            out = out + cj * pows[j]
    return out

"""Truncated power series over O_k with explicit denominator bookkeeping.

A TruncSeries represents p^(-den) * sum c_j X^j with integral coefficient
tuples c_j stored mod p^prec, truncated at degree deg. Its effective precision
is prec - den; operations propagate both conservatively and canonical() strips
common p-powers (lowering den and prec together, effective precision
unchanged). Nothing ever silently divides: division by p is a den bump, and
exact coefficient division only happens in canonical().
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .padic import val_int
from .unramified import FieldDesc


@dataclass(frozen=True)
class TruncSeries:
    field: FieldDesc
    coeffs: tuple[tuple[int, ...], ...]  # degree 0..deg
    den: int
    prec: int

    @property
    def deg(self) -> int:
        return len(self.coeffs) - 1

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def effective_prec(self) -> int:
        return self.prec - self.den

    def _q(self) -> int:
        return self.p**self.prec

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def from_int_coeffs(field: FieldDesc, ints, prec: int, den: int = 0) -> "TruncSeries":
        q = field.p**prec
        return TruncSeries(field, tuple(field.from_int(c, q) for c in ints), den, prec)

    @staticmethod
    def zero(field: FieldDesc, deg: int, prec: int) -> "TruncSeries":
        return TruncSeries(field, tuple(field.zero() for _ in range(deg + 1)), 0, prec)

    @staticmethod
    def identity(field: FieldDesc, deg: int, prec: int) -> "TruncSeries":
        q = field.p**prec
        co = [field.zero() for _ in range(deg + 1)]
        if deg >= 1:
            co[1] = field.one(q)
        return TruncSeries(field, tuple(co), 0, prec)

    # -- precision / denominator plumbing --------------------------------------

    def _align(self, other: "TruncSeries"):
        den = max(self.den, other.den)
        prec = min(self.prec + den - self.den, other.prec + den - other.den)
        q = self.field.p**prec
        sa = self.p ** (den - self.den)
        sb = self.p ** (den - other.den)
        a = [tuple(x * sa % q for x in c) for c in self.coeffs]
        b = [tuple(x * sb % q for x in c) for c in other.coeffs]
        return a, b, den, prec, q

    def truncate(self, deg: int) -> "TruncSeries":
        if deg >= self.deg:
            return self
        return replace(self, coeffs=self.coeffs[: deg + 1])

    def pad(self, deg: int) -> "TruncSeries":
        if deg <= self.deg:
            return self
        extra = tuple(self.field.zero() for _ in range(deg - self.deg))
        return replace(self, coeffs=self.coeffs + extra)

    def canonical(self) -> "TruncSeries":
        x = self
        p = x.p
        while x.den > 0:
            if all(all(v % p == 0 for v in c) for c in x.coeffs):
                if all(all(v == 0 for v in c) for c in x.coeffs):
                    return replace(x, den=0)
                nq = p ** (x.prec - 1)
                co = tuple(tuple(v // p % nq for v in c) for c in x.coeffs)
                x = TruncSeries(x.field, co, x.den - 1, x.prec - 1)
            else:
                break
        return x

    def min_coeff_val(self) -> int:
        """min over coefficients of p-valuation, capped at prec (integral side)."""
        best = self.prec
        for c in self.coeffs:
            v = self.field.val(c, cap=self.prec)
            best = min(best, v)
        return best

    def coeff_val(self, j: int) -> float:
        """p-valuation of the j-th (true, de-denominated) coefficient."""
        if j > self.deg:
            return math.inf
        v = self.field.val(self.coeffs[j], cap=self.prec)
        if v >= self.prec:
            return math.inf
        return v - self.den

    def is_integral(self) -> bool:
        return self.canonical().den == 0

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        deg = min(self.deg, other.deg)
        a, b, den, prec, q = self.truncate(deg)._align(other.truncate(deg))
        co = tuple(self.field.add(x, y, q) for x, y in zip(a, b))
        return TruncSeries(self.field, co, den, prec)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        deg = min(self.deg, other.deg)
        a, b, den, prec, q = self.truncate(deg)._align(other.truncate(deg))
        co = tuple(self.field.sub(x, y, q) for x, y in zip(a, b))
        return TruncSeries(self.field, co, den, prec)

    def __neg__(self) -> "TruncSeries":
        q = self._q()
        return replace(self, coeffs=tuple(self.field.neg(c, q) for c in self.coeffs))

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        deg = min(self.deg, other.deg)
        prec = min(self.prec, other.prec)
        q = self.field.p**prec
        fz = self.field.zero()
        out = [fz] * (deg + 1)
        for i, ci in enumerate(self.coeffs[: deg + 1]):
            if any(ci):
                for j, cj in enumerate(other.coeffs[: deg + 1 - i]):
                    if any(cj):
                        out[i + j] = self.field.add(out[i + j], self.field.mul(ci, cj, q), q)
        return TruncSeries(self.field, tuple(out), self.den + other.den, prec)

    def scale_int(self, c: int) -> "TruncSeries":
        q = self._q()
        return replace(self, coeffs=tuple(self.field.scalar(c, x, q) for x in self.coeffs))

    def scale_field(self, a) -> "TruncSeries":
        q = self._q()
        return replace(self, coeffs=tuple(self.field.mul(a, x, q) for x in self.coeffs))

    def div_p(self, k: int = 1) -> "TruncSeries":
        return replace(self, den=self.den + k)

    def derivative(self) -> "TruncSeries":
        q = self._q()
        co = tuple(self.field.scalar(j, self.coeffs[j], q) for j in range(1, self.deg + 1))
        return TruncSeries(self.field, co or (self.field.zero(),), self.den, self.prec)

    def frob(self, k: int) -> "TruncSeries":
        q = self._q()
        return replace(self, coeffs=tuple(self.field.frob(c, k, q) for c in self.coeffs))

    def substitute_power(self, e: int) -> "TruncSeries":
        """X -> X^e, same truncation degree."""
        co = [self.field.zero() for _ in range(self.deg + 1)]
        for j, c in enumerate(self.coeffs):
            if j * e <= self.deg:
                co[j * e] = c
            elif any(c):
                break
        return replace(self, coeffs=tuple(co))

    def compose(self, inner: "TruncSeries") -> "TruncSeries":
        """self(inner); inner must have zero constant term."""
        assert not any(inner.coeffs[0]), "inner series must vanish at 0"
        deg = min(self.deg, inner.deg)
        f = self.truncate(deg)
        g = inner.truncate(deg)
        acc = TruncSeries.zero(self.field, deg, max(f.prec, g.prec))
        for j in range(deg, -1, -1):
            acc = (acc * g).canonical()
            cj = TruncSeries(self.field, (f.coeffs[j],) + tuple(self.field.zero() for _ in range(deg)),
                             f.den, f.prec)
            acc = (acc + cj).canonical()
        return acc

    def inverse_unit(self) -> "TruncSeries":
        """1/self for a series with unit constant term (integral, den folded in)."""
        assert self.den == 0, "invert the canonical integral series"
        q = self._q()
        c0inv = self.field.inv(self.coeffs[0], q)
        out = [self.field.zero() for _ in range(self.deg + 1)]
        out[0] = c0inv
        for j in range(1, self.deg + 1):
            s = self.field.zero()
            for i in range(1, j + 1):
                if i <= self.deg and any(self.coeffs[i]):
                    s = self.field.add(s, self.field.mul(self.coeffs[i], out[j - i], q), q)
            out[j] = self.field.neg(self.field.mul(c0inv, s, q), q)
        return TruncSeries(self.field, tuple(out), 0, self.prec)

    def reversion(self) -> "TruncSeries":
        """Compositional inverse of a series c1 X + O(X^2) with c1 a unit.

        Newton iteration with degree doubling: E <- E - (l(E) - X) * Q where Q
        tracks (l'(E))^-1 by its own multiplicative Newton steps. Division-free,
        so the denominator bookkeeping stays honest throughout.
        """
        p = self.p
        assert not any(self.coeffs[0]), "reversion needs zero constant term"
        lead = self.field.divp_exact(self.coeffs[1], self.den)
        c1inv = self.field.inv(lead, p ** (self.prec - self.den))
        deg = self.deg
        wprec = self.prec - self.den
        E = TruncSeries.identity(self.field, deg, wprec).scale_field(c1inv)
        Q = TruncSeries(self.field,
                        (c1inv,) + tuple(self.field.zero() for _ in range(deg)),
                        0, wprec)
        lprime = self.derivative()
        two = TruncSeries(self.field,
                          (self.field.from_int(2, p**wprec),)
                          + tuple(self.field.zero() for _ in range(deg)),
                          0, wprec)
        good = 1
        while good < deg:
            good2 = min(2 * good + 1, deg)
            lk = self.truncate(good2).pad(good2)
            Ek = E.truncate(good2).pad(good2)
            dT = lprime.truncate(good2).pad(good2).compose(Ek)
            Q = Q.truncate(good2).pad(good2)
            two_k = two.truncate(good2).pad(good2)
            for _ in range(2):
                Q = (Q * (two_k - dT * Q)).canonical().pad(good2)
            T = lk.compose(Ek)
            delta = (T - TruncSeries.identity(self.field, good2, T.prec)).canonical().pad(good2)
            E = (Ek - delta * Q).canonical().pad(deg)
            good = good2
        return E.truncate(deg)

    def evaluate_field(self, x, x_val_num: int, x_val_den: int = 1):
        """Evaluate at an O_k element x with v_p(x) >= x_val_num/x_val_den >= something > 0.

        Returns (value coords, den, effective precision), where the truncation
        tail contributes valuation >= (deg+1) * v(x) - den.
        """
        q = self._q()
        acc = self.field.zero()
        for j in range(self.deg, -1, -1):
            acc = self.field.mul(acc, x, q)
            acc = self.field.add(acc, self.coeffs[j], q)
        tail = (self.deg + 1) * x_val_num // x_val_den - self.den
        eff = min(self.prec - self.den, tail)
        return acc, self.den, eff

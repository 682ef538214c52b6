"""Arithmetic in the tower k_n = k(mu_{p^(n+1)}) over the unramified field k.

Level n is represented as O_k[eta]/Phi_{p^(n+1)}(eta) in the power basis
1, eta, ..., eta^(L-1) with L = (p-1)p^n (L = 1 at level -1, where k_{-1} = k).
The compatible root system is implicit: zeta_{p^j} at level n is eta^(p^(n+1-j)),
so zeta_{p^(j+1)}^p = zeta_{p^j} holds exactly by exponent bookkeeping.

A TowerElt carries a denominator exponent: it represents p^(-den) * (integral
coords), with coords stored mod p^prec, so its effective precision is
prec - den. Division by p is total; equality checks report the residual
valuation against that floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .snf import _dtype_for
from .unramified import FieldDesc, build_unramified


@dataclass(frozen=True)
class TowerDesc:
    field: FieldDesc
    n_max: int

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def d(self) -> int:
        return self.field.d

    @property
    def N(self) -> int:
        return self.field.N

    @property
    def q(self) -> int:
        return self.field.q

    def level_dim(self, n: int) -> int:
        """Number of eta-power basis elements at level n."""
        if n == -1:
            return 1
        return (self.p - 1) * self.p**n

    def ambient_dim(self, n: int) -> int:
        """Z_p-dimension of k_n."""
        return self.level_dim(n) * self.d

    # -- basis reduction -----------------------------------------------------

    @lru_cache(maxsize=None)
    def _reduce_exp(self, n: int, e: int) -> tuple[tuple[int, int], ...]:
        """eta^e as a signed sum of basis powers, via Phi_{p^(n+1)}(eta) = 0."""
        L = self.level_dim(n)
        if e < L:
            return ((e, 1),)
        # eta^(L + r) = - sum_{i=0..p-2} eta^(i p^n + r)
        r = e - L
        pn = self.p**n
        acc: dict[int, int] = {}
        for i in range(self.p - 1):
            for idx, sgn in self._reduce_exp(n, i * pn + r):
                acc[idx] = acc.get(idx, 0) - sgn
        return tuple(sorted((k, v) for k, v in acc.items() if v))

    @lru_cache(maxsize=None)
    def _galois_table(self, n: int, u: int):
        """Index scatter (dst, src, coeff) for eta^j -> eta^(j u mod p^(n+1))."""
        L = self.level_dim(n)
        mod = self.p ** (n + 1) if n >= 0 else 1
        dst, src, cf = [], [], []
        for j in range(L):
            e = (j * u) % mod if n >= 0 else 0
            for idx, sgn in self._reduce_exp(n, e):
                dst.append(idx)
                src.append(j)
                cf.append(sgn)
        return (np.array(dst, dtype=np.int64),
                np.array(src, dtype=np.int64),
                np.array(cf, dtype=np.int64))

    @lru_cache(maxsize=None)
    def frob_matrix(self, k: int) -> np.ndarray:
        k %= self.d
        cols = self.field.frob_cols[k]
        M = np.array([[cols[i][j] for i in range(self.d)] for j in range(self.d)],
                     dtype=_dtype_for(self.q))
        return M  # M[j, i] = j-th coord of frob(e_i); apply as coords @ M.T

    def gamma_exponent(self, n: int) -> int:
        """Action of the fixed topological generator of the wild quotient: eta -> eta^(1+p)."""
        return (1 + self.p) % self.p ** (n + 1) if n >= 0 else 1

    @lru_cache(maxsize=None)
    def delta_exponent(self, n: int, a: int) -> int:
        """Tame lift: the order-(p-1) unit congruent to a mod p, mod p^(n+1)."""
        mod = self.p ** (n + 1)
        x = a % mod
        for _ in range(n + 3):
            nx = pow(x, self.p, mod)
            if nx == x:
                break
            x = nx
        assert pow(x, self.p - 1, mod) == 1 % mod
        return x


def build_tower(p: int, d: int, n_max: int, N: int) -> TowerDesc:
    return TowerDesc(field=build_unramified(p, d, N), n_max=n_max)


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TowerElt:
    """p^(-den) times the integral element with the given (L, d) coords."""

    tower: TowerDesc
    level: int
    coords: np.ndarray  # shape (L, d), reduced mod p^prec, read-only
    den: int = 0
    prec: int = -1  # stored modulus exponent; -1 means tower.N

    def __post_init__(self):
        if self.prec == -1:
            object.__setattr__(self, "prec", self.tower.N)
        c = np.asarray(self.coords) % self.p**self.prec
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def p(self) -> int:
        return self.tower.p

    @property
    def effective_prec(self) -> int:
        return self.prec - self.den

    def _qq(self) -> int:
        return self.p**self.prec

    # -- ring ops -------------------------------------------------------------

    def _aligned(self, other: "TowerElt") -> tuple[np.ndarray, np.ndarray, int, int]:
        assert self.level == other.level, "level mismatch"
        den = max(self.den, other.den)
        prec = min(self.prec + den - self.den, other.prec + den - other.den)
        q = self.p**prec
        a = (self.coords.astype(object) * self.p ** (den - self.den)) % q
        b = (other.coords.astype(object) * self.p ** (den - other.den)) % q
        return a, b, den, prec

    def __add__(self, other: "TowerElt") -> "TowerElt":
        a, b, den, prec = self._aligned(other)
        return TowerElt(self.tower, self.level, (a + b) % self.p**prec, den, prec)

    def __sub__(self, other: "TowerElt") -> "TowerElt":
        a, b, den, prec = self._aligned(other)
        return TowerElt(self.tower, self.level, (a - b) % self.p**prec, den, prec)

    def __neg__(self) -> "TowerElt":
        return replace(self, coords=(-self.coords) % self._qq())

    def __mul__(self, other: "TowerElt") -> "TowerElt":
        assert self.level == other.level
        n = self.level
        t = self.tower
        L = t.level_dim(n)
        prec = min(self.prec, other.prec)
        q = self.p**prec
        fa, fb = self.coords, other.coords
        conv = [t.field.zero() for _ in range(2 * L - 1)]
        for i in range(L):
            ai = tuple(int(x) for x in fa[i])
            if any(ai):
                for j in range(L):
                    bj = tuple(int(x) for x in fb[j])
                    if any(bj):
                        prod = t.field.mul(ai, bj, q)
                        cur = conv[i + j]
                        conv[i + j] = tuple((x + y) % q for x, y in zip(cur, prod))
        out = np.zeros((L, t.d), dtype=object)
        for e in range(2 * L - 1):
            ce = conv[e]
            if any(ce):
                for idx, sgn in t._reduce_exp(n, e):
                    for jj in range(t.d):
                        out[idx, jj] = (out[idx, jj] + sgn * ce[jj]) % q
        return TowerElt(t, n, out, self.den + other.den, prec)

    def scale_int(self, c: int) -> "TowerElt":
        return replace(self, coords=(self.coords.astype(object) * c) % self._qq())

    def scale_field(self, a) -> "TowerElt":
        """Multiply by an O_k scalar (coefficientwise field multiplication)."""
        t = self.tower
        q = self._qq()
        out = np.zeros_like(self.coords, dtype=object)
        for i in range(self.coords.shape[0]):
            row = tuple(int(x) for x in self.coords[i])
            if any(row):
                out[i] = t.field.mul(a, row, q)
        return replace(self, coords=out % q)

    def div_p(self, k: int = 1) -> "TowerElt":
        return replace(self, den=self.den + k)

    def canonical(self) -> "TowerElt":
        """Strip common p factors into the denominator (minimal den form)."""
        x = self
        while x.den > 0:
            if not x.coords.any():
                return replace(x, den=0)  # zero at precision: den is moot
            if (x.coords % x.p == 0).all():
                x = TowerElt(x.tower, x.level, x.coords // x.p, x.den - 1, x.prec - 1)
            else:
                break
        return x

    def power(self, e: int) -> "TowerElt":
        t = self.tower
        out = tower_one(t, self.level, prec=self.prec)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # -- Galois ---------------------------------------------------------------

    def galois(self, u: int, f: int = 0) -> "TowerElt":
        """eta -> eta^u on the cyclotomic part, Frobenius^f on coefficients."""
        t = self.tower
        n = self.level
        if n >= 0 and math.gcd(u, t.p) != 1:
            raise ValueError("Galois exponent must be a unit mod p")
        q = self._qq()
        c = self.coords
        if f % t.d:
            c = (c @ t.frob_matrix(f).T.astype(object)) % q
        if n == -1:
            return replace(self, coords=c)
        dst, src, cf = t._galois_table(n, u % t.p ** (n + 1))
        out = np.zeros_like(c, dtype=object)
        np.add.at(out, dst, cf[:, None] * c[src])
        return replace(self, coords=out % q)

    # -- level moves ------------------------------------------------------------

    def embed(self, n: int) -> "TowerElt":
        """Inclusion k_level -> k_n (index j -> j * p^(n - level))."""
        t = self.tower
        m = self.level
        assert n >= m
        if n == m:
            return self
        out = np.zeros((t.level_dim(n), t.d), dtype=object)
        step = t.p ** (n - m) if m >= 0 else 1
        src = self.coords
        for j in range(src.shape[0]):
            out[j * step] = src[j]
        return TowerElt(t, n, out, self.den, self.prec)

    def trace_to(self, m: int) -> "TowerElt":
        """Sum over Gal(k_level / k_m); lands exactly in k_m."""
        t = self.tower
        n = self.level
        assert -1 <= m <= n
        if m == n:
            return self
        pmod = t.p ** (n + 1)
        if m == -1:
            units = [u for u in range(1, pmod) if u % t.p != 0]
        else:
            units = [(1 + t.p ** (m + 1) * k) % pmod for k in range(t.p ** (n - m))]
        q = self._qq()
        acc = np.zeros_like(self.coords, dtype=object)
        for u in units:
            acc = (acc + self.galois(u).coords) % q
        # extract k_m coordinates: support must sit on the p^(n-m) grid
        step = t.p ** (n - m) if m >= 0 else None
        Lm = t.level_dim(m)
        out = np.zeros((Lm, t.d), dtype=object)
        if m == -1:
            out[0] = acc[0]
            mask = np.ones(acc.shape[0], dtype=bool)
            mask[0] = False
        else:
            idx = np.arange(Lm) * step
            out[:] = acc[idx]
            mask = np.ones(acc.shape[0], dtype=bool)
            mask[idx] = False
        assert not (acc[mask] % q).any(), "trace image has off-grid coordinates"
        return TowerElt(t, m, out, self.den, self.prec)

    # -- diagnostics ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coords.any()

    def residual_valuation(self) -> float:
        """min coordinate valuation minus den; +inf when zero at precision."""
        if not self.coords.any():
            return math.inf
        p = self.p
        v = 0
        c = self.coords
        while v < self.prec and (c % p == 0).all():
            c = c // p
            v += 1
        return v - self.den

    def vector(self, den: int | None = None) -> np.ndarray:
        """Flatten to an ambient Z_p-vector, scaled to the requested den."""
        den = self.den if den is None else den
        assert den >= self.den
        q = self.p ** min(self.prec, self.tower.N)
        flat = (self.coords.astype(object) * self.p ** (den - self.den)) % q
        return flat.reshape(-1)


def tower_zero(t: TowerDesc, n: int, prec: int | None = None) -> TowerElt:
    return TowerElt(t, n, np.zeros((t.level_dim(n), t.d), dtype=object),
                    0, prec if prec is not None else t.N)


def tower_one(t: TowerDesc, n: int, prec: int | None = None) -> TowerElt:
    c = np.zeros((t.level_dim(n), t.d), dtype=object)
    c[0] = t.field.one()
    return TowerElt(t, n, c, 0, prec if prec is not None else t.N)


def tower_eta(t: TowerDesc, n: int) -> TowerElt:
    """zeta_{p^(n+1)} at level n."""
    assert n >= 0
    c = np.zeros((t.level_dim(n), t.d), dtype=object)
    c[1] = t.field.one()
    return TowerElt(t, n, c, 0, t.N)


def tower_scalar(t: TowerDesc, n: int, a, den: int = 0) -> TowerElt:
    """An O_k scalar viewed at level n."""
    c = np.zeros((t.level_dim(n), t.d), dtype=object)
    c[0] = tuple(a)
    return TowerElt(t, n, c, den, t.N)


def zeta_power_root(t: TowerDesc, n: int, j: int) -> TowerElt:
    """zeta_{p^j} at level n (needs j <= n + 1); exact: eta^(p^(n+1-j))."""
    assert 0 <= j <= n + 1
    if j == 0:
        return tower_one(t, n)
    e = t.p ** (n + 1 - j)
    c = np.zeros((t.level_dim(n), t.d), dtype=object)
    for idx, sgn in t._reduce_exp(n, e):
        c[idx] = t.field.scalar(sgn, t.field.one())
    return TowerElt(t, n, c, 0, t.N)


# ---------------------------------------------------------------------------
# the canonical uniformizers and their iterate identity
# ---------------------------------------------------------------------------

def uniformizer(t: TowerDesc, n: int) -> TowerElt:
    """pi_n = zeta^(phi^-(n+1)) (zeta_{p^(n+1)} - 1) for n >= -1; 0 below."""
    if n <= -1:
        return tower_zero(t, max(n, -1))
    zt = t.field.frob(t.field.zeta(), -(n + 1))
    eta = tower_eta(t, n)
    one = tower_one(t, n)
    return (eta - one).scale_field(zt)


def check_g_iterate(t: TowerDesc, n: int, m: int) -> dict:
    """Verify (pi_n + z)^(p^m) - z^(p^m) = pi_(n-m), z = zeta^(phi^-(n+1)).

    Returns a report with the residual valuation; disagreement is reported,
    not raised.
    """
    assert n >= -1 and m >= 0
    zt = t.field.frob(t.field.zeta(), -(n + 1))
    pin = uniformizer(t, n)
    z_elt = tower_scalar(t, max(n, -1), zt)
    lhs = (pin + z_elt).power(t.p**m) - tower_scalar(t, max(n, -1), t.field.pow(zt, t.p**m))
    target_level = max(n, -1)
    rhs = uniformizer(t, n - m)
    if rhs.level < target_level:
        rhs = rhs.embed(target_level)
    diff = lhs - rhs
    resid = diff.residual_valuation()
    floor = diff.effective_prec
    return {
        "n": n, "m": m,
        "residual_valuation": resid,
        "floor": floor,
        "ok": resid >= floor,
    }


# ---------------------------------------------------------------------------
# Galois group enumeration and group-ring action helpers
# ---------------------------------------------------------------------------

def galois_group(t: TowerDesc, n: int) -> list[tuple[int, int]]:
    """All (u, f) for Gal(k_n / Q_p): f Frobenius power, u cyclotomic exponent."""
    if n == -1:
        return [(1, f) for f in range(t.d)]
    pmod = t.p ** (n + 1)
    return [(u, f) for f in range(t.d) for u in range(1, pmod) if u % t.p != 0]


def galois_act(u: int, f: int, x: TowerElt) -> TowerElt:
    return x.galois(u, f)


def trace(x: TowerElt, m: int) -> TowerElt:
    return x.trace_to(m)


def apply_phi_plus_phi_inv(x: TowerElt) -> TowerElt:
    """(phi + phi^-1) acting coefficientwise (x at any level)."""
    return x.galois(1, 1) + x.galois(1, -1)

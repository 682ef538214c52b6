"""The unramified extension O_k of Z_p of degree d, in a Teichmuller power basis.

The basis generator zeta is a lift of a multiplicative generator of the
residue field, normalized so that zeta^(p^d - 1) = 1 holds exactly mod p^N.
Frobenius is then literally zeta -> zeta^p, a ring automorphism of order d.

Elements are coordinate tuples of length d in the basis 1, zeta, ..., zeta^(d-1);
the thin UnramifiedElt wrapper provides operators, while FieldDesc methods work
on raw tuples (used by the series and tower layers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .padic import ZpContext, factorize, is_prime, val_int


# ---------------------------------------------------------------------------
# polynomial helpers over Z/q, modulus monic
# ---------------------------------------------------------------------------

def _polymul_mod(a: list[int], b: list[int], modulus: list[int], q: int) -> list[int]:
    d = len(modulus) - 1
    conv = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                conv[i + j] = (conv[i + j] + ai * bj) % q
    # reduce by the monic modulus
    for k in range(len(conv) - 1, d - 1, -1):
        c = conv[k]
        if c:
            conv[k] = 0
            for i in range(d):
                conv[k - d + i] = (conv[k - d + i] - c * modulus[i]) % q
    out = conv[:d]
    out += [0] * (d - len(out))
    return out


def _polypow_mod(a: list[int], e: int, modulus: list[int], q: int) -> list[int]:
    d = len(modulus) - 1
    out = [1 % q] + [0] * (d - 1)
    base = list(a)
    while e:
        if e & 1:
            out = _polymul_mod(out, base, modulus, q)
        base = _polymul_mod(base, base, modulus, q)
        e >>= 1
    return out


def _poly_gcd_fp(a: list[int], b: list[int], p: int) -> list[int]:
    a = [x % p for x in a]
    b = [x % p for x in b]

    def trim(u):
        while u and u[-1] == 0:
            u.pop()
        return u

    a, b = trim(a), trim(b)
    while b:
        inv = pow(b[-1], -1, p)
        while len(a) >= len(b):
            c = a[-1] * inv % p
            shift = len(a) - len(b)
            for i, bi in enumerate(b):
                a[shift + i] = (a[shift + i] - c * bi) % p
            a = trim(a)
            if not a:
                break
        a, b = b, a
    return a


def _is_irreducible_fp(h: list[int], p: int) -> bool:
    """h monic of degree d irreducible over F_p, by x^(p^e) - x gcd tests."""
    d = len(h) - 1
    if d == 1:
        return True
    xpoly = [0, 1] + [0] * (d - 2)
    powers = [list(xpoly)]
    for _ in range(d):
        powers.append(_polypow_mod(powers[-1], p, h, p))
    if powers[d] != xpoly:
        return False
    for ell in factorize(d):
        e = d // ell
        diff = [(powers[e][i] - xpoly[i]) % p for i in range(d)]
        g = _poly_gcd_fp(diff, h, p)
        if len(g) - 1 > 0:
            return False
    return True


def _element_order_is(h: list[int], p: int, order: int) -> bool:
    """Does x have multiplicative order `order` in F_p[x]/(h)?"""
    d = len(h) - 1
    x = ([0, 1] + [0] * (d - 2)) if d >= 2 else [(-h[0]) % p]
    one = [1] + [0] * (d - 1)
    if _polypow_mod(x, order, h, p) != one:
        return False
    for ell in factorize(order):
        if _polypow_mod(x, order // ell, h, p) == one:
            return False
    return True


def _find_primitive_poly(p: int, d: int) -> list[int]:
    """Monic degree-d poly over F_p, irreducible, whose root generates F_{p^d}^*."""
    order = p**d - 1
    for code in range(p**d):
        coeffs = []
        c = code
        for _ in range(d):
            coeffs.append(c % p)
            c //= p
        h = coeffs + [1]
        if h[0] == 0:
            continue
        if not _is_irreducible_fp(h, p):
            continue
        if _element_order_is(h, p, order):
            return h
    raise RuntimeError(f"no primitive polynomial found for p={p}, d={d}")  # unreachable


def _mat_inv_modq(M: list[list[int]], p: int, q: int) -> list[list[int]]:
    """Inverse of a matrix that is invertible mod p, by Gaussian elimination mod q."""
    n = len(M)
    A = [[x % q for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] % p != 0), None)
        if piv is None:
            raise ValueError("matrix not invertible mod p")
        A[col], A[piv] = A[piv], A[col]
        inv = pow(A[col][col], -1, q)  # unit mod p => invertible mod q
        A[col] = [x * inv % q for x in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                c = A[r][col]
                A[r] = [(x - c * y) % q for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


# ---------------------------------------------------------------------------
# field description and elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldDesc:
    """Unramified degree-d extension of Z_p at working precision N.

    modulus: monic minimal polynomial of zeta (length d+1).
    red_rows: coordinates of zeta^(d+k) for k = 0..d-2 in the power basis.
    frob_cols[k]: columns of the matrix of Frobenius^k (image of each basis power).
    """

    p: int
    d: int
    N: int
    modulus: tuple[int, ...]
    red_rows: tuple[tuple[int, ...], ...]
    frob_cols: tuple[tuple[tuple[int, ...], ...], ...]
    q: int

    # -- raw tuple arithmetic ------------------------------------------------

    def zero(self, q: int | None = None) -> tuple[int, ...]:
        return (0,) * self.d

    def one(self, q: int | None = None) -> tuple[int, ...]:
        return ((1 % (q or self.q)),) + (0,) * (self.d - 1)

    def from_int(self, c: int, q: int | None = None) -> tuple[int, ...]:
        return (c % (q or self.q),) + (0,) * (self.d - 1)

    def zeta(self, q: int | None = None) -> tuple[int, ...]:
        if self.d == 1:
            return (self.modulus[0] and (-self.modulus[0]) % (q or self.q),)
        return (0, 1) + (0,) * (self.d - 2)

    def add(self, a, b, q: int | None = None):
        q = q or self.q
        return tuple((x + y) % q for x, y in zip(a, b))

    def sub(self, a, b, q: int | None = None):
        q = q or self.q
        return tuple((x - y) % q for x, y in zip(a, b))

    def neg(self, a, q: int | None = None):
        q = q or self.q
        return tuple((-x) % q for x in a)

    def scalar(self, c: int, a, q: int | None = None):
        q = q or self.q
        return tuple((c * x) % q for x in a)

    def mul(self, a, b, q: int | None = None):
        q = q or self.q
        d = self.d
        if d == 1:
            return ((a[0] * b[0]) % q,)
        conv = [0] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    conv[i + j] += ai * bj
        out = [c % q for c in conv[:d]]
        for k in range(d - 1):
            c = conv[d + k] % q
            if c:
                row = self.red_rows[k]
                for i in range(d):
                    out[i] = (out[i] + c * row[i]) % q
        return tuple(out)

    def pow(self, a, e: int, q: int | None = None):
        q = q or self.q
        out = self.one(q)
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base, q)
            base = self.mul(base, base, q)
            e >>= 1
        return out

    def frob(self, a, k: int, q: int | None = None):
        """Frobenius^k, k any integer (reduced mod d)."""
        q = q or self.q
        k %= self.d
        if k == 0:
            return tuple(x % q for x in a)
        cols = self.frob_cols[k]
        out = [0] * self.d
        for i, ai in enumerate(a):
            if ai:
                col = cols[i]
                for j in range(self.d):
                    out[j] = (out[j] + ai * col[j]) % q
        return tuple(out)

    def val(self, a, cap: int | None = None) -> int:
        """min p-adic valuation over coordinates, capped (cap = zero at precision)."""
        cap = cap if cap is not None else self.N
        return min((val_int(x, self.p, cap) for x in a), default=cap)

    def is_zero(self, a) -> bool:
        return all(x % self.q == 0 for x in a)

    def inv(self, a, q: int | None = None):
        """Inverse of a unit (Newton lift of the mod-p inverse via linear solve)."""
        q = q or self.q
        d = self.d
        if d == 1:
            e = val_int(a[0], self.p, self.N)
            if e > 0:
                raise ZeroDivisionError("not a unit")
            return (pow(a[0], -1, q),)
        # matrix of multiplication by a in the power basis
        cols = []
        for i in range(d):
            ei = tuple(int(j == i) for j in range(d))
            cols.append(self.mul(a, ei, q))
        M = [[cols[j][i] for j in range(d)] for i in range(d)]
        try:
            Minv = _mat_inv_modq(M, self.p, q)
        except ValueError:
            raise ZeroDivisionError("not a unit") from None
        return tuple(Minv[i][0] % q for i in range(d))

    def divp_exact(self, a, k: int):
        pk = self.p**k
        if any(x % pk for x in a):
            raise ValueError("coordinates not divisible by p^k")
        return tuple(x // pk for x in a)


class UnramifiedElt:
    """Convenience wrapper: an element of O_k with operator overloads."""

    __slots__ = ("coords", "field")

    def __init__(self, coords, field: FieldDesc):
        self.coords = tuple(c % field.q for c in coords)
        self.field = field

    def __add__(self, other):
        return UnramifiedElt(self.field.add(self.coords, _c(other, self.field)), self.field)

    def __sub__(self, other):
        return UnramifiedElt(self.field.sub(self.coords, _c(other, self.field)), self.field)

    def __mul__(self, other):
        return UnramifiedElt(self.field.mul(self.coords, _c(other, self.field)), self.field)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return UnramifiedElt(self.field.sub(_c(other, self.field), self.coords), self.field)

    def __neg__(self):
        return UnramifiedElt(self.field.neg(self.coords), self.field)

    def __pow__(self, e: int):
        return UnramifiedElt(self.field.pow(self.coords, e), self.field)

    def __eq__(self, other):
        if isinstance(other, UnramifiedElt):
            return self.coords == other.coords
        return self.coords == _c(other, self.field)

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return f"UnramifiedElt{self.coords}"

    def frobenius(self, k: int = 1) -> "UnramifiedElt":
        return UnramifiedElt(self.field.frob(self.coords, k), self.field)

    def valuation(self):
        """p-adic valuation; math.inf when zero at this precision."""
        if self.field.is_zero(self.coords):
            return math.inf
        return self.field.val(self.coords)

    def inverse(self) -> "UnramifiedElt":
        return UnramifiedElt(self.field.inv(self.coords), self.field)


def _c(x, field: FieldDesc):
    if isinstance(x, UnramifiedElt):
        return x.coords
    if isinstance(x, int):
        return field.from_int(x)
    return tuple(x)


def frobenius(x: UnramifiedElt, power: int = 1) -> UnramifiedElt:
    return x.frobenius(power)


def valuation(x: UnramifiedElt):
    return x.valuation()


@lru_cache(maxsize=None)
def build_unramified(p: int, d: int, N: int) -> FieldDesc:
    """Construct O_k = Z_p[zeta] with zeta a Teichmuller generator, exact mod p^N.

    The residue of zeta generates F_{p^d}^* and zeta^(p^d) = zeta holds exactly,
    so Frobenius (zeta -> zeta^p) has order exactly d.
    """
    if p == 2:
        raise ValueError("p = 2 is out of scope")
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if d < 1 or N < 1:
        raise ValueError("need d >= 1 and N >= 1")
    q = p**N
    zp = ZpContext(p, N)

    if d == 1:
        g = next(a for a in range(2, p) if _element_order_is([(-a) % p, 1], p, p - 1))
        zeta0 = zp.teichmuller(g)
        fd = FieldDesc(
            p=p, d=1, N=N, q=q,
            modulus=((-zeta0) % q, 1),
            red_rows=(),
            frob_cols=(((1,),),),
        )
        _check_field(fd)
        return fd

    hbar = _find_primitive_poly(p, d)
    # any monic lift presents the unramified extension; Teichmuller-stabilize x
    lift = [c % q for c in hbar]
    x = [0, 1] + [0] * (d - 2)
    zeta_x = x
    for _ in range(N + 2):
        nxt = _polypow_mod(zeta_x, p**d, lift, q)
        if nxt == zeta_x:
            break
        zeta_x = nxt
    assert _polypow_mod(zeta_x, p**d, lift, q) == zeta_x, "Teichmuller lift did not stabilize"

    # powers of zeta in the x-basis, then change basis so that zeta is the generator
    pows = [[1] + [0] * (d - 1)]
    for _ in range(2 * d - 1):
        pows.append(_polymul_mod(pows[-1], zeta_x, lift, q))
    C = [[pows[j][i] for j in range(d)] for i in range(d)]  # columns zeta^j
    Cinv = _mat_inv_modq(C, p, q)

    def to_zeta_basis(vec_x: list[int]) -> tuple[int, ...]:
        return tuple(sum(Cinv[i][j] * vec_x[j] for j in range(d)) % q for i in range(d))

    red_rows = tuple(to_zeta_basis(pows[d + k]) for k in range(d - 1))
    zd = to_zeta_basis(pows[d])
    modulus = tuple((-zd[i]) % q for i in range(d)) + (1,)

    # Frobenius matrices: phi^k sends zeta^i to zeta^(p^k * i)
    frob_all = []
    for k in range(d):
        cols = []
        for i in range(d):
            e = (p**k * i) % (p**d - 1)
            img_x = [1] + [0] * (d - 1) if i == 0 else _polypow_mod(zeta_x, e, lift, q)
            cols.append(to_zeta_basis(img_x))
        frob_all.append(tuple(cols))
    fd = FieldDesc(p=p, d=d, N=N, q=q, modulus=modulus,
                   red_rows=red_rows, frob_cols=tuple(frob_all))
    _check_field(fd)
    return fd


def _check_field(fd: FieldDesc) -> None:
    z = fd.zeta()
    assert fd.pow(z, fd.p**fd.d - 1) == fd.one(), "generator is not a (p^d-1)-th root of unity"
    # order is exactly p^d - 1: no collapse to a proper subfield
    for ell in factorize(fd.p**fd.d - 1):
        assert fd.pow(z, (fd.p**fd.d - 1) // ell) != fd.one()
    assert fd.frob(z, 1) == fd.pow(z, fd.p), "Frobenius does not act as zeta -> zeta^p"
    assert fd.frob(z, fd.d) == z, "Frobenius order wrong"

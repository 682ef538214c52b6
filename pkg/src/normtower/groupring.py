"""The group ring Z_p[F]/(F^d - 1) for the unramified Galois group, the
cyclotomic polynomial families omega_n / omega_n^{+-}, the alternating
p-power sums q_n, and character idempotents for the tame quotient.

Group-ring elements are coefficient tuples indexed by powers of F (the
Frobenius); multiplication is cyclic convolution of length d.
Integer polynomials (omega family) are plain coefficient lists over Z,
lowest degree first - those identities are exact, no precision involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .padic import ZpContext, val_int
from .snf import kernel_basis, quotient_invariants, smith_normal_form, span_contains_all


# ---------------------------------------------------------------------------
# group ring
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupRing:
    d: int
    p: int
    N: int

    @property
    def q(self) -> int:
        return self.p**self.N

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.d

    def one(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.d - 1)

    def F(self, k: int = 1) -> tuple[int, ...]:
        return tuple(int(i == k % self.d) for i in range(self.d))

    def from_int(self, c: int) -> tuple[int, ...]:
        return (c % self.q,) + (0,) * (self.d - 1)

    def add(self, a, b):
        return tuple((x + y) % self.q for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.q for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.q for x in a)

    def scalar(self, c: int, a):
        return tuple((c * x) % self.q for x in a)

    def mul(self, a, b):
        d, q = self.d, self.q
        out = [0] * d
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[(i + j) % d] = (out[(i + j) % d] + ai * bj) % q
        return tuple(out)

    def is_zero(self, a) -> bool:
        return all(x % self.q == 0 for x in a)

    def mult_matrix(self, a) -> np.ndarray:
        """d x d matrix of multiplication by a on the F-power basis."""
        cols = [self.mul(a, self.F(i)) for i in range(self.d)]
        return np.array(cols, dtype=object).T.astype(object)


def phi_plus_phi_inv(ring: GroupRing) -> tuple[int, ...]:
    """F + F^(d-1); the element 2 when d = 1, 2F when d = 2."""
    d = ring.d
    if d == 1:
        return ring.from_int(2)
    if d == 2:
        return ring.scalar(2, ring.F(1))
    return ring.add(ring.F(1), ring.F(d - 1))


def alternating_annihilator_generator(ring: GroupRing) -> tuple[int, ...]:
    """1 - F^2 + F^4 - ... - F^(d-2), defined for d = 0 mod 4."""
    if ring.d % 4 != 0:
        raise ValueError("closed-form annihilator generator needs d = 0 mod 4")
    out = [0] * ring.d
    for i in range(ring.d // 2):
        out[2 * i] = (1 if i % 2 == 0 else -1) % ring.q
    return tuple(out)


def is_unit(ring: GroupRing, a) -> tuple[bool, tuple[int, ...] | None]:
    """Unit test in Z_p[F]/(F^d - 1): unit iff unit mod p; Newton-lift the inverse."""
    p, d, q = ring.p, ring.d, ring.q
    amodp = [x % p for x in a]
    cyc = [-1 % p] + [0] * (d - 1) + [1]  # F^d - 1
    g, u = _poly_xgcd_fp(amodp, cyc, p)
    if len(g) != 1:
        return False, None
    ginv = pow(g[0], -1, p)
    inv = tuple((c * ginv) % p for c in (u + [0] * d)[:d])
    x = inv
    # Newton: x <- x(2 - a x)
    for _ in range(ring.N.bit_length() + 1):
        ax = ring.mul(a, x)
        x = ring.mul(x, ring.sub(ring.scalar(2, ring.one()), ax))
    assert ring.mul(a, x) == ring.one(), "unit inversion failed to converge"
    return True, x


def _poly_xgcd_fp(a: list[int], m: list[int], p: int) -> tuple[list[int], list[int]]:
    """(gcd, u) with u*a = gcd (mod m) over F_p."""

    def trim(u):
        u = [x % p for x in u]
        while u and u[-1] == 0:
            u.pop()
        return u

    r0, r1 = trim(m), trim(a)
    s0, s1 = [0], [1]
    while r1:
        # divide r0 by r1
        rem = list(r0)
        quo = [0] * max(1, len(rem) - len(r1) + 1)
        inv = pow(r1[-1], -1, p)
        while len(rem) >= len(r1) and any(rem):
            if rem[-1] == 0:
                rem.pop()
                continue
            c = rem[-1] * inv % p
            shift = len(rem) - len(r1)
            quo[shift] = c
            for i, x in enumerate(r1):
                rem[shift + i] = (rem[shift + i] - c * x) % p
            rem = trim(rem)
            if not rem:
                break
        new_s = _polsub_fp(s0, _polmul_fp(quo, s1, p), p)
        r0, r1 = r1, trim(rem)
        s0, s1 = s1, new_s
    return r0 if r0 else [0], s0


def _polmul_fp(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _polsub_fp(a, b, p):
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    out = [(x - y) % p for x, y in zip(a, b)]
    while out and out[-1] == 0:
        out.pop()
    return out


def annihilator(ring: GroupRing, a) -> tuple[np.ndarray, int]:
    """(generator matrix, Z_p-rank) of Ann(a) = ker(mult-by-a), via SNF."""
    M = ring.mult_matrix(a) % ring.q
    K = kernel_basis(M, ring.p, ring.N)
    res = smith_normal_form(M, ring.p, ring.N)
    rank_ann = ring.d - res.rank()
    return K, rank_ann


def annihilator_matches_closed_form(ring: GroupRing) -> bool:
    """Ann(F + F^-1) equals the span of the alternating generator when d = 0 mod 4
    (and is zero otherwise), as a lattice statement."""
    x = phi_plus_phi_inv(ring)
    K, rank_ann = annihilator(ring, x)
    if ring.d % 4 != 0:
        return rank_ann == 0
    if rank_ann != 2:
        return False
    alpha = alternating_annihilator_generator(ring)
    span = np.array([ring.mul(ring.F(i), alpha) for i in range(ring.d)], dtype=object).T
    return (span_contains_all(span, K, ring.p, ring.N)
            and span_contains_all(K, span, ring.p, ring.N))


# ---------------------------------------------------------------------------
# integer polynomials: omega family (exact over Z)
# ---------------------------------------------------------------------------

def poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def poly_trim(a: list[int]) -> list[int]:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def one_plus_x_pow(e: int) -> list[int]:
    """(1 + X)^e as integer coefficients."""
    from math import comb

    return [comb(e, k) for k in range(e + 1)]


def omega_n(p: int, n: int) -> list[int]:
    """(1+X)^(p^n) - 1."""
    out = one_plus_x_pow(p**n)
    out[0] -= 1
    return out


def cyclotomic_phi(p: int, m: int) -> list[int]:
    """Phi_m(1+X) = sum_{i<p} (1+X)^(i p^(m-1)), the p^m-th cyclotomic polynomial at 1+X."""
    if m < 1:
        raise ValueError("m >= 1")
    acc = [0]
    for i in range(p):
        term = one_plus_x_pow(i * p ** (m - 1))
        acc = [x + y for x, y in zip(acc + [0] * len(term), term + [0] * len(acc))]
    return poly_trim(acc)


@dataclass(frozen=True)
class OmegaFamily:
    p: int
    n: int
    omega: tuple[int, ...]
    phis: tuple[tuple[int, ...], ...]        # Phi_1(1+X) .. Phi_n(1+X)
    omega_tilde_plus: tuple[int, ...]
    omega_tilde_minus: tuple[int, ...]
    omega_plus: tuple[int, ...]
    omega_minus: tuple[int, ...]


def omega_family(p: int, n: int) -> OmegaFamily:
    """omega_n and its plus/minus factorizations; the identity
    omega_n = omega-tilde_n^(-/+) * omega_n^(+/-) is asserted exactly over Z."""
    if n < 0:
        raise ValueError("n >= 0")
    phis = [cyclotomic_phi(p, m) for m in range(1, n + 1)]
    tp, tm = [1], [1]
    for m in range(1, n + 1):
        if m % 2 == 0:
            tp = poly_mul(tp, phis[m - 1])
        else:
            tm = poly_mul(tm, phis[m - 1])
    op = poly_trim(poly_mul([0, 1], tp))
    om = poly_trim(poly_mul([0, 1], tm))
    w = omega_n(p, n)
    assert poly_trim(poly_mul(tm, op)) == poly_trim(w), "omega_n != tilde_minus * plus"
    assert poly_trim(poly_mul(tp, om)) == poly_trim(w), "omega_n != tilde_plus * minus"
    return OmegaFamily(
        p=p, n=n,
        omega=tuple(w),
        phis=tuple(tuple(f) for f in phis),
        omega_tilde_plus=tuple(poly_trim(tp)),
        omega_tilde_minus=tuple(poly_trim(tm)),
        omega_plus=tuple(op),
        omega_minus=tuple(om),
    )


def q_values(p: int, n: int) -> tuple[int, int, int]:
    """(q_n, q_n^+, q_n^-). q_n = sum_{i=0..n} (-1)^i p^(n-i); q_{-1} = 0.

    The n = -1 base value 0 is forced by q_n + q_{n-1} = p^n and by
    q_n^+ + q_n^- = p^n at n = 0.
    """
    if n < -1:
        raise ValueError("n >= -1")

    def q(m: int) -> int:
        if m == -1:
            return 0
        return sum((-1) ** i * p ** (m - i) for i in range(m + 1))

    qn = q(n)
    if n == -1:
        return 0, 0, 0
    qp = q(n) if n % 2 == 0 else q(n - 1)
    qm = q(n) if n % 2 == 1 else q(n - 1)
    assert qp + qm == p**n, "q_n^+ + q_n^- != p^n"
    return qn, qp, qm


# ---------------------------------------------------------------------------
# character idempotents for the tame quotient (cyclic of order p-1)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CharIdempotent:
    """eps_chi = (1/(p-1)) sum_sigma chi(sigma) sigma^{-1} in Z_p[Delta].

    Delta is enumerated as powers of a fixed generator; chi_j sends the
    generator to the j-th power of the Teichmuller lift of its residue.
    coeffs[k] is the coefficient of generator^k.
    """

    j: int
    p: int
    N: int
    coeffs: tuple[int, ...]

    @property
    def trivial(self) -> bool:
        return self.j == 0


def delta_generator(p: int) -> int:
    """Smallest primitive root mod p (generator of the tame quotient)."""
    for g in range(2, p):
        ok = all(pow(g, (p - 1) // ell, p) != 1 for ell in _prime_divisors(p - 1))
        if ok:
            return g
    raise RuntimeError("no primitive root found")


def _prime_divisors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def idempotents(p: int, N: int) -> list[CharIdempotent]:
    """All p-1 character idempotents; orthogonality and completeness verified."""
    zp = ZpContext(p, N)
    q = zp.q
    g = delta_generator(p)
    tg = zp.teichmuller(g)  # chi_1(generator)
    inv_pm1 = zp.inv((p - 1) % q)
    out = []
    for j in range(p - 1):
        coeffs = [0] * (p - 1)
        for k in range(p - 1):
            # chi_j(g^k) * (g^k)^{-1}: inverse of generator^k is generator^{p-1-k}
            chi_val = pow(tg, (j * k) % (p - 1), q)
            coeffs[(p - 1 - k) % (p - 1)] = (coeffs[(p - 1 - k) % (p - 1)] + chi_val) % q
        out.append(CharIdempotent(j=j, p=p, N=N,
                                  coeffs=tuple(c * inv_pm1 % q for c in coeffs)))
    _check_idempotents(out, p, q)
    return out


def _conv_delta(a, b, p, q):
    n = p - 1
    out = [0] * n
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[(i + j) % n] = (out[(i + j) % n] + x * y) % q
    return tuple(out)


def _check_idempotents(eps: list[CharIdempotent], p: int, q: int) -> None:
    n = p - 1
    total = [0] * n
    for e in eps:
        sq = _conv_delta(e.coeffs, e.coeffs, p, q)
        assert sq == e.coeffs, "idempotent not idempotent"
        total = [(x + y) % q for x, y in zip(total, e.coeffs)]
    assert tuple(total) == (1,) + (0,) * (n - 1), "idempotents do not sum to 1"
    for a in eps:
        for b in eps:
            if a.j != b.j:
                prod = _conv_delta(a.coeffs, b.coeffs, p, q)
                assert all(x % q == 0 for x in prod), "idempotents not orthogonal"


def delta_of(d: int, chi_trivial: bool) -> int:
    """The freeness defect: 2 iff d = 0 (mod 4) and chi is trivial, else 0."""
    return 2 if (d % 4 == 0 and chi_trivial) else 0

"""Fixed-precision arithmetic in Z_p mod p^N.

Scalars are plain Python ints reduced into [0, p^N); a ZpContext carries
(p, N) and provides the operations that need context. All arithmetic is
exact mod p^N and the precision exponent N never changes silently: an
element whose residue vanishes is "zero at precision N", not exact zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class PrecisionExhausted(Exception):
    """A decision (pivot, membership, rank) fell inside the precision margin."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; fine for the desk-scale p^d - 1 sizes here."""
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def val_int(a: int, p: int, cap: int) -> int:
    """p-adic valuation of the residue a, capped at `cap` (0 -> cap)."""
    a = abs(a)
    if a == 0:
        return cap
    v = 0
    while v < cap and a % p == 0:
        a //= p
        v += 1
    return v


@dataclass(frozen=True)
class ZpContext:
    p: int
    N: int
    q: int = field(init=False)

    def __post_init__(self):
        if self.p == 2:
            raise ValueError("p = 2 is out of scope")
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.N < 1:
            raise ValueError("precision exponent must be >= 1")
        object.__setattr__(self, "q", self.p**self.N)

    def red(self, a: int) -> int:
        return a % self.q

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def val(self, a: int) -> int:
        return val_int(a % self.q, self.p, self.N)

    def unit_part(self, a: int) -> tuple[int, int]:
        """a = p^e * u with u a unit (or (N, 0) for zero at precision)."""
        a %= self.q
        if a == 0:
            return self.N, 0
        e = self.val(a)
        return e, (a // self.p**e) % self.q

    def inv(self, a: int) -> int:
        """Inverse of a unit mod p^N (Hensel lift of the mod-p inverse)."""
        a %= self.q
        if a % self.p == 0:
            raise ZeroDivisionError(f"{a} is not a unit mod {self.p}^{self.N}")
        x = pow(a % self.p, -1, self.p)
        k = 1
        while k < self.N:
            k *= 2
            m = self.p ** min(k, self.N)
            x = x * (2 - a * x) % m
        return x % self.q

    def teichmuller(self, a: int) -> int:
        """The unique x = a (mod p) with x^(p-1) = 1 (mod p^N)."""
        a %= self.q
        if a % self.p == 0:
            raise ZeroDivisionError("Teichmuller lift needs a unit residue")
        x = a
        for _ in range(self.N + 1):
            nx = pow(x, self.p, self.q)
            if nx == x:
                break
            x = nx
        assert pow(x, self.p, self.q) == x, "Teichmuller iteration did not stabilize"
        return x


def teichmuller(a: int, p: int, N: int) -> int:
    return ZpContext(p, N).teichmuller(a)


def floor_log(x: int, base: int) -> int:
    if x < 1:
        return 0
    return int(math.log(x) / math.log(base) + 1e-9)

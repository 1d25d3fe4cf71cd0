"""Squarefree-modulus arithmetic.

Prime tables, primorials, the cofactors P_n = P / gcd(P, n), the modular
inverses used throughout (inverse of p modulo P/p, inverse of P/p modulo p,
and the idempotents built from them), and a small CRT solver.

All moduli are plain Python ints, so primorials with thousands of digits
are handled exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, reduce
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np


class ModulusError(ValueError):
    """Raised for a divisor/prime that does not divide the modulus, or a bad CRT system."""


# ---------------------------------------------------------------------------
# primes


def sieve_primes(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (odd-only Eratosthenes)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    if limit < 3:
        return np.array([2], dtype=np.int64)
    # index i <-> odd number 2i+1
    size = (limit - 1) // 2 + 1
    odd = np.ones(size, dtype=bool)
    odd[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2 :: p] = False
    primes = 2 * np.flatnonzero(odd).astype(np.int64) + 1
    return np.concatenate(([2], primes)).astype(np.int64)


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: tuple[int, ...]

    @classmethod
    def build(cls, limit: int) -> "PrimeTable":
        return cls(limit, tuple(int(p) for p in sieve_primes(limit)))

    def upto(self, z: float) -> tuple[int, ...]:
        """Primes <= z (z may be real); z must not exceed the table limit."""
        bound = math.floor(z)
        if bound > self.limit:
            raise ValueError(f"prime table limit {self.limit} < {bound}")
        import bisect

        return self.primes[: bisect.bisect_right(self.primes, bound)]


_TABLE = PrimeTable.build(1 << 16)


def prime_table(limit: int = 0) -> PrimeTable:
    """Process-wide prime table covering at least ``limit``; grown on demand."""
    global _TABLE
    if limit > _TABLE.limit:
        _TABLE = PrimeTable.build(max(limit, 2 * _TABLE.limit))
    return _TABLE


def primes_upto(z: float) -> tuple[int, ...]:
    return prime_table(math.floor(z)).upto(z)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test.

    Table lookup for small n, otherwise Miller-Rabin with the first twelve
    prime bases, which is exact for n < 3.3 * 10**24 (covers all 64-bit n).
    """
    if n < 2:
        return False
    table = _TABLE
    if n <= table.limit:
        import bisect

        i = bisect.bisect_left(table.primes, n)
        return i < len(table.primes) and table.primes[i] == n
    for p in _MR_BASES:
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize_small(n: int) -> list[int]:
    """Distinct prime factors of n by trial division (n up to ~10**12)."""
    if n < 1:
        raise ValueError("n must be positive")
    out = []
    for p in _TABLE.primes:
        if p * p > n:
            break
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
    if n > 1:
        if n > _TABLE.limit**2:
            f = 3 if not out or out[-1] < 3 else out[-1] + 2
            while f * f <= n:
                if n % f == 0:
                    out.append(f)
                    while n % f == 0:
                        n //= f
                f += 2
            if n > 1:
                out.append(n)
        else:
            out.append(n)
    return out


def omega_count(n: int) -> int:
    """Number of distinct prime factors of n."""
    return len(factorize_small(n))


def mobius(n: int) -> int:
    if n == 1:
        return 1
    k = 0
    for p in factorize_small(n):
        if n % (p * p) == 0:
            return 0
        k += 1
    return -1 if k % 2 else 1


def is_squarefree(n: int) -> bool:
    return mobius(n) != 0


# ---------------------------------------------------------------------------
# squarefree moduli


@dataclass(frozen=True)
class SquareFreeModulus:
    """A squarefree P >= 1 together with its sorted prime factors."""

    value: int
    factors: tuple[int, ...]

    def __post_init__(self):
        if self.value < 1:
            raise ModulusError("modulus must be >= 1")
        if list(self.factors) != sorted(set(self.factors)):
            raise ModulusError("factors must be distinct and sorted")
        if math.prod(self.factors) != self.value:
            raise ModulusError("value is not the product of its factors")

    @classmethod
    def from_factors(cls, primes: Iterable[int]) -> "SquareFreeModulus":
        fs = tuple(sorted(int(p) for p in primes))
        if len(set(fs)) != len(fs):
            raise ModulusError(f"repeated prime in {fs}; product is not squarefree")
        return cls(math.prod(fs), fs)

    @classmethod
    def from_int(cls, value: int) -> "SquareFreeModulus":
        """Factor a small squarefree integer."""
        if value < 1:
            raise ModulusError("modulus must be >= 1")
        fs = factorize_small(value)
        if math.prod(fs) != value:
            raise ModulusError(f"{value} is not squarefree")
        return cls(value, tuple(fs))

    def __int__(self) -> int:
        return self.value

    def __len__(self) -> int:
        return len(self.factors)

    def __contains__(self, p: int) -> bool:
        return p in self._factor_set

    @cached_property
    def _factor_set(self) -> frozenset:
        return frozenset(self.factors)

    def divides(self, d: int) -> bool:
        """True iff d | P (d a positive integer)."""
        return d >= 1 and self.value % d == 0

    def restrict(self, keep) -> "SquareFreeModulus":
        return SquareFreeModulus.from_factors(p for p in self.factors if keep(p))

    def divisors(self) -> list[int]:
        """All divisors of P, sorted."""
        out = [1]
        for p in self.factors:
            out += [d * p for d in out]
        return sorted(out)

    def divisor_moduli(self):
        """Yield every divisor d of P as a SquareFreeModulus (increasing #factors)."""
        for r in range(len(self.factors) + 1):
            for combo in combinations(self.factors, r):
                yield SquareFreeModulus(math.prod(combo), combo)


def primorial(z: float) -> SquareFreeModulus:
    """Product of all primes <= z."""
    return SquareFreeModulus.from_factors(primes_upto(z))


def cofactor(P: SquareFreeModulus, n: int) -> SquareFreeModulus:
    """P_n = P / gcd(P, n): drop every prime of P dividing n.

    gcd(P, 0) = P, so cofactor(P, 0) is 1.
    """
    return P.restrict(lambda p: n % p != 0)


def _require_divisor(P: SquareFreeModulus, d: int) -> None:
    if not P.divides(d):
        raise ModulusError(f"{d} does not divide {P.value}")


def _require_prime_factor(P: SquareFreeModulus, p: int) -> None:
    if p not in P:
        raise ModulusError(f"{p} is not a prime factor of {P.value}")


def inverse_of_cofactor(P: SquareFreeModulus, p: int) -> int:
    """The residue r in [1, p-1] with (P/p) * r = 1 (mod p); 1 when p = 2."""
    _require_prime_factor(P, p)
    return pow((P.value // p) % p, -1, p) if p > 2 else 1


def idempotent_mod_P(P: SquareFreeModulus, p: int) -> int:
    """e_p = inverse_of_cofactor(P, p) * (P/p): 1 mod p, 0 mod P/p."""
    return inverse_of_cofactor(P, p) * (P.value // p) % P.value


def inverse_bar(P: SquareFreeModulus, d: int) -> int:
    """d-bar in [1, P]: d * dbar = 1 (mod P/d) and dbar = 1 (mod p) for p | d.

    Agrees modulo P/d with the product of the single-prime inverses, which is
    the only residue class any formula depends on.
    """
    _require_divisor(P, d)
    Pd = P.value // d
    inv = pow(d % Pd, -1, Pd) if Pd > 1 else 0
    z = crt_pair(inv, Pd, 1, d)
    return z if z else P.value


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    """Solution in [0, m1*m2) of z = r1 (mod m1), z = r2 (mod m2), coprime moduli."""
    if m1 == 1:
        return r2 % m2
    if m2 == 1:
        return r1 % m1
    t = (r2 - r1) * pow(m1, -1, m2) % m2
    return r1 + m1 * t


def crt_solve(residues: Sequence[tuple[int, int]]) -> int:
    """Unique solution in [1, M] of z = r_i (mod m_i), M the product of moduli."""
    mods = [m for m, _ in residues]
    for a, b in combinations(mods, 2):
        if math.gcd(a, b) != 1:
            raise ModulusError(f"moduli {a} and {b} are not coprime")
    if any(m < 1 for m in mods):
        raise ModulusError("moduli must be positive")
    z, M = 0, 1
    for m, r in residues:
        z = crt_pair(z, M, r, m)
        M *= m
    return z if z else M


# ---------------------------------------------------------------------------
# (N, P) instances


@dataclass(frozen=True)
class ProblemInstance:
    """The pair (N, P) with the derived quantities used everywhere.

    N_P = gcd(N, P); P_2N, P_6N are the cofactors of 2N and 6N;
    c = gcd(NP, 6) / gcd(N, 6) divides every admissible residue, and
    c_prime = gcd(NP, 2) / gcd(N, 2).
    """

    N: int
    P: SquareFreeModulus
    N_P: int = field(init=False)
    P_2N: SquareFreeModulus = field(init=False)
    P_6N: SquareFreeModulus = field(init=False)
    c: int = field(init=False)
    c_prime: int = field(init=False)

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be a positive integer")
        N, P = self.N, self.P
        set_ = object.__setattr__
        set_(self, "N_P", math.gcd(N, P.value))
        set_(self, "P_2N", cofactor(P, 2 * N))
        set_(self, "P_6N", cofactor(P, 6 * N))
        set_(self, "c", math.gcd(N * P.value, 6) // math.gcd(N, 6))
        set_(self, "c_prime", math.gcd(N * P.value, 2) // math.gcd(N, 2))

    @classmethod
    def of(cls, N: int, P) -> "ProblemInstance":
        if isinstance(P, int):
            P = SquareFreeModulus.from_int(P)
        return cls(N, P)

    @classmethod
    def goldbach(cls, N: int) -> "ProblemInstance":
        """P = product of all primes <= sqrt(2N)."""
        return cls(N, primorial(math.isqrt(2 * N)))

    @property
    def Pv(self) -> int:
        return self.P.value

    @cached_property
    def N_P_primes(self) -> tuple[int, ...]:
        return tuple(p for p in self.P.factors if self.N % p == 0)

    def with_modulus(self, P: SquareFreeModulus, N: int | None = None) -> "ProblemInstance":
        return ProblemInstance(self.N if N is None else N, P)

    def slice_divisors(self) -> list[int]:
        return self.P_6N.divisors()

    def require_slice(self, d: int) -> None:
        if not self.P_6N.divides(d):
            raise ModulusError(f"{d} does not divide P_6N = {self.P_6N.value}")


def gcd_many(values: Iterable[int]) -> int:
    return reduce(math.gcd, values, 0)

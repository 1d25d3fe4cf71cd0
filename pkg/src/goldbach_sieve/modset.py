"""The modulo set: pairs (a, b) of divisors of P with gcd(a, b) | 2N and their
least offsets m_ab (least m >= 0 with a | N - m and b | N + m).

Everything here is exponential in the number of primes of P and is meant for
small moduli; the closed forms in :mod:`spectra` cover large P.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

from .modulus import (
    ModulusError,
    ProblemInstance,
    crt_pair,
    idempotent_mod_P,
    mobius,
)

MAX_Q_PRIMES = 6
SINGULAR_EPS = 1e-9


class QSizeError(ValueError):
    pass


@dataclass(frozen=True)
class ModPair:
    a: int
    b: int
    lcm: int
    m: int

    @property
    def A(self) -> int:
        return self.lcm - 2 * self.m

    def n_floor(self, x) -> int:
        """n_ab(x) = floor((x + m_ab) / [a, b])."""
        return math.floor((x + self.m) / self.lcm)

    def B(self, x) -> int:
        return self.A + 2 * self.n_floor(x) * self.lcm


def least_offset(inst: ProblemInstance, a: int, b: int) -> int:
    """m_ab via CRT, one congruence per prime of [a, b]."""
    P = inst.P
    if not (P.divides(a) and P.divides(b)):
        raise ModulusError("a and b must divide P")
    if (2 * inst.N) % math.gcd(a, b):
        raise ModulusError(f"gcd({a}, {b}) does not divide 2N; no offset exists")
    z, M = 0, 1
    for q in P.factors:
        if a % q == 0:
            r = inst.N % q
        elif b % q == 0:
            r = -inst.N % q
        else:
            continue
        z = crt_pair(z, M, r, q)
        M *= q
    return z % M


def offset_reflection_check(inst: ProblemInstance, a: int, b: int) -> bool:
    """m_ab + m_ba is 0 when [a, b] | N and [a, b] otherwise."""
    L = math.lcm(a, b)
    total = least_offset(inst, a, b) + least_offset(inst, b, a)
    return total == (0 if inst.N % L == 0 else L)


def canonical_offset(inst: ProblemInstance, a: int, b: int) -> int:
    """m'_ab mod [a, b], assembled from the idempotents of P."""
    N, P = inst.N, inst.P
    L = math.lcm(a, b)
    a1 = a // math.gcd(2 * N, a)
    b1 = b // math.gcd(2 * N, b)
    m = 0
    if L % 2 == 0 and N % 2 == 1:
        m += N * idempotent_mod_P(P, 2)
    for p in P.factors:
        if a1 % p == 0:
            m += N * idempotent_mod_P(P, p)
        if b1 % p == 0:
            m -= N * idempotent_mod_P(P, p)
    return m % L


@dataclass(frozen=True)
class ModuloSet:
    instance: ProblemInstance
    pairs: tuple

    @classmethod
    def build(cls, inst: ProblemInstance, max_primes: int = MAX_Q_PRIMES) -> "ModuloSet":
        if len(inst.P) > max_primes:
            raise QSizeError(f"#P = {len(inst.P)} exceeds {max_primes}")
        two_n = 2 * inst.N
        partial = [(1, 1)]
        for q in inst.P.factors:
            nxt = []
            for a, b in partial:
                nxt += [(a, b), (a * q, b), (a, b * q)]
                if two_n % q == 0:
                    nxt.append((a * q, b * q))
            partial = nxt
        pairs = tuple(
            sorted(
                (ModPair(a, b, math.lcm(a, b), least_offset(inst, a, b)) for a, b in partial),
                key=lambda mp: (mp.a, mp.b),
            )
        )
        return cls(inst, pairs)

    @cached_property
    def slices(self) -> dict:
        """Q_d = {(a, b) in Q : ab = P/d, gcd(b, 2N) = 1} for every d | P."""
        P = self.instance.Pv
        out = {d: [] for d in self.instance.P.divisors()}
        for mp in self.pairs:
            ab = mp.a * mp.b
            if P % ab == 0 and math.gcd(mp.b, 2 * self.instance.N) == 1:
                out[P // ab].append(mp)
        return {d: tuple(v) for d, v in out.items()}

    def unit_set(self, n: int) -> list[ModPair]:
        return [mp for mp in self.pairs if (n - mp.m) % mp.lcm == 0]

    def dual_unit_set(self, n: int) -> list[ModPair]:
        return [mp for mp in self.pairs if (n + mp.m) % mp.lcm == 0]


def unit_value(mset: ModuloSet, n: int) -> int:
    """u_n = sum over the unit set U_n of mu(a) mu(b), evaluated literally."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return sum(mobius(mp.a) * mobius(mp.b) for mp in mset.unit_set(n))


def sum_sieve_eval(mset: ModuloSet, x, s: float, eps: float = SINGULAR_EPS) -> complex:
    """E(x, s) = sum_Q mu(a)mu(b) (e^{i B_ab(x) s} - e^{i A_ab s}) / (2i sin([a,b] s))."""
    if x < 0:
        raise ValueError("x must be >= 0")
    total = 0j
    for mp in mset.pairs:
        den = math.sin(mp.lcm * s)
        if abs(den) <= eps:
            raise ValueError(f"sin({mp.lcm} s) is numerically zero at s = {s}")
        num = cmath.exp(1j * mp.B(x) * s) - cmath.exp(1j * mp.A * s)
        total += mobius(mp.a) * mobius(mp.b) * num / (2j * den)
    return total


def qd_cosine_sides(mset: ModuloSet, d: int, k: int) -> tuple[float, float]:
    """Direct sum of cos(2 m_ab k pi / P) over Q_d, and its product form."""
    inst = mset.instance
    P, N = inst.Pv, inst.N
    if k % d:
        raise ValueError(f"d = {d} must divide k = {k}")
    lhs = math.fsum(math.cos(2 * math.pi * ((mp.m * k) % P) / P) for mp in mset.slices[d])
    P_dN = P // math.gcd(P, d * N)
    sign = -1 if (k + k * P_dN) % 2 else 1
    rhs = float(sign)
    for p in inst.P.factors:
        if (2 * d * N) % p == 0:
            continue
        inv = pow((P // p) % p, -1, p)
        rhs *= 2 * math.cos(2 * math.pi * ((k * N * inv) % p) / p)
    return lhs, rhs


def qd_cosine_product_check(mset: ModuloSet, d: int, k: int, tol: float = 1e-9) -> bool:
    lhs, rhs = qd_cosine_sides(mset, d, k)
    return abs(lhs - rhs) <= tol * max(1.0, len(mset.slices[d]))


def qd_collapse_sides(mset: ModuloSet, F) -> tuple:
    """sum_Q mu(a)mu(b) F(m, [a,b]) and sum_{d|P} mu(P/d) sum_{Q_d} F(m, [a,b])."""
    P = mset.instance.Pv
    lhs = sum(mobius(mp.a) * mobius(mp.b) * F(mp.m, mp.lcm) for mp in mset.pairs)
    rhs = 0
    for d, pairs in mset.slices.items():
        rhs += mobius(P // d) * sum(F(mp.m, mp.lcm) for mp in pairs)
    return lhs, rhs

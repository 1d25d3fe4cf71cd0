"""Densities of W_P(N) and its slices, the asymptotic constants, and the
N >= 312 threshold inequalities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .admissible import size_W, size_W_d
from .counting import count_S, t_term
from .modulus import ProblemInstance, factorize_small, primes_upto, sieve_primes

EULER_GAMMA = 0.57721566490153286060651209
C1 = math.exp(EULER_GAMMA)


@dataclass(frozen=True)
class DensityValue:
    exact: Fraction
    approx: float

    @classmethod
    def of(cls, q: Fraction) -> "DensityValue":
        return cls(q, float(q))


def omega(inst: ProblemInstance, d: int | None = None) -> DensityValue:
    """omega_P(N) = |W|/P, or omega_P^d(N) = |W^d|/P, from the per-prime products."""
    val = Fraction(1)
    for p in inst.N_P_primes:
        val *= Fraction(p - 1, p)
    if d is None:
        val /= inst.c_prime
        for p in inst.P_2N.factors:
            val *= Fraction(p - 2, p)
    else:
        inst.require_slice(d)
        val /= inst.c * d
        for p in inst.P_6N.factors:
            if d % p:
                val *= Fraction(p - 3, p)
    return DensityValue.of(val)


def omega_rewritten(N: int, z: int) -> Fraction:
    """omega for P = primorial(z) in the (1 - 1/p)^2 form:
    2 prod_{3<=p<=z} (p-2)p/(p-1)^2 prod_{p|N, 3<=p<=z} (p-1)/(p-2) prod_{p<=z} (1-1/p)^2."""
    if z < 2:
        raise ValueError("z must be >= 2")
    val = Fraction(2)
    for p in primes_upto(z):
        val *= Fraction(p - 1, p) ** 2
        if p >= 3:
            val *= Fraction((p - 2) * p, (p - 1) ** 2)
            if N % p == 0:
                val *= Fraction(p - 1, p - 2)
    return val


def omega1_rewritten(N: int, z: int) -> Fraction:
    """omega^1 for P = primorial(z) in the (1 - 1/p)^3 form (z >= 3)."""
    if z < 3:
        raise ValueError("z must be >= 3")
    val = Fraction(9, 2) * (2 if N % 3 == 0 else 1)
    for p in primes_upto(z):
        val *= Fraction(p - 1, p) ** 3
        if p >= 5:
            val *= Fraction((p - 3) * p * p, (p - 1) ** 3)
            if N % p == 0:
                val *= Fraction(p - 1, p - 3)
    return val


@dataclass(frozen=True)
class AsymptoticConstants:
    z: int
    C1: float
    C2: float
    C2_tail: float
    C3: float
    C3_tail: float
    d_N: float | None
    d_N_prime: float | None
    hl_ratio: float

    def bracket(self, name: str) -> tuple[float, float]:
        """(lower, upper) for the infinite product; partial products only decrease."""
        val, tail = (self.C2, self.C2_tail) if name == "C2" else (self.C3, self.C3_tail)
        return val * math.exp(-tail), val


def d_N(N: int) -> float:
    return math.prod((p - 1) / (p - 2) for p in factorize_small(N) if p >= 3)


def d_N_prime(N: int) -> float:
    out = 2.0 if N % 3 == 0 else 1.0
    return out * math.prod((p - 1) / (p - 3) for p in factorize_small(N) if p >= 5)


def hl_ratio() -> float:
    """(8 / C1^2 - 2) / 2."""
    return (8 / C1**2 - 2) / 2


def constants(z: int = 10**7, N: int | None = None) -> AsymptoticConstants:
    """Partial products of C2 and C3 through primes <= z, with log-tail bounds.

    Every factor is below 1, so the partial products decrease to the limit;
    the tails satisfy -log(factor) <= 2/(p-1)^2 (C2) and <= 7/(p-1)^2 (C3),
    and summing over odd integers above z bounds them by 1/(z-2) and 7/(2(z-2)).
    """
    if z < 5:
        raise ValueError("z must be >= 5")
    ps = sieve_primes(z).astype(np.float64)
    odd = ps[ps >= 3]
    c2 = math.exp(math.fsum(np.log1p(-1.0 / (odd - 1) ** 2)))
    big = ps[ps >= 5]
    c3 = math.exp(math.fsum(np.log1p(-(3 * big - 1) / (big - 1) ** 3)))
    return AsymptoticConstants(
        z=z,
        C1=C1,
        C2=c2,
        C2_tail=1.0 / (z - 2),
        C3=c3,
        C3_tail=7.0 / (2 * (z - 2)),
        d_N=None if N is None else d_N(N),
        d_N_prime=None if N is None else d_N_prime(N),
        hl_ratio=hl_ratio(),
    )


def omega_asymptotic(N: int, z: float, c2: float = 0.6601618158468696) -> float:
    """2 C2 d_N / (C1^2 log^2 z)."""
    return 2 * c2 * d_N(N) / (C1**2 * math.log(z) ** 2)


def omega1_asymptotic(N: int, z: float, c3: float = 0.6351663546) -> float:
    """9 C3 d'_N / (2 C1^3 log^3 z)."""
    return 9 * c3 * d_N_prime(N) / (2 * C1**3 * math.log(z) ** 3)


def mertens_partial(z: float) -> float:
    """log z * prod_{p <= z} (1 - 1/p)."""
    if z < 2:
        raise ValueError("z must be >= 2")
    ps = sieve_primes(math.floor(z)).astype(np.float64)
    return math.log(z) * math.exp(math.fsum(np.log1p(-1.0 / ps)))


def threshold_check(N: int) -> tuple[bool, bool]:
    """((N-2) omega^1 > 2^(#N - 1), N omega^1 > 4) for P = primorial(sqrt(2N)), exactly."""
    if N < 2:
        raise ValueError("N must be >= 2")
    inst = ProblemInstance.goldbach(N)
    w1, P = size_W_d(inst, 1), inst.Pv
    k = len(factorize_small(N))
    first = 2 * (N - 2) * w1 > 2**k * P
    second = N * w1 > 4 * P
    return first, second


def theta(N: int) -> tuple[Fraction, float]:
    """theta(N) = sqrt(N) omega^1_P(N); returns (theta^2 exact, theta float)."""
    inst = ProblemInstance.goldbach(N)
    w = omega(inst, 1).exact
    return N * w * w, math.sqrt(N) * float(w)


def hl_ratio_empirical(N: int) -> tuple[Fraction, float]:
    """(omega N - t - S) / S with S = S_P(N, N), P = primorial(sqrt(2N))."""
    inst = ProblemInstance.goldbach(N)
    S = count_S(inst, N)
    if S == 0:
        raise ZeroDivisionError(f"S_P(N, N) = 0 at N = {N}")
    r = (Fraction(size_W(inst) * N, inst.Pv) - t_term(inst) - S) / S
    return r, float(r)

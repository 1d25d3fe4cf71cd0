"""Goldbach cosine sums C_P(N, k) and C_P^d(N, k).

The closed forms are products of per-prime factors alpha_p(P, kN), so they
cost O(#P) per k regardless of the size of P.  Angles are always reduced
with exact integer arithmetic before the cosine is taken.
"""

from __future__ import annotations

import math

import numpy as np

from .admissible import ENUMERATION_LIMIT, ResiduePattern, enumerate_W
from .modulus import (
    ModulusError,
    ProblemInstance,
    cofactor,
    inverse_bar,
    inverse_of_cofactor,
    mobius,
)


def alpha(inst: ProblemInstance, p: int, m: int) -> float:
    """alpha_p(P, m): p - 2 if p | m, else -2 cos(2 pi m inv(P/p) / p)."""
    if p not in inst.P:
        raise ModulusError(f"{p} does not divide P")
    if m % p == 0:
        return float(p - 2)
    r = m * inverse_of_cofactor(inst.P, p) % p
    return -2.0 * math.cos(2 * math.pi * r / p)


def _prefactor(inst: ProblemInstance, k: int) -> int:
    """mu(N_P) * prod_{p | gcd(k, N_P)} (1 - p)."""
    out = mobius(inst.N_P)
    for p in inst.N_P_primes:
        if k % p == 0:
            out *= 1 - p
    return out


def spectrum_product_forms(inst: ProblemInstance, k: int) -> tuple[float, float]:
    """C_P(N, k) from the product over P_2N and from the product over P_6N."""
    k = abs(k)
    pre = _prefactor(inst, k)
    kN = k * inst.N
    over_2N = math.prod((alpha(inst, p, kN) for p in inst.P_2N.factors), start=1.0)
    over_6N = math.prod((alpha(inst, p, kN) for p in inst.P_6N.factors), start=1.0)
    return pre * over_2N, pre * over_6N


def spectrum_product(inst: ProblemInstance, k: int, tol: float = 1e-9) -> float:
    a, b = spectrum_product_forms(inst, k)
    if abs(a - b) > tol * max(1.0, abs(a)):
        raise ArithmeticError(f"P_2N and P_6N product forms disagree at k={k}: {a} vs {b}")
    return b


def slice_spectrum_product(inst: ProblemInstance, d: int, k: int) -> float:
    """C_P^d(N, k) = mu(N_P) prod_{p|gcd(k,N_P)} (1-p) prod_{p | P_6dN} (alpha_p(P,kN) - 1)."""
    inst.require_slice(d)
    k = abs(k)
    kN = k * inst.N
    val = float(_prefactor(inst, k))
    for p in inst.P_6N.factors:
        if d % p:
            val *= alpha(inst, p, kN) - 1.0
    return val


def spectrum_many(inst: ProblemInstance, ks: np.ndarray, d: int | None = None) -> np.ndarray:
    """Vectorised C_P(N, k) (or C_P^d) over an int64 array of k >= 0."""
    ks = np.abs(np.asarray(ks, dtype=np.int64))
    out = np.full(len(ks), float(mobius(inst.N_P)))
    for p in inst.N_P_primes:
        out = np.where(ks % p == 0, out * (1 - p), out)
    if d is not None:
        inst.require_slice(d)
    shift = 0.0 if d is None else 1.0
    for p in inst.P_6N.factors:
        if d is not None and d % p == 0:
            continue
        res = (ks % p) * (inst.N % p * inverse_of_cofactor(inst.P, p) % p) % p
        a = np.where(res == 0, float(p - 2), -2.0 * np.cos(2 * np.pi * res / p))
        out *= a - shift
    return out


def spectrum_direct(inst: ProblemInstance, k: int, pattern: ResiduePattern | None = None,
                    d: int | None = None, limit: int = ENUMERATION_LIMIT) -> float:
    """Literal sum of cos(2 n k pi / P) over W_P(N) (or its slice d)."""
    pattern = pattern or enumerate_W(inst, limit)
    members = pattern.members if d is None else pattern.slice(d)
    P = inst.Pv
    kr = k % P
    if kr * P < 2**62:
        res = members * kr % P
        return float(math.fsum(np.cos(2 * np.pi * res / P)))
    return math.fsum(math.cos(2 * math.pi * (int(n) * kr % P) / P) for n in members)


# ---------------------------------------------------------------------------
# deduction relations


def spectrum_deduction_sides(inst: ProblemInstance, p: int, k: int,
                             d: int | None = None) -> tuple[float, float]:
    """C_P(N,k) vs C_{P_p}(pbar N, k) alpha_p(P, kN)   (p | P_2N), or for a slice d,
    C_P^d(N,k) vs C_{P_p}^d(pbar N, k) (alpha_p(P, kN) - 1)   (p | P_6dN)."""
    P_p = cofactor(inst.P, p)
    sub = ProblemInstance(inverse_bar(inst.P, p) * inst.N, P_p)
    a = alpha(inst, p, k * inst.N)
    if d is None:
        if p not in inst.P_2N:
            raise ModulusError(f"{p} does not divide P_2N")
        return spectrum_product(inst, k), spectrum_product(sub, k) * a
    if p not in inst.P_6N or d % p == 0:
        raise ModulusError(f"{p} does not divide P_6dN")
    inst.require_slice(d)
    return slice_spectrum_product(inst, d, k), slice_spectrum_product(sub, d, k) * (a - 1)


def spectrum_deduction_check(inst: ProblemInstance, p: int, k: int, d: int | None = None,
                             tol: float = 1e-9) -> bool:
    lhs, rhs = spectrum_deduction_sides(inst, p, k, d)
    return abs(lhs - rhs) <= tol * max(1.0, abs(lhs))


def second_deduction_sides(inst: ProblemInstance, p: int, k: int,
                           pattern: ResiduePattern | None = None,
                           d: int | None = None) -> tuple[float, float]:
    """For p | N_P, direct sums of C_P(N,k) and -C_{P_p}(pbar N, k) p_k, p_k in {1, 1 - p}."""
    if p not in inst.N_P_primes:
        raise ModulusError(f"{p} does not divide N_P")
    sub = ProblemInstance(inverse_bar(inst.P, p) * inst.N, cofactor(inst.P, p))
    p_k = 1 - p if k % p == 0 else 1
    lhs = spectrum_direct(inst, k, pattern, d)
    rhs = -spectrum_direct(sub, k, None, d) * p_k
    return lhs, rhs

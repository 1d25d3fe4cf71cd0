"""Admissible residues W_P(N), their slices W_P^d(N), and the size formulas.

An integer n is admissible for (N, P) when (N - n)(N + n) is coprime to P,
i.e. n avoids the two residues +-N modulo every prime of P.  The slice
W_P^d(N) keeps the admissible n in [1, P] with gcd(P_6N, n) = d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .modulus import ProblemInstance, SquareFreeModulus

ENUMERATION_LIMIT = 10**7


class SizeGuardError(ValueError):
    """The requested enumeration exceeds the configured size guard."""


@dataclass(frozen=True)
class ResiduePattern:
    instance: ProblemInstance
    members: np.ndarray
    slices: dict

    def __len__(self) -> int:
        return len(self.members)

    def slice(self, d: int) -> np.ndarray:
        self.instance.require_slice(d)
        return self.slices.get(d, np.zeros(0, dtype=np.int64))


def _admissible_mask(inst: ProblemInstance, start: int, length: int) -> np.ndarray:
    """mask[i] is True iff start + i is admissible (per-prime residue sieve)."""
    mask = np.ones(length, dtype=bool)
    for q in inst.P.factors:
        for r in {inst.N % q, -inst.N % q}:
            first = (r - start) % q
            mask[first::q] = False
    return mask


def slice_labels(inst: ProblemInstance, values: np.ndarray) -> np.ndarray:
    """gcd(P_6N, n) for each n, computed prime by prime."""
    labels = np.ones(len(values), dtype=object if inst.P_6N.value >= 2**62 else np.int64)
    for q in inst.P_6N.factors:
        labels[values % q == 0] *= q
    return labels


def enumerate_W(inst: ProblemInstance, limit: int = ENUMERATION_LIMIT) -> ResiduePattern:
    """Sorted members of W_P(N) in [1, P] with their slice partition."""
    P = inst.Pv
    if P > limit:
        raise SizeGuardError(f"P = {P} exceeds enumeration limit {limit}")
    members = np.flatnonzero(_admissible_mask(inst, 1, P)).astype(np.int64) + 1
    labels = slice_labels(inst, members)
    slices = {int(d): members[labels == d] for d in np.unique(labels)}
    return ResiduePattern(inst, members, slices)


def size_W(inst: ProblemInstance) -> int:
    """|W_P(N)| = prod_{p | N_P} (p - 1) * prod_{p | P_6N} (p - 2)."""
    return math.prod(p - 1 for p in inst.N_P_primes) * math.prod(p - 2 for p in inst.P_6N.factors)


def size_W_d(inst: ProblemInstance, d: int) -> int:
    """|W_P^d(N)| = prod_{p | N_P} (p - 1) * prod_{p | P_6dN} (p - 3)."""
    inst.require_slice(d)
    return math.prod(p - 1 for p in inst.N_P_primes) * math.prod(
        p - 3 for p in inst.P_6N.factors if d % p
    )


def is_admissible(inst: ProblemInstance, n: int, d: int | None = None) -> bool:
    """Residue test for n (any size); with d, also require gcd(P_6N, n) = d."""
    N = inst.N
    for q in inst.P.factors:
        r = n % q
        if r == N % q or r == -N % q:
            return False
    if d is None:
        return True
    inst.require_slice(d)
    g = 1
    for q in inst.P_6N.factors:
        if n % q == 0:
            g *= q
    return g == d


def V_set(pattern: ResiduePattern, d: int) -> np.ndarray:
    """V_P^d(N) = { n / (c d) : n in W_P^d(N) }."""
    c = pattern.instance.c
    sl = pattern.slice(d)
    return sl // (c * d)


# ---------------------------------------------------------------------------
# identities


def factor_sum_sides(K: SquareFreeModulus, h: Mapping[int, Fraction]) -> tuple[Fraction, Fraction]:
    """(prod_{p|K} (h_p + 1), sum_{d|K} prod_{p | K/d} h_p)."""
    missing = [p for p in K.factors if p not in h]
    if missing:
        raise KeyError(f"h undefined at primes {missing}")
    lhs = math.prod((Fraction(h[p]) + 1 for p in K.factors), start=Fraction(1))
    rhs = Fraction(0)
    for d in K.divisors():
        rhs += math.prod((Fraction(h[p]) for p in K.factors if d % p), start=Fraction(1))
    return lhs, rhs


def factor_sum_identity_check(K: SquareFreeModulus, h: Mapping[int, Fraction]) -> bool:
    lhs, rhs = factor_sum_sides(K, h)
    return lhs == rhs


def momentum_sides(
    inst: ProblemInstance, f: Mapping[int, Fraction], limit: int = ENUMERATION_LIMIT
) -> tuple[Fraction, Fraction]:
    """Both sides of the momentum formula.

    Left: sum over n in W of prod_{p | P_n} (f_p - 1)/(p - 1), summed literally.
    Right: prod_{p | N_P} (f_p - 1) * prod_{p | P_6N} (f_p - 2 (f_p - 1)/(p - 1)).
    """
    P = inst.P
    missing = [p for p in P.factors if p not in f]
    if missing:
        raise KeyError(f"f undefined at primes {missing}")
    g = {p: (Fraction(f[p]) - 1) / (p - 1) for p in P.factors}
    members = enumerate_W(inst, limit).members
    # group members by the set of primes not dividing them; few distinct patterns
    counts: dict[tuple, int] = {}
    for n in members.tolist():
        key = tuple(p for p in P.factors if n % p)
        counts[key] = counts.get(key, 0) + 1
    lhs = sum(
        (cnt * math.prod((g[p] for p in key), start=Fraction(1)) for key, cnt in counts.items()),
        Fraction(0),
    )
    rhs = math.prod((Fraction(f[p]) - 1 for p in inst.N_P_primes), start=Fraction(1))
    rhs *= math.prod((Fraction(f[p]) - 2 * g[p] for p in inst.P_6N.factors), start=Fraction(1))
    return lhs, rhs


def momentum_check(inst: ProblemInstance, f: Mapping[int, Fraction], limit: int = ENUMERATION_LIMIT) -> bool:
    lhs, rhs = momentum_sides(inst, f, limit)
    return lhs == rhs

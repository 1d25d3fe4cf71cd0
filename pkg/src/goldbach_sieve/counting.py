"""Goldbach counting functions S_P(N, x), S_P^d(N, x) and the error terms T.

T is available in three forms:

* ``error_T_fracsum``  - sum over the residue pattern of ({(x - n)/P} - 1/2), exact;
* ``error_T_from_counts`` - |W| x / P - t - S(x), exact, needs only a count;
* ``error_T_fourier`` - truncated sine series with the cosine spectrum as
  coefficients, floating point.

Arguments x are exact rationals (``Fraction``) or ints; the identities are
stated for non-integer x, and half-integers are the canonical grid.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Literal

import numpy as np

from .admissible import (
    ENUMERATION_LIMIT,
    ResiduePattern,
    enumerate_W,
    size_W,
    size_W_d,
)
from .modulus import (
    ModulusError,
    ProblemInstance,
    cofactor,
    inverse_bar,
    inverse_of_cofactor,
)
from .spectra import spectrum_many

COUNT_LIMIT = 10**9
_BLOCK = 1 << 22


class IntegerArgumentError(ValueError):
    """The identity requires a non-integer evaluation point."""


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _require_nonint(x: Fraction) -> None:
    if x.denominator == 1:
        raise IntegerArgumentError(f"x = {x} must not be an integer")


def _slice_strikes(inst: ProblemInstance, d: int | None):
    """(modulus, forbidden residues) for every prime of P, given the slice."""
    N = inst.N
    out = []
    for q in inst.P.factors:
        bad = {N % q, -N % q}
        if d is not None and q in inst.P_6N:
            if d % q == 0:
                bad = set(range(1, q))  # q must divide n
            else:
                bad.add(0)
        out.append((q, bad))
    return out


def _block_mask(strikes, start: int, length: int) -> np.ndarray:
    mask = np.ones(length, dtype=bool)
    for q, bad in strikes:
        if len(bad) == q - 1 and 0 not in bad:
            keep = np.zeros(length, dtype=bool)
            keep[(-start) % q :: q] = True
            mask &= keep
            continue
        for r in bad:
            mask[(r - start) % q :: q] = False
    return mask


def count_S(inst: ProblemInstance, x, d: int | None = None, limit: int = COUNT_LIMIT) -> int:
    """Number of admissible n in [1, x] (in slice d when given), by direct sieving."""
    x = _as_fraction(x)
    if x < 0:
        raise ValueError("x must be >= 0")
    if d is not None:
        inst.require_slice(d)
    top = math.floor(x)
    if top > limit:
        raise ValueError(f"x = {x} exceeds the direct counting limit {limit}")
    strikes = _slice_strikes(inst, d)
    total = 0
    start = 1
    while start <= top:
        length = min(_BLOCK, top - start + 1)
        total += int(np.count_nonzero(_block_mask(strikes, start, length)))
        start += length
    return total


def admissible_prefix_counts(inst: ProblemInstance, top: int, d: int | None = None) -> np.ndarray:
    """cum[m] = S(m) for m = 0..top, sieved in one pass."""
    if d is not None:
        inst.require_slice(d)
    mask = _block_mask(_slice_strikes(inst, d), 1, top)
    cum = np.zeros(top + 1, dtype=np.int64)
    np.cumsum(mask, out=cum[1:])
    return cum


def t_term(inst: ProblemInstance, d: int | None = None) -> Fraction:
    """t_P(N) (1/2 iff N_P = 1), or t_P^d(N) = delta_6(P_d, dbar N)."""
    if d is None:
        return Fraction(1, 2) if inst.N_P == 1 else Fraction(0)
    inst.require_slice(d)
    Pd = inst.Pv // d
    dbarN = inverse_bar(inst.P, d) * inst.N
    return Fraction(1, 2) if 6 % Pd == 0 and math.gcd(Pd, dbarN) == 1 else Fraction(0)


def _members(inst: ProblemInstance, d: int | None, pattern: ResiduePattern | None, limit: int):
    pattern = pattern if pattern is not None else enumerate_W(inst, limit)
    return pattern.members if d is None else pattern.slice(d)


def error_T_fracsum(inst: ProblemInstance, x, d: int | None = None,
                    pattern: ResiduePattern | None = None, limit: int = ENUMERATION_LIMIT) -> Fraction:
    """T = sum over the pattern of ({(x - n)/P} - 1/2), as an exact rational."""
    x = _as_fraction(x)
    _require_nonint(x)
    P = inst.Pv
    members = _members(inst, d, pattern, limit)
    a, b = x.numerator, x.denominator
    bP = b * P
    a %= bP  # T has period P in x
    if bP < 2**31:
        total = int(np.sum((a - members * b) % bP))
    else:
        total = sum((a - int(n) * b) % bP for n in members)
    return Fraction(2 * total - len(members) * bP, 2 * bP)


def error_T_from_counts(inst: ProblemInstance, x, d: int | None = None,
                        limit: int = COUNT_LIMIT) -> Fraction:
    """T = |W| x / P - t - S(x), exact."""
    x = _as_fraction(x)
    size = size_W(inst) if d is None else size_W_d(inst, d)
    return size * x / inst.Pv - t_term(inst, d) - count_S(inst, x, d, limit)


def error_T_fourier(inst: ProblemInstance, x, K: int = 100_000, d: int | None = None,
                    chunk: int = 1 << 16) -> float:
    """-sum_{k=1}^{K} C(N, k) sin(2 pi k x / P) / (k pi), partial sum."""
    x = _as_fraction(x)
    P = inst.Pv
    t = (x % P) / P
    if t.denominator == 1:
        raise IntegerArgumentError("x / P must not be an integer")
    num, den = t.numerator, t.denominator
    total = 0.0
    for lo in range(1, K + 1, chunk):
        ks = np.arange(lo, min(K, lo + chunk - 1) + 1, dtype=np.int64)
        coeff = spectrum_many(inst, ks, d)
        if den < 2**31:
            phase = (ks % den) * num % den
        else:
            phase = np.array([int(k) * num % den for k in ks], dtype=np.float64)
        total += float(np.sum(coeff * np.sin(2 * np.pi * phase / den) / (ks * np.pi)))
    return -total


# ---------------------------------------------------------------------------
# deduction formulas


def _y(inst: ProblemInstance, p: int) -> int:
    """y = N * inv(P/p mod p) * (P/p)."""
    return inst.N * inverse_of_cofactor(inst.P, p) * (inst.Pv // p)


def deduction_S_first_sides(inst: ProblemInstance, p: int, x) -> tuple[int, int]:
    """S_P(N,x) vs S_{P_p}(N,x) - S_{P_p}(pbar N,(y+x)/p) + S_{P_p}(pbar N,(y-x)/p)."""
    x = _as_fraction(x)
    _require_nonint(x)
    if p not in inst.P_2N:
        raise ModulusError(f"{p} does not divide P_2N")
    y = _y(inst, p)
    if not x < y:
        raise ValueError(f"x must be below y = {y}")
    P_p = cofactor(inst.P, p)
    base = ProblemInstance(inst.N, P_p)
    shifted = ProblemInstance(inverse_bar(inst.P, p) * inst.N, P_p)
    lhs = count_S(inst, x)
    rhs = count_S(base, x) - count_S(shifted, (y + x) / p) + count_S(shifted, (y - x) / p)
    return lhs, rhs


def deduction_check_S_first(inst: ProblemInstance, p: int, x) -> bool:
    lhs, rhs = deduction_S_first_sides(inst, p, x)
    return lhs == rhs


Variant = Literal["first", "first_slice", "second", "second_slice", "third"]


def deduction_T_sides(inst: ProblemInstance, variant: Variant, x, p: int | None = None,
                      d: int | None = None) -> tuple[Fraction, Fraction]:
    """Both sides of a deduction formula for T, each term by the exact fraction sum."""
    x = _as_fraction(x)
    _require_nonint(x)
    T = error_T_fracsum
    N, P = inst.N, inst.P
    if variant == "first":
        if p not in inst.P_2N:
            raise ModulusError(f"{p} does not divide P_2N")
        y = _y(inst, p)
        P_p = cofactor(P, p)
        base, shifted = ProblemInstance(N, P_p), ProblemInstance(inverse_bar(P, p) * N, P_p)
        return T(inst, x), T(base, x) - T(shifted, (y + x) / p) + T(shifted, (y - x) / p)
    if variant == "first_slice":
        if p not in inst.P_6N:
            raise ModulusError(f"{p} does not divide P_6N")
        d = 1 if d is None else d
        if d % p == 0 or not inst.P_6N.divides(d * p):
            raise ModulusError(f"{d} does not divide P_6pN")
        y = _y(inst, p)
        base = ProblemInstance(N, cofactor(P, p))
        dp = d * p
        rhs = T(base, x, d) - T(inst, x, dp) - T(inst, y + x, dp) + T(inst, y - x, dp)
        return T(inst, x, d), rhs
    if variant in ("second", "second_slice"):
        if p not in inst.N_P_primes:
            raise ModulusError(f"{p} does not divide N_P")
        if variant == "second":
            d = None
        elif d is None:
            d = 1
        P_p = cofactor(P, p)
        base, shifted = ProblemInstance(N, P_p), ProblemInstance(inverse_bar(P, p) * N, P_p)
        return T(inst, x, d), T(base, x, d) - T(shifted, x / p, d)
    if variant == "third":
        c = inst.c
        sub = ProblemInstance(inverse_bar(P, c) * N, cofactor(P, c))
        return T(inst, x, d), T(sub, x / c, d)
    raise ValueError(f"unknown deduction variant {variant!r}")


def deduction_check_T(inst: ProblemInstance, variant: Variant, x, p: int | None = None,
                      d: int | None = None) -> bool:
    lhs, rhs = deduction_T_sides(inst, variant, x, p, d)
    return lhs == rhs


# ---------------------------------------------------------------------------
# windows


def window_offsets(inst: ProblemInstance, center: int, lo: int, hi: int, d: int) -> np.ndarray:
    """Sorted offsets delta in [lo, hi] with center + delta admissible in slice d.

    Only multiples of d are materialised; every other prime q of P strikes its
    forbidden residue classes (n = +-N mod q, and n = 0 mod q when q | P_6N).
    """
    inst.require_slice(d)
    if hi < lo:
        return np.zeros(0, dtype=np.int64)
    first = center + lo
    n0 = first + (-first) % d
    if n0 > center + hi:
        return np.zeros(0, dtype=np.int64)
    count = (center + hi - n0) // d + 1
    mask = np.ones(count, dtype=bool)
    N = inst.N
    for q in inst.P.factors:
        if d % q == 0:
            continue
        bad = {N % q, -N % q}
        if q in inst.P_6N:
            bad.add(0)
        base = n0 % q
        dinv = pow(d % q, -1, q)
        for r in bad:
            mask[(r - base) * dinv % q :: q] = False
    j = np.flatnonzero(mask).astype(np.int64)
    return (n0 - center) + j * d


def count_window(inst: ProblemInstance, center: int, halfwidth: int, d: int) -> np.ndarray:
    """Offsets delta in (-halfwidth, halfwidth] with center + delta in slice d."""
    if 2 * halfwidth >= inst.Pv:
        raise ValueError("window must be narrower than P")
    if halfwidth <= 0:
        return np.zeros(0, dtype=np.int64)
    return window_offsets(inst, center, -halfwidth + 1, halfwidth, d)


# ---------------------------------------------------------------------------
# further identities


def slice_transport_sides(inst: ProblemInstance, d: int, x) -> tuple:
    """(S_P^d(N, x), S_{P_d}^1(dbar N, x/d), T_P^d(N, x), T_{P_d}^1(dbar N, x/d))."""
    x = _as_fraction(x)
    sub = ProblemInstance(inverse_bar(inst.P, d) * inst.N, cofactor(inst.P, d))
    return (count_S(inst, x, d), count_S(sub, x / d, 1),
            error_T_fracsum(inst, x, d), error_T_fracsum(sub, x / d, 1))


def inclusion_exclusion_terms(inst: ProblemInstance, p: int, d: int, x) -> dict:
    """Slice-1 counts for the moduli P, P_p, P_d, P_dp (same N), and the overlap term.

    ``overlap`` counts n <= x that satisfy every condition of P_dp but fail both
    the condition at p and some condition at a prime of d.
    """
    if p not in inst.P_6N or d % p == 0 or not inst.P_6N.divides(d * p):
        raise ModulusError("need p | P_6N and d | P_6pN")
    P, N = inst.P, inst.N
    mods = {"P": P, "P_p": cofactor(P, p), "P_d": cofactor(P, d), "P_dp": cofactor(P, d * p)}
    S = {k: count_S(ProblemInstance(N, m), x, 1) for k, m in mods.items()}
    S["overlap"] = S["P_dp"] - S["P_d"] - S["P_p"] + S["P"]
    return S

"""Seeded invariant suites behind ``goldbach-sieve verify``.

Each suite is a list of named checks; a check runs over a batch of random
instances and reports how many cases passed and the first failing case.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import admissible as adm
from . import counting as cnt
from . import densities as dens
from . import modset as ms
from . import spectra as sp
from .modulus import ProblemInstance, SquareFreeModulus, is_squarefree, primorial

SUITES = ("sets", "modset", "spectra", "counting", "deduction", "density")


@dataclass
class CheckResult:
    name: str
    passed: int
    total: int
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        tail = f"  first failure: {self.failure}" if self.failure else ""
        return f"[{tag}] {self.name}: {self.passed}/{self.total}{tail}"


class _Tally:
    def __init__(self, name: str):
        self.res = CheckResult(name, 0, 0)

    def __call__(self, ok: bool, case) -> None:
        self.res.total += 1
        if ok:
            self.res.passed += 1
        elif self.res.failure is None:
            self.res.failure = str(case)


def random_squarefree(rng: np.random.Generator, hi: int, max_primes: int | None = None) -> SquareFreeModulus:
    while True:
        v = int(rng.integers(1, hi + 1))
        if is_squarefree(v):
            P = SquareFreeModulus.from_int(v)
            if max_primes is None or len(P) <= max_primes:
                return P


def random_instances(rng: np.random.Generator, count: int, max_p: int, max_n: int = 200,
                     max_primes: int | None = None) -> list[ProblemInstance]:
    return [ProblemInstance(int(rng.integers(1, max_n + 1)), random_squarefree(rng, max_p, max_primes))
            for _ in range(count)]


def half_grid(rng: np.random.Generator, hi: int, count: int) -> list[Fraction]:
    """count half-integers x = k + 1/2 in [1/2, hi)."""
    ks = rng.integers(0, max(hi, 1), size=count)
    return [Fraction(2 * int(k) + 1, 2) for k in ks]


# ---------------------------------------------------------------------------


def suite_sets(rng, max_p: int, samples: int) -> list[CheckResult]:
    sizes, slices, momentum, factor = (_Tally(n) for n in
                                       ("size_W / size_W_d vs enumeration", "slices partition W",
                                        "momentum formula", "factor-sum identity"))
    for inst in random_instances(rng, samples, max_p):
        pat = adm.enumerate_W(inst)
        ok = len(pat) == adm.size_W(inst) and all(
            len(pat.slice(d)) == adm.size_W_d(inst, d) for d in inst.slice_divisors())
        sizes(ok, inst)
        slices(sum(len(pat.slice(d)) for d in inst.slice_divisors()) == len(pat), inst)
        f = {p: Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6))) for p in inst.P.factors}
        momentum(adm.momentum_check(inst, f), (inst, f))
        factor(adm.factor_sum_identity_check(inst.P, f), (inst.P, f))
    return [t.res for t in (sizes, slices, momentum, factor)]


def suite_modset(rng, max_p: int, samples: int) -> list[CheckResult]:
    refl, canon, units, esum, qcos, collapse = (_Tally(n) for n in (
        "m_ab + m_ba reflection", "canonical offset = m_ab mod [a,b]", "u_n = admissibility indicator",
        "sum-sieve equation E(x, s)", "Q_d cosine product", "Q_d collapse"))
    for inst in random_instances(rng, samples, max_p, max_primes=4):
        mset = ms.ModuloSet.build(inst)
        for mp in mset.pairs:
            refl(ms.offset_reflection_check(inst, mp.a, mp.b), (inst, mp))
            canon(ms.canonical_offset(inst, mp.a, mp.b) == mp.m % mp.lcm, (inst, mp))
        P = inst.Pv
        u = [ms.unit_value(mset, n) for n in range(1, P + 1)]
        units(all(u[n - 1] == int(adm.is_admissible(inst, n)) for n in range(1, P + 1)), inst)
        for _ in range(4):
            x = Fraction(int(rng.integers(0, 3 * P + 1)), 2)
            s = float(rng.uniform(0.05, 3.0))
            try:
                lhs = ms.sum_sieve_eval(mset, x, s)
            except ValueError:
                continue
            rhs = sum(u[(n - 1) % P] * cmath.exp(2j * n * s) for n in range(1, math.floor(x) + 1))
            esum(abs(lhs - rhs) <= 1e-8, (inst, x, s))
        for d in inst.P.divisors():
            k = d * int(rng.integers(1, 20))
            qcos(ms.qd_cosine_product_check(mset, d, k), (inst, d, k))
        table = {}

        def F(m, L, _t=table):
            key = (m, L)
            if key not in _t:
                _t[key] = Fraction(int(rng.integers(-50, 51)), int(rng.integers(1, 9)))
            return _t[key]

        lhs, rhs = ms.qd_collapse_sides(mset, F)
        collapse(lhs == rhs, inst)
    return [t.res for t in (refl, canon, units, esum, qcos, collapse)]


def suite_spectra(rng, max_p: int, samples: int) -> list[CheckResult]:
    prod, sl, ded, sec = (_Tally(n) for n in (
        "C_P(N,k) direct vs product", "C_P^d(N,k) direct vs product",
        "first deduction for C (and C^d)", "second deduction for C"))
    for inst in random_instances(rng, samples, max_p):
        pat = adm.enumerate_W(inst)
        tol = 1e-9 * max(1, len(pat))
        P = inst.Pv
        for k in rng.integers(1, P + 1, size=5).tolist():
            prod(abs(sp.spectrum_direct(inst, k, pat) - sp.spectrum_product(inst, k)) <= tol, (inst, k))
            for d in inst.slice_divisors():
                a = sp.spectrum_direct(inst, k, pat, d)
                b = sp.slice_spectrum_product(inst, d, k)
                sl(abs(a - b) <= tol, (inst, d, k))
            for p in inst.P_2N.factors:
                ded(sp.spectrum_deduction_check(inst, p, k), (inst, p, k))
            for p in inst.P_6N.factors:
                for d in inst.slice_divisors():
                    if d % p:
                        ded(sp.spectrum_deduction_check(inst, p, k, d), (inst, p, k, d))
            for p in inst.N_P_primes:
                a, b = sp.second_deduction_sides(inst, p, k, pat)
                sec(abs(a - b) <= tol, (inst, p, k))
    return [t.res for t in (prod, sl, ded, sec)]


def suite_counting(rng, max_p: int, samples: int) -> list[CheckResult]:
    formula, decomp, fourier = (_Tally(n) for n in (
        "S = |W| x / P - t - T", "sum_d S^d = S and sum_d t^d = t", "Fourier partial sum near T"))
    for inst in random_instances(rng, samples, max_p):
        pat = adm.enumerate_W(inst)
        P = inst.Pv
        w = adm.size_W(inst)
        divs = inst.slice_divisors()
        decomp(sum(cnt.t_term(inst, d) for d in divs) == cnt.t_term(inst), inst)
        for x in half_grid(rng, 3 * P, 10):
            S = cnt.count_S(inst, x)
            T = cnt.error_T_fracsum(inst, x, pattern=pat)
            formula(S == w * x / P - cnt.t_term(inst) - T, (inst, x))
            for d in divs:
                Sd = cnt.count_S(inst, x, d)
                Td = cnt.error_T_fracsum(inst, x, d, pat)
                formula(Sd == adm.size_W_d(inst, d) * x / P - cnt.t_term(inst, d) - Td, (inst, x, d))
            decomp(sum(cnt.count_S(inst, x, d) for d in divs) == S, (inst, x))
        if P <= 2310:
            x = half_grid(rng, P, 1)[0]
            T = float(cnt.error_T_fracsum(inst, x, pattern=pat))
            approx = cnt.error_T_fourier(inst, x, K=20_000)
            # slow sine-series convergence: loose band scaled by |W|
            fourier(abs(approx - T) <= 0.05 * max(1, w) + 0.5, (inst, x, approx, T))
    return [t.res for t in (formula, decomp, fourier)]


def suite_deduction(rng, max_p: int, samples: int) -> list[CheckResult]:
    names = ("first (S)", "first (T)", "first slice (T^d)", "second (T)", "second slice (T^d)", "third (T^d)")
    tallies = {n: _Tally(n) for n in names}
    for inst in random_instances(rng, samples, max_p):
        P = inst.Pv
        for x in half_grid(rng, 3 * P, 3):
            for p in inst.P_2N.factors:
                if x < cnt._y(inst, p):
                    tallies["first (S)"](cnt.deduction_check_S_first(inst, p, x), (inst, p, x))
                tallies["first (T)"](cnt.deduction_check_T(inst, "first", x, p), (inst, p, x))
            for p in inst.P_6N.factors:
                for d in inst.slice_divisors():
                    if d % p and inst.P_6N.divides(d * p):
                        tallies["first slice (T^d)"](
                            cnt.deduction_check_T(inst, "first_slice", x, p, d), (inst, p, d, x))
            for p in inst.N_P_primes:
                tallies["second (T)"](cnt.deduction_check_T(inst, "second", x, p), (inst, p, x))
                for d in inst.slice_divisors():
                    tallies["second slice (T^d)"](
                        cnt.deduction_check_T(inst, "second_slice", x, p, d), (inst, p, d, x))
            for d in inst.slice_divisors():
                tallies["third (T^d)"](cnt.deduction_check_T(inst, "third", x, None, d), (inst, d, x))
    return [t.res for t in tallies.values()]


def suite_density(rng, max_p: int, samples: int) -> list[CheckResult]:
    sizes, total, rewritten, thr = (_Tally(n) for n in (
        "omega = |W|/P and omega^d = |W^d|/P", "sum_d omega^d = omega",
        "rewritten products", "threshold for N in [312, 400]"))
    for inst in random_instances(rng, samples, max_p):
        P = inst.Pv
        ok = dens.omega(inst).exact == Fraction(adm.size_W(inst), P) and all(
            dens.omega(inst, d).exact == Fraction(adm.size_W_d(inst, d), P) for d in inst.slice_divisors())
        sizes(ok, inst)
        total(sum(dens.omega(inst, d).exact for d in inst.slice_divisors()) == dens.omega(inst).exact, inst)
    for _ in range(samples):
        z = int(rng.integers(3, 200))
        N = int(rng.integers(1, 10**4))
        inst = ProblemInstance(N, primorial(z))
        ok = (dens.omega_rewritten(N, z) == dens.omega(inst).exact
              and dens.omega1_rewritten(N, z) == dens.omega(inst, 1).exact)
        rewritten(ok, (N, z))
    for N in range(312, 401):
        thr(all(dens.threshold_check(N)), N)
    return [t.res for t in (sizes, total, rewritten, thr)]


RUNNERS: dict[str, Callable] = {
    "sets": suite_sets,
    "modset": suite_modset,
    "spectra": suite_spectra,
    "counting": suite_counting,
    "deduction": suite_deduction,
    "density": suite_density,
}


def run_suite(name: str, max_p: int = 2310, samples: int = 50, seed: int = 0) -> list[CheckResult]:
    if name not in RUNNERS:
        raise KeyError(name)
    rng = np.random.default_rng(seed)
    return RUNNERS[name](rng, max_p, samples)

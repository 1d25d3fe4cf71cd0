import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from goldbach_sieve.admissible import enumerate_W, is_admissible, size_W, size_W_d
from goldbach_sieve.counting import (
    IntegerArgumentError,
    admissible_prefix_counts,
    count_S,
    count_window,
    deduction_check_S_first,
    deduction_check_T,
    error_T_fourier,
    error_T_fracsum,
    error_T_from_counts,
    inclusion_exclusion_terms,
    slice_transport_sides,
    t_term,
)
from goldbach_sieve.modulus import ProblemInstance, factorize_small, idempotent_mod_P, is_squarefree

P15 = ProblemInstance.of(4, 15)
half = Fraction(1, 2)
squarefree_P = st.integers(1, 2310).filter(is_squarefree)


def test_count_examples():
    assert count_S(P15, Fraction(15, 2)) == 1
    assert count_S(P15, Fraction(41, 2)) == 4
    assert count_S(ProblemInstance.of(7, 30), half) == 0


def test_t_examples():
    assert t_term(P15) == half
    assert t_term(ProblemInstance.of(5, 15)) == 0
    assert t_term(P15, 5) == half and t_term(P15, 1) == 0


def test_error_examples():
    assert error_T_fracsum(P15, Fraction(15, 2)) == 0
    assert error_T_fracsum(P15, Fraction(41, 2)) == Fraction(-2, 5)
    assert error_T_fracsum(P15, Fraction(15, 2) + 15) == error_T_fracsum(P15, Fraction(15, 2))
    assert error_T_from_counts(P15, Fraction(15, 2)) == 0
    assert error_T_from_counts(P15, half) == Fraction(-2, 5)
    assert error_T_from_counts(ProblemInstance.of(1, 1), Fraction(5, 2)) == 0
    assert abs(error_T_fourier(P15, Fraction(15, 2), 10**5)) < 1e-3
    assert abs(error_T_fourier(P15, Fraction(41, 2), 10**5) + 0.4) < 1e-3
    a = error_T_fourier(P15, Fraction(7, 3), 5000)
    assert a == error_T_fourier(P15, Fraction(7, 3) + 15, 5000)


def test_integer_x_rejected():
    with pytest.raises(IntegerArgumentError):
        error_T_fracsum(P15, 7)
    with pytest.raises(IntegerArgumentError):
        error_T_fourier(P15, 30)


def test_fourier_convergence():
    for N, v, x in ((4, 15, Fraction(41, 2)), (7, 210, Fraction(301, 2)), (10, 2310, Fraction(2001, 2))):
        inst = ProblemInstance.of(N, v)
        exact = float(error_T_fracsum(inst, x))
        errs = [abs(error_T_fourier(inst, x, K) - exact) for K in (10**3, 10**4, 10**5)]
        assert errs[2] <= errs[0]
        # C/K envelope with C fitted at K = 10^3
        C = errs[0] * 10**3
        assert errs[1] <= 2 * C / 10**4 + 1e-9 and errs[2] <= 2 * C / 10**5 + 1e-9


def test_deduction_examples():
    assert deduction_check_S_first(P15, 5, Fraction(15, 2))
    assert deduction_check_S_first(P15, 5, half)
    assert deduction_check_S_first(ProblemInstance.of(3, 10), 5, Fraction(5, 2))
    assert deduction_check_T(P15, "first", Fraction(15, 2), 5)
    assert deduction_check_T(ProblemInstance.of(5, 15), "second", Fraction(9, 2), 5)
    assert deduction_check_T(P15, "third", Fraction(15, 2))


def test_window_examples():
    assert count_window(P15, 9, 3, 5).tolist() == []
    assert sorted(count_window(P15, 0, 7, 1).tolist()) == [-3, 3]
    assert count_window(P15, 0, 0, 1).tolist() == []
    with pytest.raises(ValueError):
        count_window(P15, 0, 8, 1)


@given(squarefree_P, st.integers(1, 100), st.integers(0, 10**4))
def test_counting_formula(v, N, j):
    inst = ProblemInstance.of(N, v)
    pat = enumerate_W(inst)
    x = Fraction(2 * (j % (3 * v)) + 1, 2)
    S = count_S(inst, x)
    assert S == size_W(inst) * x / v - t_term(inst) - error_T_fracsum(inst, x, pattern=pat)
    assert error_T_fracsum(inst, x, pattern=pat) == error_T_from_counts(inst, x)
    parts = 0
    for d in inst.slice_divisors():
        Sd = count_S(inst, x, d)
        assert Sd == size_W_d(inst, d) * x / v - t_term(inst, d) - error_T_fracsum(inst, x, d, pat)
        parts += Sd
    assert parts == S
    assert sum(t_term(inst, d) for d in inst.slice_divisors()) == t_term(inst)


@given(squarefree_P, st.integers(1, 60))
def test_prefix_counts_match_enumeration(v, N):
    inst = ProblemInstance.of(N, v)
    cum = admissible_prefix_counts(inst, 2 * v)
    brute = np.cumsum([0] + [is_admissible(inst, n) for n in range(1, 2 * v + 1)])
    assert cum.tolist() == brute.tolist()


@given(squarefree_P, st.integers(1, 100), st.integers(1, 5))
def test_slice_transport(v, N, t):
    inst = ProblemInstance.of(N, v)
    for d in inst.slice_divisors():
        S, S_sub, T, T_sub = slice_transport_sides(inst, d, Fraction(v * t) + Fraction(1, 3))
        assert S == S_sub and T == T_sub


def _cond(inst, q, n):
    N = inst.N
    if n % q in (N % q, -N % q):
        return False
    return not (q in inst.P_6N and n % q == 0)


@given(squarefree_P.filter(lambda v: v > 30), st.integers(1, 60), st.integers(0, 400))
def test_inclusion_exclusion_with_overlap(v, N, j):
    inst = ProblemInstance.of(N, v)
    x = Fraction(2 * j + 1, 2)
    for p in inst.P_6N.factors:
        for d in inst.P_6N.divisors():
            if d == 1 or d % p == 0:
                continue
            S = inclusion_exclusion_terms(inst, p, d, x)
            rest = [q for q in inst.P.factors if q != p and d % q]
            direct = sum(
                1 for n in range(1, math.floor(x) + 1)
                if all(_cond(inst, q, n) for q in rest)
                and not _cond(inst, p, n)
                and not all(_cond(inst, q, n) for q in inst.P.factors if d % q == 0)
            )
            assert S["overlap"] == direct >= 0
            assert S["P_d"] + S["P_p"] - S["P"] <= S["P_dp"]


def test_plain_inclusion_exclusion_equality_fails():
    # S_{P_d} + S_{P_p} - S_P = S_{P_dp} is not an identity: n failing both the
    # p condition and a d condition are counted in S_{P_dp} only.
    S = inclusion_exclusion_terms(ProblemInstance.of(1, 2310), 5, 7, Fraction(101, 2))
    assert (S["P"], S["P_p"], S["P_d"], S["P_dp"]) == (1, 3, 3, 7)
    assert S["P_d"] + S["P_p"] - S["P"] != S["P_dp"]


def test_bounded_error_lemma_small():
    for N in range(1, 400):
        if not is_squarefree(N):
            continue
        bound = Fraction(2 ** len(factorize_small(N)), 2)
        for c in (1, 2, 3, 6):
            if math.gcd(c, N) != 1:
                continue
            inst = ProblemInstance.of(N, c * N)
            pat = enumerate_W(inst)
            for j in range(0, 2 * c * N, 3):
                T = error_T_fracsum(inst, Fraction(2 * j + 1, 2), 1, pat)
                assert abs(T) <= bound


@given(squarefree_P, st.integers(1, 100), st.integers(0, 10**6), st.integers(1, 60))
def test_window_matches_scan(v, N, center, hw):
    inst = ProblemInstance.of(N, v)
    hw = min(hw, (v - 1) // 2)
    for d in inst.slice_divisors():
        got = count_window(inst, center, hw, d).tolist()
        want = [dl for dl in range(-hw + 1, hw + 1) if is_admissible(inst, center + dl, d)]
        assert got == want


def test_window_centre_is_goldbach_offset():
    inst = ProblemInstance.goldbach(400)
    for p in inst.P_6N.factors:
        r = 400 * idempotent_mod_P(inst.P, p) % inst.Pv
        assert r % p == 400 % p and all(r % q == 0 for q in inst.P.factors if q != p)

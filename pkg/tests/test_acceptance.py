"""Acceptance criteria 1-14.  Each test prints one "criterion N: PASS/FAIL" line;
the lines are repeated in the terminal summary.  Run with ``pytest -s`` to see
them inline as well."""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from goldbach_sieve import admissible as adm
from goldbach_sieve import counting as cnt
from goldbach_sieve import densities as dens
from goldbach_sieve import modset as ms
from goldbach_sieve import scanner as scn
from goldbach_sieve import spectra as sp
from goldbach_sieve.cli import main
from goldbach_sieve.modulus import ProblemInstance, SquareFreeModulus, factorize_small, is_prime, is_squarefree
from goldbach_sieve.suites import random_instances

SQUAREFREE_2310 = [v for v in range(1, 2311) if is_squarefree(v)]


def oracle_admissible(N: int, P: int, top: int) -> np.ndarray:
    """n in [1, top] with gcd((N - n)(N + n), P) = 1, by literal gcds."""
    n = np.arange(1, top + 1, dtype=np.int64)
    prod = (N - n) * (N + n) % P
    return n[np.gcd(prod, P) == 1]


def oracle_slice_counts(inst: ProblemInstance, members: np.ndarray) -> dict[int, int]:
    labels = np.gcd(members, inst.P_6N.value)
    vals, counts = np.unique(labels, return_counts=True)
    return dict(zip(vals.tolist(), counts.tolist()))


# ---------------------------------------------------------------------------


def test_criterion_01_set_sizes(criterion):
    t0 = time.perf_counter()
    bad, cases = [], 0

    def check(inst: ProblemInstance) -> None:
        members = oracle_admissible(inst.N, inst.Pv, inst.Pv)
        got = oracle_slice_counts(inst, members)
        ok = adm.size_W(inst) == len(members) and all(
            adm.size_W_d(inst, d) == got.get(d, 0) for d in inst.slice_divisors())
        if not ok:
            bad.append((inst.N, inst.Pv))

    for v in SQUAREFREE_2310:
        P = SquareFreeModulus.from_int(v)
        for N in range(1, 201):
            check(ProblemInstance(N, P))
            cases += 1
    rng = np.random.default_rng(1)
    for inst in random_instances(rng, 500, 30030, max_n=10**4):
        check(inst)
        cases += 1
    dt = time.perf_counter() - t0
    ok = not bad and dt < 120
    criterion(1, ok, f"{cases} instances, {len(bad)} mismatches, {dt:.1f}s")
    assert ok, bad[:5]


def test_criterion_02_cosine_sum_product(criterion):
    rng = np.random.default_rng(2)
    worst, triples, bad = 0.0, 0, []
    while triples < 10_000:
        v = int(rng.choice(SQUAREFREE_2310))
        inst = ProblemInstance.of(int(rng.integers(1, 201)), v)
        pat = adm.enumerate_W(inst)
        tol = 1e-9 * max(1, len(pat))
        for k in rng.integers(1, v + 1, size=5).tolist():
            err = abs(sp.spectrum_direct(inst, k, pat) - sp.spectrum_product(inst, k))
            worst = max(worst, err / tol)
            triples += 1
            if err > tol:
                bad.append((inst.N, v, k, err))
    inst = ProblemInstance.of(4, 15)
    for k in range(1, 16):
        if math.gcd(k, 15) == 1:
            want = 4 * math.cos(4 * k * math.pi / 3) * math.cos(6 * k * math.pi / 5)
            if abs(sp.spectrum_product(inst, k) - want) > 1e-12:
                bad.append((4, 15, k))
    ok = not bad
    criterion(2, ok, f"{triples} triples + (N=4, P=15), worst err/tol {worst:.2e}")
    assert ok, bad[:5]


def test_criterion_03_momentum_and_factor_sum(criterion):
    rng = np.random.default_rng(3)
    bad, total = [], 0
    for inst in random_instances(rng, 50, 2310):
        for _ in range(100):
            f = {p: Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 8))) for p in inst.P.factors}
            h = {p: Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 8))) for p in inst.P.factors}
            lhs, rhs = adm.momentum_sides(inst, f)
            a, b = adm.factor_sum_sides(inst.P, h)
            total += 2
            if lhs != rhs or a != b:
                bad.append((inst.N, inst.Pv))
    ok = not bad
    criterion(3, ok, f"{total} exact comparisons on 50 instances, {len(bad)} failures")
    assert ok, bad[:5]


def test_criterion_04_counting_formula(criterion):
    """S from the sieve; T from the fractional-part sum (vectorised here, library on a subset)."""
    rng = np.random.default_rng(4)
    evals, bad = 0, []
    while evals < 100_000:
        inst = ProblemInstance.of(int(rng.integers(1, 101)), int(rng.choice(SQUAREFREE_2310)))
        P = inst.Pv
        members = oracle_admissible(inst.N, P, P)
        w = len(members)
        assert w == adm.size_W(inst)
        S = cnt.admissible_prefix_counts(inst, 3 * P)
        two_x = np.arange(1, 6 * P, 2, dtype=np.int64)  # x = 1/2 .. 3P - 1/2
        # 2P T(x) = sum_n ((2x - 2n) mod 2P) - w P
        T2P = np.zeros(len(two_x), dtype=np.int64)
        for chunk in np.array_split(members, max(1, w // 256)):
            T2P += ((two_x[:, None] - 2 * chunk[None, :]) % (2 * P)).sum(axis=1)
        T2P -= w * P
        t2P = int(cnt.t_term(inst) * 2 * P)
        lhs = 2 * P * S[two_x // 2]
        rhs = w * two_x - t2P - T2P
        if not np.array_equal(lhs, rhs):
            bad.append((inst.N, P, "formula"))
        parts = sum(cnt.admissible_prefix_counts(inst, 3 * P, d) for d in inst.slice_divisors())
        if not np.array_equal(parts, S):
            bad.append((inst.N, P, "decomposition"))
        for j in rng.integers(0, len(two_x), size=5).tolist():
            x = Fraction(int(two_x[j]), 2)
            if cnt.error_T_fracsum(inst, x) != Fraction(int(T2P[j]), 2 * P):
                bad.append((inst.N, P, x, "library T"))
            if cnt.count_S(inst, x) != int(S[two_x[j] // 2]):
                bad.append((inst.N, P, x, "library S"))
        evals += len(two_x)
    ok = not bad
    criterion(4, ok, f"{evals} half-integer evaluations, {len(bad)} failures")
    assert ok, bad[:5]


def test_criterion_05_deductions(criterion):
    rng = np.random.default_rng(5)
    variants = ("first S", "first", "first_slice", "second", "second_slice", "third")
    seen = {v: 0 for v in variants}
    bad = []
    tries = 0
    while min(seen.values()) < 200 and tries < 20_000:
        tries += 1
        inst = random_instances(rng, 1, 2310)[0]
        P = inst.Pv
        x = Fraction(2 * int(rng.integers(0, 3 * P)) + 1, 2)
        hit = set()

        def run(name, ok, case):
            hit.add(name)
            if not ok:
                bad.append((name, inst.N, P, case, x))

        for p in inst.P_2N.factors:
            if x < cnt._y(inst, p):
                run("first S", cnt.deduction_check_S_first(inst, p, x), p)
            run("first", cnt.deduction_check_T(inst, "first", x, p), p)
        for p in inst.P_6N.factors:
            for d in inst.slice_divisors():
                if d % p and inst.P_6N.divides(d * p):
                    run("first_slice", cnt.deduction_check_T(inst, "first_slice", x, p, d), (p, d))
        for p in inst.N_P_primes:
            run("second", cnt.deduction_check_T(inst, "second", x, p), p)
            for d in inst.slice_divisors():
                run("second_slice", cnt.deduction_check_T(inst, "second_slice", x, p, d), (p, d))
        for d in inst.slice_divisors():
            run("third", cnt.deduction_check_T(inst, "third", x, None, d), d)
        for name in hit:
            seen[name] += 1
    ok = not bad and min(seen.values()) >= 200
    detail = ", ".join(f"{k}: {v}" for k, v in seen.items())
    criterion(5, ok, f"instances per variant: {detail}; {len(bad)} failures")
    assert ok, bad[:5]


def test_criterion_06_sum_sieve_and_collapse(criterion):
    rng = np.random.default_rng(6)
    worst, bad = 0.0, []
    insts = random_instances(rng, 10, 2310, max_primes=4)
    s_grid = 0.05 + 0.1473 * np.arange(20) + 0.001 * math.sqrt(2)
    for inst in insts:
        mset = ms.ModuloSet.build(inst)
        P = inst.Pv
        u = np.zeros(3 * P + 1)
        u[oracle_admissible(inst.N, P, 3 * P)] = 1.0
        xs = [Fraction(int(j), 2) for j in np.linspace(1, 6 * P, 20).round()]
        for x in xs:
            n = np.arange(1, math.floor(x) + 1)
            for s in s_grid:
                direct = complex(np.sum(u[n] * np.exp(2j * n * s)))
                err = abs(ms.sum_sieve_eval(mset, x, float(s)) - direct)
                worst = max(worst, err)
                if err > 1e-8:
                    bad.append((inst.N, P, x, s, err))
    collapse_bad = 0
    for i in range(200):
        inst = insts[i % len(insts)]
        mset = ms.ModuloSet.build(inst)
        table = {}

        def F(m, L, _t=table):
            if (m, L) not in _t:
                _t[(m, L)] = Fraction(int(rng.integers(-99, 100)), int(rng.integers(1, 12)))
            return _t[(m, L)]

        lhs, rhs = ms.qd_collapse_sides(mset, F)
        collapse_bad += lhs != rhs
    ok = not bad and collapse_bad == 0
    criterion(6, ok, f"sum-sieve worst |err| {worst:.2e} over 4000 points; collapse failures {collapse_bad}/200")
    assert ok, bad[:5]


def test_criterion_07_ubh_regression(criterion, capsys):
    code = main(["scan", "ubh", "--at", "400", "--json"])
    report = scn.ScanReport.from_dict(json.loads(capsys.readouterr().out))
    at_400 = code == 1 and any(v.p == 23 and v.status == "violated" for v in report.verdicts)

    t0 = time.perf_counter()
    a = scn.scan_ubh_range(312, 5000)
    dt = time.perf_counter() - t0
    b = scn.scan_ubh_range(312, 5000)
    deterministic = a.to_dict() == b.to_dict()

    mismatches, compared = [], 0
    for N in range(4, 2001):
        for v in scn.check_ubh(N):
            if v.p is None:
                continue
            margin, status = scn.ubh_bruteforce(N, v.p)
            compared += 1
            if margin != v.margin or status != v.status:
                mismatches.append((N, v.p))
    ok = at_400 and dt < 600 and deterministic and not mismatches
    criterion(7, ok, f"N=400 p=23 violated: {at_400}; [312, 5000] in {dt:.1f}s, "
                     f"{len(a.violated_N)} N violated, deterministic: {deterministic}; "
                     f"brute force {compared - len(mismatches)}/{compared} (N, p) agree")
    assert ok


@pytest.mark.slow
def test_criterion_08_ubh_at_1e8(criterion):
    rng = np.random.default_rng(8)
    N = 10**8 + int(rng.integers(0, 101))
    t0 = time.perf_counter()
    vs = scn.check_ubh(N)
    dt = time.perf_counter() - t0
    bad = [v for v in vs if v.status == "violated"]
    w = scn.worst(vs)
    ok = not bad
    criterion(8, ok, f"N={N}: {len(bad)} of {len(vs)} primes violated, worst p={w.p} "
                     f"margin={float(w.margin):.4g}, {dt:.1f}s")
    assert ok


@pytest.mark.slow
def test_criterion_09_theta_variant(criterion):
    rng = np.random.default_rng(9)
    Ns = sorted(3 * 10**7 + rng.choice(51, size=5, replace=False))
    rows = []
    for N in Ns:
        vs = scn.check_ubh(int(N), theta=True)
        rows.append((int(N), sum(v.status == "violated" for v in vs), scn.worst(vs)))
    ok = all(r[1] == 0 for r in rows)
    detail = "; ".join(f"N={N}: {k} violated (worst p={w.p}, margin={float(w.margin):.4g})"
                       for N, k, w in rows)
    criterion(9, ok, detail)
    assert ok


def test_criterion_10_constants(criterion):
    c = dens.constants(10**7)
    # independent partial products with a plain sieve
    z = 10**7
    flags = np.ones(z + 1, dtype=bool)
    flags[:2] = False
    for q in range(2, math.isqrt(z) + 1):
        if flags[q]:
            flags[q * q::q] = False
    ps = np.flatnonzero(flags).astype(np.float64)
    c2 = math.exp(math.fsum(np.log(ps[1:] * (ps[1:] - 2) / (ps[1:] - 1) ** 2)))
    big = ps[2:]
    c3 = math.exp(math.fsum(np.log(1 - (3 * big - 1) / (big - 1) ** 3)))
    lo2, hi2 = c.bracket("C2")
    lo3, hi3 = c.bracket("C3")
    checks = {
        "C2": abs(c.C2 - 0.66016) <= 5e-5 and lo2 <= 0.6601618158 <= hi2 and abs(c2 - c.C2) < 1e-12,
        "C3": abs(c.C3 - 0.635166) <= 5e-5 and abs(c3 - c.C3) < 1e-12 and hi3 - lo3 < 5e-5,
        "C1": f"{c.C1:.9f}" == "1.781072418",
        "hl": abs(c.hl_ratio - 0.260947) <= 1e-6,
    }
    ok = all(checks.values())
    criterion(10, ok, f"C1={c.C1:.10f} C2={c.C2:.8f} in [{lo2:.8f}, {hi2:.8f}] "
                      f"C3={c.C3:.8f} in [{lo3:.8f}, {hi3:.8f}] hl={c.hl_ratio:.8f}")
    assert ok, checks


def test_criterion_11_threshold(criterion):
    t0 = time.perf_counter()
    bad = [N for N in range(312, 10**5 + 1) if not all(dens.threshold_check(N))]
    dt = time.perf_counter() - t0
    ok = not bad and dt < 300
    criterion(11, ok, f"N in [312, 100000]: {len(bad)} failures, {dt:.1f}s")
    assert ok, bad[:10]


@pytest.mark.xfail(strict=False, reason="soft check: single-N ratio converges slowly to the asymptotic value")
def test_criterion_12_error_ratio(criterion):
    _, r = dens.hl_ratio_empirical(10**6)
    ok = 0.20 <= r <= 0.33
    criterion(12, ok, f"hl_ratio_empirical(1e6) = {r:.6f}, target band [0.20, 0.33] (soft)")
    assert ok


def test_criterion_13_bounded_error(criterion):
    rng = np.random.default_rng(13)
    bad, cases, tightest = [], 0, 0.0
    for N in range(1, 10**4 + 1):
        if not is_squarefree(N):
            continue
        bound = Fraction(2 ** (len(factorize_small(N)) - 1)) if N > 1 else Fraction(1, 2)
        for c in (1, 2, 3, 6):
            if math.gcd(c, N) != 1:
                continue
            inst = ProblemInstance.of(N, c * N)
            P = inst.Pv
            S = cnt.admissible_prefix_counts(inst, P, 1)
            w1 = adm.size_W_d(inst, 1)
            t1 = cnt.t_term(inst, 1)
            js = rng.choice(P, size=min(100, P), replace=False)
            # T^1(x) = |W^1| x / P - t^1 - S^1(x) at x = j + 1/2
            two_T = (w1 * (2 * js + 1)) / P - 2 * t1 - 2 * S[js]  # float prefilter
            for j in js[np.abs(two_T) >= 2 * float(bound) - 1e-6].tolist():
                x = Fraction(2 * j + 1, 2)
                T = w1 * x / P - t1 - int(S[j])
                if abs(T) > bound:
                    bad.append((N, c, x, T))
            tightest = max(tightest, float(np.max(np.abs(two_T))) / (2 * float(bound)))
            cases += len(js)
    # the prefix-count route agrees with the fractional-part sum on a sample
    for N, c in ((30, 7), (77, 6), (1001, 2)):
        inst = ProblemInstance.of(N, c * N)
        S = cnt.admissible_prefix_counts(inst, inst.Pv, 1)
        for j in (0, inst.Pv // 3, inst.Pv - 1):
            x = Fraction(2 * j + 1, 2)
            assert cnt.error_T_fracsum(inst, x, 1) == adm.size_W_d(inst, 1) * x / inst.Pv - cnt.t_term(inst, 1) - int(S[j])
    ok = not bad
    criterion(13, ok, f"{cases} (N, c, x) points, {len(bad)} violations, max |T|/bound {tightest:.3f}")
    assert ok, bad[:5]


def test_criterion_14_witnesses(criterion):
    t0 = time.perf_counter()
    missing = []
    for N in range(4, 10**5 + 1):
        w = scn.goldbach_witness(N)
        if not (w.found and is_prime(w.p_small) and is_prime(w.p_large) and w.p_small + w.p_large == 2 * N):
            missing.append(N)
    dt = time.perf_counter() - t0
    twins = [scn.twin_witness(1, M) for M in (5, 11, 101)]
    twin_ok = all(w.found and w.p_small > w.M and w.p_large - w.p_small == 2
                  and is_prime(w.p_small) and is_prime(w.p_large) for w in twins)
    ok = not missing and dt < 120 and twin_ok
    pairs = ", ".join(f"M={w.M}: ({w.p_small}, {w.p_large})" for w in twins)
    criterion(14, ok, f"Goldbach N in [4, 100000]: {len(missing)} missing, {dt:.1f}s; twins {pairs}")
    assert ok, missing[:5]

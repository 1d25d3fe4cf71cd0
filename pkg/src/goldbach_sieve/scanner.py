"""Exact scanners for the windowed slice-count hypothesis (UBH), its theta
extension and the primorial(M) variant (UBH'), plus Goldbach and twin witnesses.

For a prime p | P_6N the window is centred at r = N e_p mod P (r = N mod p,
r = 0 mod every other prime of P).  LHS(x) counts offsets delta in (-x, x]
with r + delta in the slice W^p; the hypothesis is LHS(x) <= 3 x omega^p.
The right side is linear in x and the left side a step function, so the
worst case sits at x_lo or just after an offset enters at x = |delta|.
"""

from __future__ import annotations

import bisect
import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .admissible import enumerate_W, is_admissible, size_W_d
from .counting import error_T_fracsum, window_offsets
from .modulus import ProblemInstance, idempotent_mod_P, is_prime, primorial

FLOAT_EPS = float(np.finfo(np.float64).eps)


def fmt_q(q: Fraction | None) -> str | None:
    return None if q is None else f"{q.numerator}/{q.denominator}"


def parse_q(s: str | None) -> Fraction | None:
    return None if s in (None, "", "-") else Fraction(s)


@dataclass
class UbhVerdict:
    N: int
    p: int | None
    status: str
    worst_x: Fraction | None = None
    lhs: int | None = None
    rhs_num: int | None = None
    rhs_den: int | None = None
    margin: Fraction | None = None
    # theta^2 when the theta slack is on; the rhs fields then hold 3 x omega^p only
    theta_sq: Fraction | None = None
    cells: int = 0

    @property
    def rhs(self) -> Fraction | None:
        return None if self.rhs_num is None else Fraction(self.rhs_num, self.rhs_den)

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("worst_x", "margin", "theta_sq"):
            d[k] = fmt_q(d[k])
        for k in ("rhs_num", "rhs_den"):
            d[k] = None if d[k] is None else str(d[k])
        del d["cells"]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "UbhVerdict":
        return cls(
            N=d["N"], p=d["p"], status=d["status"],
            worst_x=parse_q(d["worst_x"]), lhs=d["lhs"],
            rhs_num=None if d["rhs_num"] is None else int(d["rhs_num"]),
            rhs_den=None if d["rhs_den"] is None else int(d["rhs_den"]),
            margin=parse_q(d["margin"]), theta_sq=parse_q(d.get("theta_sq")),
        )


def _violates(margin: Fraction, theta_sq: Fraction | None) -> bool:
    """margin = rhs - lhs; with theta the test is lhs > rhs + theta, theta = sqrt(theta_sq)."""
    if margin >= 0:
        return False
    return theta_sq is None or margin * margin > theta_sq


def sweep(N: int, p: int, offsets: np.ndarray, coef: Fraction, x_lo: Fraction,
          x_hi: Fraction, theta_sq: Fraction | None = None) -> UbhVerdict:
    """Worst margin of coef*x - LHS(x) over x in [x_lo, x_hi).

    ``offsets`` must contain every admissible delta with |delta| < x_hi.
    Checked points: x_lo with its exact count, and every integer a = |delta|
    in [x_lo, x_hi) with the post-entry count #{|delta| <= a}.
    """
    absd = np.sort(np.abs(offsets))
    lo_f = math.floor(x_lo)
    # count at x_lo: delta in (-x_lo, x_lo]
    if x_lo.denominator == 1:
        c0 = int(np.count_nonzero((offsets > -lo_f) & (offsets <= lo_f)))
    else:
        c0 = int(np.searchsorted(absd, lo_f, side="right"))
    points = np.unique(absd[(absd >= x_lo) & (absd < x_hi)])
    counts = np.searchsorted(absd, points, side="right")

    best_x, best_c, best_m = x_lo, c0, coef * x_lo - c0
    if len(points):
        cf = float(coef)
        mf = cf * points.astype(np.float64) - counts
        # each float margin is within `err` of the exact one (three roundings on
        # values bounded by cf*a_max + c_max), so the exact minimiser is among
        # the points within 2*err of the float minimum
        err = 4 * FLOAT_EPS * (cf * float(points[-1]) + float(counts[-1]) + 1.0)
        cand = np.flatnonzero(mf <= mf.min() + 2 * err)
        for i in cand.tolist():
            a, c = int(points[i]), int(counts[i])
            m = coef * a - c
            if m < best_m:
                best_x, best_c, best_m = Fraction(a), c, m
    rhs = coef * best_x
    status = "violated" if _violates(best_m, theta_sq) else "holds"
    return UbhVerdict(N, p, status, best_x, best_c, rhs.numerator, rhs.denominator,
                      best_m, theta_sq, cells=len(offsets))


def _window(inst: ProblemInstance, p: int, x_hi: Fraction) -> tuple[int, np.ndarray]:
    center = inst.N * idempotent_mod_P(inst.P, p) % inst.Pv
    H = math.ceil(x_hi) - 1
    return center, window_offsets(inst, center, -H, H, p)


def _theta_sq(inst: ProblemInstance) -> Fraction:
    w1 = Fraction(size_W_d(inst, 1), inst.Pv)
    return inst.N * w1 * w1


def check_ubh(N: int, theta: bool = False) -> list[UbhVerdict]:
    """Per-prime verdicts for P = primorial(sqrt(2N)), x in [N/2, N-1)."""
    if N < 2:
        raise ValueError("N must be >= 2")
    inst = ProblemInstance.goldbach(N)
    x_lo, x_hi = Fraction(N, 2), Fraction(N - 1)
    if inst.P_6N.value == 1 or x_lo >= x_hi:
        return [UbhVerdict(N, None, "vacuous")]
    tsq = _theta_sq(inst) if theta else None
    out = []
    for p in inst.P_6N.factors:
        _, offs = _window(inst, p, x_hi)
        coef = Fraction(3 * size_W_d(inst, p), inst.Pv)
        out.append(sweep(N, p, offs, coef, x_lo, x_hi, tsq))
    return out


def check_ubh_prime(N: int, M: int, theta: bool = False) -> list[UbhVerdict]:
    """Per-prime verdicts for P = primorial(M), x in [M^2 - 7N, M^2 - N).

    With ``theta`` the slack theta'(M) = M omega^1_P(N) is added.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if M < 2 * N + 1:
        raise ValueError(f"M = {M} must be >= 2N + 1 = {2 * N + 1}")
    inst = ProblemInstance.of(N, primorial(M))
    x_lo, x_hi = Fraction(max(M * M - 7 * N, 0)), Fraction(M * M - N)
    if inst.P_6N.value == 1:
        return [UbhVerdict(N, None, "vacuous")]
    tsq = None
    if theta:
        w1 = Fraction(size_W_d(inst, 1), inst.Pv)
        tsq = M * M * w1 * w1
    out = []
    for p in inst.P_6N.factors:
        _, offs = _window(inst, p, x_hi)
        coef = Fraction(3 * size_W_d(inst, p), inst.Pv)
        out.append(sweep(N, p, offs, coef, x_lo, x_hi, tsq))
    return out


def worst(verdicts: list[UbhVerdict]) -> UbhVerdict:
    real = [v for v in verdicts if v.margin is not None]
    return min(real, key=lambda v: (v.margin, v.p)) if real else verdicts[0]


def overall_status(verdicts: list[UbhVerdict]) -> str:
    if any(v.status == "violated" for v in verdicts):
        return "violated"
    if all(v.status == "vacuous" for v in verdicts):
        return "vacuous"
    return "holds"


# ---------------------------------------------------------------------------
# independent oracles (small N)


def ubh_bruteforce(N: int, p: int, theta: bool = False, M: int | None = None) -> tuple[Fraction, str]:
    """Worst margin over the half-integer grid of the x range, both one-sided limits,
    membership decided by big-integer gcds.  Returns (margin, status).

    M=None is the base hypothesis; otherwise P = primorial(M), x in [M^2 - 7N, M^2 - N).
    """
    if M is None:
        inst = ProblemInstance.goldbach(N)
        x_lo, x_hi = Fraction(N, 2), Fraction(N - 1)
    else:
        inst = ProblemInstance.of(N, primorial(M))
        x_lo, x_hi = Fraction(max(M * M - 7 * N, 0)), Fraction(M * M - N)
    P, P6N = inst.Pv, inst.P_6N.value
    r = N * idempotent_mod_P(inst.P, p) % P
    H = math.ceil(x_hi) - 1
    members = []
    for n in range(r - H + (-(r - H)) % p, r + H + 1, p):
        if math.gcd((N - n) * (N + n), P) == 1 and math.gcd(P6N, n) == p:
            members.append(n - r)
    mem = np.array(members, dtype=np.int64)
    absd = np.sort(np.abs(mem))
    # grid x = j/2 in [x_lo, x_hi); both one-sided limits at every point
    js = np.arange(math.ceil(2 * x_lo), math.ceil(2 * x_hi), dtype=np.int64)
    fx = js // 2
    at = np.searchsorted(mem, fx, side="right") - np.searchsorted(mem, -((js + 1) // 2), side="right")
    after = np.searchsorted(absd, fx, side="right")
    # margin * 2P = 3 |W^p| j - 2 P count, exact in Python ints
    A, twoP = 3 * size_W_d(inst, p), 2 * P
    jo = js.astype(object)
    cand = [A * jo - twoP * at.astype(object), A * jo - twoP * after.astype(object)]
    scaled = min(min(c) for c in cand)
    best = Fraction(scaled, twoP)
    if x_lo.denominator > 2:
        x = x_lo
        c_lo = int(np.count_nonzero((mem > -x) & (mem <= x)))
        best = min(best, Fraction(A, P) * x - c_lo)
    tsq = None
    if theta:
        w1 = Fraction(size_W_d(inst, 1), P)
        tsq = (N if M is None else M * M) * w1 * w1
    return best, "violated" if _violates(best, tsq) else "holds"


def ubh_T_form_check(N: int, p: int, theta: bool = False) -> tuple[Fraction, str, list]:
    """The same hypothesis decided from the error terms instead of the counts.

    Rows are (x, T-form margin, S-form margin) with the T-form margin
    x omega^p - (T^p(y - x) - T^p(y + x)) and the S-form margin 3 x omega^p - LHS(x).
    T is only defined off the integers, so jump points a are probed at a + 1/4
    and pulled back by 3 omega^p / 4.  Returns (worst margin, status, rows).
    Needs P small enough to enumerate.
    """
    inst = ProblemInstance.goldbach(N)
    pattern = enumerate_W(inst)
    x_lo, x_hi = Fraction(N, 2), Fraction(N - 1)
    y, offs = _window(inst, p, x_hi)
    w = Fraction(size_W_d(inst, p), inst.Pv)
    probes = [(Fraction(a) + Fraction(1, 4), Fraction(1, 4))
              for a in sorted({abs(int(d)) for d in offs}) if a >= x_lo]
    probes.insert(0, (x_lo, Fraction(0)) if x_lo.denominator > 1 else (x_lo + Fraction(1, 4), Fraction(1, 4)))
    rows, best = [], None
    for x, shift in probes:
        tm = x * w - (error_T_fracsum(inst, y - x, p, pattern) - error_T_fracsum(inst, y + x, p, pattern))
        lhs = int(np.count_nonzero((offs > -x) & (offs <= x)))
        rows.append((x, tm, 3 * x * w - lhs))
        m = tm - 3 * shift * w
        best = m if best is None else min(best, m)
    tsq = _theta_sq(inst) if theta else None
    return best, "violated" if _violates(best, tsq) else "holds", rows


# ---------------------------------------------------------------------------
# range scans


@dataclass
class NSummary:
    N: int
    status: str
    worst_margin: Fraction | None

    def line(self) -> str:
        return f"{self.N}\t{self.status}\t{fmt_q(self.worst_margin) or '-'}"


@dataclass
class ScanReport:
    kind: str
    range: tuple[int, int]
    summaries: list[NSummary]
    verdicts: list[UbhVerdict]
    config: dict = field(default_factory=dict)
    cells_sieved: int = 0
    wall_time: float = 0.0

    @property
    def violations(self) -> list[UbhVerdict]:
        return [v for v in self.verdicts if v.status == "violated"]

    @property
    def violated_N(self) -> list[int]:
        return [s.N for s in self.summaries if s.status == "violated"]

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "kind": self.kind,
            "range": list(self.range),
            "config": self.config,
            "violated_N": self.violated_N,
            "summaries": [
                {"N": s.N, "status": s.status, "worst_margin": fmt_q(s.worst_margin)}
                for s in self.summaries
            ],
            "verdicts": [v.to_dict() for v in self.verdicts],
        }
        if timing:
            d["cells_sieved"] = self.cells_sieved
            d["wall_time"] = self.wall_time
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScanReport":
        return cls(
            kind=d["kind"], range=tuple(d["range"]), config=d["config"],
            summaries=[NSummary(s["N"], s["status"], parse_q(s["worst_margin"])) for s in d["summaries"]],
            verdicts=[UbhVerdict.from_dict(v) for v in d["verdicts"]],
            cells_sieved=d.get("cells_sieved", 0), wall_time=d.get("wall_time", 0.0),
        )

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "p", "status", "worst_x", "lhs", "rhs_num", "rhs_den", "margin"])
        for v in self.verdicts:
            w.writerow([v.N, v.p, v.status, fmt_q(v.worst_x), v.lhs, v.rhs_num, v.rhs_den, fmt_q(v.margin)])
        return buf.getvalue()


def _check_one(args) -> list[UbhVerdict]:
    N, theta = args
    return check_ubh(N, theta)


def read_checkpoint(path: str | os.PathLike) -> dict[int, NSummary]:
    done = {}
    if not os.path.exists(path):
        return done
    with open(path) as fh:
        for raw in fh:
            parts = raw.rstrip("\n").split("\t")
            if len(parts) != 3:
                continue  # a torn final line from a killed run
            try:
                N = int(parts[0])
                done[N] = NSummary(N, parts[1], parse_q(parts[2]))
            except ValueError:
                continue
    return done


def scan_ubh_range(N_from: int, N_to: int, theta: bool = False, workers: int = 1,
                   checkpoint: str | os.PathLike | None = None, stride: int = 50,
                   full: bool = False) -> ScanReport:
    """check_ubh over N_from..N_to in N order, optionally resumable via a checkpoint."""
    if N_from > N_to:
        raise ValueError(f"empty range: {N_from} > {N_to}")
    if N_from < 2:
        raise ValueError("N_from must be >= 2")
    t0 = time.perf_counter()
    done = read_checkpoint(checkpoint) if checkpoint else {}
    todo = [N for N in range(N_from, N_to + 1) if N not in done or done[N].status == "violated"]
    kind = "ubh-theta" if theta else "ubh"
    results: dict[int, list[UbhVerdict]] = {}

    fh = None
    if checkpoint:
        fh = open(checkpoint, "a+")
        fh.seek(0, os.SEEK_END)
        if fh.tell():
            fh.seek(fh.tell() - 1)
            if fh.read(1) != "\n":
                fh.write("\n")  # isolate a torn line left by a killed run
    pending: list[str] = []

    def record(N: int, vs: list[UbhVerdict]) -> None:
        results[N] = vs
        if fh and N not in done:
            w = worst(vs)
            pending.append(NSummary(N, overall_status(vs), w.margin).line())
            if len(pending) >= stride:
                fh.write("\n".join(pending) + "\n")
                fh.flush()
                pending.clear()

    try:
        jobs = [(N, theta) for N in todo]
        if workers > 1 and len(jobs) > 1:
            chunk = max(1, len(jobs) // (4 * workers))
            with ProcessPoolExecutor(max_workers=workers) as ex:
                for (N, _), vs in zip(jobs, ex.map(_check_one, jobs, chunksize=chunk)):
                    record(N, vs)
        else:
            for job in jobs:
                record(job[0], _check_one(job))
    finally:
        if fh:
            if pending:
                fh.write("\n".join(pending) + "\n")
            fh.close()

    summaries, verdicts, cells = [], [], 0
    for N in range(N_from, N_to + 1):
        if N in results:
            vs = results[N]
            cells += sum(v.cells for v in vs)
            summaries.append(NSummary(N, overall_status(vs), worst(vs).margin))
            verdicts += vs if full else [v for v in vs if v.status == "violated"]
        else:
            summaries.append(done[N])
    config = {"theta": theta, "full": full}
    return ScanReport(kind, (N_from, N_to), summaries, verdicts, config, cells,
                      time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class WitnessRecord:
    N: int
    n: int | None
    p_small: int | None
    p_large: int | None
    M: int | None = None
    found: bool = True
    admissible: bool | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def goldbach_witness(N: int) -> WitnessRecord:
    """Smallest n >= 1 with N - n and N + n both prime."""
    if N < 4:
        raise ValueError("N must be >= 4")
    for n in range(1, N - 1):
        if is_prime(N - n) and is_prime(N + n):
            inst = ProblemInstance.goldbach(N)
            adm = is_admissible(inst, n)
            # the only admissibility gap is N - n itself being a prime <= sqrt(2N)
            if adm != ((N - n) ** 2 > 2 * N):
                raise AssertionError(f"admissibility cross-check failed at N={N}, n={n}")
            return WitnessRecord(N, n, N - n, N + n, admissible=adm)
    return WitnessRecord(N, None, None, None, found=False)


def twin_witness(N: int, M: int) -> WitnessRecord:
    """Smallest n <= M^2 - N with n - N > M and n - N, n + N both prime."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if M < 2 * N + 1:
        raise ValueError(f"M = {M} must be >= 2N + 1 = {2 * N + 1}")
    inst = ProblemInstance.of(N, primorial(M))
    for n in range(M + N + 1, M * M - N + 1):
        if is_prime(n - N) and is_prime(n + N):
            assert n - N > M
            # both primes exceed M, so neither shares a factor with primorial(M)
            adm = math.gcd((n - N) * (n + N), inst.Pv) == 1
            return WitnessRecord(N, n, n - N, n + N, M=M, admissible=adm)
    return WitnessRecord(N, None, None, None, M=M, found=False)


def witnesses(Ns: Iterable[int]) -> list[WitnessRecord]:
    return [goldbach_witness(N) for N in Ns]

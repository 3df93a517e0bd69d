"""Batch verification of the finite-field and orbit facts over parameter sweeps.

Every task gets its own generator seeded from ``(seed, p, s, name)``, so
results do not depend on worker count or scheduling; the merge keeps task order.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .exact import DomainError, Mat2, is_prime
from .orbits import verify_claim1, verify_lemma25, verify_thm34
from .orders import (find_generator, orbit_hypotheses, order_mod, thm31_least_exponent,
                     thm33_verify, construct_m0)
from .transforms import build_A3, transform_data, verify_prop38, verify_prop39
from .zeros import DigitSet3, zero_cosets_3digit

P_CAP = 13
S_CAP = 3
P2_COUNTEREXAMPLE = Mat2(3, 2, 2, 1)  # 2*[[1,1],[1,0]] + I


@dataclass
class TaskResult:
    name: str
    p: Optional[int]
    s: Optional[int]
    status: str  # pass | fail | skip
    checked: int = 0
    failures: int = 0
    detail: dict = field(default_factory=dict)


def _rng(seed: int, *key) -> random.Random:
    return random.Random(":".join(str(k) for k in (seed, *key)))


def random_invertible(rng: random.Random, m: int, lo: int = -20, hi: int = 20) -> Mat2:
    while True:
        M = Mat2(*(rng.randint(lo, hi) for _ in range(4)))
        if math.gcd(M.det(), m) == 1:
            return M


def orbit_matrix(p: int) -> Mat2:
    G = find_generator(p)
    return G if p == 2 or orbit_hypotheses(G, p) else construct_m0(p).orbit_matrix


def task_lifting_exponent(p: int, s: int, trials: int, seed: int) -> TaskResult:
    if p == 2:
        e, _ = thm31_least_exponent(P2_COUNTEREXAMPLE, 2, 3, i0=1)
        ok = e != 4
        return TaskResult("lifting_exponent", p, s, "pass" if ok else "fail", 1, 0 if ok else 1,
                          {"expected_counterexample": True, "s": 3, "least_exponent": e})
    rng = _rng(seed, p, s, "lifting_exponent")
    fails = 0
    for _ in range(trials):
        A = Mat2(*(rng.randint(-3 * p, 3 * p) for _ in range(4)))
        i0 = rng.randrange(4)
        if A.entries()[i0] % p == 0:
            ent = list(A.entries())
            ent[i0] += rng.randrange(1, p)
            A = Mat2(*ent)
        e, check = thm31_least_exponent(A * p + Mat2.identity(), p, s, i0)
        same = all((x - y) % p == 0 for x, y in zip(check.entries(), A.entries()))
        if e != p ** (s - 1) or not same:
            fails += 1
    return TaskResult("lifting_exponent", p, s, "fail" if fails else "pass", trials, fails)


def task_order_lift(p: int, s: int, trials: int, seed: int) -> TaskResult:
    rng = _rng(seed, p, s, "order_lift")
    mats = [orbit_matrix(p)] + [random_invertible(rng, p) for _ in range(trials)]
    fails = sum(not thm33_verify(M, p, s).holds for M in mats)
    return TaskResult("order_lift", p, s, "fail" if fails else "pass", len(mats), fails)


def task_orbit_structure(p: int, s: int, trials: int, seed: int) -> TaskResult:
    if p == 2:
        return TaskResult("orbit_structure", p, s, "skip", detail={"reason": "needs p >= 3"})
    rep = verify_thm34(orbit_matrix(p), p, s)
    status = {"passed": "pass", "failed": "fail", "skipped": "skip"}[rep.status]
    return TaskResult("orbit_structure", p, s, status, 1, int(status == "fail"),
                      {"per_level": rep.per_level})


def task_seed_classes(p: int, s: int, trials: int, seed: int) -> TaskResult:
    if p == 2:
        return TaskResult("seed_classes", p, s, "skip", detail={"reason": "needs p >= 3"})
    rep = verify_claim1(orbit_matrix(p), p, s, trials, _rng(seed, p, s, "seed_classes"))
    status = {"passed": "pass", "failed": "fail", "skipped": "skip"}[rep.status]
    return TaskResult("seed_classes", p, s, status, rep.pairs_checked, len(rep.violations))


def task_grid_permutation(p: int, s: int, trials: int, seed: int) -> TaskResult:
    rng = _rng(seed, p, s, "grid_permutation")
    q = p**s
    fails = sum(not verify_lemma25(random_invertible(rng, q), q) for _ in range(trials))
    return TaskResult("grid_permutation", p, s, "fail" if fails else "pass", trials, fails)


def random_digits_eta(rng: random.Random, case: str, lo: int = -30, hi: int = 30) -> DigitSet3:
    """Random normalized digit set with 3 | delta in the requested case."""
    while True:
        a1, a2, b1, b2 = (rng.randint(lo, hi) for _ in range(4))
        delta = a1 * b2 - a2 * b1
        if delta == 0 or delta % 3 or math.gcd(a1, a2, b1, b2) != 1:
            continue
        in_ii = (2 * a1 - b1) % 3 == 0 and (2 * a2 - b2) % 3 == 0
        if in_ii == (case == "ii"):
            return DigitSet3.of(a1, a2, b1, b2)


def task_digit_transforms(trials: int, seed: int) -> list[TaskResult]:
    out = []
    for case in ("i", "ii"):
        rng = _rng(seed, "props", case)
        f38 = f39 = 0
        for _ in range(trials):
            D = random_digits_eta(rng, case)
            r = build_A3(None, D)
            td = r.data
            f38 += not (verify_prop38(td) and td.prop_case() == case)
            f39 += not verify_prop39(td, zero_cosets_3digit(r.D3).cosets[0])
        out.append(TaskResult(f"normal_form_case_{case}", None, None, "fail" if f38 else "pass",
                              trials, f38))
        out.append(TaskResult(f"refined_zeros_case_{case}", None, None, "fail" if f39 else "pass",
                              trials, f39))
    return out


TASKS = {
    "lifting_exponent": task_lifting_exponent,
    "order_lift": task_order_lift,
    "orbit_structure": task_orbit_structure,
    "seed_classes": task_seed_classes,
    "grid_permutation": task_grid_permutation,
}


def _run(args):
    name, p, s, trials, seed = args
    return TASKS[name](p, s, trials, seed)


def validate_ranges(ps: list[int], ss: list[int]) -> None:
    for p in ps:
        if not is_prime(p):
            raise DomainError(f"p = {p} is not prime")
        if p > P_CAP:
            raise DomainError(f"p = {p} exceeds the cap {P_CAP}")
    for s in ss:
        if not 1 <= s <= S_CAP:
            raise DomainError(f"s = {s} outside 1..{S_CAP}")


@dataclass
class SuiteReport:
    p_values: list
    s_values: list
    trials: int
    seed: int
    summary: dict
    results: list

    @property
    def failed(self) -> bool:
        return any(r.status == "fail" for r in self.results)


def run_suite(ps: list[int], ss: list[int], trials: int = 100, seed: int = 0,
              workers: int = 1, names: Optional[list[str]] = None) -> SuiteReport:
    validate_ranges(ps, ss)
    if trials < 0:
        raise DomainError("trials must be non-negative")
    names = names or list(TASKS)
    jobs = [(n, p, s, trials, seed) for p in ps for s in ss for n in names]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_run, jobs))
    else:
        results = [_run(j) for j in jobs]
    if jobs:
        results.extend(task_digit_transforms(trials, seed))
    summary: dict = {}
    for r in results:
        key = r.name.split("_case_")[0]
        c = summary.setdefault(key, {"pass": 0, "fail": 0, "skip": 0})
        c[r.status] += 1
    return SuiteReport(list(ps), list(ss), trials, seed, summary, results)

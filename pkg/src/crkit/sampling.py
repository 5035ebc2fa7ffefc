"""Deterministic randomized search for violations and near-equality witnesses.

Sample ``index`` under ``seed`` is generated from the counter-based streams
``(seed, 16 * index + k)``, so results do not depend on worker count or
evaluation order.  Aggregation keeps the minimum of ``slack / rhs`` and the
count of records whose scale-normalised slack falls below the tolerance.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import inequalities as ineq
from .rng import complex_uniform, uniform
from .tensor import SlackRecord, TracelessHermitianMatrix, WebsterTensor, project_webster_symmetry, remove_traces

WORKERS_ENV = "CRKIT_WORKERS"
SEEDS = tuple(range(100))


@dataclass(frozen=True)
class SampleConfig:
    n: int
    count: int
    seed: int
    near_equality_threshold: float = ineq.NEAR_EQUALITY
    start: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class SampleSummary:
    inequality: str
    n: int
    count: int = 0
    min_slack_ratio: float = float("inf")
    violations: int = 0
    informational: bool = False
    witnesses: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def merge(self, other: "SampleSummary", max_witnesses: int | None = None) -> "SampleSummary":
        self.count += other.count
        self.min_slack_ratio = min(self.min_slack_ratio, other.min_slack_ratio)
        self.violations += other.violations
        for key, val in other.extra.items():
            self.extra[key] = max(self.extra.get(key, val), val)
        self.witnesses.extend(other.witnesses)
        if max_witnesses is not None:
            self.witnesses.sort(key=lambda w: w["slack_ratio"])
            del self.witnesses[max_witnesses:]
        return self

    def to_dict(self) -> dict:
        out = {
            "kind": "summary",
            "inequality": self.inequality,
            "n": self.n,
            "count": self.count,
            "min_slack_ratio": self.min_slack_ratio,
            "violations": self.violations,
        }
        if self.informational:
            out["informational"] = True
        out.update(self.extra)
        return out


# -- sample generators --------------------------------------------------------

def _centered(v: np.ndarray) -> np.ndarray:
    return v - v.mean()


def _spread(seed: int, idx: int) -> float:
    """Random positive scale spanning several decades, to exercise scale covariance."""
    return float(10.0 ** uniform(seed, idx, 1, -3.0, 3.0)[0])


def _traceless_e(n: int, seed: int, idx: int) -> TracelessHermitianMatrix:
    a = complex_uniform(seed, idx, (n, n)) * _spread(seed, idx + 1)
    h = 0.5 * (a + a.conj().T)
    h -= np.trace(h) / n * np.eye(n)
    h = 0.5 * (h + h.conj().T)
    return TracelessHermitianMatrix(h)


def _traceless_c(n: int, seed: int, idx: int) -> WebsterTensor:
    raw = complex_uniform(seed, idx, (n,) * 4) * _spread(seed, idx + 1)
    p = project_webster_symmetry(raw)
    return project_webster_symmetry(remove_traces(p))


def _gen_okumura(m, seed, i):
    base = 16 * i
    if i % 10 == 9:
        # extremal direction with a perturbation spanning 1e-8 .. 1e-1
        a = okumura_like(m, seed, base)
    else:
        a = _centered(uniform(seed, base, m)) * _spread(seed, base + 1)
    return ineq.okumura(a)


def okumura_like(m: int, seed: int, idx: int) -> np.ndarray:
    sign = 1 if uniform(seed, idx + 2, 1)[0] >= 0 else -1
    shift = int((uniform(seed, idx + 3, 1, 0.0, 1.0)[0]) * m)
    eps = float(10.0 ** uniform(seed, idx + 4, 1, -8.0, -1.0)[0])
    a = np.roll(ineq.okumura_extremal(m, 1.0, sign), shift) + eps * uniform(seed, idx, m)
    return _centered(a)


def _gen_kato_pointwise(n, seed, i):
    base = 16 * i
    lam = _centered(uniform(seed, base, n)) * _spread(seed, base + 1)
    mu = complex_uniform(seed, base + 2, n) * _spread(seed, base + 3)
    mu = mu - mu.mean()
    recs = [ineq.kato_E_pointwise(lam, mu, g) for g in range(n)]
    return min(recs, key=lambda r: r.slack / r.scale if r.scale else 0.0)


def _gen_kato_tensor(n, seed, i):
    base = 16 * i
    e = _traceless_e(n, seed, base)
    de = ineq.project_codazzi(complex_uniform(seed, base + 2, (n, n, n)) * _spread(seed, base + 3))
    return ineq.kato_E_tensor(e, de)


def _gen_cubic(n, seed, i):
    return ineq.cubic_E(_traceless_e(n, seed, 16 * i))


def _gen_coupling(n, seed, i):
    base = 16 * i
    return ineq.coupling_bound(_traceless_e(n, seed, base), _traceless_c(n, seed, base + 2))


def _gen_cm(n, seed, i):
    return ineq.cm_cubic(_traceless_c(n, seed, 16 * i))


def _gen_kato_c(n, seed, i):
    base = 16 * i
    c = _traceless_c(n, seed, base)
    dc = ineq.project_cm_derivative(complex_uniform(seed, base + 2, (n,) * 5) * _spread(seed, base + 3))
    return ineq.kato_C(c, dc)


def _gen_kato_c_free(n, seed, i):
    base = 16 * i
    c = project_webster_symmetry(complex_uniform(seed, base, (n,) * 4))
    dc = ineq.project_cm_derivative(complex_uniform(seed, base + 2, (n,) * 5), traceless=False)
    return ineq.kato_C(c, dc, traceless=False)


def _gen_z(n, seed, i):
    return ineq.z_bound(_traceless_e(n, seed, 16 * i))


GENERATORS: dict[str, Callable[[int, int, int], SlackRecord]] = {
    "okumura": _gen_okumura,
    "kato_E_pointwise": _gen_kato_pointwise,
    "kato_E_tensor": _gen_kato_tensor,
    "cubic_E": _gen_cubic,
    "coupling_bound": _gen_coupling,
    "cm_cubic": _gen_cm,
    "kato_C": _gen_kato_c,
    "kato_C_nontraceless": _gen_kato_c_free,
    "z_bound": _gen_z,
}
INFORMATIONAL = {"kato_C_nontraceless"}


def _tolerance(name: str) -> float:
    return ineq.TOL_KATO_C if name.startswith("kato_C") else ineq.TOL


def run(name: str, config: SampleConfig, max_witnesses: int | None = 100) -> SampleSummary:
    """Evaluate ``config.count`` samples of one inequality under one seed."""
    if name not in GENERATORS:
        raise KeyError(f"unknown inequality {name!r}")
    gen = GENERATORS[name]
    tol = _tolerance(name)
    out = SampleSummary(name, config.n, informational=name in INFORMATIONAL)
    for i in range(config.start, config.start + config.count):
        rec = gen(config.n, config.seed, i)
        out.count += 1
        ratio = rec.ratio if rec.rhs > 0 else (0.0 if not rec.violated(tol) else -np.inf)
        out.min_slack_ratio = min(out.min_slack_ratio, ratio)
        if rec.violated(tol):
            out.violations += 1
        if ratio < config.near_equality_threshold and rec.rhs > 0:
            out.witnesses.append(
                {
                    "kind": "witness",
                    "inequality": name,
                    "n": config.n,
                    "seed": config.seed,
                    "index": i,
                    "slack_ratio": ratio,
                    "lhs": rec.lhs,
                    "rhs": rec.rhs,
                    "witness": rec.witness,
                }
            )
        if name == "cm_cubic":
            out.extra["max_route_gap"] = max(out.extra.get("max_route_gap", 0.0), rec.witness["route_gap"])
    if max_witnesses is not None:
        out.witnesses.sort(key=lambda w: w["slack_ratio"])
        del out.witnesses[max_witnesses:]
    return out


# -- default plan -------------------------------------------------------------

def default_plan() -> list[tuple[str, int, int]]:
    """``(inequality, n, total samples)`` entries; totals are split evenly over seeds 0-99."""
    plan: list[tuple[str, int, int]] = []
    plan += [("okumura", m, 12500) for m in range(3, 11)]
    plan += [("kato_E_pointwise", n, 15000) for n in range(2, 9)]
    plan += [("kato_E_tensor", n, 2000) for n in range(2, 7)]
    plan += [("cubic_E", n, 17000) for n in range(3, 9)]
    plan += [("coupling_bound", n, 10000) for n in range(2, 7)]
    plan += [("cm_cubic", 2, 4000), ("cm_cubic", 3, 3000), ("cm_cubic", 4, 2000), ("cm_cubic", 5, 1000)]
    plan += [("kato_C", 2, 4000), ("kato_C", 3, 3000), ("kato_C", 4, 3000)]
    plan += [("kato_C_nontraceless", 2, 1000), ("kato_C_nontraceless", 3, 1000)]
    plan += [("z_bound", n, 20000) for n in range(2, 7)]
    return plan


def _task(args):
    name, n, per_seed, seed, threshold, max_w = args
    return run(name, SampleConfig(n, per_seed, seed, threshold), max_w)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_plan(
    plan: Iterable[tuple[str, int, int]] | None = None,
    seeds: Iterable[int] = SEEDS,
    threshold: float = ineq.NEAR_EQUALITY,
    workers: int | None = None,
    max_witnesses: int | None = 100,
) -> list[SampleSummary]:
    plan = list(default_plan() if plan is None else plan)
    seeds = list(seeds)
    tasks = []
    for name, n, total in plan:
        per_seed = max(1, total // len(seeds))
        tasks += [(name, n, per_seed, s, threshold, max_witnesses) for s in seeds]
    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_task, tasks, chunksize=4))
    else:
        parts = [_task(t) for t in tasks]
    merged: dict[tuple[str, int], SampleSummary] = {}
    for part in parts:
        key = (part.inequality, part.n)
        if key in merged:
            merged[key].merge(part, max_witnesses)
        else:
            merged[key] = part
    return list(merged.values())

"""Maximize the finite-key DI-CHSH rate over the free protocol parameters.

Free parameters are the setting biases ``p_a0``, ``p_b1`` and the split of
``eps_total - eps_ec`` over ``eps_pe``, ``eps_bar`` and ``eps_pa``. The
objective is flat (zero) below the abort threshold and kinked at it, so we
use a deterministic grid followed by derivative-free coordinate search.

Search coordinates are ``logit(p_a0), logit(p_b1), ln w_pe, ln w_bar,
ln w_pa``; the epsilon split is ``eps_rem * w / sum(w)`` with ``eps_pa``
taking the exact remainder so every probed point meets the budget.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .chsh import (
    ChannelObservation,
    DiProtocolConfig,
    EstimationError,
    RateReport,
    di_rate,
)
from .core import EpsilonBudget, binary_entropy

__all__ = ["ConfigurationError", "OptimizationProblem", "Optimum",
           "optimize_rate", "sweep", "split_budget", "evaluate"]

_LOGIT_BOUND = 40.0
_LOG_W_MIN = math.log(1e-9)


class ConfigurationError(ValueError):
    """The optimization problem cannot be satisfied as posed."""


@dataclass(frozen=True)
class OptimizationProblem:
    n_signals: int
    observation: ChannelObservation
    eps_total: float = 1e-5
    eps_ec: float = 1e-10
    f: float = 1.2
    h_per_bit: float | None = None
    union_bound: bool = False
    p_a0: float | None = None  # fixes the parameter when set
    p_b1: float | None = None
    eps_grid_points: int = 7
    prob_grid_points: int = 19
    eps_span: float = 1e-2
    rel_tol: float = 1e-6
    max_rounds: int = 200
    min_step: float = 1e-3

    def __post_init__(self):
        if self.n_signals < 1:
            raise ConfigurationError(f"n_signals={self.n_signals!r} must be >= 1")
        if not (0.0 < self.eps_ec < self.eps_total <= 1.0):
            raise ConfigurationError(
                f"need 0 < eps_ec < eps_total <= 1, got eps_ec={self.eps_ec!r}, "
                f"eps_total={self.eps_total!r}")
        if self.f < 1.0:
            raise ConfigurationError(f"f={self.f!r} must be >= 1")
        for name in ("p_a0", "p_b1"):
            v = getattr(self, name)
            if v is not None and not (0.0 < v < 1.0):
                raise ConfigurationError(f"fixed {name}={v!r} must lie in (0, 1)")

    @property
    def eps_rem(self) -> float:
        return self.eps_total - self.eps_ec

    def leak_h(self) -> float:
        if self.h_per_bit is not None:
            return self.h_per_bit
        if self.observation.qber is None:
            raise ConfigurationError("need h_per_bit or an observed QBER for the leak")
        return binary_entropy(self.observation.qber)


@dataclass(frozen=True)
class Optimum:
    best_report: RateReport
    probes: int
    converged: bool

    @property
    def rate(self) -> float:
        return self.best_report.rate

    def params(self) -> tuple[float, float, float, float, float]:
        r = self.best_report
        b = r.budget
        return (r.p_a0, r.p_b1, b.eps_pe, b.eps_bar, b.eps_pa)


def split_budget(eps_rem: float, w_pe: float, w_bar: float,
                 w_pa: float) -> tuple[float, float, float]:
    """Map positive weights to (eps_pe, eps_bar, eps_pa) summing to eps_rem."""
    total = w_pe + w_bar + w_pa
    eps_pe = eps_rem * (w_pe / total)
    eps_bar = eps_rem * (w_bar / total)
    eps_pa = eps_rem - eps_pe - eps_bar
    return eps_pe, eps_bar, eps_pa


def _logit(p: float) -> float:
    return math.log(p) - math.log1p(-p)


def _expit(u: float) -> float:
    if u >= 0:
        return 1.0 / (1.0 + math.exp(-u))
    e = math.exp(u)
    return e / (1.0 + e)


class _Objective:
    """Counts probes and maps search coordinates to parameter points."""

    def __init__(self, problem: OptimizationProblem):
        self.problem = problem
        self.c = problem.observation.chsh
        self.h = problem.leak_h()
        self.probes = 0

    def point(self, u):
        p = self.problem
        p_a0 = p.p_a0 if p.p_a0 is not None else _expit(u[0])
        p_b1 = p.p_b1 if p.p_b1 is not None else _expit(u[1])
        eps = split_budget(p.eps_rem, math.exp(u[2]), math.exp(u[3]), math.exp(u[4]))
        return (p_a0, p_b1) + eps

    def __call__(self, u):
        p = self.problem
        params = self.point(u)
        self.probes += 1
        if min(params[2:]) <= 0.0:
            return (0.0, -math.inf), params
        key, score, _ = kernels.rate_point(
            p.n_signals, *params, self.c, p.f, self.h, p.eps_ec, p.union_bound)
        return (key, score), params


def _grid(problem: OptimizationProblem):
    """Grid axes: p_a0 values, p_b1 values, and unique (eps, weight) rows."""
    k = problem.prob_grid_points
    probs = [(i + 1) / (k + 1) for i in range(k)]
    pa = [problem.p_a0] if problem.p_a0 is not None else probs
    pb = [problem.p_b1] if problem.p_b1 is not None else probs
    ws = np.geomspace(problem.eps_span, 1.0, problem.eps_grid_points).tolist()
    seen = {}
    for w_pe in ws:
        for w_bar in ws:
            for w_pa in ws:
                eps = split_budget(problem.eps_rem, w_pe, w_bar, w_pa)
                # normalized duplicates (w scaled uniformly) collapse here
                seen.setdefault(eps, (w_pe, w_bar, w_pa))
    rows = sorted(seen.items())
    return pa, pb, rows


def _grid_phase(problem: OptimizationProblem, obj: _Objective):
    pa, pb, rows = _grid(problem)
    eps_rows = np.array([eps for eps, _ in rows], dtype=np.float64)
    keys, scores = kernels.rate_grid(problem.n_signals, pa, pb, eps_rows, obj.c,
                                     problem.f, obj.h, problem.eps_ec,
                                     problem.union_bound)
    obj.probes += keys.size
    # lexicographic max over (key, score); ties go to the lowest parameter
    # tuple, which is the first flat index because every axis is ascending
    flat_keys = keys.ravel()
    flat_scores = scores.ravel()
    top = flat_keys.max()
    cand = np.flatnonzero(flat_keys == top)
    best_score = flat_scores[cand].max()
    idx = int(cand[np.flatnonzero(flat_scores[cand] == best_score)[0]])
    i, j, k = np.unravel_index(idx, keys.shape)
    w = rows[k][1]
    u = [_logit(pa[i]), _logit(pb[j]), math.log(w[0]), math.log(w[1]), math.log(w[2])]
    return (float(top), float(best_score)), u


def _clip(u):
    return [
        min(max(u[0], -_LOGIT_BOUND), _LOGIT_BOUND),
        min(max(u[1], -_LOGIT_BOUND), _LOGIT_BOUND),
        min(max(u[2], _LOG_W_MIN), 0.0),
        min(max(u[3], _LOG_W_MIN), 0.0),
        min(max(u[4], _LOG_W_MIN), 0.0),
    ]


def _refine(problem: OptimizationProblem, obj: _Objective, best, u):
    """Coordinate search with per-axis step doubling on success, halving on failure."""
    active = [problem.p_a0 is None, problem.p_b1 is None, True, True, True]
    steps = [0.5] * 5
    converged = False
    for _ in range(problem.max_rounds):
        before = best
        for d in range(5):
            if not active[d]:
                continue
            moved = False
            for sign in (1.0, -1.0):
                cand = list(u)
                cand[d] += sign * steps[d]
                cand = _clip(cand)
                if cand == u:
                    continue
                val, _ = obj(cand)
                if val > best:
                    best, u, moved = val, cand, True
                    break
            steps[d] = min(steps[d] * 2.0, 8.0) if moved else steps[d] * 0.5
        # progress is measured on the rate once it is positive, else on the score
        if best[0] > 0.0:
            gain, scale = best[0] - before[0], best[0]
        else:
            gain, scale = best[1] - before[1], max(abs(best[1]), 1e-300)
        if gain <= problem.rel_tol * scale and \
                max(s for s, a in zip(steps, active) if a) < problem.min_step:
            converged = True
            break
    return best, u, converged


def optimize_rate(problem: OptimizationProblem, start=None) -> Optimum:
    """Best rate found by grid search plus coordinate refinement.

    ``start`` optionally supplies an extra (p_a0, p_b1, eps_pe, eps_bar,
    eps_pa) candidate, e.g. the optimum at a neighbouring N.
    """
    obj = _Objective(problem)
    best, u = _grid_phase(problem, obj)
    if start is not None:
        p_a0, p_b1, e_pe, e_bar, e_pa = start
        u_start = _clip([_logit(p_a0), _logit(p_b1), math.log(e_pe / problem.eps_rem),
                         math.log(e_bar / problem.eps_rem), math.log(e_pa / problem.eps_rem)])
        val, _ = obj(u_start)
        if val > best:
            best, u = val, u_start
    if best[1] == -math.inf:
        raise EstimationError(
            f"N={problem.n_signals} is too small to sample every CHSH correlator")
    best, u, converged = _refine(problem, obj, best, u)
    p_a0, p_b1, eps_pe, eps_bar, eps_pa = obj.point(u)
    budget = EpsilonBudget(problem.eps_total, eps_pe, eps_bar, problem.eps_ec, eps_pa)
    config = DiProtocolConfig(problem.n_signals, p_a0, p_b1, problem.f,
                              problem.h_per_bit, union_bound=problem.union_bound)
    report = di_rate(config, problem.observation, budget)
    if report.key_bits != int(best[0]):
        raise RuntimeError(
            f"kernel ({best[0]}) and reference ({report.key_bits}) key lengths disagree")
    return Optimum(report, obj.probes, converged)


def sweep(template: OptimizationProblem, n_grid) -> list[Optimum]:
    """Optimize along an ascending grid of N, warm-starting each point."""
    n_grid = [int(n) for n in n_grid]
    if not n_grid:
        raise ConfigurationError("empty N grid")
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ConfigurationError("N grid must be strictly ascending")
    out = []
    start = None
    for n in n_grid:
        opt = optimize_rate(dataclasses.replace(template, n_signals=n), start)
        out.append(opt)
        if opt.best_report.key_bits > 0:
            start = opt.params()
    return out


def evaluate(problem: OptimizationProblem, params) -> RateReport:
    """Reference report at an explicit (p_a0, p_b1, eps_pe, eps_bar, eps_pa)."""
    p_a0, p_b1, eps_pe, eps_bar, eps_pa = params
    budget = EpsilonBudget(problem.eps_total, eps_pe, eps_bar, problem.eps_ec, eps_pa)
    config = DiProtocolConfig(problem.n_signals, p_a0, p_b1, problem.f,
                              problem.h_per_bit, union_bound=problem.union_bound)
    return di_rate(config, problem.observation, budget)


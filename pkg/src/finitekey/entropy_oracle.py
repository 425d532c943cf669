"""Brute-force entropy checks on small classical joint distributions.

Variables are named axes of a probability table. Min-entropies are the
classical guessing-probability forms with zero smoothing:

    H_min(A|B) = -log2 sum_b max_a p(a, b)
    H_0(A)     = log2 |supp p(a)|

The lemma checks decide each inequality in exact rational arithmetic
(float probabilities are dyadic rationals) and derive the reported slack,
left minus right in bits, from the exact ratio, so equality gives 0.0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .core import DomainError

__all__ = [
    "JointDistribution",
    "LemmaVerdict",
    "h0",
    "min_entropy_cond",
    "guessing_probability",
    "leakage_of",
    "check_lemma_leakage",
    "check_lemma_symmetrization",
    "random_leakage_instance",
    "random_symmetrization_instance",
    "run_lemma_suite",
]

MAX_ALPHABET = 16


@dataclass(frozen=True)
class JointDistribution:
    variables: tuple[str, ...]
    pmf: np.ndarray

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=np.float64)
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "variables", tuple(self.variables))
        if pmf.ndim != len(self.variables):
            raise DomainError(f"pmf has {pmf.ndim} axes for {len(self.variables)} variables")
        if len(set(self.variables)) != len(self.variables):
            raise DomainError("duplicate variable names")
        if any(s > MAX_ALPHABET for s in pmf.shape):
            raise DomainError(f"alphabet sizes {pmf.shape} exceed {MAX_ALPHABET}")
        if (pmf < 0).any():
            raise DomainError("negative probability")
        if abs(pmf.sum() - 1.0) > 1e-12:
            raise DomainError(f"probabilities sum to {pmf.sum()!r}")

    def size(self, var: str) -> int:
        return self.pmf.shape[self._axis(var)]

    def _axis(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise DomainError(f"variable {var!r} not in {self.variables}") from None

    def exact_pmf(self) -> np.ndarray:
        """The pmf as an object array of Fractions, renormalized exactly."""
        table = np.vectorize(Fraction, otypes=[object])(self.pmf)
        return table / table.sum()

    def marginal(self, keep: Sequence[str], exact: bool = False) -> np.ndarray:
        """Table over ``keep`` with axes in the given order."""
        axes = [self._axis(v) for v in keep]
        drop = tuple(i for i in range(len(self.variables)) if i not in axes)
        pmf = self.exact_pmf() if exact else self.pmf
        table = pmf.sum(axis=drop) if drop else pmf
        remaining = [i for i in range(len(self.variables)) if i in axes]
        return np.transpose(table, [remaining.index(a) for a in axes])


@dataclass(frozen=True)
class LemmaVerdict:
    passed: bool
    slack: float
    lhs: float
    rhs: float


def _names(v) -> tuple[str, ...]:
    return (v,) if isinstance(v, str) else tuple(v)


def h0(dist: JointDistribution, target) -> float:
    """log2 of the support size of the target's marginal."""
    return math.log2(_support(dist, target))


def _support(dist: JointDistribution, target) -> int:
    support = int(np.count_nonzero(dist.marginal(_names(target)) > 0.0))
    if support == 0:
        raise DomainError("empty support")
    return support


def guessing_probability(dist: JointDistribution, target, given=(), exact=False):
    """sum over the conditioning values of the largest joint probability."""
    target, given = _names(target), _names(given)
    if set(target) & set(given):
        raise DomainError("target and conditioning sets overlap")
    table = dist.marginal(given + target, exact=exact)
    g = int(np.prod(table.shape[:len(given)])) if given else 1
    flat = table.reshape(g, -1)
    return flat.max(axis=1).sum()


def min_entropy_cond(dist: JointDistribution, target, given=()) -> float:
    p_guess = float(guessing_probability(dist, target, given))
    return max(0.0, -math.log2(p_guess))


def _log2_ratio(num: Fraction, den: Fraction) -> float:
    ratio = num / den
    return 0.0 if ratio == 1 else math.log2(ratio)


def leakage_of(dist: JointDistribution) -> float:
    """H_0(C) - H_min(C|X Y)."""
    for v in ("C", "X", "Y"):
        dist._axis(v)
    return h0(dist, "C") - min_entropy_cond(dist, "C", ("X", "Y"))


def _is_function_of(dist: JointDistribution, out: str, inputs: Sequence[str]) -> bool:
    table = dist.marginal(tuple(inputs) + (out,))
    rows = table.reshape(-1, table.shape[-1])
    return bool((np.count_nonzero(rows > 0.0, axis=1) <= 1).all())


def check_lemma_leakage(dist: JointDistribution) -> LemmaVerdict:
    """H_min(X|E C) >= H_min(X|E) - leak, for C a function of (X, Y)."""
    for v in ("X", "Y", "E", "C"):
        dist._axis(v)
    if not _is_function_of(dist, "C", ("X", "Y")):
        raise DomainError("C is not a deterministic function of (X, Y)")
    lhs = min_entropy_cond(dist, "X", ("E", "C"))
    rhs = min_entropy_cond(dist, "X", ("E",)) - leakage_of(dist)
    # slack = log2[ P(X|E) |supp C| P(C|XY) / P(X|EC) ] with P = guessing prob.
    num = (guessing_probability(dist, "X", ("E",), exact=True)
           * _support(dist, "C")
           * guessing_probability(dist, "C", ("X", "Y"), exact=True))
    den = guessing_probability(dist, "X", ("E", "C"), exact=True)
    return LemmaVerdict(num >= den, _log2_ratio(num, den), lhs, rhs)


def _tabulate(family, n_x: int) -> list[list[int]]:
    if not family:
        raise DomainError("function family is empty")
    tables = []
    for f in family:
        row = [int(f(x)) for x in range(n_x)] if callable(f) else [int(v) for v in f]
        if len(row) != n_x or min(row) < 0:
            raise DomainError("family member is not a total function on X's alphabet")
        tables.append(row)
    return tables


def check_lemma_symmetrization(
        dist: JointDistribution,
        family: Sequence[Callable[[int], int] | Sequence[int]]) -> LemmaVerdict:
    """H_min(X|E) >= H_min(f_R(X)|E R) with R uniform over ``family``.

    Family members are callables on range(|X|) or lookup tables.
    """
    pxe = dist.marginal(("X", "E"))
    n_x, n_e = pxe.shape
    tables = _tabulate(family, n_x)
    n_z = max(max(t) for t in tables) + 1
    if n_z > MAX_ALPHABET:
        raise DomainError(f"family output alphabet {n_z} exceeds {MAX_ALPHABET}")
    n_r = len(tables)
    exact = dist.marginal(("X", "E"), exact=True)
    joint = np.zeros((n_x, n_e, n_r, n_z))
    joint_q = np.full((n_x, n_e, n_r, n_z), Fraction(0), dtype=object)
    for r, t in enumerate(tables):
        for x in range(n_x):
            joint[x, :, r, t[x]] += pxe[x, :] / n_r
            joint_q[x, :, r, t[x]] += exact[x, :] / n_r
    full = JointDistribution(("X", "E", "R", "Z"), joint / joint.sum())
    lhs = min_entropy_cond(full, "X", ("E",))
    rhs = min_entropy_cond(full, "Z", ("E", "R"))
    # slack = log2[ P(Z|E R) / P(X|E) ]
    den = exact.max(axis=0).sum()
    num = joint_q.transpose(1, 2, 3, 0).sum(axis=3).reshape(n_e * n_r, n_z).max(axis=1).sum()
    return LemmaVerdict(num >= den, _log2_ratio(num, den), lhs, rhs)


def _random_pmf(rng: np.random.Generator, shape) -> np.ndarray:
    p = rng.random(shape)
    p[rng.random(shape) < 0.3] = 0.0
    if p.sum() == 0.0:
        p.flat[0] = 1.0
    return p / p.sum()


def random_leakage_instance(rng: np.random.Generator, max_size: int = 4) -> JointDistribution:
    """Random p(x, y, e) with C = g(X, Y) for a random table g."""
    nx, ny, ne, nc = (int(v) for v in rng.integers(1, max_size + 1, size=4))
    pxye = _random_pmf(rng, (nx, ny, ne))
    g = rng.integers(0, nc, size=(nx, ny))
    joint = np.zeros((nx, ny, ne, nc))
    for x in range(nx):
        for y in range(ny):
            joint[x, y, :, g[x, y]] = pxye[x, y, :]
    return JointDistribution(("X", "Y", "E", "C"), joint)


def random_symmetrization_instance(rng: np.random.Generator, max_size: int = 4):
    nx, ne, nz = (int(v) for v in rng.integers(1, max_size + 1, size=3))
    n_f = int(rng.integers(1, max_size + 1))
    dist = JointDistribution(("X", "E"), _random_pmf(rng, (nx, ne)))
    family = [rng.integers(0, nz, size=nx).tolist() for _ in range(n_f)]
    return dist, family


@dataclass(frozen=True)
class SuiteResult:
    count: int
    leakage_failures: int
    symmetrization_failures: int
    min_leakage_slack: float
    min_symmetrization_slack: float

    @property
    def passed(self) -> bool:
        return self.leakage_failures == 0 and self.symmetrization_failures == 0


def run_lemma_suite(count: int, seed: int) -> SuiteResult:
    """Check both lemmas on ``count`` seeded random instances each."""
    if count < 1:
        raise DomainError(f"count={count} must be >= 1")
    rng = np.random.default_rng(seed)
    leak_fail = sym_fail = 0
    leak_min = sym_min = math.inf
    for _ in range(count):
        v = check_lemma_leakage(random_leakage_instance(rng))
        leak_fail += not v.passed
        leak_min = min(leak_min, v.slack)
        dist, family = random_symmetrization_instance(rng)
        v = check_lemma_symmetrization(dist, family)
        sym_fail += not v.passed
        sym_min = min(sym_min, v.slack)
    return SuiteResult(count, leak_fail, sym_fail, leak_min, sym_min)

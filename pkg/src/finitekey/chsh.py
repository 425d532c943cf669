"""Device-independent QKD certified by a CHSH violation, collective attacks.

Alice measures A0 (key), A1, A2; Bob measures B1, B2. Key bits come from
(A0, B1) events, the four (Ai, Bj) combinations with i, j in {1, 2} feed
the CHSH estimate, and (A0, B2) events are discarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import (
    DomainError,
    EpsilonBudget,
    KeyLengthInputs,
    LeakModel,
    binary_entropy,
    delta_smoothing,
    ec_leakage,
    key_length,
    key_length_value,
    xi_deviation,
)
from ._pykernels import floor_count

__all__ = [
    "EstimationError",
    "ChannelObservation",
    "DiProtocolConfig",
    "SamplingCounts",
    "RateReport",
    "chsh_from_correlators",
    "chsh_from_qber",
    "sampling_counts",
    "total_xi",
    "di_entropy_bound",
    "di_rate",
    "asymptotic_rate",
]

TSIRELSON = 2.0 * math.sqrt(2.0)
_LN2 = math.log(2.0)


class EstimationError(ValueError):
    """Some correlator has no samples, so the CHSH value cannot be bounded."""


@dataclass(frozen=True)
class ChannelObservation:
    """Observed QBER and/or the four correlators (E11, E12, E21, E22)."""

    qber: float | None = None
    correlators: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        if self.qber is None and self.correlators is None:
            raise DomainError("need a QBER or the four CHSH correlators")
        if self.qber is not None and not (0.0 <= self.qber <= 0.5):
            raise DomainError(f"qber={self.qber!r} must lie in [0, 1/2]")
        if self.correlators is not None:
            if len(self.correlators) != 4:
                raise DomainError("expected four correlators E11, E12, E21, E22")
            object.__setattr__(self, "correlators",
                               tuple(float(e) for e in self.correlators))
            for e in self.correlators:
                if not (-1.0 <= e <= 1.0):
                    raise DomainError(f"correlator {e!r} outside [-1, 1]")

    @property
    def chsh(self) -> float:
        if self.correlators is not None:
            return chsh_from_correlators(self)
        return chsh_from_qber(self.qber)


@dataclass(frozen=True)
class DiProtocolConfig:
    """Fixed protocol parameters for one rate evaluation.

    ``h_per_bit`` defaults to h(Q) of the observation (symmetric errors).
    ``union_bound`` splits eps_pe evenly over the four correlator estimates
    instead of reusing it for each.
    """

    n_signals: int
    p_a0: float
    p_b1: float
    f: float = 1.2
    h_per_bit: float | None = None
    b: int = 1
    union_bound: bool = False

    def __post_init__(self):
        if self.n_signals < 1:
            raise DomainError(f"n_signals={self.n_signals!r} must be >= 1")
        if not (0.0 < self.p_a0 <= 1.0):
            raise DomainError(f"p_a0={self.p_a0!r} must lie in (0, 1]")
        if not (0.0 < self.p_b1 <= 1.0):
            raise DomainError(f"p_b1={self.p_b1!r} must lie in (0, 1]")
        if self.b != 1:
            raise DomainError("only b = 1 (no advantage distillation) is supported")

    def leak_model(self, obs: ChannelObservation) -> LeakModel:
        if self.h_per_bit is not None:
            return LeakModel(self.f, self.h_per_bit)
        if obs.qber is None:
            raise DomainError("leak model needs h_per_bit or an observed QBER")
        return LeakModel(self.f, binary_entropy(obs.qber))


@dataclass(frozen=True)
class SamplingCounts:
    n_key: int
    m11: int
    m12: int
    m21: int
    m22: int
    discarded: int

    @property
    def total(self) -> int:
        return self.n_key + self.m11 + self.m12 + self.m21 + self.m22 + self.discarded

    @property
    def estimation(self) -> tuple[int, int, int, int]:
        return (self.m11, self.m12, self.m21, self.m22)


@dataclass(frozen=True)
class RateReport:
    n_signals: int
    p_a0: float
    p_b1: float
    chsh: float
    counts: SamplingCounts
    xi_total: float
    s_xi: float
    delta: float
    leak_bits: float
    raw_bits: float
    key_bits: int
    rate: float
    budget: EpsilonBudget
    reason: str = field(default="")

    def as_dict(self) -> dict:
        c = self.counts
        return {
            "N": self.n_signals,
            "p_a0": self.p_a0,
            "p_b1": self.p_b1,
            "C": self.chsh,
            "n": c.n_key,
            "m11": c.m11,
            "m12": c.m12,
            "m21": c.m21,
            "m22": c.m22,
            "discarded": c.discarded,
            "xi": self.xi_total,
            "s_xi": self.s_xi,
            "delta": self.delta,
            "leak": self.leak_bits,
            "ell": self.key_bits,
            "r": self.rate,
            **self.budget.as_dict(),
            "reason": self.reason,
        }


def chsh_from_correlators(obs: ChannelObservation) -> float:
    if obs.correlators is None:
        raise DomainError("observation carries no correlators")
    e11, e12, e21, e22 = obs.correlators
    return e11 + e12 + e21 - e22


def chsh_from_qber(q: float) -> float:
    """CHSH value of a depolarized maximally entangled pair with error rate q."""
    if not (0.0 <= q <= 0.5):
        raise DomainError(f"q={q!r} must lie in [0, 1/2]")
    return TSIRELSON * (1.0 - 2.0 * q)


def sampling_counts(config: DiProtocolConfig) -> SamplingCounts:
    """Split N signals into key, estimation and discarded events.

    Counts are floored; the remainder is discarded, so the six counts always
    sum to N.
    """
    N = config.n_signals
    p_a0, p_b1 = config.p_a0, config.p_b1
    n_key = int(floor_count(p_a0 * p_b1 * float(N)))
    m1 = int(floor_count(0.5 * (1.0 - p_a0) * p_b1 * float(N)))
    m2 = int(floor_count(0.5 * (1.0 - p_a0) * (1.0 - p_b1) * float(N)))
    n_key = min(n_key, N - 2 * m1 - 2 * m2)
    discarded = N - n_key - 2 * m1 - 2 * m2
    return SamplingCounts(n_key, m1, m2, m1, m2, discarded)


def total_xi(counts: SamplingCounts, eps_pe: float, union_bound: bool = False) -> float:
    """Sum of the d=2 deviations of the four correlator estimates."""
    if min(counts.estimation) < 1:
        raise EstimationError(f"correlator sample sizes {counts.estimation} include 0")
    e = eps_pe / 4.0 if union_bound else eps_pe
    xi = 0.0
    for m in counts.estimation:
        xi += xi_deviation(m, 2, e)
    return xi


def _one_minus_h_sym(s: float) -> float:
    """1 - h((1+s)/2) for 0 <= s < 1, without cancellation near s = 0.

    Equals ((1+s) ln(1+s) + (1-s) ln(1-s)) / (2 ln 2); below s = 1/4 the
    even series sum_k s^(2k) / (k (2k-1)) is used instead.
    """
    if s < 0.25:
        s2 = s * s
        power = s2
        total = 0.0
        k = 1
        while True:
            term = power / (k * (2 * k - 1))
            total += term
            if term <= 1e-17 * total:
                break
            power *= s2
            k += 1
        return total / (2.0 * _LN2)
    return ((1.0 + s) * math.log1p(s) + (1.0 - s) * math.log1p(-s)) / (2.0 * _LN2)


def di_entropy_bound(c: float, xi: float) -> float:
    """Conditional entropy bound S_xi(X|E) for CHSH value c lowered by xi.

    Evaluates 1 - h((1 + sqrt(((c - xi)/2)^2 - 1)) / 2) with the excess
    over the classical bound, d = (c - 2) - xi, carried explicitly so the
    result keeps full relative precision as c - xi approaches 2. No
    violation certifies nothing: returns 0 when ``c - xi <= 2``.
    """
    d = (c - 2.0) - xi
    if not d > 0.0:
        return 0.0
    s = math.sqrt(d * (d + 4.0)) / 2.0
    if s >= 1.0:
        return 1.0
    return _one_minus_h_sym(s)


def asymptotic_rate(c: float, qber: float, f: float = 1.2) -> float:
    """N -> infinity limit: S_0(X|E) - f h(Q)."""
    return di_entropy_bound(c, 0.0) - f * binary_entropy(qber)


def di_rate(config: DiProtocolConfig, obs: ChannelObservation,
            budget: EpsilonBudget) -> RateReport:
    counts = sampling_counts(config)
    c = obs.chsh
    xi = total_xi(counts, budget.eps_pe, config.union_bound)
    s = di_entropy_bound(c, xi)
    model = config.leak_model(obs)
    n = counts.n_key
    if n < 1:
        return RateReport(config.n_signals, config.p_a0, config.p_b1, c, counts,
                          xi, s, math.inf, 0.0, -math.inf, 0, 0.0, budget,
                          "no key events")
    delta = delta_smoothing(budget.eps_bar, n)
    leak = ec_leakage(n, model, budget.eps_ec)
    inputs = KeyLengthInputs(n, s, delta, leak, budget.eps_pa)
    raw = key_length_value(inputs)
    ell = key_length(inputs)
    reason = "" if ell > 0 else "key length clamped"
    return RateReport(config.n_signals, config.p_a0, config.p_b1, c, counts,
                      xi, s, delta, leak, raw, ell, ell / config.n_signals,
                      budget, reason)

"""Protocol-independent finite-key accounting.

Everything here is a pure function of its arguments. Per-bit quantities
(``s_xi``, ``delta``, ``h_per_bit``) are kept separate from totals in bits
(``leak_bits``, the privacy-amplification penalty) so that the large-N
regime never subtracts two numbers of order N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DomainError",
    "EpsilonBudget",
    "LeakModel",
    "KeyLengthInputs",
    "binary_entropy",
    "delta_smoothing",
    "xi_deviation",
    "ec_leakage",
    "pa_penalty",
    "key_length",
    "key_length_value",
]

_SUM_RTOL = 1e-12
_LN2 = math.log(2.0)


class DomainError(ValueError):
    """An argument lies outside the domain where a bound is meaningful."""


@dataclass(frozen=True)
class EpsilonBudget:
    """Split of the total security parameter over the four protocol steps.

    ``eps_pe`` covers parameter estimation, ``eps_bar`` the smoothing of the
    min-entropy, ``eps_ec`` error correction and ``eps_pa`` privacy
    amplification. The final key is ``eps_total``-secure.
    """

    eps_total: float
    eps_pe: float
    eps_bar: float
    eps_ec: float
    eps_pa: float

    def __post_init__(self):
        for name in ("eps_total", "eps_pe", "eps_bar", "eps_ec", "eps_pa"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise DomainError(f"{name}={v!r} must lie in (0, 1]")
        used = self.eps_pe + self.eps_bar + self.eps_ec + self.eps_pa
        if used > self.eps_total * (1.0 + _SUM_RTOL):
            raise DomainError(
                f"epsilon split sums to {used!r} > eps_total={self.eps_total!r}"
            )

    @classmethod
    def from_split(cls, eps_total: float, eps_ec: float, eps_pe: float,
                   eps_bar: float) -> "EpsilonBudget":
        """Build a budget where ``eps_pa`` takes whatever ``eps_total`` leaves."""
        eps_pa = eps_total - eps_ec - eps_pe - eps_bar
        return cls(eps_total, eps_pe, eps_bar, eps_ec, eps_pa)

    def as_dict(self) -> dict:
        return {
            "eps_total": self.eps_total,
            "eps_pe": self.eps_pe,
            "eps_bar": self.eps_bar,
            "eps_ec": self.eps_ec,
            "eps_pa": self.eps_pa,
        }


@dataclass(frozen=True)
class LeakModel:
    """Error-correction leakage ``f * H0(X|Y) + log2(2/eps_ec)``.

    ``h_per_bit`` stands in for ``H0(X|Y)/n``; for symmetric bit errors at
    rate Q it is ``h(Q)``.
    """

    f: float = 1.2
    h_per_bit: float = 0.0

    def __post_init__(self):
        if not self.f >= 1.0:
            raise DomainError(f"EC efficiency f={self.f!r} must be >= 1")
        if not (0.0 <= self.h_per_bit <= 1.0):
            raise DomainError(f"h_per_bit={self.h_per_bit!r} must lie in [0, 1]")


@dataclass(frozen=True)
class KeyLengthInputs:
    n: int
    s_xi: float
    delta: float
    leak_bits: float
    eps_pa: float

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"n={self.n!r} must be >= 0")
        if not (0.0 <= self.s_xi <= 1.0):
            raise DomainError(f"s_xi={self.s_xi!r} must lie in [0, 1]")
        if not self.delta >= 0.0:
            raise DomainError(f"delta={self.delta!r} must be >= 0")
        if not self.leak_bits >= 0.0:
            raise DomainError(f"leak_bits={self.leak_bits!r} must be >= 0")
        if not (0.0 < self.eps_pa <= 1.0):
            raise DomainError(f"eps_pa={self.eps_pa!r} must lie in (0, 1]")


def binary_entropy(p: float) -> float:
    """Shannon entropy of a Bernoulli(p) variable in bits (0 log 0 = 0)."""
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"p={p!r} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    # log1p keeps the (1-p) term accurate for tiny p
    return (-p * math.log(p) - (1.0 - p) * math.log1p(-p)) / _LN2


def delta_smoothing(eps_bar: float, n: int) -> float:
    """Per-bit min-entropy loss ``7 sqrt(log2(2/eps_bar) / n)``."""
    if n < 1:
        raise DomainError(f"n={n!r} must be >= 1")
    if not (0.0 < eps_bar < 2.0):
        raise DomainError(f"eps_bar={eps_bar!r} must lie in (0, 2)")
    return 7.0 * math.sqrt(math.log2(2.0 / eps_bar) / n)


def xi_deviation(m: int, d: int, eps_pe: float) -> float:
    """Statistical deviation of a d-outcome estimate from m samples.

    Natural logarithms: ``sqrt((2 ln(1/eps_pe) + d ln(m+1)) / m)``.
    """
    if m < 1:
        raise DomainError(f"m={m!r} must be >= 1")
    if d < 2:
        raise DomainError(f"d={d!r} must be >= 2")
    if not (0.0 < eps_pe <= 1.0):
        raise DomainError(f"eps_pe={eps_pe!r} must lie in (0, 1]")
    return math.sqrt((2.0 * math.log(1.0 / eps_pe) + d * math.log(m + 1.0)) / m)


def ec_leakage(n: int, model: LeakModel, eps_ec: float) -> float:
    """Total bits leaked by error correction on an n-bit raw key.

    ``eps_ec`` above 1 is clamped to 1; a failure probability cannot exceed it.
    """
    if n < 0:
        raise DomainError(f"n={n!r} must be >= 0")
    if not eps_ec > 0.0:
        raise DomainError(f"eps_ec={eps_ec!r} must be > 0")
    eps_ec = min(eps_ec, 1.0)
    return model.f * n * model.h_per_bit + math.log2(2.0 / eps_ec)


def pa_penalty(eps_pa: float) -> float:
    """Bits sacrificed by two-universal hashing, ``2 log2(1/eps_pa)``."""
    if not (0.0 < eps_pa <= 1.0):
        raise DomainError(f"eps_pa={eps_pa!r} must lie in (0, 1]")
    return 2.0 * math.log2(1.0 / eps_pa)


def key_length_value(inputs: KeyLengthInputs) -> float:
    """Unclamped right-hand side of the key-length criterion, in bits.

    Negative values mean the protocol must abort.
    """
    return (inputs.n * (inputs.s_xi - inputs.delta)
            - inputs.leak_bits - pa_penalty(inputs.eps_pa))


def key_length(inputs: KeyLengthInputs) -> int:
    """Largest integer key length ell certified epsilon-secure (0 = abort)."""
    value = key_length_value(inputs)
    if not value > 0.0:
        return 0
    return min(int(math.floor(value)), inputs.n)

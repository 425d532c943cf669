import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finitekey.core import (
    DomainError,
    EpsilonBudget,
    KeyLengthInputs,
    LeakModel,
    binary_entropy,
    delta_smoothing,
    ec_leakage,
    key_length,
    xi_deviation,
)

mpmath.mp.dps = 40


def mp_h(p):
    p = mpmath.mpf(p)
    if p in (0, 1):
        return mpmath.mpf(0)
    return -p * mpmath.log(p, 2) - (1 - p) * mpmath.log(1 - p, 2)


class TestBinaryEntropy:
    def test_examples(self):
        assert binary_entropy(0.5) == 1.0
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        assert binary_entropy(0.05) == pytest.approx(0.28640, abs=1e-5)
        assert binary_entropy(0.05) == pytest.approx(float(mp_h(0.05)), rel=1e-14)

    @pytest.mark.parametrize("p", [-1e-9, 1.0000001, math.nan])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            binary_entropy(p)

    @given(st.floats(0.0, 1.0))
    def test_symmetry_and_range(self, p):
        h = binary_entropy(p)
        assert 0.0 <= h <= 1.0
        assert abs(h - binary_entropy(1.0 - p)) <= 1e-14

    def test_small_p_precision(self):
        for p in (1e-12, 1e-8, 3e-5):
            assert binary_entropy(p) == pytest.approx(float(mp_h(p)), rel=1e-13)


class TestDelta:
    def test_examples(self):
        assert delta_smoothing(2.0 ** -63, 3136) == 1.0
        assert delta_smoothing(1e-10, 10 ** 5) == pytest.approx(0.12953, abs=1e-4)
        assert delta_smoothing(1e-10, 10 ** 5) == pytest.approx(0.12948917972150444, rel=1e-13)

    def test_vanishes(self):
        d = delta_smoothing(1e-5, 10 ** 12)
        assert d == pytest.approx(7 * math.sqrt(math.log2(2e5) / 1e12), rel=1e-15)
        assert d < 1e-4

    def test_monotone(self):
        ns = [1, 10, 100, 10 ** 4, 10 ** 8]
        ds = [delta_smoothing(1e-6, n) for n in ns]
        assert all(a > b for a, b in zip(ds, ds[1:]))
        es = [1e-2, 1e-5, 1e-10, 1e-20]
        ds = [delta_smoothing(e, 1000) for e in es]
        assert all(a < b for a, b in zip(ds, ds[1:]))

    @pytest.mark.parametrize("eps, n", [(1e-5, 0), (2.0, 10), (0.0, 10), (3.0, 10)])
    def test_domain(self, eps, n):
        with pytest.raises(DomainError):
            delta_smoothing(eps, n)


class TestXi:
    def test_examples(self):
        assert xi_deviation(10 ** 4, 2, 1e-5) == pytest.approx(0.06438, abs=1e-4)
        assert xi_deviation(10 ** 4, 2, 1e-5) == pytest.approx(0.06437913611092765, rel=1e-13)
        for m in (1, 7, 1000):
            assert xi_deviation(m, 2, 1.0) == pytest.approx(math.sqrt(2 * math.log(m + 1) / m),
                                                             rel=1e-15)
        assert xi_deviation(10 ** 12, 2, 1e-5) < 1e-5

    def test_monotone_in_m(self):
        vals = [xi_deviation(m, 2, 1e-5) for m in range(8, 2000)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            xi_deviation(0, 2, 1e-5)
        with pytest.raises(DomainError):
            xi_deviation(10, 1, 1e-5)


class TestLeak:
    def test_examples(self):
        assert ec_leakage(123, LeakModel(1.0, 0.0), 2.0) == 1.0
        assert ec_leakage(123, LeakModel(1.0, 0.0), 1.0) == 1.0
        model = LeakModel(1.2, binary_entropy(0.05))
        assert ec_leakage(10 ** 5, model, 1e-10) == pytest.approx(34402.2, abs=0.5)
        assert ec_leakage(10 ** 5, model, 1e-10) == pytest.approx(34401.854134863609, rel=1e-13)
        assert ec_leakage(0, LeakModel(1.2, 0.5), 1e-10) == pytest.approx(34.22, abs=0.01)

    def test_domain(self):
        with pytest.raises(DomainError):
            ec_leakage(10, LeakModel(), 0.0)
        with pytest.raises(DomainError):
            LeakModel(0.9, 0.1)
        with pytest.raises(DomainError):
            LeakModel(1.1, 1.5)


class TestKeyLength:
    def test_examples(self):
        assert key_length(KeyLengthInputs(1000, 1.0, 0.0, 0.0, 1.0)) == 1000
        assert key_length(KeyLengthInputs(1000, 1.0, 0.0, 0.0, 2.0 ** -20)) == 960
        assert key_length(KeyLengthInputs(1000, 0.1, 0.2, 0.0, 0.5)) == 0

    def test_invalid_inputs(self):
        with pytest.raises(DomainError):
            KeyLengthInputs(-1, 0.5, 0.0, 0.0, 0.5)
        with pytest.raises(DomainError):
            KeyLengthInputs(10, 1.5, 0.0, 0.0, 0.5)

    inputs = st.builds(
        KeyLengthInputs,
        n=st.integers(0, 10 ** 9),
        s_xi=st.floats(0.0, 1.0),
        delta=st.floats(0.0, 2.0),
        leak_bits=st.floats(0.0, 1e9),
        eps_pa=st.floats(1e-30, 1.0),
    )

    @settings(max_examples=10_000, deadline=None)
    @given(inputs, st.floats(0.0, 1.0), st.integers(0, 10 ** 6))
    def test_monotone_and_bounded(self, x, frac, dn):
        ell = key_length(x)
        assert 0 <= ell <= x.n

        def with_(**kw):
            return key_length(KeyLengthInputs(**{**x.__dict__, **kw}))

        assert with_(n=x.n + dn) >= ell
        assert with_(s_xi=x.s_xi + (1.0 - x.s_xi) * frac) >= ell
        assert with_(eps_pa=x.eps_pa + (1.0 - x.eps_pa) * frac) >= ell
        assert with_(delta=x.delta * (1.0 + frac)) <= ell
        assert with_(leak_bits=x.leak_bits + frac * 1e6) <= ell


class TestBudget:
    def test_valid(self):
        b = EpsilonBudget(1e-5, 4e-6, 3e-6, 1e-10, 3e-6 - 1e-10)
        assert b.eps_total == 1e-5

    def test_from_split_sums(self):
        b = EpsilonBudget.from_split(1e-5, 1e-10, 2e-6, 3e-6)
        assert b.eps_pe + b.eps_bar + b.eps_ec + b.eps_pa == pytest.approx(1e-5, rel=1e-12)

    def test_overspent(self):
        with pytest.raises(DomainError):
            EpsilonBudget(1e-5, 5e-6, 5e-6, 1e-10, 1e-6)

    @pytest.mark.parametrize("bad", [0.0, -1e-3, 1.5])
    def test_field_range(self, bad):
        with pytest.raises(DomainError):
            EpsilonBudget(1.0, bad, 0.1, 0.1, 0.1)

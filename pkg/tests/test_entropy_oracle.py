import itertools
import math

import numpy as np
import pytest

from finitekey.core import DomainError
from finitekey.entropy_oracle import (
    JointDistribution,
    check_lemma_leakage,
    check_lemma_symmetrization,
    guessing_probability,
    h0,
    leakage_of,
    min_entropy_cond,
    random_leakage_instance,
    random_symmetrization_instance,
    run_lemma_suite,
)


def joint(names, table):
    return JointDistribution(names, np.asarray(table, dtype=float))


def xyec(pxy_e, g, nc):
    """Joint over (X, Y, E, C) with C = g[x][y]."""
    pxy_e = np.asarray(pxy_e, dtype=float)
    nx, ny, ne = pxy_e.shape
    t = np.zeros((nx, ny, ne, nc))
    for x, y in itertools.product(range(nx), range(ny)):
        t[x, y, :, g[x][y]] = pxy_e[x, y, :]
    return JointDistribution(("X", "Y", "E", "C"), t)


class TestDistribution:
    def test_validation(self):
        with pytest.raises(DomainError):
            joint(("X",), [0.5, 0.6])
        with pytest.raises(DomainError):
            joint(("X",), [1.5, -0.5])
        with pytest.raises(DomainError):
            joint(("X", "X"), [[1.0]])
        with pytest.raises(DomainError):
            joint(("X",), np.full(17, 1 / 17))

    def test_marginal_order(self):
        d = joint(("A", "B"), [[0.1, 0.2], [0.3, 0.4]])
        np.testing.assert_allclose(d.marginal(("B", "A")), [[0.1, 0.3], [0.2, 0.4]])
        np.testing.assert_allclose(d.marginal(("A",)), [0.3, 0.7])


class TestH0:
    def test_examples(self):
        assert h0(joint(("X",), [1.0, 0.0]), "X") == 0.0
        assert h0(joint(("X",), np.full(8, 0.125)), "X") == 3.0
        assert h0(joint(("X",), [0.9, 0.1, 0.0]), "X") == 1.0


class TestMinEntropy:
    def test_examples(self):
        assert min_entropy_cond(joint(("X", "E"), np.full((2, 2), 0.25)), "X", "E") == 1.0
        assert min_entropy_cond(joint(("X", "E"), [[0.5, 0], [0, 0.5]]), "X", "E") == 0.0
        d = joint(("X", "E"), [[0.5, 0.0], [0.25, 0.25]])
        assert min_entropy_cond(d, "X", "E") == pytest.approx(-math.log2(0.75), rel=1e-15)
        assert min_entropy_cond(d, "X", "E") == pytest.approx(0.41503749927884382, rel=1e-15)

    def test_conditioning_reduces(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            p = rng.random((3, 4, 2))
            d = JointDistribution(("X", "E", "F"), p / p.sum())
            assert min_entropy_cond(d, "X", ("E", "F")) <= min_entropy_cond(d, "X", "E") + 1e-12
            assert min_entropy_cond(d, "X", "E") <= min_entropy_cond(d, "X") + 1e-12
            assert min_entropy_cond(d, "X") <= h0(d, "X") + 1e-12

    def test_overlap(self):
        with pytest.raises(DomainError):
            guessing_probability(joint(("X",), [1.0]), "X", "X")


class TestLeakage:
    def test_examples(self):
        uni = np.full((2, 2, 1), 0.25)
        assert leakage_of(xyec(uni, [[0, 0], [0, 0]], 1)) == 0.0
        assert leakage_of(xyec(uni, [[0, 0], [1, 1]], 2)) == 1.0
        # C a fresh coin independent of (X, Y)
        t = np.full((2, 2, 1, 2), 1 / 8)
        assert leakage_of(JointDistribution(("X", "Y", "E", "C"), t)) == 0.0

    def test_missing_variable(self):
        with pytest.raises(DomainError):
            leakage_of(joint(("X", "C"), [[0.5, 0], [0, 0.5]]))


class TestLemmaLeakage:
    def test_constant_message(self):
        v = check_lemma_leakage(xyec(np.full((2, 2, 2), 1 / 8), [[0, 0], [0, 0]], 1))
        assert v.passed and v.slack == 0.0

    def test_message_is_x(self):
        v = check_lemma_leakage(xyec(np.full((2, 1, 2), 1 / 4), [[0], [1]], 2))
        assert v.passed
        assert v.lhs == 0.0 and v.rhs == pytest.approx(0.0, abs=1e-15)

    def test_not_a_function(self):
        t = np.full((2, 1, 1, 2), 0.25)
        with pytest.raises(DomainError):
            check_lemma_leakage(JointDistribution(("X", "Y", "E", "C"), t))

    def test_random(self):
        rng = np.random.default_rng(17)
        for _ in range(1000):
            v = check_lemma_leakage(random_leakage_instance(rng))
            assert v.passed and v.slack >= 0.0
            assert v.lhs >= v.rhs - 1e-12


class TestLemmaSymmetrization:
    def test_identity(self):
        d = joint(("X", "E"), [[0.3, 0.1], [0.2, 0.4]])
        v = check_lemma_symmetrization(d, [lambda x: x])
        assert v.passed and v.slack == 0.0

    def test_all_binary_functions(self):
        d = joint(("X", "E"), np.full((2, 2), 0.25))
        family = [list(t) for t in itertools.product(range(2), repeat=2)]
        v = check_lemma_symmetrization(d, family)
        assert v.passed and v.slack >= 0.0

    def test_malformed(self):
        d = joint(("X", "E"), np.full((2, 2), 0.25))
        with pytest.raises(DomainError):
            check_lemma_symmetrization(d, [])
        with pytest.raises(DomainError):
            check_lemma_symmetrization(d, [[0, 1, 0]])
        with pytest.raises(DomainError):
            check_lemma_symmetrization(d, [[0, -1]])

    def test_random(self):
        rng = np.random.default_rng(23)
        for _ in range(1000):
            dist, family = random_symmetrization_instance(rng)
            v = check_lemma_symmetrization(dist, family)
            assert v.passed and v.slack >= 0.0


def test_suite_deterministic():
    a, b = run_lemma_suite(50, 9), run_lemma_suite(50, 9)
    assert a == b and a.passed
    with pytest.raises(DomainError):
        run_lemma_suite(0, 1)

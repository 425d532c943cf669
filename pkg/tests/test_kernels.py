"""Compiled and pure-Python kernels, and their agreement with the reference path."""

import math

import numpy as np
import pytest

from finitekey import _pykernels, kernels
from finitekey.chsh import (
    ChannelObservation,
    DiProtocolConfig,
    EstimationError,
    di_entropy_bound,
    di_rate,
)
from finitekey.core import EpsilonBudget, binary_entropy

needs_ext = pytest.mark.skipif(kernels.compiled_backend is None,
                               reason="compiled extension not built")


def _random_points(rng, count):
    for _ in range(count):
        n_signals = int(10 ** rng.uniform(3, 15))
        p_a0, p_b1 = rng.uniform(0.01, 0.9999, size=2)
        eps_rem = 1e-5 - 1e-10
        w = 10 ** rng.uniform(-3, 0, size=3)
        eps_pe = eps_rem * w[0] / w.sum()
        eps_bar = eps_rem * w[1] / w.sum()
        eps_pa = eps_rem - eps_pe - eps_bar
        q = rng.uniform(0.0, 0.15)
        yield n_signals, float(p_a0), float(p_b1), eps_pe, eps_bar, eps_pa, q


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.python_backend is _pykernels


def test_floor_count(backend):
    assert backend.floor_count(49999.999999999985) == 50000.0
    assert backend.floor_count(49999.5) == 49999.0
    assert backend.floor_count(3.0) == 3.0
    assert backend.floor_count(0.0) == 0.0


def test_rate_point_statuses(backend):
    c = 2 * math.sqrt(2) * 0.96
    args = (1e-6, 1e-6, 1e-6, c, 1.2, binary_entropy(0.02), 1e-10, False)
    _, score, status = backend.rate_point(10 ** 6, 1.0, 0.5, *args)
    assert status == kernels.NO_ESTIMATION and score == -math.inf
    key, _, status = backend.rate_point(10 ** 4, 0.5, 0.5, *args)
    assert status == kernels.OK and key == 0.0
    key, _, status = backend.rate_point(10 ** 12, 0.99, 0.99, *args)
    assert status == kernels.OK and key > 0


@pytest.mark.parametrize("union_bound", [False, True])
def test_rate_point_matches_reference(backend, union_bound):
    rng = np.random.default_rng(11)
    for n_signals, p_a0, p_b1, e_pe, e_bar, e_pa, q in _random_points(rng, 400):
        obs = ChannelObservation(qber=q)
        h = binary_entropy(q)
        key, _, status = backend.rate_point(n_signals, p_a0, p_b1, e_pe, e_bar, e_pa,
                                            obs.chsh, 1.2, h, 1e-10, union_bound)
        config = DiProtocolConfig(n_signals, p_a0, p_b1, union_bound=union_bound)
        budget = EpsilonBudget(1e-5, e_pe, e_bar, 1e-10, e_pa)
        try:
            report = di_rate(config, obs, budget)
        except EstimationError:
            assert status == kernels.NO_ESTIMATION
            continue
        assert key == report.key_bits


@needs_ext
def test_backends_bit_identical():
    rng = np.random.default_rng(5)
    cy, py = kernels.compiled_backend, _pykernels
    for n_signals, p_a0, p_b1, e_pe, e_bar, e_pa, q in _random_points(rng, 3000):
        c = 2 * math.sqrt(2) * (1 - 2 * q)
        h = binary_entropy(q)
        args = (n_signals, p_a0, p_b1, e_pe, e_bar, e_pa, c, 1.2, h, 1e-10, False)
        assert cy.rate_point(*args) == py.rate_point(*args)
    for _ in range(3000):
        c, xi = rng.uniform(1.9, 2 * math.sqrt(2)), 10 ** rng.uniform(-12, 0)
        assert cy.s_xi(c, xi) == py.s_xi(c, xi) == di_entropy_bound(c, xi)
        p = rng.uniform(0, 1)
        assert cy.h2(p) == py.h2(p) == binary_entropy(p)


@needs_ext
def test_rate_grid_identical():
    eps_rows = np.array([[3e-6, 3e-6, 4e-6 - 1e-10], [1e-7, 5e-6, 4.9e-6 - 1e-10]])
    pa = [0.5, 0.9, 0.99]
    pb = [0.3, 0.95]
    args = (10 ** 9, pa, pb, eps_rows, 2.715, 1.2, binary_entropy(0.02), 1e-10, False)
    k1, s1 = kernels.compiled_backend.rate_grid(*args)
    k2, s2 = _pykernels.rate_grid(*args)
    assert k1.shape == (3, 2, 2)
    np.testing.assert_array_equal(k1, k2)
    np.testing.assert_array_equal(s1, s2)
    for i, a in enumerate(pa):
        for j, b in enumerate(pb):
            for k, row in enumerate(eps_rows):
                key, score, _ = _pykernels.rate_point(10 ** 9, a, b, *row, *args[4:])
                assert (k2[i, j, k], s2[i, j, k]) == (key, score)


def test_gf2_mulmod(backend):
    assert backend.gf2_mulmod(0x53, 0xCA, 0x11B, 8) == 0x01
    assert backend.gf2_mulmod(0b010, 0b010, 0b1011, 3) == 0b100
    assert backend.gf2_mulmod_many([0x53, 1], [0xCA, 0x77], 0x11B, 8) == [0x01, 0x77]


@needs_ext
def test_gf2_backends_agree_64():
    rng = np.random.default_rng(2)
    modulus = (1 << 64) | 0b11011
    a = [int(v) for v in rng.integers(0, 2 ** 63, size=500, dtype=np.uint64)]
    b = [int(v) << 1 | 1 for v in rng.integers(0, 2 ** 63, size=500, dtype=np.uint64)]
    assert (kernels.compiled_backend.gf2_mulmod_many(a, b, modulus, 64)
            == _pykernels.gf2_mulmod_many(a, b, modulus, 64))


def test_pure_python_env(tmp_path):
    import subprocess
    import sys
    out = subprocess.run(
        [sys.executable, "-c", "import finitekey.kernels as k; print(k.BACKEND)"],
        env={"FINITEKEY_PURE_PYTHON": "1", "PATH": ""}, capture_output=True, text=True,
        check=True)
    assert out.stdout.strip() == "python"

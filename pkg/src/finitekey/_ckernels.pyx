# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels.py`` for the reference twin.

Operation order mirrors the Python version exactly so both backends are
bit-identical. Built without -ffast-math and with -ffp-contract=off.
"""

import numpy as np

from libc.math cimport sqrt, log, log1p, log2, floor, nextafter, INFINITY
from libc.stdint cimport uint64_t

cdef enum:
    _OK = 0
    _NO_KEY_BITS = 1
    _NO_ESTIMATION = 2

OK = _OK
NO_KEY_BITS = _NO_KEY_BITS
NO_ESTIMATION = _NO_ESTIMATION


cdef inline double _ulp(double x) nogil:
    return nextafter(x, INFINITY) - x


cdef inline double _floor_count(double x) nogil:
    cdef double k = floor(x)
    cdef double tol = 8.0 * _ulp(x)
    if tol > 1e-6:
        tol = 1e-6
    if x > k and (k + 1.0) - x <= tol:
        k += 1.0
    return k


cdef double _LN2 = log(2.0)


cdef inline double _h2(double p) nogil:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return (-p * log(p) - (1.0 - p) * log1p(-p)) / _LN2


cdef inline double _one_minus_h_sym(double s) nogil:
    cdef double s2, power, total, term
    cdef long k
    if s < 0.25:
        s2 = s * s
        power = s2
        total = 0.0
        k = 1
        while True:
            term = power / <double>(k * (2 * k - 1))
            total += term
            if term <= 1e-17 * total:
                break
            power *= s2
            k += 1
        return total / (2.0 * _LN2)
    return ((1.0 + s) * log1p(s) + (1.0 - s) * log1p(-s)) / (2.0 * _LN2)


cdef inline double _s_xi(double c, double xi) nogil:
    cdef double d = (c - 2.0) - xi
    cdef double s
    if not d > 0.0:
        return 0.0
    s = sqrt(d * (d + 4.0)) / 2.0
    if s >= 1.0:
        return 1.0
    return _one_minus_h_sym(s)


cdef inline double _xi_term(double m, double eps_pe) nogil:
    return sqrt((2.0 * log(1.0 / eps_pe) + 2.0 * log(m + 1.0)) / m)


cdef int _rate_point(double N, double p_a0, double p_b1, double eps_pe,
                     double eps_bar, double eps_pa, double c, double f,
                     double h_per_bit, double eps_ec, bint union_bound,
                     double *key_out, double *score_out) nogil:
    cdef double n, m1, m2, e, xi, s, delta, leak, value, key, shortfall
    n = _floor_count(p_a0 * p_b1 * N)
    m1 = _floor_count(0.5 * (1.0 - p_a0) * p_b1 * N)
    m2 = _floor_count(0.5 * (1.0 - p_a0) * (1.0 - p_b1) * N)
    if n > N - 2.0 * m1 - 2.0 * m2:
        n = N - 2.0 * m1 - 2.0 * m2
    if m1 < 1.0 or m2 < 1.0:
        key_out[0] = 0.0
        score_out[0] = -INFINITY
        return _NO_ESTIMATION
    if n < 1.0:
        key_out[0] = 0.0
        score_out[0] = -INFINITY
        return _NO_KEY_BITS
    e = eps_pe / 4.0 if union_bound else eps_pe
    xi = 0.0
    xi += _xi_term(m1, e)
    xi += _xi_term(m2, e)
    xi += _xi_term(m1, e)
    xi += _xi_term(m2, e)
    s = _s_xi(c, xi)
    delta = 7.0 * sqrt(log2(2.0 / eps_bar) / n)
    leak = f * n * h_per_bit + log2(2.0 / eps_ec)
    value = n * (s - delta) - leak - 2.0 * log2(1.0 / eps_pa)
    shortfall = c - xi - 2.0
    if shortfall > 0.0:
        shortfall = 0.0
    score_out[0] = value / n + shortfall
    if not value > 0.0:
        key_out[0] = 0.0
        return _OK
    key = floor(value)
    if key > n:
        key = n
    key_out[0] = key
    return _OK


def floor_count(double x):
    return _floor_count(x)


def h2(double p):
    return _h2(p)


def s_xi(double c, double xi):
    return _s_xi(c, xi)


def xi_term(double m, double eps_pe):
    return _xi_term(m, eps_pe)


def rate_point(n_signals, double p_a0, double p_b1, double eps_pe,
               double eps_bar, double eps_pa, double c, double f,
               double h_per_bit, double eps_ec, bint union_bound):
    cdef double key, score
    cdef int status = _rate_point(<double>n_signals, p_a0, p_b1, eps_pe,
                                  eps_bar, eps_pa, c, f, h_per_bit, eps_ec,
                                  union_bound, &key, &score)
    return key, score, status


def rate_grid(n_signals, p_a0s, p_b1s, eps_rows, double c, double f,
              double h_per_bit, double eps_ec, bint union_bound):
    cdef double[::1] pa = np.ascontiguousarray(p_a0s, dtype=np.float64)
    cdef double[::1] pb = np.ascontiguousarray(p_b1s, dtype=np.float64)
    cdef double[:, ::1] er = np.ascontiguousarray(eps_rows, dtype=np.float64)
    cdef Py_ssize_t I = pa.shape[0], J = pb.shape[0], K = er.shape[0]
    keys = np.zeros((I, J, K))
    scores = np.zeros((I, J, K))
    cdef double[:, :, ::1] kv = keys
    cdef double[:, :, ::1] sv = scores
    cdef double N = <double>n_signals
    cdef Py_ssize_t i, j, k
    with nogil:
        for i in range(I):
            for j in range(J):
                for k in range(K):
                    _rate_point(N, pa[i], pb[j], er[k, 0], er[k, 1], er[k, 2],
                                c, f, h_per_bit, eps_ec, union_bound,
                                &kv[i, j, k], &sv[i, j, k])
    return keys, scores


cdef inline uint64_t _mulmod64(uint64_t a, uint64_t b, uint64_t low_mod,
                               int degree) nogil:
    # low_mod: modulus without its x^degree term
    cdef uint64_t top = (<uint64_t>1) << (degree - 1)
    cdef uint64_t mask = ((<uint64_t>1) << degree) - 1 if degree < 64 else <uint64_t>0xFFFFFFFFFFFFFFFF
    cdef uint64_t result = 0
    cdef bint carry
    cdef int i
    for i in range(degree - 1, -1, -1):
        carry = (result & top) != 0
        result = (result << 1) & mask
        if carry:
            result ^= low_mod
        if (b >> i) & 1:
            result ^= a
    return result


def _low_modulus(modulus, degree):
    return int(modulus) ^ (1 << int(degree))


def gf2_mulmod(a, b, modulus, int degree):
    if degree < 1 or degree > 64:
        raise ValueError("compiled GF(2^n) kernel supports 1 <= n <= 64")
    cdef uint64_t low_mod = _low_modulus(modulus, degree)
    return _mulmod64(<uint64_t>a, <uint64_t>b, low_mod, degree)


def gf2_mulmod_many(a_values, b_values, modulus, int degree):
    if degree < 1 or degree > 64:
        raise ValueError("compiled GF(2^n) kernel supports 1 <= n <= 64")
    cdef uint64_t low_mod = _low_modulus(modulus, degree)
    cdef uint64_t a, b
    out = []
    for a, b in zip(a_values, b_values):
        out.append(_mulmod64(a, b, low_mod, degree))
    return out

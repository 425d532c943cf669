"""Pure-Python hot kernels.

Reference twin of ``_ckernels.pyx``. Both files must perform the same
floating-point operations in the same order so that the two backends
return bit-identical results; change them together.
"""

import math

import numpy as np

# status codes shared with the compiled backend
OK = 0
NO_KEY_BITS = 1
NO_ESTIMATION = 2


def floor_count(x):
    """Floor that forgives float round-off just below an integer."""
    k = float(math.floor(x))
    if x > k and (k + 1.0) - x <= min(8.0 * math.ulp(x), 1e-6):
        k += 1.0
    return k


_LN2 = math.log(2.0)


def h2(p):
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return (-p * math.log(p) - (1.0 - p) * math.log1p(-p)) / _LN2


def one_minus_h_sym(s):
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


def s_xi(c, xi):
    d = (c - 2.0) - xi
    if not d > 0.0:
        return 0.0
    s = math.sqrt(d * (d + 4.0)) / 2.0
    if s >= 1.0:
        return 1.0
    return one_minus_h_sym(s)


def xi_term(m, eps_pe):
    return math.sqrt((2.0 * math.log(1.0 / eps_pe) + 2.0 * math.log(m + 1.0)) / m)


def rate_point(n_signals, p_a0, p_b1, eps_pe, eps_bar, eps_pa,
               c, f, h_per_bit, eps_ec, union_bound):
    """Evaluate the DI-CHSH key length at one parameter point.

    Returns ``(key_bits, score, status)``. ``score`` is the unclamped key
    length per raw-key bit minus any shortfall of the lowered CHSH value
    below the classical bound; it orders points on the zero plateau.
    """
    N = float(n_signals)
    n = floor_count(p_a0 * p_b1 * N)
    m1 = floor_count(0.5 * (1.0 - p_a0) * p_b1 * N)
    m2 = floor_count(0.5 * (1.0 - p_a0) * (1.0 - p_b1) * N)
    # rounded products can overshoot N by a count; key events absorb it
    if n > N - 2.0 * m1 - 2.0 * m2:
        n = N - 2.0 * m1 - 2.0 * m2
    if m1 < 1.0 or m2 < 1.0:
        return 0.0, -math.inf, NO_ESTIMATION
    if n < 1.0:
        return 0.0, -math.inf, NO_KEY_BITS
    e = eps_pe / 4.0 if union_bound else eps_pe
    xi = 0.0
    xi += xi_term(m1, e)
    xi += xi_term(m2, e)
    xi += xi_term(m1, e)
    xi += xi_term(m2, e)
    s = s_xi(c, xi)
    delta = 7.0 * math.sqrt(math.log2(2.0 / eps_bar) / n)
    leak = f * n * h_per_bit + math.log2(2.0 / eps_ec)
    value = n * (s - delta) - leak - 2.0 * math.log2(1.0 / eps_pa)
    score = value / n + min(0.0, c - xi - 2.0)
    if not value > 0.0:
        return 0.0, score, OK
    key = float(math.floor(value))
    if key > n:
        key = n
    return key, score, OK


def rate_grid(n_signals, p_a0s, p_b1s, eps_rows, c, f, h_per_bit, eps_ec,
              union_bound):
    """Evaluate ``rate_point`` over the product grid.

    ``eps_rows`` is a (K, 3) array of (eps_pe, eps_bar, eps_pa) triples.
    Returns ``(key_bits, score)`` arrays of shape (len(p_a0s), len(p_b1s), K).
    """
    p_a0s = np.ascontiguousarray(p_a0s, dtype=np.float64)
    p_b1s = np.ascontiguousarray(p_b1s, dtype=np.float64)
    eps_rows = np.ascontiguousarray(eps_rows, dtype=np.float64)
    shape = (p_a0s.shape[0], p_b1s.shape[0], eps_rows.shape[0])
    keys = np.zeros(shape)
    scores = np.zeros(shape)
    rows = eps_rows.tolist()
    for i, pa in enumerate(p_a0s.tolist()):
        for j, pb in enumerate(p_b1s.tolist()):
            for k, (e_pe, e_bar, e_pa) in enumerate(rows):
                key, score, _ = rate_point(n_signals, pa, pb, e_pe, e_bar, e_pa,
                                           c, f, h_per_bit, eps_ec, union_bound)
                keys[i, j, k] = key
                scores[i, j, k] = score
    return keys, scores


def gf2_mulmod(a, b, modulus, degree):
    """Carry-less product of a and b reduced modulo ``modulus`` (with x^degree bit)."""
    top = 1 << degree
    result = 0
    for i in range(degree - 1, -1, -1):
        result <<= 1
        if result & top:
            result ^= modulus
        if (b >> i) & 1:
            result ^= a
    return result


def gf2_mulmod_many(a_values, b_values, modulus, degree):
    return [gf2_mulmod(a, b, modulus, degree) for a, b in zip(a_values, b_values)]

"""Shared arbitrary-precision plumbing: precision contexts, Gauss-Legendre
nodes, a radix-2 FFT over mpmath complex numbers, and decimal serialization
of big floats.

All heavy numerics in this package run on mpmath with the binary precision
(``mp.prec``) passed explicitly by the caller; nothing here mutates global
precision outside a ``with``-scope.
"""

import math
from contextlib import contextmanager

import numpy as np
from mpmath import mp, mpc, mpf

DEFAULT_PRECISION_BITS = 256

# extra guard bits used inside long summations so that the final rounding to
# the requested precision is clean
GUARD_BITS = 64


@contextmanager
def working_precision(bits):
    """Temporarily set mp.prec to ``bits`` (plus nothing -- caller adds guard)."""
    old = mp.prec
    mp.prec = int(bits)
    try:
        yield mp
    finally:
        mp.prec = old


def digits_for_bits(bits):
    """Decimal digits that round-trip a binary float of ``bits`` precision."""
    return int(math.ceil(bits * math.log10(2))) + 2


def mp_to_str(x, bits):
    """Serialize an mpf/mpc as a decimal string with round-trip digits."""
    d = digits_for_bits(bits)
    if isinstance(x, mpc) or (hasattr(x, "imag") and getattr(x, "imag", 0) != 0):
        return "(%s %s)" % (mp.nstr(x.real, d), mp.nstr(x.imag, d))
    return mp.nstr(mpf(x), d)


def mp_float(x):
    """Lossy float view of an mpf (used only for reporting/plotting)."""
    return float(x)


def mp_log_float(x):
    """float(ln x) for a positive mpf; safe far below float underflow."""
    return float(mp.log(x))


# ----------------------------------------------------------------------------
# Gauss-Legendre nodes at arbitrary precision
# ----------------------------------------------------------------------------

_GL_CACHE = {}


def gauss_legendre(n, bits):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].

    float64 companion values are polished by Newton iteration on the Legendre
    recurrence at the requested precision; results are cached per (n, bits).
    """
    key = (int(n), int(bits))
    if key in _GL_CACHE:
        return _GL_CACHE[key]
    x64, _ = np.polynomial.legendre.leggauss(n)
    with working_precision(bits + GUARD_BITS):
        nodes = []
        weights = []
        for x0 in x64:
            x = mpf(float(x0))
            for _ in range(int(math.log2(bits / 40)) + 3):
                p, dp = _legendre_pair(n, x)
                x = x - p / dp
            p, dp = _legendre_pair(n, x)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes.append(+x)
            weights.append(+w)
    _GL_CACHE[key] = (nodes, weights)
    return nodes, weights


def _legendre_pair(n, x):
    """(P_n(x), P_n'(x)) by the three-term recurrence."""
    p0, p1 = mpf(1), x
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


# ----------------------------------------------------------------------------
# radix-2 FFT over lists of mpc
# ----------------------------------------------------------------------------

_TWIDDLE_CACHE = {}


def _twiddles(n, bits):
    key = (n, bits)
    if key in _TWIDDLE_CACHE:
        return _TWIDDLE_CACHE[key]
    with working_precision(bits):
        w = [mp.expjpi(mpf(-2 * j) / n) for j in range(n // 2)]
    _TWIDDLE_CACHE[key] = w
    return w


def fft_mpc(values, bits):
    """In-order forward DFT (sum_j a_j e^{-2pi i jk/n}) of a power-of-two list.

    Iterative radix-2 Cooley-Tukey over mpmath complex values; costs
    O(n log n) mpc multiplies, which is what makes 400-lag autocovariance
    extraction tractable at 256 bits.
    """
    n = len(values)
    if n & (n - 1):
        raise ValueError("fft length must be a power of two")
    a = [mpc(v) for v in values]
    # bit-reversal permutation
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            a[i], a[j] = a[j], a[i]
    tw = _twiddles(n, bits)
    with working_precision(bits):
        m = 2
        while m <= n:
            half = m // 2
            stride = n // m
            for start in range(0, n, m):
                for k in range(half):
                    w = tw[k * stride]
                    lo = start + k
                    hi = lo + half
                    t = w * a[hi]
                    a[hi] = a[lo] - t
                    a[lo] = a[lo] + t
            m <<= 1
    return a

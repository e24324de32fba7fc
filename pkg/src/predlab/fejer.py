"""Fejer-Riesz factorization of nonnegative trigonometric polynomials.

A real trig polynomial t(lambda) = sum c_k e^{ik lambda} with t >= 0 factors
as |s(e^{i lambda})|^2 where s has degree nu = deg t, no zeros in the open
unit disk, and s(0) > 0; the geometric mean of t is then |s(0)|^2.

Roots of the lifted polynomial z^nu t(z) are located with a float64 companion
matrix and polished at working precision by (multiplicity-aware) Newton steps;
on-circle zeros of t appear as even-multiplicity clusters and contribute half
their copies to the factor.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from mpmath import mp, mpc, mpf

from .arcs import Angle
from .numeric import working_precision

ONCIRCLE_TOL = 1e-8  # |.|-distance from the unit circle treated as "on it"
CLUSTER_RADIUS = 1e-4  # float64 root scatter absorbed into one multiple root


class NotNonnegative(ValueError):
    """Trig polynomial dips below the allowed tolerance on the check grid."""


class RootPairingFailed(RuntimeError):
    """Roots of the lifted polynomial could not be matched into 1/conj pairs."""


class TrigPolynomial:
    """t(lambda) = sum_{|k|<=nu} c_k e^{ik(lambda - shift)}.

    Base coefficients are exact (int/Fraction/float/complex), so they can be
    materialized at any working precision; the optional shift moves the whole
    polynomial by an angle without touching the base coefficients.
    """

    def __init__(self, coeffs, shift=0):
        clean = {}
        for k, c in dict(coeffs).items():
            if c != 0:
                clean[int(k)] = c
        for k, c in clean.items():
            mirror = clean.get(-k, 0)
            if not _conj_close(c, mirror):
                raise ValueError("coefficients must satisfy c_{-k} = conj(c_k)")
        self.base = clean
        self.shift = Angle.parse(shift)
        self.degree = max((abs(k) for k in clean), default=0)

    @classmethod
    def from_real(cls, a0=0.0, cos=(), sin=(), shift=0):
        """Build from t = a0 + sum a_k cos(k l) + b_k sin(k l)."""
        coeffs = {0: a0}
        for i, a in enumerate(cos, start=1):
            coeffs[i] = coeffs.get(i, 0) + _half(a)
            coeffs[-i] = coeffs.get(-i, 0) + _half(a)
        for i, b in enumerate(sin, start=1):
            coeffs[i] = coeffs.get(i, 0) + _half(b) * -1j
            coeffs[-i] = coeffs.get(-i, 0) + _half(b) * 1j
        return cls(coeffs, shift)

    @classmethod
    def sin_squared(cls, lam0=0, power=1):
        """sin^{2 power}(lambda - lam0) with exact rational base coefficients."""
        base = {0: Fraction(1, 2), 2: Fraction(-1, 4), -2: Fraction(-1, 4)}
        out = dict(base)
        for _ in range(int(power) - 1):
            out = _convolve(out, base)
        return cls(out, shift=lam0)

    def multiply(self, other):
        """Product polynomial; requires equal shifts so coefficients stay exact."""
        if float(self.shift - other.shift) != 0.0:
            raise ValueError("can only multiply trig polynomials with equal shifts")
        return TrigPolynomial(_convolve(self.base, other.base), self.shift)

    def coefficients(self):
        """dict k -> mpc coefficient at the current working precision."""
        out = {}
        if float(self.shift) == 0.0:
            for k, c in self.base.items():
                out[k] = _to_mpc(c)
            return out
        th = self.shift.mpf()
        for k, c in self.base.items():
            out[k] = _to_mpc(c) * mp.expj(-k * th)
        return out

    def __call__(self, lam):
        """Real value t(lam) at the current working precision."""
        x = mpf(lam) - self.shift.mpf()
        z = mp.expj(x)
        acc = mpc(0)
        for k in range(self.degree, 0, -1):
            acc = (acc + _to_mpc(self.base.get(k, 0))) * z
        return mpf(_to_mpc(self.base.get(0, 0)).real + 2 * acc.real)

    def grid_float(self, n):
        """Values on an n-point uniform grid of [-pi, pi), float64."""
        lam = np.linspace(-math.pi, math.pi, n, endpoint=False) - float(self.shift)
        vals = np.full(n, float(_to_complex(self.base.get(0, 0)).real))
        for k, c in self.base.items():
            if k > 0:
                ck = _to_complex(c)
                vals += 2 * (ck.real * np.cos(k * lam) - ck.imag * np.sin(k * lam))
        return vals

    def min_check(self, grid=4096, tol=-1e-30):
        """Verify nonnegativity: float64 screen, working-precision confirm.

        Points that float64 cannot separate from zero are re-evaluated at the
        current mp precision against the exact tolerance.
        """
        vals = self.grid_float(grid)
        top = float(np.max(np.abs(vals))) or 1.0
        suspicious = np.nonzero(vals < 1e-10 * top)[0]
        if len(suspicious) > grid // 4:
            raise NotNonnegative("trig polynomial is negative on a large set")
        step = 2 * math.pi / grid
        for idx in suspicious:
            v = self(-math.pi + step * int(idx))
            if v < tol:
                raise NotNonnegative(
                    "trig polynomial dips to %s on the check grid" % mp.nstr(v, 8)
                )
        return True

    def to_json(self):
        a0, cos, sin = self._real_form()
        out = {"type": "trigpoly", "cos": [a0] + cos}
        if any(b != 0 for b in sin):
            out["sin"] = sin
        if float(self.shift) != 0.0:
            out["shift"] = self.shift.json_value()
        return out

    def _real_form(self):
        a0 = float(_to_complex(self.base.get(0, 0)).real)
        cos, sin = [], []
        for k in range(1, self.degree + 1):
            ck = _to_complex(self.base.get(k, 0))
            cos.append(2 * ck.real)
            sin.append(-2 * ck.imag)
        return a0, cos, sin


def _half(a):
    if isinstance(a, (int, Fraction)):
        return Fraction(a) / 2
    return a / 2.0


def _conj_close(c, d):
    c = _to_complex(c)
    d = _to_complex(d)
    return abs(c - d.conjugate()) <= 1e-15 * max(1.0, abs(c))


def _to_complex(c):
    if isinstance(c, Fraction):
        return complex(float(c), 0.0)
    return complex(c)


def _to_mpc(c):
    if isinstance(c, Fraction):
        return mpc(mpf(c.numerator) / c.denominator)
    if isinstance(c, complex):
        return mpc(c.real, c.imag)
    return mpc(c)


def _convolve(a, b):
    out = {}
    for j, cj in a.items():
        for k, ck in b.items():
            out[j + k] = out.get(j + k, 0) + cj * ck
    return {k: c for k, c in out.items() if c != 0}


@dataclass
class SpectralFactor:
    """Outer factor s(z) of t = |s|^2: coefficients ascending, s(0) > 0."""

    coefficients: list
    roots: list
    moduli: list = field(default_factory=list)
    degree: int = 0

    def __post_init__(self):
        self.degree = len(self.coefficients) - 1
        self.moduli = [float(abs(r)) for r in self.roots]

    def __call__(self, z):
        acc = mpc(0)
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def at_zero(self):
        return self.coefficients[0]

    def gm(self):
        """Geometric mean |s(0)|^2 of the factored polynomial."""
        s0 = self.at_zero()
        return mpf(s0.real) ** 2 + mpf(s0.imag) ** 2


def factorize(t, tol=1e-10):
    """Spectral factor of a nonnegative trig polynomial, at mp.prec precision.

    The sup-norm reconstruction error over a dense grid is verified to be
    <= tol * sup t; failure raises RootPairingFailed.
    """
    t.min_check()
    if t.degree == 0:
        c0 = _to_mpc(t.base.get(0, 0)).real
        return SpectralFactor([mpc(mp.sqrt(c0))], [])
    # multiplicity-m roots scatter like eps^(1/m) under the float64 companion
    # solve, so try increasingly generous cluster radii until the paired roots
    # actually reconstruct the polynomial
    for radius in (CLUSTER_RADIUS, 3e-2, 3e-3, 0.0):
        factor = _try_factorize(t, tol, radius)
        if factor is not None:
            return factor
    raise RootPairingFailed(
        "could not reconstruct the polynomial from paired roots"
    )


def _try_factorize(t, tol, cluster_radius):
    nu = t.degree
    coeffs = t.coefficients()  # k -> mpc
    # lifted polynomial P(z) = z^nu t(z), ascending coefficients
    lifted = [coeffs.get(k - nu, mpc(0)) for k in range(2 * nu + 1)]
    arr = np.array([complex(c.real, c.imag) for c in reversed(lifted)])
    raw = np.roots(arr)
    groups = _cluster(raw, cluster_radius)
    polished = []
    with working_precision(mp.prec + 64):
        lift_mp = [mpc(c) for c in lifted]
        for center, mult in groups:
            # a multiplicity-m root is a simple root of the (m-1)-th
            # derivative, so Newton there has no epsilon^(1/m) noise floor
            poly = lift_mp
            for _ in range(mult - 1):
                poly = _poly_derivative(poly)
            z = mpc(complex(center))
            for _ in range(64):
                p, dp = _poly_pair(poly, z)
                if dp == 0:
                    break
                step = p / dp
                z = z - step
                if abs(step) < mpf(2) ** (-mp.prec + 16) * (1 + abs(z)):
                    break
            polished.append((z, mult))
    selected = _select_outer_roots(polished, nu)
    if selected is None:
        return None
    s_tilde = _poly_from_roots(selected)
    # scale so that |s|^2 matches t at its maximum, then rotate s(0) positive
    grid = t.grid_float(4096)
    top_idx = int(np.argmax(grid))
    lam_star = -mp.pi + 2 * mp.pi * top_idx / 4096
    t_star = t(lam_star)
    s_star = _poly_eval(s_tilde, mp.expj(lam_star))
    denom = abs(s_star) ** 2
    if denom == 0 or t_star <= 0:
        return None
    scale = mp.sqrt(t_star / denom)
    s = [scale * c for c in s_tilde]
    s0 = s[0]
    if abs(s0) == 0:
        return None  # cannot happen for c_nu != 0 (no root at the origin)
    u = mp.conj(s0) / abs(s0)
    s = [u * c for c in s]
    factor = SpectralFactor(s, [r for r, m in selected for _ in range(m)])
    if _reconstruction_error(t, factor) > tol * max(float(np.max(grid)), 1e-300):
        return None
    return factor


def _cluster(roots, radius):
    """Greedy clustering of float roots into (center, multiplicity) groups."""
    items = sorted(roots, key=lambda z: (round(abs(z), 6), np.angle(z)))
    groups = []
    for z in items:
        for g in groups:
            if abs(z - g[0] / g[1]) <= radius:
                g[0] += z
                g[1] += 1
                break
        else:
            groups.append([z, 1])
    return [(total / mult, mult) for total, mult in groups]


def _select_outer_roots(polished, nu):
    """One root per 1/conj pair, preferring modulus >= 1; half of each
    on-circle even cluster."""
    outer, inner, chosen = [], [], []
    for z, m in polished:
        r = abs(z)
        if abs(r - 1) <= ONCIRCLE_TOL:
            if m % 2:
                return None
            chosen.append((z / r, m // 2))  # snap onto the circle
        elif r > 1:
            outer.append((z, m))
        else:
            inner.append((z, m))
    for z, m in outer:
        mirror = 1 / mp.conj(z)
        if not any(abs(w - mirror) <= 1e-6 * (1 + abs(mirror)) and mw == m
                   for w, mw in inner):
            return None
        chosen.append((z, m))
    if sum(m for _, m in chosen) != nu:
        return None
    return chosen


def _poly_from_roots(root_mults):
    coeffs = [mpc(1)]
    for r, m in root_mults:
        for _ in range(m):
            nxt = [mpc(0)] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i + 1] += c
                nxt[i] -= c * r
            coeffs = nxt
    return coeffs


def _poly_eval(coeffs, z):
    acc = mpc(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _poly_derivative(coeffs):
    return [k * c for k, c in enumerate(coeffs)][1:]


def _poly_pair(coeffs, z):
    """(P(z), P'(z)) by Horner."""
    p = mpc(0)
    dp = mpc(0)
    for c in reversed(coeffs):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _reconstruction_error(t, factor, grid=8192):
    """sup |t - |s|^2| on a uniform grid, float64 (spec tolerances >= 1e-12)."""
    lam = np.linspace(-math.pi, math.pi, grid, endpoint=False)
    svals = np.zeros(grid, dtype=complex)
    z = np.exp(1j * lam)
    for c in reversed(factor.coefficients):
        svals = svals * z + complex(c.real, c.imag)
    return float(np.max(np.abs(t.grid_float(grid) - np.abs(svals) ** 2)))


def geometric_mean_trig(t):
    """G(t) = |s(0)|^2 through the spectral factor."""
    return factorize(t).gm()

"""Arbitrary-precision quadrature engines for Fourier coefficients.

Two engines cover the density corpus:

* composite Gauss-Legendre panels per support arc, with the panel count tied
  to the oscillation of e^{-ik lambda} and the error estimated by doubling the
  panel count; used for piecewise-analytic integrands;
* a uniform periodic grid evaluated through a high-precision FFT; spectrally
  accurate for smooth periodic densities (the infinitely flat Rosenblatt-type
  contact zeros make their products periodic-smooth), and it extracts all lags
  0..N from a single pass, which is what keeps 400-lag runs affordable.

Both report to a relative tolerance tied to the working precision.
"""

from dataclasses import dataclass

from mpmath import mp, mpc, mpf

from .numeric import GUARD_BITS, fft_mpc, gauss_legendre, working_precision

# fixed grid offset keeping uniform nodes away from 0 and +-pi, where corpus
# densities park removable singularities
_GRID_SHIFT_NUM = 2  # shift = pi*sqrt(2)/8, computed at working precision


class QuadratureNonConvergent(ArithmeticError):
    """Doubling the panel count / grid failed to reach the target tolerance."""


@dataclass
class QuadratureConfig:
    """Numeric policy for Fourier-coefficient and log-mean integrals."""

    precision_bits: int = 256
    k_max: int = 512
    rel_tol: float = None  # default 2^-(bits-32), relative to the c_0 scale
    base_panels: int = 32
    panels_per_k: int = 4
    gl_nodes: int = 16
    max_refinements: int = 5
    trap_start: int = 2048
    trap_max: int = 1 << 17

    def tolerance(self):
        if self.rel_tol is not None:
            return mpf(self.rel_tol)
        return mpf(2) ** (-(self.precision_bits - 32))


def _grid_shift():
    return mp.pi * mp.sqrt(2) / 8


def panel_fourier(fn, intervals, k, cfg):
    """integral of fn(lambda) e^{-ik lambda} over the given mpf intervals.

    Returns (value, error_estimate); the caller judges convergence against its
    own scale.  Panels double up to cfg.max_refinements times until the
    doubling difference falls under tolerance * scale_hint.
    """
    bits = cfg.precision_bits
    tol = cfg.tolerance()
    with working_precision(bits + GUARD_BITS):
        base = max(cfg.base_panels, cfg.panels_per_k * abs(int(k)))
        prev = _panel_pass(fn, intervals, k, base, cfg, bits)
        for _ in range(cfg.max_refinements):
            base *= 2
            cur = _panel_pass(fn, intervals, k, base, cfg, bits)
            err = abs(cur - prev)
            scale = max(abs(cur), mpf(1))
            if err <= tol * scale:
                return +cur, +err
            prev = cur
    raise QuadratureNonConvergent(
        "panel doubling stalled at %d panels for k=%d" % (base, k)
    )


def _panel_pass(fn, intervals, k, total_panels, cfg, bits):
    nodes, weights = gauss_legendre(cfg.gl_nodes, bits)
    total_len = sum(b - a for a, b in intervals)
    acc = mpc(0)
    for a, b in intervals:
        npan = max(1, int(round(total_panels * float((b - a) / total_len))))
        h = (b - a) / npan
        for p in range(npan):
            lo = a + p * h
            mid = lo + h / 2
            half = h / 2
            for x, w in zip(nodes, weights):
                lam = mid + half * x
                acc += w * half * fn(lam) * mp.expj(-k * lam)
    return acc


def periodic_fourier_all(fn, n_max, cfg):
    """Fourier coefficients c_0..c_{n_max} of a smooth 2pi-periodic density.

    Uniform sampling plus FFT; the grid doubles until the per-lag change is
    below tolerance relative to max(|c_0|, 1).  Returns a list of mpc.
    """
    bits = cfg.precision_bits
    tol = cfg.tolerance()
    with working_precision(bits + GUARD_BITS):
        m = max(cfg.trap_start, 4 * _next_pow2(n_max + 1))
        prev = _trapezoid_pass(fn, n_max, m, bits)
        while m < cfg.trap_max:
            m *= 2
            cur = _trapezoid_pass(fn, n_max, m, bits)
            scale = max(abs(cur[0]), mpf(1))
            err = max(abs(a - b) for a, b in zip(cur, prev))
            if err <= tol * scale:
                return [+c for c in cur]
            prev = cur
    raise QuadratureNonConvergent(
        "periodic grid reached %d points without converging" % m
    )


def _trapezoid_pass(fn, n_max, m, bits):
    shift = -mp.pi + _grid_shift()
    h = 2 * mp.pi / m
    pi = +mp.pi
    samples = []
    for j in range(m):
        lam = shift + j * h
        if lam > pi:  # keep the evaluator on its principal interval
            lam -= 2 * pi
        samples.append(fn(lam))
    bins = fft_mpc(samples, mp.prec)
    out = []
    for k in range(n_max + 1):
        phase = mp.expj(-k * shift)
        out.append(h * phase * bins[k])
    return out


def _next_pow2(n):
    m = 1
    while m < n:
        m *= 2
    return m


def log_mean(fn, bits, split_points=()):
    """exp{(1/2pi) integral of ln fn} over [-pi, pi] by tanh-sinh quadrature.

    split_points mark integrable log singularities (zeros or poles of the
    density), so each subinterval carries them only at its endpoints, where
    tanh-sinh excels.  The working precision is capped: tanh-sinh pushes
    nodes exponentially close to the singular endpoints, where coefficient
    forms of the integrand cancel catastrophically, and the geometric-mean
    consumers only need ~1e-8 relative accuracy anyway.  Values that still
    collapse to 0/inf at a node are clamped; the affected measure is
    exponentially small, far below the quadrature tolerance.
    """
    prec = min(int(bits), 128) + GUARD_BITS
    with working_precision(prec):
        floor = mpf(2) ** (-8 * prec)
        ceil = 1 / floor

        def safe_log(x):
            v = fn(x)
            if not v > floor:
                v = floor
            elif not v < ceil:
                v = ceil
            return mp.log(v)

        pts = sorted(set(
            [float(-mp.pi), float(mp.pi)] + [float(p) for p in split_points]
        ))
        knots = [mpf(p) for p in pts]
        knots[0] = -mp.pi
        knots[-1] = mp.pi
        total = mp.quad(safe_log, knots)
        return +mp.exp(total / (2 * mp.pi))

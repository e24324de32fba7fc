"""Prediction errors as Toeplitz quadratic-form minima at working precision.

With autocovariances c_k = integral of e^{-ik lambda} f(lambda) d lambda (full
integral, no 1/2pi), the minimum of the quadratic form over monic polynomials
of degree n is literally the n-step prediction error, and the Szego limit is
2 pi G(f).  The Levinson recursion computes the whole series sigma_0^2 ..
sigma_N^2; an incremental Cholesky factorization of the same moment matrix
provides a structurally independent oracle for cross-validation.

A pivot that is not strictly positive stops the series (LostPositivity): a
fabricated tail would corrupt every downstream rate fit, so it is an error,
never a clamp.
"""

from dataclasses import dataclass, field, replace

from mpmath import mp, mpc, mpf

from .numeric import working_precision
from .quadrature import QuadratureConfig, panel_fourier, periodic_fourier_all


class LostPositivity(ArithmeticError):
    """A Toeplitz pivot became <= 0: precision is exhausted at this order."""

    def __init__(self, n, partial=None):
        super().__init__(
            "Toeplitz pivot lost positivity at order %d "
            "(series truncated, not fabricated)" % n
        )
        self.n = n
        self.partial = partial


@dataclass
class AutocovarianceSequence:
    """c_0..c_N at a fixed working precision, tagged with the source density."""

    coeffs: list
    precision_bits: int
    source: str = ""

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        k = int(k)
        if k < 0:
            return mp.conj(self.coeffs[-k])
        return self.coeffs[k]

    def gamma(self, m):
        """E[X_{t+m} conj(X_t)] = conj(c_m); the Levinson-side convention."""
        return mp.conj(self[m])


@dataclass
class PredictionErrorSeries:
    """sigma_n^2 for n = 0..N plus the reflection coefficients that built it."""

    sigma2: list
    reflection: list
    precision_bits: int
    sigma_inf2: object = None  # 2 pi G(f) when known; 0 for singular densities

    @property
    def n_max(self):
        return len(self.sigma2) - 1

    @property
    def delta(self):
        base = self.sigma_inf2 if self.sigma_inf2 is not None else mpf(0)
        return [s - base for s in self.sigma2]

    def monotone_violations(self):
        return sum(
            1 for a, b in zip(self.sigma2, self.sigma2[1:]) if b > a
        )


@dataclass
class OptimalPolynomial:
    """Monic minimizer; coefficients ascending in z, unit leading (or unit
    trailing for the reciprocal form)."""

    degree: int
    coefficients: list
    reciprocal: bool = False

    def __call__(self, z):
        acc = mpc(0)
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def reciprocal_form(self):
        """p*(z) = z^n conj(p(1/conj z)): reversed conjugated coefficients."""
        rev = [mp.conj(c) for c in reversed(self.coefficients)]
        return OptimalPolynomial(self.degree, rev, reciprocal=not self.reciprocal)


def autocovariances(density, n_max, quad=None):
    """Fourier coefficients c_0..c_N of a density as an autocovariance record."""
    quad = quad or QuadratureConfig()
    coeffs = density.fourier_coefficients(n_max, quad)
    with working_precision(quad.precision_bits):
        c0 = coeffs[0]
        if not (abs(c0.imag) <= abs(c0.real) * mpf(2) ** -16 and c0.real > 0):
            raise ValueError("c_0 must be real and positive (f integrable)")
    return AutocovarianceSequence(
        coeffs=list(coeffs),
        precision_bits=quad.precision_bits,
        source=density.descriptor_hash(),
    )


def levinson(acov):
    """Full prediction-error series by the Levinson-Durbin recursion.

    sigma2[0] = c_0; each step solves the next Yule-Walker system through the
    reflection coefficient; |reflection| < 1 exactly while pivots stay positive.
    """
    series, _ = _levinson_core(acov, len(acov) - 1, want_poly=False)
    return series


def _levinson_core(acov, n_max, want_poly):
    bits = acov.precision_bits
    with working_precision(bits):
        v = mpf(acov.gamma(0).real)
        if not v > 0:
            raise LostPositivity(0, None)
        sigma2 = [v]
        refl = []
        a = []  # a[j-1] = phi_{n,j}
        for n in range(1, n_max + 1):
            acc = mpc(0)
            for j in range(1, n):
                acc += a[j - 1] * acov.gamma(n - j)
            k = (acov.gamma(n) - acc) / v
            one_minus = 1 - (k.real * k.real + k.imag * k.imag)
            if not one_minus > 0:
                raise LostPositivity(
                    n,
                    PredictionErrorSeries(sigma2, refl, bits),
                )
            new_a = [
                a[j - 1] - k * mp.conj(a[n - 1 - j]) for j in range(1, n)
            ]
            new_a.append(k)
            a = new_a
            v = v * one_minus
            sigma2.append(v)
            refl.append(k)
        series = PredictionErrorSeries(sigma2, refl, bits)
        return series, a


def optimal_polynomial(acov, n, reciprocal=False):
    """Monic optimal polynomial of degree n (leading-1 form by default).

    The reciprocal form has unit constant term and the same weighted norm.
    """
    _, a = _levinson_core(acov, n, want_poly=True)
    with working_precision(acov.precision_bits):
        # reciprocal (constant-term-1) form: 1 - sum_j phi_j z^j
        star = [mpc(1)] + [-c for c in a]
        if reciprocal:
            return OptimalPolynomial(n, star, reciprocal=True)
        lead = [mp.conj(c) for c in reversed(star)]
        return OptimalPolynomial(n, lead, reciprocal=False)


def cholesky_sigma(acov, n):
    """sigma_n^2 as the n-th pivot of the Cholesky factorization of [c_{j-k}].

    Same quantity as levinson().sigma2[n] by a structurally different
    algorithm (determinant ratio via factorization pivots).
    """
    return cholesky_series(acov, n).sigma2[n]


def cholesky_series(acov, n_max):
    """All pivots sigma_0^2..sigma_N^2 from one incremental factorization."""
    bits = acov.precision_bits
    with working_precision(bits):
        rows = []
        pivots = []
        for j in range(n_max + 1):
            row = []
            for k in range(j):
                acc = acov[j - k]  # M[j,k] = c_{j-k}
                for m in range(k):
                    acc -= row[m] * mp.conj(rows[k][m]) * pivots[m]
                row.append(acc / pivots[k])
            d = mpf(acov[0].real)
            for m in range(j):
                c = row[m]
                d -= (c.real * c.real + c.imag * c.imag) * pivots[m]
            if not d > 0:
                raise LostPositivity(
                    j, PredictionErrorSeries(pivots, [], bits)
                )
            rows.append(row)
            pivots.append(d)
        return PredictionErrorSeries(pivots, [], bits)


def quadratic_form(acov, coefficients):
    """v^H [c_{j-k}] v for an ascending coefficient vector; equals the
    weighted square norm of the polynomial."""
    with working_precision(acov.precision_bits):
        n = len(coefficients)
        acc = mpc(0)
        for j in range(n):
            for k in range(n):
                acc += mp.conj(coefficients[j]) * acov[j - k] * coefficients[k]
        return mpf(acc.real)


def polynomial_residual(density, poly, quad=None):
    """Independent check: quadrature of |p(e^{i l})|^2 f(l) over [-pi, pi].

    Uses a fresh integral rather than the cached autocovariances, so it probes
    the c_k themselves, not only the recursion algebra.
    """
    quad = quad or QuadratureConfig()
    deg = poly.degree

    def fn(lam):
        z = mp.expj(lam)
        val = poly(z)
        return (val.real * val.real + val.imag * val.imag) * density.evaluate(lam)

    with working_precision(quad.precision_bits):
        factors = density.node.factors()
        from .density import Rosenblatt  # local import to avoid a cycle

        if any(isinstance(f, Rosenblatt) for f in factors):
            return mpf(periodic_fourier_all(fn, 0, quad)[0].real)
        support = density.support_arcs()
        intervals = (
            [(-mp.pi, +mp.pi)] if support.full_circle else support.intervals_mpf()
        )
        cfg = replace(quad, base_panels=max(quad.base_panels, 4 * deg))
        val, _ = panel_fourier(fn, intervals, 0, cfg)
        return mpf(val.real)


def escalated_bits(n_max, tau_hint=None, base=256):
    """Precision policy for exponential-decay runs: sigma_n^2 ~ tau^{2n} must
    stay far above pivot underflow, so scale bits with n |log2 tau|."""
    if tau_hint is None or not 0 < tau_hint < 1:
        return base
    import math

    need = int(n_max * abs(math.log2(tau_hint))) + 128
    return max(base, need)

"""Geometry of finite unions of closed arcs on the unit circle.

Angles are kept as exact rational multiples of pi plus a float remainder, so
that arc endpoints entering high-precision quadrature (e.g. pi/2 - pi/3) do
not get truncated to double precision on the way in.

Closed-form transfinite diameters are provided for the classical patterns:
full circle, a single arc, k equidistant equal arcs, two equal arcs symmetric
about a diameter, and the four-arc cross pattern.  Everything else falls back
to the numerical estimators in :mod:`predlab.potential`.
"""

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf

TWO_PI = 2 * math.pi
# angular slack used when matching patterns / merging arcs; inputs come from
# exact constructors, so this only absorbs normalization rounding
ANGLE_TOL = 1e-12 * TWO_PI


class NotSymmetric(ValueError):
    """Arc set is not symmetric with respect to the real axis."""


class MultiSegment(ValueError):
    """No closed-form transfinite diameter is claimed for several segments."""


_PI_STRING = re.compile(
    r"^\s*(?P<sign>[+-]?)\s*(?:(?P<num>\d+)\s*\*?\s*)?pi\s*(?:/\s*(?P<den>\d+))?\s*$"
)


class Angle:
    """An angle pi * frac + rem with frac an exact Fraction and rem a float."""

    __slots__ = ("frac", "rem")

    def __init__(self, frac=0, rem=0.0):
        self.frac = Fraction(frac)
        self.rem = float(rem)

    @classmethod
    def parse(cls, value):
        """Accept numbers, Angle, or strings like 'pi/3', '-2*pi/5', '0.7'."""
        if isinstance(value, Angle):
            return value
        if isinstance(value, (int, float)):
            return cls(0, float(value))
        if isinstance(value, str):
            m = _PI_STRING.match(value)
            if m:
                num = int(m.group("num") or 1)
                den = int(m.group("den") or 1)
                f = Fraction(num, den)
                if m.group("sign") == "-":
                    f = -f
                return cls(f, 0.0)
            return cls(0, float(value))
        raise TypeError("cannot interpret %r as an angle" % (value,))

    def __float__(self):
        return float(self.frac) * math.pi + self.rem

    def mpf(self):
        """Value at the current mp working precision."""
        return mp.pi * self.frac.numerator / self.frac.denominator + mpf(self.rem)

    def __add__(self, other):
        other = Angle.parse(other)
        return Angle(self.frac + other.frac, self.rem + other.rem)

    def __sub__(self, other):
        other = Angle.parse(other)
        return Angle(self.frac - other.frac, self.rem - other.rem)

    def __neg__(self):
        return Angle(-self.frac, -self.rem)

    def __mul__(self, k):
        return Angle(self.frac * Fraction(k), self.rem * k)

    def divided_by(self, k):
        return Angle(self.frac / k, self.rem / k)

    def wrapped(self):
        """Equivalent angle in (-pi, pi], shifting by an exact multiple of 2pi."""
        x = float(self)
        k = math.floor((math.pi - x) / TWO_PI)
        if x + k * TWO_PI <= -math.pi:  # guard float boundary
            k += 1
        return Angle(self.frac + 2 * k, self.rem)

    def __repr__(self):
        if self.rem == 0.0 and self.frac != 0:
            return "Angle(%s*pi)" % self.frac
        return "Angle(%g)" % float(self)

    def json_value(self):
        if self.rem == 0.0 and self.frac.denominator != 0:
            f = self.frac
            if f == 0:
                return 0.0
            num = "" if abs(f.numerator) == 1 else "%d*" % abs(f.numerator)
            sign = "-" if f < 0 else ""
            den = "" if f.denominator == 1 else "/%d" % f.denominator
            return "%s%spi%s" % (sign, num, den)
        return float(self)


@dataclass(frozen=True)
class Arc:
    """Closed arc {e^{i theta}: |theta - center| <= length/2}."""

    center: Angle
    length: Angle

    def __post_init__(self):
        if float(self.length) <= 0 or float(self.length) > TWO_PI + ANGLE_TOL:
            raise ValueError("arc length must lie in (0, 2*pi]")

    @property
    def left(self):
        return self.center - self.length.divided_by(2)

    @property
    def right(self):
        return self.center + self.length.divided_by(2)

    def contains(self, theta, tol=ANGLE_TOL):
        d = (theta - float(self.center)) % TWO_PI
        if d > math.pi:
            d -= TWO_PI
        return abs(d) <= float(self.length) / 2 + tol


def arc(center, length):
    """Arc from angle-like center and length (numbers or 'pi/3' strings)."""
    return Arc(Angle.parse(center).wrapped(), Angle.parse(length))


class ArcSet:
    """Finite union of disjoint closed arcs, merged and sorted at construction."""

    def __init__(self, arcs=(), full_circle=False):
        if full_circle:
            self.arcs = []
            self.full_circle = True
            return
        merged = _merge([(a.left, a.length) for a in arcs])
        if merged == "full":
            self.arcs = []
            self.full_circle = True
        else:
            self.arcs = [Arc(l + ln.divided_by(2), ln) for l, ln in merged]
            self.full_circle = False

    @classmethod
    def single(cls, center, length):
        return cls([arc(center, length)])

    @classmethod
    def circle(cls):
        return cls(full_circle=True)

    def __len__(self):
        return len(self.arcs)

    def __eq__(self, other):
        if not isinstance(other, ArcSet):
            return NotImplemented
        if self.full_circle or other.full_circle:
            return self.full_circle == other.full_circle
        if len(self.arcs) != len(other.arcs):
            return False
        return all(
            abs(float(a.center) - float(b.center)) <= ANGLE_TOL
            and abs(float(a.length) - float(b.length)) <= ANGLE_TOL
            for a, b in zip(self.arcs, other.arcs)
        )

    def total_length(self):
        if self.full_circle:
            return TWO_PI
        return sum(float(a.length) for a in self.arcs)

    def is_empty(self):
        return not self.full_circle and not self.arcs

    def contains(self, theta, tol=ANGLE_TOL):
        if self.full_circle:
            return True
        return any(a.contains(theta, tol) for a in self.arcs)

    def intervals_float(self):
        """(left, right) float pairs with right possibly exceeding pi."""
        return [(float(a.left), float(a.left) + float(a.length)) for a in self.arcs]

    def intervals_mpf(self):
        """(left, right) mpf pairs at the current working precision."""
        out = []
        for a in self.arcs:
            l = a.left.mpf()
            out.append((l, l + a.length.mpf()))
        return out

    def gaps(self):
        """Complementary open arcs as (center_float, length_float) pairs."""
        if self.full_circle or not self.arcs:
            return []
        ivs = self.intervals_float()
        out = []
        for (l1, r1), (l2, r2) in zip(ivs, ivs[1:]):
            out.append(((r1 + l2) / 2, l2 - r1))
        first_l, last_r = ivs[0][0], ivs[-1][1]
        wrap = first_l + TWO_PI - last_r
        if wrap > ANGLE_TOL:
            out.append(((last_r + first_l + TWO_PI) / 2, wrap))
        return [(c, g) for c, g in out if g > ANGLE_TOL]

    def largest_gap(self):
        gs = self.gaps()
        return max((g for _, g in gs), default=0.0)

    # -- structural transformations -------------------------------------

    def rotate(self, theta):
        """Rotation z -> e^{i theta} z; lengths are preserved."""
        if self.full_circle:
            return ArcSet.circle()
        t = Angle.parse(theta)
        return ArcSet([Arc((a.center + t).wrapped(), a.length) for a in self.arcs])

    def preimage_power(self, k):
        """The set {z: z^k in F}; a length-beta arc lifts to k arcs of length beta/k."""
        k = int(k)
        if k < 1:
            raise ValueError("power must be a positive integer")
        if self.full_circle:
            return ArcSet.circle()
        lifted = []
        for a in self.arcs:
            for j in range(k):
                c = (a.center + Angle(Fraction(2 * j, 1))).divided_by(k)
                lifted.append(Arc(c.wrapped(), a.length.divided_by(k)))
        return ArcSet(lifted)

    def conjugate(self):
        if self.full_circle:
            return ArcSet.circle()
        return ArcSet([Arc((-a.center).wrapped(), a.length) for a in self.arcs])

    def is_real_symmetric(self, tol=ANGLE_TOL):
        return self == self.conjugate()

    def project_real(self):
        """Projection {cos theta} onto the real axis (requires real symmetry)."""
        if not self.is_real_symmetric():
            raise NotSymmetric("projection needs F = conj(F)")
        if self.full_circle:
            return RealSegmentSet([(-1.0, 1.0)])
        segs = []
        for l, r in self.intervals_float():
            pts = [l, r]
            # cos is monotone on [0, pi] and [-pi, 0]; split at interior extrema
            for crit in (0.0, math.pi, -math.pi, TWO_PI):
                if l < crit < r:
                    pts.append(crit)
            pts.sort()
            for a, b in zip(pts, pts[1:]):
                lo, hi = sorted((math.cos(a), math.cos(b)))
                segs.append((lo, hi))
        return RealSegmentSet(segs)

    def intersect(self, other):
        """Intersection with another arc set (used for product supports)."""
        if self.full_circle:
            return other
        if other.full_circle:
            return self
        out = []
        for l1, r1 in self.intervals_float():
            for l2, r2 in other.intervals_float():
                for shift in (-TWO_PI, 0.0, TWO_PI):
                    lo = max(l1, l2 + shift)
                    hi = min(r1, r2 + shift)
                    if hi - lo > ANGLE_TOL:
                        out.append(arc((lo + hi) / 2, hi - lo))
        return ArcSet(out)

    # -- serialization ----------------------------------------------------

    def to_json(self):
        if self.full_circle:
            return {"full_circle": True}
        return {
            "arcs": [
                {"center": a.center.json_value(), "length": a.length.json_value()}
                for a in self.arcs
            ]
        }

    @classmethod
    def from_json(cls, obj):
        if obj.get("full_circle"):
            return cls.circle()
        return cls([arc(d["center"], d["length"]) for d in obj.get("arcs", [])])

    def __repr__(self):
        if self.full_circle:
            return "ArcSet(full circle)"
        return "ArcSet(%s)" % ", ".join(
            "[%.6g, %.6g]" % iv for iv in self.intervals_float()
        )


def _merge(pairs):
    """Merge (left_angle, length_angle) pairs of closed arcs on the circle."""
    if not pairs:
        return []
    items = sorted(
        [(l.wrapped(), ln) for l, ln in pairs], key=lambda p: float(p[0])
    )
    if sum(float(ln) for _, ln in items) >= TWO_PI - ANGLE_TOL:
        return "full"
    merged = [items[0]]
    for l, ln in items[1:]:
        pl, pln = merged[-1]
        if float(l) <= float(pl) + float(pln) + ANGLE_TOL:
            new_r = max(float(pl) + float(pln), float(l) + float(ln))
            if new_r > float(pl) + float(pln):  # extend, keeping exact endpoints
                merged[-1] = (pl, (l + ln) - pl)
        else:
            merged.append((l, ln))
    # wrap-around: last arc may touch the first one across the seam
    if len(merged) > 1:
        fl, fln = merged[0]
        ll, lln = merged[-1]
        if float(ll) + float(lln) >= float(fl) + TWO_PI - ANGLE_TOL:
            end = max(float(fl) + float(fln), float(ll) + float(lln) - TWO_PI)
            new_len = (fl + fln) - (ll - Angle(2)) if end == float(fl) + float(fln) else lln
            merged = merged[1:-1] + [(ll, new_len)]
    if sum(float(ln) for _, ln in merged) >= TWO_PI - ANGLE_TOL:
        return "full"
    return merged


class RealSegmentSet:
    """Disjoint closed segments of [-1, 1], the projection targets of arcs."""

    def __init__(self, segments):
        segs = sorted((float(a), float(b)) for a, b in segments)
        for a, b in segs:
            if b < a - 1e-15:
                raise ValueError("segment endpoints out of order")
        merged = []
        for a, b in segs:
            if merged and a <= merged[-1][1] + 1e-12:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        self.segments = [(a, b) for a, b in merged]

    def __len__(self):
        return len(self.segments)

    def tau(self):
        """Transfinite diameter (b-a)/4 of a single segment."""
        if len(self.segments) != 1:
            raise MultiSegment("closed form is only available for one segment")
        a, b = self.segments[0]
        return (b - a) / 4.0


def segment_tau(segset):
    return segset.tau()


def closed_form_tau(arcset):
    """Exact transfinite diameter when the arc set matches a known pattern.

    Returns None on a pattern miss; callers fall back to the numerical
    Fekete/Chebyshev estimators.
    """
    if arcset.full_circle:
        return 1.0
    arcs = arcset.arcs
    if not arcs:
        return None
    lengths = [float(a.length) for a in arcs]
    if len(arcs) == 1:
        return math.sin(lengths[0] / 4.0)
    equal = max(lengths) - min(lengths) <= ANGLE_TOL
    if not equal:
        return None
    alpha = lengths[0]
    gaps = sorted(g for _, g in arcset.gaps())
    if len(arcs) == 2:
        # two equal arcs are always mirror-symmetric about some diameter
        delta = gaps[0] / 2.0
        return math.sqrt(math.sin(alpha / 2.0) * math.sin(alpha / 2.0 + delta))
    centers = sorted(float(a.center) for a in arcs)
    spacings = [c2 - c1 for c1, c2 in zip(centers, centers[1:])]
    spacings.append(centers[0] + TWO_PI - centers[-1])
    k = len(arcs)
    if max(spacings) - min(spacings) <= ANGLE_TOL:
        return math.sin(k * alpha / 4.0) ** (1.0 / k)
    if k == 4:
        opposite = (
            abs(centers[2] - centers[0] - math.pi) <= ANGLE_TOL
            and abs(centers[3] - centers[1] - math.pi) <= ANGLE_TOL
        )
        alternating = (
            abs(spacings[0] - spacings[2]) <= ANGLE_TOL
            and abs(spacings[1] - spacings[3]) <= ANGLE_TOL
        )
        if opposite and alternating:
            g = spacings[0] - alpha  # adjacent gap; either one gives the same value
            return (math.sin(alpha) * math.sin(alpha + g)) ** 0.25
    return None


def robinson_tau(arcset):
    """tau(F) = sqrt(2 tau(F^x)) for a real-symmetric set with one projected
    segment, in the orientation fixed by the single-arc example (the printed
    form of the projection identity is inconsistent with that example and with
    the full-circle case, so this orientation is the implemented one)."""
    return math.sqrt(2.0 * segment_tau(arcset.project_real()))

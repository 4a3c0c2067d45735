"""Closed, orientation-symmetric rotation-number sets.

Values in the representation topology are always of the form
{0} union K with K closed and invariant under x -> -x, so every
constructor here adds 0 and the mirror image automatically.  A set is a
finite union of points and closed arcs; arcs are stored split at 0
(endpoints satisfy 0 <= lo <= hi <= 1), which makes normalization a
plain sweep and keeps equality exact.  Endpoints stay Fractions when
given exactly and floats otherwise; mixed comparisons are exact in
Python, so the two kinds coexist without tolerance fudging.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .rotarith import Angle

Endpoint = Union[Fraction, float]


def _coerce(v) -> Endpoint:
    if isinstance(v, Angle):
        return v.exact if v.exact is not None else v.value
    if isinstance(v, (Fraction, int)):
        return Fraction(v) % 1
    return float(v) % 1.0


def _mod1(v: Endpoint) -> Endpoint:
    return v % 1 if isinstance(v, Fraction) else v % 1.0


def _fmt(v: Endpoint) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    return repr(v)


def _prefer_exact(a: Endpoint, b: Endpoint) -> Endpoint:
    return a if isinstance(a, Fraction) else b


@dataclass(frozen=True)
class RotSet:
    """{0} plus finitely many points and closed arcs, mirror-symmetric.

    ``intervals`` are closed arcs with 0 <= lo < hi <= 1 after
    normalization; full() is represented by the single arc [0, 1].
    """

    points: tuple[Endpoint, ...]
    intervals: tuple[tuple[Endpoint, Endpoint], ...]

    # -- constructors ------------------------------------------------------

    @classmethod
    def build(cls, points: Iterable = (), intervals: Iterable = ()) -> "RotSet":
        """Normalize arbitrary points and ccw closed arcs (lo, hi) into a RotSet.

        Zero and all mirror images are added; arcs given with lo > hi wrap
        through 0 and are split.  An arc with lo == hi mod 1 is a point.
        """
        pts: list[Endpoint] = [Fraction(0)]
        arcs: list[tuple[Endpoint, Endpoint]] = []

        def add_point(v):
            v = _mod1(_coerce(v))
            pts.append(v)
            pts.append(_mod1(1 - v))

        def add_arc(lo, hi):
            lo_raw = lo.value if isinstance(lo, Angle) else lo
            hi_raw = hi.value if isinstance(hi, Angle) else hi
            if hi_raw - lo_raw >= 1:  # a full turn or more: the whole circle
                arcs.append((Fraction(0), Fraction(1)))
                return
            lo, hi = _coerce(lo), _coerce(hi)
            if lo == hi:
                add_point(lo)
                return
            for a, b in ((lo, hi), (_mod1(1 - hi), _mod1(1 - lo))):
                if a < b:
                    arcs.append((a, b))
                else:  # wraps through 0
                    if a < 1:
                        arcs.append((a, type(a)(1) if isinstance(a, Fraction) else 1.0))
                    if 0 < b:
                        arcs.append((type(b)(0) if isinstance(b, Fraction) else 0.0, b))

        for v in points:
            add_point(v)
        for lo, hi in intervals:
            add_arc(lo, hi)
        return cls._normalized(pts, arcs)

    @classmethod
    def _normalized(cls, pts: list, arcs: list) -> "RotSet":
        merged: list[list[Endpoint]] = []
        for lo, hi in sorted(arcs, key=lambda ab: (ab[0], ab[1])):
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1][1] = hi
            else:
                merged.append([lo, hi])
        arcs_t = tuple((lo, hi) for lo, hi in merged)

        def covered(v) -> bool:
            return any(lo <= v <= hi for lo, hi in arcs_t) or (
                v == 0 and any(hi == 1 for _, hi in arcs_t)
            )

        uniq: list[Endpoint] = []
        for v in sorted(pts):
            if covered(v):
                continue
            if uniq and uniq[-1] == v:
                uniq[-1] = _prefer_exact(uniq[-1], v)
            else:
                uniq.append(v)
        return cls(points=tuple(uniq), intervals=arcs_t)

    @classmethod
    def full(cls) -> "RotSet":
        return cls(points=(), intervals=((Fraction(0), Fraction(1)),))

    @classmethod
    def zero_only(cls) -> "RotSet":
        return cls(points=(Fraction(0),), intervals=())

    @classmethod
    def from_points(cls, points: Iterable) -> "RotSet":
        return cls.build(points=points)

    @classmethod
    def from_intervals(cls, intervals: Iterable) -> "RotSet":
        return cls.build(intervals=intervals)

    # -- queries -----------------------------------------------------------

    def is_full(self) -> bool:
        return self.intervals == ((Fraction(0), Fraction(1)),) or self.intervals == ((0.0, 1.0),)

    def is_zero_only(self) -> bool:
        return not self.intervals and all(p == 0 for p in self.points)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = _mod1(_coerce(x))
        for v in self.points:
            d = abs(x - v)
            if min(d, 1 - d) <= tol:
                return True
        # Exact comparisons first: mixing tol into the arithmetic would
        # promote Fraction endpoints to floats and lose endpoint hits.
        for lo, hi in self.intervals:
            if lo <= x <= hi or x + 1 <= hi or x - 1 >= lo:
                return True
        if tol > 0:
            xf = float(x)
            for lo, hi in self.intervals:
                lof, hif = float(lo), float(hi)
                if lof - tol <= xf <= hif + tol:
                    return True
                if xf + 1 <= hif + tol or xf - 1 >= lof - tol:
                    return True
        return False

    def point_values(self) -> list[Endpoint]:
        return list(self.points)

    # -- algebra -----------------------------------------------------------

    def union(self, other: "RotSet") -> "RotSet":
        return RotSet._normalized(
            list(self.points) + list(other.points),
            list(self.intervals) + list(other.intervals),
        )

    def intersect(self, other: "RotSet") -> "RotSet":
        pts = [p for p in self.points if other.contains(p)]
        pts += [p for p in other.points if self.contains(p)]
        arcs = []
        for alo, ahi in self.intervals:
            for blo, bhi in other.intervals:
                lo, hi = max(alo, blo), min(ahi, bhi)
                if lo < hi:
                    arcs.append((lo, hi))
                elif lo == hi:
                    pts.append(lo)
        return RotSet._normalized(pts, arcs)

    def is_subset(self, other: "RotSet") -> bool:
        return self.union(other) == other

    def scale_image(self, k: int) -> "RotSet":
        """{k*x : x in self}; symmetric sets make the sign of k irrelevant."""
        k = abs(int(k))
        if k == 0:
            return RotSet.zero_only()
        pts = [k * p for p in self.points]
        arcs = []
        for lo, hi in self.intervals:
            if k * (hi - lo) >= 1:
                return RotSet.full()
            arcs.append((_mod1(k * lo), _mod1(k * lo) + k * (hi - lo)))
        return RotSet.build(points=pts, intervals=arcs)

    def scale_preimage(self, m: int) -> "RotSet":
        """{x : m*x in self}."""
        m = abs(int(m))
        if m == 0:
            raise ValueError("preimage under multiplication by 0")
        pts = []
        arcs = []
        for p in self.points:
            pf = Fraction(p) if isinstance(p, Fraction) else p
            for j in range(m):
                pts.append((pf + j) / m)
        for lo, hi in self.intervals:
            for j in range(m):
                arcs.append(((lo + j) / m, (hi + j) / m))
        return RotSet.build(points=pts, intervals=arcs)

    def minkowski(self, other: "RotSet") -> "RotSet":
        """Closure of {x + y}; both inputs symmetric, so this is symmetric too."""
        pts = [p + q for p in self.points for q in other.points]
        arcs = []
        for lo, hi in self.intervals:
            for q in other.points:
                arcs.append((_mod1(lo + q), _mod1(lo + q) + (hi - lo)))
            for blo, bhi in other.intervals:
                span = (hi - lo) + (bhi - blo)
                if span >= 1:
                    return RotSet.full()
                arcs.append((_mod1(lo + blo), _mod1(lo + blo) + span))
        for p in self.points:
            for blo, bhi in other.intervals:
                arcs.append((_mod1(blo + p), _mod1(blo + p) + (bhi - blo)))
        return RotSet.build(points=pts, intervals=arcs)

    def mirrored(self) -> "RotSet":
        return self  # symmetry is a construction invariant

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "points": [_fmt(p) for p in self.points],
            "intervals": [[_fmt(lo), _fmt(hi)] for lo, hi in self.intervals],
        }

    def __str__(self) -> str:
        parts = [_fmt(p) for p in self.points]
        parts += [f"[{_fmt(lo)}, {_fmt(hi)}]" for lo, hi in self.intervals]
        return "{" + ", ".join(parts) + "}"


def rotset_union(s1: RotSet, s2: RotSet) -> RotSet:
    return s1.union(s2)


def rotset_intersect(s1: RotSet, s2: RotSet) -> RotSet:
    return s1.intersect(s2)


def rotset_symmetrize(intervals: Iterable) -> RotSet:
    """{0} plus the given closed arcs plus their mirror images."""
    return RotSet.from_intervals(intervals)

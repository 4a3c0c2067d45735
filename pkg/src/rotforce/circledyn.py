"""Circle homeomorphisms: rotation-number estimates, the Euler cocycle, Denjoy blow-ups.

Maps come in three kinds: the projective action of a ``MoebiusReal`` on
RP^1, a piecewise-linear homeomorphism given by lift breakpoints, and a
word (formal composition) of other maps.  All lifts are normalized the
same way -- the canonical lift is the one whose value at 0 lies in
[0, 1) -- which is what makes the Euler cocycle an honest {0, 1}-valued
quantity and keeps displacement bookkeeping uniform across kinds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .moebius import MoebiusReal

MONOTONE_GRID = 1 << 14
_TIE_TOL = 1e-12


class NotMonotone(ValueError):
    """Map data fails the strict-monotonicity certificate."""


class StabilizerNotTrivial(ValueError):
    """A word of the bounded ball fixes (or collides at) the blow-up seed."""


class GapBudgetExceeded(ValueError):
    """Requested gap weights sum to at least the whole circle."""


def circ_dist(a: float, b: float) -> float:
    """Distance on R/Z."""
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


# ---------------------------------------------------------------------------
# map kinds


class CircleMap:
    """Degree-one circle homeomorphism with coordinate in [0, 1)."""

    def __call__(self, t: float) -> float:
        raise NotImplementedError

    def eval_array(self, ts: np.ndarray) -> np.ndarray:
        return np.array([self(float(t)) for t in ts])

    def inverse(self) -> "CircleMap":
        raise NotImplementedError

    def as_moebius(self) -> MoebiusReal | None:
        """The underlying matrix if this map collapses to one, else None."""
        return None

    def lift(self, x: float) -> float:
        """Canonical lift (value at 0 in [0, 1)) evaluated at x."""
        k = math.floor(x)
        t = x - k
        t0 = self(0.0)
        tp = self(t)
        return k + tp + (1.0 if tp < t0 else 0.0)


class MoebiusOnRP1(CircleMap):
    """Projective action of a determinant-one matrix."""

    def __init__(self, matrix: MoebiusReal):
        self.matrix = matrix

    def __call__(self, t: float) -> float:
        return self.matrix.rp1(t)

    def eval_array(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        ct = np.cos(np.pi * ts)
        st = np.sin(np.pi * ts)
        m = self.matrix
        return (np.arctan2(m.c * ct + m.d * st, m.a * ct + m.b * st) / np.pi) % 1.0

    def inverse(self) -> "MoebiusOnRP1":
        return MoebiusOnRP1(self.matrix.inverse())

    def as_moebius(self) -> MoebiusReal:
        return self.matrix

    def __repr__(self):
        return f"MoebiusOnRP1({self.matrix.entries()})"


class PiecewiseLinear(CircleMap):
    """Piecewise-linear homeomorphism from lift breakpoints.

    ``xs`` lie in [0, 1) strictly increasing; ``ys`` are the lift values
    there, strictly increasing with ``ys[-1] < ys[0] + 1`` so the
    periodic extension f(x+1) = f(x)+1 stays a homeomorphism.  Stored
    ys are shifted by an integer so the canonical normalization holds.
    """

    def __init__(self, xs: Sequence[float], ys: Sequence[float]):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or len(xs) == 0:
            raise ValueError("breakpoints must be matching non-empty 1-d arrays")
        if xs[0] < 0.0 or xs[-1] >= 1.0:
            raise ValueError("breakpoint positions must lie in [0, 1)")
        if np.any(np.diff(xs) <= 0):
            raise NotMonotone("breakpoint positions not strictly increasing")
        if np.any(np.diff(ys) <= 0) or not ys[-1] < ys[0] + 1.0:
            raise NotMonotone("breakpoint images not strictly increasing around the circle")
        shift = math.floor(self._raw_lift(xs, ys, 0.0))
        self.xs = xs
        self.ys = ys - shift

    @staticmethod
    def _raw_lift(xs: np.ndarray, ys: np.ndarray, x: float) -> float:
        k = math.floor(x)
        r = x - k
        return k + _kernels._pl_eval_frac_np(xs, ys, r)

    @classmethod
    def rotation(cls, theta: float) -> "PiecewiseLinear":
        return cls([0.0], [theta % 1.0])

    def lift(self, x: float) -> float:
        return self._raw_lift(self.xs, self.ys, x)

    def __call__(self, t: float) -> float:
        return self.lift(t % 1.0) % 1.0

    def eval_array(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float) % 1.0
        # extend one breakpoint past each end so interp sees the wrap segment
        xs = np.concatenate(([self.xs[-1] - 1.0], self.xs, [self.xs[0] + 1.0]))
        ys = np.concatenate(([self.ys[-1] - 1.0], self.ys, [self.ys[0] + 1.0]))
        return np.interp(ts, xs, ys) % 1.0

    def inverse(self) -> "PiecewiseLinear":
        us = self.ys % 1.0
        vs = self.xs - (self.ys - us)  # lift drops by the same integer
        order = np.argsort(us)
        return PiecewiseLinear(us[order], vs[order])

    def __repr__(self):
        return f"PiecewiseLinear({len(self.xs)} breakpoints)"


class Word(CircleMap):
    """Formal composition; ``Word([f, g])`` acts as f(g(t))."""

    def __init__(self, letters: Sequence[CircleMap]):
        flat: list[CircleMap] = []
        for let in letters:
            if isinstance(let, Word):
                flat.extend(let.letters)
            else:
                flat.append(let)
        self.letters = tuple(flat)

    def __call__(self, t: float) -> float:
        for let in reversed(self.letters):
            t = let(t)
        return t

    def eval_array(self, ts: np.ndarray) -> np.ndarray:
        out = np.asarray(ts, dtype=float)
        for let in reversed(self.letters):
            out = let.eval_array(out)
        return out

    def inverse(self) -> "Word":
        return Word([let.inverse() for let in reversed(self.letters)])

    def as_moebius(self) -> MoebiusReal | None:
        prod = MoebiusReal.identity()
        for let in self.letters:
            m = let.as_moebius()
            if m is None:
                return None
            prod = prod @ m
        return prod

    def __repr__(self):
        return f"Word({len(self.letters)} letters)"


def power(f: CircleMap, k: int) -> CircleMap:
    """k-fold composition; negative k composes the inverse."""
    if k == 0:
        return Word([])
    base = f if k > 0 else f.inverse()
    return Word([base] * abs(k))


# ---------------------------------------------------------------------------
# monotonicity certificate


def certify_monotone(f: CircleMap, grid: int = MONOTONE_GRID) -> None:
    """Check degree-one strict monotonicity on a dense grid (plus breakpoints).

    A circular sequence of image values is monotone of degree one exactly
    when it has a single descent, counting the closing wrap-around.
    Matrix actions are monotone by construction and are not re-checked.
    """
    if f.as_moebius() is not None:
        return
    ts = np.linspace(0.0, 1.0, grid, endpoint=False)
    extra = [let.xs for let in getattr(f, "letters", [f]) if isinstance(let, PiecewiseLinear)]
    if isinstance(f, PiecewiseLinear):
        extra.append(f.xs)
    if extra:
        ts = np.unique(np.concatenate([ts] + extra))
    vals = f.eval_array(ts)
    descents = int(np.sum(np.diff(vals) < -_TIE_TOL))
    if vals[0] < vals[-1] - _TIE_TOL:
        descents += 1
    if descents != 1:
        raise NotMonotone(f"{descents} descents on the certification grid (expected 1)")


# ---------------------------------------------------------------------------
# rotation numbers


@dataclass(frozen=True)
class RotationEstimate:
    value: float
    iterations: int
    error_bound: float


def _estimate_from_total(total: float, n: int) -> RotationEstimate:
    return RotationEstimate(value=(total / n) % 1.0, iterations=n, error_bound=2.0 / n)


def rotation_number(f: CircleMap, n: int = 100_000) -> RotationEstimate:
    """Poincare estimate: canonical-lift displacement over n iterates of 0.

    The reported ``error_bound`` 2/n is the conservative a-priori bound
    |lift^n(0)/n - rot(f)| < 2/n valid for every circle homeomorphism.
    """
    if n <= 0:
        raise ValueError("iteration count must be positive")
    m = f.as_moebius()
    if m is not None:
        total = float(_kernels.moebius_lift_totals([m.entries()], n)[0])
        return _estimate_from_total(total, n)
    certify_monotone(f)
    if isinstance(f, PiecewiseLinear):
        return _estimate_from_total(_kernels.pl_lift_total(f.xs, f.ys, n), n)
    t0 = f(0.0)
    t = 0.0
    total = 0.0
    for _ in range(n):
        tp = f(t)
        total += tp - t + (1.0 if tp < t0 else 0.0)
        t = tp
    return _estimate_from_total(total, n)


def rotation_numbers(mats: Sequence[MoebiusReal], n: int) -> list[RotationEstimate]:
    """Batched estimates for matrix actions (single kernel dispatch)."""
    rows = [m.entries() for m in mats]
    totals = _kernels.moebius_lift_totals(rows, n)
    return [_estimate_from_total(float(t), n) for t in totals]


# ---------------------------------------------------------------------------
# Euler cocycle


def euler_cocycle(f: CircleMap, g: CircleMap) -> int:
    """c(f, g) = lift_f(lift_g(0)) - lift_{fg}(0), always 0 or 1.

    With canonical lifts the value counts whether composing wraps past
    the origin once more than the two factors do separately.
    """
    for h in (f, g):
        certify_monotone(h)
    y = g(0.0)
    c = f.lift(y) - f(y)
    ci = int(round(c))
    if ci not in (0, 1) or abs(c - ci) > 1e-9:
        raise ArithmeticError(f"cocycle value {c!r} escaped {{0, 1}}")
    return ci


# ---------------------------------------------------------------------------
# Denjoy blow-up


@dataclass(frozen=True)
class OrbitEntry:
    word: tuple[tuple[int, int], ...]
    position: float
    weight: float
    gap: tuple[float, float]


@dataclass(frozen=True)
class DenjoyLayout:
    """Gap allocation for a finite word ball: where each orbit point's gap sits."""

    entries: tuple[OrbitEntry, ...]
    total_weight: float

    def by_word(self) -> dict[tuple, OrbitEntry]:
        return {e.word: e for e in self.entries}

    def collapse(self, y: float) -> float:
        """Monotone left inverse of the blow-up: squash gaps back to points."""
        y = y % 1.0
        scale = 1.0 - self.total_weight
        acc = 0.0
        for e in sorted(self.entries, key=lambda e: e.position):
            lo, hi = e.gap
            if y < lo:
                break
            if y <= hi:
                return e.position
            acc += e.weight
        return (y - acc) / scale

    def expand(self, x: float) -> float:
        """Image of a non-orbit point; orbit points map to their gap's left end."""
        x = x % 1.0
        scale = 1.0 - self.total_weight
        acc = sum(e.weight for e in self.entries if e.position < x)
        return scale * x + acc


def _reduce_word(word: tuple[tuple[int, int], ...]) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    for let in word:
        if out and out[-1][0] == let[0] and out[-1][1] == -let[1]:
            out.pop()
        else:
            out.append(let)
    return tuple(out)


def _word_ball(n_gens: int, depth: int) -> list[tuple[tuple[int, int], ...]]:
    """Reduced words of length <= depth in breadth-first (then lexicographic) order."""
    ball: list[tuple[tuple[int, int], ...]] = [()]
    frontier: list[tuple[tuple[int, int], ...]] = [()]
    letters = [(i, s) for i in range(n_gens) for s in (1, -1)]
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for let in letters:
                if w and w[0] == (let[0], -let[1]):
                    continue
                nxt.append((let,) + w)
        frontier = nxt
        ball.extend(frontier)
    return ball


def default_gap_weights(count: int, scale: float = 0.5) -> list[float]:
    """scale / ((k+1)(k+2)); sums below ``scale`` for any count."""
    return [scale / ((k + 1) * (k + 2)) for k in range(count)]


def denjoy_blowup(
    generators: Sequence[MoebiusReal],
    orbit_seed: float,
    gap_weights: Sequence[float] | float | None = None,
    depth: int = 5,
) -> list[PiecewiseLinear]:
    """Blow up the word-ball orbit of a seed into gaps; return the induced maps.

    Each orbit point of the reduced word ball of radius ``depth`` receives
    a gap; the returned piecewise-linear generator images carry gap onto
    gap affinely wherever the generator stays inside the ball, so the
    original action is recovered on all matched breakpoints by collapsing
    the gaps.  ``gap_weights`` may be an explicit positive sequence, a
    scale for the default quadratic-decay weights, or None.
    """
    maps, layout = _denjoy_build(generators, orbit_seed, gap_weights, depth)
    return maps


def denjoy_layout(
    generators: Sequence[MoebiusReal],
    orbit_seed: float,
    gap_weights: Sequence[float] | float | None = None,
    depth: int = 5,
) -> DenjoyLayout:
    """The gap allocation used by :func:`denjoy_blowup` with the same arguments."""
    maps, layout = _denjoy_build(generators, orbit_seed, gap_weights, depth)
    return layout


def _denjoy_build(generators, orbit_seed, gap_weights, depth):
    if depth < 1:
        raise ValueError("depth must be at least 1")
    gens = [m if isinstance(m, MoebiusOnRP1) else MoebiusOnRP1(m) for m in generators]
    if not gens:
        return [], DenjoyLayout(entries=(), total_weight=0.0)
    seed = orbit_seed % 1.0
    ball = _word_ball(len(gens), depth)

    inv_gens = [g.inverse() for g in gens]
    points: dict[tuple, float] = {}
    for w in ball:  # BFS order: the suffix w[1:] is always already computed
        if not w:
            points[w] = seed
            continue
        idx, sign = w[0]
        prev = points[w[1:]]
        points[w] = gens[idx](prev) if sign > 0 else inv_gens[idx](prev)
    for w, t in points.items():
        if w and circ_dist(t, seed) <= 1e-9:
            raise StabilizerNotTrivial(f"word of length {len(w)} fixes the seed within 1e-9")
    positions = sorted(points.values())
    for u, v in zip(positions, positions[1:]):
        if v - u <= 1e-12:
            raise StabilizerNotTrivial("distinct ball words collide at the seed orbit")

    if gap_weights is None:
        weights = default_gap_weights(len(ball))
    elif isinstance(gap_weights, (int, float)):
        weights = default_gap_weights(len(ball), float(gap_weights))
    else:
        weights = [float(w) for w in gap_weights[: len(ball)]]
        if len(weights) < len(ball) or any(w <= 0 for w in weights):
            raise ValueError(f"need {len(ball)} positive gap weights")
    total = sum(weights)
    if total >= 1.0:
        raise GapBudgetExceeded(f"gap weights sum to {total} >= 1")
    scale = 1.0 - total

    weight_of = {w: weights[k] for k, w in enumerate(ball)}
    order = sorted(ball, key=lambda w: points[w])
    entries = []
    acc = 0.0
    for w in order:
        lo = scale * points[w] + acc
        entries.append(OrbitEntry(word=w, position=points[w], weight=weight_of[w], gap=(lo, lo + weight_of[w])))
        acc += weight_of[w]
    layout = DenjoyLayout(entries=tuple(entries), total_weight=total)
    gap_of = layout.by_word()

    out_maps = []
    for gi in range(len(gens)):
        constraints = []
        for e in entries:
            target = _reduce_word(((gi, 1),) + e.word)
            if target in gap_of:
                tgap = gap_of[target].gap
                constraints.append((e.gap[0], tgap[0]))
                constraints.append((e.gap[1], tgap[1]))
        constraints.sort()
        xs = [u for u, _ in constraints]
        ys: list[float] = []
        for _, v in constraints:
            if not ys:
                ys.append(v)
            else:
                # smallest lift of the circle value strictly above the last one
                ys.append(v + math.ceil(ys[-1] - v + 1e-15))
        if not xs:
            raise ValueError("depth too small: no gap pair stays inside the ball")
        if not ys[-1] < ys[0] + 1.0:
            raise NotMonotone("blow-up constraints wind more than once")
        out_maps.append(PiecewiseLinear(xs, ys))
    return out_maps, layout

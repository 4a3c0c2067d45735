"""Euler numbers of circle actions over orbifold surfaces, exactly.

A flat circle action over a closed orbifold with cone points is pinned
down, up to the interesting part, by the rotation number at each cone
point (a multiple of the reciprocal cone order) together with an integer
correction ``n``; the fractional Euler number is then ``n`` minus the
sum of the cone rotation numbers.  Pulling back to a manifold cover of
known degree clears denominators, and the resulting integer is subject
to the Milnor-Wood inequality on that cover.  Everything here is exact
Fraction arithmetic -- no floats.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence


class BudgetExceeded(ValueError):
    """Too many unconstrained cone slots to enumerate; pin some of them."""


@dataclass(frozen=True)
class OrbifoldSig:
    """Closed orientable 2-orbifold signature: underlying genus plus cone orders."""

    genus: int
    cone_orders: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "cone_orders", tuple(int(p) for p in self.cone_orders))
        if self.genus < 0:
            raise ValueError("genus must be non-negative")
        if any(p < 2 for p in self.cone_orders):
            raise ValueError("cone orders must be at least 2")

    def euler_char(self) -> Fraction:
        return orbifold_euler_char(self)


def orbifold_euler_char(sig: OrbifoldSig) -> Fraction:
    """2 - 2g minus one (1 - 1/p) defect per cone point."""
    chi = Fraction(2 - 2 * sig.genus)
    for p in sig.cone_orders:
        chi -= 1 - Fraction(1, p)
    return chi


def euler_number(n: int, rots: Sequence[Fraction]) -> Fraction:
    """Fractional Euler number from the integer part and the cone rotation numbers."""
    return Fraction(n) - sum((Fraction(r) for r in rots), Fraction(0))


def lift_euler(e: Fraction, degree: int) -> Fraction:
    """Euler number of the pullback to a cover of the given degree."""
    if degree < 1:
        raise ValueError("cover degree must be positive")
    return Fraction(e) * degree


def milnor_wood_bound(chi: int) -> int:
    """Largest |Euler number| a flat circle bundle over a closed orientable
    surface of Euler characteristic ``chi`` can carry: max(0, -chi)."""
    chi = int(chi)
    if chi > 2 or chi % 2 != 0:
        raise ValueError(f"{chi} is not the Euler characteristic of a closed orientable surface")
    return max(0, -chi)


@dataclass(frozen=True, order=True)
class ConeRotTuple:
    """One feasible (integer part, cone rotation numbers) combination."""

    n: int
    rots: tuple[Fraction, ...]

    def euler_number(self) -> Fraction:
        return euler_number(self.n, self.rots)

    def mirrored(self) -> "ConeRotTuple":
        """The same action with reversed circle orientation."""
        m = sum(1 for r in self.rots if r != 0)
        return ConeRotTuple(n=m - self.n, rots=tuple((1 - r) % 1 for r in self.rots))


def _slot_values(order: int, pin: Fraction | None) -> list[Fraction]:
    if pin is None:
        return [Fraction(k, order) for k in range(order)]
    pin = Fraction(pin) % 1
    if pin.denominator != 1 and order % pin.denominator != 0:
        raise ValueError(f"pinned value {pin} is not a multiple of 1/{order}")
    return [pin]


def _enumerate(sig: OrbifoldSig, degree: int, bound: int, pins: dict[int, Fraction | None], maximal: bool):
    slots = [_slot_values(p, pins.get(i)) for i, p in enumerate(sig.cone_orders)]
    n_window = 1 + len(sig.cone_orders) + (bound + degree - 1) // degree
    out = set()
    for rots in itertools.product(*slots):
        s = sum(rots, Fraction(0))
        for n in range(-n_window, n_window + 1):
            lifted = lift_euler(Fraction(n) - s, degree)
            if lifted.denominator != 1:
                continue
            if abs(lifted) > bound:
                continue
            if maximal and abs(lifted) != bound:
                continue
            out.add(ConeRotTuple(n=n, rots=tuple(rots)))
    return out


def feasible_tuples(
    sig: OrbifoldSig,
    degree: int,
    chi: int,
    fixed: Mapping[int, Fraction] | None = None,
    maximal: bool = False,
) -> list[ConeRotTuple]:
    """All (n, rots) whose lifted Euler number is an integer within the
    Milnor-Wood bound for the degree-``degree`` cover of characteristic ``chi``.

    ``fixed`` pins chosen cone slots to given rotation numbers.  Since
    reversing the circle orientation is always available, every returned
    tuple is accompanied by its mirror (r -> 1-r per slot, with the
    integer part adjusted), even when the mirror violates a literal pin:
    the mirror describes the same action seen through the other
    orientation.  ``maximal`` keeps only tuples attaining the bound
    exactly.  Results come back lexicographically sorted.
    """
    if degree < 1:
        raise ValueError("cover degree must be positive")
    bound = milnor_wood_bound(chi)
    pins: dict[int, Fraction | None] = {}
    if fixed:
        for i, v in fixed.items():
            if not 0 <= i < len(sig.cone_orders):
                raise ValueError(f"no cone slot {i}")
            pins[i] = Fraction(v) % 1
    free = len(sig.cone_orders) - len(pins)
    if free > 3:
        raise BudgetExceeded(f"{free} free cone slots; pin at least {free - 3} of them")

    out = _enumerate(sig, degree, bound, pins, maximal)
    out |= {t.mirrored() for t in out}
    return sorted(out)

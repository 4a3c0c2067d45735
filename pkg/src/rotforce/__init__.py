"""Rotation-number forcing for groups acting on the circle.

Subpackage map:

* ``moebius``   -- determinant-one 2x2 matrices mod sign, hyperbolic trig,
  elliptic rotation numbers, triangle-group representations.
* ``circledyn`` -- circle maps (projective, piecewise-linear, words),
  Poincare rotation-number estimates, the integer Euler cocycle, and
  finite-stage Denjoy blow-ups.
* ``rotarith``  -- arithmetic of rotation numbers: the distance-deformed
  addition, its domain intervals, exact division, and a torus equation
  solver.
* ``eulerorb``  -- exact rational Euler numbers of foliated circle bundles
  over orbifolds and the feasibility enumeration they induce.
* ``quatalg``   -- totally real number fields, quaternion algebras over
  them, archimedean ramification, and arithmetic rotation numbers.
* ``forcing``   -- presentation grammar, constraint propagation over
  rotation-number sets with replayable certificates, outer approximations
  of closed invariant sets, and interval-forcing group emission.
* ``cli``       -- the ``rotforce`` command.
"""

__version__ = "0.1.0"

from . import circledyn, eulerorb, forcing, moebius, quatalg, rotarith, rotset

__all__ = [
    "moebius",
    "circledyn",
    "rotarith",
    "eulerorb",
    "quatalg",
    "forcing",
    "rotset",
    "__version__",
]

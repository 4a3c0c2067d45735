"""Exact real-root machinery for rational polynomials.

Polynomials are tuples of Fractions in ascending order (index = power).
Root counting uses Sturm chains; root locations are rational intervals
that can be bisected to any width.  Everything is exact -- floats never
enter a sign decision.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Coeffs = tuple[Fraction, ...]


def poly(coeffs: Sequence) -> Coeffs:
    """Normalize to a trimmed ascending Fraction tuple."""
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def degree(p: Coeffs) -> int:
    return len(p) - 1


def add(p: Coeffs, q: Coeffs) -> Coeffs:
    n = max(len(p), len(q))
    return poly([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def neg(p: Coeffs) -> Coeffs:
    return tuple(-c for c in p)


def sub(p: Coeffs, q: Coeffs) -> Coeffs:
    return add(p, neg(q))


def mul(p: Coeffs, q: Coeffs) -> Coeffs:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return poly(out)


def scale(p: Coeffs, k) -> Coeffs:
    return poly([Fraction(k) * c for c in p])


def divmod_poly(p: Coeffs, q: Coeffs) -> tuple[Coeffs, Coeffs]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    quo = [Fraction(0)] * max(len(p) - len(q) + 1, 1)
    dq, lead = len(q) - 1, q[-1]
    while len(r) - 1 >= dq and any(c != 0 for c in r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < dq:
            break
        k = len(r) - 1 - dq
        f = r[-1] / lead
        quo[k] = f
        for i, c in enumerate(q):
            r[i + k] -= f * c
        r.pop()
    return poly(quo), poly(r)


def deriv(p: Coeffs) -> Coeffs:
    return poly([i * c for i, c in enumerate(p)][1:])


def eval_at(p: Coeffs, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def eval_interval(p: Coeffs, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Interval-arithmetic range bound of p over [lo, hi] (Horner with interval ops)."""
    alo = ahi = Fraction(0)
    for c in reversed(p):
        cands = (alo * lo, alo * hi, ahi * lo, ahi * hi)
        alo, ahi = min(cands) + c, max(cands) + c
    return alo, ahi


def gcd_poly(p: Coeffs, q: Coeffs) -> Coeffs:
    while q:
        p, q = q, divmod_poly(p, q)[1]
    if p and p[-1] != 0:
        p = scale(p, 1 / p[-1])
    return p


def squarefree_part(p: Coeffs) -> Coeffs:
    g = gcd_poly(p, deriv(p))
    if degree(g) <= 0:
        return p
    return divmod_poly(p, g)[0]


def cauchy_bound(p: Coeffs) -> Fraction:
    """All real roots of p lie strictly inside (-B, B)."""
    if degree(p) < 1:
        return Fraction(1)
    lead = abs(p[-1])
    return 1 + max(abs(c) for c in p[:-1]) / lead


def sturm_chain(p: Coeffs) -> list[Coeffs]:
    chain = [p, deriv(p)]
    while chain[-1]:
        r = divmod_poly(chain[-2], chain[-1])[1]
        if not r:
            break
        chain.append(neg(r))
    return [c for c in chain if c]


def _variations(chain: list[Coeffs], x: Fraction) -> int:
    signs = []
    for c in chain:
        v = eval_at(c, x)
        if v != 0:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(chain: list[Coeffs], lo: Fraction, hi: Fraction) -> int:
    """Distinct real roots in the half-open interval (lo, hi]; p must be squarefree."""
    return _variations(chain, lo) - _variations(chain, hi)


def count_real_roots(p: Coeffs) -> int:
    p = squarefree_part(p)
    b = cauchy_bound(p)
    return count_roots(sturm_chain(p), -b, b)


def isolate_real_roots(p: Coeffs) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals (lo, hi], each holding exactly one real root,
    in ascending order.  p must be squarefree."""
    chain = sturm_chain(p)
    b = cauchy_bound(p)
    out: list[tuple[Fraction, Fraction]] = []

    def split(lo: Fraction, hi: Fraction, count: int):
        if count == 0:
            return
        if count == 1:
            out.append((lo, hi))
            return
        mid = (lo + hi) / 2
        left = count_roots(chain, lo, mid)
        split(lo, mid, left)
        split(mid, hi, count - left)

    split(-b, b, count_roots(chain, -b, b))
    out.sort()
    return out


def refine_root(p: Coeffs, interval: tuple[Fraction, Fraction], eps: Fraction) -> tuple[Fraction, Fraction]:
    """Shrink an isolating interval (lo, hi] below width eps by exact bisection."""
    lo, hi = Fraction(interval[0]), Fraction(interval[1])
    if eval_at(p, hi) == 0:
        return hi, hi
    # lo may sit on a neighboring root; nudge inward until the sign is defined
    flo = eval_at(p, lo)
    while flo == 0:
        lo = lo + (hi - lo) / 1024
        flo = eval_at(p, lo)
    fhi = eval_at(p, hi)
    if (flo > 0) == (fhi > 0):
        raise ValueError("interval does not bracket a sign change of a squarefree polynomial")
    while hi - lo > eps:
        mid = (lo + hi) / 2
        fm = eval_at(p, mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi

"""Hot loops for rotation-number estimation, with two backends.

Everything expensive in this package reduces to iterating a circle
homeomorphism and accumulating displacements of its canonical lift (the
lift whose value at 0 lies in [0, 1)).  The kernels here do exactly that
for the two primitive map kinds:

* projective action of a determinant-one 2x2 matrix on RP^1, and
* a piecewise-linear circle homeomorphism given by lift breakpoints.

Two interchangeable implementations are provided: numba ``@njit`` loops
(the default whenever numba imports cleanly) and a pure-numpy fallback
that vectorizes across a batch of matrices.  Set ``ROTFORCE_NO_NUMBA=1``
before import, or call :func:`set_backend`, to select the fallback.
``benchmarks/bench_kernels.py`` times one against the other.

Displacement convention: for t in [0, 1) one step contributes
``f(t) - t + (1 if f(t) < f(0) else 0)``, which telescopes to the
canonical lift evaluated along the forward orbit of 0.
"""

from __future__ import annotations

import math
import os
import warnings

import numpy as np

_HAVE_NUMBA = False
if not os.environ.get("ROTFORCE_NO_NUMBA"):
    try:
        # the builtin workqueue layer avoids a noisy stale-TBB advisory and
        # is plenty for these kernels; an explicit user setting still wins
        os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", message=".*TBB.*")
            from numba import njit, prange

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass


# ---------------------------------------------------------------------------
# numpy backend


def _moebius_totals_np(mats: np.ndarray, n: int) -> np.ndarray:
    """Lift displacement totals after n steps, vectorized across matrices."""
    mats = np.asarray(mats, dtype=np.float64).reshape(-1, 4)
    a, b, c, d = (mats[:, i] for i in range(4))
    t0 = (np.arctan2(c, a) / np.pi) % 1.0
    t = np.zeros(len(mats))
    total = np.zeros(len(mats))
    for _ in range(n):
        ct = np.cos(np.pi * t)
        st = np.sin(np.pi * t)
        tp = (np.arctan2(c * ct + d * st, a * ct + b * st) / np.pi) % 1.0
        total += tp - t + (tp < t0)
        t = tp
    return total


def _pl_eval_frac_np(xs: np.ndarray, ys: np.ndarray, r: float) -> float:
    """Lift value at r in [0, 1); the curve extends by f(x+1) = f(x)+1."""
    k = len(xs)
    idx = int(np.searchsorted(xs, r, side="right")) - 1
    if idx < 0:
        x0, y0 = xs[k - 1] - 1.0, ys[k - 1] - 1.0
        x1, y1 = xs[0], ys[0]
    elif idx == k - 1:
        x0, y0 = xs[k - 1], ys[k - 1]
        x1, y1 = xs[0] + 1.0, ys[0] + 1.0
    else:
        x0, y0 = xs[idx], ys[idx]
        x1, y1 = xs[idx + 1], ys[idx + 1]
    return y0 + (r - x0) * (y1 - y0) / (x1 - x0)


def _pl_total_np(xs: np.ndarray, ys: np.ndarray, n: int) -> float:
    t0 = _pl_eval_frac_np(xs, ys, 0.0) % 1.0
    t = 0.0
    total = 0.0
    for _ in range(n):
        tp = _pl_eval_frac_np(xs, ys, t) % 1.0
        total += tp - t + (1.0 if tp < t0 else 0.0)
        t = tp
    return total


# ---------------------------------------------------------------------------
# numba backend

if _HAVE_NUMBA:

    @njit(cache=True)
    def _moebius_total_one_nb(a, b, c, d, n):
        t0 = (math.atan2(c, a) / math.pi) % 1.0
        t = 0.0
        total = 0.0
        for _ in range(n):
            ct = math.cos(math.pi * t)
            st = math.sin(math.pi * t)
            tp = (math.atan2(c * ct + d * st, a * ct + b * st) / math.pi) % 1.0
            delta = tp - t
            if tp < t0:
                delta += 1.0
            total += delta
            t = tp
        return total

    @njit(cache=True, parallel=True)
    def _moebius_totals_nb(mats, n):
        m = mats.shape[0]
        out = np.empty(m)
        for i in prange(m):
            out[i] = _moebius_total_one_nb(
                mats[i, 0], mats[i, 1], mats[i, 2], mats[i, 3], n
            )
        return out

    @njit(cache=True)
    def _pl_eval_frac_nb(xs, ys, r):
        k = xs.shape[0]
        idx = np.searchsorted(xs, r, side="right") - 1
        if idx < 0:
            x0 = xs[k - 1] - 1.0
            y0 = ys[k - 1] - 1.0
            x1 = xs[0]
            y1 = ys[0]
        elif idx == k - 1:
            x0 = xs[k - 1]
            y0 = ys[k - 1]
            x1 = xs[0] + 1.0
            y1 = ys[0] + 1.0
        else:
            x0 = xs[idx]
            y0 = ys[idx]
            x1 = xs[idx + 1]
            y1 = ys[idx + 1]
        return y0 + (r - x0) * (y1 - y0) / (x1 - x0)

    @njit(cache=True)
    def _pl_total_nb(xs, ys, n):
        t0 = _pl_eval_frac_nb(xs, ys, 0.0) % 1.0
        t = 0.0
        total = 0.0
        for _ in range(n):
            tp = _pl_eval_frac_nb(xs, ys, t) % 1.0
            delta = tp - t
            if tp < t0:
                delta += 1.0
            total += delta
            t = tp
        return total


# ---------------------------------------------------------------------------
# dispatch

_backend = "numba" if _HAVE_NUMBA else "numpy"


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if _HAVE_NUMBA else ("numpy",)


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in available_backends():
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    _backend = name


def moebius_lift_totals(mats, n: int) -> np.ndarray:
    """Canonical-lift totals after n iterations for a batch of matrices.

    ``mats`` is (m, 4) in (a, b, c, d) order, determinant one.  The
    rotation-number estimate for row i is ``out[i] / n`` reduced mod 1.
    """
    mats = np.ascontiguousarray(np.asarray(mats, dtype=np.float64).reshape(-1, 4))
    if _backend == "numba":
        return _moebius_totals_nb(mats, n)
    return _moebius_totals_np(mats, n)


def pl_lift_total(xs, ys, n: int) -> float:
    """Canonical-lift total after n iterations of a piecewise-linear map."""
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    if _backend == "numba":
        return float(_pl_total_nb(xs, ys, n))
    return _pl_total_np(xs, ys, n)

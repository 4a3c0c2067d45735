"""Tests for circle maps, rotation-number estimates, the Euler cocycle,
and the finite-stage orbit blow-up."""

import math

import numpy as np
import pytest

from rotforce import _kernels
from rotforce.circledyn import (
    GapBudgetExceeded,
    MoebiusOnRP1,
    NotMonotone,
    PiecewiseLinear,
    StabilizerNotTrivial,
    Word,
    certify_monotone,
    circ_dist,
    default_gap_weights,
    denjoy_blowup,
    denjoy_layout,
    euler_cocycle,
    power,
    rotation_number,
    rotation_numbers,
)
from rotforce.moebius import HPoint, MoebiusReal, elliptic_rotation_number, rotation_about

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def test_rigid_rotation_estimate():
    f = MoebiusOnRP1(MoebiusReal.rotation(math.pi * 0.375))
    est = rotation_number(f, 40_000)
    assert abs(est.value - 0.375) <= est.error_bound
    assert est.error_bound == 2.0 / 40_000


def test_parabolic_estimate_is_zero():
    f = MoebiusOnRP1(MoebiusReal.translation(1.0))
    est = rotation_number(f, 50_000)
    assert min(est.value, 1.0 - est.value) <= est.error_bound


def test_hyperbolic_estimate_is_zero():
    f = MoebiusOnRP1(MoebiusReal.dilation(1.3))
    est = rotation_number(f, 20_000)
    assert min(est.value, 1.0 - est.value) <= est.error_bound


def test_estimate_matches_closed_form_elliptic():
    rng = np.random.default_rng(101)
    n = 50_000
    for _ in range(20):
        p = HPoint(float(rng.normal()), float(np.exp(rng.normal() * 0.5)))
        theta = float(rng.uniform(0.05, 0.95))
        m = rotation_about(p, theta)
        est = rotation_number(MoebiusOnRP1(m), n)
        assert circ_dist(est.value, elliptic_rotation_number(m)) < est.error_bound


def test_batched_estimates_match_single():
    rng = np.random.default_rng(103)
    mats = [rotation_about(HPoint(0.1, 1.0 + k * 0.1), 0.2 + 0.05 * k) for k in range(5)]
    batch = rotation_numbers(mats, 10_000)
    for m, est in zip(mats, batch):
        single = rotation_number(MoebiusOnRP1(m), 10_000)
        assert abs(est.value - single.value) < 1e-12


def test_backends_agree():
    mats = [rotation_about(HPoint(0.0, 1.0), 1.0 / math.sqrt(2.0))]
    rows = [m.entries() for m in mats]
    totals = {}
    orig = _kernels.backend()
    try:
        for backend in _kernels.available_backends():
            _kernels.set_backend(backend)
            totals[backend] = float(_kernels.moebius_lift_totals(rows, 5_000)[0])
    finally:
        _kernels.set_backend(orig)
    vals = list(totals.values())
    assert max(vals) - min(vals) < 1e-9


def test_piecewise_linear_rotation():
    # a PL circle map conjugate to the rigid third rotation
    xs = [0.0, 1.0 / 3.0, 2.0 / 3.0]
    ys = [1.0 / 3.0, 2.0 / 3.0, 1.0]
    f = PiecewiseLinear(xs, ys)
    est = rotation_number(f, 30_000)
    assert circ_dist(est.value, 1.0 / 3.0) <= est.error_bound


def test_piecewise_linear_rejects_folds_at_construction():
    with pytest.raises(NotMonotone):
        PiecewiseLinear([0.0, 0.25, 0.5, 0.75], [0.1, 0.6, 0.3, 0.9])
    with pytest.raises(NotMonotone):
        PiecewiseLinear([0.0, 0.5, 0.25], [0.1, 0.3, 0.6])


def test_certify_monotone_rejects_folding_callable():
    from rotforce.circledyn import CircleMap

    class Fold(CircleMap):
        def __call__(self, t):
            return (t + 0.3 * math.sin(4.0 * math.pi * t)) % 1.0

    with pytest.raises(NotMonotone):
        certify_monotone(Fold())
    with pytest.raises(NotMonotone):
        rotation_number(Fold(), 100)


def test_word_composition_and_inverse():
    f = MoebiusOnRP1(MoebiusReal.rotation(0.3))
    g = MoebiusOnRP1(MoebiusReal.dilation(0.7))
    w = Word([f, g])
    for t in (0.0, 0.21, 0.77):
        assert abs(w(t) - f(g(t))) < 1e-14
    wi = w.inverse()
    for t in (0.1, 0.5, 0.9):
        assert circ_dist(wi(w(t)), t) < 1e-12


def test_word_as_moebius_products():
    a = MoebiusReal.rotation(0.4)
    b = MoebiusReal.dilation(1.1)
    w = Word([MoebiusOnRP1(a), MoebiusOnRP1(b)])
    prod = w.as_moebius()
    want = a @ b
    assert max(abs(x - y) for x, y in zip(prod.entries(), want.entries())) < 1e-12
    assert Word([]).as_moebius().is_identity()


def test_power_negative_and_zero():
    f = MoebiusOnRP1(MoebiusReal.rotation(math.pi * 0.125))
    assert abs(power(f, 0)(0.3) - 0.3) < 1e-15
    assert circ_dist(power(f, 3)(0.1), f(f(f(0.1)))) < 1e-13
    assert circ_dist(power(f, -2)(power(f, 2)(0.1)), 0.1) < 1e-12


def test_euler_cocycle_values_and_identity():
    rng = np.random.default_rng(107)
    maps = []
    for _ in range(12):
        p = HPoint(float(rng.normal()), float(np.exp(rng.normal() * 0.4)))
        maps.append(MoebiusOnRP1(rotation_about(p, float(rng.uniform(0.02, 0.98)))))
    for _ in range(300):
        f, g, h = (maps[i] for i in rng.integers(0, len(maps), 3))
        cf = euler_cocycle(f, g)
        assert cf in (0, 1)
        # cocycle identity: c(f,g) + c(fg,h) = c(g,h) + c(f,gh)
        lhs = cf + euler_cocycle(Word([f, g]), h)
        rhs = euler_cocycle(g, h) + euler_cocycle(f, Word([g, h]))
        assert lhs == rhs


def test_euler_cocycle_rigid_rotations():
    f = MoebiusOnRP1(MoebiusReal.rotation(math.pi * 0.6))
    g = MoebiusOnRP1(MoebiusReal.rotation(math.pi * 0.7))
    # 0.6 + 0.7 wraps once past the origin
    assert euler_cocycle(f, g) == 1
    h = MoebiusOnRP1(MoebiusReal.rotation(math.pi * 0.1))
    assert euler_cocycle(h, h) == 0


# ---------------------------------------------------------------------------
# blow-ups


def _golden_generator():
    return rotation_about(HPoint(0.0, 1.0), GOLDEN)


def test_default_gap_weights_budget():
    w = default_gap_weights(10_000)
    assert all(x > 0 for x in w)
    assert sum(w) < 0.5


def test_blowup_rotation_number_preserved():
    maps = denjoy_blowup([_golden_generator()], 0.1, depth=200)
    est = rotation_number(maps[0], 10_000)
    assert circ_dist(est.value, GOLDEN) <= est.error_bound + 1e-9


def test_blowup_gaps_disjoint_and_budgeted():
    layout = denjoy_layout([_golden_generator()], 0.1, depth=120)
    assert layout.total_weight < 1.0
    gaps = sorted(e.gap for e in layout.entries)
    for (alo, ahi), (blo, bhi) in zip(gaps, gaps[1:]):
        assert ahi < blo
    assert all(e.weight > 0 for e in layout.entries)


def test_blowup_collapse_round_trip():
    layout = denjoy_layout([_golden_generator()], 0.1, depth=60)
    rng = np.random.default_rng(109)
    for x in rng.uniform(0.0, 1.0, 200):
        y = layout.expand(float(x))
        assert abs(layout.collapse(y) - float(x)) < 1e-12


def test_blowup_semiconjugate_on_matched_points():
    gen = _golden_generator()
    maps = denjoy_blowup([gen], 0.1, depth=80)
    layout = denjoy_layout([gen], 0.1, depth=80)
    f = MoebiusOnRP1(gen)
    by_word = layout.by_word()
    for word, entry in by_word.items():
        succ = ((0, 1),) + word
        if len(word) >= 80 or succ not in by_word:
            continue
        lo, hi = entry.gap
        img_lo = maps[0](lo)
        assert circ_dist(img_lo, by_word[succ].gap[0]) < 1e-10


def test_blowup_two_generators_monotone():
    g1 = rotation_about(HPoint(0.3, 1.2), 1.0 / math.sqrt(2.0))
    g2 = MoebiusReal.dilation(0.8)
    maps = denjoy_blowup([g1, g2], 0.05, depth=3)
    for f in maps:
        certify_monotone(f)


def test_blowup_detects_torsion():
    A, B, _ = __import__("rotforce.moebius", fromlist=["triangle_group_rep"]).triangle_group_rep(2, 3, 7)
    with pytest.raises(StabilizerNotTrivial):
        denjoy_blowup([A, B], 0.1, depth=7)


def test_blowup_gap_budget_enforced():
    with pytest.raises(GapBudgetExceeded):
        denjoy_blowup([_golden_generator()], 0.1, gap_weights=[0.5, 0.5, 0.2], depth=1)


def test_blowup_rejects_bad_depth():
    with pytest.raises(ValueError):
        denjoy_blowup([_golden_generator()], 0.1, depth=0)

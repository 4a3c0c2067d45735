"""Tests for the presentation grammar, the rotation-set propagation engine,
its certificates, outer approximation, and interval-group synthesis."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from rotforce.forcing import (
    Certificate,
    InvalidCoverGenerator,
    NotRepresentable,
    Presentation,
    PresentationSyntaxError,
    UnassignedGenerator,
    UnknownGenerator,
    Word,
    _merged_power,
    check_relations,
    emit_interval_group,
    eval_word,
    middle_thirds_cantor,
    outer_approximation,
    parse_presentation,
    print_presentation,
    propagate,
    replay_certificate,
)
from rotforce.circledyn import MoebiusOnRP1
from rotforce.moebius import HPoint, rotation_about, triangle_group_rep
from rotforce.rotarith import domain_interval
from rotforce.rotset import RotSet

F = Fraction

UNIT_TANGENT = """
gens A, B, C, T, X, Y, Z
rels A^2 = T, B^3 = T, C^7 = T, A B C = T
conj (X: A -> A^2)
conj (Y: B -> B^2)
conj (Z: C -> C^2)
mark A, B, C
"""

TRIANGLE_COVER = """
gens A, B, C
rels A B C = 1
torsion A:2, B:3, C:7
orbifold sig=0;2,3,7 degree=168 coverchi=-4 map A:1 map B:2 map C:3
mark C
"""

GENUS_ONE = """
gens alpha, gamma
rels alpha = gamma^2
torsion gamma:5
orbifold sig=1;5 degree=10 coverchi=-8 maximal map gamma:1
mark alpha
"""


# ---------------------------------------------------------------------------
# words


def test_word_parse_and_str():
    w = Word.parse("A B^-1 C^3")
    assert w.letters == (("A", 1), ("B", -1), ("C", 3))
    assert str(w) == "A B^-1 C^3"
    assert Word.parse(str(w)) == w
    assert Word.parse("1") == Word(())
    assert str(Word(())) == "1"


def test_word_inverse_and_gens():
    w = Word.parse("A B^2")
    assert w.inverse() == Word.parse("B^-2 A^-1")
    assert w.gens() == {"A", "B"}
    assert Word(()).inverse() == Word(())


def test_word_parse_errors():
    with pytest.raises(PresentationSyntaxError):
        Word.parse("A^x")
    with pytest.raises(PresentationSyntaxError):
        Word.parse("3bad")
    with pytest.raises(PresentationSyntaxError):
        Word.parse("A^0")


def test_merged_power_reduction():
    assert _merged_power(Word.parse("A A")) == ("A", 2)
    assert _merged_power(Word.parse("A^3 A^-1")) == ("A", 2)
    assert _merged_power(Word.parse("X A^2 X^-1")) == ("A", 2)
    assert _merged_power(Word.parse("X Y A Y^-1 X^-1")) == ("A", 1)
    assert _merged_power(Word.parse("A B")) is None
    assert _merged_power(Word(())) is None


# ---------------------------------------------------------------------------
# grammar


def test_parse_round_trip():
    for text in (UNIT_TANGENT, TRIANGLE_COVER, GENUS_ONE):
        p = parse_presentation(text)
        assert parse_presentation(print_presentation(p)) == p


def test_parse_reports_statement_index():
    with pytest.raises(PresentationSyntaxError) as ei:
        parse_presentation("gens a\ntorsion a:0")
    assert "statement 2" in str(ei.value)
    with pytest.raises(UnknownGenerator) as ei2:
        parse_presentation("gens a\nmark a\npin b: 0")
    assert "statement 3" in str(ei2.value)


def test_parse_unknown_generator():
    with pytest.raises(UnknownGenerator):
        parse_presentation("gens a; rels a b = 1")
    with pytest.raises(UnknownGenerator):
        parse_presentation("gens a; mark b")
    with pytest.raises(UnknownGenerator):
        parse_presentation("gens a; torsion b:3")


def test_parse_semicolon_inside_comment():
    p = parse_presentation("gens a  # note; includes a semicolon\ntorsion a:3")
    assert p.torsions == (("a", 3),)


def test_parse_orbifold_fields():
    p = parse_presentation(TRIANGLE_COVER)
    (orb,) = p.orbifolds
    assert orb.sig.genus == 0 and orb.sig.cone_orders == (2, 3, 7)
    assert orb.degree == 168 and orb.cover_chi == -4
    assert orb.maximal is False
    assert dict(orb.cone_map) == {"A": 0, "B": 1, "C": 2}
    q = parse_presentation(GENUS_ONE)
    assert q.orbifolds[0].maximal is True


def test_parse_dial_and_pin_values():
    p = parse_presentation("gens a, nu; dial nu:3 controls a; pin a: 0, 1/4; mark a")
    (d,) = p.dials
    assert d.name == "nu" and d.order == 3 and d.controls == ("a",)
    assert p.pins == (("a", (F(0), F(1, 4))),)


# ---------------------------------------------------------------------------
# evaluation against actual circle maps


def _triangle_assignment():
    ma, mb, mc = triangle_group_rep(2, 3, 7)
    return {"A": MoebiusOnRP1(ma), "B": MoebiusOnRP1(mb), "C": MoebiusOnRP1(mc)}


def test_eval_word_composes_moebius():
    rep = _triangle_assignment()
    m = eval_word(Word.parse("A B"), rep)
    x = 0.123
    assert math.isclose(m(x), rep["A"](rep["B"](x)), abs_tol=1e-12)
    with pytest.raises(UnassignedGenerator):
        eval_word(Word.parse("Q"), rep)


def test_check_relations_triangle_rep():
    # the triangle rep satisfies A^2 = B^3 = C^7 = ABC = 1
    q = Presentation(
        generators=("A", "B", "C"),
        relators=(
            (Word.parse("A^2"), Word(())),
            (Word.parse("B^3"), Word(())),
            (Word.parse("C^7"), Word(())),
            (Word.parse("A B C"), Word(())),
        ),
    )
    report = check_relations(q, _triangle_assignment())
    assert report.all_passed
    assert max(c.residual for c in report.checks) < 1e-9


def test_check_relations_detects_failure():
    p = Presentation(generators=("a",), relators=((Word.parse("a"), Word(())),))
    rep = {"a": MoebiusOnRP1(rotation_about(HPoint(0.0, 1.0), 0.3))}
    report = check_relations(p, rep)
    assert not report.all_passed


# ---------------------------------------------------------------------------
# propagation flagships


def test_unit_tangent_extension_forces_zero():
    r = propagate(parse_presentation(UNIT_TANGENT))
    for g in ("A", "B", "C"):
        assert r.marked[g].is_zero_only()
    assert replay_certificate(parse_presentation(UNIT_TANGENT), r.certificate)


def test_triangle_cover_forces_sevenths():
    r = propagate(parse_presentation(TRIANGLE_COVER))
    assert r.marked["C"] == RotSet.from_points([F(1, 7)])
    assert set(r.marked["C"].point_values()) == {F(0), F(1, 7), F(6, 7)}


def test_genus_one_cover_forces_two_fifths():
    r = propagate(parse_presentation(GENUS_ONE))
    assert set(r.marked["alpha"].point_values()) == {F(0), F(2, 5), F(3, 5)}


def test_certificates_replay_and_detect_tampering():
    p = parse_presentation(TRIANGLE_COVER)
    r = propagate(p)
    assert replay_certificate(p, r.certificate)
    entries = r.certificate.entries
    assert entries  # nontrivial derivation
    tampered = Certificate(entries=entries[:-1])
    assert not replay_certificate(p, tampered)
    e = entries[0]
    swapped = Certificate(
        entries=(type(e)(e.index, e.rule, e.premises, e.generator, RotSet.full()),)
        + entries[1:]
    )
    assert not replay_certificate(p, swapped)


def test_certificate_json_shape():
    r = propagate(parse_presentation(TRIANGLE_COVER))
    doc = r.to_json()
    assert doc["marked"]["C"]["points"] == ["0", "1/7", "6/7"]
    assert doc["marked"]["C"]["intervals"] == []
    for entry in doc["certificate"]:
        assert set(entry) == {"index", "rule", "premises", "generator", "result"}
    json.dumps(doc)  # serializable as-is


def test_commuting_product_adds_rotation_numbers():
    p = parse_presentation(
        "gens a, b, c; commute (a, b); rels a b = c; pin a: 1/4; pin b: 1/6; mark c"
    )
    r = propagate(p)
    expected = {F(0), F(1, 12), F(1, 6), F(1, 4), F(5, 12), F(7, 12), F(3, 4), F(5, 6), F(11, 12)}
    assert set(r.marked["c"].point_values()) == expected


def test_propagation_is_monotone_in_annotations():
    base = parse_presentation("gens a, b; rels a = b^2; torsion b:6; mark a, b")
    more = parse_presentation(
        "gens a, b; rels a = b^2; torsion b:6; pin b: 0, 1/6; mark a, b"
    )
    r0, r1 = propagate(base), propagate(more)
    for g in ("a", "b"):
        assert r1.marked[g].is_subset(r0.marked[g])
        assert r0.marked[g].contains(0)


def test_outputs_always_symmetric_and_contain_zero():
    rng = np.random.default_rng(431)
    for _ in range(10):
        q = int(rng.integers(2, 9))
        p = parse_presentation(f"gens g; torsion g:{q}; mark g")
        s = propagate(p).marked["g"]
        assert s.contains(0)
        for v in s.point_values():
            assert s.contains(-F(v) % 1)


def test_dial_branches():
    p = parse_presentation(
        "gens a, nu; dial nu:3 controls a; pin a: 0, 1/4; mark a"
    )
    r = propagate(p)
    branches = r.dials["nu"]
    assert set(branches) == {"0", "1/3", "2/3"}
    assert branches["0"]["a"].is_zero_only()
    assert branches["1/3"]["a"] == RotSet.from_points([F(1, 4)])
    assert "dials" in r.to_json()


def test_exclusion_annotation_restricts_to_complement():
    p = parse_presentation("gens g; exclude g: l=1.0 theta=0.25; mark g")
    s = propagate(p).marked["g"]
    di = domain_interval(1.0, 0.25)
    # the open domain arc runs ccw from di.lo through 0 to di.hi; the set
    # keeps {0} plus the symmetrized closed complement [di.hi, di.lo]
    assert s.contains(0)
    assert not s.contains(0.5 * min(di.hi, 1.0 - di.lo))  # deep in the gap near 0
    assert not s.contains(1.0 - 0.5 * min(di.hi, 1.0 - di.lo))
    assert s.contains(di.hi, tol=1e-12) and s.contains(di.lo, tol=1e-12)
    assert s.contains(0.5 * (di.hi + di.lo), tol=1e-12)


# ---------------------------------------------------------------------------
# interval-group synthesis


@pytest.mark.parametrize(
    "arc",
    [
        (0.3, 0.42),
        (0.25, 0.25),
        (0.1, 0.9),
        (F(1, 3), F(2, 5)),
    ],
)
def test_emit_interval_group_round_trip(arc):
    p = emit_interval_group(arc)
    (g,) = p.marked
    s = propagate(p).marked[g]
    target = RotSet.build(points=[0], intervals=[(float(arc[0]), float(arc[1]))])
    lo, hi = float(arc[0]), float(arc[1])
    mids = [lo + t * ((hi - lo) % 1.0 or 0.0) for t in (0.0, 0.37, 1.0)]
    for m in mids:
        assert s.contains(m, tol=2**-11)
    # nothing far outside the symmetrized target sneaks in
    for lo2, hi2 in s.intervals:
        assert target.contains(0.5 * (float(lo2) + float(hi2)), tol=2**-10)


def test_emit_interval_group_rejects_zero_touching():
    with pytest.raises(NotRepresentable):
        emit_interval_group((0.0, 1.0))
    with pytest.raises(NotRepresentable):
        emit_interval_group((1e-15, 0.3))


def test_emit_interval_group_skeleton_shape():
    p = emit_interval_group((0.3, 0.4))
    assert set(p.generators) == {"Gamma", "alpha", "alphap", "beta", "gamma", "mu"}
    assert p.marked == ("gamma",)
    assert p.excludes and p.excludes[0][0] == "gamma"
    # the exclusion parameters reproduce the requested arc as the complement
    _, l, theta = p.excludes[0]
    di = domain_interval(l, theta)
    assert min(abs(di.hi - 0.3), abs(di.hi - 0.3 + 1), abs(di.hi - 0.3 - 1)) < 2**-12
    assert min(abs(di.lo - 0.4), abs(di.lo - 0.4 + 1), abs(di.lo - 0.4 - 1)) < 2**-12


# ---------------------------------------------------------------------------
# outer approximation


def test_middle_thirds_cantor_exact():
    ivs = middle_thirds_cantor(3)
    assert len(ivs) == 8
    assert ivs[0] == (F(0), F(1, 27))
    assert ivs[-1] == (F(26, 27), F(1))
    assert all(hi - lo == F(1, 27) for lo, hi in ivs)
    assert middle_thirds_cantor(0) == [(F(0), F(1))]


def test_outer_approximation_nesting_and_snapping():
    stages = outer_approximation([(F(1, 4), F(1, 3))], 4)
    assert len(stages) == 4
    for a, b in zip(stages, stages[1:]):
        assert b.is_subset(a)
    for i, s in enumerate(stages, start=1):
        assert s.contains(F(1, 4)) and s.contains(F(1, 3)) and s.contains(0)
        for lo, hi in s.intervals:
            assert lo.denominator <= 2 ** (i + 4)
            assert hi.denominator <= 2 ** (i + 4)


def test_outer_approximation_point_target():
    stages = outer_approximation([(F(1, 3), F(1, 3))], 3)
    for i, s in enumerate(stages, start=1):
        assert s.contains(F(1, 3))
        for lo, hi in s.intervals:
            if lo <= F(1, 3) <= hi:
                assert hi - lo <= 2 * Fraction(1, 2 ** (i + 4))


def test_outer_approximation_cantor_counts():
    stages = outer_approximation(lambda i: middle_thirds_cantor(i), 8)
    s8 = stages[-1]
    assert len(s8.intervals) == 120
    for lo, hi in s8.intervals:
        assert lo.denominator <= 2**12 and hi.denominator <= 2**12


def test_outer_approximation_rejects_bad_covers():
    with pytest.raises(InvalidCoverGenerator):
        outer_approximation([(F(1, 3), F(1, 4))], 2)  # reversed
    # a "cover generator" that jumps to a disjoint location breaks nesting
    # (the new location must not be the mirror image of the old one)
    with pytest.raises(InvalidCoverGenerator):
        outer_approximation(
            lambda i: [(F(1, 4), F(1, 3))] if i == 1 else [(F(9, 20), F(11, 20))], 2
        )
    with pytest.raises(ValueError):
        outer_approximation([(F(1, 4), F(1, 3))], 0)

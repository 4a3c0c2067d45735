"""Group presentations, relation checking, and rotation-number forcing.

The centerpiece is :func:`propagate`: starting from the full circle for
every generator, it applies a fixed list of sound rules -- conjugacy
invariance, rot(g^n) = n rot(g), the Baumslag-Solitar collapse, addition
for commuting products, torsion, orbifold Euler-number feasibility, and
interval exclusion -- until nothing shrinks, recording each derivation
step in a replayable certificate.  The outputs are over-approximations:
every genuine circle action realizes rotation numbers inside them, and
on the presentations this package targets they are exact.

Also here: nested outer approximations of closed symmetric sets by
dyadically-snapped interval covers, and the synthesis of a presentation
whose marked generator is forced into {0} plus/minus a requested arc.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import circledyn
from .circledyn import CircleMap, circ_dist
from .eulerorb import OrbifoldSig, feasible_tuples
from .rotarith import domain_interval
from .rotset import RotSet, rotset_intersect, rotset_symmetrize, rotset_union

__all__ = [
    "Word",
    "Presentation",
    "OrbifoldData",
    "DialData",
    "parse_presentation",
    "print_presentation",
    "eval_word",
    "check_relations",
    "RelationReport",
    "propagate",
    "PropagationResult",
    "Certificate",
    "CertEntry",
    "replay_certificate",
    "Inconsistent",
    "outer_approximation",
    "middle_thirds_cantor",
    "InvalidCoverGenerator",
    "emit_interval_group",
    "NotRepresentable",
    "PresentationSyntaxError",
    "UnknownGenerator",
    "UnassignedGenerator",
    "RotSet",
    "rotset_union",
    "rotset_intersect",
    "rotset_symmetrize",
]


class PresentationSyntaxError(ValueError):
    """Malformed presentation text; message carries the statement index."""


class UnknownGenerator(ValueError):
    """A statement references a generator that was never declared."""


class UnassignedGenerator(ValueError):
    """Word evaluation hit a generator missing from the assignment."""


class Inconsistent(ValueError):
    """Propagation derived an empty set: the annotations admit no action at all."""


class InvalidCoverGenerator(ValueError):
    """An outer-approximation stage failed to nest inside the previous one."""


class NotRepresentable(ValueError):
    """No excluded-interval parameters realize the requested arc."""


# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Word:
    """A formal product of generator powers; the empty word is the identity."""

    letters: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if any(e == 0 for _, e in self.letters):
            raise ValueError("zero exponents are not allowed in words")

    @classmethod
    def parse(cls, text: str) -> "Word":
        text = text.strip()
        if text in ("", "1"):
            return cls(())
        letters = []
        for tok in text.split():
            name, _, exp = tok.partition("^")
            if not name.isidentifier():
                raise PresentationSyntaxError(f"bad generator token {tok!r}")
            if exp:
                try:
                    e = int(exp)
                except ValueError:
                    raise PresentationSyntaxError(f"bad exponent in {tok!r}") from None
            else:
                e = 1
            if e == 0:
                raise PresentationSyntaxError(f"zero exponent in {tok!r}")
            letters.append((name, e))
        return cls(tuple(letters))

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.letters)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def gens(self) -> set[str]:
        return {g for g, _ in self.letters}


def _merged_power(w: Word) -> tuple[str, int] | None:
    """(g, n) when the word reduces to a pure power of one generator, stripping
    any conjugating dressing u g^n u^-1; None otherwise."""
    letters = list(w.letters)
    # merge adjacent same-generator letters
    merged: list[tuple[str, int]] = []
    for g, e in letters:
        if merged and merged[-1][0] == g:
            e2 = merged[-1][1] + e
            merged.pop()
            if e2 != 0:
                merged.append((g, e2))
        else:
            merged.append((g, e))
    # strip matched conjugation: first letter inverse of last
    while len(merged) >= 3 and merged[0][0] == merged[-1][0] and merged[0][1] == -merged[-1][1]:
        merged = merged[1:-1]
        # re-merge the new ends
        i = 0
        while i + 1 < len(merged):
            if merged[i][0] == merged[i + 1][0]:
                e2 = merged[i][1] + merged[i + 1][1]
                merged[i : i + 2] = [(merged[i][0], e2)] if e2 else []
                i = max(i - 1, 0)
            else:
                i += 1
    if len(merged) == 1:
        return merged[0]
    if not merged:
        return None
    return None


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class OrbifoldData:
    """Orbifold-subgroup annotation: signature, manifold-cover degree and
    Euler characteristic, whether the Euler class is maximal, and which
    generator realizes which cone point (slots are 1-based in the grammar,
    0-based here)."""

    sig: OrbifoldSig
    degree: int
    cover_chi: int
    maximal: bool
    cone_map: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class DialData:
    """An order-n dial element; when its rotation number is 0 the controlled
    generators are forced trivial."""

    name: str
    order: int
    controls: tuple[str, ...]


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[tuple[Word, Word], ...] = ()
    commutes: tuple[tuple[str, str], ...] = ()
    conjs: tuple[tuple[str, Word, Word], ...] = ()  # (x, h, h2): x h x^-1 = h2
    torsions: tuple[tuple[str, int], ...] = ()
    orbifolds: tuple[OrbifoldData, ...] = ()
    dials: tuple[DialData, ...] = ()
    pins: tuple[tuple[str, tuple], ...] = ()  # (g, rotation values)
    excludes: tuple[tuple[str, float, float], ...] = ()  # (g, l, theta)
    marked: tuple[str, ...] = ()


_KEYWORDS = (
    "gens",
    "rels",
    "commute",
    "conj",
    "torsion",
    "orbifold",
    "dial",
    "mark",
    "pin",
    "exclude",
)


def _statements(text: str) -> list[str]:
    """Split on ';' and newlines; fragments that do not start with a keyword
    are glued back onto the previous statement (so `sig=0;2,3,7` survives)."""
    out: list[str] = []
    for line in text.splitlines():
        for frag in line.split("#", 1)[0].split(";"):
            frag = frag.strip()
            if not frag:
                continue
            head = frag.split(None, 1)[0]
            if head in _KEYWORDS or not out:
                out.append(frag)
            else:
                out[-1] = out[-1] + ";" + frag
    return out


def _parse_value(tok: str):
    tok = tok.strip()
    if "/" in tok:
        return Fraction(tok)
    try:
        return Fraction(int(tok))
    except ValueError:
        return float(tok)


def parse_presentation(text: str) -> Presentation:
    """Parse the line-oriented presentation grammar.

    Statements end at ';' or newline: ``gens A,B,C``, ``rels A^2 = T, A B C = T``,
    ``commute (a,b)``, ``conj (x: h -> h2)`` (x h x^-1 = h2, h/h2 words),
    ``torsion C:7``, ``orbifold sig=0;2,3,7 degree=168 coverchi=-4 [maximal]
    map C:3`` (cone slots 1-based), ``dial nu:3 [controls a,b]``,
    ``pin g: 0,1/4``, ``exclude g: l=1.0 theta=0.25``, ``mark C``.
    The token ``1`` is the empty word.
    """
    stmts = _statements(text)
    gens: list[str] = []
    for stmt in stmts:
        head, _, rest = stmt.partition(" ")
        if head == "gens":
            names = [n.strip() for n in rest.split(",") if n.strip()]
            if not names:
                raise PresentationSyntaxError("empty generator list")
            for n in names:
                if not n.isidentifier():
                    raise PresentationSyntaxError(f"bad generator name {n!r}")
            gens.extend(n for n in names if n not in gens)
    if not gens:
        raise PresentationSyntaxError("no 'gens' statement")
    known = set(gens)

    def need(name: str, where: str) -> str:
        if name not in known:
            raise UnknownGenerator(f"{name!r} in {where!r} was never declared")
        return name

    def parse_word(src: str, where: str) -> Word:
        w = Word.parse(src)
        for g in w.gens():
            need(g, where)
        return w

    relators: list[tuple[Word, Word]] = []
    commutes: list[tuple[str, str]] = []
    conjs: list[tuple[str, Word, Word]] = []
    torsions: list[tuple[str, int]] = []
    orbifolds: list[OrbifoldData] = []
    dials: list[DialData] = []
    pins: list[tuple[str, tuple]] = []
    excludes: list[tuple[str, float, float]] = []
    marked: list[str] = []

    for idx, stmt in enumerate(stmts):
        head, _, rest = stmt.partition(" ")
        rest = rest.strip()
        try:
            if head == "gens":
                continue
            elif head == "rels":
                for part in rest.split(","):
                    if part.count("=") != 1:
                        raise PresentationSyntaxError(f"relator needs one '=': {part!r}")
                    lhs, rhs = part.split("=")
                    relators.append((parse_word(lhs, part), parse_word(rhs, part)))
            elif head == "commute":
                m = re.fullmatch(r"\(\s*(\w+)\s*,\s*(\w+)\s*\)", rest)
                if not m:
                    raise PresentationSyntaxError(f"expected 'commute (a,b)': {stmt!r}")
                commutes.append((need(m.group(1), stmt), need(m.group(2), stmt)))
            elif head == "conj":
                m = re.fullmatch(r"\(\s*(\w+)\s*:\s*(.+?)\s*->\s*(.+?)\s*\)", rest)
                if not m:
                    raise PresentationSyntaxError(f"expected 'conj (x: h -> h2)': {stmt!r}")
                conjs.append(
                    (need(m.group(1), stmt), parse_word(m.group(2), stmt), parse_word(m.group(3), stmt))
                )
            elif head == "torsion":
                for part in rest.split(","):
                    name, _, order = part.partition(":")
                    q = int(order)
                    if q < 1:
                        raise PresentationSyntaxError(f"torsion order must be >= 1: {part!r}")
                    torsions.append((need(name.strip(), stmt), q))
            elif head == "orbifold":
                orbifolds.append(_parse_orbifold(rest, need))
            elif head == "dial":
                dials.append(_parse_dial(rest, need))
            elif head == "pin":
                name, _, vals = rest.partition(":")
                values = tuple(_parse_value(v) for v in vals.split(",") if v.strip())
                if not values:
                    raise PresentationSyntaxError(f"pin needs at least one value: {stmt!r}")
                pins.append((need(name.strip(), stmt), values))
            elif head == "exclude":
                name, _, params = rest.partition(":")
                kv = dict(re.findall(r"(\w+)\s*=\s*([^\s]+)", params))
                if set(kv) != {"l", "theta"}:
                    raise PresentationSyntaxError(f"expected 'exclude g: l=.. theta=..': {stmt!r}")
                excludes.append((need(name.strip(), stmt), float(kv["l"]), float(kv["theta"])))
            elif head == "mark":
                for n in rest.split(","):
                    n = n.strip()
                    if n:
                        marked.append(need(n, stmt))
            else:
                raise PresentationSyntaxError(f"unknown statement {head!r}")
        except (PresentationSyntaxError, UnknownGenerator) as exc:
            raise type(exc)(f"statement {idx + 1}: {exc}") from None
    return Presentation(
        generators=tuple(gens),
        relators=tuple(relators),
        commutes=tuple(commutes),
        conjs=tuple(conjs),
        torsions=tuple(torsions),
        orbifolds=tuple(orbifolds),
        dials=tuple(dials),
        pins=tuple(pins),
        excludes=tuple(excludes),
        marked=tuple(marked),
    )


def _parse_orbifold(rest: str, need) -> OrbifoldData:
    toks = rest.split()
    genus = None
    orders: tuple[int, ...] = ()
    degree = cover_chi = None
    maximal = False
    cone_map: list[tuple[str, int]] = []
    i = 0
    while i < len(toks):
        tok = toks[i]
        if tok.startswith("sig="):
            sig_v = tok[4:]
            g_part, _, o_part = sig_v.partition(";")
            genus = int(g_part)
            orders = tuple(int(x) for x in o_part.split(",") if x) if o_part else ()
        elif tok.startswith("degree="):
            degree = int(tok[7:])
        elif tok.startswith("coverchi="):
            cover_chi = int(tok[9:])
        elif tok == "maximal":
            maximal = True
        elif tok == "map":
            i += 1
            if i >= len(toks):
                raise PresentationSyntaxError("dangling 'map'")
            for part in toks[i].split(","):
                name, _, slot = part.partition(":")
                s = int(slot)
                if not 1 <= s <= len(orders):
                    raise PresentationSyntaxError(f"cone slot {s} out of range (1..{len(orders)})")
                cone_map.append((need(name.strip(), rest), s - 1))
        else:
            raise PresentationSyntaxError(f"unknown orbifold token {tok!r}")
        i += 1
    if genus is None or degree is None or cover_chi is None:
        raise PresentationSyntaxError("orbifold needs sig=, degree= and coverchi=")
    return OrbifoldData(
        sig=OrbifoldSig(genus=genus, cone_orders=orders),
        degree=degree,
        cover_chi=cover_chi,
        maximal=maximal,
        cone_map=tuple(cone_map),
    )


def _parse_dial(rest: str, need) -> DialData:
    m = re.fullmatch(r"(\w+)\s*:\s*(\d+)(?:\s+controls\s+(.+))?", rest.strip())
    if not m:
        raise PresentationSyntaxError(f"expected 'dial name:order [controls a,b]': {rest!r}")
    order = int(m.group(2))
    if order < 1:
        raise PresentationSyntaxError("dial order must be >= 1")
    controls = tuple(need(n.strip(), rest) for n in (m.group(3) or "").split(",") if n.strip())
    return DialData(name=need(m.group(1), rest), order=order, controls=controls)


def print_presentation(p: Presentation) -> str:
    """Canonical text form; parses back to an equal Presentation."""
    lines = [f"gens {', '.join(p.generators)};"]
    if p.relators:
        lines.append("rels " + ", ".join(f"{a} = {b}" for a, b in p.relators) + ";")
    for a, b in p.commutes:
        lines.append(f"commute ({a}, {b});")
    for x, h, h2 in p.conjs:
        lines.append(f"conj ({x}: {h} -> {h2});")
    for g, q in p.torsions:
        lines.append(f"torsion {g}:{q};")
    for ob in p.orbifolds:
        sig = f"{ob.sig.genus}" + (";" + ",".join(str(o) for o in ob.sig.cone_orders) if ob.sig.cone_orders else "")
        parts = [f"orbifold sig={sig}", f"degree={ob.degree}", f"coverchi={ob.cover_chi}"]
        if ob.maximal:
            parts.append("maximal")
        for g, slot in ob.cone_map:
            parts.append(f"map {g}:{slot + 1}")
        lines.append(" ".join(parts) + ";")
    for d in p.dials:
        ctrl = f" controls {', '.join(d.controls)}" if d.controls else ""
        lines.append(f"dial {d.name}:{d.order}{ctrl};")
    for g, values in p.pins:
        lines.append(f"pin {g}: " + ", ".join(_fmt_value(v) for v in values) + ";")
    for g, l, theta in p.excludes:
        lines.append(f"exclude {g}: l={l!r} theta={theta!r};")
    if p.marked:
        lines.append(f"mark {', '.join(p.marked)};")
    return "\n".join(lines) + "\n"


def _fmt_value(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return repr(v)


# ---------------------------------------------------------------------------
# word evaluation and relation checking


def eval_word(w: Word, assignment: Mapping[str, CircleMap]) -> CircleMap:
    """Compose the assigned circle maps along the word (empty word: identity)."""
    maps = []
    for g, e in w.letters:
        if g not in assignment:
            raise UnassignedGenerator(f"generator {g!r} has no assigned map")
        maps.append(circledyn.power(assignment[g], e))
    return circledyn.Word(maps)


@dataclass(frozen=True)
class RelationCheck:
    relator: str
    residual: float
    passed: bool


@dataclass(frozen=True)
class RelationReport:
    checks: tuple[RelationCheck, ...]
    tol: float

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def check_relations(
    p: Presentation, assignment: Mapping[str, CircleMap], tol: float = 1e-9, grid: int = 1024
) -> RelationReport:
    """Max deviation of each relator (both sides compared pointwise on a grid)."""
    import numpy as np

    ts = np.arange(grid) / grid
    checks = []
    pairs = list(p.relators) + [(_conj_word(x, h), h2) for x, h, h2 in p.conjs]
    for lhs, rhs in pairs:
        f = eval_word(lhs, assignment)
        g = eval_word(rhs, assignment)
        fx = f.eval_array(ts) % 1.0
        gx = g.eval_array(ts) % 1.0
        d = np.abs(fx - gx)
        residual = float(np.max(np.minimum(d, 1.0 - d)))
        checks.append(RelationCheck(relator=f"{lhs} = {rhs}", residual=residual, passed=residual <= tol))
    return RelationReport(checks=tuple(checks), tol=tol)


def _conj_word(x: str, h: Word) -> Word:
    return Word(((x, 1),) + h.letters + ((x, -1),))


# ---------------------------------------------------------------------------
# the propagation engine


@dataclass(frozen=True)
class CertEntry:
    index: int
    rule: str
    premises: tuple[str, ...]
    generator: str
    result: RotSet

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "rule": self.rule,
            "premises": list(self.premises),
            "generator": self.generator,
            "result": self.result.to_json(),
        }


@dataclass(frozen=True)
class Certificate:
    entries: tuple[CertEntry, ...]

    def to_json(self) -> list:
        return [e.to_json() for e in self.entries]


@dataclass(frozen=True)
class PropagationResult:
    sets: dict[str, RotSet]
    marked: dict[str, RotSet]
    certificate: Certificate
    dials: dict[str, dict[str, dict[str, RotSet]]]

    def to_json(self) -> dict:
        out = {
            "marked": {g: s.to_json() for g, s in self.marked.items()},
            "certificate": self.certificate.to_json(),
        }
        if self.dials:
            out["dials"] = {
                name: {val: {g: s.to_json() for g, s in branch.items()} for val, branch in branches.items()}
                for name, branches in self.dials.items()
            }
        return out


def _multiples(q: int) -> RotSet:
    return RotSet.from_points([Fraction(k, q) for k in range(q)])


def _linear_relations(p: Presentation) -> list[tuple[int, str, int, str, str]]:
    """(m, g, k, h, premise): the constraint m rot(g) = k rot(h), mined from
    relators and conj annotations whose sides reduce to pure powers."""
    out = []
    for lhs, rhs in p.relators:
        a, b = _merged_power(lhs), _merged_power(rhs)
        if a and b:
            out.append((a[1], a[0], b[1], b[0], f"relator {lhs} = {rhs}"))
    for x, h, h2 in p.conjs:
        a, b = _merged_power(h), _merged_power(h2)
        if a and b:
            out.append((a[1], a[0], b[1], b[0], f"conj ({x}: {h} -> {h2})"))
    return out


def _torsion_facts(p: Presentation) -> list[tuple[str, int, str]]:
    out = [(g, q, f"torsion {g}:{q}") for g, q in p.torsions]
    for lhs, rhs in p.relators:
        for side, other in ((lhs, rhs), (rhs, lhs)):
            if other.letters:
                continue
            pw = _merged_power(side)
            if pw and pw[1] != 0:
                out.append((pw[0], abs(pw[1]), f"relator {lhs} = {rhs}"))
    for d in p.dials:
        out.append((d.name, d.order, f"dial {d.name}:{d.order}"))
    return out


def _commuting_products(p: Presentation) -> list[tuple[tuple[str, int], tuple[str, int], tuple[str, int], str]]:
    """((a,i),(b,j),(c,k), premise) from relators a^i b^j = c^k with (a,b) commuting."""
    commuting = {frozenset(pair) for pair in p.commutes}
    out = []
    for lhs, rhs in p.relators:
        for side, other in ((lhs, rhs), (rhs, lhs)):
            pw = _merged_power(other)
            if pw is None:
                continue
            merged = _merge_adjacent(side.letters)
            if len(merged) != 2:
                continue
            (a, i), (b, j) = merged
            if frozenset((a, b)) in commuting:
                out.append(((a, i), (b, j), pw, f"relator {lhs} = {rhs} with commute ({a},{b})"))
    return out


def _merge_adjacent(letters) -> list[tuple[str, int]]:
    merged: list[tuple[str, int]] = []
    for g, e in letters:
        if merged and merged[-1][0] == g:
            e2 = merged[-1][1] + e
            merged.pop()
            if e2:
                merged.append((g, e2))
        else:
            merged.append((g, e))
    return merged


class _Engine:
    def __init__(self, p: Presentation, extra_pins: Mapping[str, tuple] | None = None):
        self.p = p
        self.state: dict[str, RotSet] = {g: RotSet.full() for g in p.generators}
        self.entries: list[CertEntry] = []
        self.last_fact: dict[str, str] = {g: f"init {g}" for g in p.generators}
        self.extra_pins = dict(extra_pins or {})
        self.orb_cache: dict[int, list] = {}

    def cite(self, g: str) -> str:
        return self.last_fact[g]

    def update(self, rule: str, g: str, s: RotSet, premises: tuple[str, ...]) -> bool:
        cur = self.state[g]
        nxt = cur.intersect(s)
        if nxt == cur:
            return False
        if not nxt.points and not nxt.intervals:
            raise Inconsistent(f"empty rotation set for {g!r} via {rule}")
        self.state[g] = nxt
        e = CertEntry(index=len(self.entries), rule=rule, premises=premises, generator=g, result=nxt)
        self.entries.append(e)
        self.last_fact[g] = f"fact:{e.index}"
        return True

    def sweep(self) -> bool:
        changed = False
        p = self.p
        # R0: pinned values (annotations and dial-branch assumptions)
        for g, values in list(p.pins) + sorted(self.extra_pins.items()):
            changed |= self.update("pin", g, RotSet.from_points(values), (f"pin {g}",))
        # R1/R2/R3: linear relations m rot(g) = k rot(h)
        for m, g, k, h, premise in _linear_relations(p):
            if g == h:
                if m != k:
                    q = abs(k - m)
                    changed |= self.update("R3", g, _multiples(q), (premise,))
                continue
            rule = "R1" if abs(m) == 1 and abs(k) == 1 else "R2"
            changed |= self.update(
                rule, g, self.state[h].scale_image(k).scale_preimage(m), (premise, self.cite(h))
            )
            changed |= self.update(
                rule, h, self.state[g].scale_image(m).scale_preimage(k), (premise, self.cite(g))
            )
        # R4: commuting products add
        for (a, i), (b, j), (c, k), premise in _commuting_products(p):
            sum_ab = self.state[a].scale_image(i).minkowski(self.state[b].scale_image(j))
            changed |= self.update(
                "R4", c, sum_ab.scale_preimage(k), (premise, self.cite(a), self.cite(b))
            )
            back_a = self.state[c].scale_image(k).minkowski(self.state[b].scale_image(j))
            changed |= self.update(
                "R4", a, back_a.scale_preimage(i), (premise, self.cite(c), self.cite(b))
            )
            back_b = self.state[c].scale_image(k).minkowski(self.state[a].scale_image(i))
            changed |= self.update(
                "R4", b, back_b.scale_preimage(j), (premise, self.cite(c), self.cite(a))
            )
        # R5: torsion
        for g, q, premise in _torsion_facts(p):
            changed |= self.update("R5", g, _multiples(q), (premise,))
        # R6: orbifold Euler-number feasibility
        for oi, ob in enumerate(p.orbifolds):
            if oi not in self.orb_cache:
                self.orb_cache[oi] = feasible_tuples(
                    ob.sig, ob.degree, ob.cover_chi, maximal=ob.maximal
                )
            tuples = [
                t
                for t in self.orb_cache[oi]
                if all(self.state[g].contains(t.rots[slot]) for g, slot in ob.cone_map)
            ]
            premise_base = (
                f"orbifold sig={ob.sig.genus};{','.join(map(str, ob.sig.cone_orders))} "
                f"degree={ob.degree} coverchi={ob.cover_chi}"
                + (" maximal" if ob.maximal else "")
            )
            for g, slot in ob.cone_map:
                values = [Fraction(0)] + [t.rots[slot] for t in tuples]
                cites = tuple(self.cite(h) for h, _ in ob.cone_map)
                changed |= self.update("R6", g, RotSet.from_points(values), (premise_base,) + cites)
        # R7: excluded intervals
        for g, l, theta in p.excludes:
            di = domain_interval(l, theta)
            if di.lo == di.hi:
                allowed = RotSet.from_points([0, di.lo])
            else:
                allowed = RotSet.build(points=[0], intervals=[(di.hi, di.lo)])
            changed |= self.update("R7", g, allowed, (f"exclude {g}: l={l!r} theta={theta!r}",))
        return changed

    def run(self, max_sweeps: int = 100):
        for _ in range(max_sweeps):
            if not self.sweep():
                return
        raise RuntimeError(f"propagation did not stabilize in {max_sweeps} sweeps")


def propagate(p: Presentation) -> PropagationResult:
    """Shrink every generator's rotation set to the rule-application fixed point.

    Returns the final sets, the marked subsets, a replayable certificate
    of every derivation step, and -- when dial elements are present --
    the per-dial-value conditional results.
    """
    engine = _Engine(p)
    engine.run()
    dials: dict[str, dict[str, dict[str, RotSet]]] = {}
    for d in p.dials:
        branches: dict[str, dict[str, RotSet]] = {}
        for k in range(d.order):
            v = Fraction(k, d.order)
            extra: dict[str, tuple] = {d.name: (v,)}
            if v == 0:
                for g in d.controls:
                    extra[g] = (Fraction(0),)
            sub = _Engine(p, extra_pins=extra)
            sub.run()
            branches[str(v)] = {g: sub.state[g] for g in p.marked}
        dials[d.name] = branches
    return PropagationResult(
        sets=dict(engine.state),
        marked={g: engine.state[g] for g in p.marked},
        certificate=Certificate(entries=tuple(engine.entries)),
        dials=dials,
    )


def replay_certificate(p: Presentation, cert: Certificate) -> bool:
    """Re-run propagation and require the identical derivation sequence."""
    engine = _Engine(p)
    engine.run()
    return tuple(engine.entries) == cert.entries


# ---------------------------------------------------------------------------
# outer approximation


def middle_thirds_cantor(stage: int) -> list[tuple[Fraction, Fraction]]:
    """The 2^stage closed intervals of the standard middle-thirds construction."""
    ivs = [(Fraction(0), Fraction(1))]
    for _ in range(stage):
        nxt = []
        for lo, hi in ivs:
            third = (hi - lo) / 3
            nxt.append((lo, lo + third))
            nxt.append((hi - third, hi))
        ivs = nxt
    return ivs


def outer_approximation(kspec, stages: int) -> list[RotSet]:
    """Nested outer covers of a closed target, one RotSet per stage.

    ``kspec`` is either a finite list of closed intervals (points as
    degenerate pairs) reused at every stage, or a callable stage ->
    interval list producing finer covers.  Stage i snaps every endpoint
    outward to the dyadic grid 2^-(i+4) (exact Fractions), adds 0, and
    symmetrizes; each stage must contain the next.
    """
    if stages < 1:
        raise ValueError("need at least one stage")
    cover: Callable[[int], Sequence] = kspec if callable(kspec) else (lambda i: kspec)
    out: list[RotSet] = []
    for i in range(1, stages + 1):
        grid = 2 ** (i + 4)
        snapped = []
        for lo, hi in cover(i):
            lo_f, hi_f = Fraction(lo), Fraction(hi)
            if hi_f < lo_f:
                raise InvalidCoverGenerator(f"stage {i}: interval {(lo, hi)} is reversed")
            snapped.append(
                (Fraction(math.floor(lo_f * grid), grid), Fraction(math.ceil(hi_f * grid), grid))
            )
        s = RotSet.build(points=[0], intervals=snapped)
        if out and not s.is_subset(out[-1]):
            raise InvalidCoverGenerator(f"stage {i} is not contained in stage {i - 1}")
        out.append(s)
    return out


# ---------------------------------------------------------------------------
# interval-group synthesis


def emit_interval_group(interval) -> Presentation:
    """A presentation whose marked generator is forced into {0} plus/minus
    the requested closed arc.

    The arc must be realizable as the excluded set of a deformed-addition
    domain: solve for the hyperbolic distance l and angle theta whose
    complement arc matches, verify with :func:`rotarith.domain_interval`
    to 2^-12, and wrap the (l, theta) exclusion in the standard
    presentation skeleton (placeholder lattice generator, an element
    pinned at theta, its conjugate commuting with the marked generator,
    and a hyperbolic pin forcing the product's rotation number to zero).
    """
    lo = float(interval[0]) % 1.0
    hi = float(interval[1]) % 1.0
    span = (hi - lo) % 1.0
    if span == 0.0 and interval[0] != interval[1]:
        raise NotRepresentable("full circle cannot be the excluded arc")
    # the arc may not contain 0: the excluded set of theta +_l never does
    if lo == 0.0 or hi == 0.0 or lo > hi:
        raise NotRepresentable("arc containing 0 cannot be the excluded arc")
    c = (lo + span / 2) % 1.0
    w = span / 2
    big_r = 1.0 / math.cos(math.pi * w)
    phi = (-math.pi * c) % math.pi
    a = big_r * math.cos(phi)
    if abs(a) >= 1.0 - 1e-13:
        raise NotRepresentable(f"arc centered at {c} is too close to 0")
    sin_t = math.sqrt(1.0 - a * a)
    b = big_r * math.sin(phi)
    theta = math.atan2(sin_t, a) / math.pi
    l = math.acosh(max(1.0, b / sin_t))
    di = domain_interval(l, theta)
    err = max(circ_dist(di.hi, lo), circ_dist(di.lo, hi))
    if err > 2**-12:
        raise NotRepresentable(f"best (l, theta) misses the arc by {err:.2e}")
    gens = ("Gamma", "alpha", "alphap", "beta", "gamma", "mu")
    return Presentation(
        generators=gens,
        commutes=(("gamma", "alphap"),),
        conjs=(
            ("beta", Word((("alpha", 1),)), Word((("alphap", 1),))),
            ("mu", Word((("alpha", 1), ("gamma", 1))), Word((("beta", 1),))),
        ),
        pins=(("beta", (Fraction(0),)), ("alpha", (theta,))),
        excludes=(("gamma", l, theta),),
        marked=("gamma",),
    )

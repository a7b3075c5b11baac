"""Connectors, double centralizing relations, centralizers.

A connector for a pair (R, S) of reflexive relations on X is a
homomorphism p on the triple domain {xRySz} satisfying p(xRxSy) = y and
p(xRySy) = x.  It is computed by forced-value propagation from the two
section images; an independent exhaustive oracle certifies uniqueness.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import core, relations
from .core import Hom
from .errors import BoundExceeded, NotSigmaRelation, ObjectMismatch, SelfCheckFailed
from .points import SplitPoint
from .reports import AuditReport

CONNECTOR_ORACLE_BOUND = 16


@dataclass(frozen=True)
class TripleDomain:
    """The pullback R ×_X S of d1-of-R against d0-of-S: triples xRySz."""

    r: relations.ReflexiveRelation
    s: relations.ReflexiveRelation
    domain: core.TupleAlgebra

    @property
    def triples(self):
        return self.domain.carrier

    def section_of_r(self):
        """(x,y) ∈ R  ↦  xRySy."""
        mat = relations.materialize(self.r)
        return mat.algebra, {i: self.domain.index_of[(p[0], p[1], p[1])]
                             for i, p in enumerate(mat.carrier)}

    def section_of_s(self):
        """(y,z) ∈ S  ↦  yRySz."""
        mat = relations.materialize(self.s)
        return mat.algebra, {i: self.domain.index_of[(p[0], p[0], p[1])]
                             for i, p in enumerate(mat.carrier)}


@lru_cache(maxsize=65536)
def triple_domain(r, s):
    if r.base != s.base:
        raise ObjectMismatch("relations live on different objects")
    by_src = {}
    for y, z in s.pairs:
        by_src.setdefault(y, []).append(z)
    triples = {(x, y, z) for x, y in r.pairs for z in by_src.get(y, ())}
    dom = core.power_subalgebra(r.base, triples, name=f"{r.base.name}|RxS")
    return TripleDomain(r, s, dom)


@dataclass(frozen=True)
class ConnectorCandidate:
    r: relations.ReflexiveRelation
    s: relations.ReflexiveRelation
    domain: TripleDomain
    p: Hom
    unique: bool

    def value(self, x, y, z):
        return self.p(self.domain.domain.index_of[(x, y, z)])


@dataclass(frozen=True)
class PropagationOutcome:
    status: str  # total | inconsistent | extended | none
    candidate: object = None
    witness: object = None


def _forced_seeds(td):
    seeds = {}
    for x, y in td.r.pairs:
        seeds[td.domain.index_of[(x, y, y)]] = x
    for y, z in td.s.pairs:
        i = td.domain.index_of[(y, y, z)]
        if i in seeds and seeds[i] != z:
            return None, (y, y, z)
        seeds[i] = z
    return seeds, None


def connector_propagation(r, s):
    """Force p on the two section images and close under the operations."""
    td = triple_domain(r, s)
    x_alg = r.base
    seeds, clash = _forced_seeds(td)
    if seeds is None:
        return PropagationOutcome("inconsistent", witness=clash)
    assign, conflict = core.force_hom(td.domain.algebra, x_alg, seeds)
    if assign is None:
        return PropagationOutcome("inconsistent",
                                  witness=td.domain.carrier[conflict])
    if len(assign) == len(td.domain.carrier):
        p = Hom(td.domain.algebra, x_alg,
                tuple(assign[i] for i in range(len(td.domain.carrier))))
        return PropagationOutcome(
            "total", ConnectorCandidate(r, s, td, p, unique=True))
    # the section images do not generate: search for extensions
    unreached = min(i for i in range(len(td.domain.carrier))
                    if i not in assign)
    homs = core.enumerate_homs(td.domain.algebra, x_alg, fixed=assign, limit=2)
    if not homs:
        return PropagationOutcome("none",
                                  witness=td.domain.carrier[unreached])
    cand = ConnectorCandidate(r, s, td, homs[0], unique=len(homs) == 1)
    return PropagationOutcome("extended", cand,
                              witness=td.domain.carrier[unreached])


def connector(r, s):
    """The connector, or None when no total homomorphism satisfies the
    forced values."""
    out = connector_propagation(r, s)
    return out.candidate


def connector_oracle(r, s, bound=CONNECTOR_ORACLE_BOUND):
    """Exhaustive enumeration of all connectors, independent of the
    propagation route: every hom on the triple domain is searched and the
    two defining identities are imposed directly."""
    td = triple_domain(r, s)
    if len(td.triples) > bound:
        raise BoundExceeded(
            f"oracle bound {bound} exceeded: |RxS| = {len(td.triples)}")
    idx = td.domain.index_of
    fixed = {}
    for x, y in r.pairs:
        fixed[idx[(x, y, y)]] = x
    for y, z in s.pairs:
        i = idx[(y, y, z)]
        if fixed.get(i, z) != z:
            return []
        fixed[i] = z
    out = []
    for h in core.enumerate_homs(td.domain.algebra, r.base, fixed=fixed):
        if all(h(idx[(x, y, y)]) == x for x, y in r.pairs) and \
                all(h(idx[(y, y, z)]) == z for y, z in s.pairs):
            out.append(h)
    return out


# ---------------------------------------------------------------------------
# Double relations


@dataclass(frozen=True)
class DoubleRelation:
    """Squares u S v (top), u' S v' (bottom), u R u' (left), v R v' (right),
    stored as quadruples (u, v, u', v')."""

    r: relations.ReflexiveRelation
    s: relations.ReflexiveRelation
    quads: frozenset

    @staticmethod
    def largest(r, s):
        """R □ S: every square of related elements."""
        quads = {(u, v, u2, v2)
                 for u, v in s.pairs
                 for u2, v2 in s.pairs
                 if (u, u2) in r.pairs and (v, v2) in r.pairs}
        return DoubleRelation(r, s, frozenset(quads))

    @staticmethod
    def from_connector(cand):
        quads = frozenset((x, cand.value(x, y, z), y, z)
                          for (x, y, z) in cand.domain.triples)
        return DoubleRelation(cand.r, cand.s, quads)

    def materialized(self):
        return core.power_subalgebra(self.r.base, self.quads,
                                     name=f"{self.r.base.name}|dbl")

    def projections(self):
        """Four legs onto the materialized R and S."""
        dom = self.materialized()
        rmat = relations.materialize(self.r)
        smat = relations.materialize(self.s)
        p0_r = Hom(dom.algebra, rmat.algebra,
                   tuple(rmat.index_of[(q[0], q[2])] for q in dom.carrier))
        p1_r = Hom(dom.algebra, rmat.algebra,
                   tuple(rmat.index_of[(q[1], q[3])] for q in dom.carrier))
        p0_s = Hom(dom.algebra, smat.algebra,
                   tuple(smat.index_of[(q[0], q[1])] for q in dom.carrier))
        p1_s = Hom(dom.algebra, smat.algebra,
                   tuple(smat.index_of[(q[2], q[3])] for q in dom.carrier))
        return p0_r, p1_r, p0_s, p1_s

    def is_centralizing(self):
        """The (left-edge, bottom-edge) pair is a pullback onto R ×_X S."""
        seen = {}
        for u, v, u2, v2 in self.quads:
            key = (u, u2, v2)
            if key in seen and seen[key] != v:
                return False
            seen[key] = v
        td = triple_domain(self.r, self.s)
        return set(seen) == set(td.triples)

    def connector_values(self):
        return {(u, u2, v2): v for u, v, u2, v2 in self.quads}


def check_coherence(dcr):
    """Certify the coherence and associativity conditions of a double
    centralizing relation; any failing instance is listed."""
    report = AuditReport("coherence")
    r, s = dcr.r, dcr.s
    values = dcr.connector_values()
    td = triple_domain(r, s)
    ok_maltsev = all(values.get((x, x, y)) == y for x, y in s.pairs) and \
        all(values.get((x, y, y)) == x for x, y in r.pairs)
    report.add("maltsev conditions", ok_maltsev)
    coh1 = [t for t in td.triples if (t[0], values[t]) not in s.pairs]
    report.add("left coherence: x S p(x,y,z)", not coh1,
               coh1[:3] or None)
    coh2 = [t for t in td.triples if (values[t], t[2]) not in r.pairs]
    report.add("right coherence: p(x,y,z) R z", not coh2,
               coh2[:3] or None)
    bad_left = []
    for (x, y, z) in td.triples:
        p1 = values[(x, y, z)]
        for (z2, t) in s.pairs:
            if z2 != z:
                continue
            lhs = values.get((p1, z, t))
            rhs = values.get((x, y, t))
            if lhs is not None and rhs is not None and lhs != rhs:
                bad_left.append((x, y, z, t))
    report.add("left associativity", not bad_left, bad_left[:3] or None)
    if r.is_transitive():
        bad_right = []
        for (y, z, t) in td.triples:
            for (x, y2) in r.pairs:
                if y2 != y:
                    continue
                inner = values[(y, z, t)]
                lhs = values.get((x, y, inner))
                rhs = values.get((x, z, t))
                if lhs is not None and rhs is not None and lhs != rhs:
                    bad_right.append((x, y, z, t))
        report.add("right associativity (R preorder)", not bad_right,
                   bad_right[:3] or None)
    return report


def centralizes(r, s, sigma=None):
    """[R,S] = 0: a total connector exists and is coherent."""
    if sigma is not None and not relations.is_sigma_relation(s, sigma):
        raise NotSigmaRelation(f"{s!r} is not a {sigma.name} relation")
    cand = connector(r, s)
    if cand is None:
        return False
    return check_coherence(DoubleRelation.from_connector(cand)).passed


# ---------------------------------------------------------------------------
# Centralizers


@dataclass(frozen=True)
class CentralizerResult:
    relation: object            # the maximum, or None
    maximal: tuple              # antichain of maximal centralizing congruences
    centralizing: tuple


def centralizer(s, sigma):
    """Largest congruence centralizing S, when the maximum exists."""
    if not relations.is_sigma_relation(s, sigma):
        raise NotSigmaRelation(f"{s!r} not in {sigma.name}")
    if not s.is_equivalence():
        raise NotSigmaRelation("centralizer is defined on equivalence relations")
    cands = [r for r in relations.congruences(s.base) if centralizes(r, s)]
    maximal = [r for r in cands
               if not any(r.pairs < o.pairs for o in cands)]
    top = maximal[0] if len(maximal) == 1 else None
    return CentralizerResult(top, tuple(maximal), tuple(cands))


# ---------------------------------------------------------------------------
# Cartesian equivalence relations and the action-distinctive construction


def _is_cartesian_pair(point, t, ry):
    """(T on the total, R on the base) with both level squares pullbacks."""
    proj = {(point.f(a), point.f(b)) for a, b in t.pairs}
    if proj != set(ry.pairs):
        return False
    if not all((point.s(a), point.s(b)) in t.pairs for a, b in ry.pairs):
        return False
    want = sum(len(point.f.fiber(y)) for y, _ in ry.pairs)
    if len(t.pairs) != want:
        return False
    for comp in (0, 1):
        seen = set()
        for pair in t.pairs:
            key = (pair[comp], (point.f(pair[0]), point.f(pair[1])))
            if key in seen:
                return False
            seen.add(key)
    return True


def cartesian_equivalence_relations(point):
    """Direct enumeration of the cartesian equivalence relations on a
    split point, by bounded closure search over each base congruence."""
    out = []
    for ry in relations.congruences(point.base):
        want = sum(len(point.f.fiber(y)) for y, _ in ry.pairs)
        seeds = {(point.s(a), point.s(b)) for a, b in ry.pairs}
        start = relations.congruence_generated(point.total, seeds)
        ry_pairs = set(ry.pairs)
        seen = set()
        stack = [start]
        while stack:
            t = stack.pop()
            if t.pairs in seen:
                continue
            seen.add(t.pairs)
            if len(t.pairs) > want:
                continue
            if not all((point.f(a), point.f(b)) in ry_pairs
                       for a, b in t.pairs):
                continue
            if _is_cartesian_pair(point, t, ry):
                out.append((t, ry))
            for a in point.total.elements():
                for b in point.total.elements():
                    if (a, b) not in t.pairs and \
                            (point.f(a), point.f(b)) in ry_pairs:
                        stack.append(relations.congruence_generated(
                            point.total, t.pairs | {(a, b)}))
    return out


@dataclass(frozen=True)
class ActionDistinctive:
    point: SplitPoint
    on_total: relations.ReflexiveRelation
    on_base: relations.ReflexiveRelation


def action_distinctive(point, sigma):
    """Largest cartesian equivalence relation on a sigma-special point,
    built from the centralizer of the kernel relation and cross-checked
    against direct enumeration."""
    rf = relations.kernel_pair(point.f)
    if not relations.is_sigma_relation(rf, sigma):
        raise NotSigmaRelation("point is not sigma-special")
    zres = centralizer(rf, sigma)
    if zres.relation is None:
        return None
    z = zres.relation
    cand = connector(z, rf)
    if cand is None:
        raise SelfCheckFailed("action-distinctive",
                              "centralizer does not centralize")
    fmap, smap = point.f.mapping, point.s.mapping
    lift = [smap[fmap[x]] for x in point.total.elements()]
    dy = relations.ReflexiveRelation(
        point.base,
        {(a, b) for a in point.base.elements() for b in point.base.elements()
         if (smap[a], smap[b]) in z.pairs},
        check=False)
    dx_pairs = set()
    idx = cand.domain.domain.index_of
    for x in point.total.elements():
        for x2 in point.total.elements():
            key = (lift[x], lift[x2], x2)
            if (lift[x], lift[x2]) in z.pairs and key in idx and \
                    cand.p(idx[key]) == x:
                dx_pairs.add((x, x2))
    dx = relations.ReflexiveRelation(point.total, dx_pairs, check=False)
    result = ActionDistinctive(point, dx, dy)
    enumerated = cartesian_equivalence_relations(point)
    if not _is_cartesian_pair(point, dx, dy):
        raise SelfCheckFailed("action-distinctive",
                              "constructed relation is not cartesian")
    for t, ry in enumerated:
        if not (t.pairs <= dx.pairs and ry.pairs <= dy.pairs):
            raise SelfCheckFailed(
                "action-distinctive",
                f"misses the cartesian relation {sorted(t.pairs)}")
    return result

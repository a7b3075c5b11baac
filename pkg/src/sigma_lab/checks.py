"""The square condition, internal category/groupoid structure, abelian
points, base-change faithfulness and saturation, normal monomorphisms,
and core membership audits."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from . import centrality, core, points, relations
from .core import Hom
from .errors import (
    InvalidHom,
    NotPullback,
    NotSigmaGraph,
    SelfCheckFailed,
    SignatureMismatch,
)
from .points import SplitPoint, jointly_extremally_epic_witness
from .reports import AuditReport, algebra_doc, hom_doc, point_doc


@dataclass(frozen=True)
class MaltsevSquareReport:
    square: points.PointSquare
    verdict: bool
    witness: object = None

    def to_json(self):
        out = {"square": self.square.to_json(), "verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def maltsev_square(square):
    """Joint-generation test for the section pair of a pullback square."""
    if not square.is_pullback:
        raise NotPullback("the square condition applies to pullback squares")
    if square.top_section is None:
        raise NotPullback("the square needs both horizontal sections")
    missed = jointly_extremally_epic_witness(square.left.s,
                                             square.top_section)
    return MaltsevSquareReport(square, missed is None, missed)


def maltsev_square_candidates(kind, max_order, sigma):
    """All (sigma point, base point) pairs sharing a base, catalog order."""
    by_base = points.points_over(kind, max_order)
    pairs = []
    for base in core.catalog(kind, max_order):
        pts = by_base.get(base, [])
        members = [p for p in pts if sigma.contains(p)]
        for p in members:
            for q in pts:
                pairs.append((p, q))
    return pairs


def maltsev_square_sweep(kind, sigma, max_order, sample=None, seed=2024):
    """Square reports, exhaustive or deterministically sampled."""
    pairs = maltsev_square_candidates(kind, max_order, sigma)
    if sample is not None and sample < len(pairs):
        rng = random.Random(seed)
        pairs = [pairs[i] for i in sorted(rng.sample(range(len(pairs)),
                                                     sample))]
    out = []
    for p, q in pairs:
        out.append(maltsev_square(points.square_over_point(p, q)))
    return out


# ---------------------------------------------------------------------------
# Internal category structure on a graph


@dataclass(frozen=True)
class CategoryStructure:
    graph: relations.ReflexiveGraph
    pairs: core.TupleAlgebra
    compose: Hom
    unique: bool


def _unit_seeds(graph, x2):
    seeds = {}
    for i, (u, v) in enumerate(x2.carrier):
        if u == graph.s0(graph.d0(v)):
            seeds[i] = v
        if v == graph.s0(graph.d1(u)):
            if seeds.get(i, u) != u:
                return None, (u, v)
            seeds[i] = u
    return seeds, None


def _category_axioms_hold(graph, x2, m):
    for i, (u, v) in enumerate(x2.carrier):
        w = m(i)
        if graph.d0(w) != graph.d0(u) or graph.d1(w) != graph.d1(v):
            return False
    x3 = graph.composable_triples()
    idx = x2.index_of
    for (u, v, w) in x3.carrier:
        left = m(idx[(m(idx[(u, v)]), w)])
        right = m(idx[(u, m(idx[(v, w)]))])
        if left != right:
            return False
    return True


def graph_category_structure(graph, sigma):
    """The unique composition with unit laws, when the graph is in the
    class; None when the forced values clash or break an axiom."""
    if not sigma.contains(graph.point()):
        raise NotSigmaGraph(f"(d0, s0) is not a {sigma.name} point")
    x2 = graph.composable_pairs()
    seeds, clash = _unit_seeds(graph, x2)
    if seeds is None:
        return None
    assign, conflict = core.force_hom(x2.algebra, graph.edges, seeds)
    if assign is None:
        return None
    if len(assign) == x2.algebra.order:
        m = Hom(x2.algebra, graph.edges,
                tuple(assign[i] for i in range(x2.algebra.order)))
        if not _category_axioms_hold(graph, x2, m):
            return None
        return CategoryStructure(graph, x2, m, unique=True)
    found = core.enumerate_homs(x2.algebra, graph.edges, fixed=assign)
    good = [m for m in found if _category_axioms_hold(graph, x2, m)]
    if not good:
        return None
    return CategoryStructure(graph, x2, good[0], unique=len(good) == 1)


def category_structure_oracle(graph):
    """All compositions with the two unit laws, by exhaustive search."""
    x2 = graph.composable_pairs()
    seeds, clash = _unit_seeds(graph, x2)
    if seeds is None:
        return []
    return core.enumerate_homs(x2.algebra, graph.edges, fixed=seeds)


def fiber_monoid_structure(point, sigma):
    """The unique monoid structure on a point in its fibre, when one
    exists; necessarily commutative (checked)."""
    if not sigma.contains(point):
        raise NotSigmaGraph(f"point is not in {sigma.name}")
    graph = relations.graph_of_point(point)
    structure = graph_category_structure(graph, sigma)
    if structure is None:
        return None
    idx = structure.pairs.index_of
    m = structure.compose
    for (a, b) in structure.pairs.carrier:
        if m(idx[(a, b)]) != m(idx[(b, a)]):
            raise SelfCheckFailed("fiber-monoid",
                                  f"structure not commutative at ({a},{b})")
    return m


def _fiber_inverses_exist(point, m, pairs):
    idx = pairs.index_of
    unit_of = {x: point.s(point.f(x)) for x in point.total.elements()}
    for x in point.total.elements():
        e = unit_of[x]
        if not any(m(idx[(x, y)]) == e and m(idx[(y, x)]) == e
                   for y in point.f.fiber(point.f(x))):
            return False
    return True


def is_abelian_point(point, sigma):
    """Kernel-relation route and fibrewise-group route, compared."""
    rf = relations.kernel_pair(point.f)
    via_connector = relations.is_sigma_relation(rf, sigma) and \
        centrality.centralizes(rf, rf)
    via_group = False
    if sigma.contains(point):
        graph = relations.graph_of_point(point)
        structure = graph_category_structure(graph, sigma)
        if structure is not None:
            via_group = _fiber_inverses_exist(point, structure.compose,
                                              structure.pairs)
    if via_connector != via_group:
        raise SelfCheckFailed(
            "abelian-point",
            f"routes disagree on {point!r}: connector={via_connector}, "
            f"group={via_group}")
    return via_connector


# ---------------------------------------------------------------------------
# Groupoids


@dataclass(frozen=True)
class GroupoidStructure:
    graph: relations.ReflexiveGraph
    pairs: core.TupleAlgebra
    compose: Hom
    inverse: tuple


def groupoid_structure(graph, sigma):
    """Groupoid composition recovered from the centralization of the two
    kernel relations of the graph legs."""
    rd0 = relations.kernel_pair(graph.d0)
    rd1 = relations.kernel_pair(graph.d1)
    if not relations.is_sigma_relation(rd0, sigma):
        return None
    if not centrality.centralizes(rd1, rd0):
        return None
    cand = centrality.connector(rd1, rd0)
    x2 = graph.composable_pairs()
    tidx = cand.domain.domain.index_of
    mapping = []
    for (u, v) in x2.carrier:
        e = graph.s0(graph.d1(u))
        mapping.append(cand.p(tidx[(u, e, v)]))
    m = Hom(x2.algebra, graph.edges, tuple(mapping))
    if not _category_axioms_hold(graph, x2, m):
        return None
    idx = x2.index_of
    inverses = []
    for u in graph.edges.elements():
        inv = None
        for e in graph.edges.elements():
            if graph.d0(e) == graph.d1(u) and graph.d1(e) == graph.d0(u) and \
                    m(idx[(u, e)]) == graph.s0(graph.d0(u)) and \
                    m(idx[(e, u)]) == graph.s0(graph.d1(u)):
                inv = e
                break
        if inv is None:
            return None
        inverses.append(inv)
    return GroupoidStructure(graph, x2, m, tuple(inverses))


def is_internal_groupoid(graph, sigma):
    return groupoid_structure(graph, sigma) is not None


# ---------------------------------------------------------------------------
# Base-change: full faithfulness and saturation on subobjects


def points_over_base(algebras, base):
    """All split points with codomain `base` and domain in the pool."""
    out = []
    for total in algebras:
        if total.order < base.order:
            continue
        for f in core.enumerate_homs(total, base, surjective=True):
            for s in core.enumerate_homs(base, total,
                                         allowed=lambda e: f.fiber(e)):
                out.append(SplitPoint(f, s))
    return out


def _pulled_point(g, p):
    pb = core.pullback(g, p.f)
    f2 = pb.p0
    s2 = Hom(g.source, pb.algebra,
             tuple(pb.encode(yp, p.s(g(yp))) for yp in g.source.elements()))
    return SplitPoint(f2, s2), pb


def _pulled_fiber_hom(g, pa, pb_point, k, pba, pbb):
    mapping = []
    for i in range(pba.algebra.order):
        y, a = pba.decode(i)
        mapping.append(pbb.encode(y, k(a)))
    return Hom(pba.algebra, pbb.algebra, tuple(mapping))


def sub_points(p, sigma=None):
    """Sub-points of p: subalgebras of the total containing the section
    image, optionally filtered to have their restricted point in sigma."""
    out = []
    s_image = set(p.s.mapping)
    for carrier in p.total.subsets_closed():
        if not s_image <= set(carrier):
            continue
        sub = core.subalgebra(p.total, carrier)
        f = sub.inclusion.then(p.f)
        s = Hom(p.base, sub.algebra,
                tuple(sub.index_of[p.s(y)] for y in p.base.elements()))
        sp = SplitPoint(f, s)
        if sigma is None or sigma.contains(sp):
            out.append((frozenset(carrier), sp))
    return out


def base_change_fully_faithful(g_point, sigma, algebras):
    """Full faithfulness and subobject saturation of base-change along a
    split epimorphism, certified by explicit bijections."""
    g = g_point.f
    z = g.target
    y = g.source
    report = AuditReport(f"saturation[{sigma.name}] along {list(g.mapping)}")
    pool = points_over_base(algebras, z)
    sigma_pool = [p for p in pool if sigma.contains(p)]
    pulled = {}
    for p in pool:
        pulled[p] = _pulled_point(g, p)
    # full faithfulness
    for a in sigma_pool:
        ga, pba = pulled[a]
        for b in pool:
            gb, pbb = pulled[b]
            hom_z = points.fiber_morphisms(a, b)
            hom_y = points.fiber_morphisms(ga, gb)
            image = []
            for k in hom_z:
                image.append(_pulled_fiber_hom(g, a, b, k, pba, pbb))
            distinct = len({h.mapping for h in image}) == len(image)
            surj = {h.mapping for h in image} == {h.mapping for h in hom_y}
            ok = distinct and surj and len(hom_z) == len(hom_y)
            report.add(
                f"hom-set bijection {a!r} -> {b!r} "
                f"({len(hom_z)} vs {len(hom_y)})", ok,
                None if ok else {"A": point_doc(a, True),
                                 "B": point_doc(b, True)})
    # saturation on subobjects
    for b in pool:
        gb, pbb = pulled[b]
        subs_z = sub_points(b, sigma)
        subs_y = sub_points(gb, sigma)
        carriers_y = {c for c, _ in subs_y}
        image = []
        for carrier, _ in subs_z:
            pulled_carrier = frozenset(
                i for i in range(pbb.algebra.order)
                if pbb.decode(i)[1] in carrier)
            image.append(pulled_carrier)
        ok = (len(set(image)) == len(image) and set(image) == carriers_y)
        report.add(
            f"subobject bijection into {b!r} "
            f"({len(subs_z)} vs {len(subs_y)})", ok,
            None if ok else point_doc(b, True))
    return report


# ---------------------------------------------------------------------------
# Normal monomorphisms


@dataclass(frozen=True)
class NormalityCertificate:
    mono: Hom
    relation: relations.ReflexiveRelation
    in_sigma: bool


def is_normal_mono(m, s_rel, sigma=None):
    """Certificate that m is normal to the equivalence relation, or None.

    Normality: the image is saturated (a whole class) and the inverse
    image of the relation is the full relation on the domain.
    """
    if not m.is_injective():
        raise InvalidHom("normality is a property of monomorphisms")
    if s_rel.base != m.target:
        raise SignatureMismatch("relation must live on the codomain")
    image = set(m.mapping)
    for a in image:
        for b in image:
            if (a, b) not in s_rel.pairs:
                return None
    for a, b in s_rel.pairs:
        if a in image and b not in image:
            return None
    in_sigma = bool(sigma and relations.is_sigma_relation(s_rel, sigma))
    return NormalityCertificate(m, s_rel, in_sigma)


def normal_mono_failure(m, s_rel):
    image = set(m.mapping)
    for a in image:
        for b in image:
            if (a, b) not in s_rel.pairs:
                return ("inverse image is not the full relation", (a, b))
    for a, b in s_rel.pairs:
        if a in image and b not in image:
            return ("image is not a saturated class", (a, b))
    return None


# ---------------------------------------------------------------------------
# Sigma-special morphisms/objects and cores


def is_sigma_special_morphism(f, sigma):
    return relations.is_sigma_relation(relations.kernel_pair(f), sigma)


def is_sigma_special_object(x, sigma):
    return relations.is_sigma_relation(relations.full_relation(x), sigma)


@dataclass
class CoreAudit:
    sigma_name: str
    members: list
    non_members: list
    report: AuditReport


def core_audit(sigma, algebras, check_relations=True, check_protomodular=False):
    """Partition a catalog into core members and the rest; certify the
    global laws inside the core."""
    report = AuditReport(f"core[{sigma.name}]")
    members, rest = [], []
    for a in algebras:
        (members if is_sigma_special_object(a, sigma) else rest).append(a)
    if check_relations:
        for a in members:
            bad = [r for r in relations.enumerate_reflexive_relations(a)
                   if not r.is_equivalence()]
            report.add(f"reflexive relations on {a.name} are equivalences",
                       not bad,
                       None if not bad else sorted(bad[0].pairs))
    if check_protomodular:
        for a in members:
            for b in members:
                if b.order > a.order:
                    continue
                for f in core.enumerate_homs(a, b, surjective=True):
                    for s in core.enumerate_homs(
                            b, a, allowed=lambda e: f.fiber(e)):
                        p = SplitPoint(f, s)
                        ok = points.is_strongly_split(p)
                        report.add(f"strongly split: {p!r}", ok,
                                   None if ok else point_doc(p, True))
    return CoreAudit(sigma.name, members, rest, report)


# ---------------------------------------------------------------------------
# Pushout squares (base-change counit) and cartesian graph morphisms


def pushout_square_check(square, test_codomains):
    """Verify the pushout property of the section/base square against a
    finite set of test codomains."""
    if not square.is_pullback:
        raise NotPullback("pushout lemma applies to pullback squares")
    report = AuditReport("pushout-square")
    x_tot = square.right.total
    for t in test_codomains:
        if t.kind != x_tot.kind:
            continue
        hom_x = core.enumerate_homs(x_tot, t)
        reached = {}
        for psi in hom_x:
            key = (square.top.then(psi).mapping,
                   square.right.s.then(psi).mapping)
            if key in reached:
                report.add(f"uniqueness into {t.name}", False,
                           {"codomain": algebra_doc(t)})
                break
            reached[key] = psi
        wanted = set()
        for phi in core.enumerate_homs(square.left.total, t):
            lhs = square.left.s.then(phi)
            for sg in core.enumerate_homs(square.right.base, t):
                if square.bottom.then(sg) == lhs:
                    wanted.add((phi.mapping, sg.mapping))
        ok = set(reached) == wanted
        report.add(f"pushout property against {t.name} "
                   f"({len(wanted)} cocones)", ok,
                   None if ok else {"codomain": algebra_doc(t)})
    return report


@dataclass(frozen=True)
class GraphSplitEpi:
    """Levelwise split epimorphism of reflexive graphs."""

    src: relations.ReflexiveGraph
    dst: relations.ReflexiveGraph
    g1: Hom
    g0: Hom
    t1: Hom
    t0: Hom

    def __post_init__(self):
        if self.g1.then(self.dst.d0) != self.src.d0.then(self.g0):
            raise SignatureMismatch("d0 squares do not commute")
        if self.g1.then(self.dst.d1) != self.src.d1.then(self.g0):
            raise SignatureMismatch("d1 squares do not commute")
        if self.src.s0.then(self.g1) != self.g0.then(self.dst.s0):
            raise SignatureMismatch("s0 squares do not commute")
        for t, g in ((self.t1, self.g1), (self.t0, self.g0)):
            if t.then(g).mapping != tuple(range(g.target.order)):
                raise SignatureMismatch("splitting is not a section")
        if self.t1.then(self.src.d0) != self.dst.d0.then(self.t0):
            raise SignatureMismatch("t/d0 squares do not commute")
        if self.t1.then(self.src.d1) != self.dst.d1.then(self.t0):
            raise SignatureMismatch("t/d1 squares do not commute")

    def vertex_point(self):
        return SplitPoint(self.g0, self.t0)

    def _square_is_pullback(self, leg_src, leg_dst):
        seen = set()
        for u in self.src.edges.elements():
            key = (self.g1(u), leg_src(u))
            if key in seen:
                return False
            seen.add(key)
        wanted = {(v, x) for v in self.dst.edges.elements()
                  for x in self.src.vertices.elements()
                  if leg_dst(v) == self.g0(x)}
        return seen == wanted

    def d0_square_is_pullback(self):
        return self._square_is_pullback(self.src.d0, self.dst.d0)

    def d1_square_is_pullback(self):
        return self._square_is_pullback(self.src.d1, self.dst.d1)


def split_graph_cartesian_check(graph_epi, sigma):
    """d1 square is a pullback whenever the d0 square is and the vertex
    point is in the (point-congruous) class."""
    if not sigma.contains(graph_epi.vertex_point()):
        raise NotSigmaGraph("vertex point is outside the class")
    if not graph_epi.d0_square_is_pullback():
        raise NotPullback("the d0 square must be a pullback")
    return graph_epi.d1_square_is_pullback()


# ---------------------------------------------------------------------------
# Quotients of points (regular epimorphisms of points up to iso)


@lru_cache(maxsize=4096)
def point_quotients(point):
    """Levelwise-surjective morphisms out of a point, one per compatible
    pair of congruences on its two levels."""
    out = []
    for theta_x in relations.congruences(point.total):
        pushed = {(point.f(a), point.f(b)) for a, b in theta_x.pairs}
        base_floor = relations.congruence_generated(point.base, pushed)
        for theta_y in relations.congruences(point.base):
            if not base_floor.pairs <= theta_y.pairs:
                continue
            lifted = {(point.s(c), point.s(d)) for c, d in theta_y.pairs}
            if not lifted <= theta_x.pairs:
                continue
            qx = core.congruence_quotient(point.total, theta_x.pairs)
            qy = core.congruence_quotient(point.base, theta_y.pairs)
            f2 = Hom(qx.algebra, qy.algebra,
                     tuple(qy.class_of[point.f(qx.classes[i].__iter__().__next__())]
                           for i in range(qx.algebra.order)))
            s2 = Hom(qy.algebra, qx.algebra,
                     tuple(qx.class_of[point.s(next(iter(qy.classes[j])))]
                           for j in range(qy.algebra.order)))
            dst = SplitPoint(f2, s2)
            out.append(points.PointEpi(point, dst, qx.projection,
                                       qy.projection))
    return tuple(out)

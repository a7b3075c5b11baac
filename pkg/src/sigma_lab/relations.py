"""Internal relations and reflexive graphs.

Relations are kept extensionally as pair sets certified to be subalgebras
of the product; the transitivity construction, composition, permutation
and image operations all reduce to pair-set manipulation plus closure
checks at this scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import core
from .core import Hom
from .errors import BoundExceeded, NotEpi, ObjectMismatch, ShapeError, SignatureMismatch
from .points import SplitPoint


class Relation:
    """Binary relation src ↛ dst as a subalgebra of src × dst."""

    __slots__ = ("src", "dst", "pairs", "_hash")

    def __init__(self, src, dst, pairs, check=True):
        self.src = src
        self.dst = dst
        self.pairs = frozenset((int(a), int(b)) for a, b in pairs)
        self._hash = None
        if check:
            self._check_closed()

    def _check_closed(self):
        if self.src.kind != self.dst.kind:
            raise SignatureMismatch("relation endpoints differ in kind")
        for a, b in self.pairs:
            if not (0 <= a < self.src.order and 0 <= b < self.dst.order):
                raise ShapeError(f"pair ({a},{b}) out of range")
        for (_, cs), (_, cd) in zip(self.src.constants(), self.dst.constants()):
            if (cs, cd) not in self.pairs:
                raise ShapeError(f"missing constant pair ({cs},{cd})")
        for (_, ts), (_, td) in zip(self.src.ops(), self.dst.ops()):
            for a, b in self.pairs:
                for c, d in self.pairs:
                    if (ts[a][c], td[b][d]) not in self.pairs:
                        raise ShapeError(
                            f"pair set not closed at ({a},{b})*({c},{d})")

    def _key(self):
        return (self.src, self.dst, self.pairs)

    def __eq__(self, other):
        return isinstance(other, Relation) and self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __contains__(self, pair):
        return tuple(pair) in self.pairs

    def __len__(self):
        return len(self.pairs)

    def __repr__(self):
        return (f"Relation({self.src.name}~{self.dst.name}, "
                f"{sorted(self.pairs)})")

    def transpose(self):
        cls = ReflexiveRelation if isinstance(self, ReflexiveRelation) else Relation
        if cls is ReflexiveRelation:
            return ReflexiveRelation(self.src,
                                     {(b, a) for a, b in self.pairs},
                                     check=False)
        return Relation(self.dst, self.src, {(b, a) for a, b in self.pairs},
                        check=False)


class ReflexiveRelation(Relation):
    """Diagonal-containing pair subalgebra of X × X."""

    __slots__ = ()

    def __init__(self, base, pairs, check=True):
        super().__init__(base, base, pairs, check=False)
        for a in base.elements():
            if (a, a) not in self.pairs:
                raise ShapeError(f"missing diagonal pair ({a},{a})")
        if check:
            self._check_closed()

    @property
    def base(self):
        return self.src

    def __repr__(self):
        return f"ReflexiveRelation({self.src.name}, {sorted(self.pairs)})"

    def is_symmetric(self):
        return all((b, a) in self.pairs for a, b in self.pairs)

    def is_transitive(self):
        related = {}
        for a, b in self.pairs:
            related.setdefault(a, set()).add(b)
        return all(related.get(b, set()) <= related[a]
                   for a in related for b in related[a])

    def is_equivalence(self):
        return self.is_symmetric() and self.is_transitive()

    # internal equivalence relations in a variety are the congruences
    is_congruence = is_equivalence

    def point(self):
        return relation_point(self)


def diagonal(base):
    return ReflexiveRelation(base, ((a, a) for a in base.elements()),
                             check=False)


def full_relation(base):
    return ReflexiveRelation(base, ((a, b) for a in base.elements()
                                    for b in base.elements()), check=False)


def reflexive_from_pairs(base, pairs):
    """Validated reflexive relation from raw pairs (diagonal added)."""
    return ReflexiveRelation(base, set(pairs) | set(diagonal(base).pairs))


def generated_reflexive(base, pairs):
    """Smallest reflexive pair-subalgebra containing the given pairs."""
    sq = core.square(base)
    seed = {sq.encode(a, a) for a in base.elements()}
    seed.update(sq.encode(a, b) for a, b in pairs)
    closed = sq.algebra.closure(seed)
    return ReflexiveRelation(base, (sq.decode(i) for i in closed), check=False)


def kernel_pair(f):
    """R[f]: always a congruence."""
    pairs = {(a, b) for a in f.source.elements() for b in f.source.elements()
             if f(a) == f(b)}
    return ReflexiveRelation(f.source, pairs, check=False)


@lru_cache(maxsize=100000)
def materialize(rel):
    """The relation as an algebra on its sorted pair carrier."""
    return core.power_subalgebra(rel.src, rel.pairs,
                                 name=f"rel({rel.src.name})")


@lru_cache(maxsize=100000)
def relation_point(rel):
    """The split point (d0 : R -> X, diagonal section)."""
    mat = materialize(rel)
    d0 = mat.component_hom(0)
    s0 = mat.lift(rel.src, lambda x: (x, x))
    return SplitPoint(d0, s0)


def relation_legs(rel):
    """d0, d1 and (for reflexive relations) s0 as tabulated homs."""
    mat = materialize(rel)
    d0 = mat.component_hom(0, rel.src)
    d1 = mat.component_hom(1, rel.dst)
    s0 = None
    if isinstance(rel, ReflexiveRelation):
        s0 = mat.lift(rel.src, lambda x: (x, x))
    return mat, d0, d1, s0


def is_sigma_relation(rel, sigma):
    """Apply the class predicate to the point (d0, s0)."""
    return sigma.contains(rel.point())


# ---------------------------------------------------------------------------
# Simplicial kernel and the transitivity construction


@dataclass(frozen=True)
class SimplicialKernel:
    """Triples (x0,x1,x2) with x0Rx1, x1Rx2 and x0Rx2, with projections
    onto the three extracted pairs and the two degeneracies."""

    relation: ReflexiveRelation
    domain: core.TupleAlgebra
    pi0: Hom
    pi1: Hom
    pi2: Hom
    sigma0: Hom
    sigma1: Hom

    @property
    def triples(self):
        return self.domain.carrier


def simplicial_kernel(rel):
    pairs = rel.pairs
    triples = {(x0, x1, x2)
               for x0, x1 in pairs
               for x1b, x2 in pairs
               if x1b == x1 and (x0, x2) in pairs}
    dom = core.power_subalgebra(rel.base, triples,
                                name=f"K({rel.base.name})")
    mat = materialize(rel)
    ralg = mat.algebra
    idx = mat.index_of
    pi0 = Hom(dom.algebra, ralg, tuple(idx[(t[0], t[1])] for t in dom.carrier))
    pi1 = Hom(dom.algebra, ralg, tuple(idx[(t[0], t[2])] for t in dom.carrier))
    pi2 = Hom(dom.algebra, ralg, tuple(idx[(t[1], t[2])] for t in dom.carrier))
    sigma0 = dom.lift(ralg, lambda i: (mat.carrier[i][0], mat.carrier[i][0],
                                       mat.carrier[i][1]))
    sigma1 = dom.lift(ralg, lambda i: (mat.carrier[i][0], mat.carrier[i][1],
                                       mat.carrier[i][1]))
    return SimplicialKernel(rel, dom, pi0, pi1, pi2, sigma0, sigma1)


def composable_pairs(rel):
    """R ×_X R materialized over R-indices."""
    mat = materialize(rel)
    idx = mat.index_of
    pairs = {(idx[(a, b)], idx[(c, d)])
             for a, b in rel.pairs for c, d in rel.pairs if b == c}
    return core.power_subalgebra(mat.algebra, pairs,
                                 name=f"comp({rel.base.name})"), mat


def transitivity_by_construction(rel):
    """The transitivity map R ×_X R -> R obtained by inverting the
    factorization of the simplicial kernel, when that is bijective."""
    comp, mat = composable_pairs(rel)
    idx = mat.index_of
    mapping = []
    for i, j in comp.carrier:
        x0 = mat.carrier[i][0]
        x2 = mat.carrier[j][1]
        if (x0, x2) not in rel.pairs:
            return None
        mapping.append(idx[(x0, x2)])
    return Hom(comp.algebra, mat.algebra, tuple(mapping))


def transitivity_gap(rel):
    """A composable pair witnessing non-transitivity, if any."""
    comp, mat = composable_pairs(rel)
    for i, j in comp.carrier:
        x0 = mat.carrier[i][0]
        x2 = mat.carrier[j][1]
        if (x0, x2) not in rel.pairs:
            return (mat.carrier[i], mat.carrier[j])
    return None


# ---------------------------------------------------------------------------
# Composition, permutation, images


def compose(r, s):
    """Set composition {(x,z) : ∃y. xRy and ySz}; a subalgebra because it
    is the image of the middle pullback."""
    if r.dst != s.src:
        raise ObjectMismatch("middle objects do not match")
    by_src = {}
    for y, z in s.pairs:
        by_src.setdefault(y, set()).add(z)
    pairs = {(x, z) for x, y in r.pairs for z in by_src.get(y, ())}
    if isinstance(r, ReflexiveRelation) and isinstance(s, ReflexiveRelation):
        return ReflexiveRelation(r.src, pairs, check=False)
    return Relation(r.src, s.dst, pairs, check=False)


def permutes(r, s):
    if r.src != s.src or r.dst != s.dst or r.src != r.dst:
        raise ObjectMismatch("permutation needs two relations on one object")
    return compose(r, s).pairs == compose(s, r).pairs


def direct_image(f, rel):
    if not f.is_surjective():
        raise NotEpi("direct image requires a surjective hom")
    if rel.src != f.source:
        raise ObjectMismatch("relation does not live on the hom's source")
    pairs = {(f(a), f(b)) for a, b in rel.pairs}
    return ReflexiveRelation(f.target, pairs, check=False)


def inverse_image(u, rel):
    if rel.src != u.target:
        raise ObjectMismatch("relation does not live on the hom's target")
    pairs = {(a, b) for a in u.source.elements() for b in u.source.elements()
             if (u(a), u(b)) in rel.pairs}
    if isinstance(rel, ReflexiveRelation):
        return ReflexiveRelation(u.source, pairs, check=False)
    return Relation(u.source, u.source, pairs, check=False)


# ---------------------------------------------------------------------------
# Enumeration

RELATION_ORDER_BOUND = 6


@lru_cache(maxsize=1024)
def _reflexive_index_sets(base):
    if base.order > RELATION_ORDER_BOUND:
        raise BoundExceeded(
            f"relation enumeration bounded at order {RELATION_ORDER_BOUND}")
    sq = core.square(base)
    alg = sq.algebra
    start = alg.closure(sq.encode(a, a) for a in base.elements())
    found = {start}
    queue = [start]
    while queue:
        cur = queue.pop()
        for i in range(alg.order):
            if i not in cur:
                bigger = alg.closure(cur | {i})
                if bigger not in found:
                    found.add(bigger)
                    queue.append(bigger)
    return tuple(sorted(found, key=lambda s: (len(s), sorted(s))))


def enumerate_reflexive_relations(base, symmetric=None, equivalence=None,
                                  sigma=None):
    """All diagonal-containing pair subalgebras, with optional filters."""
    sq = core.square(base)
    out = []
    for idxset in _reflexive_index_sets(base):
        rel = ReflexiveRelation(base, (sq.decode(i) for i in idxset),
                                check=False)
        if symmetric is not None and rel.is_symmetric() != symmetric:
            continue
        if equivalence is not None and rel.is_equivalence() != equivalence:
            continue
        if sigma is not None and not is_sigma_relation(rel, sigma):
            continue
        out.append(rel)
    return out


def congruences(base):
    return enumerate_reflexive_relations(base, equivalence=True)


def congruence_generated(base, pairs):
    """Smallest congruence containing the pairs."""
    cur = set(pairs)
    cur.update((a, a) for a in base.elements())
    n = base.order
    while True:
        before = len(cur)
        cur.update((b, a) for a, b in set(cur))
        # transitive closure
        related = {a: {a} for a in range(n)}
        for a, b in cur:
            related[a].add(b)
        changed = True
        while changed:
            changed = False
            for a in range(n):
                extra = set()
                for b in related[a]:
                    extra |= related[b]
                if not extra <= related[a]:
                    related[a] |= extra
                    changed = True
        cur = {(a, b) for a in range(n) for b in related[a]}
        cur = set(generated_reflexive(base, cur).pairs)
        if len(cur) == before:
            return ReflexiveRelation(base, cur, check=False)


def join_congruence(r, s):
    if r.base != s.base:
        raise ObjectMismatch("join needs congruences on one object")
    return congruence_generated(r.base, r.pairs | s.pairs)


# ---------------------------------------------------------------------------
# Reflexive graphs


@dataclass(frozen=True)
class ReflexiveGraph:
    d0: Hom
    d1: Hom
    s0: Hom

    def __post_init__(self):
        if self.d0.source != self.d1.source or self.d0.target != self.d1.target:
            raise SignatureMismatch("graph legs do not share endpoints")
        if self.s0.source != self.d0.target or self.s0.target != self.d0.source:
            raise SignatureMismatch("graph section endpoints wrong")
        idx = tuple(range(self.d0.target.order))
        if self.s0.then(self.d0).mapping != idx or \
                self.s0.then(self.d1).mapping != idx:
            raise SignatureMismatch("s0 is not a common section of d0, d1")

    @property
    def edges(self):
        return self.d0.source

    @property
    def vertices(self):
        return self.d0.target

    def point(self):
        return SplitPoint(self.d0, self.s0)

    def composable_pairs(self):
        """Pairs (u,v) of edge indices with d1(u) = d0(v)."""
        pairs = {(u, v) for u in self.edges.elements()
                 for v in self.edges.elements() if self.d1(u) == self.d0(v)}
        return core.power_subalgebra(self.edges, pairs,
                                     name=f"{self.edges.name}|2")

    def composable_triples(self):
        triples = {(u, v, w)
                   for u in self.edges.elements()
                   for v in self.edges.elements()
                   for w in self.edges.elements()
                   if self.d1(u) == self.d0(v) and self.d1(v) == self.d0(w)}
        return core.power_subalgebra(self.edges, triples,
                                     name=f"{self.edges.name}|3")


def graph_of_relation(rel):
    mat, d0, d1, s0 = relation_legs(rel)
    return ReflexiveGraph(d0, d1, s0)


def graph_of_point(p):
    return ReflexiveGraph(p.f, p.f, p.s)

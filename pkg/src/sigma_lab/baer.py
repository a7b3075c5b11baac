"""Abelian special extensions, directions, torsors and Baer sums.

An extension is a surjection f whose kernel relation is a class relation
centralizing itself.  Quotienting the kernel relation by the connector
identification produces the direction: an abelian group point.  Torsors
over a fixed direction add by the fibre-product-and-identify rule; the
identification orientation follows q1(x2,x1) = q2(x1',x2').
"""

from __future__ import annotations

from dataclasses import dataclass

from . import centrality, core, points, relations
from .core import Hom
from .errors import (
    DirectionMismatch,
    NotAbelianSpecial,
    NotEpi,
    SelfCheckFailed,
)
from .points import SplitPoint


@dataclass(frozen=True)
class Extension:
    f: Hom

    def __post_init__(self):
        if not self.f.is_surjective():
            raise NotEpi("extensions are surjections")

    @property
    def total(self):
        return self.f.source

    @property
    def base(self):
        return self.f.target

    def kernel_relation(self):
        return relations.kernel_pair(self.f)


def is_abelian_sigma_special(f, sigma):
    if not f.is_surjective():
        raise NotEpi("extensions are surjections")
    rf = relations.kernel_pair(f)
    return relations.is_sigma_relation(rf, sigma) and \
        centrality.centralizes(rf, rf)


@dataclass(frozen=True)
class Direction:
    """Abelian group point: carrier point (f̄, s̄) with fibrewise addition
    on the pullback and fibrewise inversion."""

    point: SplitPoint
    addpb: core.PullbackData
    add: Hom
    neg: Hom

    @property
    def carrier(self):
        return self.point.total

    def add_val(self, a, b):
        return self.add(self.addpb.encode(a, b))

    def neg_val(self, a):
        return self.neg(a)

    def unit_val(self, y):
        return self.point.s(y)

    def validate(self, sigma=None):
        fbar, sbar = self.point.f, self.point.s
        for i in range(self.addpb.algebra.order):
            a, b = self.addpb.decode(i)
            v = self.add(i)
            if fbar(v) != fbar(a):
                raise SelfCheckFailed("direction", "addition leaves the fibre")
            if self.add_val(b, a) != v:
                raise SelfCheckFailed("direction", "addition not commutative")
            if self.add_val(sbar(fbar(a)), a) != a:
                raise SelfCheckFailed("direction", "unit law fails")
            if self.add_val(a, self.neg(a)) != sbar(fbar(a)):
                raise SelfCheckFailed("direction", "inverse law fails")
        for a in self.carrier.elements():
            for b in self.carrier.elements():
                if fbar(a) != fbar(b):
                    continue
                ab = self.add_val(a, b)
                for c in self.carrier.elements():
                    if fbar(c) != fbar(a):
                        continue
                    if self.add_val(ab, c) != self.add_val(a,
                                                           self.add_val(b, c)):
                        raise SelfCheckFailed("direction",
                                              "addition not associative")
        if sigma is not None and not sigma.contains(self.point):
            raise SelfCheckFailed("direction",
                                  f"direction point not in {sigma.name}")


@dataclass(frozen=True)
class Torsor:
    """Extension with the discrete fibration q : R[f] -> direction."""

    ext: Extension
    q: Hom
    direction: Direction

    def kernel_carrier(self):
        return relations.materialize(self.ext.kernel_relation())

    def q_val(self, a, b):
        mat = self.kernel_carrier()
        return self.q(mat.index_of[(a, b)])

    def validate(self):
        f = self.ext.f
        d = self.direction
        mat = self.kernel_carrier()
        fbar, sbar = d.point.f, d.point.s
        for i, (a, b) in enumerate(mat.carrier):
            v = self.q(i)
            if fbar(v) != f(a):
                raise SelfCheckFailed("torsor", "q leaves the fibre")
            if a == b and v != sbar(f(a)):
                raise SelfCheckFailed("torsor", "unit law q(x,x) fails")
            if self.q(mat.index_of[(b, a)]) != d.neg(v):
                raise SelfCheckFailed("torsor", "twist law fails")
        # discrete fibration: both (q, d_i) maps are bijections onto the
        # pullback of fbar against f
        wanted = {(alpha, x) for alpha in d.carrier.elements()
                  for x in f.source.elements() if fbar(alpha) == f(x)}
        for comp in (0, 1):
            seen = set()
            for i, pair in enumerate(mat.carrier):
                key = (self.q(i), pair[comp])
                if key in seen:
                    raise SelfCheckFailed("torsor",
                                          f"fibration not injective ({comp})")
                seen.add(key)
            if seen != wanted:
                raise SelfCheckFailed("torsor",
                                      f"fibration not surjective ({comp})")


def direction_of(f, sigma, validate=True):
    """Build the torsor of an abelian special extension by quotienting the
    kernel relation along the connector identification."""
    if not f.is_surjective():
        raise NotEpi("extensions are surjections")
    rf = relations.kernel_pair(f)
    if not relations.is_sigma_relation(rf, sigma):
        raise NotAbelianSpecial(f"kernel relation not in {sigma.name}")
    cand = centrality.connector(rf, rf)
    if cand is None:
        raise NotAbelianSpecial("kernel relation does not centralize itself")
    mat = relations.materialize(rf)
    idx = mat.index_of
    tidx = cand.domain.domain.index_of
    pmap = cand.p.mapping
    ident = set()
    for a, b in rf.pairs:
        i = idx[(a, b)]
        for b2 in f.fiber(f(b)):
            a2 = pmap[tidx[(a, b, b2)]]
            ident.add((i, idx[(a2, b2)]))
    quot = core.congruence_quotient(mat.algebra, ident,
                                    name=f"dir({f.source.name})")
    abar = quot.algebra
    y = f.target
    reps = [mat.carrier[next(iter(cls))] for cls in quot.classes]
    fbar = Hom(abar, y, tuple(f(r[0]) for r in reps))
    sbar_map = []
    for b in y.elements():
        x0 = f.fiber(b)[0]
        sbar_map.append(quot.class_of[idx[(x0, x0)]])
    sbar = Hom(y, abar, tuple(sbar_map))
    point = SplitPoint(fbar, sbar)
    addpb = core.pullback(fbar, fbar)
    add_map = []
    for i in range(addpb.algebra.order):
        alpha, beta = addpb.decode(i)
        values = set()
        for ri in quot.classes[alpha]:
            a, b = mat.carrier[ri]
            for si in quot.classes[beta]:
                c, e = mat.carrier[si]
                if c == b:
                    values.add(quot.class_of[idx[(a, e)]])
        if len(values) != 1:
            raise SelfCheckFailed("direction",
                                  f"composite addition ambiguous: {values}")
        add_map.append(values.pop())
    add = Hom(addpb.algebra, abar, tuple(add_map))
    neg_map = []
    for cls in quot.classes:
        values = {quot.class_of[idx[(b, a)]]
                  for a, b in (mat.carrier[i] for i in cls)}
        if len(values) != 1:
            raise SelfCheckFailed("direction", "inversion ambiguous")
        neg_map.append(values.pop())
    neg = Hom(abar, abar, tuple(neg_map))
    direction = Direction(point, addpb, add, neg)
    torsor = Torsor(Extension(f), quot.projection, direction)
    if validate:
        direction.validate(sigma)
        torsor.validate()
    return torsor


def split_torsor(direction):
    """The direction as an extension of itself: the zero class."""
    fbar = direction.point.f
    rf = relations.kernel_pair(fbar)
    mat = relations.materialize(rf)
    q = Hom(mat.algebra, direction.carrier,
            tuple(direction.add_val(b, direction.neg(a))
                  for a, b in mat.carrier))
    t = Torsor(Extension(fbar), q, direction)
    t.validate()
    return t


def torsor_twist(t):
    """Same extension with the two kernel projections swapped."""
    mat = t.kernel_carrier()
    q2 = Hom(mat.algebra, t.direction.carrier,
             tuple(t.q(mat.index_of[(b, a)]) for a, b in mat.carrier))
    out = Torsor(t.ext, q2, t.direction)
    out.validate()
    return out


def group_point_iso(d1, d2):
    """Isomorphism of group points d1 -> d2, or None."""
    a1, a2 = d1.carrier, d2.carrier
    if a1.order != a2.order or d1.point.base != d2.point.base:
        return None
    for h in core.enumerate_homs(
            a1, a2, injective=True, surjective=True,
            allowed=lambda e: d2.point.f.fiber(d1.point.f(e))):
        if any(h(d1.point.s(y)) != d2.point.s(y)
               for y in d1.point.base.elements()):
            continue
        ok = True
        for i in range(d1.addpb.algebra.order):
            a, b = d1.addpb.decode(i)
            if h(d1.add(i)) != d2.add_val(h(a), h(b)):
                ok = False
                break
        if ok:
            return h
    return None


def retarget(t, h, new_direction):
    """Transport a torsor along a group-point isomorphism of directions."""
    return Torsor(t.ext, t.q.then(h), new_direction)


def torsor_iso(t1, t2):
    """A torsor morphism t1 -> t2 (necessarily iso), or None."""
    if t1.direction != t2.direction:
        raise DirectionMismatch("torsors have different directions")
    f1, f2 = t1.ext.f, t2.ext.f
    if f1.target != f2.target or f1.source.order != f2.source.order:
        return None
    mat1 = t1.kernel_carrier()
    for h in core.enumerate_homs(f1.source, f2.source,
                                 allowed=lambda x: f2.fiber(f1(x))):
        if all(t2.q_val(h(a), h(b)) == t1.q(i)
               for i, (a, b) in enumerate(mat1.carrier)):
            if not h.is_iso():
                raise SelfCheckFailed("torsor-iso",
                                      "torsor morphism is not bijective")
            return h
    return None


def baer_sum(t1, t2, sigma=None, validate=True):
    """Quotient of the fibre product by the antidiagonal identification."""
    if t1.direction != t2.direction:
        raise DirectionMismatch("torsors have different directions")
    d = t1.direction
    f1, f2 = t1.ext.f, t2.ext.f
    pb = core.pullback(f1, f2)
    r1 = relations.kernel_pair(f1).pairs
    r2 = relations.kernel_pair(f2).pairs
    ident = set()
    for i in range(pb.algebra.order):
        a, b = pb.decode(i)
        for j in range(pb.algebra.order):
            a2, b2 = pb.decode(j)
            if (a, a2) in r1 and (b, b2) in r2 and \
                    t1.q_val(a2, a) == t2.q_val(b, b2):
                ident.add((i, j))
    quot = core.congruence_quotient(pb.algebra, ident,
                                    name=f"({f1.source.name}@{f2.source.name})")
    total = quot.algebra
    y = f1.target
    reps = [pb.decode(next(iter(cls))) for cls in quot.classes]
    fsum = Hom(total, y, tuple(f1(r[0]) for r in reps))
    rf = relations.kernel_pair(fsum)
    mat = relations.materialize(rf)
    q_map = []
    for u, v in mat.carrier:
        a, b = reps[u]
        values = set()
        for j in quot.classes[v]:
            c, e = pb.decode(j)
            values.add(d.add_val(t1.q_val(a, c), t2.q_val(b, e)))
        if len(values) != 1:
            raise SelfCheckFailed("baer-sum", f"sum cocycle ambiguous {values}")
        q_map.append(values.pop())
    q = Hom(mat.algebra, d.carrier, tuple(q_map))
    out = Torsor(Extension(fsum), q, d)
    if validate:
        out.validate()
        if sigma is not None and not is_abelian_sigma_special(fsum, sigma):
            raise SelfCheckFailed("baer-sum", "sum is not abelian special")
    return out


# ---------------------------------------------------------------------------
# Ext tables


def product_direction(base, fib):
    """The split direction with fibre `fib` (an abelian group monoid)."""
    if not (fib.kind == "monoid" and fib.is_group() and fib.is_commutative()):
        raise NotAbelianSpecial("fibre must be an abelian group")
    point = points.product_point(base, fib)
    prod = core.product(base, fib)
    inv = [0] * fib.order
    for a in fib.elements():
        for b in fib.elements():
            if fib.table[a][b] == fib.unit:
                inv[a] = b
    addpb = core.pullback(point.f, point.f)
    add_map = []
    for i in range(addpb.algebra.order):
        p1, p2 = addpb.decode(i)
        y1, u = prod.decode(p1)
        _, v = prod.decode(p2)
        add_map.append(prod.encode(y1, fib.table[u][v]))
    add = Hom(addpb.algebra, prod.algebra, tuple(add_map))
    neg = Hom(prod.algebra, prod.algebra,
              tuple(prod.encode(*(lambda yv: (yv[0], inv[yv[1]]))(
                  prod.decode(i))) for i in range(prod.algebra.order)))
    d = Direction(point, addpb, add, neg)
    d.validate()
    return d


@dataclass
class ExtTable:
    direction: Direction
    classes: list
    table: tuple
    zero: int
    neg: tuple

    def class_count(self):
        return len(self.classes)

    def is_abelian_group(self):
        n = len(self.classes)
        t = self.table
        for i in range(n):
            if t[self.zero][i] != i or t[i][self.zero] != i:
                return False
            if t[i][self.neg[i]] != self.zero:
                return False
            for j in range(n):
                if t[i][j] != t[j][i]:
                    return False
                for k in range(n):
                    if t[t[i][j]][k] != t[i][t[j][k]]:
                        return False
        return True


def ext_table(direction, base, sigma, max_order=4, candidates=None):
    """Torsor classes with the given direction and their Baer-sum table."""
    if candidates is None:
        candidates = [a for a in core.catalog(direction.carrier.kind,
                                              max_order)]
    torsors = []
    for x in candidates:
        for f in core.enumerate_homs(x, base, surjective=True):
            if not is_abelian_sigma_special(f, sigma):
                continue
            t = direction_of(f, sigma)
            h = group_point_iso(t.direction, direction)
            if h is None:
                continue
            torsors.append(retarget(t, h, direction))
    classes = []
    for t in torsors:
        if not any(torsor_iso(t, rep) is not None for rep in classes):
            classes.append(t)
    zero_t = split_torsor(direction)
    zero = None
    for i, rep in enumerate(classes):
        if torsor_iso(zero_t, rep) is not None:
            zero = i
            break
    if zero is None:
        raise SelfCheckFailed("ext-table",
                              "split class missing from the enumeration")
    n = len(classes)
    table = []
    for i in range(n):
        row = []
        for j in range(n):
            s = baer_sum(classes[i], classes[j], sigma)
            hit = [k for k in range(n)
                   if torsor_iso(s, classes[k]) is not None]
            if len(hit) != 1:
                raise SelfCheckFailed("ext-table",
                                      f"sum lands in {len(hit)} classes")
            row.append(hit[0])
        table.append(tuple(row))
    neg = []
    for i in range(n):
        tw = torsor_twist(classes[i])
        hit = [k for k in range(n) if torsor_iso(tw, classes[k]) is not None]
        if len(hit) != 1:
            raise SelfCheckFailed("ext-table", "twist class ambiguous")
        neg.append(hit[0])
    return ExtTable(direction, classes, tuple(table), zero, tuple(neg))


# ---------------------------------------------------------------------------
# Independent classification oracle (normalized 2-cocycles, trivial action)


def _group_inverse(table, unit):
    n = len(table)
    inv = [0] * n
    for a in range(n):
        for b in range(n):
            if table[a][b] == unit:
                inv[a] = b
    return inv


def cocycle_class_count(base, fib):
    """|Z²/B²| for central extensions of `base` by `fib` with trivial
    action; both must be abelian groups given as monoids."""
    import itertools as it

    yt, at = base.table, fib.table
    n, m = base.order, fib.order
    if not (base.is_group() and fib.is_group() and fib.is_commutative()):
        raise NotAbelianSpecial("cocycle oracle needs abelian group data")
    others = [y for y in range(n) if y != base.unit]
    cells = [(a, b) for a in others for b in others]
    cocycles = []
    for combo in it.product(range(m), repeat=len(cells)):
        c = [[fib.unit] * n for _ in range(n)]
        for (a, b), v in zip(cells, combo):
            c[a][b] = v
        ok = True
        for y1 in range(n):
            for y2 in range(n):
                for y3 in range(n):
                    lhs = at[c[y1][y2]][c[yt[y1][y2]][y3]]
                    rhs = at[c[y2][y3]][c[y1][yt[y2][y3]]]
                    if lhs != rhs:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            cocycles.append(tuple(map(tuple, c)))
    ainv = _group_inverse(at, fib.unit)
    coboundaries = set()
    for combo in it.product(range(m), repeat=len(others)):
        b = [fib.unit] * n
        for y, v in zip(others, combo):
            b[y] = v
        c = tuple(tuple(at[at[b[y1]][b[y2]]][ainv[b[yt[y1][y2]]]]
                        for y2 in range(n)) for y1 in range(n))
        coboundaries.add(c)
    return len(set(cocycles)) // len(coboundaries)

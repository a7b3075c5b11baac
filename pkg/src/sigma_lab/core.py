"""Finite monoids, quandles and semirings as validated operation tables.

Carriers are dense 0-based index sets.  Every construction (product,
subalgebra, quotient, pullback) returns fresh immutable algebras whose
iteration order is ascending-index, so all derived enumerations are
deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import (
    AxiomViolation,
    BoundExceeded,
    InvalidHom,
    NotACongruence,
    ShapeError,
    SignatureMismatch,
)


def freeze_table(rows):
    try:
        return tuple(tuple(int(v) for v in row) for row in rows)
    except TypeError as exc:
        raise ShapeError(f"table rows must be sequences of integers: {exc}")


def check_shape(table, order):
    if order <= 0:
        raise ShapeError("order must be a positive integer")
    if len(table) != order:
        raise ShapeError(f"expected {order} rows, got {len(table)}")
    for a, row in enumerate(table):
        if len(row) != order:
            raise ShapeError(f"row {a} has length {len(row)}, expected {order}")
        for b, v in enumerate(row):
            if not 0 <= v < order:
                raise ShapeError(f"entry table[{a}][{b}]={v} out of range")


class FiniteAlgebra:
    """Common behaviour: closure, subalgebra tests, canonical forms.

    Subclasses expose their signature through ``ops()`` (named binary
    operation tables) and ``constants()`` (named distinguished elements);
    everything generic is written against those two hooks.
    """

    kind = "?"
    __slots__ = ("order", "name", "_hash")

    def ops(self):
        raise NotImplementedError

    def constants(self):
        raise NotImplementedError

    @classmethod
    def from_parts(cls, order, tables, constants, name=None, validate=True):
        raise NotImplementedError

    def validate(self):
        raise NotImplementedError

    # -- identity --------------------------------------------------------
    def _key(self):
        return (self.kind, self.order, tuple(t for _, t in self.ops()),
                tuple(c for _, c in self.constants()))

    def __eq__(self, other):
        return isinstance(other, FiniteAlgebra) and self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        return f"<{self.kind} {self.name or '?'} order={self.order}>"

    def elements(self):
        return range(self.order)

    def renamed(self, name):
        tables = [t for _, t in self.ops()]
        consts = [c for _, c in self.constants()]
        return type(self).from_parts(self.order, tables, consts, name=name,
                                     validate=False)

    # -- closure ---------------------------------------------------------
    def closure(self, seed):
        """Smallest operation-closed, constant-containing subset ⊇ seed."""
        known = {c for _, c in self.constants()}
        known.update(seed)
        tables = [t for _, t in self.ops()]
        work = sorted(known)
        while work:
            a = work.pop()
            for t in tables:
                for b in list(known):
                    for c in (t[a][b], t[b][a]):
                        if c not in known:
                            known.add(c)
                            work.append(c)
        return frozenset(known)

    def is_closed(self, subset):
        subset = set(subset)
        if not all(c in subset for _, c in self.constants()):
            return False
        for _, t in self.ops():
            for a in subset:
                for b in subset:
                    if t[a][b] not in subset:
                        return False
        return True

    def subsets_closed(self):
        """All subalgebra carriers, ascending by (size, carrier).

        The empty carrier appears exactly when the signature has no
        constants (quandles), matching the subobjects of the variety.
        """
        found = {self.closure(())}
        queue = list(found)
        while queue:
            cur = queue.pop()
            for x in self.elements():
                if x not in cur:
                    bigger = self.closure(cur | {x})
                    if bigger not in found:
                        found.add(bigger)
                        queue.append(bigger)
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    # -- isomorphism -----------------------------------------------------
    def relabel(self, perm):
        """Transport the structure along x ↦ perm[x]."""
        n = self.order
        tables = []
        for _, t in self.ops():
            nt = [[0] * n for _ in range(n)]
            for a in range(n):
                for b in range(n):
                    nt[perm[a]][perm[b]] = perm[t[a][b]]
            tables.append(freeze_table(nt))
        consts = [perm[c] for _, c in self.constants()]
        return type(self).from_parts(n, tables, consts, name=self.name,
                                     validate=False)

    def canonical_key(self):
        n = self.order
        if n > 7:
            raise BoundExceeded("canonical forms limited to order <= 7")
        best = None
        for perm in itertools.permutations(range(n)):
            tabs = []
            for _, t in self.ops():
                nt = [[0] * n for _ in range(n)]
                for a in range(n):
                    ta = t[a]
                    pa = perm[a]
                    for b in range(n):
                        nt[pa][perm[b]] = perm[ta[b]]
                tabs.append(tuple(map(tuple, nt)))
            key = (tuple(tabs), tuple(perm[c] for _, c in self.constants()))
            if best is None or key < best:
                best = key
        return (self.kind, n, best)

    def is_isomorphic(self, other):
        if self.kind != other.kind or self.order != other.order:
            return False
        return self.canonical_key() == other.canonical_key()


class FiniteMonoid(FiniteAlgebra):
    kind = "monoid"
    __slots__ = ("table", "unit")

    def __init__(self, order, table, unit, name=None, validate=True):
        self.order = int(order)
        self.table = freeze_table(table)
        self.unit = int(unit)
        self.name = name
        self._hash = None
        if validate:
            self.validate()

    def validate(self):
        check_shape(self.table, self.order)
        if not 0 <= self.unit < self.order:
            raise ShapeError(f"unit {self.unit} out of range")
        t = self.table
        u = self.unit
        for a in range(self.order):
            if t[u][a] != a or t[a][u] != a:
                raise AxiomViolation("unit", (u, a))
        for a in range(self.order):
            ta = t[a]
            for b in range(self.order):
                tab = t[ta[b]]
                tb = t[b]
                for c in range(self.order):
                    if tab[c] != ta[tb[c]]:
                        raise AxiomViolation("associativity", (a, b, c))

    def ops(self):
        return (("op", self.table),)

    def constants(self):
        return (("unit", self.unit),)

    @classmethod
    def from_parts(cls, order, tables, constants, name=None, validate=True):
        return cls(order, tables[0], constants[0], name=name, validate=validate)

    def mul(self, a, b):
        return self.table[a][b]

    def is_commutative(self):
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order)
                   for b in range(a))

    def is_group(self):
        u = self.unit
        t = self.table
        return all(any(t[a][b] == u for b in range(self.order))
                   for a in range(self.order))


class FiniteQuandle(FiniteAlgebra):
    kind = "quandle"
    __slots__ = ("table",)

    def __init__(self, order, table, name=None, validate=True):
        self.order = int(order)
        self.table = freeze_table(table)
        self.name = name
        self._hash = None
        if validate:
            self.validate()

    def validate(self):
        check_shape(self.table, self.order)
        t = self.table
        n = self.order
        for a in range(n):
            if t[a][a] != a:
                raise AxiomViolation("idempotency", (a,))
        for b in range(n):
            if len({t[a][b] for a in range(n)}) != n:
                raise AxiomViolation("right-translation-bijective", (b,))
        for a in range(n):
            for b in range(n):
                ab = t[a][b]
                for c in range(n):
                    if t[ab][c] != t[t[a][c]][t[b][c]]:
                        raise AxiomViolation("self-distributivity", (a, b, c))

    def ops(self):
        return (("tri", self.table),)

    def constants(self):
        return ()

    @classmethod
    def from_parts(cls, order, tables, constants, name=None, validate=True):
        return cls(order, tables[0], name=name, validate=validate)

    def apply(self, a, b):
        return self.table[a][b]

    def is_latin(self):
        t = self.table
        n = self.order
        return all(len({t[a][b] for b in range(n)}) == n for a in range(n))


class FiniteSemiring(FiniteAlgebra):
    kind = "semiring"
    __slots__ = ("add_table", "mul_table", "zero", "one")

    def __init__(self, order, add_table, mul_table, name=None, validate=True):
        self.order = int(order)
        self.add_table = freeze_table(add_table)
        self.mul_table = freeze_table(mul_table)
        self.name = name
        self._hash = None
        self.zero = self._identity_of(self.add_table)
        self.one = self._identity_of(self.mul_table)
        if validate:
            self.validate()

    def _identity_of(self, table):
        if len(table) != self.order:
            return -1
        for e in range(self.order):
            if all(table[e][a] == a and table[a][e] == a
                   for a in range(self.order)):
                return e
        return -1

    def validate(self):
        check_shape(self.add_table, self.order)
        check_shape(self.mul_table, self.order)
        if self.zero < 0:
            raise AxiomViolation("additive-unit-exists", ())
        if self.one < 0:
            raise AxiomViolation("multiplicative-unit-exists", ())
        FiniteMonoid(self.order, self.add_table, self.zero)
        FiniteMonoid(self.order, self.mul_table, self.one)
        add, mul = self.add_table, self.mul_table
        n = self.order
        for a in range(n):
            for b in range(a):
                if add[a][b] != add[b][a]:
                    raise AxiomViolation("additive-commutativity", (a, b))
        z = self.zero
        for a in range(n):
            if mul[z][a] != z or mul[a][z] != z:
                raise AxiomViolation("absorbing-zero", (a,))
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]]:
                        raise AxiomViolation("left-distributivity", (a, b, c))
                    if mul[add[a][b]][c] != add[mul[a][c]][mul[b][c]]:
                        raise AxiomViolation("right-distributivity", (a, b, c))

    def ops(self):
        return (("add", self.add_table), ("mul", self.mul_table))

    def constants(self):
        return (("zero", self.zero), ("one", self.one))

    @classmethod
    def from_parts(cls, order, tables, constants, name=None, validate=True):
        return cls(order, tables[0], tables[1], name=name, validate=validate)

    def additive_monoid(self):
        return FiniteMonoid(self.order, self.add_table, self.zero,
                            name=(self.name or "srg") + "+", validate=False)

    def multiplicative_monoid(self):
        return FiniteMonoid(self.order, self.mul_table, self.one,
                            name=(self.name or "srg") + "*", validate=False)

    def is_ring(self):
        add = self.add_table
        z = self.zero
        return all(any(add[a][b] == z for b in range(self.order))
                   for a in range(self.order))


KINDS = {
    "monoid": FiniteMonoid,
    "quandle": FiniteQuandle,
    "semiring": FiniteSemiring,
}


def validate(kind, raw, name=None):
    """Build a validated algebra from raw table data.

    ``raw`` mirrors the JSON document fields: ``table``/``unit`` for
    monoids, ``table`` for quandles, ``addTable``/``mulTable`` for
    semirings.  Raises ShapeError, or AxiomViolation naming the first
    broken axiom with a witnessing tuple.
    """
    if kind == "monoid":
        return FiniteMonoid(raw["order"], raw["table"], raw["unit"], name=name)
    if kind == "quandle":
        return FiniteQuandle(raw["order"], raw["table"], name=name)
    if kind == "semiring":
        return FiniteSemiring(raw["order"], raw["addTable"], raw["mulTable"],
                              name=name)
    raise ShapeError(f"unknown kind {kind!r}")


def subalgebra_closure(algebra, seed):
    return algebra.closure(seed)


# ---------------------------------------------------------------------------
# Homomorphisms


@dataclass(frozen=True)
class Hom:
    """Tabulated structure-preserving map between same-kind algebras."""

    source: FiniteAlgebra
    target: FiniteAlgebra
    mapping: tuple

    def __post_init__(self):
        object.__setattr__(self, "mapping",
                           tuple(int(v) for v in self.mapping))
        if self.source.kind != self.target.kind:
            raise SignatureMismatch(f"{self.source.kind} -> {self.target.kind}")
        if len(self.mapping) != self.source.order:
            raise ShapeError("mapping length differs from source order")
        m = self.mapping
        for v in m:
            if not 0 <= v < self.target.order:
                raise ShapeError(f"image {v} out of range")
        for (nm, ts), (_, tt) in zip(self.source.ops(), self.target.ops()):
            for a in range(self.source.order):
                for b in range(self.source.order):
                    if m[ts[a][b]] != tt[m[a]][m[b]]:
                        raise InvalidHom(f"does not preserve {nm}", (a, b))
        for (nm, cs), (_, ct) in zip(self.source.constants(),
                                     self.target.constants()):
            if m[cs] != ct:
                raise InvalidHom(f"does not preserve {nm}", (cs,))

    def __call__(self, x):
        return self.mapping[x]

    def then(self, other):
        """self followed by other (i.e. other ∘ self)."""
        if other.source != self.target:
            raise SignatureMismatch("composition endpoints do not match")
        return Hom(self.source, other.target,
                   tuple(other.mapping[v] for v in self.mapping))

    def image(self):
        return frozenset(self.mapping)

    def is_surjective(self):
        return len(set(self.mapping)) == self.target.order

    def is_injective(self):
        return len(set(self.mapping)) == self.source.order

    def is_iso(self):
        return self.is_injective() and self.is_surjective()

    def inverse(self):
        if not self.is_iso():
            raise InvalidHom("not an isomorphism")
        inv = [0] * self.target.order
        for a, v in enumerate(self.mapping):
            inv[v] = a
        return Hom(self.target, self.source, tuple(inv))

    def fiber(self, y):
        return tuple(x for x, v in enumerate(self.mapping) if v == y)

    @staticmethod
    def identity(algebra):
        return Hom(algebra, algebra, tuple(range(algebra.order)))

    def __repr__(self):
        return (f"Hom({self.source.name or self.source.kind}->"
                f"{self.target.name or self.target.kind}:{list(self.mapping)})")


def identity_hom(algebra):
    return Hom.identity(algebra)


def terminal_object(kind):
    if kind == "monoid":
        return FiniteMonoid(1, ((0,),), 0, name="1")
    if kind == "quandle":
        return FiniteQuandle(1, ((0,),), name="1")
    if kind == "semiring":
        return FiniteSemiring(1, ((0,),), ((0,),), name="1")
    raise ShapeError(f"unknown kind {kind!r}")


def terminal_map(algebra):
    return Hom(algebra, terminal_object(algebra.kind), (0,) * algebra.order)


def unit_hom(src, dst):
    """The map collapsing a monoid/semiring to the unit constants of dst."""
    consts = dict(dst.constants())
    if "unit" in consts:
        return Hom(src, dst, (consts["unit"],) * src.order)
    raise SignatureMismatch("no constant map in this signature")


# ---------------------------------------------------------------------------
# Hom enumeration (backtracking with operation propagation)


def enumerate_homs(src, dst, fixed=None, allowed=None, surjective=False,
                   injective=False, limit=None):
    """All homs src -> dst in deterministic order.

    ``fixed`` pins images on a partial domain; ``allowed`` maps an element
    to its permitted images.  Backtracks over element images in ascending
    order, propagating forced values through the operation tables.
    """
    if src.kind != dst.kind:
        raise SignatureMismatch(f"{src.kind} vs {dst.kind}")
    n = src.order
    cand = []
    for x in range(n):
        opts = set(range(dst.order)) if allowed is None else set(allowed(x))
        cand.append(opts)
    for (_, cs), (_, ct) in zip(src.constants(), dst.constants()):
        cand[cs] &= {ct}
    if fixed:
        for x, v in fixed.items():
            cand[x] &= {v}
    op_pairs = [(ts, tt) for (_, ts), (_, tt) in zip(src.ops(), dst.ops())]

    def propagate(assign):
        changed = True
        while changed:
            changed = False
            for ts, tt in op_pairs:
                for a in range(n):
                    va = assign[a]
                    if va is None:
                        continue
                    row_s, row_t = ts[a], tt[va]
                    for b in range(n):
                        vb = assign[b]
                        if vb is None:
                            continue
                        c = row_s[b]
                        v = row_t[vb]
                        if assign[c] is None:
                            if v not in cand[c]:
                                return False
                            assign[c] = v
                            changed = True
                        elif assign[c] != v:
                            return False
        return True

    results = []

    def search(assign):
        if limit is not None and len(results) >= limit:
            return
        try:
            x = assign.index(None)
        except ValueError:
            mapping = tuple(assign)
            if surjective and len(set(mapping)) != dst.order:
                return
            if injective and len(set(mapping)) != n:
                return
            results.append(Hom(src, dst, mapping))
            return
        used = set(assign) - {None}
        for v in sorted(cand[x]):
            if injective and v in used:
                continue
            trial = list(assign)
            trial[x] = v
            if propagate(trial):
                search(trial)

    start = [None] * n
    for x in range(n):
        if not cand[x]:
            return []
        if len(cand[x]) == 1:
            start[x] = next(iter(cand[x]))
    if propagate(start):
        search(start)
    return results


def find_isomorphism(a, b):
    if a.kind != b.kind or a.order != b.order:
        return None
    homs = enumerate_homs(a, b, injective=True, surjective=True, limit=1)
    return homs[0] if homs else None


def force_hom(src, dst, seeds):
    """Close a partial element map under the operations.

    Returns (assignment, None) where the assignment extends the seeds over
    the generated subalgebra, or (None, witness) at the first conflict.
    """
    assign = dict(seeds)
    for (_, cs), (_, ct) in zip(src.constants(), dst.constants()):
        if assign.get(cs, ct) != ct:
            return None, cs
        assign[cs] = ct
    op_pairs = [(ts, tt) for (_, ts), (_, tt) in zip(src.ops(), dst.ops())]
    work = list(assign)
    while work:
        a = work.pop()
        va = assign[a]
        for ts, tt in op_pairs:
            for b in list(assign):
                vb = assign[b]
                for c, v in ((ts[a][b], tt[va][vb]), (ts[b][a], tt[vb][va])):
                    got = assign.get(c)
                    if got is None:
                        assign[c] = v
                        work.append(c)
                    elif got != v:
                        return None, c
    return assign, None


# ---------------------------------------------------------------------------
# Products, subalgebras, quotients, pullbacks, images


@dataclass(frozen=True)
class Product:
    algebra: FiniteAlgebra
    left: FiniteAlgebra
    right: FiniteAlgebra
    p0: Hom
    p1: Hom

    def encode(self, x, y):
        return x * self.right.order + y

    def decode(self, i):
        return divmod(i, self.right.order)

    def pair(self, f, g):
        """Universal pairing <f, g> : T -> left × right."""
        if f.source != g.source:
            raise SignatureMismatch("pairing needs a common source")
        if f.target != self.left or g.target != self.right:
            raise SignatureMismatch("pairing targets do not match the product")
        return Hom(f.source, self.algebra,
                   tuple(self.encode(f(x), g(x))
                         for x in range(f.source.order)))


@lru_cache(maxsize=4096)
def product(a, b):
    if a.kind != b.kind:
        raise SignatureMismatch(f"{a.kind} vs {b.kind}")
    na, nb = a.order, b.order
    n = na * nb
    tables = []
    for (_, ta), (_, tb) in zip(a.ops(), b.ops()):
        t = [[0] * n for _ in range(n)]
        for xa in range(na):
            for ya in range(nb):
                i = xa * nb + ya
                ti = t[i]
                for xb in range(na):
                    base = ta[xa][xb] * nb
                    trow = tb[ya]
                    off = xb * nb
                    for yb in range(nb):
                        ti[off + yb] = base + trow[yb]
        tables.append(freeze_table(t))
    consts = [ca * nb + cb for (_, ca), (_, cb) in zip(a.constants(),
                                                       b.constants())]
    name = f"({a.name or a.kind}x{b.name or b.kind})"
    alg = type(a).from_parts(n, tables, consts, name=name, validate=False)
    p0 = Hom(alg, a, tuple(i // nb for i in range(n)))
    p1 = Hom(alg, b, tuple(i % nb for i in range(n)))
    return Product(alg, a, b, p0, p1)


def square(a):
    return product(a, a)


@dataclass(frozen=True)
class Subalgebra:
    algebra: FiniteAlgebra
    ambient: FiniteAlgebra
    inclusion: Hom
    carrier: tuple
    index_of: dict = field(compare=False, hash=False, repr=False)


def subalgebra(ambient, subset, name=None):
    carrier = tuple(sorted(subset))
    if not ambient.is_closed(carrier):
        raise ShapeError(f"subset {carrier} is not a subalgebra carrier")
    index = {g: i for i, g in enumerate(carrier)}
    tables = []
    for _, t in ambient.ops():
        tables.append(freeze_table([[index[t[a][b]] for b in carrier]
                                    for a in carrier]))
    consts = [index[c] for _, c in ambient.constants()]
    alg = type(ambient).from_parts(len(carrier), tables, consts,
                                   name=name or f"sub({ambient.name})",
                                   validate=False)
    return Subalgebra(alg, ambient, Hom(alg, ambient, carrier), carrier, index)


@dataclass(frozen=True)
class Quotient:
    algebra: FiniteAlgebra
    projection: Hom
    class_of: tuple
    classes: tuple


def congruence_quotient(algebra, pairs, name=None):
    """Quotient by an equivalence pair-set; raises NotACongruence otherwise."""
    pairs = frozenset((int(a), int(b)) for a, b in pairs)
    n = algebra.order
    for a in range(n):
        if (a, a) not in pairs:
            raise NotACongruence((a, a), reason="not reflexive")
    for a, b in pairs:
        if (b, a) not in pairs:
            raise NotACongruence((a, b), reason="not symmetric")
    related = {a: set() for a in range(n)}
    for a, b in pairs:
        related[a].add(b)
    for a in range(n):
        for b in related[a]:
            if not related[b] <= related[a]:
                c = min(related[b] - related[a])
                raise NotACongruence((a, b, c), reason="not transitive")
    for _, t in algebra.ops():
        for a, b in pairs:
            for c in range(n):
                if (t[a][c], t[b][c]) not in pairs:
                    raise NotACongruence(((a, b), c), reason="not compatible")
                if (t[c][a], t[c][b]) not in pairs:
                    raise NotACongruence((c, (a, b)), reason="not compatible")
    reps = []
    class_of = [-1] * n
    for a in range(n):
        if class_of[a] >= 0:
            continue
        idx = len(reps)
        for b in related[a]:
            class_of[b] = idx
        reps.append(min(related[a]))
    k = len(reps)
    tables = []
    for _, t in algebra.ops():
        tables.append(freeze_table([[class_of[t[ra][rb]] for rb in reps]
                                    for ra in reps]))
    consts = [class_of[c] for _, c in algebra.constants()]
    alg = type(algebra).from_parts(k, tables, consts,
                                   name=name or f"{algebra.name}/~",
                                   validate=False)
    proj = Hom(algebra, alg, tuple(class_of))
    classes = tuple(frozenset(i for i in range(n) if class_of[i] == c)
                    for c in range(k))
    return Quotient(alg, proj, tuple(class_of), classes)


@dataclass(frozen=True)
class PullbackData:
    algebra: FiniteAlgebra
    pairs: frozenset
    p0: Hom
    p1: Hom
    inclusion: Hom
    product: Product
    index_of: dict = field(compare=False, hash=False, repr=False)

    def encode(self, x, y):
        return self.index_of[self.product.encode(x, y)]

    def decode(self, i):
        return self.product.decode(self.inclusion.mapping[i])


def pullback(f, g):
    """Pullback of f : X -> Z against g : Y -> Z inside X × Y."""
    if f.target != g.target:
        raise SignatureMismatch("pullback needs a common codomain")
    prod = product(f.source, g.source)
    carrier = frozenset(prod.encode(x, y)
                        for x in range(f.source.order)
                        for y in range(g.source.order)
                        if f(x) == g(y))
    sub = subalgebra(prod.algebra, carrier,
                     name=f"pb({f.source.name},{g.source.name})")
    p0 = sub.inclusion.then(prod.p0)
    p1 = sub.inclusion.then(prod.p1)
    pair_set = frozenset(prod.decode(i) for i in carrier)
    return PullbackData(sub.algebra, pair_set, p0, p1, sub.inclusion, prod,
                        sub.index_of)


def image_factorization(f):
    """f = mono ∘ regularEpi through the image subalgebra."""
    img = f.target.closure(frozenset(f.mapping))
    sub = subalgebra(f.target, img, name=f"im({f.source.name})")
    epi = Hom(f.source, sub.algebra, tuple(sub.index_of[v] for v in f.mapping))
    return epi, sub.inclusion


@dataclass(frozen=True)
class TupleAlgebra:
    """Subalgebra of a finite power of a base algebra on an explicit
    tuple carrier; the workhorse behind relations, triple domains and
    double relations."""

    base: FiniteAlgebra
    algebra: FiniteAlgebra
    carrier: tuple
    index_of: dict = field(compare=False, hash=False, repr=False)

    def component_hom(self, i, target=None):
        return Hom(self.algebra, target or self.base,
                   tuple(t[i] for t in self.carrier))

    def lift(self, source, fn):
        """Hom into the tuple algebra from pointwise tuple data."""
        return Hom(source, self.algebra,
                   tuple(self.index_of[fn(x)] for x in source.elements()))


def power_subalgebra(base, tuples, name=None):
    """Materialize a closed set of tuples over `base` as an algebra."""
    carrier = tuple(sorted(tuples))
    if not carrier:
        raise ShapeError("empty tuple carrier cannot be materialized")
    k = len(carrier[0])
    index = {t: i for i, t in enumerate(carrier)}
    tables = []
    for _, t in base.ops():
        rows = []
        for a in carrier:
            row = []
            for b in carrier:
                val = tuple(t[a[i]][b[i]] for i in range(k))
                if val not in index:
                    raise ShapeError(f"tuple set not closed: {a} * {b} = {val}")
                row.append(index[val])
            rows.append(row)
        tables.append(freeze_table(rows) if rows else ())
    consts = []
    for _, c in base.constants():
        diag = (c,) * k
        if diag not in index:
            raise ShapeError(f"tuple set misses the constant tuple {diag}")
        consts.append(index[diag])
    alg = type(base).from_parts(len(carrier), tables, consts,
                                name=name or f"{base.name}^{k}|sub",
                                validate=False)
    return TupleAlgebra(base, alg, carrier, index)


# ---------------------------------------------------------------------------
# Exhaustive enumeration up to isomorphism

ENUMERATION_BOUND = 4


def _canonical_reps(algebras):
    reps = {}
    for alg in algebras:
        key = alg.canonical_key()
        if key not in reps:
            reps[key] = alg
    return [reps[k] for k in sorted(reps)]


def _enumerate_monoids(n):
    if n == 1:
        return [FiniteMonoid(1, ((0,),), 0, validate=False)]
    cells = [(a, b) for a in range(1, n) for b in range(1, n)]
    rng = range(n)
    found = []
    for combo in itertools.product(rng, repeat=len(cells)):
        table = [[0] * n for _ in range(n)]
        for a in rng:
            table[0][a] = a
            table[a][0] = a
        for (a, b), v in zip(cells, combo):
            table[a][b] = v
        ok = True
        for a in rng:
            ta = table[a]
            for b in rng:
                tab = table[ta[b]]
                tb = table[b]
                for c in rng:
                    if tab[c] != ta[tb[c]]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            found.append(FiniteMonoid(n, table, 0, validate=False))
    return _canonical_reps(found)


def _enumerate_quandles(n):
    perms_fixing = []
    for b in range(n):
        perms_fixing.append([p for p in itertools.permutations(range(n))
                             if p[b] == b])
    found = []
    for cols in itertools.product(*perms_fixing):
        table = [[cols[b][a] for b in range(n)] for a in range(n)]
        ok = True
        for a in range(n):
            for b in range(n):
                ab = table[a][b]
                for c in range(n):
                    if table[ab][c] != table[table[a][c]][table[b][c]]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            found.append(FiniteQuandle(n, table, validate=False))
    return _canonical_reps(found)


def _additive_endos(add, n):
    """Maps preserving + and sending 0 to 0 (left/right multiplications)."""
    endos = []
    for m in itertools.product(range(n), repeat=n):
        if m[0] != 0:
            continue
        if all(m[add[a][b]] == add[m[a]][m[b]] for a in range(n)
               for b in range(a, n)):
            endos.append(m)
    return endos


def _enumerate_semirings(n):
    if n == 1:
        return [FiniteSemiring(1, ((0,),), ((0,),), validate=False)]
    adds = []
    cells = [(a, b) for a in range(1, n) for b in range(a, n)]
    for combo in itertools.product(range(n), repeat=len(cells)):
        add = [[0] * n for _ in range(n)]
        for a in range(n):
            add[0][a] = a
            add[a][0] = a
        for (a, b), v in zip(cells, combo):
            add[a][b] = v
            add[b][a] = v
        ok = True
        for a in range(n):
            for b in range(n):
                ab = add[a][b]
                for c in range(n):
                    if add[ab][c] != add[a][add[b][c]]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            adds.append(freeze_table(add))
    found = []
    for add in adds:
        endos = _additive_endos(add, n)
        for choice in itertools.product(endos, repeat=n - 1):
            lam = [tuple([0] * n)] + list(choice)
            ok = True
            for a in range(n):
                for b in range(a, n):
                    s = add[a][b]
                    la, lb, ls = lam[a], lam[b], lam[s]
                    if any(ls[c] != add[la[c]][lb[c]] for c in range(n)):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            mul = [list(lam[a]) for a in range(n)]
            for a in range(n):
                if not ok:
                    break
                for b in range(n):
                    ab = mul[a][b]
                    for c in range(n):
                        if mul[ab][c] != mul[a][mul[b][c]]:
                            ok = False
                            break
                    if not ok:
                        break
            if not ok:
                continue
            if not any(all(mul[e][b] == b and mul[b][e] == b
                           for b in range(n)) for e in range(n)):
                continue
            found.append(FiniteSemiring(n, add, mul, validate=False))
    return _canonical_reps(found)


@lru_cache(maxsize=64)
def enumerate_algebras(kind, n, bound=ENUMERATION_BOUND):
    """All algebras of the kind with order n, up to isomorphism."""
    if n > bound:
        raise BoundExceeded(f"enumeration bound is {bound}, got order {n}")
    if kind == "monoid":
        algs = _enumerate_monoids(n)
    elif kind == "quandle":
        algs = _enumerate_quandles(n)
    elif kind == "semiring":
        algs = _enumerate_semirings(n)
    else:
        raise ShapeError(f"unknown kind {kind!r}")
    return tuple(alg.renamed(f"{kind[:3]}{n}_{i:02d}")
                 for i, alg in enumerate(algs))


@lru_cache(maxsize=32)
def catalog(kind, max_order, bound=ENUMERATION_BOUND):
    """Concatenated enumeration for orders 1..max_order."""
    out = []
    for n in range(1, max_order + 1):
        out.extend(enumerate_algebras(kind, n, bound=bound))
    return tuple(out)


# ---------------------------------------------------------------------------
# Named building blocks used throughout the tests and the CLI


def cyclic_monoid(n, name=None):
    """The additive group Z_n viewed as a monoid."""
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return FiniteMonoid(n, table, 0, name=name or f"Z{n}")


def klein_four(name="V4"):
    return product(cyclic_monoid(2), cyclic_monoid(2)).algebra.renamed(name)


def semilattice_b(name="B"):
    """Two-element semilattice: index 0 is the unit, index 1 absorbs."""
    return FiniteMonoid(2, ((0, 1), (1, 1)), 0, name=name)


def truncated_addition_monoid(n, name=None):
    table = [[min(a + b, n - 1) for b in range(n)] for a in range(n)]
    return FiniteMonoid(n, table, 0, name=name or f"T{n}")


def left_zero_plus_unit(k=2, name=None):
    """Left-zero semigroup on k elements with an adjoined unit (index 0)."""
    n = k + 1
    table = [[0] * n for _ in range(n)]
    for a in range(n):
        table[0][a] = a
        table[a][0] = a
    for a in range(1, n):
        for b in range(1, n):
            table[a][b] = a
    return FiniteMonoid(n, table, 0, name=name or f"LZ{k}1")


def symmetric_group_monoid(name="S3"):
    perms = list(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(p[q[i]] for i in range(3))] for q in perms]
             for p in perms]
    return FiniteMonoid(6, table, index[(0, 1, 2)], name=name)


def dihedral_quandle(n, name=None):
    table = [[(2 * b - a) % n for b in range(n)] for a in range(n)]
    return FiniteQuandle(n, table, name=name or f"R{n}")


def trivial_quandle(n, name=None):
    table = [[a] * n for a in range(n)]
    return FiniteQuandle(n, table, name=name or f"T{n}")


def tetrahedral_quandle(name="Q4"):
    """Alexander quandle on the Klein group with an order-3 fixed-point-free
    automorphism; the smallest latin quandle of order above 1."""
    sigma = (0, 2, 3, 1)
    add = ((0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0))
    table = [[add[sigma[a]][add[b][sigma[b]]] for b in range(4)]
             for a in range(4)]
    return FiniteQuandle(4, table, name=name)


def boolean_semiring(name="B2"):
    return FiniteSemiring(2, ((0, 1), (1, 1)), ((0, 0), (0, 1)), name=name)


def ring_z(n, name=None):
    add = [[(a + b) % n for b in range(n)] for a in range(n)]
    mul = [[(a * b) % n for b in range(n)] for a in range(n)]
    return FiniteSemiring(n, add, mul, name=name or f"ZR{n}")


def named_builtins():
    algs = [
        terminal_object("monoid"),
        cyclic_monoid(2), cyclic_monoid(3), cyclic_monoid(4),
        cyclic_monoid(9),
        klein_four(), semilattice_b(), truncated_addition_monoid(3),
        left_zero_plus_unit(2), symmetric_group_monoid(),
        product(cyclic_monoid(3), cyclic_monoid(3)).algebra.renamed("Z3xZ3"),
        dihedral_quandle(3), trivial_quandle(2), trivial_quandle(3),
        tetrahedral_quandle(),
        boolean_semiring(), ring_z(2), ring_z(3), ring_z(4),
    ]
    return {a.name: a for a in algs}

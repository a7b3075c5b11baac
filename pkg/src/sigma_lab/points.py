"""Split points, their classes, pullbacks of points and class audits.

A split point is a surjection with a chosen section.  The concrete point
classes implemented here are the weakly-Schreier and Schreier monoid
classes (transferred to semirings through the additive monoid), the
puncturing/acupuncturing quandle classes, and the strongly-split points.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import core
from .core import Hom
from .errors import ConfigError, NotEpi, NotPullback, SignatureMismatch
from .reports import AuditReport, hom_doc, point_doc


@dataclass(frozen=True)
class SplitPoint:
    """Pair (f, s) with f ∘ s = identity on the codomain of f."""

    f: Hom
    s: Hom

    def __post_init__(self):
        if self.s.source != self.f.target or self.s.target != self.f.source:
            raise SignatureMismatch("section endpoints do not match")
        if self.s.then(self.f).mapping != tuple(range(self.f.target.order)):
            raise SignatureMismatch("s is not a section of f")

    @property
    def total(self):
        return self.f.source

    @property
    def base(self):
        return self.f.target

    @property
    def kind(self):
        return self.total.kind

    def fiber(self, y):
        return self.f.fiber(y)

    def is_iso(self):
        return self.f.is_iso()

    def __repr__(self):
        return (f"Point({self.total.name}->{self.base.name}; "
                f"f={list(self.f.mapping)}, s={list(self.s.mapping)})")


def identity_point(algebra):
    h = Hom.identity(algebra)
    return SplitPoint(h, h)


def terminal_point(algebra, base_element=None):
    """The point over the one-element algebra.

    Quandles have no canonical constant, so a base element for the section
    must be supplied (defaults to 0).
    """
    one = core.terminal_object(algebra.kind)
    f = Hom(algebra, one, (0,) * algebra.order)
    if algebra.kind == "quandle":
        e = 0 if base_element is None else base_element
    else:
        e = dict(algebra.constants()).get("unit",
                                          dict(algebra.constants()).get("zero"))
        if base_element is not None:
            e = base_element
    return SplitPoint(f, Hom(one, algebra, (e,)))


def product_point(base, fib, section_element=None):
    """Projection base × fib -> base with the canonical section."""
    prod = core.product(base, fib)
    if fib.kind == "quandle":
        e = 0 if section_element is None else section_element
    else:
        e = dict(fib.constants())["unit" if fib.kind == "monoid" else "zero"]
        if section_element is not None:
            e = section_element
    s = Hom(base, prod.algebra,
            tuple(prod.encode(y, e) for y in base.elements()))
    return SplitPoint(prod.p0, s)


def nabla_point(algebra):
    """First projection of the square with the diagonal splitting."""
    prod = core.product(algebra, algebra)
    s = Hom(algebra, prod.algebra,
            tuple(prod.encode(x, x) for x in algebra.elements()))
    return SplitPoint(prod.p0, s)


# ---------------------------------------------------------------------------
# Jointly extremally epic pairs


def jointly_generate(codomain, *image_sets):
    seed = set()
    for s in image_sets:
        seed.update(s)
    return codomain.closure(seed)


def jointly_extremally_epic(u, v):
    """No proper subalgebra of the common codomain contains both images."""
    if u.target != v.target:
        raise SignatureMismatch("jointly-epic test needs a common codomain")
    gen = jointly_generate(u.target, u.image(), v.image())
    return len(gen) == u.target.order


def jointly_extremally_epic_witness(u, v):
    """Smallest codomain element outside the generated subalgebra, if any."""
    gen = jointly_generate(u.target, u.image(), v.image())
    missed = [x for x in u.target.elements() if x not in gen]
    return min(missed) if missed else None


# ---------------------------------------------------------------------------
# Concrete point classes


def _monoid_point(p):
    """The point itself for monoids, the additive point for semirings."""
    if p.kind == "monoid":
        return p
    if p.kind == "semiring":
        xa = p.total.additive_monoid()
        ya = p.base.additive_monoid()
        return SplitPoint(Hom(xa, ya, p.f.mapping), Hom(ya, xa, p.s.mapping))
    raise SignatureMismatch(f"no Schreier-type class on {p.kind} points")


def _mu_images(p):
    q = _monoid_point(p)
    x, y = q.total, q.base
    ker = q.f.fiber(y.unit)
    t = x.table
    for b in y.elements():
        sy = q.s(b)
        yield ker, {t[k][sy] for k in ker}, set(q.f.fiber(b)), b


def is_weakly_schreier(p):
    """k ↦ k·s(y) maps the kernel onto every fiber."""
    return all(image == fiber for _, image, fiber, _ in _mu_images(p))


def is_schreier(p):
    """k ↦ k·s(y) maps the kernel bijectively onto every fiber."""
    for ker, image, fiber, _ in _mu_images(p):
        if image != fiber or len(image) != len(ker):
            return False
    return True


def _translation_images(p, mirrored):
    if p.kind != "quandle":
        raise SignatureMismatch(f"no puncturing class on {p.kind} points")
    t = p.total.table
    for b in p.base.elements():
        sy = p.s(b)
        fiber = p.f.fiber(b)
        if mirrored:
            image = {t[v][sy] for v in fiber}
        else:
            image = {t[sy][v] for v in fiber}
        yield image, set(fiber)


def is_puncturing(p, mirrored=False):
    """s(y)◁- is surjective on every fiber."""
    return all(image == fiber for image, fiber in _translation_images(p, mirrored))


def is_acupuncturing(p, mirrored=False):
    """s(y)◁- is bijective on every fiber (the fiber maps into itself, so
    this coincides with surjectivity on finite carriers)."""
    return all(image == fiber and len(image) == len(fiber)
               for image, fiber in _translation_images(p, mirrored))


def is_strongly_split(p):
    """Every preimage of a subalgebra of the base, together with the
    section, generates the whole domain.  For quandles the empty
    subalgebra participates."""
    x = p.total
    full = frozenset(x.elements())
    s_image = set(p.s.mapping)
    for sub in p.base.subsets_closed():
        preimage = {e for e in x.elements() if p.f(e) in sub}
        if x.closure(preimage | s_image) != full:
            return False
    return True


_DISPATCH = {
    "weakly-schreier": lambda p: is_weakly_schreier(p),
    "schreier": lambda p: is_schreier(p),
    "puncturing": lambda p: is_puncturing(p),
    "acupuncturing": lambda p: is_acupuncturing(p),
    "strongly-split": lambda p: is_strongly_split(p),
    "all": lambda p: True,
}


@dataclass(frozen=True)
class SigmaClass:
    """Named class of split points; `custom` classes carry a predicate."""

    name: str
    predicate: object = None

    def contains(self, point):
        if self.predicate is not None:
            return bool(self.predicate(point))
        return bool(_DISPATCH[self.name](point))

    def __repr__(self):
        return f"SigmaClass({self.name})"


WEAKLY_SCHREIER = SigmaClass("weakly-schreier")
SCHREIER = SigmaClass("schreier")
PUNCTURING = SigmaClass("puncturing")
ACUPUNCTURING = SigmaClass("acupuncturing")
STRONGLY_SPLIT = SigmaClass("strongly-split")
ALL_POINTS = SigmaClass("all")


def sigma_class(name):
    if name not in _DISPATCH:
        raise ConfigError(f"unknown sigma class {name!r}; known: "
                          f"{sorted(_DISPATCH)}")
    return SigmaClass(name)


def custom_sigma(name, predicate):
    return SigmaClass(name, predicate)


def default_sigma(kind, strict=True):
    """The point-congruous class of each ambient category."""
    if kind in ("monoid", "semiring"):
        return SCHREIER if strict else WEAKLY_SCHREIER
    if kind == "quandle":
        return ACUPUNCTURING if strict else PUNCTURING
    raise ConfigError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# Pullbacks of points and the point square


@dataclass(frozen=True)
class PointSquare:
    """Commuting square of split epimorphisms.

    ``left`` sits over the bottom source, ``right`` over the bottom target;
    ``top``/``bottom`` are the horizontal epis, with optional sections.
    """

    left: SplitPoint
    right: SplitPoint
    top: Hom
    bottom: Hom
    top_section: Hom = None
    bottom_section: Hom = None
    is_pullback: bool = False

    def __post_init__(self):
        if self.top.then(self.right.f) != self.left.f.then(self.bottom):
            raise SignatureMismatch("epi square does not commute")
        if self.left.s.then(self.top) != self.bottom.then(self.right.s):
            raise SignatureMismatch("sections do not commute with the square")
        if (self.top_section is None) != (self.bottom_section is None):
            raise SignatureMismatch("sections must be given on both levels")
        if self.top_section is not None:
            if self.top_section.then(self.top).mapping != tuple(
                    range(self.right.total.order)):
                raise SignatureMismatch("top section is not a section")
            if self.bottom_section.then(self.bottom).mapping != tuple(
                    range(self.right.base.order)):
                raise SignatureMismatch("bottom section is not a section")
            if self.top_section.then(self.left.f) != self.right.f.then(
                    self.bottom_section):
                raise SignatureMismatch("section square does not commute")
            if self.right.s.then(self.top_section) != self.bottom_section.then(
                    self.left.s):
                raise SignatureMismatch("two-sided splittings do not commute")
        if self.is_pullback and not _is_pullback_square(self):
            raise NotPullback("square flagged as pullback is not one")

    def to_json(self):
        return {
            "left": point_doc(self.left, inline=True),
            "right": point_doc(self.right, inline=True),
            "top": hom_doc(self.top),
            "bottom": hom_doc(self.bottom),
            "isPullback": self.is_pullback,
        }


def _is_pullback_square(sq):
    seen = set()
    for i in sq.left.total.elements():
        pair = (sq.left.f(i), sq.top(i))
        if pair in seen:
            return False
        seen.add(pair)
    wanted = {(yp, x)
              for yp in sq.left.base.elements()
              for x in sq.right.total.elements()
              if sq.bottom(yp) == sq.right.f(x)}
    return seen == wanted


def pullback_point(p, g):
    """Base-change of the point p along g, with the induced splitting."""
    if g.target != p.base:
        raise SignatureMismatch("base map must land in the point's base")
    pb = core.pullback(g, p.f)
    f2 = pb.p0
    top = pb.p1
    s2 = Hom(g.source, pb.algebra,
             tuple(pb.encode(yp, p.s(g(yp))) for yp in g.source.elements()))
    left = SplitPoint(f2, s2)
    square = PointSquare(left=left, right=p, top=top, bottom=g,
                         is_pullback=True)
    return left, square


def square_over_point(p, base_point):
    """Pullback square of p along a split base point over the same base."""
    if base_point.base != p.base:
        raise SignatureMismatch("points do not share a base")
    left, plain = pullback_point(p, base_point.f)
    pb = core.pullback(base_point.f, p.f)
    tbar = Hom(p.total, pb.algebra,
               tuple(pb.encode(base_point.s(p.f(x)), x)
                     for x in p.total.elements()))
    return PointSquare(left=left, right=p, top=plain.top, bottom=base_point.f,
                       top_section=tbar, bottom_section=base_point.s,
                       is_pullback=True)


# ---------------------------------------------------------------------------
# Audits


def audit_fibrational(sigma, points, base_maps):
    """Certify iso membership and pullback stability on an instance set."""
    report = AuditReport(f"fibrational[{sigma.name}]")
    objects = []
    for p in points:
        for alg in (p.total, p.base):
            if alg not in objects:
                objects.append(alg)
    for alg in objects:
        ident = identity_point(alg)
        report.add(f"iso point on {alg.name}", sigma.contains(ident),
                   None if sigma.contains(ident) else point_doc(ident, True))
    for p in points:
        if not sigma.contains(p):
            continue
        for g in base_maps:
            if g.target != p.base:
                continue
            pulled, square = pullback_point(p, g)
            ok = sigma.contains(pulled)
            report.add(f"pullback of {p!r} along {list(g.mapping)}", ok,
                       None if ok else square.to_json())
    return report


def fiber_product_point(p1, p2):
    """Product of two points in the fibre over their shared base."""
    if p1.base != p2.base:
        raise SignatureMismatch("points do not share a base")
    pb = core.pullback(p1.f, p2.f)
    f = pb.p0.then(p1.f)
    s = Hom(p1.base, pb.algebra,
            tuple(pb.encode(p1.s(y), p2.s(y)) for y in p1.base.elements()))
    return SplitPoint(f, s)


def fiber_morphisms(p1, p2):
    """All morphisms p1 -> p2 in the fibre over the common base."""
    if p1.base != p2.base:
        raise SignatureMismatch("points do not share a base")
    fixed = {p1.s(y): p2.s(y) for y in p1.base.elements()}
    return core.enumerate_homs(
        p1.total, p2.total, fixed=fixed,
        allowed=lambda a: p2.f.fiber(p1.f(a)))


def equalizer_subpoint(p1, p2, h, k):
    """The equalizer of two fibre morphisms as a sub-point of p1."""
    carrier = frozenset(a for a in p1.total.elements() if h(a) == k(a))
    sub = core.subalgebra(p1.total, carrier)
    f = sub.inclusion.then(p1.f)
    s = Hom(p1.base, sub.algebra,
            tuple(sub.index_of[p1.s(y)] for y in p1.base.elements()))
    return SplitPoint(f, s)


def audit_point_congruous(sigma, points):
    """Certify closure of the class under finite limits in one fibre."""
    report = AuditReport(f"point-congruous[{sigma.name}]")
    if not points:
        return report
    base = points[0].base
    for p in points:
        if p.base != base:
            raise SignatureMismatch("audit instances must share one base")
    members = [p for p in points if sigma.contains(p)]
    ident = identity_point(base)
    report.add(f"terminal point of the fibre over {base.name}",
               sigma.contains(ident))
    for i, p1 in enumerate(members):
        for j in range(i, len(members)):
            fp = fiber_product_point(p1, members[j])
            ok = sigma.contains(fp)
            report.add(f"fibre product #{i} x #{j}", ok,
                       None if ok else point_doc(fp, True))
    for p1 in members:
        for p2 in members:
            homs = fiber_morphisms(p1, p2)
            for a in range(len(homs)):
                for b in range(a + 1, len(homs)):
                    sub = equalizer_subpoint(p1, p2, homs[a], homs[b])
                    ok = sigma.contains(sub)
                    report.add(
                        f"equalizer of fibre maps {list(homs[a].mapping)}"
                        f"/{list(homs[b].mapping)}", ok,
                        None if ok else point_doc(sub, True))
    return report


# ---------------------------------------------------------------------------
# Regular context: epi squares, regular pushouts, regularity levels


@dataclass(frozen=True)
class PointEpi:
    """Levelwise-surjective morphism of split points."""

    src: SplitPoint
    dst: SplitPoint
    x: Hom
    y: Hom

    def __post_init__(self):
        if self.x.then(self.dst.f) != self.src.f.then(self.y):
            raise SignatureMismatch("point morphism squares do not commute")
        if self.src.s.then(self.x) != self.y.then(self.dst.s):
            raise SignatureMismatch("point morphism ignores the sections")
        if not (self.x.is_surjective() and self.y.is_surjective()):
            raise NotEpi("levelwise surjectivity required")

    def is_cartesian(self):
        seen = {(self.src.f(e), self.x(e)) for e in self.src.total.elements()}
        if len(seen) != self.src.total.order:
            return False
        wanted = {(b, a) for b in self.src.base.elements()
                  for a in self.dst.total.elements()
                  if self.y(b) == self.dst.f(a)}
        return seen == wanted

    def kernel_point(self):
        """The induced split point between the kernel pairs of x and y."""
        rx = core.pullback(self.x, self.x)
        ry = core.pullback(self.y, self.y)
        f = Hom(rx.algebra, ry.algebra,
                tuple(ry.encode(self.src.f(a), self.src.f(b))
                      for a, b in (rx.decode(i)
                                   for i in range(rx.algebra.order))))
        s = Hom(ry.algebra, rx.algebra,
                tuple(rx.encode(self.src.s(c), self.src.s(d))
                      for c, d in (ry.decode(i)
                                   for i in range(ry.algebra.order))))
        return SplitPoint(f, s)

    def comparison_to_pullback(self):
        """The factorization of the domain through base ×_dstbase dsttotal."""
        pairs = {(self.src.f(e), self.x(e)) for e in self.src.total.elements()}
        wanted = {(b, a) for b in self.src.base.elements()
                  for a in self.dst.total.elements()
                  if self.y(b) == self.dst.f(a)}
        return pairs, wanted


def is_regular_pushout(point_epi):
    """Comparison map to the pullback is surjective."""
    reached, wanted = point_epi.comparison_to_pullback()
    return reached == wanted


def regular_pushout_witness(point_epi):
    reached, wanted = point_epi.comparison_to_pullback()
    missed = sorted(wanted - reached)
    return missed[0] if missed else None


def audit_regular_level(sigma, level, instances):
    """Check that codomain points stay in the class at the given level."""
    if level not in (1, 2, 3):
        raise ConfigError("regularity level must be 1, 2 or 3")
    report = AuditReport(f"{level}-regular[{sigma.name}]")
    for i, inst in enumerate(instances):
        if not sigma.contains(inst.src):
            continue
        if level == 1 and not inst.is_cartesian():
            continue
        if level == 2 and not sigma.contains(inst.kernel_point()):
            continue
        ok = sigma.contains(inst.dst)
        report.add(f"instance {i}: {inst.src!r} -> {inst.dst!r}", ok,
                   None if ok else {"src": point_doc(inst.src, True),
                                    "dst": point_doc(inst.dst, True),
                                    "x": list(inst.x.mapping),
                                    "y": list(inst.y.mapping)})
    return report


# ---------------------------------------------------------------------------
# Catalog points


@lru_cache(maxsize=16)
def catalog_points(kind, max_order):
    """All split points between catalog algebras, deterministic order."""
    algs = core.catalog(kind, max_order)
    points = []
    for x in algs:
        for y in algs:
            if y.order > x.order:
                continue
            for f in core.enumerate_homs(x, y, surjective=True):
                for s in core.enumerate_homs(y, x,
                                             allowed=lambda e: f.fiber(e)):
                    points.append(SplitPoint(f, s))
    return tuple(points)


def points_over(kind, max_order):
    by_base = {}
    for p in catalog_points(kind, max_order):
        by_base.setdefault(p.base, []).append(p)
    return by_base

"""Multisections, their symmetric/alternating unit groups, covers and combines.

A multisection of degree d is d pairwise disjoint clopens joined by a coherent
transporter system from a distinguished base; permuting the clopens and fixing
the rest of the space gives units.  Factorization of those units over covers
and combines uses exact commutator constructions checked against an abstract
permutation model of the clopen pieces, with deterministic bounded search only
as a fallback.
"""

from itertools import permutations

from . import certs
from . import clopen as _clopen
from . import pmap as _pmap
from .clopen import union_all
from .errors import (
    BadSubdivision,
    CantorError,
    DomainMismatch,
    EmptyIntersection,
    EmptyRestriction,
    OverlappingIdempotents,
    SupportsOverlapElsewhere,
)
from .pmap import as_idempotent, compose, eq, join, leq, restrict, star

# -- permutation helpers (tuples pi with pi[i] the image of i) -----------------


def identity_perm(n):
    return tuple(range(n))


def perm_compose(a, b):
    """a after b: (a o b)(i) = a[b[i]]."""
    return tuple(a[b[i]] for i in range(len(a)))


def perm_inverse(a):
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def is_even(perm):
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign == 1


def sym_perms(n):
    return [p for p in permutations(range(n))]


def alt_perms(n):
    return [p for p in permutations(range(n)) if is_even(p)]


def cycle_perm(n, cycle):
    out = list(range(n))
    for i, j in zip(cycle, cycle[1:] + cycle[:1]):
        out[i] = j
    return tuple(out)


def perm_order(p):
    n, q = 1, p
    while q != identity_perm(len(p)):
        q = perm_compose(p, q)
        n += 1
    return n


# -- multisections --------------------------------------------------------------


class Multisection:
    """Base clopen e_1 with transporters f_i : e_1 -> e_i, f_1 the identity."""

    __slots__ = ("d", "base", "transporters", "idems")

    def __init__(self, base, transporters):
        self.d = base.d
        self.base = base
        self.transporters = tuple(transporters)
        self.idems = tuple(_pmap.ran(f) for f in self.transporters)
        if base.is_empty():
            raise EmptyRestriction("multisection base is empty")
        if not eq(self.transporters[0], as_idempotent(base)):
            raise DomainMismatch("first transporter must be the identity on the base")
        for i, f in enumerate(self.transporters):
            if _pmap.dom(f) != base:
                raise DomainMismatch(f"transporter {i} has domain {_pmap.dom(f)}, not {base}")
        for i in range(len(self.idems)):
            for j in range(i + 1, len(self.idems)):
                if not self.idems[i].meet(self.idems[j]).is_empty():
                    raise OverlappingIdempotents(f"idempotents {i} and {j} overlap")

    @property
    def degree(self):
        return len(self.transporters)

    def support(self):
        return union_all(self.idems, self.d)

    def transporter_between(self, i, j):
        """The unique element f_ij with domain e_i and range e_j."""
        return compose(self.transporters[j], star(self.transporters[i]))

    def __repr__(self):
        return f"Multisection(deg={self.degree}, base={self.base})"


def build(base, maps):
    """Multisection from the base and the transporters f_2, ..., f_d."""
    transporters = [as_idempotent(base)]
    for i, m in enumerate(maps):
        if _pmap.dom(m) != base:
            raise DomainMismatch(f"map {i} has domain {_pmap.dom(m)}, not {base}")
        transporters.append(m)
    return Multisection(base, transporters)


def element(s, pi):
    """The unit h_pi acting as f_pi(i) f_i* on each e_i, identity elsewhere."""
    if len(pi) != s.degree:
        raise CantorError(f"permutation of length {len(pi)} for degree {s.degree}")
    parts = [
        compose(s.transporters[pi[i]], star(s.transporters[i]))
        for i in range(s.degree)
    ]
    comp = s.support().complement()
    if not comp.is_empty():
        parts.append(as_idempotent(comp))
    return join(parts)


def sym_group(s):
    return [element(s, p) for p in sym_perms(s.degree)]


def alt_group(s):
    return [element(s, p) for p in alt_perms(s.degree)]


def restrict_msec(s, e):
    """The multisection with base e <= e_1 and restricted transporters."""
    if e.is_empty():
        raise EmptyRestriction("restriction to the empty set")
    if not e.leq(s.base):
        raise EmptyRestriction(f"{e} is not below the base {s.base}")
    return Multisection(e, [restrict(f, e) for f in s.transporters])


class Cover:
    """Pieces of a multisection, one idempotent under each parent idempotent,
    jointly recovering every parent transporter as a join."""

    __slots__ = ("parent", "pieces")

    def __init__(self, parent, pieces, verify=True):
        self.parent = parent
        self.pieces = tuple(pieces)
        if verify:
            self._verify()

    def _verify(self):
        s = self.parent
        for k, piece in enumerate(self.pieces):
            if piece.degree != s.degree:
                raise BadSubdivision(f"piece {k} has degree {piece.degree}")
            for i in range(s.degree):
                if not leq(piece.transporters[i], s.transporters[i]):
                    raise BadSubdivision(
                        f"piece {k} transporter {i} is not a restriction of the parent's"
                    )
                below = [j for j, e in enumerate(piece.idems) if e.leq(s.idems[i])]
                if below != [i]:
                    raise BadSubdivision(
                        f"piece {k} does not meet parent idempotent {i} exactly once"
                    )
        for i in range(s.degree):
            glued = join([p.transporters[i] for p in self.pieces])
            if not eq(glued, s.transporters[i]):
                raise BadSubdivision(f"parent transporter {i} is not the join of the pieces")


def cover_of(s, subdivision):
    """Cover by restrictions of s to the given subdivision of the base."""
    subdivision = list(subdivision)
    if not subdivision:
        raise BadSubdivision("empty subdivision")
    for i, part in enumerate(subdivision):
        if part.is_empty():
            raise BadSubdivision(f"part {i} is empty")
        if not part.leq(s.base):
            raise BadSubdivision(f"part {i} is not below the base")
        for j in range(i + 1, len(subdivision)):
            if not part.meet(subdivision[j]).is_empty():
                raise BadSubdivision(f"parts {i} and {j} overlap")
    if union_all(subdivision, s.d) != s.base:
        raise BadSubdivision("subdivision does not cover the base")
    return Cover(s, [restrict_msec(s, part) for part in subdivision])


def overlapping_cover(s, parts):
    """Cover by restrictions to base pieces that may overlap (union = base)."""
    parts = list(parts)
    if not parts or union_all(parts, s.d) != s.base:
        raise BadSubdivision("pieces must cover the base")
    return Cover(s, [restrict_msec(s, part) for part in parts])


def combine(s1, s2):
    """Glue two multisections whose supports meet in exactly one idempotent pair.

    The supports must intersect exactly in e = e1_i & e2_j for one pair of
    idempotents; the result has base e, carries restrictions of both transporter
    systems, and has degree deg(s1) + deg(s2) - 1.
    """
    overlaps = []
    for i, a in enumerate(s1.idems):
        for j, b in enumerate(s2.idems):
            m = a.meet(b)
            if not m.is_empty():
                overlaps.append((i, j, m))
    if not overlaps:
        raise EmptyIntersection("supports do not intersect")
    if len(overlaps) > 1:
        raise SupportsOverlapElsewhere(
            f"supports overlap in {len(overlaps)} idempotent pairs"
        )
    i, j, e = overlaps[0]
    if s1.support().meet(s2.support()) != e:
        raise SupportsOverlapElsewhere("support overlap is not a single idempotent meet")
    r1 = restrict_msec(s1, _pmap.ran(restrict(star(s1.transporters[i]), e)))
    r2 = restrict_msec(s2, _pmap.ran(restrict(star(s2.transporters[j]), e)))
    # both restricted sections now carry e as their i-th / j-th idempotent
    maps = []
    for k in range(r1.degree):
        if k != i:
            maps.append(compose(r1.transporters[k], star(r1.transporters[i])))
    for k in range(r2.degree):
        if k != j:
            maps.append(compose(r2.transporters[k], star(r2.transporters[j])))
    return build(e, maps)


def sub_section(s, indices):
    """The multisection on a subset of the idempotents (base index included)."""
    if indices[0] != 0:
        raise CantorError("sub-sections keep the base as index 0")
    return Multisection(s.base, [s.transporters[i] for i in indices])


def _unit_words(units, max_len, d):
    """Distinct-by-eq products of the given units up to the length bound."""
    from .pmap import Dedup, one

    dedup = Dedup()
    start = one(d)
    dedup.add(start)
    out = [start]
    frontier = [start]
    for _ in range(max_len):
        nxt = []
        for m in frontier:
            for u in units:
                rep, _, new = dedup.add(compose(m, u))
                if new:
                    nxt.append(rep)
        out.extend(nxt)
        frontier = nxt
    return out


def extend_degree(
    s, table, word_len=3, split_depth=3, node_budget=certs.DEFAULT_NODE_BUDGET
):
    """Extend a d-section to (d+1)-sections over a subdivision of its base.

    For each subdivision piece, a bounded word search over the table's units
    looks for an extra transporter whose image misses the restricted section's
    idempotents; pieces are split into child cylinders when no word works at
    their current depth.
    """
    units = list(table.mapping.values()) if hasattr(table, "mapping") else list(table)
    bounds = {"word_len": word_len, "split_depth": split_depth, "node_budget": node_budget}
    d = s.d
    words = _unit_words(units, word_len, d) if units else []
    max_depth = max((len(w) for w in s.base.antichain), default=0) + split_depth

    queue = [_clopen.Clopen(d, (w,)) for w in s.base.antichain]
    sections = []
    subdivision = []
    nodes = 0
    while queue:
        piece = queue.pop(0)
        r = restrict_msec(s, piece)
        found = None
        for w in words:
            nodes += 1
            if nodes > node_budget:
                return certs.exhausted(bounds, nodes, detail="node budget")
            img = _pmap.ran(restrict(w, piece))
            if img.is_empty():
                continue
            if all(img.meet(e).is_empty() for e in r.idems):
                found = build(piece, list(r.transporters[1:]) + [restrict(w, piece)])
                break
        if found is not None:
            sections.append(found)
            subdivision.append(piece)
            continue
        word0 = piece.antichain[0]
        if len(word0) >= max_depth:
            return certs.exhausted(
                bounds, nodes, detail=f"no extension found on {piece} at max depth"
            )
        for x in range(d):
            queue.append(_clopen.Clopen(d, (word0 + (x,),)))
    return certs.witness(
        {"sections": sections, "subdivision": subdivision}, bounds, nodes
    )


def embed_subperm(pi, indices, degree):
    """Extend a permutation of the listed idempotent positions to fix the rest."""
    out = list(range(degree))
    for k, idx in enumerate(indices):
        out[idx] = indices[pi[k]]
    return tuple(out)

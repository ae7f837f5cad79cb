"""Finite-depth dynamical certificates for a table of units acting on A^N.

Every property here (expansivity, minimality, compressibility, orbit sizes)
quantifies over all points or all opens, which no terminating procedure can
decide; the operations certify finite shadows at explicit depth and length
bounds and report three-valued certificates that re-verify.
"""

from . import certs
from . import pmap as _pmap
from .clopen import atoms, cylinder, is_partition, part_of, union_all
from .errors import CantorError, EmptyInput, IdentityInput, NotPartwiseStabilizing
from .pmap import (
    Dedup,
    as_idempotent,
    compose,
    eq,
    eval_at,
    image_clopen,
    is_unit,
    join,
    one,
    restrict,
    star,
)


class DynContext:
    """A table of units, optionally closed under star."""

    def __init__(self, table, symmetric=True):
        self.table = table
        self.d = table.d
        units = []
        names = []
        for name, m in table.items():
            if not is_unit(m):
                raise CantorError(f"generator {name} is not a unit")
            units.append(m)
            names.append(name)
        if symmetric:
            for name, m in table.items():
                inv = star(m)
                if not any(eq(inv, u) for u in units):
                    units.append(inv)
                    names.append(f"{name}^-1")
        self.units = units
        self.names = names


def _image_closure(ctx, start, steps):
    """Union of all images of start under words of length <= steps."""
    u = start
    for _ in range(steps):
        grown = u
        for g in ctx.units:
            grown = grown.union(image_clopen(g, u))
        if grown == u:
            return u
        u = grown
    return u


def _unit_word_levels(ctx, max_len):
    """Distinct unit words level by level: yields the new words per length."""
    dedup = Dedup()
    start = one(ctx.d)
    dedup.add(start)
    frontier = [(start, [])]
    yield list(frontier)
    for _ in range(max_len):
        nxt = []
        for m, word in frontier:
            for name, g in zip(ctx.names, ctx.units):
                rep, _, new = dedup.add(compose(g, m))
                if new:
                    nxt.append((rep, [name] + word))
        frontier = nxt
        yield nxt


def _unit_words(ctx, max_len):
    """Distinct unit words with their name lists, in BFS order."""
    out = []
    for level in _unit_word_levels(ctx, max_len):
        out.extend(level)
    return out


# -- expansivity ----------------------------------------------------------------


def _translate_levels(ctx, parts, max_len):
    """New distinct translate clopens w(alpha), level by word length."""
    seen = set()
    for level in _unit_word_levels(ctx, max_len):
        fresh = []
        for m, word in level:
            for alpha in parts:
                t = image_clopen(m, alpha)
                if t.antichain not in seen:
                    seen.add(t.antichain)
                    fresh.append((t, word, alpha))
        yield fresh


def _separates_at(translates, cells):
    """Unseparated pairs of cells under the meet-closure of the translates."""
    hulls = []
    for c in cells:
        hull = None
        for t, _, _ in translates:
            if c.leq(t):
                hull = t if hull is None else hull.meet(t)
        hulls.append(hull)
    bad = []
    for i in range(len(cells)):
        for j in range(len(cells)):
            if i == j:
                continue
            if hulls[i] is not None and hulls[i].meet(cells[j]).is_empty():
                continue
            if hulls[j] is not None and hulls[j].meet(cells[i]).is_empty():
                continue
            if i < j:
                bad.append((i, j))
    return bad


def expansive_certificate(ctx, parts, depth, word_len):
    """Witness(L') when translates of the partition separate all depth-n
    cylinders; a necessary finite shadow of expansivity.

    The generated algebra is closed under meets only down to the cylinder
    depth: meets strictly below it cannot help separate depth-n atoms.
    """
    if not is_partition(parts):
        raise CantorError("translate certificate needs a partition")
    cells = atoms(depth, ctx.d)
    bounds = {"depth": depth, "word_len": word_len}
    nodes = 0
    translates = []
    bad = [(0, 1)] if len(cells) > 1 else []
    for length, fresh in enumerate(_translate_levels(ctx, parts, word_len)):
        translates.extend(fresh)
        nodes += len(fresh)
        bad = _separates_at(translates, cells)
        if not bad:
            return certs.witness({"word_len": length}, bounds, nodes)
    if not bad:
        return certs.witness({"word_len": 0}, bounds, nodes)
    pair = bad[0]
    return certs.refuted(
        {"pair": [str(cells[pair[0]]), str(cells[pair[1]])]}, bounds, nodes
    )


def separating_translate(ctx, parts, c1, c2, word_len):
    """A translate containing one cylinder and missing the other, if any."""
    for m, word in _unit_words(ctx, word_len):
        for alpha in parts:
            t = image_clopen(m, alpha)
            if c1.leq(t) and t.meet(c2).is_empty():
                return {"word": word, "part": str(alpha), "translate": str(t)}
            if c2.leq(t) and t.meet(c1).is_empty():
                return {"word": word, "part": str(alpha), "translate": str(t)}
    return None


def subshift_code(ctx, parts, point_prefix, words):
    """The finite coding window: the partition part hit by each listed unit.

    Entries are part indices, or "too_shallow" when the prefix does not
    determine the part.
    """
    out = []
    for w in words:
        r = eval_at(w, tuple(point_prefix))
        if r.kind != _pmap.IMAGE:
            out.append("too_shallow")
            continue
        p = part_of(parts, cylinder(r.prefix, ctx.d))
        out.append("too_shallow" if p is None else p)
    return out


# -- minimality -------------------------------------------------------------------


def minimal_certificate(ctx, depth, word_len):
    """Witness when every depth-n cylinder reaches every other within the
    length bound; the finite shadow of every orbit being dense."""
    cells = atoms(depth, ctx.d)
    bounds = {"depth": depth, "word_len": word_len}
    nodes = 0
    for alpha in cells:
        reach = _image_closure(ctx, alpha, word_len)
        nodes += 1
        for beta in cells:
            if reach.meet(beta).is_empty():
                return certs.refuted(
                    {"pair": [str(alpha), str(beta)]}, bounds, nodes
                )
    return certs.witness({"cells": len(cells)}, bounds, nodes)


# -- compressibility ---------------------------------------------------------------


def compress_search(ctx, y, z, word_len):
    """Witness(word) with w(Y) a proper subset of Z."""
    if y.is_empty() or z.is_empty():
        raise EmptyInput("compression needs nonempty clopens")
    bounds = {"word_len": word_len}
    seen = set()
    frontier = [(y, [])]
    seen.add(y.antichain)
    nodes = 0
    for _ in range(word_len + 1):
        nxt = []
        for img, word in frontier:
            nodes += 1
            if img.leq(z) and img != z:
                return certs.witness(
                    {"word": word, "image": str(img)}, bounds, nodes
                )
            for name, g in zip(ctx.names, ctx.units):
                grown = image_clopen(g, img)
                if grown.antichain not in seen:
                    seen.add(grown.antichain)
                    nxt.append((grown, [name] + word))
        frontier = nxt
    return certs.exhausted(bounds, nodes)


def fully_compressible_sample(ctx, depth, word_len):
    """compress_search over all ordered pairs of proper nonempty unions of
    depth-n atoms; aggregate report with the failing pairs.

    Per source set, image exploration stops as soon as every target has
    received a proper sub-image.
    """
    cells = atoms(depth, ctx.d)
    subsets = []
    for mask in range(1, 2 ** len(cells) - 1):
        words = [cells[i].antichain[0] for i in range(len(cells)) if mask >> i & 1]
        subsets.append(union_all([cylinder(w, ctx.d) for w in words], ctx.d))
    failures = []
    checked = 0
    for y in subsets:
        missing = set(range(len(subsets)))
        seen = {y.antichain}
        frontier = [y]
        for idx, z in enumerate(subsets):
            if y.leq(z) and y != z:
                missing.discard(idx)
        for _ in range(word_len):
            if not missing:
                break
            nxt = []
            for img in frontier:
                for g in ctx.units:
                    grown = image_clopen(g, img)
                    if grown.antichain in seen:
                        continue
                    seen.add(grown.antichain)
                    nxt.append(grown)
                    for idx in list(missing):
                        z = subsets[idx]
                        if grown.leq(z) and grown != z:
                            missing.discard(idx)
            frontier = nxt
        checked += len(subsets)
        for idx in sorted(missing):
            failures.append((str(y), str(subsets[idx])))
    return {
        "pairs": checked,
        "ok": not failures,
        "failures": failures,
        "bounds": {"depth": depth, "word_len": word_len},
    }


# -- orbit size --------------------------------------------------------------------


def orbit_lower_bound(ctx, u, k, word_len, node_budget=certs.DEFAULT_NODE_BUDGET):
    """Words whose images of the cylinder of u are pairwise disjoint,
    certifying at least k orbit points for every point of the cylinder.

    Candidate images are collected in word order and a backtracking search
    picks the first pairwise disjoint k-subset in subset order, so the
    witness is reproducible and a greedy dead end (keeping an image so large
    that nothing else fits) is backtracked out of.
    """
    if k < 1:
        raise CantorError("k must be positive")
    bounds = {"k": k, "word_len": word_len, "node_budget": node_budget}
    base = cylinder(tuple(u), ctx.d)
    nodes = 0
    candidates = []
    seen = set()
    for level in _unit_word_levels(ctx, word_len):
        for m, word in level:
            nodes += 1
            if nodes > node_budget:
                return certs.exhausted(bounds, nodes, detail="node budget")
            img = image_clopen(m, base)
            if img.antichain not in seen:
                seen.add(img.antichain)
                candidates.append((img, word))

        chosen = []

        def pick(start):
            if len(chosen) == k:
                return True
            for i in range(start, len(candidates)):
                img, _ = candidates[i]
                if all(img.meet(c[0]).is_empty() for c in chosen):
                    chosen.append(candidates[i])
                    if pick(i + 1):
                        return True
                    chosen.pop()
            return False

        if pick(0):
            return certs.witness(
                {
                    "words": [w for _, w in chosen],
                    "images": [str(c) for c, _ in chosen],
                },
                bounds,
                nodes,
            )
    return certs.exhausted(bounds, nodes)


# -- constructive splitting ---------------------------------------------------------


def _moved_cylinders(g, max_depth):
    """Cylinders whose image under g is disjoint from them, shallowest first."""
    from itertools import product as iproduct

    for depth in range(1, max_depth + 1):
        for w in iproduct(range(g.d), repeat=depth):
            c = cylinder(w, g.d)
            if image_clopen(g, c).meet(c).is_empty():
                yield c


def split_unit(g, ctx, word_len=4, max_depth=6):
    """Split a non-identity unit as g = g1 g2 with each factor fixing a
    nonempty clopen pointwise.

    g1 is the displayed piecewise element: g on Z and hZ, the inverse on gZ
    and ghZ, the identity elsewhere; g2 fixes Z and g1 fixes a neighbourhood
    of a point still moved by g outside the four pieces.
    """
    if eq(g, one(g.d)):
        raise IdentityInput("cannot split the identity")
    bounds = {"word_len": word_len, "max_depth": max_depth}
    nodes = 0
    cached_levels = []
    level_source = _unit_word_levels(ctx, word_len)

    def lazy_words():
        i = 0
        while True:
            while i < len(cached_levels):
                yield from cached_levels[i]
                i += 1
            try:
                cached_levels.append(next(level_source))
            except StopIteration:
                return

    for z in _moved_cylinders(g, max_depth):
        gz = image_clopen(g, z)
        if z.union(gz).complement().is_empty():
            continue
        for h, word in lazy_words():
            nodes += 1
            hz = image_clopen(h, z)
            if not hz.meet(z.union(gz)).is_empty():
                continue
            ghz = image_clopen(g, hz)
            if not ghz.meet(z.union(gz).union(hz)).is_empty():
                continue
            four = union_all([z, gz, hz, ghz], g.d)
            rest = four.complement()
            fixed1 = None
            for y in _moved_cylinders(g, max_depth):
                if y.leq(rest):
                    fixed1 = y
                    break
            if fixed1 is None:
                continue
            g1 = join(
                [
                    restrict(g, z.union(hz)),
                    restrict(star(g), gz.union(ghz)),
                    as_idempotent(rest),
                ]
            )
            g2 = compose(star(g1), g)
            assert eq(compose(g1, g2), g)
            assert eq(restrict(g1, fixed1), as_idempotent(fixed1))
            assert eq(restrict(g2, z), as_idempotent(z))
            return certs.witness(
                {"g1": g1, "g2": g2, "fixed1": fixed1, "fixed2": z},
                bounds,
                nodes,
            )
    return certs.exhausted(bounds, nodes)


# -- rigid decomposition --------------------------------------------------------------


def rigid_parts(g, parts):
    """The factors g_Y acting as g on one part and trivially elsewhere.

    Requires g to stabilize every part setwise; the factors commute pairwise
    and compose to g.
    """
    if not is_partition(parts):
        raise CantorError("rigid decomposition needs a partition")
    for i, y in enumerate(parts):
        if image_clopen(g, y) != y:
            raise NotPartwiseStabilizing(i)
    factors = []
    for y in parts:
        factors.append(join([restrict(g, y), as_idempotent(y.complement())]))
    return factors

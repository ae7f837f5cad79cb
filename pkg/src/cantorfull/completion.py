"""Expression trees over named generators and the bounded Boolean completion.

Elements of the completion are finite compatible joins of restrictions of
generator words; bi_enumerate lists them up to explicit bounds and
piecewise_member searches for a piecewise expression of a unit.  Exact
membership is not attempted: ExhaustedAtBound is an honest third answer.
"""

from dataclasses import dataclass
from itertools import combinations

from . import certs
from . import pmap as _pmap
from .clopen import Clopen, atoms, normalize
from .errors import CantorError, IncompatibleJoin, NotAUnit, UnknownGenerator
from .pmap import Dedup, PartialMap, compatible, eq, one, restrict, star, zero


class GeneratorTable:
    """Named generators over a single alphabet context."""

    def __init__(self, d, mapping=None):
        self.d = d
        self.mapping = dict(mapping or {})
        for name, m in self.mapping.items():
            if m.d != d:
                raise CantorError(f"generator {name} has alphabet {m.d}, not {d}")

    def __getitem__(self, name):
        try:
            return self.mapping[name]
        except KeyError:
            raise UnknownGenerator(name) from None

    def __contains__(self, name):
        return name in self.mapping

    def __iter__(self):
        return iter(self.mapping)

    def items(self):
        return self.mapping.items()

    def __len__(self):
        return len(self.mapping)


# -- expression trees ---------------------------------------------------------


@dataclass(frozen=True)
class GeneratorRef:
    name: str


@dataclass(frozen=True)
class IdempotentLeaf:
    clopen: Clopen


@dataclass(frozen=True)
class ElementLeaf:
    """A literal element, for expressions written directly in branch syntax."""

    element: PartialMap


@dataclass(frozen=True)
class Product:
    children: tuple


@dataclass(frozen=True)
class Star:
    child: object


@dataclass(frozen=True)
class Join:
    children: tuple


@dataclass(frozen=True)
class Restrict:
    child: object
    clopen: Clopen


def evaluate(expr, table):
    """The element denoted by expr; join children are verified compatible."""

    def go(node, path):
        if isinstance(node, GeneratorRef):
            return table[node.name]
        if isinstance(node, IdempotentLeaf):
            return _pmap.as_idempotent(node.clopen)
        if isinstance(node, ElementLeaf):
            return node.element
        if isinstance(node, Product):
            acc = one(table.d)
            for i, child in enumerate(node.children):
                acc = _pmap.compose(acc, go(child, path + (i,)))
            return acc
        if isinstance(node, Star):
            return star(go(node.child, path + (0,)))
        if isinstance(node, Restrict):
            return restrict(go(node.child, path + (0,)), node.clopen)
        if isinstance(node, Join):
            parts = [go(child, path + (i,)) for i, child in enumerate(node.children)]
            for i in range(len(parts)):
                for j in range(i + 1, len(parts)):
                    if not compatible(parts[i], parts[j]):
                        raise IncompatibleJoin(path + (i, j))
            return _pmap.join(parts) if parts else zero(table.d)
        raise CantorError(f"unknown expression node {node!r}")

    return go(expr, ())


# -- bounded enumeration ------------------------------------------------------


def _letters(table):
    """Generator letters and their stars, deduped by eq, in table order."""
    dedup = Dedup()
    out = []
    for name, m in table.items():
        rep, expr, new = dedup.add(m, GeneratorRef(name))
        if new:
            out.append((rep, expr))
    for name, m in table.items():
        rep, expr, new = dedup.add(star(m), Star(GeneratorRef(name)))
        if new:
            out.append((rep, expr))
    return out


def _words_up_to(table, word_len):
    """Distinct-by-eq generator words of length <= word_len with expressions."""
    dedup = Dedup()
    frontier = [(one(table.d), Product(()))]
    dedup.add(frontier[0][0], frontier[0][1])
    words = [frontier[0]]
    letters = _letters(table)
    for _ in range(word_len):
        nxt = []
        for m, expr in frontier:
            for lm, lexpr in letters:
                prod = _pmap.compose(m, lm)
                children = (expr.children if isinstance(expr, Product) else (expr,)) + (lexpr,)
                rep, pexpr, new = dedup.add(prod, Product(children))
                if new:
                    nxt.append((rep, pexpr))
        words.extend(nxt)
        frontier = nxt
    return words


def depth_clopens(d, depth):
    """All clopens that are unions of depth-`depth` atoms, in counter order."""
    cells = atoms(depth, d)
    out = []
    for mask in range(2 ** len(cells)):
        words = [cells[i].antichain[0] for i in range(len(cells)) if mask >> i & 1]
        out.append(normalize(words, d))
    return out


def bi_enumerate(table, word_len, join_arity, depth):
    """Stream the elements of the bounded Boolean completion.

    Yields (element, expression) for every distinct-by-eq join of at most
    join_arity restrictions (to depth-bounded clopens) of generator words of
    length at most word_len, in deterministic BFS order.
    """
    words = _words_up_to(table, word_len)
    clopens = depth_clopens(table.d, depth)

    pieces = []
    piece_dedup = Dedup()
    seen = Dedup()
    for m, expr in words:
        for c in clopens:
            r = restrict(m, c)
            rexpr = Restrict(expr, c)
            rep, rexpr, new = piece_dedup.add(r, rexpr)
            if new:
                pieces.append((rep, rexpr))

    for arity in range(1, join_arity + 1):
        for combo in combinations(range(len(pieces)), arity):
            parts = [pieces[i] for i in combo]
            if any(
                not compatible(parts[i][0], parts[j][0])
                for i in range(arity)
                for j in range(i + 1, arity)
            ):
                continue
            m = _pmap.join([p[0] for p in parts])
            expr = parts[0][1] if arity == 1 else Join(tuple(p[1] for p in parts))
            rep, expr, new = seen.add(m, expr)
            if new:
                yield rep, expr


def piecewise_member(h, table, word_len, depth, node_budget=certs.DEFAULT_NODE_BUDGET):
    """Search for a clopen partition on which h agrees piecewise with
    generator words; a Witness re-evaluates to h by eq."""
    if not _pmap.is_unit(h):
        raise NotAUnit("piecewise membership is defined for units")
    bounds = {"word_len": word_len, "depth": depth, "node_budget": node_budget}
    words = _words_up_to(table, word_len)
    nodes = 0
    for n in range(depth + 1):
        parts = [c for c in atoms(n, table.d)]
        exprs = []
        ok = True
        for alpha in parts:
            target = restrict(h, alpha)
            found = None
            for m, expr in words:
                nodes += 1
                if nodes > node_budget:
                    return certs.exhausted(bounds, nodes, detail="node budget")
                if eq(restrict(m, alpha), target):
                    found = Restrict(expr, alpha)
                    break
            if found is None:
                ok = False
                break
            exprs.append(found)
        if ok:
            expr = Join(tuple(exprs))
            assert eq(evaluate(expr, table), h)
            return certs.witness(expr, bounds, nodes)
    return certs.exhausted(bounds, nodes)

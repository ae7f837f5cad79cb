"""The inverse monoid PHomeo_c(X) of clopen partial homeomorphisms of A^N.

An element is a finite branch table {(u_i -> v_i : t_i)}: the cylinder of u_i
maps onto the cylinder of v_i by u_i.z -> v_i.t_i(z).  Tables are kept in
semi-canonical form: branches sorted by domain prefix, tails freely reduced,
and complete sibling families merged into their parent branch whenever the
family is verbatim the expansion of a representable parent (for trivial tails
this is the unique minimal tree-pair form).  Semantic equality is decided by
eq(), never by comparing table shapes.
"""

from dataclasses import dataclass

from . import clopen as _clopen
from . import tails as _tails
from .clopen import is_prefix, normalize
from .errors import AlphabetMismatch, CantorError, IncompatiblePair
from .tails import TailElement, free_reduce, reduction_key


@dataclass(frozen=True)
class Branch:
    dom: tuple
    ran: tuple
    tail: TailElement

    def __repr__(self):
        s = f"{_clopen.word_to_text(self.dom)}->{_clopen.word_to_text(self.ran)}"
        if self.tail.factors:
            s += f":{self.tail}"
        return f"[{s}]"


class PartialMap:
    """An element of PHomeo_c(X); the empty table is 0, [~ -> ~ : 1] is 1."""

    __slots__ = ("d", "branches", "_dom", "_ran", "_all_trivial")

    def __init__(self, d, branches):
        table = []
        for b in branches:
            if not isinstance(b, Branch):
                dom, ran, tail = b
                b = Branch(tuple(dom), tuple(ran), tail)
            if b.tail.d != d:
                raise AlphabetMismatch(f"tail alphabet {b.tail.d} in context {d}")
            tail = TailElement(d, free_reduce(b.tail.factors))
            table.append(Branch(b.dom, b.ran, tail))
        table = _greedy_merge(d, table)
        table.sort(key=lambda b: (len(b.dom), b.dom))
        _check_antichain(d, [b.dom for b in table], "domain")
        _check_antichain(d, [b.ran for b in table], "range")
        self.d = d
        self.branches = tuple(table)
        self._dom = None
        self._ran = None
        self._all_trivial = all(not b.tail.factors for b in self.branches)

    def __repr__(self):
        return f"PartialMap(d={self.d}, {list(self.branches)})"

    def __eq__(self, other):
        # structural comparison of semi-canonical tables; semantic equality is eq()
        return (
            isinstance(other, PartialMap)
            and self.d == other.d
            and self.branches == other.branches
        )

    def __hash__(self):
        return hash((self.d, self.branches))

    def is_zero(self):
        return not self.branches

    def dom_clopen(self):
        if self._dom is None:
            self._dom = normalize([b.dom for b in self.branches], self.d)
        return self._dom

    def ran_clopen(self):
        if self._ran is None:
            self._ran = normalize([b.ran for b in self.branches], self.d)
        return self._ran


def _check_antichain(d, words, which):
    seen = set()
    for w in words:
        for x in w:
            if not 0 <= x < d:
                raise CantorError(f"letter out of range in {which} word {w}")
        seen.add(w)
    if len(seen) != len(words):
        raise CantorError(f"duplicate {which} prefixes")
    ordered = sorted(words, key=len)
    for i, u in enumerate(ordered):
        for v in ordered[i + 1 :]:
            if is_prefix(u, v):
                raise CantorError(f"{which} prefixes {u} and {v} are comparable")


def _merge_candidates(d, child_tails):
    """Candidate parent tails: free reductions of a child's tail, optionally
    composed with one signed state drawn from that child's machines."""
    seen = set()
    out = []

    def add(factors):
        t = TailElement(d, free_reduce(factors))
        key = tuple(map(_tails._factor_key, t.factors))
        if key not in seen:
            seen.add(key)
            out.append(t)

    add(())
    for t in child_tails:
        rc = free_reduce(t.factors)
        add(rc)
        machines = {m for m, _, _ in rc}
        for m in machines:
            for s in m.states:
                for e in (1, -1):
                    add(((m, s, e),) + rc)
    return out


def _greedy_merge(d, table):
    table = list(table)
    changed = True
    while changed:
        changed = False
        by_dom = {b.dom: b for b in table}
        parents = {b.dom[:-1] for b in table if b.dom}
        for u in sorted(parents, key=len, reverse=True):
            family = []
            for x in range(d):
                b = by_dom.get(u + (x,))
                if b is None:
                    break
                family.append(b)
            if len(family) != d:
                continue
            # range prefixes must form a complete sibling family v.rho(x)
            if any(not b.ran for b in family):
                continue
            v = family[0].ran[:-1]
            if any(b.ran[:-1] != v for b in family):
                continue
            rho = tuple(b.ran[-1] for b in family)
            if sorted(rho) != list(range(d)):
                continue
            merged = None
            for cand in _merge_candidates(d, [b.tail for b in family]):
                if cand.root_perm() != rho:
                    continue
                ok = True
                for x in range(d):
                    section = cand.apply_letter(x)[1]
                    if reduction_key(section) != reduction_key(family[x].tail):
                        ok = False
                        break
                if ok:
                    merged = Branch(u, v, cand)
                    break
            if merged is not None:
                for b in family:
                    table.remove(b)
                table.append(merged)
                changed = True
                break
    return table


# ---------------------------------------------------------------------------
# constructors


def zero(d):
    return PartialMap(d, ())


def one(d):
    return PartialMap(d, [Branch((), (), _tails.trivial(d))])


def as_idempotent(c):
    """The identity map on the clopen c."""
    return PartialMap(c.d, [Branch(w, w, _tails.trivial(c.d)) for w in c.antichain])


def prefix_exchange(d, pairs):
    """Trivial-tail map sending cylinder u to cylinder v for each pair (u, v)."""
    t = _tails.trivial(d)
    return PartialMap(d, [Branch(tuple(u), tuple(v), t) for u, v in pairs])


# ---------------------------------------------------------------------------
# the inverse monoid operations


def _check_context(f, g):
    if f.d != g.d:
        raise AlphabetMismatch(f"alphabet {f.d} vs {g.d}")


def compose(f, g):
    """The partial homeomorphism x -> f(g(x)) on g^{-1}(dom f & ran g)."""
    _check_context(f, g)
    out = []
    for gb in g.branches:
        for fb in f.branches:
            if is_prefix(fb.dom, gb.ran):
                # g lands inside this f branch
                v1 = gb.ran[len(fb.dom) :]
                img, s_res = _tails.apply_prefix(fb.tail, v1)
                out.append(Branch(gb.dom, fb.ran + img, _tails.compose(s_res, gb.tail)))
            elif is_prefix(gb.ran, fb.dom) and fb.dom != gb.ran:
                # only the part of the g branch mapping into [fb.dom] survives
                p1 = fb.dom[len(gb.ran) :]
                w0, _ = _tails.apply_prefix(_tails.invert(gb.tail), p1)
                t_res = _tails.apply_prefix(gb.tail, w0)[1]
                out.append(Branch(gb.dom + w0, fb.ran, _tails.compose(fb.tail, t_res)))
    return PartialMap(f.d, out)


def star(f):
    """The semigroup inverse: swap branch sides and invert tails."""
    return PartialMap(
        f.d, [Branch(b.ran, b.dom, _tails.invert(b.tail)) for b in f.branches]
    )


def dom(f):
    return f.dom_clopen()


def ran(f):
    return f.ran_clopen()


def restrict(f, e):
    """Right multiplication by the idempotent on e: f restricted to e."""
    return compose(f, as_idempotent(e))


def corestrict(e, f):
    """Left multiplication by the idempotent on e: f corestricted to e."""
    return compose(as_idempotent(e), f)


def _refine_branch(b, target):
    """The branch restricted to dom cylinder target (an extension of b.dom)."""
    w = target[len(b.dom) :]
    img, res = _tails.apply_prefix(b.tail, w)
    return Branch(target, b.ran + img, res)


def eq(x, y):
    """Exact equality as partial homeomorphisms.

    Both tables are refined to the common domain antichain; they are equal iff
    the refined range prefixes coincide verbatim and each tail quotient acts
    as the identity.
    """
    _check_context(x, y)
    if x.branches == y.branches:
        return True
    if x._all_trivial and y._all_trivial:
        # semi-canonical form is canonical for trivial tails
        return False
    if x.dom_clopen() != y.dom_clopen():
        return False
    for xb in x.branches:
        for yb in y.branches:
            if is_prefix(xb.dom, yb.dom):
                rx, ry = _refine_branch(xb, yb.dom), yb
            elif is_prefix(yb.dom, xb.dom):
                rx, ry = xb, _refine_branch(yb, xb.dom)
            else:
                continue
            if rx.ran != ry.ran:
                return False
            if not _tails.equal(rx.tail, ry.tail):
                return False
    return True


def leq(x, y):
    """The natural partial order: x = y restricted to dom(x)."""
    return eq(x, restrict(y, dom(x)))


def is_idempotent(m):
    return eq(m, compose(m, m)) and eq(m, star(m))


def compatible(x, y):
    """x*y and xy* are both idempotents, so x and y glue to a partial map."""
    return is_idempotent(compose(star(x), y)) and is_idempotent(compose(x, star(y)))


def disjoint(x, y):
    return compose(star(x), y).is_zero() and compose(x, star(y)).is_zero()


def join(elems):
    """Least upper bound of pairwise compatible elements."""
    elems = list(elems)
    if not elems:
        raise CantorError("join of no elements has no context")
    d = elems[0].d
    for m in elems:
        _check_context(elems[0], m)
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            if not compatible(elems[i], elems[j]):
                raise IncompatiblePair(i, j)
    pool = []
    for m in elems:
        pool.extend(m.branches)
    pool.sort(key=lambda b: (len(b.dom), b.dom))
    kept = []
    kept_doms = set()
    for b in pool:
        if b.dom in kept_doms:
            continue
        if any(is_prefix(k.dom, b.dom) for k in kept):
            continue
        kept.append(b)
        kept_doms.add(b.dom)
    return PartialMap(d, kept)


def is_unit(f):
    return dom(f).is_full() and ran(f).is_full()


# ---------------------------------------------------------------------------
# evaluation


IMAGE = "image"
UNDEFINED = "undefined"
TOO_SHALLOW = "too_shallow"


@dataclass(frozen=True)
class EvalResult:
    kind: str
    prefix: tuple = None
    residual: TailElement = None


def eval_at(f, w):
    """Evaluate f on the cylinder of w.

    Image(prefix, residual) with f(w.z) = prefix.residual(z) when a single
    branch covers [w]; TooShallow when w is a proper prefix of some branch
    domain; Undefined when [w] misses dom(f).
    """
    w = tuple(w)
    for b in f.branches:
        if is_prefix(b.dom, w):
            img, res = _tails.apply_prefix(b.tail, w[len(b.dom) :])
            return EvalResult(IMAGE, b.ran + img, res)
    if any(is_prefix(w, b.dom) for b in f.branches):
        return EvalResult(TOO_SHALLOW)
    return EvalResult(UNDEFINED)


def image_clopen(f, c):
    """The image f(c & dom f) as a clopen set."""
    return ran(restrict(f, c))


def expand_to_depth(f, n):
    """Equivalent table whose domain prefixes all have length >= n."""
    out = []
    for b in f.branches:
        if len(b.dom) >= n:
            out.append(b)
        else:
            for w in _clopen.Clopen(f.d, (b.dom,)).words_at_depth(n):
                out.append(_refine_branch(b, w))
    return PartialMap(f.d, out)


def _tail_fingerprint(t):
    if not t.factors:
        return ()
    if _tails.is_identity(t):
        return ()
    return reduction_key(t)


def fingerprint(f):
    """Hashable prebucket key; eq is the final arbiter within a bucket.

    Exact for trivial-tail maps, whose semi-canonical form is canonical;
    identity-acting automaton tails share the trivial key.
    """
    return tuple((b.dom, b.ran, _tail_fingerprint(b.tail)) for b in f.branches)


class Dedup:
    """Dedupe-by-eq collection with fingerprint prebuckets.

    add() returns the canonical representative (the first eq-equal element
    seen), so callers can both dedupe and canonicalize references.
    """

    def __init__(self):
        self._buckets = {}
        self.items = []

    def add(self, m, payload=None):
        key = fingerprint(m)
        bucket = self._buckets.setdefault(key, [])
        for other, other_payload in bucket:
            if eq(other, m):
                return other, other_payload, False
        bucket.append((m, payload))
        self.items.append((m, payload))
        return m, payload, True

    def find(self, m):
        """(representative, payload) for an eq-equal member, or None."""
        for other, payload in self._buckets.get(fingerprint(m), ()):
            if eq(other, m):
                return other, payload
        return None

    def __len__(self):
        return len(self.items)

    def __contains__(self, m):
        key = fingerprint(m)
        return any(eq(other, m) for other, _ in self._buckets.get(key, ()))

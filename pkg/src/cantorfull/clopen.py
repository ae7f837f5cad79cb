"""Boolean algebra of clopen subsets of the Cantor space A^N.

A clopen set is stored as its canonical reduced prefix antichain: no word is
a proper prefix of another, no full sibling family w0..w(d-1) is present, and
words are sorted length-then-lexicographic.  The empty antichain is the empty
set; the antichain {()} (the empty word) is the whole space.
"""

from functools import reduce
from itertools import product

from .errors import AlphabetMismatch, LetterOutOfRange

Word = tuple  # tuple of ints < d


def word_from_text(text):
    """Parse a word literal: a digit string, or "~" for the empty word."""
    if text == "~":
        return ()
    return tuple(int(ch) for ch in text)


def word_to_text(word):
    if not word:
        return "~"
    return "".join(str(x) for x in word)


def is_prefix(u, v):
    """True iff u is a (not necessarily proper) prefix of v."""
    return len(u) <= len(v) and v[: len(u)] == u


def _word_key(w):
    return (len(w), w)


class Clopen:
    """A clopen subset of A^N as a canonical reduced prefix antichain."""

    __slots__ = ("d", "antichain")

    def __init__(self, d, antichain):
        # antichain must already be canonical; use normalize() otherwise
        self.d = d
        self.antichain = antichain

    def __eq__(self, other):
        return (
            isinstance(other, Clopen)
            and self.d == other.d
            and self.antichain == other.antichain
        )

    def __hash__(self):
        return hash((self.d, self.antichain))

    def __repr__(self):
        return f"Clopen(d={self.d}, {self})"

    def __str__(self):
        if not self.antichain:
            return "{}"
        return "{" + ", ".join(word_to_text(w) for w in self.antichain) + "}"

    def is_empty(self):
        return not self.antichain

    def is_full(self):
        return self.antichain == ((),)

    def contains_word(self, w):
        """True iff the cylinder of w lies inside this set."""
        return any(is_prefix(u, w) for u in self.antichain)

    def meets_word(self, w):
        """True iff the cylinder of w intersects this set."""
        return any(is_prefix(u, w) or is_prefix(w, u) for u in self.antichain)

    def union(self, other):
        self._check(other)
        return normalize(self.antichain + other.antichain, self.d)

    def meet(self, other):
        self._check(other)
        words = []
        for u in self.antichain:
            for v in other.antichain:
                if is_prefix(u, v):
                    words.append(v)
                elif is_prefix(v, u):
                    words.append(u)
        return normalize(words, self.d)

    def complement(self):
        out = []

        def walk(prefix):
            if any(is_prefix(u, prefix) for u in self.antichain):
                return
            if any(is_prefix(prefix, u) for u in self.antichain):
                for x in range(self.d):
                    walk(prefix + (x,))
            else:
                out.append(prefix)

        walk(())
        return normalize(out, self.d)

    def leq(self, other):
        """Set containment: self is a subset of other."""
        self._check(other)
        return all(other.contains_word(u) for u in self.antichain)

    def words_at_depth(self, n):
        """All length-n words whose cylinders lie inside this set.

        Every antichain word must have length <= n for the result to cover
        the set exactly.
        """
        out = []
        for u in self.antichain:
            if len(u) > n:
                raise ValueError(f"antichain word {u} deeper than {n}")
            for tail in product(range(self.d), repeat=n - len(u)):
                out.append(u + tail)
        out.sort()
        return out

    def _check(self, other):
        if self.d != other.d:
            raise AlphabetMismatch(f"alphabet {self.d} vs {other.d}")


def normalize(words, d):
    """Canonical Clopen with the same union of cylinders as the given words."""
    pool = set()
    for w in words:
        w = tuple(w)
        if any(not (0 <= x < d) for x in w):
            raise LetterOutOfRange(f"letter out of range in {w}")
        pool.add(w)

    # prefix absorption: keep only words with no proper prefix in the pool
    for w in sorted(pool, key=len):
        if w in pool and any(w[:k] in pool for k in range(len(w))):
            pool.discard(w)

    # reduce full sibling families bottom-up, re-absorbing as we go
    changed = True
    while changed:
        changed = False
        for w in sorted(pool, key=len, reverse=True):
            if not w or w not in pool:
                continue
            parent = w[:-1]
            if all(parent + (x,) in pool for x in range(d)):
                for x in range(d):
                    pool.discard(parent + (x,))
                pool.add(parent)
                changed = True
        # absorption can only be needed right after a reduction step
        if changed:
            for w in sorted(pool, key=len):
                if w in pool and any(w[:k] in pool for k in range(len(w))):
                    pool.discard(w)

    return Clopen(d, tuple(sorted(pool, key=_word_key)))


def empty(d):
    return Clopen(d, ())


def full(d):
    return Clopen(d, ((),))


def cylinder(w, d):
    return normalize([tuple(w)], d)


def union_all(clopens, d):
    return reduce(lambda a, b: a.union(b), clopens, empty(d))


def atoms(n, d):
    """The d^n depth-n cylinders in lexicographic order."""
    if n < 0:
        raise ValueError("depth must be nonnegative")
    return [Clopen(d, (w,)) for w in product(range(d), repeat=n)]


def is_partition(parts):
    """True iff parts are nonempty, pairwise disjoint, with union the whole space."""
    if not parts:
        return False
    d = parts[0].d
    covered = empty(d)
    for i, p in enumerate(parts):
        if p.d != d:
            raise AlphabetMismatch("mixed alphabets in partition")
        if p.is_empty():
            return False
        if not p.meet(covered).is_empty():
            return False
        covered = covered.union(p)
    return covered.is_full()


def part_of(parts, c):
    """Index of the unique part containing c, or None if c is empty or straddles."""
    if c.is_empty():
        return None
    for i, p in enumerate(parts):
        if c.leq(p):
            return i
    return None

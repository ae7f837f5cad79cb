"""Factoring alternating-group units over covers and combines.

Both factorizations rest on the perfectness of small alternating groups:
overlapping pieces only ever obstruct the middle of a diagonal, and the
obstruction is killed by commutators, which vanish on the parts two factor
groups do not share.  All constructions are solved in an exact abstract model
of the moved clopen pieces and the emitted word is re-verified by eq.
"""

from functools import lru_cache

from . import certs
from .errors import CantorError, NotInAlt
from .msec import (
    alt_perms,
    element,
    embed_subperm,
    identity_perm,
    is_even,
    perm_compose,
    perm_inverse,
    sub_section,
)
from .pmap import compose, eq, one


def word_product(word, sections, d):
    """Compose the units named by a word of (section_index, perm) pairs."""
    acc = one(d)
    for idx, perm in word:
        acc = compose(acc, element(sections[idx], perm))
    return acc


def inverse_word(word):
    return [(idx, perm_inverse(perm)) for idx, perm in reversed(word)]


@lru_cache(maxsize=None)
def _commutator_product_pair(pi):
    """First pair (a1, a2) of even permutations with [a1,pi][a2,pi] = pi^-1."""
    n = len(pi)
    target = perm_inverse(pi)
    alts = alt_perms(n)

    def comm(a):
        return perm_compose(
            perm_compose(a, pi), perm_compose(perm_inverse(a), perm_inverse(pi))
        )

    for a1 in alts:
        c1 = comm(a1)
        for a2 in alts:
            if perm_compose(c1, comm(a2)) == target:
                return a1, a2
    raise CantorError(f"no commutator pair for {pi}")  # impossible for alternating n>=5


def factor_over_cover(target, pi, cover, node_budget=certs.DEFAULT_NODE_BUDGET):
    """Express element(parent, pi) as a word over the pieces' Alt elements.

    Disjoint pieces commute and split the target directly; overlapping pieces
    are corrected with the commutator pattern, which acts only on the shared
    cells.  The witness word is a list of (piece_index, permutation) pairs and
    always re-evaluates to the target by eq.
    """
    parent = cover.parent
    pieces = cover.pieces
    if not is_even(pi):
        raise NotInAlt(f"{pi} is odd")
    if not eq(target, element(parent, pi)):
        raise NotInAlt("target is not the parent element of the supplied permutation")
    bounds = {"node_budget": node_budget}

    if pi == identity_perm(parent.degree):
        return certs.witness({"word": [], "pieces": len(pieces)}, bounds, 0)

    nodes = 0
    disjoint = all(
        pieces[i].base.meet(pieces[j].base).is_empty()
        for i in range(len(pieces))
        for j in range(i + 1, len(pieces))
    )
    if disjoint:
        word = [(k, pi) for k in range(len(pieces))]
    else:
        word = []
        covered = None
        for k, piece in enumerate(pieces):
            b = piece.base
            if covered is None:
                word = [(k, pi)]
                covered = b
                continue
            if b.meet(covered.complement()).is_empty():
                continue
            overlap = covered.meet(b)
            if overlap.is_empty():
                word = word + [(k, pi)]
            else:
                a1, a2 = _commutator_product_pair(pi)
                correction = []
                for a in (a1, a2):
                    correction += (
                        [(k, a)] + word + [(k, perm_inverse(a))] + inverse_word(word)
                    )
                word = word + [(k, pi)] + correction
            covered = covered.union(b)

    nodes = len(word)
    if nodes > node_budget:
        return certs.exhausted(bounds, nodes, detail="witness word over budget")
    got = word_product(word, pieces, parent.d)
    if not eq(got, target):
        return certs.exhausted(bounds, nodes, detail="construction failed verification")
    return certs.witness({"word": word, "pieces": len(pieces)}, bounds, nodes)


# ---------------------------------------------------------------------------
# factored sections: alternating elements with words over a kit


class FactoredSection:
    """A 5-section together with words over kit generators for Alt elements."""

    def __init__(self, msec):
        self.msec = msec

    def word_for(self, pi):
        raise NotImplementedError


class KitSection(FactoredSection):
    """A section whose Alt elements are kit generators themselves."""

    def __init__(self, msec, kit_index):
        super().__init__(msec)
        self.kit_index = kit_index

    def word_for(self, pi):
        if not is_even(pi):
            raise NotInAlt(f"{pi} is odd")
        if pi == identity_perm(self.msec.degree):
            return ()
        return ((self.kit_index, pi),)


class _Symbols:
    """Exact model of the clopen pieces moved by two overlapping factor groups.

    Columns of the g-side sub-section carry a transported copy of the shared
    idempotent (the "piece") and a residual; likewise for the h-side; the two
    designated pieces are identified.  Parent alternating elements permute the
    symbols of their own side and fix the other side, which is exactly the
    support condition verified by combine().
    """

    def __init__(self, g_cols, i1, h_cols, i2):
        self.g_cols, self.i1 = g_cols, i1
        self.h_cols, self.i2 = h_cols, i2
        self.symbols = [("e",)]
        for k in g_cols:
            if k != i1:
                self.symbols.append(("gp", k))
        for k in g_cols:
            self.symbols.append(("gr", k))
        for l in h_cols:
            if l != i2:
                self.symbols.append(("hp", l))
        for l in h_cols:
            self.symbols.append(("hr", l))
        self.index = {s: i for i, s in enumerate(self.symbols)}

    def _piece(self, side, col):
        if side == "g":
            return ("e",) if col == self.i1 else ("gp", col)
        return ("e",) if col == self.i2 else ("hp", col)

    def generator(self, side, sub_perm):
        """Abstract permutation of a side generator given by a sub-column map."""
        cols = self.g_cols if side == "g" else self.h_cols
        move = {c: cols[sub_perm[k]] for k, c in enumerate(cols)}
        out = list(range(len(self.symbols)))
        for c in cols:
            src = self.index[self._piece(side, c)]
            dst = self.index[self._piece(side, move[c])]
            out[src] = dst
            rsrc = self.index[("gr" if side == "g" else "hr", c)]
            rdst = self.index[("gr" if side == "g" else "hr", move[c])]
            out[rsrc] = rdst
        return tuple(out)

    def identity(self):
        return identity_perm(len(self.symbols))


class CombinedSection(FactoredSection):
    """combine() of two factored sections; Alt words via cross 3-cycles.

    A 3-cycle of combined columns through the base with one column from each
    side is a single commutator of parent Alt elements; all other cases reduce
    to those.
    """

    def __init__(self, msec, g, g_cols, i1, h, h_cols, i2):
        super().__init__(msec)
        self.g, self.h = g, h
        self.g_cols, self.h_cols = tuple(g_cols), tuple(h_cols)
        self.i1, self.i2 = i1, i2
        # combined column -> ("g"|"h", parent column); column 0 is the base
        self.col_of = [("g", i1)]
        for k in self.g_cols:
            if k != i1:
                self.col_of.append(("g", k))
        for l in self.h_cols:
            if l != i2:
                self.col_of.append(("h", l))
        self.model = _Symbols(self.g_cols, i1, self.h_cols, i2)
        self._sub_words = {}

    def _side_letter(self, side, sub_perm):
        """(side, sub-column permutation) as an abstract letter."""
        return (side, sub_perm)

    def _abstract(self, letter):
        side, sub_perm = letter
        return self.model.generator(side, sub_perm)

    def _cross_cycle_word(self, u, v):
        """Letters for the 3-cycle (0 u v) with u from one side, v the other."""
        (su, cu), (sv, cv) = self.col_of[u], self.col_of[v]
        if su == sv:
            raise CantorError("cross cycle needs one column from each side")
        if su == "h":
            # (0 u v) is the inverse of (0 v u), which has its first column
            # on the g side
            word = self._cross_cycle_word(v, u)
            return [(s, perm_inverse(p)) for s, p in reversed(word)]
        target = self.model.identity()
        target = list(target)
        a = self.model.index[("e",)]
        b = self.model.index[("gp", cu)]
        c = self.model.index[("hp", cv)]
        target[a], target[b], target[c] = b, c, a
        target = tuple(target)
        g_sub = [p for p in alt_perms(len(self.g_cols)) if p != identity_perm(len(self.g_cols))]
        h_sub = [p for p in alt_perms(len(self.h_cols)) if p != identity_perm(len(self.h_cols))]
        for sp in g_sub:
            for tp in h_sub:
                letters = [
                    ("g", sp),
                    ("h", tp),
                    ("g", perm_inverse(sp)),
                    ("h", perm_inverse(tp)),
                ]
                if self._evaluate(letters) == target:
                    return letters
        raise CantorError(f"no commutator realizes the cross cycle (0 {u} {v})")

    def _evaluate(self, letters):
        acc = self.model.identity()
        for letter in letters:
            acc = perm_compose(acc, self._abstract(letter))
        return acc

    def _cycle_word(self, u, v):
        """Letters for the 3-cycle (0 u v) of combined columns."""
        (su, _), (sv, _) = self.col_of[u], self.col_of[v]
        if su != sv:
            return self._cross_cycle_word(u, v)
        other = "h" if su == "g" else "g"
        spare = [w for w in range(1, self.msec.degree) if self.col_of[w][0] == other]
        if not spare:
            raise CantorError("no opposite-side column to route a same-side cycle")
        w = spare[0]
        # (0 u v) = (0 w v) o (0 u w), words in composition order
        return self._cycle_word(w, v) + self._cycle_word(u, w)

    def _letters_for(self, pi):
        if pi in self._sub_words:
            return self._sub_words[pi]
        # pi as transpositions (cycle by cycle), each rewritten through
        # column 0 via (a b) = (0 a)(0 b)(0 a), then consecutive pairs give
        # 3-cycles through the base via (0 x)(0 y) = (0 y x)
        transpositions = []
        seen = [False] * len(pi)
        for start in range(len(pi)):
            if seen[start] or pi[start] == start:
                seen[start] = True
                continue
            cycle = []
            j = start
            while not seen[j]:
                seen[j] = True
                cycle.append(j)
                j = pi[j]
            for other in reversed(cycle[1:]):
                transpositions.append((cycle[0], other))
        through_zero = []
        for a, b in transpositions:
            if a == 0:
                through_zero.append(b)
            elif b == 0:
                through_zero.append(a)
            else:
                through_zero.extend((a, b, a))
        if len(through_zero) % 2:
            raise NotInAlt(f"{pi} is odd")
        letters = []
        for x, y in zip(through_zero[0::2], through_zero[1::2]):
            if x == y:
                continue
            letters.extend(self._cycle_word(y, x))
        if self._evaluate(letters) != self._target_model(pi):
            raise CantorError("cycle decomposition failed the abstract check")
        self._sub_words[pi] = letters
        return letters

    def _target_model(self, pi):
        out = list(self.model.identity())
        for col in range(self.msec.degree):
            side, c = self.col_of[col]
            src = self.model.index[self.model._piece(side, c)]
            side2, c2 = self.col_of[pi[col]]
            dst = self.model.index[self.model._piece(side2, c2)]
            out[src] = dst
        return tuple(out)

    def combined_col(self, side, parent_col):
        """Index of a parent column inside the combined section."""
        if side == "g" and parent_col == self.i1:
            return 0
        if side == "h" and parent_col == self.i2:
            return 0
        return self.col_of.index((side, parent_col))

    def word_for(self, pi):
        if not is_even(pi):
            raise NotInAlt(f"{pi} is odd")
        if pi == identity_perm(self.msec.degree):
            return ()
        out = []
        for side, sub_perm in self._letters_for(pi):
            if side == "g":
                parent, cols = self.g, self.g_cols
            else:
                parent, cols = self.h, self.h_cols
            full = embed_subperm(sub_perm, cols, parent.msec.degree)
            out.extend(parent.word_for(full))
        return tuple(out)


def combine_factored(fs_g, g_cols, fs_h, h_cols):
    """Combine sub-sections of two factored sections into a factored section.

    The sub-columns must include the bases (index 0) and the parents' supports
    restricted to those columns must meet in exactly one idempotent pair; the
    underlying combine() verifies this.
    """
    from .msec import combine

    g_sub = sub_section(fs_g.msec, g_cols)
    h_sub = sub_section(fs_h.msec, h_cols)
    glued = combine(g_sub, h_sub)
    overlaps = [
        (i, j)
        for i, a in enumerate(g_sub.idems)
        for j, b in enumerate(h_sub.idems)
        if not a.meet(b).is_empty()
    ]
    (i_sub, j_sub) = overlaps[0]
    return CombinedSection(
        glued, fs_g, g_cols, g_cols[i_sub], fs_h, h_cols, h_cols[j_sub]
    )

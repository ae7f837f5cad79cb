"""The generating-kit pipeline: separating families, the transporter set T,
five-sections around it, and expressing alternating units over the kit.

The pipeline derives from a unit table a symmetric family A of part-to-part
transporters, checks the separation conditions, surrounds each short product
of A-elements with a 5-section, and expresses alternating units by peeling
words down to 3-letter pieces and gluing the pieces' sections along shared
idempotents.  All searches are deterministic and budget-guarded, and every
witness re-evaluates to its target by eq.
"""

from . import certs
from . import pmap as _pmap
from .clopen import atoms, is_partition, part_of
from .errors import CantorError, KitConstructionFailed, NotInAlt
from .factor import KitSection, combine_factored
from .msec import (
    alt_perms,
    build,
    element,
    embed_subperm,
    extend_degree,
    identity_perm,
    is_even,
    restrict_msec,
)
from .pmap import Dedup, compose, dom, eq, fingerprint, is_unit, ran, restrict, star


def derive_transporters(table, parts, word_len=2):
    """Part-to-part transporters: restrictions of short unit words to parts,
    kept when domain and range land inside single, distinct parts.

    The result is symmetric (closed under star) and deduped by eq, in
    deterministic word-then-part order.
    """
    units = list(table.mapping.values())
    d = table.d
    words = [_pmap.one(d)]
    dedup = Dedup()
    dedup.add(words[0])
    frontier = list(words)
    for _ in range(word_len):
        nxt = []
        for m in frontier:
            for u in units:
                rep, _, new = dedup.add(compose(m, u))
                if new:
                    nxt.append(rep)
        words.extend(nxt)
        frontier = nxt

    out = Dedup()
    result = []
    for w in words:
        for e in parts:
            t = restrict(w, e)
            if t.is_zero():
                continue
            pd = part_of(parts, dom(t))
            pr = part_of(parts, ran(t))
            if pd is None or pr is None or pd == pr:
                continue
            for candidate in (t, star(t)):
                rep, _, new = out.add(candidate)
                if new:
                    result.append(rep)
    return result


def _part_pair(parts, m):
    return part_of(parts, dom(m)), part_of(parts, ran(m))


def verify_separating(family, parts, n_orbit, depth=None):
    """Check the four separation conditions for a transporter family.

    depth bounds the sampled orbit depth and word lengths (default: the depth
    of the partition).  Returns a per-condition report with witnesses.
    """
    if not is_partition(parts):
        raise CantorError("parts do not form a partition")
    d = parts[0].d
    if depth is None:
        depth = max(len(w) for p in parts for w in p.antichain)
    report = {"n_orbit": n_orbit, "depth": depth}

    # (2) every element has domain and range inside single, different parts
    bad2 = []
    for idx, a in enumerate(family):
        pd, pr = _part_pair(parts, a)
        if pd is None or pr is None or pd == pr:
            bad2.append({"element": idx, "dom_part": pd, "ran_part": pr})
    report["condition2"] = {"ok": not bad2, "failures": bad2}

    # (3) each part has n_orbit - 1 transporters out to pairwise different parts
    bad3 = []
    for i, e in enumerate(parts):
        targets = set()
        for a in family:
            if e.leq(dom(a)):
                pr = part_of(parts, ran(restrict(a, e)))
                if pr is not None and pr != i:
                    targets.add(pr)
        if len(targets) < n_orbit - 1:
            bad3.append({"part": i, "targets": sorted(targets)})
    report["condition3"] = {"ok": not bad3, "failures": bad3}

    # (1) orbits of depth-bounded cylinders meet at least n_orbit parts
    bad1 = []
    for atom in atoms(depth, d):
        seen_parts = {part_of(parts, atom)} - {None}
        frontier = [atom]
        seen_pieces = {atom.antichain}
        for _ in range(depth):
            if len(seen_parts) >= n_orbit:
                break
            nxt = []
            for piece in frontier:
                for a in family:
                    if piece.leq(dom(a)):
                        img = ran(restrict(a, piece))
                        if img.antichain not in seen_pieces:
                            seen_pieces.add(img.antichain)
                            nxt.append(img)
                            p = part_of(parts, img)
                            if p is not None:
                                seen_parts.add(p)
                if len(seen_parts) >= n_orbit:
                    break
            frontier = nxt
        if len(seen_parts) < n_orbit:
            bad1.append({"atom": str(atom), "parts_met": sorted(seen_parts)})
    report["condition1"] = {"ok": not bad1, "failures": bad1}

    # (4) idempotents of the generated monoid contain a union-of-partitions
    # base refining the depth-n atoms; domains and ranges of short words are
    # adjoined only until the refinement suffices
    def split_cells(cells, boundary):
        for g in boundary:
            nxt = []
            for cell in cells:
                for piece in (cell.meet(g), cell.meet(g.complement())):
                    if not piece.is_empty():
                        nxt.append(piece)
            cells = nxt
        return cells

    def coarse_cells(cells):
        bad = []
        for cell in cells:
            words = cell.antichain
            if any(len(w) < depth for w in words) or len({w[:depth] for w in words}) > 1:
                bad.append({"cell": str(cell)})
        return bad

    cells = list(parts)
    bad4 = coarse_cells(cells)
    if bad4:
        cells = split_cells(cells, [c for a in family for c in (dom(a), ran(a))])
        bad4 = coarse_cells(cells)
    if bad4:
        stage2 = []
        for a in family:
            for b in family:
                m = compose(a, b)
                if not m.is_zero():
                    stage2.append(dom(m))
                    stage2.append(ran(m))
        cells = split_cells(cells, stage2)
        bad4 = coarse_cells(cells)
    report["condition4"] = {"ok": not bad4, "failures": bad4[:10]}

    report["ok"] = all(report[f"condition{i}"]["ok"] for i in (1, 2, 3, 4))
    return report


def build_T(family, parts, max_products=3):
    """Products of at most max_products family elements whose domain and range
    lie inside single, distinct parts; deduped by eq."""
    if max_products < 1:
        return []
    dedup = Dedup()
    result = []
    frontier = list(family)
    for m in family:
        rep, _, new = dedup.add(m)
        if new:
            result.append(rep)
    current = list(family)
    for _ in range(max_products - 1):
        nxt = []
        for m in current:
            for a in family:
                p = compose(m, a)
                if p.is_zero():
                    continue
                rep, _, new = dedup.add(p)
                if new:
                    nxt.append(rep)
        result.extend(nxt)
        current = nxt
    out = []
    for m in result:
        pd, pr = _part_pair(parts, m)
        if pd is not None and pr is not None and pd != pr:
            out.append(m)
    return out


class GeneratingKit:
    """Separating family, its transporter products, and their 5-sections.

    Sections are populated on demand: the transporter set T of short products
    is unbounded in practice (every restriction of a short word), so the kit
    deduplicates and surrounds exactly the elements the caller consults.
    sections[i] is a (Multisection, provenance) pair; K is materialized
    lazily as the deduped alternating elements of the built sections.
    """

    def __init__(self, table, parts, family, eager_products=1):
        self.table = table
        self.parts = list(parts)
        self.d = table.d
        self.A = list(family)
        self._star_of = self._pair_stars()
        self._by_dom_part = {}
        for idx, a in enumerate(self.A):
            pd, pr = _part_pair(self.parts, a)
            self._by_dom_part.setdefault(pd, []).append((idx, pr))
        self.sections = []
        self._section_lookup = {}
        self._t_dedup = Dedup()
        self.T = []
        for m in build_T(self.A, self.parts, max_products=eager_products):
            self._ensure_section(m)

    def _pair_stars(self):
        lookup = {}
        by_key = {}
        for idx, a in enumerate(self.A):
            by_key.setdefault(fingerprint(a), []).append(idx)
        for idx, a in enumerate(self.A):
            sa = star(a)
            for j in by_key.get(fingerprint(sa), []):
                if eq(self.A[j], sa):
                    lookup[idx] = j
                    break
            else:
                raise CantorError(f"family is not symmetric: no star for element {idx}")
        return lookup

    def star_index(self, idx):
        return self._star_of[idx]

    def word_element(self, word):
        """The product of family elements named by the index word."""
        m = _pmap.one(self.d)
        for idx in word:
            m = compose(m, self.A[idx])
        return m

    def _ensure_section(self, m, provenance=None):
        """Section index surrounding the transporter m, building it if new."""
        pd, pr = _part_pair(self.parts, m)
        if pd is None or pr is None or pd == pr:
            raise KitConstructionFailed(m, None)
        hit = self._t_dedup.find(m)
        if hit is not None:
            return hit[1]
        base = dom(m)
        used = {pd, pr}
        maps = [m]
        for a_idx, a_pr in self._by_dom_part.get(pd, ()):
            if a_pr in used:
                continue
            if not base.leq(dom(self.A[a_idx])):
                continue
            piece = restrict(self.A[a_idx], base)
            pr_piece = part_of(self.parts, ran(piece))
            if pr_piece is None or pr_piece in used:
                continue
            maps.append(piece)
            used.add(pr_piece)
            if len(maps) == 4:
                break
        if len(maps) < 4:
            raise KitConstructionFailed(m, pd)
        section = build(base, maps)
        idx = len(self.sections)
        self._t_dedup.add(m, idx)
        self.T.append(m)
        self.sections.append((section, provenance))
        return idx

    def section_for_word(self, word):
        """KitSection for a word of <= 3 family indices with distinct parts."""
        if not 1 <= len(word) <= 3:
            raise CantorError(f"kit sections cover words of length 1..3, got {len(word)}")
        m = self.word_element(word)
        if m.is_zero():
            raise CantorError("zero product has no section")
        idx = self._ensure_section(m, provenance=tuple(word))
        return KitSection(self.sections[idx][0], idx), 0, 1

    def alt_elements(self, limit=None):
        """Deduped alternating elements of the built sections (the set K)."""
        dedup = Dedup()
        out = []
        for sec_idx, (section, _) in enumerate(self.sections):
            for pi in alt_perms(section.degree):
                if pi == identity_perm(section.degree):
                    continue
                u = element(section, pi)
                rep, _, new = dedup.add(u, (sec_idx, pi))
                if new:
                    out.append((rep, (sec_idx, pi)))
                    if limit is not None and len(out) >= limit:
                        return out
        return out


def build_kit(table, parts, family=None, n_orbit=5, eager_products=1, word_len=2):
    """Derive (if needed) and verify a separating family, then build the kit."""
    if family is None:
        family = derive_transporters(table, parts, word_len=word_len)
    report = verify_separating(family, parts, n_orbit)
    if not (report["condition2"]["ok"] and report["condition3"]["ok"]):
        first = (report["condition2"]["failures"] or report["condition3"]["failures"])[0]
        raise KitConstructionFailed(first, None)
    return GeneratingKit(table, parts, family, eager_products=eager_products)


# ---------------------------------------------------------------------------
# expressing alternating units over the kit


class _Exhausted(Exception):
    pass


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.nodes = 0

    def tick(self, n=1):
        self.nodes += n
        if self.nodes > self.limit:
            raise _Exhausted("node budget exhausted")


def _wordify_cylinder(kit, m, budget, max_len):
    """Goal-directed word search for a single-branch trivial-tail transporter.

    Such a transporter is the unique prefix exchange between its two
    cylinders, so any chain of family elements carrying the domain cylinder
    onto the range cylinder through single branches realizes it; the search
    runs over cylinder words, not maps.
    """
    b = m.branches[0]
    start, goal = b.dom, b.ran
    cap = max(len(start), len(goal)) + 2

    def finish(word):
        candidate = list(word)
        got = restrict(kit.word_element(candidate), dom(m))
        return candidate if eq(got, m) else None

    fwd = {start: ()}
    bwd = {goal: ()}
    f_frontier, b_frontier = [start], [goal]
    if start in bwd:
        hit = finish(())
        if hit is not None:
            return hit
    for _ in range(max_len):
        nxt_f = []
        for w in f_frontier:
            for idx, a in enumerate(kit.A):
                budget.tick()
                r = _pmap.eval_at(a, w)
                if r.kind != _pmap.IMAGE or r.residual.factors or len(r.prefix) > cap:
                    continue
                img = r.prefix
                if img in fwd:
                    continue
                fwd[img] = (idx,) + fwd[w]
                nxt_f.append(img)
                if img in bwd:
                    hit = finish(bwd[img] + fwd[img])
                    if hit is not None:
                        return hit
        f_frontier = nxt_f
        nxt_b = []
        for w in b_frontier:
            for idx, a in enumerate(kit.A):
                budget.tick()
                r = _pmap.eval_at(star(a), w)
                if r.kind != _pmap.IMAGE or r.residual.factors or len(r.prefix) > cap:
                    continue
                pre = r.prefix
                if pre in bwd:
                    continue
                bwd[pre] = bwd[w] + (idx,)
                nxt_b.append(pre)
                if pre in fwd:
                    hit = finish(bwd[pre] + fwd[pre])
                    if hit is not None:
                        return hit
        b_frontier = nxt_b
    return None


def _wordify(kit, m, budget, max_len):
    """A family-index word whose product restricted to dom(m) equals m.

    Single-branch trivial-tail transporters are prefix exchanges, for which
    the goal-directed cylinder search is the complete method; the blind map
    search is only a fallback for decorated or multi-branch transporters.
    """
    if len(m.branches) == 1 and not m.branches[0].tail.factors:
        return _wordify_cylinder(kit, m, budget, max_len)
    c = dom(m)
    states = [(restrict(_pmap.one(kit.d), c), ())]
    seen = {fingerprint(states[0][0])}
    for _ in range(max_len):
        nxt = []
        for cur, word in states:
            for idx, a in enumerate(kit.A):
                budget.tick()
                step = compose(a, cur)
                if step.is_zero():
                    continue
                new_word = (idx,) + word
                if eq(step, m):
                    return list(new_word)
                fp = fingerprint(step)
                if fp not in seen:
                    seen.add(fp)
                    nxt.append((step, new_word))
        states = nxt
    return None


def _try_combine(fs_a, cols_a, fs_b, cols_b):
    """combine_factored, or None when the support condition fails."""
    from .errors import CantorError as _CE

    try:
        return combine_factored(fs_a, cols_a, fs_b, cols_b)
    except _CE:
        return None


def _spare_candidates(fs, taken):
    return [j for j in range(fs.msec.degree) if j not in taken]


def _cols_tuple(needed):
    """Sub-column tuple: 0 first, the rest sorted and deduped."""
    rest = sorted(set(needed) - {0})
    return (0,) + tuple(rest)


def _combine_with_spares(fs_a, need_a, fs_b, need_b, min_side=3):
    """Try spare columns until a combine_factored satisfies the support rule."""
    from itertools import combinations

    def options(fs, base):
        missing = max(0, min_side - len(base))
        pool = _spare_candidates(fs, set(base))
        if missing == 0:
            return [()]
        return list(combinations(pool, missing))

    base_a = _cols_tuple(need_a)
    base_b = _cols_tuple(need_b)
    for sa in options(fs_a, base_a):
        for sb in options(fs_b, base_b):
            cols_a = _cols_tuple(set(base_a) | set(sa))
            cols_b = _cols_tuple(set(base_b) | set(sb))
            if len(cols_a) < min_side or len(cols_b) < min_side:
                continue
            combined = _try_combine(fs_a, cols_a, fs_b, cols_b)
            if combined is not None:
                return combined, cols_a, cols_b
    return None, None, None


def _factored_for_word(kit, word, budget):
    """FactoredSection containing the word's product as a column transporter.

    Returns (section, col_from, col_to): the product, restricted to the
    section's pullback, is transporter_between(col_from, col_to).  Words of
    length three or less with separated parts are kit sections; longer words
    peel a three-letter head through a fresh part and glue the head's section
    onto the recursively factored tail; same-part words take a detour through
    another part first.
    """
    budget.tick()
    m = kit.word_element(word)
    if m.is_zero():
        raise _Exhausted("zero product while factoring a word")
    pd, pr = _part_pair(kit.parts, m)
    if pd is None or pr is None:
        raise _Exhausted("word product does not respect the partition")

    if pd == pr:
        # detour: m = (m a*) a with a leaving the shared part
        for a_idx, a_pr in kit._by_dom_part.get(pd, ()):
            if a_pr == pd or a_pr == pr:
                continue
            sfs, s_from, s_to = _factored_for_word(
                kit, list(word) + [kit.star_index(a_idx)], budget
            )
            afs, a_from, a_to = kit.section_for_word([a_idx])
            combined, cols_s, cols_a = _combine_with_spares(
                sfs, {s_from, s_to}, afs, {a_from, a_to}
            )
            if combined is None:
                continue
            c_from = combined.combined_col("h", a_from)
            c_to = combined.combined_col("g", s_to)
            return _checked_piece(kit, m, combined, c_from, c_to)
        raise _Exhausted(f"no detour transporter out of part {pd}")

    if len(word) <= 3:
        return kit.section_for_word(word)

    # peel the two outermost letters through a fresh part
    j0, j1 = word[0], word[1]
    p_star = part_of(kit.parts, dom(kit.A[j1]))
    for a_idx, a_pr in kit._by_dom_part.get(p_star, ()):
        if a_pr in (pd, pr):
            continue
        head = [j0, j1, kit.star_index(a_idx)]
        tail = [a_idx] + list(word[2:])
        if kit.word_element(head).is_zero() or kit.word_element(tail).is_zero():
            continue
        hfs, h_from, h_to = kit.section_for_word(head)
        tfs, t_from, t_to = _factored_for_word(kit, tail, budget)
        combined, _, _ = _combine_with_spares(
            tfs, {t_from, t_to}, hfs, {h_from, h_to}
        )
        if combined is None:
            continue
        c_from = combined.combined_col("g", t_from)
        c_to = combined.combined_col("h", h_to)
        return _checked_piece(kit, m, combined, c_from, c_to)
    raise _Exhausted(f"no splice transporter out of part {p_star}")


def _checked_piece(kit, m, fs, c_from, c_to):
    """Verify the factored section carries the word's product where claimed."""
    piece = fs.msec.transporter_between(c_from, c_to)
    if not eq(piece, restrict(m, fs.msec.idems[c_from])):
        raise _Exhausted("glued section does not carry the word product")
    return fs, c_from, c_to


def _find_base_word(kit, c, budget, max_len=3):
    """A short family word whose product's domain is exactly the clopen c.

    Only words whose running domain still contains c can reach one with
    domain exactly c, so everything else is pruned.
    """
    p0 = part_of(kit.parts, c)
    states = [((), None)]
    seen = set()
    for _ in range(max_len):
        nxt = []
        for word, cur in states:
            for idx, a in enumerate(kit.A):
                budget.tick()
                if not word:
                    if part_of(kit.parts, dom(a)) != p0:
                        continue
                    step = a
                else:
                    step = compose(a, cur)
                    if step.is_zero():
                        continue
                if not c.leq(dom(step)):
                    continue
                new_word = (idx,) + word
                pd, pr = _part_pair(kit.parts, step)
                if pd is not None and pr is not None and pd != pr and dom(step) == c:
                    return list(new_word)
                fp = fingerprint(step)
                if fp not in seen:
                    seen.add(fp)
                    nxt.append((new_word, step))
        states = nxt
    return None


def _shrink_to_base(kit, fs, col_from, col_to, c, shrinker, budget):
    """Combine with a section based exactly at c so the piece starts at c."""
    from_piece = fs.msec.idems[col_from]
    if from_piece == c and col_from == 0:
        return fs, col_to
    sfs, _, _ = shrinker
    combined, _, _ = _combine_with_spares(fs, {col_from, col_to}, sfs, {0})
    if combined is None:
        raise _Exhausted("could not shrink a transporter section to the target base")
    if combined.msec.base != c:
        raise _Exhausted("shrink combine did not land on the target base")
    return combined, combined.combined_col("g", col_to)


def express(
    target,
    kit,
    msec_witness,
    perm,
    word_len=6,
    node_budget=certs.DEFAULT_NODE_BUDGET,
):
    """Express a unit of the alternating full group as a word over the kit.

    The caller supplies a witnessing multisection and even permutation with
    target eq element(msec_witness, perm).  The witness word is a list of
    (section_index, permutation) pairs over kit.sections and re-evaluates to
    the target by eq; inputs the bounded procedure cannot handle yield
    ExhaustedAtBound.
    """
    bounds = {"word_len": word_len, "node_budget": node_budget}
    budget = _Budget(node_budget)
    if not is_even(perm):
        raise NotInAlt(f"{perm} is odd")
    if not eq(target, element(msec_witness, perm)):
        raise NotInAlt("target does not match the witnessing multisection element")
    if perm == identity_perm(msec_witness.degree):
        return certs.witness({"word": []}, bounds, 0)
    direct = _direct_word(kit, target, msec_witness, perm)
    if direct is not None:
        return certs.witness({"word": direct}, bounds, len(kit.sections))
    try:
        pieces = _extend_to_five(kit, msec_witness, budget)
        word = []
        for sec5, _piece in pieces:
            rho = embed_subperm(perm, tuple(range(msec_witness.degree)), 5)
            word.extend(_factor_five_cover(kit, sec5, rho, budget, word_len))
    except _Exhausted as stop:
        return certs.exhausted(bounds, budget.nodes, detail=str(stop))
    got = _pmap.one(kit.d)
    for sec_idx, pi in word:
        got = compose(got, element(kit.sections[sec_idx][0], pi))
    if not eq(got, target):
        return certs.exhausted(bounds, budget.nodes, detail="verification failed")
    return certs.witness({"word": word}, bounds, budget.nodes)


def _direct_word(kit, target, msec_witness, perm):
    """Length-one word when the witness columns embed into a kit section."""
    for idx, (section, _) in enumerate(kit.sections):
        if section.base != msec_witness.base:
            continue
        try:
            positions = [section.idems.index(e) for e in msec_witness.idems]
        except ValueError:
            continue
        full = embed_subperm(perm, tuple(positions), section.degree)
        if eq(element(section, full), target):
            return [(idx, full)]
    return None


def _extend_to_five(kit, msec_witness, budget):
    """5-sections over a subdivision whose first columns restrict the input."""
    pending = [msec_witness]
    out = []
    while pending:
        s = pending.pop(0)
        if s.degree >= 5:
            out.append((s, s.base))
            continue
        remaining = max(0, budget.limit - budget.nodes)
        cert = extend_degree(s, kit.table, word_len=3, node_budget=remaining)
        budget.tick(cert.nodes_explored)
        if not cert.is_witness():
            raise _Exhausted("degree extension failed: " + (cert.detail or "no witness"))
        pending.extend(cert.witness["sections"])
    return out


def _factor_five_cover(kit, section, rho, budget, word_len, split_left=3):
    """Factor over the kit, subdividing the base into child cylinders when a
    transporter is not a short family word at the current granularity.

    The subdivision pieces are disjoint restrictions covering the section, so
    the target is the product of the pieces' elements and the witness words
    concatenate.
    """
    try:
        return _factor_five(kit, section, rho, budget, word_len)
    except _Exhausted:
        if split_left <= 0:
            raise
    out = []
    for w in section.base.antichain:
        for x in range(kit.d):
            child = _clopen_of(kit.d, tuple(w) + (x,))
            sub = restrict_msec(section, child)
            out.extend(
                _factor_five_cover(kit, sub, rho, budget, word_len, split_left - 1)
            )
    return out


def _factor_five(kit, section, rho, budget, word_len):
    """Word over kit sections for element(section, rho), section of degree 5."""
    c = section.base
    # express each transporter as a restricted family word
    factored = []
    for k in range(1, 5):
        m_k = section.transporters[k]
        word = _wordify(kit, m_k, budget, word_len)
        if word is None:
            raise _Exhausted(f"transporter {k} is not a short family word")
        fs, col_from, col_to = _factored_for_word(kit, word, budget)
        if not c.leq(fs.msec.idems[col_from]):
            raise _Exhausted("factored section does not cover the target base")
        factored.append((fs, col_from, col_to))

    need_shrink = any(
        fs.msec.idems[col_from] != c or col_from != 0
        for fs, col_from, _ in factored
    )
    shrinker = None
    if need_shrink:
        base_word = _find_base_word(kit, c, budget)
        if base_word is None:
            raise _Exhausted("no kit section based exactly at the target base")
        shrinker = kit.section_for_word(base_word)

    shrunk = []
    for fs, col_from, col_to in factored:
        if fs.msec.idems[col_from] == c and col_from == 0:
            shrunk.append((fs, col_to))
        else:
            shrunk.append(_shrink_to_base(kit, fs, col_from, col_to, c, shrinker, budget))

    # glue the four sections pairwise along the common base, then glue the
    # pairs; the pairs' kept columns are exactly the base and the transporter
    # images, so the final combine needs no spare columns at all
    def glue(left, right):
        (fs_a, tos_a), (fs_b, tos_b) = left, right
        combined, _, _ = _combine_with_spares(
            fs_a, set([0] + tos_a), fs_b, set([0] + tos_b)
        )
        if combined is None:
            raise _Exhausted("could not glue transporter sections at the base")
        tos = [combined.combined_col("g", t) for t in tos_a]
        tos += [combined.combined_col("h", t) for t in tos_b]
        return combined, tos

    pair_a = glue((shrunk[0][0], [shrunk[0][1]]), (shrunk[1][0], [shrunk[1][1]]))
    pair_b = glue((shrunk[2][0], [shrunk[2][1]]), (shrunk[3][0], [shrunk[3][1]]))
    acc, to_cols = glue(pair_a, pair_b)

    cols = (0,) + tuple(to_cols)
    full = embed_subperm(rho, cols, acc.msec.degree)
    return list(acc.word_for(full))


def _cylinder_permutation(target, max_refine=8):
    """A family of disjoint cylinders permuted by the unit, or None.

    The domain antichain is refined until the unit maps family cylinders onto
    family cylinders with trivial residuals; units of infinite order (or with
    genuinely automaton tails) do not stabilize and yield None.
    """
    from . import tails as _tails
    from .clopen import Clopen

    d = target.d
    words = {b.dom for b in target.branches}
    for _ in range(max_refine):
        table = {}
        ok = True
        for w in sorted(words, key=lambda x: (len(x), x)):
            r = _pmap.eval_at(target, w)
            if r.kind != _pmap.IMAGE or not _tails.is_identity(r.residual):
                return None
            table[w] = r.prefix
        images = set(table.values())
        if images == words:
            return table
        refined = set()
        for w in words | images:
            covered = [u for u in words if u[: len(w)] == w]
            if covered and covered != [w]:
                continue
            refined.add(w)
        # split family words that are prefixes of other family words
        final = set()
        for w in refined:
            splitters = [u for u in refined if u != w and u[: len(w)] == w]
            if splitters:
                depth = max(len(u) for u in splitters)
                final.update(Clopen(d, (w,)).words_at_depth(depth))
            else:
                final.add(w)
        if final == words:
            return None
        words = final
    return None


def express_unit(target, kit, word_len=6, node_budget=certs.DEFAULT_NODE_BUDGET):
    """Branchwise express: decompose a trivial-tail unit into 3-cycles of the
    cylinder family it permutes and express each over the kit.

    Only even cylinder permutations are handled; everything else is an honest
    ExhaustedAtBound.
    """
    from .msec import is_even as _perm_even
    from .pmap import prefix_exchange

    bounds = {"word_len": word_len, "node_budget": node_budget}
    if not is_unit(target):
        raise NotInAlt("branchwise express needs a unit")
    table = _cylinder_permutation(target)
    if table is None:
        return certs.exhausted(
            bounds, 0, detail="unit does not stably permute a cylinder family"
        )
    family = sorted(table, key=lambda w: (len(w), w))
    index = {w: i for i, w in enumerate(family)}
    perm = tuple(index[table[w]] for w in family)
    if not _perm_even(perm):
        return certs.exhausted(bounds, 0, detail="odd cylinder permutation")

    moved = [i for i in range(len(family)) if perm[i] != i]
    if not moved:
        return certs.witness({"word": []}, bounds, 0)
    base_idx = moved[0]

    # perm as a product of 3-cycles through the first moved cylinder
    transpositions = []
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start] or perm[start] == start:
            seen[start] = True
            continue
        cycle = []
        j = start
        while not seen[j]:
            seen[j] = True
            cycle.append(j)
            j = perm[j]
        for other in reversed(cycle[1:]):
            transpositions.append((cycle[0], other))
    through = []
    for a, b in transpositions:
        if a == base_idx:
            through.append(b)
        elif b == base_idx:
            through.append(a)
        else:
            through.extend((a, b, a))
    if len(through) % 2:
        return certs.exhausted(bounds, 0, detail="odd cylinder permutation")

    word = []
    nodes = 0
    base = family[base_idx]
    for x, y in zip(through[0::2], through[1::2]):
        if x == y:
            continue
        # the pair is the 3-cycle (base y x)
        u, v = family[y], family[x]
        section = build(
            _clopen_of(kit.d, base),
            [
                prefix_exchange(kit.d, [(base, u)]),
                prefix_exchange(kit.d, [(base, v)]),
            ],
        )
        pi = (1, 2, 0)
        piece = element(section, pi)
        cert = express(piece, kit, section, pi, word_len=word_len,
                       node_budget=max(1, node_budget - nodes))
        nodes += cert.nodes_explored
        if not cert.is_witness():
            return certs.exhausted(bounds, nodes, detail=cert.detail or "piece failed")
        word = word + cert.witness["word"]
    got = _pmap.one(kit.d)
    for sec_idx, pi in word:
        got = compose(got, element(kit.sections[sec_idx][0], pi))
    if not eq(got, target):
        return certs.exhausted(bounds, nodes, detail="verification failed")
    return certs.witness({"word": word}, bounds, nodes)


def _clopen_of(d, word):
    from .clopen import Clopen

    return Clopen(d, (tuple(word),))

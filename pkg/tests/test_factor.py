import random

import pytest

from cantorfull.completion import GeneratorTable
from cantorfull.errors import NotInAlt
from cantorfull.factor import (
    KitSection,
    combine_factored,
    factor_over_cover,
    inverse_word,
    word_product,
)
from cantorfull.msec import (
    alt_perms,
    build,
    cover_of,
    cycle_perm,
    element,
    extend_degree,
    identity_perm,
    overlapping_cover,
    restrict_msec,
)
from cantorfull.pmap import compose, eq, one

from oracles import clo, pm


def five_section():
    base = clo("{000}")
    return build(base, [pm(2, f"000->{w}") for w in ("001", "010", "011", "100")])


def test_factor_disjoint_two_piece_cover():
    s = five_section()
    cov = cover_of(s, [clo("{0000}"), clo("{0001}")])
    for pi in (cycle_perm(5, [0, 1, 2]), cycle_perm(5, [0, 1, 2, 3, 4])):
        target = element(s, pi)
        cert = factor_over_cover(target, pi, cov)
        assert cert.is_witness()
        assert len(cert.witness["word"]) == 2
        assert eq(word_product(cert.witness["word"], cov.pieces, 2), target)


def test_factor_trivial_cover():
    s = five_section()
    cov = cover_of(s, [s.base])
    pi = cycle_perm(5, [0, 1, 2])
    cert = factor_over_cover(element(s, pi), pi, cov)
    assert cert.is_witness()
    assert len(cert.witness["word"]) == 1


def test_factor_overlapping_cover():
    s = five_section()
    b1 = clo("{0000, 00010}")
    b2 = clo("{0001}")
    assert not b1.meet(b2).is_empty()
    cov = overlapping_cover(s, [b1, b2])
    for pi in (
        cycle_perm(5, [0, 1, 2]),
        cycle_perm(5, [0, 1, 2, 3, 4]),
        cycle_perm(5, [2, 3, 4]),
    ):
        target = element(s, pi)
        cert = factor_over_cover(target, pi, cov)
        assert cert.is_witness(), cert.detail
        word = cert.witness["word"]
        assert len(word) <= 40
        assert eq(word_product(word, cov.pieces, 2), target)


def test_factor_rejects_odd_permutation():
    s = five_section()
    cov = cover_of(s, [s.base])
    pi = (1, 0, 2, 3, 4)
    with pytest.raises(NotInAlt):
        factor_over_cover(element(s, pi), pi, cov)


def test_inverse_word():
    s = five_section()
    pi = cycle_perm(5, [0, 1, 2])
    word = [(0, pi), (0, cycle_perm(5, [1, 2, 3]))]
    inv = inverse_word(word)
    prod = word_product(word + inv, [s], 2)
    assert eq(prod, one(2))


# -- combined factored sections -------------------------------------------------


def make_pair():
    s1 = build(clo("{00}"), [pm(2, f"00->{w}") for w in ("010", "011", "100", "101")])
    s2 = build(
        clo("{010}"),
        [pm(2, f"010->{w}") for w in ("1100", "1101", "1110", "1111")],
    )
    return KitSection(s1, 0), KitSection(s2, 1)


def test_combine_factored_structure():
    fg, fh = make_pair()
    cs = combine_factored(fg, (0, 1, 2), fh, (0, 1, 2))
    assert cs.msec.degree == 5
    assert cs.msec.base == clo("{010}")
    assert cs.col_of[0] == ("g", 1)


def test_combine_factored_words_evaluate():
    fg, fh = make_pair()
    sections = [fg.msec, fh.msec]
    cs = combine_factored(fg, (0, 1, 2), fh, (0, 1, 2))
    rng = random.Random(8)
    perms = alt_perms(5)
    sample = [
        identity_perm(5),
        cycle_perm(5, [0, 1, 2]),
        cycle_perm(5, [0, 3, 4]),
        cycle_perm(5, [1, 2, 3]),
        cycle_perm(5, [0, 1, 2, 3, 4]),
        (1, 0, 3, 2, 4),
    ] + [rng.choice(perms) for _ in range(6)]
    for pi in sample:
        word = cs.word_for(pi)
        got = word_product(word, sections, 2)
        assert eq(got, element(cs.msec, pi)), pi


def test_combine_factored_all_sixty():
    fg, fh = make_pair()
    sections = [fg.msec, fh.msec]
    cs = combine_factored(fg, (0, 1, 2), fh, (0, 1, 2))
    for pi in alt_perms(5):
        word = cs.word_for(pi)
        assert eq(word_product(word, sections, 2), element(cs.msec, pi))


def test_nested_combine():
    # combine the combined section with a third section at a fresh idempotent
    fg, fh = make_pair()
    cs = combine_factored(fg, (0, 1, 2), fh, (0, 1, 2))
    # third section based at the combined column {011}: images inside {101}
    s3 = build(
        clo("{011}"),
        [pm(2, f"011->{w}") for w in ("10100", "10101", "10110", "10111")],
    )
    f3 = KitSection(s3, 2)
    col_011 = list(cs.msec.idems).index(clo("{011}"))
    cs2 = combine_factored(cs, (0, col_011, 1), f3, (0, 1, 2))
    assert cs2.msec.degree == 5
    sections = [fg.msec, fh.msec, s3.msec if hasattr(s3, "msec") else s3]
    for pi in (cycle_perm(5, [0, 1, 2]), cycle_perm(5, [0, 2, 4]), (1, 0, 3, 2, 4)):
        word = cs2.word_for(pi)
        got = word_product(word, sections, 2)
        assert eq(got, element(cs2.msec, pi)), pi


# -- extend_degree ---------------------------------------------------------------


def extension_table():
    return GeneratorTable(
        2,
        {
            "s": pm(2, "0->1", "1->0"),
            "t": pm(2, "00->01", "01->00", "1->1"),
            "w": pm(2, "0->110", "110->0", "10->10", "111->111"),
            "u": pm(2, "00->111", "111->00", "01->01", "10->10", "110->110"),
        },
    )


def test_extend_degree_witness():
    table = extension_table()
    s3 = build(clo("{00}"), [pm(2, "00->01"), pm(2, "00->10")])
    cert = extend_degree(s3, table, word_len=2)
    assert cert.is_witness(), cert.detail
    for sec in cert.witness["sections"]:
        assert sec.degree == 4
        # contains the restriction of the original
        r = restrict_msec(s3, sec.base)
        for i in range(3):
            assert eq(sec.transporters[i], r.transporters[i])


def test_extend_degree_exhausts_for_empty_table():
    s3 = build(clo("{00}"), [pm(2, "00->01"), pm(2, "00->10")])
    cert = extend_degree(s3, GeneratorTable(2, {}), word_len=2, split_depth=1)
    assert cert.is_exhausted()

    ident_only = GeneratorTable(2, {"one": one(2)})
    cert = extend_degree(s3, ident_only, word_len=3, split_depth=1)
    assert cert.is_exhausted()

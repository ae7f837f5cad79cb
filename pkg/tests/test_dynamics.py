import random

import pytest

from cantorfull.clopen import atoms, cylinder, full, normalize
from cantorfull.completion import GeneratorTable
from cantorfull.dynamics import (
    DynContext,
    compress_search,
    expansive_certificate,
    fully_compressible_sample,
    minimal_certificate,
    orbit_lower_bound,
    rigid_parts,
    separating_translate,
    split_unit,
    subshift_code,
)
from cantorfull.errors import EmptyInput, IdentityInput, NotPartwiseStabilizing
from cantorfull.families import higman_thompson
from cantorfull.pmap import Branch, PartialMap, compose, eq, one
from cantorfull.tails import adding_machine, state

from oracles import clo, pm


def v2_ctx():
    return DynContext(higman_thompson(2).table)


def adding_ctx():
    unit = PartialMap(2, [Branch((), (), state(adding_machine(2), "a"))])
    return DynContext(GeneratorTable(2, {"a": unit}))


def identity_ctx():
    return DynContext(GeneratorTable(2, {"one": one(2)}))


# -- expansivity -----------------------------------------------------------------


def test_expansive_v2():
    cert = expansive_certificate(v2_ctx(), atoms(1, 2), depth=3, word_len=4)
    assert cert.is_witness()
    assert cert.witness["word_len"] <= 4


def test_expansive_adding_machine_refuted():
    cert = expansive_certificate(adding_ctx(), atoms(1, 2), depth=2, word_len=32)
    assert cert.is_refuted()
    assert "pair" in cert.refuted


def test_expansive_identity_table_depth1():
    cert = expansive_certificate(identity_ctx(), atoms(1, 2), depth=1, word_len=1)
    assert cert.is_witness()
    assert cert.witness["word_len"] == 0


def test_separating_translate_on_demand():
    ctx = v2_ctx()
    c1, c2 = cylinder((0, 0), 2), cylinder((0, 1), 2)
    hit = separating_translate(ctx, atoms(1, 2), c1, c2, word_len=3)
    assert hit is not None


# -- coding ----------------------------------------------------------------------


def test_subshift_code_identity():
    ctx = identity_ctx()
    parts = atoms(1, 2)
    assert subshift_code(ctx, parts, (0, 1), [one(2)]) == [0]


def test_subshift_code_adding_machine():
    ctx = adding_ctx()
    a = ctx.units[0]
    aa = compose(a, a)
    assert subshift_code(ctx, atoms(1, 2), (0, 1), [a, aa]) == [1, 0]


def test_subshift_code_too_shallow():
    ctx = v2_ctx()
    deep = ctx.table["s00_01"]
    assert subshift_code(ctx, atoms(1, 2), (0,), [deep]) == ["too_shallow"]


# -- minimality --------------------------------------------------------------------


def test_minimal_v2():
    cert = minimal_certificate(v2_ctx(), depth=2, word_len=3)
    assert cert.is_witness()


def test_minimal_identity_refuted():
    cert = minimal_certificate(identity_ctx(), depth=1, word_len=2)
    assert cert.is_refuted()
    assert cert.refuted["pair"] == ["{0}", "{1}"]


def test_minimal_single_transposition():
    table = GeneratorTable(2, {"s": pm(2, "0->1", "1->0"), "one": one(2)})
    cert = minimal_certificate(DynContext(table), depth=1, word_len=1)
    assert cert.is_witness()


# -- compressibility ----------------------------------------------------------------


def test_compress_v2_into_disjoint():
    cert = compress_search(v2_ctx(), clo("{0}"), clo("{11}"), word_len=4)
    assert cert.is_witness()


def test_compress_proper_self():
    cert = compress_search(v2_ctx(), clo("{0}"), clo("{0}"), word_len=4)
    assert cert.is_witness()
    assert cert.witness["image"] != "{0}"


def test_compress_identity_exhausts():
    cert = compress_search(identity_ctx(), clo("{0}"), clo("{0}"), word_len=4)
    assert cert.is_exhausted()


def test_compress_empty_input():
    with pytest.raises(EmptyInput):
        compress_search(v2_ctx(), normalize([], 2), clo("{0}"), 2)


def test_fully_compressible_v2():
    report = fully_compressible_sample(v2_ctx(), depth=2, word_len=8)
    assert report["ok"], report["failures"][:3]


def test_fully_compressible_adding_machine_fails():
    report = fully_compressible_sample(adding_ctx(), depth=1, word_len=4)
    assert not report["ok"]
    assert report["failures"]


def test_fully_compressible_depth0_vacuous():
    report = fully_compressible_sample(v2_ctx(), depth=0, word_len=2)
    assert report["ok"]
    assert report["pairs"] == 0


# -- orbit sizes ---------------------------------------------------------------------


def test_orbit_lower_bound_v2():
    cert = orbit_lower_bound(v2_ctx(), (0,), k=5, word_len=6)
    assert cert.is_witness()
    assert len(cert.witness["words"]) == 5


def test_orbit_identity_exhausts():
    cert = orbit_lower_bound(identity_ctx(), (0,), k=2, word_len=3)
    assert cert.is_exhausted()


def test_orbit_k1_identity_word():
    cert = orbit_lower_bound(identity_ctx(), (0,), k=1, word_len=1)
    assert cert.is_witness()
    assert cert.witness["words"] == [[]]


# -- splitting ----------------------------------------------------------------------


def test_split_unit_sigma():
    ctx = v2_ctx()
    g = pm(2, "0->1", "1->0")
    cert = split_unit(g, ctx)
    assert cert.is_witness()
    w = cert.witness
    assert eq(compose(w["g1"], w["g2"]), g)
    assert not w["fixed1"].is_empty()
    assert not w["fixed2"].is_empty()


def test_split_unit_identity_raises():
    with pytest.raises(IdentityInput):
        split_unit(one(2), v2_ctx())


def test_split_unit_with_fixed_clopen():
    # g already fixes {1} pointwise; splitting still works
    ctx = v2_ctx()
    g = pm(2, "00->01", "01->00", "1->1")
    cert = split_unit(g, ctx)
    assert cert.is_witness()
    assert eq(compose(cert.witness["g1"], cert.witness["g2"]), g)


def test_split_unit_random_words():
    ctx = v2_ctx()
    units = list(ctx.table.mapping.values())
    rng = random.Random(77)
    for _ in range(25):
        g = one(2)
        for _ in range(rng.randrange(1, 5)):
            g = compose(g, units[rng.randrange(len(units))])
        if eq(g, one(2)):
            continue
        cert = split_unit(g, ctx)
        assert cert.is_witness(), cert.detail
        w = cert.witness
        assert eq(compose(w["g1"], w["g2"]), g)


# -- rigid decomposition ---------------------------------------------------------------


def test_rigid_parts_supported_inside_one_part():
    g = pm(2, "00->01", "01->00", "1->1")
    parts = [clo("{0}"), clo("{1}")]
    factors = rigid_parts(g, parts)
    assert eq(factors[0], g)
    assert eq(factors[1], one(2))


def test_rigid_parts_two_blocks():
    g = pm(2, "00->01", "01->00", "10->11", "11->10")
    parts = [clo("{0}"), clo("{1}")]
    factors = rigid_parts(g, parts)
    assert eq(compose(factors[0], factors[1]), g)
    assert eq(compose(factors[1], factors[0]), g)
    for f in factors:
        assert not eq(f, one(2))


def test_rigid_parts_rejects_part_movers():
    with pytest.raises(NotPartwiseStabilizing):
        rigid_parts(pm(2, "0->1", "1->0"), [clo("{0}"), clo("{1}")])


def test_compress_witness_reverifies():
    ctx = v2_ctx()
    cert = compress_search(ctx, clo("{0}"), clo("{11}"), word_len=4)
    assert cert.is_witness()
    from cantorfull.pmap import image_clopen

    img = clo("{0}")
    for name in reversed(cert.witness["word"]):
        g = ctx.units[ctx.names.index(name)]
        img = image_clopen(g, img)
    assert str(img) == cert.witness["image"]
    assert img.leq(clo("{11}")) and img != clo("{11}")


def test_witness_monotone_in_word_length():
    ctx = v2_ctx()
    cert = minimal_certificate(ctx, depth=2, word_len=3)
    assert cert.is_witness()
    for longer in (4, 5):
        again = minimal_certificate(ctx, depth=2, word_len=longer)
        assert again.is_witness()
    cert = expansive_certificate(ctx, atoms(1, 2), depth=3, word_len=4)
    assert cert.is_witness()
    again = expansive_certificate(ctx, atoms(1, 2), depth=3, word_len=6)
    assert again.is_witness()

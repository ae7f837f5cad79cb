"""Ready-made generator tables for the rooted-tree examples.

Each family is a named table of units over a fixed alphabet; the
Higman-Thompson generator choice (all swaps of disjoint cylinders up to depth
two, plus the cycle of root cylinders) is a documented fixed set, chosen for
reproducibility rather than minimality.
"""

from dataclasses import dataclass
from itertools import product

from .clopen import cylinder, union_all, word_to_text
from .completion import GeneratorTable
from .errors import CantorError
from .pmap import Branch, PartialMap
from .tails import grigorchuk, state, trivial


@dataclass
class NamedFamily:
    name: str
    parameters: dict
    table: GeneratorTable
    notes: str = ""


def _swap_unit(d, u, v):
    """The unit exchanging the disjoint cylinders of u and v, fixing the rest."""
    rest = union_all([cylinder(u, d), cylinder(v, d)], d).complement()
    t = trivial(d)
    branches = [Branch(tuple(u), tuple(v), t), Branch(tuple(v), tuple(u), t)]
    branches += [Branch(w, w, t) for w in rest.antichain]
    return PartialMap(d, branches)


def _root_antichain(d, k):
    """k pairwise disjoint cylinders covering the space: repeatedly expand the
    last word; reachable sizes are exactly k = 1 mod (d-1)."""
    words = [()]
    while len(words) < k:
        last = words.pop()
        words.extend(last + (x,) for x in range(d))
    if len(words) != k:
        raise CantorError(f"no root antichain of size {k} over {d} letters")
    return words


def higman_thompson(d, k=None):
    """Prefix-exchange generators of the Higman-Thompson group V_{d,k}."""
    if d < 2:
        raise CantorError("alphabet size must be at least 2")
    if k is None:
        k = d
    if k < 1:
        raise CantorError("root arity must be at least 1")
    roots = _root_antichain(d, k)
    rel = 2 if k == 1 else 1
    words = []
    for r in roots:
        for l in range(rel + 1):
            for w in product(range(d), repeat=l):
                words.append(r + w)
    words = sorted(set(words), key=lambda w: (len(w), w))

    mapping = {}
    if k >= 2:
        cyc = [Branch(roots[i], roots[(i + 1) % k], trivial(d)) for i in range(k)]
        mapping["cyc"] = PartialMap(d, cyc)
    for i, u in enumerate(words):
        for v in words[i + 1 :]:
            if u[: len(v)] == v or v[: len(u)] == u:
                continue
            unit = _swap_unit(d, u, v)
            name = f"s{word_to_text(u)}_{word_to_text(v)}"
            if not any(unit == other for other in mapping.values()):
                mapping[name] = unit
    table = GeneratorTable(d, mapping)
    return NamedFamily(
        "higman_thompson",
        {"d": d, "k": k},
        table,
        notes="swaps of disjoint cylinders up to depth two plus the root cycle",
    )


def grigorchuk_units():
    """The four Grigorchuk generators as units decorated on the root branch."""
    machine = grigorchuk()
    mapping = {
        name: PartialMap(2, [Branch((), (), state(machine, name))])
        for name in "abcd"
    }
    return NamedFamily(
        "grigorchuk",
        {},
        GeneratorTable(2, mapping),
        notes="first Grigorchuk group generators a, b, c, d",
    )


def rover_units():
    """Grigorchuk generators together with the Higman-Thompson table."""
    grig = grigorchuk_units()
    ht = higman_thompson(2)
    mapping = dict(grig.table.mapping)
    mapping.update(ht.table.mapping)
    return NamedFamily(
        "rover",
        {},
        GeneratorTable(2, mapping),
        notes="Grigorchuk generators adjoined to the V table",
    )


def depth_aut_units(k, d=2):
    """All units induced by letter permutations down to depth k."""
    if k < 1:
        raise CantorError("depth must be at least 1")
    nodes = [w for l in range(k) for w in product(range(d), repeat=l)]
    perms = list(_all_perms(d))
    total = len(perms) ** len(nodes)
    if total > 20000:
        raise CantorError(f"depth-{k} automorphism family has {total} elements")
    mapping = {}
    for combo in product(range(len(perms)), repeat=len(nodes)):
        assign = dict(zip(nodes, (perms[i] for i in combo)))
        branches = []
        for w in product(range(d), repeat=k):
            img = tuple(assign[w[:j]][x] for j, x in enumerate(w))
            branches.append(Branch(w, img, trivial(d)))
        unit = PartialMap(d, branches)
        mapping[f"p{len(mapping)}"] = unit
    return NamedFamily(
        "depth_aut", {"k": k, "d": d}, GeneratorTable(d, mapping),
        notes=f"letter permutations down to depth {k}",
    )


def _all_perms(d):
    from itertools import permutations

    return permutations(range(d))


def rist_generators(u, inner):
    """The inner family conjugated into the cylinder of u, extended by the
    identity elsewhere: generators of a rigid stabilizer."""
    u = tuple(u)
    d = inner.table.d
    comp = cylinder(u, d).complement()
    t = trivial(d)
    mapping = {}
    for name, g in inner.table.items():
        branches = [Branch(u + b.dom, u + b.ran, b.tail) for b in g.branches]
        branches += [Branch(w, w, t) for w in comp.antichain]
        mapping[f"r{word_to_text(u)}_{name}"] = PartialMap(d, branches)
    return NamedFamily(
        "rist",
        {"prefix": word_to_text(u), "inner": inner.name},
        GeneratorTable(d, mapping),
        notes=f"rigid stabilizer generators inside [{word_to_text(u)}]",
    )


FAMILY_BUILDERS = {
    "higman_thompson": higman_thompson,
    "grigorchuk": lambda: grigorchuk_units(),
    "rover": lambda: rover_units(),
    "depth_aut": depth_aut_units,
}


def family_by_name(spec):
    """Family from a CLI-style spec like "higman_thompson:2" or "grigorchuk"."""
    parts = spec.split(":")
    name, args = parts[0], [int(x) for x in parts[1:]]
    if name not in FAMILY_BUILDERS:
        raise CantorError(f"unknown family {name!r}")
    return FAMILY_BUILDERS[name](*args)

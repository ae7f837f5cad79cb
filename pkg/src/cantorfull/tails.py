"""Tree automorphisms of A^N presented by invertible Mealy machines.

A TailElement is a word of machine states with exponents +-1, acting by
left-to-right function composition (the rightmost factor is applied to the
input first).  Elements are never synthesized into new machine states; the
identity problem is decided by closing the factor word under sections, which
is a finite search.
"""

from itertools import product

from .errors import AlphabetMismatch, BudgetExceeded, CantorError, LetterOutOfRange

DEFAULT_NODE_BUDGET = 100_000


class MealyMachine:
    """Finite invertible letter transducer.

    output[s] is a permutation of the alphabet (as a tuple), transition[s][x]
    the state entered after transducing letter x in state s.
    """

    __slots__ = ("name", "d", "states", "transition", "output", "trivial_states", "_hash")

    def __init__(self, name, d, transition, output):
        self.name = name
        self.d = d
        self.states = tuple(sorted(output))
        self.transition = {s: tuple(transition[s]) for s in self.states}
        self.output = {s: tuple(output[s]) for s in self.states}
        for s in self.states:
            if sorted(self.output[s]) != list(range(d)):
                raise CantorError(f"output of state {s} is not a permutation")
            if len(self.transition[s]) != d:
                raise CantorError(f"transition of state {s} is not total")
            for t in self.transition[s]:
                if t not in self.output:
                    raise CantorError(f"transition target {t} is not a state")
        self.trivial_states = self._find_trivial_states()
        self._hash = hash(
            (self.name, self.d, tuple(sorted(self.transition.items())),
             tuple(sorted(self.output.items())))
        )

    def _find_trivial_states(self):
        # s is trivial iff every state reachable from s outputs the identity
        ident = tuple(range(self.d))
        candidates = {s for s in self.states if self.output[s] == ident}
        changed = True
        while changed:
            changed = False
            for s in list(candidates):
                if any(t not in candidates for t in self.transition[s]):
                    candidates.discard(s)
                    changed = True
        return frozenset(candidates)

    def __eq__(self, other):
        return (
            isinstance(other, MealyMachine)
            and self.name == other.name
            and self.d == other.d
            and self.transition == other.transition
            and self.output == other.output
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"MealyMachine({self.name!r}, d={self.d}, states={self.states})"

    def to_text(self):
        lines = [f"machine {self.name} {self.d}"]
        for s in self.states:
            perm = " ".join(str(x) for x in self.output[s])
            to = " ".join(self.transition[s])
            lines.append(f"state {s} perm {perm} to {to}")
        return "\n".join(lines)


def parse_machines(text):
    """Parse the plain-text machine format; returns {name: MealyMachine}.

    Format, one machine per block:
        machine NAME D
        state S perm p0 .. p(D-1) to T0 .. T(D-1)
    """
    machines = {}
    name = d = None
    transition = {}
    output = {}

    def flush():
        if name is not None:
            machines[name] = MealyMachine(name, d, transition, output)

    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "machine":
            flush()
            name, d = tokens[1], int(tokens[2])
            transition, output = {}, {}
        elif tokens[0] == "state":
            s = tokens[1]
            if tokens[2] != "perm" or tokens[3 + d] != "to":
                raise CantorError(f"malformed state line: {raw!r}")
            output[s] = tuple(int(t) for t in tokens[3 : 3 + d])
            transition[s] = tuple(tokens[4 + d : 4 + 2 * d])
        else:
            raise CantorError(f"malformed machine line: {raw!r}")
    flush()
    return machines


# a factor is (machine, state, exp) with exp in {+1, -1}


def _factor_key(f):
    m, s, e = f
    return (m.name, s, e)


def _apply_letter(factor, x):
    """Image letter and residual factor of a single signed state at letter x."""
    machine, state, exp = factor
    if exp == 1:
        y = machine.output[state][x]
        nxt = machine.transition[state][x]
    else:
        y = machine.output[state].index(x)
        nxt = machine.transition[state][y]
    return y, (machine, nxt, exp)


class TailElement:
    """A signed word of machine states acting on A^N."""

    __slots__ = ("d", "factors")

    def __init__(self, d, factors=()):
        self.d = d
        self.factors = tuple(factors)
        for m, s, e in self.factors:
            if m.d != d:
                raise AlphabetMismatch(f"machine {m.name} has alphabet {m.d}, not {d}")

    def __eq__(self, other):
        # structural equality; use is_identity(quotient) for semantic equality
        return (
            isinstance(other, TailElement)
            and self.d == other.d
            and tuple(map(_factor_key, self.factors)) == tuple(map(_factor_key, other.factors))
        )

    def __hash__(self):
        return hash((self.d, tuple(map(_factor_key, self.factors))))

    def __repr__(self):
        return f"TailElement({self})"

    def __str__(self):
        if not self.factors:
            return "1"
        bits = []
        for m, s, e in self.factors:
            bits.append(s if e == 1 else f"{s}^-1")
        return "*".join(bits)

    def is_trivial_word(self):
        """True iff the factor word is syntactically trivial after free reduction."""
        return not free_reduce(self.factors)

    def apply_letter(self, x):
        """Image letter and residual TailElement at a single letter."""
        if not 0 <= x < self.d:
            raise LetterOutOfRange(f"letter {x}")
        residuals = []
        for f in reversed(self.factors):
            x, r = _apply_letter(f, x)
            residuals.append(r)
        residuals.reverse()
        return x, TailElement(self.d, residuals)

    def root_perm(self):
        """The permutation induced on the first letter."""
        return tuple(self.apply_letter(x)[0] for x in range(self.d))


def trivial(d):
    return TailElement(d)


def apply_prefix(t, w):
    """Image of the prefix w under t, and the section of t at w.

    For every suffix z, t(w.z) = image . residual(z).
    """
    image = []
    for x in w:
        y, t = t.apply_letter(x)
        image.append(y)
    return tuple(image), t


def compose(s, t):
    """The automorphism x -> s(t(x))."""
    if s.d != t.d:
        raise AlphabetMismatch(f"alphabet {s.d} vs {t.d}")
    return TailElement(s.d, s.factors + t.factors)


def invert(t):
    return TailElement(t.d, tuple((m, s, -e) for m, s, e in reversed(t.factors)))


def free_reduce(factors):
    """Drop trivially-acting states and cancel adjacent inverse pairs."""
    stack = []
    for f in factors:
        m, s, e = f
        if s in m.trivial_states:
            continue
        if stack:
            m2, s2, e2 = stack[-1]
            if m2 == m and s2 == s and e2 == -e:
                stack.pop()
                continue
        stack.append(f)
    return tuple(stack)


def reduced(t):
    return TailElement(t.d, free_reduce(t.factors))


def reduction_key(t):
    return tuple(map(_factor_key, free_reduce(t.factors)))


_identity_cache = {}


def is_identity(t, node_budget=DEFAULT_NODE_BUDGET):
    """Decide whether t acts as the identity on A^N.

    Fixed-point closure: t is trivial iff its root permutation is the identity
    and every section is trivial; the closure of a factor word under sections
    is finite, so memoized reachability terminates.  Exceeding the node budget
    raises BudgetExceeded rather than guessing.
    """
    ident = tuple(range(t.d))
    start = reduced(t)
    start_key = (t.d, reduction_key(start))
    cached = _identity_cache.get(start_key)
    if cached is not None:
        return cached

    seen = {start_key}
    unknown = []
    queue = [start]
    nodes = 0
    answer = True
    while queue:
        node = queue.pop()
        key = (t.d, reduction_key(node))
        cached = _identity_cache.get(key)
        if cached is False:
            answer = False
            break
        if cached is True:
            continue
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded(f"identity check exceeded {node_budget} nodes")
        if node.root_perm() != ident:
            answer = False
            break
        unknown.append(key)
        for x in range(t.d):
            section = reduced(node.apply_letter(x)[1])
            skey = (t.d, reduction_key(section))
            if skey not in seen:
                seen.add(skey)
                queue.append(section)

    if answer:
        for key in unknown:
            _identity_cache[key] = True
    else:
        _identity_cache[start_key] = False
    return answer


def equal(s, t, node_budget=DEFAULT_NODE_BUDGET):
    """Semantic equality of two tails."""
    return is_identity(compose(s, invert(t)), node_budget)


# ---------------------------------------------------------------------------
# builtin machines


def adding_machine(d):
    """Base-d odometer: adds 1 with carry to the leading digits."""
    transition = {
        "a": tuple("e" if x < d - 1 else "a" for x in range(d)),
        "e": ("e",) * d,
    }
    output = {
        "a": tuple((x + 1) % d for x in range(d)),
        "e": tuple(range(d)),
    }
    return MealyMachine("adding", d, transition, output)


def grigorchuk():
    """The 5-state machine generating the first Grigorchuk group."""
    transition = {
        "a": ("e", "e"),
        "b": ("a", "c"),
        "c": ("a", "d"),
        "d": ("e", "b"),
        "e": ("e", "e"),
    }
    swap, ident = (1, 0), (0, 1)
    output = {"a": swap, "b": ident, "c": ident, "d": ident, "e": ident}
    return MealyMachine("grigorchuk", 2, transition, output)


def depth_perm(k, assignment, d=None, name=None):
    """Finite-depth tree automorphism from a permutation of depth-k addresses.

    assignment maps each depth-k word to its image and must be induced by
    letter permutations along the tree, i.e. images of words sharing a prefix
    of length j share an image prefix of length j.
    """
    pairs = [(tuple(u), tuple(v)) for u, v in assignment.items()]
    if d is None:
        if not pairs:
            raise CantorError("empty assignment needs an explicit alphabet size")
        d = max(max(u) for u, _ in pairs) + 1 if k > 0 else 2
    if len(pairs) != d**k or any(len(u) != k or len(v) != k for u, v in pairs):
        raise CantorError(f"assignment must permute all {d}**{k} depth-{k} words")
    if sorted(v for _, v in pairs) != sorted(u for u, _ in pairs):
        raise CantorError("assignment is not a permutation")

    transition = {"e": ("e",) * d}
    output = {"e": tuple(range(d))}

    def build(prefix, pairs):
        state = "n" + "".join(map(str, prefix)) if prefix else "root"
        perm = [None] * d
        groups = {x: [] for x in range(d)}
        for u, v in pairs:
            x, y = u[0], v[0]
            if perm[x] is None:
                perm[x] = y
            elif perm[x] != y:
                raise CantorError(f"images below {prefix + (x,)} disagree on the first letter")
            groups[x].append((u[1:], v[1:]))
        if sorted(perm) != list(range(d)):
            raise CantorError(f"letters below {prefix} are not permuted")
        targets = []
        for x in range(d):
            if len(prefix) + 1 < k:
                targets.append(build(prefix + (x,), groups[x]))
            else:
                targets.append("e")
        output[state] = tuple(perm)
        transition[state] = tuple(targets)
        return state

    if k == 0:
        root = "e"
    else:
        root = build((), pairs)
    machine = MealyMachine(name or f"depthperm{k}", d, transition, output)
    return TailElement(d, ((machine, root, 1),))


def state(machine, s, exp=1):
    """TailElement consisting of a single signed machine state."""
    if s not in machine.output:
        raise CantorError(f"{s} is not a state of {machine.name}")
    return TailElement(machine.d, ((machine, s, exp),))


def word(machine, text):
    """TailElement from a compact word like "a*b^-1*c" over one machine."""
    factors = []
    for tok in text.split("*"):
        tok = tok.strip()
        if tok == "1":
            continue
        if tok.endswith("^-1"):
            factors.append((machine, tok[:-3], -1))
        else:
            factors.append((machine, tok, 1))
    return TailElement(machine.d, factors)


def enumerate_action(t, depth):
    """The (word -> word) table of t on all words of the given depth."""
    table = {}
    for w in product(range(t.d), repeat=depth):
        table[w] = apply_prefix(t, w)[0]
    return table

"""Command-line front end: parses the element/expression grammar, dispatches
to the library, and emits text or the JSON certificate schema.

Exit codes mirror the three-valued certificates: 0 for Witness or a true
predicate, 1 for RefutedAtBound or false, 2 for ExhaustedAtBound, 3 for
usage errors.
"""

import argparse
import json
import sys

from . import certs, dynamics, factor, kit, msec, pmap
from .clopen import atoms, is_partition, word_from_text
from .completion import GeneratorTable, bi_enumerate, evaluate, piecewise_member
from .errors import CantorError, ParseError
from .families import FAMILY_BUILDERS, family_by_name
from .msec import build, cover_of
from .parser import Parser, element_to_text, expr_to_text, registry_from_machines
from .tails import adding_machine, grigorchuk, parse_machines

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_EXHAUSTED = 2
EXIT_USAGE = 3


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def default_registry(d):
    registry = registry_from_machines([grigorchuk()], {"grigorchuk": "abcd"}) if d == 2 else {}
    adder = adding_machine(d)
    registry["adder"] = (adder, "a")
    return registry


class Session:
    """Parsed context shared by one invocation."""

    def __init__(self, args):
        self.d = args.alphabet
        self.table = GeneratorTable(self.d, {})
        registry = default_registry(self.d)
        if getattr(args, "machines", None):
            with open(args.machines) as fh:
                for name, machine in parse_machines(fh.read()).items():
                    for s in machine.states:
                        registry[f"{name}.{s}"] = (machine, s)
        self.parser = Parser(self.d, registry)
        if getattr(args, "gens", None):
            self.load_gens(args.gens)

    def load_gens(self, spec):
        try:
            fam = family_by_name(spec)
            self.table = fam.table
            self.d = fam.table.d
            self.parser = Parser(self.d, self.parser.registry)
            return
        except CantorError:
            pass
        mapping = {}
        with open(spec) as fh:
            text = fh.read()
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            name, _, rhs = line.partition("=")
            mapping[name.strip()] = self.parser.parse_element(rhs.strip())
        self.table = GeneratorTable(self.d, mapping)

    def element(self, text):
        """Evaluate an expression (or literal) against the generator table."""
        return evaluate(self.parser.parse_expr(text), self.table)

    def clopen(self, text):
        return self.parser.parse_clopen(text)

    def partition(self, spec):
        if spec.startswith("atoms:"):
            return atoms(int(spec.split(":", 1)[1]), self.d)
        parts = [self.clopen(p) for p in spec.split(";")]
        if not is_partition(parts):
            raise CantorError(f"{spec!r} is not a partition")
        return parts

    def msec(self, spec):
        """Multisection literal: msec(<clopen>; <element>, <element>, ...)."""
        spec = spec.strip()
        if not (spec.startswith("msec(") and spec.endswith(")")):
            raise CantorError("multisection literal must be msec(e1; f2, ...)")
        body = spec[5:-1]
        base_text, _, maps_text = body.partition(";")
        base = self.clopen(base_text.strip())
        maps = [self.element(t.strip()) for t in maps_text.split(",") if t.strip()]
        return build(base, maps)

    def perm(self, spec, degree):
        pi = tuple(int(x) for x in spec.replace(",", " ").split())
        if sorted(pi) != list(range(degree)):
            raise CantorError(f"{spec!r} is not a permutation of 0..{degree - 1}")
        return pi


def emit(args, exit_code, text, payload):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)
    return exit_code


def cert_exit(cert):
    if cert.is_witness():
        return EXIT_OK
    if cert.is_refuted():
        return EXIT_REFUTED
    return EXIT_EXHAUSTED


def emit_cert(args, op, cert, extra_text=""):
    text = f"{op}: {cert.status}"
    if extra_text:
        text += f" ({extra_text})"
    payload = {"op": op}
    payload.update(cert.to_json())
    return emit(args, cert_exit(cert), text, payload)


def emit_bool(args, op, value, detail=""):
    text = f"{op}: {value}" + (f" ({detail})" if detail else "")
    return emit(
        args, EXIT_OK if value else EXIT_REFUTED, text, {"op": op, "result": value}
    )


def emit_value(args, op, text_value, payload_value=None):
    return emit(
        args,
        EXIT_OK,
        f"{op}: {text_value}",
        {"op": op, "value": payload_value if payload_value is not None else text_value},
    )


# -- handlers -------------------------------------------------------------------


def cmd_normalize(session, args):
    return emit_value(args, "normalize", str(session.clopen(args.clopen)))


def cmd_compose(session, args):
    out = pmap.compose(session.element(args.left), session.element(args.right))
    return emit_value(args, "compose", element_to_text(out))


def cmd_star(session, args):
    return emit_value(args, "star", element_to_text(pmap.star(session.element(args.element))))


def cmd_join(session, args):
    out = pmap.join([session.element(t) for t in args.elements])
    return emit_value(args, "join", element_to_text(out))


def cmd_restrict(session, args):
    out = pmap.restrict(session.element(args.element), session.clopen(args.clopen))
    return emit_value(args, "restrict", element_to_text(out))


def cmd_eq(session, args):
    return emit_bool(args, "eq", pmap.eq(session.element(args.left), session.element(args.right)))


def cmd_leq(session, args):
    return emit_bool(args, "leq", pmap.leq(session.element(args.left), session.element(args.right)))


def cmd_compat(session, args):
    x, y = session.element(args.left), session.element(args.right)
    compatible = pmap.compatible(x, y)
    detail = "disjoint" if compatible and pmap.disjoint(x, y) else ""
    return emit_bool(args, "compat", compatible, detail)


def cmd_eval(session, args):
    r = pmap.eval_at(session.element(args.element), word_from_text(args.word))
    if r.kind == pmap.IMAGE:
        text = f"{''.join(map(str, r.prefix)) or '~'} : {r.residual}"
        payload = {"op": "eval", "kind": r.kind, "prefix": list(r.prefix), "residual": str(r.residual)}
        return emit(args, EXIT_OK, f"eval: {text}", payload)
    return emit(args, EXIT_REFUTED, f"eval: {r.kind}", {"op": "eval", "kind": r.kind})


def cmd_gen(session, args):
    if args.action == "list":
        names = sorted(FAMILY_BUILDERS)
        return emit_value(args, "gen list", ", ".join(names), names)
    fam = family_by_name(args.name)
    lines = [f"{name} = {element_to_text(m)}" for name, m in fam.table.items()]
    payload = {
        "name": fam.name,
        "parameters": fam.parameters,
        "notes": fam.notes,
        "generators": {name: element_to_text(m) for name, m in fam.table.items()},
    }
    return emit(args, EXIT_OK, "\n".join(lines), payload)


def cmd_bi(session, args):
    if args.action == "enumerate":
        rows = []
        for m, expr in bi_enumerate(session.table, args.len, args.arity, args.depth):
            rows.append((element_to_text(m), expr_to_text(expr)))
            if args.limit and len(rows) >= args.limit:
                break
        text = "\n".join(f"{e}\t{x}" for e, x in rows)
        return emit(args, EXIT_OK, text, {"op": "bi enumerate", "elements": rows})
    h = session.element(args.element)
    cert = piecewise_member(h, session.table, args.len, args.depth, node_budget=args.budget)
    if cert.is_witness():
        cert = certs.Certificate(
            cert.status,
            witness=expr_to_text(cert.witness),
            bounds=cert.bounds,
            nodes_explored=cert.nodes_explored,
        )
    return emit_cert(args, "bi member", cert)


def cmd_msec(session, args):
    if args.action == "build":
        s = session.msec(args.msec)
        text = f"degree {s.degree}; idempotents " + ", ".join(str(e) for e in s.idems)
        return emit_value(args, "msec build", text, {
            "degree": s.degree,
            "base": str(s.base),
            "idempotents": [str(e) for e in s.idems],
        })
    if args.action == "element":
        s = session.msec(args.msec)
        pi = session.perm(args.perm, s.degree)
        return emit_value(args, "msec element", element_to_text(msec.element(s, pi)))
    if args.action == "cover":
        s = session.msec(args.msec)
        parts = [session.clopen(t) for t in args.parts]
        cov = cover_of(s, parts)
        return emit_value(args, "msec cover", f"{len(cov.pieces)} pieces verified")
    if args.action == "combine":
        s1, s2 = session.msec(args.msec), session.msec(args.other)
        s3 = msec.combine(s1, s2)
        return emit_value(args, "msec combine", f"degree {s3.degree}; base {s3.base}", {
            "degree": s3.degree,
            "base": str(s3.base),
            "idempotents": [str(e) for e in s3.idems],
        })
    if args.action == "extend":
        s = session.msec(args.msec)
        cert = msec.extend_degree(s, session.table, word_len=args.len, node_budget=args.budget)
        extra = ""
        if cert.is_witness():
            cert = certs.Certificate(
                cert.status,
                witness={
                    "pieces": [str(c) for c in cert.witness["subdivision"]],
                    "degrees": [sec.degree for sec in cert.witness["sections"]],
                },
                bounds=cert.bounds,
                nodes_explored=cert.nodes_explored,
            )
            extra = f"{len(cert.witness['pieces'])} pieces"
        return emit_cert(args, "msec extend", cert, extra)
    if args.action == "factor":
        s = session.msec(args.msec)
        pi = session.perm(args.perm, s.degree)
        parts = [session.clopen(t) for t in args.parts]
        cov = (
            cover_of(s, parts)
            if is_partition_of(parts, s.base)
            else msec.overlapping_cover(s, parts)
        )
        target = msec.element(s, pi)
        cert = factor.factor_over_cover(target, pi, cov, node_budget=args.budget)
        if cert.is_witness():
            cert = certs.Certificate(
                cert.status,
                witness={
                    "word": [[k, list(p)] for k, p in cert.witness["word"]],
                    "pieces": cert.witness["pieces"],
                },
                bounds=cert.bounds,
                nodes_explored=cert.nodes_explored,
            )
        return emit_cert(args, "msec factor", cert)
    raise CantorError(f"unknown msec action {args.action!r}")


def is_partition_of(parts, base):
    from .clopen import union_all

    if union_all(parts, parts[0].d) != base:
        return False
    return all(
        parts[i].meet(parts[j]).is_empty()
        for i in range(len(parts))
        for j in range(i + 1, len(parts))
    )


def cmd_genkit(session, args):
    parts = session.partition(args.partition)
    if args.action == "verify":
        family = kit.derive_transporters(session.table, parts, word_len=args.len)
        report = kit.verify_separating(family, parts, args.orbit)
        ok = report["ok"]
        text = "separating: " + (
            "all conditions pass"
            if ok
            else ", ".join(k for k in report if k.startswith("condition") and not report[k]["ok"]) + " fail"
        )
        return emit(args, EXIT_OK if ok else EXIT_REFUTED, text, {"op": "genkit verify", **_jsonable_report(report)})
    if args.action == "build":
        built = kit.build_kit(session.table, parts, word_len=args.len)
        text = f"kit: |A| = {len(built.A)}, |T| = {len(built.T)}, sections = {len(built.sections)}"
        return emit(args, EXIT_OK, text, {
            "op": "genkit build",
            "family_size": len(built.A),
            "transporters": len(built.T),
            "sections": len(built.sections),
        })
    if args.action == "express":
        built = kit.build_kit(session.table, parts, word_len=args.len)
        witness_msec = session.msec(args.msec)
        pi = session.perm(args.perm, witness_msec.degree)
        target = msec.element(witness_msec, pi)
        cert = kit.express(target, built, witness_msec, pi, node_budget=args.budget)
        if cert.is_witness():
            cert = certs.Certificate(
                cert.status,
                witness={"word": [[k, list(p)] for k, p in cert.witness["word"]]},
                bounds=cert.bounds,
                nodes_explored=cert.nodes_explored,
            )
        return emit_cert(args, "genkit express", cert)
    raise CantorError(f"unknown genkit action {args.action!r}")


def _jsonable_report(report):
    return json.loads(json.dumps(report, default=str))


def cmd_dyn(session, args):
    ctx = dynamics.DynContext(session.table)
    if args.action == "expansive":
        parts = session.partition(args.partition)
        cert = dynamics.expansive_certificate(ctx, parts, args.depth, args.len)
        return emit_cert(args, "dyn expansive", cert)
    if args.action == "code":
        parts = session.partition(args.partition)
        words = [session.element(t) for t in args.words]
        code = dynamics.subshift_code(ctx, parts, word_from_text(args.prefix), words)
        return emit_value(args, "dyn code", " ".join(map(str, code)), code)
    if args.action == "minimal":
        cert = dynamics.minimal_certificate(ctx, args.depth, args.len)
        return emit_cert(args, "dyn minimal", cert)
    if args.action == "compress":
        cert = dynamics.compress_search(
            ctx, session.clopen(args.source), session.clopen(args.target), args.len
        )
        return emit_cert(args, "dyn compress", cert)
    if args.action == "fullcompress":
        report = dynamics.fully_compressible_sample(ctx, args.depth, args.len)
        text = f"fullcompress: {'all pairs pass' if report['ok'] else 'failures: ' + str(len(report['failures']))}"
        return emit(args, EXIT_OK if report["ok"] else EXIT_REFUTED, text, {"op": "dyn fullcompress", **report})
    if args.action == "orbit":
        cert = dynamics.orbit_lower_bound(
            ctx, word_from_text(args.prefix), args.count, args.len, node_budget=args.budget
        )
        return emit_cert(args, "dyn orbit", cert)
    if args.action == "split":
        g = session.element(args.element)
        cert = dynamics.split_unit(g, ctx, word_len=args.len)
        if cert.is_witness():
            w = cert.witness
            cert = certs.Certificate(
                cert.status,
                witness={
                    "g1": element_to_text(w["g1"]),
                    "g2": element_to_text(w["g2"]),
                    "fixed1": str(w["fixed1"]),
                    "fixed2": str(w["fixed2"]),
                },
                bounds=cert.bounds,
                nodes_explored=cert.nodes_explored,
            )
        return emit_cert(args, "dyn split", cert)
    if args.action == "rigid":
        g = session.element(args.element)
        parts = session.partition(args.partition)
        factors = dynamics.rigid_parts(g, parts)
        lines = [element_to_text(f) for f in factors]
        return emit(args, EXIT_OK, "\n".join(lines), {"op": "dyn rigid", "factors": lines})
    raise CantorError(f"unknown dyn action {args.action!r}")


# -- argument wiring ---------------------------------------------------------------


def _common(sub, budget=True):
    sub.add_argument("--json", action="store_true", help="emit the JSON certificate schema")
    sub.add_argument("-d", "--alphabet", type=int, default=2, help="alphabet size")
    sub.add_argument("--gens", help="generator family (name[:params]) or file")
    sub.add_argument("--machines", help="file of Mealy machine definitions")
    sub.add_argument("--seed", type=int, default=0, help="seed for randomized utilities")
    if budget:
        sub.add_argument("--budget", type=int, default=certs.DEFAULT_NODE_BUDGET)


def build_arg_parser():
    top = _ArgumentParser(prog="cfl", description=__doc__)
    subs = top.add_subparsers(dest="command", required=True)

    p = subs.add_parser("normalize");  _common(p); p.add_argument("clopen"); p.set_defaults(fn=cmd_normalize)
    p = subs.add_parser("compose");    _common(p); p.add_argument("left"); p.add_argument("right"); p.set_defaults(fn=cmd_compose)
    p = subs.add_parser("star");       _common(p); p.add_argument("element"); p.set_defaults(fn=cmd_star)
    p = subs.add_parser("join");       _common(p); p.add_argument("elements", nargs="+"); p.set_defaults(fn=cmd_join)
    p = subs.add_parser("restrict");   _common(p); p.add_argument("element"); p.add_argument("clopen"); p.set_defaults(fn=cmd_restrict)
    p = subs.add_parser("eq");         _common(p); p.add_argument("left"); p.add_argument("right"); p.set_defaults(fn=cmd_eq)
    p = subs.add_parser("leq");        _common(p); p.add_argument("left"); p.add_argument("right"); p.set_defaults(fn=cmd_leq)
    p = subs.add_parser("compat");     _common(p); p.add_argument("left"); p.add_argument("right"); p.set_defaults(fn=cmd_compat)
    p = subs.add_parser("eval");       _common(p); p.add_argument("element"); p.add_argument("word"); p.set_defaults(fn=cmd_eval)

    p = subs.add_parser("gen"); _common(p)
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    p.set_defaults(fn=cmd_gen)

    p = subs.add_parser("bi"); _common(p)
    p.add_argument("action", choices=("enumerate", "member"))
    p.add_argument("element", nargs="?")
    p.add_argument("--len", type=int, default=1)
    p.add_argument("--arity", type=int, default=1)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--limit", type=int, default=0)
    p.set_defaults(fn=cmd_bi)

    p = subs.add_parser("msec"); _common(p)
    p.add_argument("action", choices=("build", "element", "cover", "combine", "extend", "factor"))
    p.add_argument("msec", help="multisection literal msec(e1; f2, ...)")
    p.add_argument("other", nargs="?", help="second multisection for combine")
    p.add_argument("--perm", help="permutation like 1,2,0")
    p.add_argument("--parts", nargs="*", default=[], help="cover pieces (clopens)")
    p.add_argument("--len", type=int, default=3)
    p.set_defaults(fn=cmd_msec)

    p = subs.add_parser("genkit"); _common(p)
    p.add_argument("action", choices=("verify", "build", "express"))
    p.add_argument("--partition", default="atoms:3")
    p.add_argument("--orbit", type=int, default=5)
    p.add_argument("--len", type=int, default=2)
    p.add_argument("--msec", help="witnessing multisection for express")
    p.add_argument("--perm", help="witnessing permutation for express")
    p.set_defaults(fn=cmd_genkit)

    p = subs.add_parser("dyn"); _common(p)
    p.add_argument("action", choices=("expansive", "code", "minimal", "compress", "fullcompress", "orbit", "split", "rigid"))
    p.add_argument("--partition", default="atoms:1")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--len", type=int, default=4)
    p.add_argument("--prefix", default="")
    p.add_argument("--words", nargs="*", default=[])
    p.add_argument("--source", help="clopen Y for compress")
    p.add_argument("--target", help="clopen Z for compress")
    p.add_argument("--count", type=int, default=5, help="orbit size bound k")
    p.add_argument("--element", help="unit for split/rigid")
    p.set_defaults(fn=cmd_dyn)

    return top


def main(argv=None):
    top = build_arg_parser()
    try:
        args = top.parse_args(argv)
    except SystemExit as stop:
        return EXIT_USAGE if stop.code not in (0,) else 0
    try:
        session = Session(args)
        return args.fn(session, args)
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (CantorError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

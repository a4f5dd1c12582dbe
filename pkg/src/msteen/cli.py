"""Command line interface: ``msteen [--prime L] [--json] COMMAND ...``.

Exit status is 0 on success, 1 when ``verify`` finds a counterexample and
2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from functools import reduce

from msteen.algebra import (
    SteenrodElement,
    SteenrodTensor,
    coproduct,
    mono_sort_key,
    multiply,
    render_monomial,
    specialize_classical,
)
from msteen.bmu import BmuClass, TotalPowerExpansion, act, module_ring, render_bmu_monomial, total_power
from msteen.chern import ChernPoly, chern_action, q_index, stable_rank, thom_action
from msteen.coeff import MotCoeff, Prime
from msteen.dual import DualElement, DualTensor, dual_coproduct, dual_mul, render_dual_monomial
from msteen.expr import ParseError, class_shape, parse, to_class, to_dual, to_milnor, to_operation, to_steenrod
from msteen.indices import index_key
from msteen.milnor import MilnorElement, pair, render_milnor_index
from msteen.verify import verify_adem

log = logging.getLogger("msteen")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# JSON rendering


def _coeff_json(c: int, a: int, b: int) -> dict:
    return {"scalar": c, "t": a, "r": b}


def _doc(prime: int, basis: str, terms: list) -> dict:
    return {
        "prime": prime,
        "basis": basis,
        "terms": [{"monomial": m, "coeff": _coeff_json(c, a, b)} for m, (a, b), c in terms],
    }


def to_json_doc(value, prime: int) -> dict:
    """Schema ``{prime, basis, terms: [{monomial, coeff: {scalar, t, r}}]}``."""
    if isinstance(value, SteenrodElement):
        return _doc(prime, "admissible", [(render_monomial(m, prime), ab, c) for m, ab, c in value.sorted_terms()])
    if isinstance(value, MilnorElement):
        return _doc(prime, "milnor", [(render_milnor_index(m), ab, c) for m, ab, c in value.sorted_terms()])
    if isinstance(value, DualElement):
        return _doc(prime, "dual", [(render_dual_monomial(m) or "1", ab, c) for m, ab, c in value.sorted_terms()])
    if isinstance(value, SteenrodTensor):
        keys = sorted(value.terms, key=lambda k: (mono_sort_key(k[0], prime), mono_sort_key(k[1], prime)))
        rows = []
        for m1, m2 in keys:
            body = f"{render_monomial(m1, prime)} ⊗ {render_monomial(m2, prime)}"
            rows += [(body, ab, c) for ab, c in sorted(value.terms[(m1, m2)].terms.items())]
        return _doc(prime, "admissible-tensor", rows)
    if isinstance(value, DualTensor):
        rows = []
        for i, j in sorted(value.terms, key=lambda k: (index_key(k[0]), index_key(k[1]))):
            body = f"{render_dual_monomial(i) or '1'} ⊗ {render_dual_monomial(j) or '1'}"
            rows += [(body, ab, c) for ab, c in sorted(value.terms[(i, j)].terms.items())]
        return _doc(prime, "dual-tensor", rows)
    if isinstance(value, BmuClass):
        return _doc(prime, "class", _class_rows(value))
    if isinstance(value, MotCoeff):
        return _doc(prime, "coefficient", [("1", ab, c) for ab, c in sorted(value.terms.items())])
    if isinstance(value, TotalPowerExpansion):
        doc = {"prime": prime, "basis": "total-power", "parts": []}
        for (j, has_c) in sorted(value.terms):
            doc["parts"].append({"d": j, "c": has_c, "class": _doc(prime, "class", _class_rows(value.terms[(j, has_c)]))})
        return doc
    if isinstance(value, ChernPoly):
        doc = _doc(prime, "chern", [(_chern_body(e), (0, 0), c) for e, c in value._sorted()])
        for row, (e, _) in zip(doc["terms"], value._sorted()):
            row["exponents"] = {f"c{j + 1}": x for j, x in enumerate(e) if x}
        return doc
    raise TypeError(f"cannot render {type(value).__name__}")


def _class_rows(x: BmuClass) -> list:
    rows = []
    for m in sorted(x.terms, reverse=True):
        rows += [(render_bmu_monomial(m), ab, c) for ab, c in sorted(x.terms[m].terms.items())]
    return rows


def _chern_body(e) -> str:
    body = " ".join(f"c{j + 1}" if x == 1 else f"c{j + 1}^{x}" for j, x in enumerate(e) if x)
    return body or "1"


def json_doc_to_text(doc: dict) -> str:
    """Expression text for a JSON document of a single-algebra basis."""
    parts = []
    for row in doc["terms"]:
        c = row["coeff"]
        coeff = [str(c["scalar"])]
        if c["t"]:
            coeff.append(f"t^{c['t']}")
        if c["r"]:
            coeff.append(f"r^{c['r']}")
        mono = "" if row["monomial"] == "1" else row["monomial"]
        if doc["basis"] == "dual":
            parts.append(" ".join(x for x in [mono] + coeff if x))
        else:
            parts.append(" ".join(x for x in coeff + [mono] if x))
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# commands


def _steenrod(text: str, p: int) -> SteenrodElement:
    return to_steenrod(parse(text, p))


def cmd_normalize(args, p):
    return _steenrod(args.expr, p)


def cmd_multiply(args, p):
    return reduce(multiply, [_steenrod(t, p) for t in args.exprs])


def cmd_coproduct(args, p):
    return coproduct(_steenrod(args.expr, p))


def cmd_dual_mul(args, p):
    return reduce(dual_mul, [to_dual(parse(t, p)) for t in args.exprs])


def cmd_dual_coproduct(args, p):
    return dual_coproduct(to_dual(parse(args.expr, p)))


def cmd_pair(args, p):
    op = to_operation(parse(args.op, p))
    omega = to_dual(parse(args.dual, p))
    out = MotCoeff.zero(p)
    for m, c in omega.terms.items():
        out = out + pair(op, m, p) * c
    return out


def cmd_to_milnor(args, p):
    return to_milnor(parse(args.expr, p))


def cmd_to_admissible(args, p):
    return _steenrod(args.expr, p)


def _ring_for(cls_expr, p, arity, truncation, extra_weight):
    n, top = class_shape(cls_expr)
    n = arity or n
    if truncation is None:
        weight = 0
        for term in cls_expr.live_terms():
            weight = max(weight, sum(d[1] for k, d in term.factors if k in ("u", "v")))
        truncation = max(2, top + 1, weight + extra_weight + 1)
    if n < 1 or truncation < 2:
        raise UsageError("need arity >= 1 and truncation >= 2")
    return module_ring(p, n, truncation)


def cmd_act(args, p):
    op_expr = parse(args.op, p)
    degs = to_steenrod(op_expr).bidegrees()
    w = max((d.weight for d in degs), default=0)
    cls_expr = parse(args.cls, p)
    ring = _ring_for(cls_expr, p, args.arity, args.truncation, w)
    return act(to_operation(op_expr), to_class(cls_expr, ring))


def cmd_total_power(args, p):
    cls_expr = parse(args.cls, p)
    probe = to_class(cls_expr, _ring_for(cls_expr, p, args.arity, args.truncation, 0))
    degs = probe.bidegrees()
    r = args.r
    if r is None:
        if len(degs) != 1:
            raise UsageError("class must be homogeneous of bidegree (2r, r)")
        r = next(iter(degs)).weight
    ring = _ring_for(cls_expr, p, args.arity, args.truncation, (p - 1) * r)
    return total_power(to_class(cls_expr, ring), r)


def _r_seq(args) -> tuple:
    if args.q is not None:
        return q_index(args.q)
    if not args.r:
        return ()
    try:
        return tuple(int(x) for x in args.r.split(","))
    except ValueError:
        raise UsageError(f"bad r-sequence {args.r!r}") from None


def cmd_chern(args, p):
    return chern_action(_r_seq(args), args.i, args.d, p)


def cmd_thom(args, p):
    r = _r_seq(args)
    d = args.d if args.d is not None else max(1, stable_rank(r, p))
    return thom_action(r, d, p)


def cmd_specialize(args, p):
    classical = specialize_classical(_steenrod(args.expr, p))
    return SteenrodElement(p, classical)


def cmd_verify(args, p):
    return verify_adem(p, args.max, args.module_cutoff, args.workers)


COMMANDS = {
    "normalize": cmd_normalize,
    "multiply": cmd_multiply,
    "coproduct": cmd_coproduct,
    "dual-mul": cmd_dual_mul,
    "dual-coproduct": cmd_dual_coproduct,
    "pair": cmd_pair,
    "to-milnor": cmd_to_milnor,
    "to-admissible": cmd_to_admissible,
    "act": cmd_act,
    "total-power": cmd_total_power,
    "chern": cmd_chern,
    "thom": cmd_thom,
    "verify": cmd_verify,
    "specialize": cmd_specialize,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, default=argparse.SUPPRESS, help="the prime l (default 2)")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")

    parser = _Parser(prog="msteen", description="Motivic mod-l Steenrod algebra calculator.")
    parser.add_argument("--prime", type=int, default=2, help="the prime l (default 2)")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    add("normalize", "admissible form of an expression").add_argument("expr")
    add("multiply", "product of expressions").add_argument("exprs", nargs="+")
    add("coproduct", "coproduct of an operation").add_argument("expr")
    add("dual-mul", "product in the dual algebra").add_argument("exprs", nargs="+")
    add("dual-coproduct", "coproduct in the dual algebra").add_argument("expr")
    sp = add("pair", "pairing of an operation with a dual element")
    sp.add_argument("op")
    sp.add_argument("dual")
    add("to-milnor", "Milnor basis expansion").add_argument("expr")
    add("to-admissible", "admissible basis expansion").add_argument("expr")
    for name, help_text in (("act", "apply an operation to a class"), ("total-power", "total power expansion of a class")):
        sp = add(name, help_text)
        if name == "act":
            sp.add_argument("op")
        sp.add_argument("cls", metavar="class")
        sp.add_argument("--arity", type=int, default=None, help="number of (u, v) pairs")
        sp.add_argument("--truncation", type=int, default=None, help="v exponents below this bound")
        if name == "total-power":
            sp.add_argument("--r", type=int, default=None, help="weight r of a class in bidegree (2r, r)")
    for name, help_text in (("chern", "operation on a Chern class"), ("thom", "operation on the Thom class")):
        sp = add(name, help_text)
        grp = sp.add_mutually_exclusive_group()
        grp.add_argument("--r", default="", help="Milnor r-sequence, e.g. 1,0,2")
        grp.add_argument("--q", type=int, default=None, help="use the index of q_n")
        if name == "chern":
            sp.add_argument("--i", type=int, required=True, help="Chern class index")
            sp.add_argument("--d", type=int, required=True, help="rank bound")
        else:
            sp.add_argument("--d", type=int, default=None, help="rank bound (default: stable rank)")
    sp = add("verify", "verification sweeps")
    sp.add_argument("what", choices=["adem"])
    sp.add_argument("--max", type=int, default=100, help="check pairs with a + b <= MAX")
    sp.add_argument("--module-cutoff", type=int, default=6, help="module evaluation up to this weight")
    sp.add_argument("--workers", type=int, default=None, help="worker processes (capped by MSTEEN_THREADS)")
    sp.add_argument("--report", default=None, help="write the JSON report to this file")
    add("specialize", "classical form at t = 1, r = 0").add_argument("expr")
    return parser


def _error(args_json: bool, kind: str, message: str, position=None) -> str:
    if args_json:
        doc = {"error": kind, "message": message}
        if position is not None:
            doc["position"] = position
        return json.dumps(doc)
    return f"error: {message}"


def run(argv=None) -> tuple:
    """Run a command; returns ``(exit status, stdout text, stderr text)``."""
    argv = list(sys.argv[1:] if argv is None else argv)
    want_json = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return 2, "", _error(want_json, "usage", str(e))
    if args.verbose:
        logging.basicConfig(level=logging.INFO)
    if not args.command:
        return 2, "", _error(want_json, "usage", "missing command (see msteen --help)")
    try:
        p = int(Prime(args.prime))
        result = COMMANDS[args.command](args, p)
    except ParseError as e:
        return 2, "", _error(args.json, "parse", str(e), e.position)
    except (UsageError, ValueError, TypeError) as e:
        return 2, "", _error(args.json, "input", str(e))

    if args.command == "verify":
        if args.report:
            with open(args.report, "w") as fh:
                fh.write(result.to_json())
        text = json.dumps({k: v for k, v in result.as_dict().items() if k != "checks"}) if args.json else result.summary()
        return (0 if result.ok else 1), text, ""
    if args.json:
        return 0, json.dumps(to_json_doc(result, p), ensure_ascii=False), ""
    return 0, str(result), ""


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s: %(message)s")
    code, out, err = run(argv)
    if out:
        print(out)
    if err:
        print(err, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

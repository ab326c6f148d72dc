"""Command-line interface.

Exit status: 0 on success, 1 for usage errors, 2 for model or query
errors (one ``error: <Class>: <message>`` line on stderr).  Variables are
named by their labels in the model file; values are symbol indices.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import modelfile
from .criteria import backdoor_adjustment, certify_backdoor, effect_kernel, find_backdoor_sets
from .distribution import JointTable, condition, conditional_mutual_information, marginal
from .errors import CausalInfoError, InvalidModel, InvalidSpec
from .graph import to_dot
from .information import ZERO_TOL, chain_rule_decomposition, conditional_directed_information
from .information import canonical_structure_report
from .intervention import interventional_conditional, interventional_global
from .model import CptModel, cpt_from_functional, joint_from_cpts, sample_many, validate_model


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _jnum(x: float):
    """JSON-safe float: full precision, +inf as the string "inf"."""
    return "inf" if math.isinf(x) else float(x)


def _names(model, text: str) -> frozenset:
    if not text:
        return frozenset()
    return frozenset(_index(model, tok.strip()) for tok in text.split(",") if tok.strip())


def _index(model, name: str) -> int:
    try:
        return model.dag.labels.index(name)
    except ValueError:
        raise InvalidSpec(f"unknown variable {name!r}") from None


def _assignment(model, text: str) -> dict:
    out = {}
    if not text:
        return out
    for tok in text.split(","):
        name, sep, value = tok.partition("=")
        if not sep:
            raise UsageError(f"expected NAME=VALUE, got {tok!r}")
        i = _index(model, name.strip())
        try:
            v = int(value)
        except ValueError:
            raise UsageError(f"value for {name.strip()!r} must be an integer, got {value!r}") from None
        if not 0 <= v < model.cards[i]:
            raise InvalidSpec(f"value {v} out of range for {name.strip()!r} (cardinality {model.cards[i]})")
        out[i] = v
    return out


def _cpt(model) -> CptModel:
    return model if isinstance(model, CptModel) else cpt_from_functional(model)


def _label_set(model, S) -> list:
    return [model.dag.labels[i] for i in sorted(S)]


def _table_payload(model, table: JointTable) -> dict:
    return {
        "variables": [model.dag.labels[v] for v in table.variables],
        "cardinalities": list(table.cards),
        "probs": [float(p) for p in table.probs.reshape(-1)],
    }


def _print_table(model, table: JointTable, out) -> None:
    names = [model.dag.labels[v] for v in table.variables]
    for idx in np.ndindex(*table.cards):
        cells = " ".join(f"{n}={v}" for n, v in zip(names, idx)) or "()"
        print(f"{cells}\t{_fmt(float(table.probs[idx]))}", file=out)


def _emit(args, payload, text_lines, out):
    if args.json:
        json.dump(payload, out, indent=2)
        out.write("\n")
    else:
        for line in text_lines:
            print(line, file=out)


def cmd_validate(args, out):
    model = modelfile.load(args.file, validate=False)
    violations = validate_model(model)
    payload = {
        "valid": not violations,
        "kind": "cpt" if isinstance(model, CptModel) else "functional",
        "variables": model.n,
        "violations": [
            {"kind": v.kind, "variable": v.variable, "row": list(v.row) if v.row is not None else None, "message": v.message}
            for v in violations
        ],
    }
    lines = ["ok" if not violations else f"{len(violations)} violation(s)"] + [str(v) for v in violations]
    _emit(args, payload, lines, out)
    if violations:
        raise InvalidModel(violations)


def _table_cmd(args, out, table, model):
    if args.json:
        _emit(args, _table_payload(model, table), [], out)
    else:
        _print_table(model, table, out)


def cmd_joint(args, out):
    model = modelfile.load(args.file)
    _table_cmd(args, out, joint_from_cpts(_cpt(model)), model)


def cmd_marginal(args, out):
    model = modelfile.load(args.file)
    table = marginal(joint_from_cpts(_cpt(model)), _names(model, args.on))
    _table_cmd(args, out, table, model)


def cmd_condition(args, out):
    model = modelfile.load(args.file)
    table = condition(joint_from_cpts(_cpt(model)), _assignment(model, args.given))
    if args.on:
        table = marginal(table, _names(model, args.on))
    _table_cmd(args, out, table, model)


def cmd_intervene(args, out):
    model = modelfile.load(args.file)
    cpt = _cpt(model)
    spec = _assignment(model, args.do)
    evidence = _assignment(model, args.given)
    if args.on:
        T = _names(model, args.on)
    else:
        T = frozenset(range(model.n)) - set(spec) - set(evidence)
    if evidence:
        table = interventional_conditional(cpt, spec, evidence, T)
    else:
        table = marginal(interventional_global(cpt, spec), T)
    _table_cmd(args, out, table, model)


def cmd_mi(args, out):
    model = modelfile.load(args.file)
    A, B, Z = _names(model, args.a), _names(model, args.b), _names(model, args.given)
    value = conditional_mutual_information(joint_from_cpts(_cpt(model)), A, B, Z)
    cond = f" | {','.join(_label_set(model, Z))}" if Z else ""
    quantity = f"I({','.join(_label_set(model, A))} ; {','.join(_label_set(model, B))}{cond})"
    _emit(args, {"quantity": quantity, "bits": _jnum(value)}, [f"{quantity} = {_fmt(value)} bits"], out)


def cmd_di(args, out):
    model = modelfile.load(args.file)
    T, S, Z = _names(model, args.source), _names(model, args.to), _names(model, args.given)
    value = conditional_directed_information(_cpt(model), T, S, Z)
    cond = f" | {','.join(_label_set(model, Z))}" if Z else ""
    quantity = f"I({','.join(_label_set(model, T))} -> {','.join(_label_set(model, S))}{cond})"
    _emit(args, {"quantity": quantity, "bits": _jnum(value)}, [f"{quantity} = {_fmt(value)} bits"], out)


def cmd_chainrule(args, out):
    model = modelfile.load(args.file)
    T, S = _names(model, args.source), _names(model, args.to)
    terms = chain_rule_decomposition(_cpt(model), T, S)
    residual = terms.total - terms.mi_term - terms.cdi_term
    additive = math.isinf(terms.total) or abs(residual) <= 1e-9
    payload = {
        "mi_term": _jnum(terms.mi_term),
        "cdi_term": _jnum(terms.cdi_term),
        "total": _jnum(terms.total),
        "additive": additive,
    }
    lines = [
        f"mutual information term   {_fmt(terms.mi_term)}",
        f"conditional directed term {_fmt(terms.cdi_term)}",
        f"directed information      {_fmt(terms.total)}",
        f"additive                  {'yes' if additive else 'no'}",
    ]
    _emit(args, payload, lines, out)


def cmd_backdoor(args, out):
    model = modelfile.load(args.file)
    cpt = _cpt(model)
    S, T, Z = _names(model, args.cause), _names(model, args.effect), _names(model, args.adjust)
    cert = certify_backdoor(cpt, S, T, Z, tol=args.tol)
    payload = {
        "Z": _label_set(model, cert.Z),
        "graphical_ok": cert.graphical_ok,
        "information_ok": cert.information_ok,
        "cdi_value": _jnum(cert.cdi_value),
        "max_discrepancy": _jnum(cert.max_discrepancy),
    }
    lines = [
        f"adjustment set   {{{', '.join(payload['Z'])}}}",
        f"graphical        {'ok' if cert.graphical_ok else 'fails'}",
        f"information      {'ok' if cert.information_ok else 'fails'}",
        f"cdi (bits)       {_fmt(cert.cdi_value)}",
        f"max discrepancy  {_fmt(cert.max_discrepancy)}",
    ]
    if args.show:
        adjusted = backdoor_adjustment(cpt, S, T, Z)
        truth = effect_kernel(cpt, S, T)
        rows = []
        for x in adjusted.input_assignments():
            label = " ".join(f"{model.dag.labels[v]}={val}" for v, val in zip(adjusted.input_vars, x))
            rows.append(
                {
                    "do": dict(zip(_label_set(model, S), map(int, x))),
                    "adjusted": [float(p) for p in adjusted.rows[x].reshape(-1)],
                    "interventional": [float(p) for p in truth.rows[x].reshape(-1)],
                }
            )
            lines.append(f"do({label}): adjusted {[_fmt(p) for p in rows[-1]['adjusted']]}")
            lines.append(f"{' ' * (len(label) + 4)}  actual   {[_fmt(p) for p in rows[-1]['interventional']]}")
        payload["rows"] = rows
    _emit(args, payload, lines, out)


def cmd_findbackdoor(args, out):
    model = modelfile.load(args.file)
    S, T = _names(model, args.cause), _names(model, args.effect)
    sets = find_backdoor_sets(_cpt(model), S, T, max_size=args.max_size, tol=args.tol)
    named = [_label_set(model, Z) for Z in sets]
    lines = ["{" + ", ".join(z) + "}" for z in named] or ["(none)"]
    _emit(args, {"sets": named}, lines, out)


def cmd_dot(args, out):
    model = modelfile.load(args.file)
    spec = _assignment(model, args.do)
    labels = {i: str(v) for i, v in spec.items()}
    text = to_dot(model.dag, spec.keys(), labels)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        out.write(text)


def cmd_sample(args, out):
    model = modelfile.load(args.file)
    if args.count < 0:
        raise UsageError("--count must be nonnegative")
    draws = sample_many(model, args.seed, args.count)
    names = list(model.dag.labels)
    if args.json:
        _emit(args, {"variables": names, "seed": args.seed, "samples": draws.tolist()}, [], out)
    else:
        print(",".join(names), file=out)
        for row in draws:
            print(",".join(str(int(v)) for v in row), file=out)


def cmd_canonical(args, out):
    model = modelfile.load(args.file)
    report = canonical_structure_report(_cpt(model), args.kind, tol=args.tol)
    payload = {
        "kind": report.kind,
        "roles": {k: model.dag.labels[v] for k, v in report.roles.items()},
        "directed": {k: _jnum(v) for k, v in report.directed.items()},
        "mutual": {k: _jnum(v) for k, v in report.mutual.items()},
        "identities": [
            {"lhs": i.lhs, "rhs": i.rhs, "lhs_value": _jnum(i.lhs_value), "rhs_value": _jnum(i.rhs_value), "holds": i.holds}
            for i in report.identities
        ],
        "ok": report.ok,
    }
    lines = [f"{report.kind}: " + ", ".join(f"{k}={model.dag.labels[v]}" for k, v in report.roles.items())]
    lines += [f"{k:9} {_fmt(v)}" for k, v in {**report.directed, **report.mutual}.items()]
    lines += [f"{'ok  ' if i.holds else 'FAIL'} {i.lhs} = {i.rhs}" for i in report.identities]
    _emit(args, payload, lines, out)


def cmd_examples(args, out):
    names = modelfile.bundled_names()
    if args.export:
        dest = Path(args.export)
        dest.mkdir(parents=True, exist_ok=True)
        for name in names:
            src = modelfile.BUNDLED_DIR / f"{name}{modelfile.SUFFIX}"
            (dest / src.name).write_bytes(src.read_bytes())
    _emit(args, {"models": names}, names, out)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="causalinfo", description="Exact causal and directed-information queries on discrete DAG models.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help, file=True):
        p = sub.add_parser(name, help=help, parents=[common])
        if file:
            p.add_argument("file", help="model file, or the name of a bundled model")
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "check a model file")
    add("joint", cmd_joint, "print the joint distribution")
    p = add("marginal", cmd_marginal, "print a marginal")
    p.add_argument("--on", required=True, metavar="A,B")
    p = add("condition", cmd_condition, "condition on observed values")
    p.add_argument("--given", required=True, metavar="X=1,...")
    p.add_argument("--on", metavar="A,B")
    p = add("intervene", cmd_intervene, "interventional distribution")
    p.add_argument("--do", required=True, metavar="X=1,...")
    p.add_argument("--on", metavar="T")
    p.add_argument("--given", metavar="E=e,...")
    p = add("mi", cmd_mi, "(conditional) mutual information")
    p.add_argument("--a", required=True, metavar="A")
    p.add_argument("--b", required=True, metavar="B")
    p.add_argument("--given", metavar="Z")
    p = add("di", cmd_di, "(conditional) directed information I(T -> S | Z)")
    p.add_argument("--from", dest="source", required=True, metavar="T")
    p.add_argument("--to", required=True, metavar="S")
    p.add_argument("--given", metavar="Z")
    p = add("chainrule", cmd_chainrule, "chain-rule decomposition of I(T -> S)")
    p.add_argument("--from", dest="source", required=True, metavar="T")
    p.add_argument("--to", required=True, metavar="S")
    p = add("backdoor", cmd_backdoor, "certify an adjustment set")
    p.add_argument("--cause", required=True, metavar="S")
    p.add_argument("--effect", required=True, metavar="T")
    p.add_argument("--adjust", default="", metavar="Z")
    p.add_argument("--show", action="store_true", help="also print adjusted and interventional rows")
    p.add_argument("--tol", type=float, default=ZERO_TOL, help="threshold for zero directed information (bits)")
    p = add("findbackdoor", cmd_findbackdoor, "search admissible adjustment sets")
    p.add_argument("--cause", required=True, metavar="S")
    p.add_argument("--effect", required=True, metavar="T")
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--tol", type=float, default=ZERO_TOL)
    p = add("dot", cmd_dot, "emit the DAG as Graphviz DOT")
    p.add_argument("--do", metavar="X=1,...")
    p.add_argument("--out", metavar="PATH")
    p = add("sample", cmd_sample, "draw reproducible samples")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p = add("canonical", cmd_canonical, "directed-information identities of a 3-variable structure")
    p.add_argument("--kind", required=True, choices=["chain", "fork", "collider"])
    p.add_argument("--tol", type=float, default=ZERO_TOL)
    p = add("examples", cmd_examples, "list (or export) the bundled example models", file=False)
    p.add_argument("--export", metavar="DIR")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CausalInfoError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

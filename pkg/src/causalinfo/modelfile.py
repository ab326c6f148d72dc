"""Reading and writing model files.

A model file is a JSON document::

    {
      "format": "causalinfo-model",
      "version": 1,
      "kind": "cpt",                      # or "functional"
      "variables": [
        {
          "name": "X",
          "cardinality": 2,
          "parents": [],
          "cpt": [
            {"given": {}, "probs": [0.3, 0.7]}
          ]
        },
        ...
      ]
    }

Variables appear in causal order and parents must be declared earlier.
CPT rows are keyed by an explicit parent assignment, one row per
assignment.  Functional models replace ``cpt`` with ``noise`` (the noise
distribution) and ``function``, whose rows map each noise symbol to an
output: ``{"given": {...}, "outputs": [f(given, 0), f(given, 1), ...]}``.

:func:`dumps` writes a canonical layout: parents in declaration order and
rows in mixed-radix order of the parents (first parent most significant).
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Union

import numpy as np

from .errors import InvalidModel, ModelFileError
from .graph import validate_dag
from .model import CptModel, FunctionalModel, Model, validate_model

FORMAT = "causalinfo-model"
VERSION = 1
BUNDLED_DIR = Path(__file__).parent / "models"
SUFFIX = ".model"


def _require(obj, key, kind, where):
    if key not in obj:
        raise ModelFileError(f"{where}: missing field {key!r}")
    value = obj[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ModelFileError(f"{where}: field {key!r} has the wrong type")
    return value


def _rows(entries, names, parent_idx, cards, field, where):
    """Collect rows keyed by parent assignment into a dense array."""
    shape = tuple(cards[j] for j in parent_idx)
    seen = {}
    for r, entry in enumerate(entries):
        at = f"{where} row {r}"
        if not isinstance(entry, dict):
            raise ModelFileError(f"{at}: expected an object")
        given = _require(entry, "given", dict, at)
        if set(given) != {names[j] for j in parent_idx}:
            raise ModelFileError(f"{at}: 'given' must assign exactly the parents {[names[j] for j in parent_idx]}")
        key = []
        for j in parent_idx:
            v = given[names[j]]
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < cards[j]:
                raise ModelFileError(f"{at}: value {v!r} for {names[j]!r} out of range")
            key.append(v)
        key = tuple(key)
        if key in seen:
            raise ModelFileError(f"{at}: duplicate row for {given}")
        seen[key] = _require(entry, field, list, at)
    expected = int(np.prod(shape)) if shape else 1
    if len(seen) != expected:
        raise ModelFileError(f"{where}: {len(seen)} rows present, {expected} required")
    return shape, seen


def loads(text: str) -> Model:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ModelFileError("top level must be an object")
    if doc.get("format") != FORMAT:
        raise ModelFileError(f"'format' must be {FORMAT!r}")
    if doc.get("version") != VERSION:
        raise ModelFileError(f"unsupported version {doc.get('version')!r}")
    kind = doc.get("kind")
    if kind not in ("cpt", "functional"):
        raise ModelFileError("'kind' must be 'cpt' or 'functional'")
    variables = _require(doc, "variables", list, "model")

    names, cards, parents = [], [], []
    for i, var in enumerate(variables):
        where = f"variable {i}"
        if not isinstance(var, dict):
            raise ModelFileError(f"{where}: expected an object")
        name = _require(var, "name", str, where)
        if name in names:
            raise ModelFileError(f"{where}: duplicate name {name!r}")
        card = _require(var, "cardinality", int, where)
        if card < 1:
            raise ModelFileError(f"{where}: cardinality must be >= 1")
        pa = []
        for p in _require(var, "parents", list, where):
            if p not in names:
                raise ModelFileError(f"{where}: parent {p!r} of {name!r} is not declared earlier")
            pa.append(names.index(p))
        if len(set(pa)) != len(pa):
            raise ModelFileError(f"{where}: repeated parent")
        names.append(name)
        cards.append(card)
        parents.append(sorted(pa))
    dag = validate_dag(len(names), parents, names)

    if kind == "cpt":
        tables = []
        for i, var in enumerate(variables):
            where = f"variable {names[i]!r}"
            shape, rows = _rows(_require(var, "cpt", list, where), names, parents[i], cards, "probs", where)
            t = np.empty(shape + (cards[i],))
            for key, probs in rows.items():
                if len(probs) != cards[i] or not all(_is_number(p) for p in probs):
                    raise ModelFileError(f"{where}: row {key} needs {cards[i]} numbers")
                t[key] = probs
            tables.append(t)
        model = CptModel.from_arrays(dag, cards, tables, check=False)
    else:
        noise, functions = [], []
        for i, var in enumerate(variables):
            where = f"variable {names[i]!r}"
            u = _require(var, "noise", list, where)
            if not u or not all(_is_number(p) for p in u):
                raise ModelFileError(f"{where}: 'noise' must be a nonempty list of numbers")
            shape, rows = _rows(_require(var, "function", list, where), names, parents[i], cards, "outputs", where)
            f = np.empty(shape + (len(u),), dtype=np.int64)
            for key, outs in rows.items():
                if len(outs) != len(u) or not all(isinstance(o, int) and not isinstance(o, bool) for o in outs):
                    raise ModelFileError(f"{where}: row {key} needs {len(u)} integer outputs")
                f[key] = outs
            noise.append(u)
            functions.append(f)
        model = FunctionalModel.from_arrays(dag, cards, noise, functions, check=False)
    return model


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def load(path: Union[str, os.PathLike], validate: bool = True) -> Model:
    """Load a model file, or a bundled model by name (``chain``, ``sixnode`` ...)."""
    path = resolve(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFileError(f"cannot read {path}: {exc.strerror}") from None
    model = loads(text)
    if validate:
        violations = validate_model(model)
        if violations:
            raise InvalidModel(violations)
    return model


def resolve(path) -> Path:
    p = Path(path)
    if p.exists():
        return p
    bundled = BUNDLED_DIR / (str(path) + ("" if str(path).endswith(SUFFIX) else SUFFIX))
    if os.sep not in str(path) and bundled.exists():
        return bundled
    return p


def bundled_names() -> list:
    return sorted(p.stem for p in BUNDLED_DIR.glob("*" + SUFFIX))


def _num(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() and abs(x) < 2**53 else repr(x)


def dumps(model: Model) -> str:
    dag = model.dag
    names = dag.labels
    kind = "cpt" if isinstance(model, CptModel) else "functional"
    out = [
        "{",
        f'  "format": "{FORMAT}",',
        f'  "version": {VERSION},',
        f'  "kind": "{kind}",',
        '  "variables": [',
    ]
    for i in range(dag.n):
        pa = sorted(dag.parents[i])
        shape = tuple(model.cards[j] for j in pa)
        out.append("    {")
        out.append(f'      "name": {json.dumps(names[i])},')
        out.append(f'      "cardinality": {model.cards[i]},')
        out.append(f'      "parents": {json.dumps([names[j] for j in pa])},')
        if kind == "cpt":
            field, key, table = "cpt", "probs", model.cpts[i].rows
            fmt = lambda row: "[" + ", ".join(_num(p) for p in row) + "]"  # noqa: E731
        else:
            noise = "[" + ", ".join(_num(p) for p in model.noise[i]) + "]"
            out.append(f'      "noise": {noise},')
            field, key, table = "function", "outputs", model.functions[i]
            fmt = lambda row: json.dumps([int(v) for v in row])  # noqa: E731
        out.append(f'      "{field}": [')
        rows = list(np.ndindex(*shape))
        for r, row in enumerate(rows):
            given = "{" + ", ".join(f"{json.dumps(names[j])}: {v}" for j, v in zip(pa, row)) + "}"
            comma = "," if r < len(rows) - 1 else ""
            out.append(f'        {{"given": {given}, "{key}": {fmt(table[row])}}}{comma}')
        out.append("      ]")
        out.append("    }" + ("," if i < dag.n - 1 else ""))
    out.append("  ]")
    out.append("}")
    return "\n".join(out) + "\n"


def dump(model: Model, path: Union[str, os.PathLike]) -> None:
    Path(path).write_text(dumps(model), encoding="utf-8", newline="\n")

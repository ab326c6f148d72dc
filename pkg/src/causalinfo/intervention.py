"""Hard interventions: truncated factorization, equation surgery, and
directed stochastic kernels.

Interventional tables are over the non-intervened variables only; the
pinned values are not part of the scope.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .distribution import JointTable, Kernel, condition, marginal
from .errors import InvalidSpec, OverlappingSets, UnsupportedModel
from .graph import surgery
from .model import CptModel, FunctionalModel, factor_product, joint_from_cpts


@dataclass(frozen=True)
class InterventionSpec:
    """The assignment ``X^S <- x^S``; stored as sorted ``(vertex, value)`` pairs."""

    items: tuple = ()

    @classmethod
    def of(cls, values: Mapping[int, int] = None) -> "InterventionSpec":
        values = values or {}
        return cls(tuple(sorted((int(k), int(v)) for k, v in values.items())))

    @property
    def S(self) -> frozenset:
        return frozenset(k for k, _ in self.items)

    @property
    def values(self) -> dict:
        return dict(self.items)

    def __bool__(self):
        return bool(self.items)


def _as_spec(spec) -> InterventionSpec:
    if isinstance(spec, InterventionSpec):
        return spec
    return InterventionSpec.of(spec)


def check_spec(model, spec: InterventionSpec) -> None:
    for v, x in spec.items:
        if not 0 <= v < model.n:
            raise InvalidSpec(f"intervened vertex {v} out of range")
        if not 0 <= x < model.cards[v]:
            raise InvalidSpec(f"value {x} out of range for vertex {v} (cardinality {model.cards[v]})")


def _disjoint(*sets) -> None:
    seen = set()
    for s in sets:
        if seen & set(s):
            raise OverlappingSets(f"sets overlap on {sorted(seen & set(s))}")
        seen |= set(s)


def interventional_kernel(model: CptModel, S: Iterable[int]) -> Kernel:
    """The channel ``x^S -> P(X^{S^c} | X^S <- x^S)`` for every ``x^S`` at once."""
    S = tuple(sorted(set(S)))
    rest = tuple(v for v in range(model.n) if v not in S)
    arr = factor_product(model, skip=S)
    rows = np.transpose(arr, S + rest)
    cards = model.cards
    return Kernel(
        S,
        tuple(cards[v] for v in S),
        rest,
        tuple(cards[v] for v in rest),
        np.ascontiguousarray(rows),
        np.ones(tuple(cards[v] for v in S), dtype=bool),
    )


def interventional_global(model: CptModel, spec) -> JointTable:
    """Law of every non-intervened variable under ``spec``."""
    spec = _as_spec(spec)
    check_spec(model, spec)
    k = interventional_kernel(model, spec.S)
    row = k.rows[tuple(spec.values[v] for v in k.input_vars)]
    return JointTable(k.output_vars, k.output_cards, row)


def interventional_marginal(model: CptModel, spec, T: Iterable[int]) -> JointTable:
    spec = _as_spec(spec)
    _disjoint(spec.S, T)
    return marginal(interventional_global(model, spec), T)


def interventional_conditional(
    model: CptModel, spec, evidence: Mapping[int, int], T: Iterable[int]
) -> JointTable:
    """Intervene first, then observe ``evidence`` and return the law of ``T``."""
    spec = _as_spec(spec)
    T = frozenset(T)
    _disjoint(spec.S, evidence, T)
    g = interventional_global(model, spec)
    return condition(marginal(g, T | set(evidence)), evidence)


def interventional_conditional_kernel(
    model: CptModel, S: Iterable[int], given: Iterable[int], T: Iterable[int]
) -> Kernel:
    """Kernel ``(x^S, x^given) -> P(X^T | X^S <- x^S, X^given = x^given)``.

    Input axes follow increasing vertex index over ``S | given``.  Rows whose
    evidence has zero interventional mass are undefined.
    """
    S, given, T = frozenset(S), frozenset(given), frozenset(T)
    _disjoint(S, given, T)
    k = interventional_kernel(model, S)
    n_in = len(k.input_vars)
    drop = tuple(n_in + a for a, v in enumerate(k.output_vars) if v not in given | T)
    m = k.rows.sum(axis=drop) if drop else k.rows
    labels = k.input_vars + tuple(v for v in k.output_vars if v in given | T)
    in_vars = tuple(sorted(S | given))
    out_vars = tuple(sorted(T))
    m = np.transpose(m, [labels.index(v) for v in in_vars + out_vars])
    denom = m.sum(axis=tuple(range(len(in_vars), m.ndim)))
    defined = denom > 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        rows = m / denom.reshape(denom.shape + (1,) * len(out_vars))
    rows[~defined] = np.nan
    cards = model.cards
    return Kernel(
        in_vars,
        tuple(cards[v] for v in in_vars),
        out_vars,
        tuple(cards[v] for v in out_vars),
        rows,
        defined,
    )


def dsk(model: CptModel, S: Iterable[int], values: Mapping[int, int]) -> JointTable:
    """Directed stochastic kernel in the model's declared order.

    Multiplies the full-history conditionals ``P(x_i | x^{i-1})`` of the
    non-intervened variables, each derived from the joint.  Needs a
    joint with full support so that every history is defined.
    """
    S = frozenset(S)
    spec = InterventionSpec.of({v: values[v] for v in S})
    check_spec(model, spec)
    p = joint_from_cpts(model).probs
    if np.any(p <= 0.0):
        raise UnsupportedModel("directed stochastic kernel needs a joint with full support")
    n = model.n
    prefix = [None] * n
    m = p
    for i in range(n - 1, -1, -1):
        prefix[i] = m  # marginal over x_0 .. x_i
        m = m.sum(axis=-1)
    out = np.ones(model.cards)
    prev = np.ones(())
    for i in range(n):
        cond = prefix[i] / prev[..., None]
        if i not in S:
            out = out * cond.reshape(cond.shape + (1,) * (n - 1 - i))
        prev = prefix[i]
    index = tuple(spec.values[v] if v in S else slice(None) for v in range(n))
    rest = tuple(v for v in range(n) if v not in S)
    return JointTable(rest, [model.cards[v] for v in rest], out[index])


def functional_surgery(fm: FunctionalModel, spec) -> FunctionalModel:
    """Replace the equations of intervened vertices by constants.

    Children of intervened vertices keep their equations and read the
    constant through their unchanged parent edges.
    """
    spec = _as_spec(spec)
    check_spec(fm, spec)
    if not spec:
        return fm
    vals = spec.values
    noise = list(fm.noise)
    functions = list(fm.functions)
    for v, x in vals.items():
        noise[v] = np.array([1.0])
        functions[v] = np.array([x], dtype=np.int64)
    return FunctionalModel.from_arrays(surgery(fm.dag, spec.S), fm.cards, noise, functions)

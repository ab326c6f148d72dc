"""Dense probability tables, kernels and information measures.

A :class:`JointTable` is a numpy array whose axes are labelled by variable
indices; entry ``probs[x_1, ..., x_k]`` is the probability of the joint
assignment.  Flattening in C order gives the mixed-radix layout with the
first scope variable most significant.

All information quantities are in bits.  Divergences are ``+inf`` when the
first argument puts mass where the second has none; they are never clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import ModelTooLarge, ScopeMismatch, UndefinedConditional, ZeroProbabilityEvidence

MAX_ENTRIES = 2**24
NORMALIZATION_TOL = 1e-12
# Rounding in composed sums can leave information values a few ulps below 0.
_ROUNDING_FLOOR = -1e-12


def check_size(cards: Iterable[int]) -> None:
    size = math.prod(int(c) for c in cards)
    if size > MAX_ENTRIES:
        raise ModelTooLarge(f"table would need {size} entries (limit {MAX_ENTRIES})")


def _info(value: float) -> float:
    value = float(value)
    if math.isnan(value):
        raise ArithmeticError("information value is NaN")
    if value < 0.0:
        if value < _ROUNDING_FLOOR:
            raise ArithmeticError(f"negative information value {value!r}")
        return 0.0
    return value


@dataclass(frozen=True, eq=False)
class JointTable:
    """Normalized probability table over an ordered tuple of variables."""

    variables: tuple
    cards: tuple
    probs: np.ndarray

    def __init__(self, variables, cards, probs, check: bool = True):
        variables = tuple(int(v) for v in variables)
        cards = tuple(int(c) for c in cards)
        if len(set(variables)) != len(variables):
            raise ScopeMismatch(f"repeated variable in scope {variables}")
        if len(cards) != len(variables):
            raise ScopeMismatch("one cardinality per variable required")
        check_size(cards)
        probs = np.array(probs, dtype=float).reshape(cards)
        probs.setflags(write=False)
        if check:
            if np.any(probs < 0) or not np.all(np.isfinite(probs)):
                raise ValueError("probabilities must be finite and nonnegative")
            total = probs.sum()
            if abs(total - 1.0) > NORMALIZATION_TOL:
                raise ValueError(f"table sums to {total!r}, not 1")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "cards", cards)
        object.__setattr__(self, "probs", probs)

    @property
    def scope(self) -> tuple:
        return tuple(zip(self.variables, self.cards))

    def card_of(self, v: int) -> int:
        return self.cards[self.variables.index(v)]

    def aligned(self, order: Iterable[int]) -> np.ndarray:
        """Probabilities with axes permuted into ``order`` (same variable set)."""
        order = tuple(order)
        if sorted(order) != sorted(self.variables):
            raise ScopeMismatch(f"cannot align scope {self.variables} to {order}")
        return np.transpose(self.probs, [self.variables.index(v) for v in order])

    def __getitem__(self, assignment: Mapping[int, int]) -> float:
        return float(self.probs[tuple(assignment[v] for v in self.variables)])

    def __repr__(self) -> str:
        return f"JointTable(variables={self.variables}, cards={self.cards})"


def point_mass(variables, cards, values) -> JointTable:
    arr = np.zeros(tuple(cards))
    arr[tuple(values)] = 1.0
    return JointTable(variables, cards, arr)


def product_table(*tables: JointTable) -> JointTable:
    """Joint of independent tables over disjoint scopes."""
    variables, cards = (), ()
    arr = np.ones(())
    for t in tables:
        if set(variables) & set(t.variables):
            raise ScopeMismatch("product of tables with overlapping scopes")
        arr = np.multiply.outer(arr, t.probs)
        variables += t.variables
        cards += t.cards
    return JointTable(variables, cards, arr)


def _subset(table: JointTable, T: Iterable[int], what: str = "variables") -> tuple:
    T = frozenset(int(v) for v in T)
    missing = T - set(table.variables)
    if missing:
        raise ScopeMismatch(f"{what} {sorted(missing)} not in table scope {table.variables}")
    return tuple(v for v in table.variables if v in T)


def marginal(table: JointTable, T: Iterable[int]) -> JointTable:
    """Sum out every variable outside ``T``; scope order is preserved."""
    keep = _subset(table, T)
    drop = tuple(i for i, v in enumerate(table.variables) if v not in keep)
    arr = table.probs.sum(axis=drop) if drop else table.probs
    return JointTable(keep, [table.card_of(v) for v in keep], arr, check=False)


def condition(table: JointTable, evidence: Mapping[int, int]) -> JointTable:
    """Observe ``evidence`` and renormalize over the remaining variables."""
    evidence = {int(k): int(v) for k, v in evidence.items()}
    _subset(table, evidence, "evidence variables")
    index = []
    for v, c in table.scope:
        if v in evidence:
            if not 0 <= evidence[v] < c:
                raise ScopeMismatch(f"value {evidence[v]} out of range for variable {v} (cardinality {c})")
            index.append(evidence[v])
        else:
            index.append(slice(None))
    sliced = table.probs[tuple(index)]
    mass = sliced.sum()
    if mass <= 0.0:
        raise ZeroProbabilityEvidence(f"evidence {evidence} has probability 0")
    rest = tuple(v for v in table.variables if v not in evidence)
    return JointTable(rest, [table.card_of(v) for v in rest], sliced / mass, check=False)


@dataclass(frozen=True, eq=False)
class Kernel:
    """Conditional distribution of ``output`` variables given ``input`` ones.

    ``rows`` has the input axes first, then the output axes.  Rows whose
    input assignment had zero mass are marked ``False`` in ``defined`` and
    hold NaN.
    """

    input_vars: tuple
    input_cards: tuple
    output_vars: tuple
    output_cards: tuple
    rows: np.ndarray
    defined: np.ndarray

    def __post_init__(self):
        if set(self.input_vars) & set(self.output_vars):
            raise ScopeMismatch("kernel input and output scopes overlap")
        self.rows.setflags(write=False)
        self.defined.setflags(write=False)

    def row(self, values) -> JointTable:
        """Output distribution for an input assignment (tuple or mapping)."""
        if isinstance(values, Mapping):
            values = tuple(values[v] for v in self.input_vars)
        values = tuple(int(x) for x in values)
        if not self.defined[values]:
            raise UndefinedConditional(f"kernel row {values} is undefined (zero-mass input)")
        return JointTable(self.output_vars, self.output_cards, self.rows[values], check=False)

    def input_assignments(self):
        return list(np.ndindex(*self.input_cards))


def kernel_of(table: JointTable, output: Iterable[int], input: Iterable[int]) -> Kernel:
    out_vars = _subset(table, output)
    in_vars = _subset(table, input)
    if set(out_vars) & set(in_vars):
        raise ScopeMismatch("kernel input and output must be disjoint")
    m = marginal(table, in_vars + out_vars).aligned(in_vars + out_vars)
    k = len(in_vars)
    denom = m.sum(axis=tuple(range(k, m.ndim)))
    defined = denom > 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        rows = m / denom.reshape(denom.shape + (1,) * (m.ndim - k))
    rows[~defined] = np.nan
    return Kernel(
        in_vars,
        tuple(table.card_of(v) for v in in_vars),
        out_vars,
        tuple(table.card_of(v) for v in out_vars),
        rows,
        defined,
    )


def _kl_arrays(p: np.ndarray, q: np.ndarray) -> float:
    support = p > 0.0
    if np.any(q[support] <= 0.0):
        return math.inf
    ps, qs = p[support], q[support]
    return float(np.sum(ps * np.log2(ps / qs)))


def kl_divergence(P: JointTable, Q: JointTable) -> float:
    """D(P || Q) in bits."""
    if P.scope != Q.scope:
        raise ScopeMismatch(f"scopes differ: {P.scope} vs {Q.scope}")
    return _info(_kl_arrays(P.probs, Q.probs))


def conditional_divergence(P: Kernel, Q: Kernel, base: JointTable) -> float:
    """Average of row divergences D(P(.|a) || Q(.|a)) under ``base``.

    Rows with zero base weight are skipped.  A row undefined in ``Q`` but
    carrying positive weight makes the result ``+inf``.
    """
    if (P.input_vars, P.input_cards, P.output_vars, P.output_cards) != (
        Q.input_vars,
        Q.input_cards,
        Q.output_vars,
        Q.output_cards,
    ):
        raise ScopeMismatch("kernels have different scopes")
    if sorted(base.variables) != sorted(P.input_vars):
        raise ScopeMismatch("base distribution must be over the kernel input scope")
    w = base.aligned(P.input_vars).reshape(-1)
    out_size = math.prod(P.output_cards)
    prows = P.rows.reshape(-1, out_size)
    qrows = Q.rows.reshape(-1, out_size)
    pdef = P.defined.reshape(-1)
    qdef = Q.defined.reshape(-1)
    total = 0.0
    for a in np.flatnonzero(w > 0.0):
        if not pdef[a]:
            raise UndefinedConditional("first kernel undefined on an input with positive weight")
        if not qdef[a]:
            return math.inf
        d = _kl_arrays(prows[a], qrows[a])
        if math.isinf(d):
            return math.inf
        total += w[a] * d
    return _info(total)


def _entropy_like(arr: np.ndarray) -> np.ndarray:
    out = np.zeros_like(arr)
    pos = arr > 0
    out[pos] = np.log2(arr[pos])
    return out


def conditional_mutual_information(
    table: JointTable, A: Iterable[int], B: Iterable[int], Z: Iterable[int] = ()
) -> float:
    """I(X^A; X^B | X^Z) in bits."""
    A, B, Z = (_subset(table, x) for x in (A, B, Z))
    if set(A) & set(B) or set(A) & set(Z) or set(B) & set(Z):
        raise ScopeMismatch("A, B and Z must be pairwise disjoint")
    if not A or not B:
        return 0.0
    order = Z + A + B
    p = marginal(table, order).aligned(order)
    a_ax = tuple(range(len(Z), len(Z) + len(A)))
    b_ax = tuple(range(len(Z) + len(A), p.ndim))
    p_z = p.sum(axis=a_ax + b_ax, keepdims=True)
    p_za = p.sum(axis=b_ax, keepdims=True)
    p_zb = p.sum(axis=a_ax, keepdims=True)
    support = p > 0
    # p > 0 implies every marginal in the ratio is > 0.
    num = np.broadcast_to(p_z, p.shape)[support] * p[support]
    den = np.broadcast_to(p_za, p.shape)[support] * np.broadcast_to(p_zb, p.shape)[support]
    return _info(np.sum(p[support] * np.log2(num / den)))


def mutual_information(table: JointTable, A: Iterable[int], B: Iterable[int]) -> float:
    """I(X^A; X^B) in bits, as D(P_AB || P_A x P_B)."""
    return conditional_mutual_information(table, A, B, ())


def entropy(table: JointTable) -> float:
    p = table.probs
    return _info(-np.sum(p * _entropy_like(p)))


def total_variation(P: JointTable, Q: JointTable) -> float:
    if sorted(P.scope) != sorted(Q.scope):
        raise ScopeMismatch(f"scopes differ: {P.scope} vs {Q.scope}")
    return 0.5 * float(np.abs(P.probs - Q.aligned(P.variables)).sum())

"""Identifying causal effects from observational quantities.

The adjustment formulas here only use the observational joint.  Whether a
set ``Z`` is admissible is certified two ways: by the conditional directed
information I(X^T -> X^S | X^Z) vanishing, and by the graphical back-door
test borrowed from Pearl's book (``Z`` has no descendant of ``S`` and
d-separates ``S`` from ``T`` once the edges leaving ``S`` are removed).
The graphical test is sound but not complete for a particular choice of
CPTs.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .distribution import Kernel, JointTable, marginal, total_variation
from .errors import OverlappingSets, UndefinedConditional, ZNotNondescendants
from .graph import backdoor_graph, d_separated, nondescendants_of, parents_of_set
from .information import ZERO_TOL, conditional_directed_information
from .intervention import interventional_kernel
from .model import CptModel, joint_from_cpts


def _adjustment(joint: JointTable, S: frozenset, T: frozenset, Z: frozenset) -> Kernel:
    # sum_z P(x^T | x^S, z) P(z); members of T inside Z are pinned by x^T.
    U = tuple(sorted(S | T | Z))
    p = marginal(joint, U).probs
    ax = {v: a for a, v in enumerate(U)}
    sum_over = lambda keep: tuple(ax[v] for v in U if v not in keep)  # noqa: E731
    p_sz = p.sum(axis=sum_over(S | Z), keepdims=True)
    p_z = p.sum(axis=sum_over(Z), keepdims=True)
    if np.any((p_sz == 0.0) & (p_z > 0.0)):
        raise UndefinedConditional(
            "positivity violation: some treatment value has zero probability in a stratum of the adjustment set"
        )
    with np.errstate(invalid="ignore", divide="ignore"):
        terms = np.where(p_z > 0.0, p / p_sz * p_z, 0.0)
    arr = terms.sum(axis=tuple(ax[v] for v in Z - T)) if Z - T else terms
    out_labels = tuple(v for v in U if v in S | T)
    in_vars, out_vars = tuple(sorted(S)), tuple(sorted(T))
    arr = np.transpose(arr, [out_labels.index(v) for v in in_vars + out_vars])
    cards = dict(zip(joint.variables, joint.cards))
    return Kernel(
        in_vars,
        tuple(cards[v] for v in in_vars),
        out_vars,
        tuple(cards[v] for v in out_vars),
        np.ascontiguousarray(arr),
        np.ones(tuple(cards[v] for v in in_vars), dtype=bool),
    )


def _pairwise_disjoint(**sets) -> None:
    names = list(sets)
    for a, b in itertools.combinations(names, 2):
        common = sets[a] & sets[b]
        if common:
            raise OverlappingSets(f"{a} and {b} overlap on {sorted(common)}")


def direct_causes_adjustment(model: CptModel, S: Iterable[int], T: Iterable[int]) -> Kernel:
    """Causal effect of ``S`` on ``T`` by adjusting for the parents of ``S``."""
    S, T = frozenset(S), frozenset(T)
    _pairwise_disjoint(S=S, T=T)
    pa = parents_of_set(model.dag, S)
    if T & pa:
        warnings.warn(f"effect set overlaps the parents of the cause set on {sorted(T & pa)}", stacklevel=2)
    return _adjustment(joint_from_cpts(model), S, T, pa)


def _check_backdoor_args(model, S, T, Z):
    S, T, Z = frozenset(S), frozenset(T), frozenset(Z)
    _pairwise_disjoint(S=S, T=T, Z=Z)
    outside = Z - nondescendants_of(model.dag, S)
    if outside:
        raise ZNotNondescendants(f"adjustment set contains descendants of the cause set: {sorted(outside)}")
    return S, T, Z


def backdoor_adjustment(model: CptModel, S: Iterable[int], T: Iterable[int], Z: Iterable[int]) -> Kernel:
    """Kernel ``x^S -> sum_z P(X^T | x^S, z) P(z)``.

    Returned whether or not ``Z`` is admissible; see :func:`certify_backdoor`.
    """
    S, T, Z = _check_backdoor_args(model, S, T, Z)
    return _adjustment(joint_from_cpts(model), S, T, Z)


@dataclass
class AdjustmentCertificate:
    Z: frozenset
    graphical_ok: bool
    information_ok: bool
    cdi_value: float
    max_discrepancy: float


def effect_kernel(model: CptModel, S: Iterable[int], T: Iterable[int]) -> Kernel:
    """The true interventional channel ``x^S -> P(X^T | X^S <- x^S)``."""
    S, T = frozenset(S), frozenset(T)
    k = interventional_kernel(model, S)
    n_in = len(k.input_vars)
    drop = tuple(n_in + a for a, v in enumerate(k.output_vars) if v not in T)
    rows = k.rows.sum(axis=drop) if drop else k.rows
    out_vars = tuple(v for v in k.output_vars if v in T)
    return Kernel(
        k.input_vars,
        k.input_cards,
        out_vars,
        tuple(model.cards[v] for v in out_vars),
        np.ascontiguousarray(rows),
        k.defined.copy(),
    )


def max_row_discrepancy(a: Kernel, b: Kernel, weights: JointTable) -> float:
    """Largest total-variation gap between rows with positive weight."""
    w = weights.aligned(a.input_vars)
    worst = 0.0
    for x in a.input_assignments():
        if w[x] > 0.0:
            worst = max(worst, total_variation(a.row(x), b.row(x)))
    return worst


def certify_backdoor(
    model: CptModel, S: Iterable[int], T: Iterable[int], Z: Iterable[int], tol: float = ZERO_TOL
) -> AdjustmentCertificate:
    S, T, Z = _check_backdoor_args(model, S, T, Z)
    cdi = conditional_directed_information(model, T, S, Z)
    graphical = d_separated(backdoor_graph(model.dag, S), S, T, Z)
    joint = joint_from_cpts(model)
    try:
        adjusted = _adjustment(joint, S, T, Z)
    except UndefinedConditional:
        discrepancy = math.inf
    else:
        discrepancy = max_row_discrepancy(adjusted, effect_kernel(model, S, T), marginal(joint, S))
    return AdjustmentCertificate(
        Z=Z,
        graphical_ok=graphical,
        information_ok=cdi <= tol,
        cdi_value=cdi,
        max_discrepancy=discrepancy,
    )


def find_backdoor_sets(
    model: CptModel, S: Iterable[int], T: Iterable[int], max_size: int = 4, tol: float = ZERO_TOL
) -> list:
    """Every ``Z`` within the nondescendants of ``S`` (outside ``T``) of size
    at most ``max_size`` whose conditional directed information vanishes.

    Ordered by size, then lexicographically.
    """
    S, T = frozenset(S), frozenset(T)
    _pairwise_disjoint(S=S, T=T)
    pool = sorted(nondescendants_of(model.dag, S) - T)
    found = []
    for k in range(min(max_size, len(pool)) + 1):
        for Z in itertools.combinations(pool, k):
            if conditional_directed_information(model, T, S, Z) <= tol:
                found.append(frozenset(Z))
    return found

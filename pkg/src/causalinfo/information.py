"""Directed information between variable sets of a CPT model.

``directed_information(model, T, S)`` is the information flowing from
``X^T`` to ``X^S`` in the sense of how far the observational law of ``X^T``
given ``X^S`` sits from its law under the intervention ``X^S <- x^S``:

    E_{P(x^S)} D( P(X^T | X^S = x^S) || P(X^T | X^S <- x^S) )

It vanishes when conditioning on ``X^S`` already reveals its causal effect
on ``X^T``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .distribution import conditional_divergence, kernel_of, marginal, mutual_information
from .errors import OverlappingSets, StructureMismatch
from .graph import descendants_of, nondescendants_of
from .intervention import interventional_conditional_kernel
from .model import CptModel, joint_from_cpts

ZERO_TOL = 1e-9


def _check_disjoint(*sets) -> None:
    seen = set()
    for s in sets:
        if seen & s:
            raise OverlappingSets(f"sets overlap on {sorted(seen & s)}")
        seen |= s


def conditional_directed_information(
    model: CptModel, T: Iterable[int], S: Iterable[int], given: Iterable[int] = ()
) -> float:
    """I(X^T -> X^S | X^given) in bits; ``+inf`` when the interventional law
    misses observed mass."""
    T, S, given = frozenset(T), frozenset(S), frozenset(given)
    _check_disjoint(T, S, given)
    joint = joint_from_cpts(model)
    inputs = S | given
    observed = kernel_of(joint, T, inputs)
    intervened = interventional_conditional_kernel(model, S, given, T)
    return conditional_divergence(observed, intervened, marginal(joint, inputs))


def directed_information(model: CptModel, T: Iterable[int], S: Iterable[int]) -> float:
    """I(X^T -> X^S) in bits."""
    return conditional_directed_information(model, T, S, ())


class ChainRuleTerms(NamedTuple):
    mi_term: float
    cdi_term: float
    total: float


def chain_rule_decomposition(model: CptModel, T: Iterable[int], S: Iterable[int]) -> ChainRuleTerms:
    """Split I(X^T -> X^S) into the mutual information carried by the
    nondescendants of ``S`` in ``T`` and the conditional directed
    information of the descendants given them."""
    T, S = frozenset(T), frozenset(S)
    _check_disjoint(T, S)
    T1 = T & nondescendants_of(model.dag, S)
    T2 = T & descendants_of(model.dag, S)
    joint = joint_from_cpts(model)
    return ChainRuleTerms(
        mi_term=mutual_information(joint, T1, S),
        cdi_term=conditional_directed_information(model, T2, S, T1),
        total=directed_information(model, T, S),
    )


@dataclass
class Identity:
    lhs: str
    rhs: str
    lhs_value: float
    rhs_value: float
    holds: bool


@dataclass
class CanonicalReport:
    kind: str
    roles: dict  # "X"/"Y"/"Z" -> vertex index
    directed: dict  # "I(X->Y)" -> bits
    mutual: dict  # "I(X;Y)" -> bits
    identities: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(i.holds for i in self.identities)


# (lhs, rhs) pairs; "0" is the literal zero.
_IDENTITIES = {
    "chain": [
        ("I(X->Y)", "I(X;Y)"),
        ("I(Y->X)", "0"),
        ("I(Y->Z)", "I(Y;Z)"),
        ("I(Z->Y)", "0"),
        ("I(X->Z)", "I(X;Z)"),
        ("I(Z->X)", "0"),
    ],
    "fork": [
        ("I(X->Y)", "0"),
        ("I(Y->X)", "I(X;Y)"),
        ("I(Z->Y)", "0"),
        ("I(Y->Z)", "I(Y;Z)"),
        ("I(X->Z)", "I(X;Z)"),
        ("I(Z->X)", "I(X;Z)"),
    ],
    "collider": [
        ("I(X->Y)", "I(X;Y)"),
        ("I(Y->X)", "0"),
        ("I(Y->Z)", "0"),
        ("I(Z->Y)", "I(Y;Z)"),
        ("I(X->Z)", "I(X;Z)"),
        ("I(Z->X)", "I(X;Z)"),
        ("I(X;Z)", "0"),
    ],
}


def _roles(model: CptModel, kind: str) -> dict:
    if kind not in _IDENTITIES:
        raise StructureMismatch(f"unknown structure {kind!r}")
    dag = model.dag
    if dag.n != 3:
        raise StructureMismatch(f"{kind} needs exactly 3 variables, model has {dag.n}")
    edges = set(dag.edges)
    if len(edges) == 2:
        for y in range(3):
            a, c = sorted(set(range(3)) - {y})
            if kind == "fork" and edges == {(y, a), (y, c)}:
                return {"X": a, "Y": y, "Z": c}
            if kind == "collider" and edges == {(a, y), (c, y)}:
                return {"X": a, "Y": y, "Z": c}
            if kind == "chain":
                if edges == {(a, y), (y, c)}:
                    return {"X": a, "Y": y, "Z": c}
                if edges == {(c, y), (y, a)}:
                    return {"X": c, "Y": y, "Z": a}
    raise StructureMismatch(f"model edges {sorted(edges)} do not form a {kind}")


def canonical_structure_report(model: CptModel, kind: str, tol: float = ZERO_TOL) -> CanonicalReport:
    """All six pairwise directed informations of a chain, fork or collider,
    checked against the identities that structure implies."""
    roles = _roles(model, kind)
    joint = joint_from_cpts(model)
    directed = {}
    for a in "XYZ":
        for b in "XYZ":
            if a != b:
                directed[f"I({a}->{b})"] = directed_information(model, {roles[a]}, {roles[b]})
    mutual = {
        f"I({a};{b})": mutual_information(joint, {roles[a]}, {roles[b]})
        for a, b in (("X", "Y"), ("Y", "Z"), ("X", "Z"))
    }
    values = {**directed, **mutual, "0": 0.0}
    report = CanonicalReport(kind, roles, directed, mutual)
    for lhs, rhs in _IDENTITIES[kind]:
        lv, rv = values[lhs], values[rhs]
        report.identities.append(Identity(lhs, rhs, lv, rv, abs(lv - rv) <= tol))
    return report

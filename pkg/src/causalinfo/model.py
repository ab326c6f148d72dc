"""CPT (Markov factorization) and functional (structural equation) models.

Variables must be declared in a causal order: every parent index is smaller
than its child's.  CPT arrays have one axis per parent (in increasing
index order) followed by the variable's own axis; function tables have the
same parent axes followed by a noise axis and hold output symbols.

Sampling uses a counter-based generator so that draw ``d`` of a model with
``n`` variables under ``seed`` is a pure function of ``(seed, d)``:

* ``key = mix64(seed mod 2**64)``
* for counter ``c = d * n + i`` (variable ``i``), the 64-bit word is
  ``mix64(key + (c + 1) * 0x9E3779B97F4A7C15 mod 2**64)``
* the uniform is ``(word >> 11) * 2**-53``
* the symbol is the smallest ``k`` with ``cumsum(p)[k] > u`` (clipped to the
  last symbol), where ``p`` is the noise table (functional models) or the
  CPT row for the already-drawn parents (CPT models).

``mix64`` is the SplitMix64 finalizer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .distribution import MAX_ENTRIES, JointTable, Kernel, check_size
from .errors import InvalidModel, ModelTooLarge
from .graph import Dag

ROW_TOL = 1e-9


def _parents(dag: Dag, i: int) -> tuple:
    return tuple(sorted(dag.parents[i]))


@dataclass(frozen=True, eq=False)
class CptModel:
    """A DAG with one conditional probability table per vertex."""

    dag: Dag
    cards: tuple
    cpts: tuple  # Kernel per variable: input = parents, output = (i,)

    @classmethod
    def from_arrays(cls, dag: Dag, cards: Sequence[int], tables: Sequence, check: bool = True) -> "CptModel":
        cards = tuple(int(c) for c in cards)
        cpts = []
        for i, t in enumerate(tables):
            pa = _parents(dag, i)
            arr = np.array(t, dtype=float)
            cpts.append(
                Kernel(
                    pa,
                    tuple(cards[j] for j in pa),
                    (i,),
                    (cards[i],),
                    arr,
                    np.ones(arr.shape[:-1], dtype=bool),
                )
            )
        model = cls(dag, cards, tuple(cpts))
        if check:
            violations = validate_model(model)
            if violations:
                raise InvalidModel(violations)
        return model

    @property
    def n(self) -> int:
        return self.dag.n

    def table(self, i: int) -> np.ndarray:
        return self.cpts[i].rows


@dataclass(frozen=True, eq=False)
class FunctionalModel:
    """Structural equations ``X_i = f_i(parents, U_i)`` with independent noise."""

    dag: Dag
    cards: tuple
    noise: tuple  # 1-D probability array per variable
    functions: tuple  # int array per variable, shape parent cards + (noise card,)

    @classmethod
    def from_arrays(cls, dag: Dag, cards, noise, functions, check: bool = True) -> "FunctionalModel":
        model = cls(
            dag,
            tuple(int(c) for c in cards),
            tuple(np.array(u, dtype=float) for u in noise),
            tuple(np.array(f, dtype=np.int64) for f in functions),
        )
        for arr in model.noise + model.functions:
            arr.setflags(write=False)
        if check:
            violations = validate_model(model)
            if violations:
                raise InvalidModel(violations)
        return model

    @property
    def n(self) -> int:
        return self.dag.n


Model = Union[CptModel, FunctionalModel]


@dataclass(frozen=True)
class Violation:
    kind: str
    variable: int
    row: Optional[tuple]
    message: str

    def __str__(self):
        where = f"variable {self.variable}"
        if self.row is not None:
            where += f" row {self.row}"
        return f"{self.kind} at {where}: {self.message}"


def validate_model(model: Model) -> list:
    """List every invariant violation; an empty list means the model is valid."""
    out = []
    dag = model.dag
    if len(model.cards) != dag.n:
        return [Violation("ScopeViolation", -1, None, f"{len(model.cards)} cardinalities for {dag.n} variables")]
    for i in range(dag.n):
        for j in dag.parents[i]:
            if j > i:
                out.append(Violation("OrderViolation", i, None, f"parent {j} is declared after its child"))
        if model.cards[i] < 1:
            out.append(Violation("CardinalityViolation", i, None, f"cardinality {model.cards[i]} < 1"))
    if out:
        return out
    try:
        check_size(model.cards)
    except ModelTooLarge as exc:
        return [Violation("SizeViolation", -1, None, str(exc))]
    if isinstance(model, CptModel):
        out.extend(_validate_cpts(model))
    else:
        out.extend(_validate_functional(model))
    return out


def _validate_cpts(model: CptModel) -> list:
    out = []
    if len(model.cpts) != model.n:
        return [Violation("ScopeViolation", -1, None, f"{len(model.cpts)} CPTs for {model.n} variables")]
    for i, k in enumerate(model.cpts):
        pa = _parents(model.dag, i)
        if tuple(k.input_vars) != pa or tuple(k.output_vars) != (i,):
            out.append(
                Violation("ScopeViolation", i, None, f"CPT scope {k.input_vars}->{k.output_vars}, parents are {pa}")
            )
            continue
        expected = tuple(model.cards[j] for j in pa) + (model.cards[i],)
        if k.rows.shape != expected:
            out.append(Violation("ScopeViolation", i, None, f"CPT shape {k.rows.shape}, expected {expected}"))
            continue
        for row in np.ndindex(*expected[:-1]):
            probs = k.rows[row]
            if np.any(~np.isfinite(probs)) or np.any(probs < 0):
                out.append(Violation("NegativeProbability", i, row, f"entries {probs.tolist()}"))
            elif abs(probs.sum() - 1.0) > ROW_TOL:
                out.append(Violation("NormalizationViolation", i, row, f"row sums to {probs.sum():.12g}"))
    return out


def _validate_functional(model: FunctionalModel) -> list:
    out = []
    if len(model.noise) != model.n or len(model.functions) != model.n:
        return [Violation("ScopeViolation", -1, None, "one noise table and one function per variable required")]
    for i in range(model.n):
        u = model.noise[i]
        if u.ndim != 1 or u.size < 1:
            out.append(Violation("ScopeViolation", i, None, "noise table must be a nonempty vector"))
            continue
        if np.any(~np.isfinite(u)) or np.any(u < 0):
            out.append(Violation("NegativeProbability", i, None, f"noise entries {u.tolist()}"))
        elif abs(u.sum() - 1.0) > ROW_TOL:
            out.append(Violation("NormalizationViolation", i, None, f"noise table sums to {u.sum():.12g}"))
        pa = _parents(model.dag, i)
        expected = tuple(model.cards[j] for j in pa) + (u.size,)
        f = model.functions[i]
        if f.shape != expected:
            out.append(Violation("ScopeViolation", i, None, f"function shape {f.shape}, expected {expected}"))
            continue
        for row in np.ndindex(*expected[:-1]):
            bad = (f[row] < 0) | (f[row] >= model.cards[i])
            if np.any(bad):
                out.append(Violation("FunctionRangeViolation", i, row, f"outputs {f[row].tolist()} outside 0..{model.cards[i] - 1}"))
    return out


def _expand(arr: np.ndarray, axes_vars: Sequence[int], cards: Sequence[int]) -> np.ndarray:
    """View ``arr`` (axes labelled by ``axes_vars``) broadcastable over all variables."""
    perm = sorted(range(len(axes_vars)), key=lambda a: axes_vars[a])
    arr = np.transpose(arr, perm)
    present = {axes_vars[a] for a in perm}
    shape = [cards[v] if v in present else 1 for v in range(len(cards))]
    return arr.reshape(shape)


def factor_product(model: CptModel, skip: Iterable[int] = ()) -> np.ndarray:
    """Product of the CPTs of all variables outside ``skip``, over all axes."""
    check_size(model.cards)
    skip = set(skip)
    arr = np.ones(model.cards)
    for i, k in enumerate(model.cpts):
        if i not in skip:
            arr = arr * _expand(k.rows, k.input_vars + (i,), model.cards)
    return arr


def joint_from_cpts(model: CptModel) -> JointTable:
    """Exact joint via the Markov factorization."""
    return JointTable(range(model.n), model.cards, factor_product(model))


def cpt_from_functional(fm: FunctionalModel) -> CptModel:
    """Push each noise table through its structural equation."""
    tables = []
    for i in range(fm.n):
        f = fm.functions[i]
        onehot = f[..., None] == np.arange(fm.cards[i])
        tables.append(np.tensordot(onehot, fm.noise[i], axes=([-2], [0])))
    return CptModel.from_arrays(fm.dag, fm.cards, tables, check=False)


def functional_joint(fm: FunctionalModel) -> JointTable:
    """Exact joint by enumerating every noise realization.

    Independent of the CPT route; kept as an oracle for the Markov
    factorization and for interventions applied by equation surgery.
    """
    combos = math.prod(u.size for u in fm.noise)
    if combos > MAX_ENTRIES:
        raise ModelTooLarge(f"{combos} noise combinations (limit {MAX_ENTRIES})")
    check_size(fm.cards)
    parents = [_parents(fm.dag, i) for i in range(fm.n)]
    out = np.zeros(fm.cards)
    supports = [np.flatnonzero(u > 0) for u in fm.noise]
    for us in itertools.product(*supports):
        x = [0] * fm.n
        weight = 1.0
        for i in range(fm.n):
            weight *= fm.noise[i][us[i]]
            x[i] = int(fm.functions[i][tuple(x[j] for j in parents[i]) + (us[i],)])
        out[tuple(x)] += weight
    return JointTable(range(fm.n), fm.cards, out)


_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * _M1
    z = z ^ (z >> np.uint64(27))
    z = z * _M2
    return z ^ (z >> np.uint64(31))


def counter_uniforms(seed: int, counters: np.ndarray) -> np.ndarray:
    """Uniforms in [0, 1) for the given draw counters under ``seed``."""
    with np.errstate(over="ignore"):
        key = _mix64(np.array([seed % 2**64], dtype=np.uint64))[0]
        c = np.asarray(counters, dtype=np.uint64)
        words = _mix64(key + (c + np.uint64(1)) * _GAMMA)
    return (words >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _inverse_cdf(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    # probs has shape (count, k); u has shape (count,)
    cdf = np.cumsum(probs, axis=-1)
    idx = (cdf <= u[:, None]).sum(axis=-1)
    return np.minimum(idx, probs.shape[-1] - 1)


def sample_many(model: Model, seed: int, count: int, start: int = 0) -> np.ndarray:
    """Draws ``start .. start+count-1`` as an int array of shape (count, n)."""
    n = model.n
    draws = np.arange(start, start + count, dtype=np.uint64)
    out = np.zeros((count, n), dtype=np.int64)
    for i in range(n):
        u = counter_uniforms(seed, draws * np.uint64(n) + np.uint64(i))
        pa = _parents(model.dag, i)
        pidx = tuple(out[:, j] for j in pa)
        if isinstance(model, FunctionalModel):
            noise = model.noise[i]
            ui = _inverse_cdf(np.broadcast_to(noise, (count, noise.size)), u)
            out[:, i] = model.functions[i][pidx + (ui,)]
        else:
            rows = model.cpts[i].rows[pidx] if pa else np.broadcast_to(model.cpts[i].rows, (count, model.cards[i]))
            out[:, i] = _inverse_cdf(rows, u)
    return out


def sample(model: Model, seed: int, draw: int = 0) -> tuple:
    """One reproducible assignment: draw number ``draw`` under ``seed``."""
    return tuple(int(v) for v in sample_many(model, seed, 1, start=draw)[0])


def empirical_joint(samples: np.ndarray, cards: Sequence[int]) -> JointTable:
    counts = np.zeros(tuple(cards))
    np.add.at(counts, tuple(samples.T), 1.0)
    return JointTable(range(len(cards)), cards, counts / counts.sum())

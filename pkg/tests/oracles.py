"""Brute-force reference computations, written without the library's array code.

Everything here loops over assignments explicitly so it shares no code
path with the vectorized implementation under test.
"""

import itertools
import math

import networkx as nx
import numpy as np


def assignments(cards):
    return itertools.product(*(range(c) for c in cards))


def joint_by_cells(model):
    """Markov factorization evaluated cell by cell."""
    out = {}
    for x in assignments(model.cards):
        p = 1.0
        for i in range(model.n):
            pa = sorted(model.dag.parents[i])
            p *= float(model.cpts[i].rows[tuple(x[j] for j in pa) + (x[i],)])
        out[x] = p
    return out


def truncated_by_cells(model, spec):
    """Product of the non-intervened CPTs with intervened values pinned,
    keyed by the full assignment restricted to non-intervened variables."""
    rest = [v for v in range(model.n) if v not in spec]
    out = {}
    for xr in assignments([model.cards[v] for v in rest]):
        x = dict(zip(rest, xr))
        x.update(spec)
        p = 1.0
        for i in rest:
            pa = sorted(model.dag.parents[i])
            p *= float(model.cpts[i].rows[tuple(x[j] for j in pa) + (x[i],)])
        out[xr] = p
    return rest, out


def sum_to(cells, variables, keep):
    """Marginalize a dict-of-cells table onto ``keep`` (in ``variables`` order)."""
    pos = [variables.index(v) for v in variables if v in keep]
    out = {}
    for x, p in cells.items():
        key = tuple(x[k] for k in pos)
        out[key] = out.get(key, 0.0) + p
    return out


def kl_bits(p, q):
    total = 0.0
    for a, b in zip(p, q):
        if a > 0:
            if b <= 0:
                return math.inf
            total += a * math.log2(a / b)
    return total


def binary_entropy(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def entropy_bits(cells):
    return -sum(p * math.log2(p) for p in cells.values() if p > 0)


def cmi_by_entropies(cells, variables, A, B, Z):
    """I(A;B|Z) = H(AZ) + H(BZ) - H(ABZ) - H(Z)."""
    h = lambda keep: entropy_bits(sum_to(cells, variables, set(keep)))  # noqa: E731
    return h(A | Z) + h(B | Z) - h(A | B | Z) - h(Z)


def to_networkx(dag):
    g = nx.DiGraph()
    g.add_nodes_from(range(dag.n))
    g.add_edges_from(dag.edges)
    return g


def nx_d_separated(dag, A, B, Z):
    return nx.is_d_separator(to_networkx(dag), set(A), set(B), set(Z))


def noise_enumeration_joint(fm, spec=None):
    """Push every noise realization through the equations, intervened
    equations replaced by constants."""
    spec = spec or {}
    out = {}
    parents = [sorted(fm.dag.parents[i]) for i in range(fm.n)]
    for us in itertools.product(*(range(1 if i in spec else u.size) for i, u in enumerate(fm.noise))):
        w = 1.0
        x = [0] * fm.n
        for i in range(fm.n):
            if i in spec:
                x[i] = spec[i]
                continue
            w *= float(fm.noise[i][us[i]])
            x[i] = int(fm.functions[i][tuple(x[j] for j in parents[i]) + (us[i],)])
        key = tuple(x)
        out[key] = out.get(key, 0.0) + w
    return out


def cells_to_array(cells, cards):
    arr = np.zeros(tuple(cards))
    for x, p in cells.items():
        arr[x] += p
    return arr


def random_subset(rng, pool, min_size=0, max_size=None):
    pool = sorted(pool)
    hi = len(pool) if max_size is None else min(max_size, len(pool))
    if hi < min_size:
        return None
    k = int(rng.integers(min_size, hi + 1))
    return frozenset(int(v) for v in rng.choice(pool, size=k, replace=False)) if k else frozenset()

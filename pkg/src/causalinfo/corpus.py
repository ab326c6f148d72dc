"""Example models and seeded random model generators.

The named builders produce the models shipped under ``causalinfo/models``;
``random_cpt_model`` and ``random_functional_model`` drive the property
tests.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .graph import validate_dag
from .model import CptModel, FunctionalModel


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_row(rng: np.random.Generator, k: int, decimals: Optional[int] = None) -> np.ndarray:
    """A strictly positive probability vector of length ``k``."""
    p = rng.dirichlet(np.ones(k))
    if decimals is None:
        return p
    step = 10.0**-decimals
    p = np.maximum(np.round(p, decimals), step)
    p[-1] = 0.0
    p[-1] = round(1.0 - p.sum(), decimals)
    if p[-1] < step:
        big = int(np.argmax(p[:-1]))
        p[big] = round(p[big] - step, decimals)
        p[-1] = round(p[-1] + step, decimals)
    return p


def random_dag(rng, n: int, edge_prob: float = 0.5, labels: Optional[Sequence[str]] = None):
    parents = [[j for j in range(i) if rng.random() < edge_prob] for i in range(n)]
    return validate_dag(n, parents, labels)


def random_cpt_model(
    seed,
    n: int = 4,
    max_card: int = 3,
    edge_prob: float = 0.5,
    dag=None,
    cards: Optional[Sequence[int]] = None,
    decimals: Optional[int] = None,
) -> CptModel:
    """Random full-support CPT model on a random index-ordered DAG."""
    rng = _rng(seed)
    if dag is None:
        dag = random_dag(rng, n, edge_prob)
    n = dag.n
    if cards is None:
        cards = [int(rng.integers(2, max_card + 1)) for _ in range(n)]
    tables = []
    for i in range(n):
        pa = sorted(dag.parents[i])
        shape = tuple(cards[j] for j in pa)
        t = np.empty(shape + (cards[i],))
        for row in np.ndindex(*shape):
            t[row] = random_row(rng, cards[i], decimals)
        tables.append(t)
    return CptModel.from_arrays(dag, cards, tables)


def random_functional_model(
    seed,
    n: int = 4,
    max_card: int = 3,
    max_noise: int = 4,
    edge_prob: float = 0.5,
    dag=None,
) -> FunctionalModel:
    """Random structural-equation model with lookup-table functions."""
    rng = _rng(seed)
    if dag is None:
        dag = random_dag(rng, n, edge_prob)
    n = dag.n
    cards = [int(rng.integers(2, max_card + 1)) for _ in range(n)]
    noise, functions = [], []
    for i in range(n):
        k = int(rng.integers(1, max_noise + 1))
        noise.append(random_row(rng, k))
        shape = tuple(cards[j] for j in sorted(dag.parents[i])) + (k,)
        functions.append(rng.integers(0, cards[i], size=shape))
    return FunctionalModel.from_arrays(dag, cards, noise, functions)


# Gray code on two bits and its inverse.
_ENCODE = [0, 1, 3, 2]
_DECODE = [0, 1, 3, 2]


def communication_system(noisy: bool = True) -> FunctionalModel:
    """Message W, encoder X = e(W), channel Y = f(X, U), decoder W~ = d(Y).

    Four messages with a nonuniform prior.  The noisy channel adds
    ``U mod 4`` with ``P(U = 0) = 0.85``; the identity channel has no noise.
    """
    dag = validate_dag(4, [[], [0], [1], [2]], ["W", "X", "Y", "Wt"])
    if noisy:
        channel_noise = [0.85, 0.05, 0.05, 0.05]
        channel = [[(x + u) % 4 for u in range(4)] for x in range(4)]
    else:
        channel_noise = [1.0]
        channel = [[x] for x in range(4)]
    noise = [[0.4, 0.3, 0.2, 0.1], [1.0], channel_noise, [1.0]]
    functions = [
        [0, 1, 2, 3],
        [[_ENCODE[w]] for w in range(4)],
        channel,
        [[_DECODE[y]] for y in range(4)],
    ]
    return FunctionalModel.from_arrays(dag, [4, 4, 4, 4], noise, functions)


def chain_model(seed=0, cards=(2, 2, 2), decimals: Optional[int] = None) -> CptModel:
    dag = validate_dag(3, [[], [0], [1]], ["X", "Y", "Z"])
    return random_cpt_model(seed, dag=dag, cards=cards, decimals=decimals)


def fork_model(seed=0, cards=(2, 2, 2), decimals: Optional[int] = None) -> CptModel:
    dag = validate_dag(3, [[], [0], [0]], ["Y", "X", "Z"])
    return random_cpt_model(seed, dag=dag, cards=cards, decimals=decimals)


def collider_model(seed=0, cards=(2, 2, 2), decimals: Optional[int] = None) -> CptModel:
    dag = validate_dag(3, [[], [], [0, 1]], ["X", "Z", "Y"])
    return random_cpt_model(seed, dag=dag, cards=cards, decimals=decimals)


SIX_NODE_PARENTS = [[], [], [0, 1], [0], [2], [2, 3, 4]]


def six_node_dag():
    return validate_dag(6, SIX_NODE_PARENTS, [f"X{i}" for i in range(1, 7)])


def six_node_model(seed=0, decimals: Optional[int] = None) -> CptModel:
    return random_cpt_model(seed, dag=six_node_dag(), cards=[2] * 6, decimals=decimals)


def feedback_channel_dag(n: int = 3):
    """X_1, Y_1, X_2, Y_2, ...: encoder X_i reads (X_{i-1}, Y_{i-1}); Y_i reads X_i."""
    parents, labels = [], []
    for i in range(n):
        x, y = 2 * i, 2 * i + 1
        parents.append([] if i == 0 else [x - 2, x - 1])
        parents.append([x])
        labels += [f"X{i + 1}", f"Y{i + 1}"]
    return validate_dag(2 * n, parents, labels)


def feedback_channel_model(n: int = 3, crossover: float = 0.1, seed=0, decimals: Optional[int] = None) -> CptModel:
    """Binary symmetric channel used ``n`` times with randomized feedback encoders."""
    rng = _rng(seed)
    dag = feedback_channel_dag(n)
    tables = []
    for i in range(dag.n):
        if i % 2 == 1:
            tables.append(np.array([[1 - crossover, crossover], [crossover, 1 - crossover]]))
        else:
            k = len(dag.parents[i])
            t = np.empty((2,) * k + (2,))
            for row in np.ndindex(*((2,) * k)):
                t[row] = random_row(rng, 2, decimals)
            tables.append(t)
    return CptModel.from_arrays(dag, [2] * dag.n, tables)


BUNDLED = {
    "comm_identity": lambda: communication_system(noisy=False),
    "comm_noisy": lambda: communication_system(noisy=True),
    "chain": lambda: chain_model(seed=1, decimals=3),
    "fork": lambda: fork_model(seed=8, decimals=3),
    "collider": lambda: collider_model(seed=3, decimals=3),
    "sixnode": lambda: six_node_model(seed=6, decimals=3),
    "feedback3": lambda: feedback_channel_model(3, seed=7, decimals=3),
}

"""DAG structure: validation, ancestry queries, d-separation and surgery.

Vertices are dense integers ``0..n-1``; labels are for display only.
Vertex sets are passed around as any iterable of ints and returned as
``frozenset``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .errors import CycleDetected, IndexOutOfRange, SelfParent, SetsNotDisjoint

VertexSet = frozenset


@dataclass(frozen=True)
class Dag:
    """Immutable DAG given by per-vertex parent sets.

    Build with :func:`validate_dag`, which checks acyclicity and caches a
    topological order.
    """

    n: int
    parents: tuple
    labels: tuple
    order: tuple

    @property
    def children(self) -> tuple:
        kids = [set() for _ in range(self.n)]
        for i, pa in enumerate(self.parents):
            for j in pa:
                kids[j].add(i)
        return tuple(frozenset(k) for k in kids)

    @property
    def edges(self) -> list:
        """Edges ``(j, i)`` for ``j`` in the parent set of ``i``, sorted."""
        return sorted((j, i) for i in range(self.n) for j in self.parents[i])

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise IndexOutOfRange(f"unknown vertex label {label!r}") from None

    def is_index_ordered(self) -> bool:
        """True when every parent index is smaller than its child's index."""
        return all(j < i for i in range(self.n) for j in self.parents[i])


def validate_dag(
    n: int,
    parents: Sequence[Iterable[int]],
    labels: Optional[Sequence[str]] = None,
) -> Dag:
    if n < 0:
        raise IndexOutOfRange(f"vertex count must be nonnegative, got {n}")
    if len(parents) != n:
        raise IndexOutOfRange(f"expected {n} parent sets, got {len(parents)}")
    pa = []
    for i, ps in enumerate(parents):
        ps = frozenset(int(j) for j in ps)
        for j in ps:
            if not 0 <= j < n:
                raise IndexOutOfRange(f"parent {j} of vertex {i} out of range 0..{n - 1}")
        if i in ps:
            raise SelfParent(f"vertex {i} lists itself as a parent")
        pa.append(ps)
    if labels is None:
        labels = [f"X{i + 1}" for i in range(n)]
    labels = tuple(str(x) for x in labels)
    if len(labels) != n:
        raise IndexOutOfRange(f"expected {n} labels, got {len(labels)}")
    order = _topological_order(pa)
    return Dag(n=n, parents=tuple(pa), labels=labels, order=order)


def _topological_order(parents) -> tuple:
    # Kahn's algorithm, smallest ready index first so the order is deterministic.
    n = len(parents)
    indeg = [len(p) for p in parents]
    kids = [[] for _ in range(n)]
    for i, ps in enumerate(parents):
        for j in ps:
            kids[j].append(i)
    ready = sorted(i for i in range(n) if indeg[i] == 0)
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for c in kids[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
        ready.sort()
    if len(order) < n:
        raise CycleDetected(_find_cycle(parents, set(range(n)) - set(order)))
    return tuple(order)


def _find_cycle(parents, remaining) -> list:
    # Every vertex left over by Kahn's algorithm has a parent that is also
    # left over, so walking parents must revisit a vertex.
    v = min(remaining)
    seen = {}
    path = []
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = min(p for p in parents[v] if p in remaining)
    cycle = path[seen[v]:]
    cycle.reverse()
    return cycle + [cycle[0]]


def as_vertex_set(dag: Dag, S: Iterable[int]) -> frozenset:
    S = frozenset(int(i) for i in S)
    for i in S:
        if not 0 <= i < dag.n:
            raise IndexOutOfRange(f"vertex {i} out of range 0..{dag.n - 1}")
    return S


def descendants_of(dag: Dag, S: Iterable[int]) -> frozenset:
    """Vertices reachable from ``S`` by a directed path of length >= 1."""
    S = as_vertex_set(dag, S)
    kids = dag.children
    out = set()
    queue = deque(c for i in S for c in kids[i])
    while queue:
        v = queue.popleft()
        if v in out:
            continue
        out.add(v)
        queue.extend(kids[v])
    return frozenset(out)


def ancestors_of(dag: Dag, S: Iterable[int]) -> frozenset:
    """Vertices with a directed path of length >= 1 into ``S``."""
    S = as_vertex_set(dag, S)
    out = set()
    queue = deque(p for i in S for p in dag.parents[i])
    while queue:
        v = queue.popleft()
        if v in out:
            continue
        out.add(v)
        queue.extend(dag.parents[v])
    return frozenset(out)


def nondescendants_of(dag: Dag, S: Iterable[int]) -> frozenset:
    """All vertices outside ``S`` and its descendants."""
    S = as_vertex_set(dag, S)
    return frozenset(range(dag.n)) - S - descendants_of(dag, S)


def parents_of_set(dag: Dag, S: Iterable[int]) -> frozenset:
    """Union of the parent sets of ``S``, with members of ``S`` removed.

    When some member of ``S`` is an ancestor of a vertex in the result, the
    parents no longer screen ``S`` off from the rest of the graph; callers
    relying on that property must exclude such sets themselves.
    """
    S = as_vertex_set(dag, S)
    out = set()
    for i in S:
        out |= dag.parents[i]
    return frozenset(out - S)


def d_separated(dag: Dag, A: Iterable[int], B: Iterable[int], Z: Iterable[int]) -> bool:
    """Test whether ``Z`` d-separates ``A`` from ``B``.

    Uses the reachability ("Bayes-ball") traversal: a trail may pass a
    non-collider only if it is unobserved, and a collider only if the
    collider or one of its descendants is in ``Z``.
    """
    A, B, Z = (as_vertex_set(dag, x) for x in (A, B, Z))
    if (A & B) or (A & Z) or (B & Z):
        raise SetsNotDisjoint("A, B and Z must be pairwise disjoint")
    if not A or not B:
        return True
    kids = dag.children
    z_or_ancestor = Z | ancestors_of(dag, Z)

    # direction "up": trail arrived from a child; "down": from a parent.
    visited = set()
    queue = deque((a, "up") for a in sorted(A))
    while queue:
        v, d = queue.popleft()
        if (v, d) in visited:
            continue
        visited.add((v, d))
        if v not in Z and v in B:
            return False
        if d == "up":
            if v in Z:
                continue
            queue.extend((p, "up") for p in dag.parents[v])
            queue.extend((c, "down") for c in kids[v])
        else:
            if v not in Z:
                queue.extend((c, "down") for c in kids[v])
            if v in z_or_ancestor:
                queue.extend((p, "up") for p in dag.parents[v])
    return True


def surgery(dag: Dag, S: Iterable[int]) -> Dag:
    """Remove every edge pointing into a vertex of ``S``."""
    S = as_vertex_set(dag, S)
    pa = tuple(frozenset() if i in S else dag.parents[i] for i in range(dag.n))
    if pa == dag.parents:
        return dag
    return Dag(n=dag.n, parents=pa, labels=dag.labels, order=_topological_order(pa))


def backdoor_graph(dag: Dag, S: Iterable[int]) -> Dag:
    """Remove every edge leaving a vertex of ``S``."""
    S = as_vertex_set(dag, S)
    pa = tuple(dag.parents[i] - S for i in range(dag.n))
    return Dag(n=dag.n, parents=pa, labels=dag.labels, order=_topological_order(pa))


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(
    dag: Dag,
    intervened: Iterable[int] = (),
    assigned_labels: Optional[Mapping[int, str]] = None,
    name: str = "G",
) -> str:
    """Render ``dag`` as Graphviz DOT text.

    Intervened vertices lose their incoming edges, are drawn boxed, and get
    an extra circled source node joined by an edge labelled ``=``.  The
    assignment node shows ``assigned_labels[i]`` (default: the lowercased
    vertex label).  Output depends only on the inputs.
    """
    S = as_vertex_set(dag, intervened)
    g = surgery(dag, S)
    assigned_labels = dict(assigned_labels or {})
    lines = [f"digraph {_quote(name)} {{"]
    for i in range(g.n):
        shape = ", shape=box" if i in S else ""
        lines.append(f"  v{i} [label={_quote(g.labels[i])}{shape}];")
    for i in sorted(S):
        text = assigned_labels.get(i, g.labels[i].lower())
        lines.append(f"  do{i} [label={_quote(text)}, shape=circle];")
    for j, i in g.edges:
        lines.append(f"  v{j} -> v{i};")
    for i in sorted(S):
        lines.append(f'  do{i} -> v{i} [label="="];')
    lines.append("}")
    return "\n".join(lines) + "\n"

"""Girvan-Newman divisive communities with modularity-based cut selection."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .graph import EmailGraph, brandes

# Scores within this relative distance of the maximum count as tied.
TIE_RTOL = 1e-9


def edge_betweenness(graph: EmailGraph) -> dict[tuple[str, str], float]:
    """Shortest-path edge betweenness on the undirected, unweighted projection.

    Keys are ``(u, v)`` label pairs with ``u < v``.
    """
    adj = graph.adjacency(directed=False)
    return _edge_scores(adj, graph.nodes)


def _edge_scores(adj, labels) -> dict[tuple[str, str], float]:
    _, raw = brandes(adj, edges=True)
    out: dict[tuple[str, str], float] = {}
    for v, nbrs in enumerate(adj):
        for w in nbrs:
            if v < w:
                a, b = labels[v], labels[w]
                key = (a, b) if a < b else (b, a)
                out[key] = (raw.get((v, w), 0.0) + raw.get((w, v), 0.0)) / 2.0
    return out


def _components(adj: Sequence[set[int]]) -> list[list[int]]:
    seen = [False] * len(adj)
    comps = []
    for start in range(len(adj)):
        if seen[start]:
            continue
        seen[start] = True
        stack, comp = [start], []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def modularity(graph: EmailGraph, partition: Iterable[Iterable[str]]) -> float:
    """Weighted modularity on the undirected projection.

    ``partition`` must cover every node exactly once. A graph without edges
    has modularity 0 by convention.
    """
    blocks = [list(b) for b in partition]
    membership: dict[str, int] = {}
    for c, block in enumerate(blocks):
        for v in block:
            if v in membership:
                raise ValueError(f"node {v!r} appears in more than one community")
            if v not in graph.index:
                raise ValueError(f"unknown node {v!r} in partition")
            membership[v] = c
    if len(membership) != graph.n_nodes:
        missing = [v for v in graph.nodes if v not in membership]
        raise ValueError(f"partition does not cover nodes: {missing[:5]}")
    comm = [membership[v] for v in graph.nodes]
    inside = [0.0] * len(blocks)
    strength = [0.0] * len(blocks)
    m = 0.0
    for (i, j), w in sorted(graph.undirected_weights().items()):
        m += w
        strength[comm[i]] += w
        strength[comm[j]] += w
        if comm[i] == comm[j]:
            inside[comm[i]] += w
    if m == 0:
        return 0.0
    return sum(inside[c] / m - (strength[c] / (2 * m)) ** 2 for c in range(len(blocks)))


@dataclass(frozen=True)
class Checkpoint:
    removed_edge: tuple[str, str]
    partition: tuple[tuple[str, ...], ...]
    modularity: float

    @property
    def n_communities(self) -> int:
        return len(self.partition)


@dataclass
class Dendrogram:
    checkpoints: list[Checkpoint] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.checkpoints)

    def __iter__(self):
        return iter(self.checkpoints)

    def __getitem__(self, i: int) -> Checkpoint:
        return self.checkpoints[i]

    def to_json(self) -> str:
        return json.dumps(
            {
                "checkpoints": [
                    {
                        "removed_edge": list(cp.removed_edge),
                        "n_communities": cp.n_communities,
                        "modularity": cp.modularity,
                        "partition": [list(b) for b in cp.partition],
                    }
                    for cp in self.checkpoints
                ]
            },
            indent=2,
        )


def girvan_newman(graph: EmailGraph, target_components: int | None = None) -> Dendrogram:
    """Remove maximum-betweenness edges one at a time, recomputing after each.

    A checkpoint is recorded every time the component count grows. Ties go
    to the lexicographically smallest ``(u, v)`` label pair. Stops once
    ``target_components`` is reached, or when no edges remain.
    """
    labels = list(graph.nodes)
    adj: list[set[int]] = [set(nbrs) for nbrs in graph.adjacency(directed=False)]
    dendro = Dendrogram()
    n_comp = len(_components(adj))
    while any(adj):
        if target_components is not None and n_comp >= target_components:
            break
        scores = _edge_scores([sorted(a) for a in adj], labels)
        top = max(scores.values())
        tied = [e for e, s in scores.items() if s >= top - TIE_RTOL * max(1.0, abs(top))]
        u, v = min(tied)
        i, j = graph.index[u], graph.index[v]
        adj[i].discard(j)
        adj[j].discard(i)
        comps = _components(adj)
        if len(comps) > n_comp:
            n_comp = len(comps)
            partition = tuple(sorted(tuple(sorted(labels[k] for k in c)) for c in comps))
            dendro.checkpoints.append(Checkpoint((u, v), partition, modularity(graph, partition)))
    return dendro


def best_partition(dendrogram: Dendrogram) -> tuple[tuple[str, ...], ...]:
    """Checkpoint partition with maximal modularity; the earliest wins ties."""
    if not len(dendrogram):
        raise ValueError("empty dendrogram")
    best = dendrogram[0]
    for cp in dendrogram.checkpoints[1:]:
        if cp.modularity > best.modularity + 1e-12:
            best = cp
    return best.partition


def partition_labels(partition: Sequence[Sequence[str]]) -> dict[str, int]:
    return {v: c for c, block in enumerate(partition) for v in block}


def write_partition_csv(partition: Sequence[Sequence[str]], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["node_id", "community_id"])
    for node, cid in sorted(partition_labels(partition).items()):
        w.writerow([node, cid])


def read_partition_csv(stream) -> Mapping[str, int]:
    return {row["node_id"]: int(row["community_id"]) for row in csv.DictReader(stream)}

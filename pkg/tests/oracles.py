"""Independent reference implementations used only by the tests.

None of these share code with the package: shortest paths come from
Floyd-Warshall over exact fractions and are enumerated explicitly, and
partitions are enumerated exhaustively.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from orgnet.graph import EmailGraph


def undirected_lengths(graph: EmailGraph, weighted: bool) -> dict[tuple[int, int], Fraction]:
    """Arc lengths of the undirected projection (1 or 1/summed weight)."""
    total: dict[tuple[int, int], int] = {}
    for s, d, w in zip(graph.src.tolist(), graph.dst.tolist(), graph.weight.tolist()):
        key = (min(s, d), max(s, d))
        total[key] = total.get(key, 0) + w
    out = {}
    for (i, j), w in total.items():
        length = Fraction(1, w) if weighted else Fraction(1)
        out[(i, j)] = out[(j, i)] = length
    return out


def directed_lengths(graph: EmailGraph, weighted: bool) -> dict[tuple[int, int], Fraction]:
    return {
        (s, d): Fraction(1, w) if weighted else Fraction(1)
        for s, d, w in zip(graph.src.tolist(), graph.dst.tolist(), graph.weight.tolist())
    }


def floyd_warshall(n: int, arcs: dict[tuple[int, int], Fraction]) -> list[list[Fraction | None]]:
    dist: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    for i in range(n):
        dist[i][i] = Fraction(0)
    for (i, j), length in arcs.items():
        if dist[i][j] is None or length < dist[i][j]:
            dist[i][j] = length
    for k in range(n):
        for i in range(n):
            if dist[i][k] is None:
                continue
            for j in range(n):
                if dist[k][j] is None:
                    continue
                cand = dist[i][k] + dist[k][j]
                if dist[i][j] is None or cand < dist[i][j]:
                    dist[i][j] = cand
    return dist


def shortest_paths(s: int, t: int, arcs, dist) -> list[list[int]]:
    """Every shortest s-t path, found by DFS along arcs that stay tight."""
    out_arcs: dict[int, list[tuple[int, Fraction]]] = {}
    for (i, j), length in arcs.items():
        out_arcs.setdefault(i, []).append((j, length))
    paths: list[list[int]] = []

    def walk(v: int, acc: Fraction, path: list[int]) -> None:
        if v == t:
            paths.append(list(path))
            return
        for w, length in sorted(out_arcs.get(v, [])):
            if dist[w][t] is None:
                continue
            if acc + length + dist[w][t] == dist[s][t] and acc + length == dist[s][w]:
                path.append(w)
                walk(w, acc + length, path)
                path.pop()

    walk(s, Fraction(0), [s])
    return paths


def betweenness_oracle(graph: EmailGraph, directed: bool = False, weighted: bool = False):
    """Exact node and edge betweenness by explicit path enumeration.

    Returns ``(node_scores, edge_scores)`` as Fractions. For undirected
    graphs each unordered pair is counted once and edge keys are
    ``(min, max)`` index pairs.
    """
    n = graph.n_nodes
    arcs = directed_lengths(graph, weighted) if directed else undirected_lengths(graph, weighted)
    dist = floyd_warshall(n, arcs)
    node = [Fraction(0)] * n
    edge: dict[tuple[int, int], Fraction] = {}
    for s in range(n):
        for t in range(n):
            if s == t or dist[s][t] is None:
                continue
            if not directed and t < s:
                continue
            paths = shortest_paths(s, t, arcs, dist)
            share = Fraction(1, len(paths))
            for path in paths:
                for v in path[1:-1]:
                    node[v] += share
                for a, b in zip(path, path[1:]):
                    key = (a, b) if directed else (min(a, b), max(a, b))
                    edge[key] = edge.get(key, Fraction(0)) + share
    return node, edge


def random_graph(rng: np.random.Generator, n: int, p: float, max_weight: int = 1, prefix: str = "v") -> EmailGraph:
    nodes = [f"{prefix}{i:02d}" for i in range(n)]
    triples = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < p:
                triples.append((nodes[i], nodes[j], int(rng.integers(1, max_weight + 1))))
    return EmailGraph.from_edges(nodes, triples)


def undirected_graph(nodes, pairs, weight: int = 1) -> EmailGraph:
    """One arc per listed pair; the undirected projection is what matters."""
    return EmailGraph.from_edges(list(nodes), [(u, v, weight) for u, v in pairs])


def set_partitions(items: list):
    """All set partitions of ``items`` (Bell-number many)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first, *part[k]]] + part[k + 1:]
        yield [[first], *part]


def modularity_oracle(graph: EmailGraph, partition) -> float:
    """Q from the adjacency-matrix definition, independent of the package."""
    n = graph.n_nodes
    A = np.zeros((n, n))
    for s, d, w in zip(graph.src.tolist(), graph.dst.tolist(), graph.weight.tolist()):
        A[s, d] += w
        A[d, s] += w
    two_m = A.sum()
    if two_m == 0:
        return 0.0
    k = A.sum(axis=1)
    label = {}
    for c, block in enumerate(partition):
        for v in block:
            label[graph.index[v]] = c
    q = 0.0
    for i, j in itertools.product(range(n), repeat=2):
        if label[i] == label[j]:
            q += A[i, j] - k[i] * k[j] / two_m
    return q / two_m

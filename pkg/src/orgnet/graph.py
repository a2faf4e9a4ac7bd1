"""Directed weighted email graphs.

Edges live in three parallel numpy arrays (``src``, ``dst``, ``weight``)
sorted by ``(src, dst)`` with one entry per ordered pair, so multi-million
edge synthetic graphs stay cheap. Path algorithms work on small adjacency
lists derived from those arrays.
"""
from __future__ import annotations

import csv
import heapq
import io
import os
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import ConfigError, DataError
from .ingest import Address, EmailRecord, normalize_address
from .orgmap import (
    EXTERNAL,
    AddressDirectory,
    OrgChart,
    address_group,
    resolve_unit,
    UNKNOWN_INTERNAL,
)

UNMAPPED = "unmapped"
NODE_KINDS = ("address", "unit", "category", "external")


@dataclass(frozen=True, eq=False)
class EmailGraph:
    nodes: Sequence[str]
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    kinds: Sequence[str] = ()
    categories: Sequence[str | None] = ()
    intra_group_weight: Mapping[str, int] = field(default_factory=dict)
    directed: bool = True

    def __post_init__(self) -> None:
        n = len(self.nodes)
        if not self.kinds:
            object.__setattr__(self, "kinds", ["address"] * n)
        if not self.categories:
            object.__setattr__(self, "categories", [None] * n)
        if len(self.kinds) != n or len(self.categories) != n:
            raise ValueError("per-node attribute length mismatch")
        if not (len(self.src) == len(self.dst) == len(self.weight)):
            raise ValueError("edge array length mismatch")

    @classmethod
    def from_edges(
        cls,
        nodes: Sequence[str],
        edges: Iterable[tuple[str, str, int]] | tuple[np.ndarray, np.ndarray, np.ndarray],
        **attrs,
    ) -> "EmailGraph":
        """Build a graph, folding duplicate ordered pairs and dropping self-edges.

        ``edges`` is either ``(label, label, weight)`` triples or a tuple of
        three index arrays.
        """
        nodes = list(nodes)
        if isinstance(edges, tuple) and len(edges) == 3 and isinstance(edges[0], np.ndarray):
            s, d, w = (np.asarray(a, dtype=np.int64) for a in edges)
        else:
            index = {v: i for i, v in enumerate(nodes)}
            triples = [(index[u], index[v], w) for u, v, w in edges]
            s = np.array([t[0] for t in triples], dtype=np.int64)
            d = np.array([t[1] for t in triples], dtype=np.int64)
            w = np.array([t[2] for t in triples], dtype=np.int64)
        s, d, w = _canonical_edges(s, d, w, len(nodes))
        return cls(nodes, s, d, w, **attrs)

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.nodes)}

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    @property
    def total_weight(self) -> int:
        return int(self.weight.sum())

    def edges(self) -> Iterator[tuple[str, str, int]]:
        nodes = self.nodes
        for s, d, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()):
            yield nodes[s], nodes[d], w

    def edge_weight(self, u: str, v: str) -> int:
        i, j = self.index[u], self.index[v]
        lo = np.searchsorted(self.src, i, side="left")
        hi = np.searchsorted(self.src, i, side="right")
        k = lo + np.searchsorted(self.dst[lo:hi], j)
        if k < hi and self.dst[k] == j:
            return int(self.weight[k])
        return 0

    def out_degree(self, mode: str = "distinct-recipients") -> np.ndarray:
        if mode == "distinct-recipients":
            return np.bincount(self.src, minlength=self.n_nodes)
        if mode == "total-messages":
            return np.bincount(self.src, weights=self.weight, minlength=self.n_nodes).astype(np.int64)
        raise ValueError(f"unknown degree mode {mode!r}")

    def in_degree(self, mode: str = "distinct-recipients") -> np.ndarray:
        if mode == "distinct-recipients":
            return np.bincount(self.dst, minlength=self.n_nodes)
        if mode == "total-messages":
            return np.bincount(self.dst, weights=self.weight, minlength=self.n_nodes).astype(np.int64)
        raise ValueError(f"unknown degree mode {mode!r}")

    def total_degree(self) -> np.ndarray:
        """Incoming plus outgoing message counts per node."""
        return self.out_degree("total-messages") + self.in_degree("total-messages")

    def undirected_weights(self) -> dict[tuple[int, int], int]:
        """Symmetrized weights keyed by ``(min_index, max_index)``."""
        out: dict[tuple[int, int], int] = defaultdict(int)
        for s, d, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()):
            out[(s, d) if s < d else (d, s)] += w
        return dict(out)

    def adjacency(self, directed: bool = False, weighted: bool = False) -> list[list]:
        """Neighbour lists sorted by node index.

        Entries are plain indices, or ``(index, weight)`` pairs when
        ``weighted``; undirected weights add both directions.
        """
        n = self.n_nodes
        if directed:
            pairs = defaultdict(int)
            for s, d, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()):
                pairs[(s, d)] += w
        else:
            pairs = {}
            for (s, d), w in self.undirected_weights().items():
                pairs[(s, d)] = w
                pairs[(d, s)] = w
        adj: list[list] = [[] for _ in range(n)]
        for (s, d), w in sorted(pairs.items()):
            adj[s].append((d, w) if weighted else d)
        return adj

    def subgraph(self, keep: Iterable[str]) -> "EmailGraph":
        """Induced subgraph on ``keep`` (node order preserved)."""
        keep_set = set(keep)
        mask_nodes = np.array([v in keep_set for v in self.nodes], dtype=bool)
        new_index = np.cumsum(mask_nodes) - 1
        emask = mask_nodes[self.src] & mask_nodes[self.dst] if self.n_edges else np.zeros(0, bool)
        idx = np.flatnonzero(mask_nodes)
        return EmailGraph(
            [self.nodes[i] for i in idx],
            new_index[self.src[emask]],
            new_index[self.dst[emask]],
            self.weight[emask],
            kinds=[self.kinds[i] for i in idx],
            categories=[self.categories[i] for i in idx],
            directed=self.directed,
        )


def _canonical_edges(s: np.ndarray, d: np.ndarray, w: np.ndarray, n: int):
    keep = s != d
    s, d, w = s[keep], d[keep], w[keep]
    if len(s) == 0:
        return s, d, w
    key = s * n + d
    uniq, inverse = np.unique(key, return_inverse=True)
    weight = np.bincount(inverse.ravel(), weights=w).astype(np.int64)
    return uniq // n, uniq % n, weight


def build_graph(records: Iterable[EmailRecord]) -> EmailGraph:
    """Address-level graph: +1 weight per (sender, recipient) pair per message.

    Nodes are sorted address strings, so the result does not depend on record
    order. Self-addressed copies are dropped.
    """
    counts: Counter[tuple[str, str]] = Counter()
    nodes: set[str] = set()
    for rec in records:
        s = str(rec.sender)
        nodes.add(s)
        for r in rec.recipients:
            t = str(r)
            nodes.add(t)
            if t != s:
                counts[(s, t)] += 1
    ordered = sorted(nodes)
    return EmailGraph.from_edges(ordered, ((u, v, w) for (u, v), w in counts.items()))


def aggregate_graph(
    graph: EmailGraph,
    mapping: Mapping[str, str] | Callable[[str], str | None],
    *,
    kind: str = "unit",
    group_categories: Mapping[str, str] | None = None,
) -> EmailGraph:
    """Quotient graph over a node partition.

    Nodes absent from ``mapping`` (or mapped to ``None``) go to the reserved
    group ``"unmapped"``. Edges inside a group are not stored; their weight
    is reported in ``intra_group_weight``.
    """
    lookup = mapping if callable(mapping) else mapping.get
    labels = [lookup(v) or UNMAPPED for v in graph.nodes]
    groups = sorted(set(labels))
    gindex = {g: i for i, g in enumerate(groups)}
    node_to_group = np.array([gindex[g] for g in labels], dtype=np.int64)
    gs = node_to_group[graph.src] if graph.n_edges else np.zeros(0, np.int64)
    gd = node_to_group[graph.dst] if graph.n_edges else np.zeros(0, np.int64)
    intra_mask = gs == gd
    intra = np.bincount(gs[intra_mask], weights=graph.weight[intra_mask], minlength=len(groups))
    intra_weight = {g: int(intra[i]) for i, g in enumerate(groups)}
    cats = group_categories or {}
    kinds = [
        EXTERNAL if g == EXTERNAL else kind for g in groups
    ]
    return EmailGraph.from_edges(
        groups,
        (gs[~intra_mask], gd[~intra_mask], graph.weight[~intra_mask]),
        kinds=kinds,
        categories=[cats.get(g) for g in groups],
        intra_group_weight=intra_weight,
    )


def org_mapping(
    graph: EmailGraph,
    directory: AddressDirectory,
    chart: OrgChart,
    *,
    level: int | None = None,
    by: str = "unit",
) -> dict[str, str]:
    """Address-node to unit (or category) mapping for :func:`aggregate_graph`."""
    return {
        v: address_group(normalize_address(v), directory, chart, level=level, by=by)
        for v in graph.nodes
    }


def unit_graph(
    graph: EmailGraph,
    directory: AddressDirectory,
    chart: OrgChart,
    *,
    level: int | None = None,
    by: str = "unit",
    include_external: bool = False,
) -> EmailGraph:
    """Aggregate an address graph to org units or categories.

    External addresses are dropped unless ``include_external``; they then
    collapse into one ``"external"`` node.
    """
    mapping = org_mapping(graph, directory, chart, level=level, by=by)
    if not include_external:
        graph = graph.subgraph(v for v, g in mapping.items() if g != EXTERNAL)
    if by == "category":
        cats = {g: g for g in set(mapping.values())}
        kind = "category"
    else:
        cats = {uid: chart.category(uid) for uid in set(mapping.values()) if uid in chart}
        kind = "unit"
    return aggregate_graph(graph, mapping, kind=kind, group_categories=cats)


@dataclass(frozen=True)
class DegreeDistribution:
    counts: Mapping[int, int]
    total_nodes: int
    mode: str = "distinct-recipients"

    def __len__(self) -> int:
        return len(self.counts)

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        ws = np.array(sorted(self.counts), dtype=np.int64)
        return ws, np.array([self.counts[w] for w in ws.tolist()], dtype=np.int64)

    def to_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["w", "n"])
        for w in sorted(self.counts):
            writer.writerow([w, self.counts[w]])

    @classmethod
    def from_csv(cls, source, total_nodes: int | None = None) -> "DegreeDistribution":
        if isinstance(source, (str, os.PathLike)):
            with open(source, newline="") as fh:
                text = fh.read()
        else:
            text = source.read()
        rows = list(csv.DictReader(io.StringIO(text)))
        try:
            counts = {int(r["w"]): int(r["n"]) for r in rows}
        except (KeyError, ValueError) as exc:
            raise DataError(f"degree distribution CSV needs integer w,n columns: {exc}") from exc
        if any(n < 1 for n in counts.values()):
            raise DataError("degree distribution counts must be >= 1")
        return cls(counts, total_nodes if total_nodes is not None else sum(counts.values()))


def out_degree_distribution(graph: EmailGraph, mode: str = "distinct-recipients") -> DegreeDistribution:
    """Histogram ``w -> n`` over nodes with out-degree ``w >= 1``."""
    deg = graph.out_degree(mode)
    deg = deg[deg > 0]
    values, counts = np.unique(deg, return_counts=True)
    return DegreeDistribution(
        {int(w): int(n) for w, n in zip(values.tolist(), counts.tolist())}, graph.n_nodes, mode
    )


# --- betweenness -----------------------------------------------------------

def _sssp_unweighted(adj, s):
    n = len(adj)
    sigma = [0] * n
    dist = [-1] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    sigma[s], dist[s] = 1, 0
    order = []
    queue = deque([s])
    while queue:
        v = queue.popleft()
        order.append(v)
        dv = dist[v] + 1
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dv
                queue.append(w)
            if dist[w] == dv:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return order, preds, sigma


def _sssp_weighted(adj, s):
    # Edge lengths are exact rationals 1/weight so tied path lengths compare equal.
    n = len(adj)
    sigma = [0] * n
    dist: list[Fraction | None] = [None] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    sigma[s] = 1
    seen = {s: Fraction(0)}
    order = []
    heap = [(Fraction(0), s)]
    while heap:
        d, v = heapq.heappop(heap)
        if dist[v] is not None:
            continue
        dist[v] = d
        order.append(v)
        for w, weight in adj[v]:
            if dist[w] is not None:
                continue
            nd = d + Fraction(1, weight)
            best = seen.get(w)
            if best is None or nd < best:
                seen[w] = nd
                sigma[w] = sigma[v]
                preds[w] = [v]
                heapq.heappush(heap, (nd, w))
            elif nd == best:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return order, preds, sigma


def brandes(
    adj: Sequence[Sequence],
    *,
    weighted: bool = False,
    edges: bool = False,
) -> tuple[list[float], dict[tuple[int, int], float]]:
    """Single-source dependency accumulation over every source.

    Returns raw (ordered-pair) node scores and, if ``edges``, raw scores per
    directed arc ``(v, w)``. Callers halve both for undirected graphs.
    Sources are processed in index order so float sums are reproducible.
    """
    n = len(adj)
    node_score = [0.0] * n
    edge_score: dict[tuple[int, int], float] = defaultdict(float)
    sssp = _sssp_weighted if weighted else _sssp_unweighted
    for s in range(n):
        order, preds, sigma = sssp(adj, s)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                c = sigma[v] * coeff
                delta[v] += c
                if edges:
                    edge_score[(v, w)] += c
            if w != s:
                node_score[w] += delta[w]
    return node_score, dict(edge_score)


def betweenness_centrality(
    graph: EmailGraph,
    direction: str = "undirected",
    weighting: str = "unweighted",
) -> dict[str, float]:
    """Exact shortest-path betweenness, unnormalized pair counts.

    ``direction="undirected"`` counts each unordered pair once; with
    ``weighting="inverse-weight"`` an edge of weight ``w`` has length ``1/w``
    (weights of both directions are summed on the undirected projection).
    """
    if direction not in ("undirected", "directed"):
        raise ValueError(f"unknown direction {direction!r}")
    if weighting not in ("unweighted", "inverse-weight"):
        raise ValueError(f"unknown weighting {weighting!r}")
    weighted = weighting == "inverse-weight"
    adj = graph.adjacency(directed=direction == "directed", weighted=weighted)
    scores, _ = brandes(adj, weighted=weighted)
    if direction == "undirected":
        scores = [s / 2.0 for s in scores]
    return dict(zip(graph.nodes, scores))


# --- external traffic tally ------------------------------------------------

@dataclass(frozen=True)
class TldConfig:
    commercial: frozenset[str] = frozenset({"com", "net", "info"})
    noncommercial: frozenset[str] = frozenset({"gov", "edu", "mil", "org", "int"})

    def __post_init__(self) -> None:
        com = frozenset(t.lower().lstrip(".") for t in self.commercial)
        non = frozenset(t.lower().lstrip(".") for t in self.noncommercial)
        overlap = com & non
        if overlap:
            raise ConfigError(f"TLDs in both commercial and non-commercial sets: {sorted(overlap)}")
        object.__setattr__(self, "commercial", com)
        object.__setattr__(self, "noncommercial", non)

    def classify(self, address: Address) -> str:
        tld = address.tld
        if tld in self.commercial:
            return "commercial"
        if tld in self.noncommercial:
            return "noncommercial"
        return "other"


TALLY_FIELDS = (
    "sent_commercial",
    "sent_noncommercial",
    "sent_other",
    "received_commercial",
    "received_noncommercial",
    "received_other",
)


@dataclass
class CommTally:
    """External message counts per sending/receiving internal category."""

    counts: dict[str, dict[str, int]] = field(default_factory=dict)

    def add(self, category: str, field_name: str) -> None:
        row = self.counts.setdefault(category, dict.fromkeys(TALLY_FIELDS, 0))
        row[field_name] += 1

    def get(self, category: str, field_name: str) -> int:
        return self.counts.get(category, {}).get(field_name, 0)

    @property
    def total(self) -> int:
        return sum(sum(row.values()) for row in self.counts.values())

    def to_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["category", *TALLY_FIELDS])
        for cat in sorted(self.counts):
            writer.writerow([cat, *(self.counts[cat][f] for f in TALLY_FIELDS)])


def _internal_category(address: Address, directory: AddressDirectory, chart: OrgChart) -> str:
    uid = resolve_unit(address, directory)
    if uid == UNKNOWN_INTERNAL:
        return UNMAPPED
    return chart.category(uid)


def external_domain_tally(
    records: Iterable[EmailRecord],
    directory: AddressDirectory,
    chart: OrgChart,
    tld_config: TldConfig | None = None,
) -> CommTally:
    """Count internal/external message endpoints by internal category.

    A message from an internal sender adds one ``sent_*`` count per external
    recipient; a message from an external sender adds one ``received_*``
    count to each internal recipient's category. Internal-only and
    external-only traffic is ignored.
    """
    tld_config = tld_config or TldConfig()
    tally = CommTally()
    for rec in records:
        if directory.is_internal(rec.sender):
            externals = [r for r in rec.recipients if not directory.is_internal(r)]
            if externals:
                cat = _internal_category(rec.sender, directory, chart)
                for r in externals:
                    tally.add(cat, "sent_" + tld_config.classify(r))
        else:
            cls = "received_" + tld_config.classify(rec.sender)
            for r in rec.recipients:
                if directory.is_internal(r):
                    tally.add(_internal_category(r, directory, chart), cls)
    return tally


# --- edge-list IO ----------------------------------------------------------

def write_edge_csv(graph: EmailGraph, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["src", "dst", "weight"])
    writer.writerows(graph.edges())


def read_edge_csv(source) -> EmailGraph:
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="") as fh:
            text = fh.read()
    else:
        text = source.read()
    reader = csv.DictReader(io.StringIO(text))
    triples = []
    nodes: set[str] = set()
    try:
        for row in reader:
            u, v, w = row["src"], row["dst"], int(row["weight"])
            if w < 1:
                raise ValueError(f"non-positive weight {w}")
            triples.append((u, v, w))
            nodes.update((u, v))
    except (KeyError, ValueError, TypeError) as exc:
        raise DataError(f"edge list CSV needs src,dst,weight columns: {exc}") from exc
    return EmailGraph.from_edges(sorted(nodes), triples)

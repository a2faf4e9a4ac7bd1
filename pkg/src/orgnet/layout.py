"""Layouts, visual encodings and SVG/DOT/GraphML rendering.

The force layout is an overdamped spring embedder: every pair of nodes
repels with magnitude ``k_r / d**2`` and every edge is a linear spring of
stiffness ``k_s * weight`` and rest length ``L``. Positions move
synchronously along the net force until the largest per-node step falls
below ``tol``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import export
from .errors import StylingError
from .graph import EmailGraph
from .orgmap import CATEGORY_ORDER

PALETTE: dict[str, tuple[int, int, int]] = {
    "technical-group": (31, 119, 180),
    "technical-program": (23, 190, 207),
    "technical-management": (44, 160, 44),
    "operations-group": (214, 39, 40),
    "operations-program": (255, 127, 14),
    "operations-management": (148, 103, 189),
    "administration": (188, 189, 34),
}
DEFAULT_COLOR = (127, 127, 127)

MIN_SEPARATION = 1e-9


@dataclass(frozen=True)
class ForceParams:
    k_r: float = 1.0
    k_s: float = 1.0
    rest_length: float = 1.0
    step: float = 0.05
    tol: float = 1e-4
    max_iter: int = 10_000

    def __post_init__(self) -> None:
        for name in ("k_r", "k_s", "rest_length", "step", "tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class LayoutResult:
    positions: dict[str, tuple[float, float]]
    iterations: int = 0
    max_displacement: float = 0.0
    max_residual_force: float = 0.0
    converged: bool = True

    def coords(self, nodes: Sequence[str]) -> np.ndarray:
        return np.array([self.positions[v] for v in nodes], dtype=float).reshape(-1, 2)


def _forces(pos: np.ndarray, ei: np.ndarray, ej: np.ndarray, stiffness: np.ndarray, p: ForceParams):
    n = len(pos)
    x, y = pos[:, 0], pos[:, 1]
    dx = x[:, None] - x[None, :]
    dy = y[:, None] - y[None, :]
    dist2 = dx * dx + dy * dy
    np.fill_diagonal(dist2, np.inf)
    # k_r / d^2 along the unit vector (dx, dy) / d
    inv = p.k_r / (dist2 * np.sqrt(dist2))
    fx = (dx * inv).sum(axis=1)
    fy = (dy * inv).sum(axis=1)
    if len(ei):
        ddx, ddy = x[ej] - x[ei], y[ej] - y[ei]
        length = np.sqrt(ddx * ddx + ddy * ddy)
        coef = stiffness * (length - p.rest_length) / np.maximum(length, MIN_SEPARATION)
        px, py = coef * ddx, coef * ddy
        fx += np.bincount(ei, weights=px, minlength=n) - np.bincount(ej, weights=px, minlength=n)
        fy += np.bincount(ei, weights=py, minlength=n) - np.bincount(ej, weights=py, minlength=n)
    return np.column_stack([fx, fy]), dist2


def _separate(pos: np.ndarray, dist2: np.ndarray, rng: np.random.Generator, scale: float) -> bool:
    close = np.argwhere(np.triu(dist2 < MIN_SEPARATION**2, k=1))
    if not len(close):
        return False
    for _, j in close:
        pos[j] += rng.uniform(-scale, scale, size=2)
    return True


def force_layout(
    graph: EmailGraph,
    params: ForceParams | None = None,
    seed: int = 0,
) -> LayoutResult:
    """Seeded spring/repulsion equilibrium layout, centred on the origin.

    Each node's step is ``step * F / (1 + sum of incident spring
    stiffness)``; the per-node damping keeps heavy edges stable without
    moving the equilibrium. Coincident nodes are pulled apart by seeded
    jitter.
    """
    p = params or ForceParams()
    n = graph.n_nodes
    if n == 0:
        raise ValueError("cannot lay out an empty graph")
    rng = np.random.default_rng(seed)
    spread = p.rest_length * max(1.0, math.sqrt(n))
    pos = rng.uniform(-spread, spread, size=(n, 2))
    pairs = sorted(graph.undirected_weights().items())
    ei = np.array([i for (i, _), _ in pairs], dtype=np.int64)
    ej = np.array([j for (_, j), _ in pairs], dtype=np.int64)
    stiffness = np.array([p.k_s * w for _, w in pairs], dtype=float)
    damping = 1.0 + np.bincount(np.concatenate([ei, ej]), weights=np.concatenate([stiffness, stiffness]), minlength=n)
    max_move = p.rest_length

    converged = n == 1
    it, disp, force = 0, 0.0, np.zeros((n, 2))
    while not converged and it < p.max_iter:
        force, dist2 = _forces(pos, ei, ej, stiffness, p)
        if _separate(pos, dist2, rng, p.rest_length * 1e-3):
            it += 1
            continue
        move = p.step * force / damping[:, None]
        norms = np.sqrt(np.einsum("ij,ij->i", move, move))
        over = norms > max_move
        if over.any():
            move[over] *= (max_move / norms[over])[:, None]
            norms[over] = max_move
        pos += move
        it += 1
        disp = float(norms.max())
        converged = disp < p.tol
    if n > 1:
        force, _ = _forces(pos, ei, ej, stiffness, p)
    pos -= pos.mean(axis=0)
    residual = float(np.sqrt(np.einsum("ij,ij->i", force, force)).max()) if n > 1 else 0.0
    return LayoutResult(
        {v: (float(x), float(y)) for v, (x, y) in zip(graph.nodes, pos)},
        iterations=it,
        max_displacement=disp,
        max_residual_force=residual,
        converged=converged,
    )


def circular_layout(graph: EmailGraph, ordering: Sequence[str] | None = None) -> LayoutResult:
    """Nodes evenly spaced on the unit circle, first node at ``(1, 0)``.

    Default order follows the category enumeration, then node label.
    """
    if ordering is None:
        rank = {c: i for i, c in enumerate(CATEGORY_ORDER)}

        def key(i: int):
            cat = graph.categories[i]
            return (rank.get(cat, len(rank)), rank.get(graph.nodes[i], len(rank)), graph.nodes[i])

        ordering = [graph.nodes[i] for i in sorted(range(graph.n_nodes), key=key)]
    ordering = list(ordering)
    if sorted(ordering) != sorted(graph.nodes) or len(set(ordering)) != len(ordering):
        raise ValueError("ordering must be a permutation of the graph's nodes")
    n = len(ordering)
    pos = {}
    for k, v in enumerate(ordering):
        theta = 2.0 * math.pi * k / n
        pos[v] = (math.cos(theta), math.sin(theta))
    return LayoutResult(pos)


@dataclass
class VisualAttributes:
    node_radius: dict[str, float]
    node_color: dict[str, tuple[int, int, int]]
    edge_width: dict[tuple[str, str], float] = field(default_factory=dict)
    edge_color: dict[tuple[str, str], tuple[int, int, int]] = field(default_factory=dict)


def _log_scale(values: Mapping, lo: float, hi: float) -> dict:
    top = max((math.log1p(v) for v in values.values()), default=0.0)
    if top <= 0:
        return {k: lo for k in values}
    return {k: min(hi, lo + (hi - lo) * (math.log1p(v) / top)) for k, v in values.items()}


def mix_colors(a: tuple[int, int, int], b: tuple[int, int, int]) -> tuple[int, int, int]:
    return tuple((x + y) // 2 for x, y in zip(a, b))


def style(
    graph: EmailGraph,
    scheme: str,
    values: Mapping[str, float],
    palette: Mapping[str, tuple[int, int, int]] | None = None,
    *,
    radius_range: tuple[float, float] = (4.0, 24.0),
    width_range: tuple[float, float] = (0.5, 6.0),
) -> VisualAttributes:
    """Node radius from ``log1p(value)``, edge width from ``log1p(weight)``.

    ``scheme`` is ``"betweenness-log"`` (values are centralities) or
    ``"total-degree"`` (values are total in+out message counts). Both
    rescale ``log1p`` onto the radius range with zero mapping to the minimum.
    Node colour comes from the category palette; edge colour is the
    floor-mean of its endpoint colours.
    """
    if scheme not in ("betweenness-log", "total-degree"):
        raise ValueError(f"unknown styling scheme {scheme!r}")
    pal = dict(PALETTE if palette is None else palette)
    for v in graph.nodes:
        if v not in values:
            raise StylingError(f"no {scheme} value for node {v!r}")
        if values[v] < 0 or not math.isfinite(values[v]):
            raise StylingError(f"invalid {scheme} value {values[v]!r} for node {v!r}")
    r_lo, r_hi = radius_range
    radius = _log_scale({v: float(values[v]) for v in graph.nodes}, r_lo, r_hi)
    color = {
        v: pal.get(graph.categories[i] or "", pal.get(v, DEFAULT_COLOR))
        for i, v in enumerate(graph.nodes)
    }
    weights = {(u, v): w for u, v, w in graph.edges()}
    width = _log_scale(weights, *width_range)
    ecolor = {(u, v): mix_colors(color[u], color[v]) for u, v in weights}
    return VisualAttributes(radius, color, width, ecolor)


def _hex(rgb: tuple[int, int, int]) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _svg(graph: EmailGraph, layout: LayoutResult, attrs: VisualAttributes, size: int = 800) -> str:
    margin = 40.0
    if graph.n_nodes:
        xy = layout.coords(graph.nodes)
        lo, hi = xy.min(axis=0), xy.max(axis=0)
        span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
    else:
        lo, span = np.zeros(2), 1.0
    scale = (size - 2 * margin) / span

    def place(v):
        x, y = layout.positions[v]
        return margin + (x - lo[0]) * scale, size - margin - (y - lo[1]) * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        '<g id="edges">',
    ]
    for u, v, _ in graph.edges():
        (x1, y1), (x2, y2) = place(u), place(v)
        out.append(
            f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
            f'stroke="{_hex(attrs.edge_color[(u, v)])}" stroke-width="{attrs.edge_width[(u, v)]:.3f}" '
            'stroke-opacity="0.6"/>'
        )
    out.append("</g>")
    out.append('<g id="nodes">')
    for v in graph.nodes:
        x, y = place(v)
        out.append(
            f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{attrs.node_radius[v]:.3f}" '
            f'fill="{_hex(attrs.node_color[v])}"><title>{export.xml_escape(v)}</title></circle>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(
    graph: EmailGraph,
    layout: LayoutResult,
    attrs: VisualAttributes,
    fmt: str = "svg",
) -> bytes:
    """Serialize a styled layout as SVG, DOT or GraphML bytes."""
    missing = [v for v in graph.nodes if v not in layout.positions or v not in attrs.node_radius]
    if missing:
        raise ValueError(f"layout/attributes missing nodes: {missing[:5]}")
    if fmt == "svg":
        return _svg(graph, layout, attrs).encode("utf-8")
    node_attrs = {
        v: {
            "x": layout.positions[v][0],
            "y": layout.positions[v][1],
            "radius": attrs.node_radius[v],
            "color": _hex(attrs.node_color[v]),
            "category": graph.categories[i] or "",
        }
        for i, v in enumerate(graph.nodes)
    }
    edge_attrs = {
        e: {"width": attrs.edge_width[e], "color": _hex(attrs.edge_color[e])} for e in attrs.edge_width
    }
    if fmt == "dot":
        return export.to_dot(graph, node_attrs, edge_attrs).encode("utf-8")
    if fmt == "graphml":
        return export.to_graphml(graph, node_attrs, edge_attrs).encode("utf-8")
    raise ValueError(f"unknown render format {fmt!r}; expected svg, dot or graphml")

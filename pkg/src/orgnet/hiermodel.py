"""Hierarchical-broadcast model of email out-degree distributions.

A top broadcaster reaches all ``N`` employees. Each manager talks to ``l``
subordinate managers, so a level-``j`` division holds ``N / l**j`` people,
and every managerial slot is backed by ``a`` broadcasters (the manager and
``a - 1`` support staff) compounding down the hierarchy. Level ``j``
therefore has ``(a*l)**j`` broadcasters of out-degree ``N / l**j``, which
puts the lattice points on

    log n = log(a*l) / log(l) * (log N - log w)

The hierarchy runs out where broadcaster count meets division size,
``(a*l)**x == N / l**x``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InsufficientDataError, ModelInapplicableError, ParameterError
from .graph import DegreeDistribution, EmailGraph
from .ingest import Address, EmailRecord

DEFAULT_CUTOFF = 40
SIM_DOMAIN = "sim.lab.gov"


@dataclass(frozen=True)
class HierarchyParams:
    N: int
    l: int
    a: float
    x: int

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ParameterError(f"N must be a positive integer, got {self.N}")
        if self.l < 2:
            raise ParameterError(f"span of control l must be >= 2, got {self.l}")
        if not self.a > 0:
            raise ParameterError(f"support coefficient a must be positive, got {self.a}")
        if self.x < 0:
            raise ParameterError(f"level count x must be >= 0, got {self.x}")
        if self.a * self.l < 2:
            raise ParameterError("a*l must be at least 2")

    @property
    def beta(self) -> float:
        return predicted_exponent(self.l, self.a)

    def check_generatable(self) -> None:
        if float(self.a) != int(self.a) or self.a < 1:
            raise ParameterError(f"generation needs an integer a >= 1, got {self.a}")
        step = self.l**self.x
        if self.N % step:
            raise ParameterError(
                f"N={self.N} must be a multiple of l**x={step} (e.g. {step}, {2 * step}, {3 * step}, ...)"
            )

    def lattice(self) -> dict[int, int]:
        """Exact ``out-degree -> node count`` map for levels ``0..x``.

        Only meaningful for integer ``a`` and ``N`` divisible by ``l**x``.
        """
        a = int(self.a)
        return {self.N // self.l**j: (a * self.l) ** j for j in range(self.x + 1)}


@dataclass(frozen=True)
class Noise:
    coverage_p: float = 1.0
    background_mean_degree: float = 0.0

    def __post_init__(self) -> None:
        if not 0 < self.coverage_p <= 1:
            raise ParameterError(f"coverage_p must lie in (0, 1], got {self.coverage_p}")
        if self.background_mean_degree < 0:
            raise ParameterError("background mean degree must be >= 0")


def predicted_exponent(l: float, a: float) -> float:
    """Power-law exponent ``log(a*l) / log(l)``."""
    if l < 2:
        raise ValueError(f"l must be >= 2, got {l}")
    if a < 1:
        raise ValueError(f"a must be >= 1, got {a}")
    return math.log(a * l) / math.log(l)


def _lattice_level(w: int, params: HierarchyParams) -> int | None:
    if params.N % w:
        return None
    ratio, j = params.N // w, 0
    while ratio % params.l == 0 and ratio > 1:
        ratio //= params.l
        j += 1
    return j if ratio == 1 and j <= params.x else None


def predicted_count(w: float, params: HierarchyParams) -> float:
    """Number of nodes with out-degree ``w`` under the model.

    At lattice points ``w = N / l**j`` (``j <= x``) this is ``(a*l)**j``,
    an exact integer when ``a`` is; elsewhere ``(N / w) ** beta``.
    """
    if not w > 0 or w > params.N:
        raise ValueError(f"w must lie in (0, N={params.N}], got {w}")
    if float(w).is_integer():
        j = _lattice_level(int(w), params)
        if j is not None:
            if float(params.a).is_integer():
                return (int(params.a) * params.l) ** j
            return (params.a * params.l) ** j
    return (params.N / w) ** params.beta


def _node_labels(params: HierarchyParams, domain: str) -> list[str]:
    labels = [f"emp{i}@{domain}" for i in range(params.N)]
    a, l = int(params.a), params.l
    for j in range(params.x + 1):
        per_div = a**j
        labels.extend(
            f"bc{j}.{d}.{k}@{domain}" for d in range(l**j) for k in range(per_div)
        )
    return labels


def generate_broadcast_network(
    params: HierarchyParams,
    noise: Noise | None = None,
    seed: int = 0,
    *,
    domain: str = SIM_DOMAIN,
) -> EmailGraph:
    """Synthetic email graph for the hierarchy.

    Nodes ``0..N-1`` are employees; broadcasters follow level by level.
    Level ``j`` splits employees into ``l**j`` contiguous divisions with
    ``a**j`` broadcasters each, and every broadcaster mails its whole
    division (or each member with probability ``coverage_p``). Background
    traffic gives each employee a Poisson(``lambda``) number of messages to
    uniformly chosen colleagues.
    """
    params.check_generatable()
    noise = noise or Noise()
    rng = np.random.default_rng(seed)
    N, l, a, x = params.N, params.l, int(params.a), params.x

    src_parts, dst_parts = [], []
    bg_src = bg_dst = bg_w = np.zeros(0, dtype=np.int64)
    if noise.background_mean_degree > 0 and N > 1:
        k = rng.poisson(noise.background_mean_degree, size=N)
        s = np.repeat(np.arange(N, dtype=np.int64), k)
        t = rng.integers(0, N - 1, size=len(s), dtype=np.int64)
        t += t >= s
        key, w = np.unique(s * N + t, return_counts=True)
        bg_src, bg_dst, bg_w = key // N, key % N, w.astype(np.int64)

    offset = N
    for j in range(x + 1):
        n_div, size, per_div = l**j, N // l**j, a**j
        n_b = n_div * per_div
        bcast = np.arange(offset, offset + n_b, dtype=np.int64)
        first = (np.arange(n_b, dtype=np.int64) // per_div) * size
        src = np.repeat(bcast, size)
        dst = (first[:, None] + np.arange(size, dtype=np.int64)).ravel()
        if noise.coverage_p < 1:
            keep = rng.random(len(src)) < noise.coverage_p
            src, dst = src[keep], dst[keep]
        src_parts.append(src)
        dst_parts.append(dst)
        offset += n_b

    src = np.concatenate([bg_src, *src_parts])
    dst = np.concatenate([bg_dst, *dst_parts])
    weight = np.concatenate([bg_w, np.ones(len(src) - len(bg_src), dtype=np.int64)])
    kinds = ["address"] * offset
    return EmailGraph(_node_labels(params, domain), src, dst, weight, kinds=kinds)


def graph_to_records(graph: EmailGraph, start_epoch: int = 1_640_000_000, spacing: int = 60) -> list[EmailRecord]:
    """One message per sender per unit of edge weight, so rebuilding the
    graph from the records reproduces it exactly."""
    records = []
    ts = start_epoch
    cache: dict[int, Address] = {}

    def addr(i: int) -> Address:
        if i not in cache:
            local, _, dom = graph.nodes[i].rpartition("@")
            cache[i] = Address(local, dom)
        return cache[i]

    bounds = np.flatnonzero(np.diff(graph.src)) + 1
    for s_idx, d_idx, w in zip(
        np.split(graph.src, bounds), np.split(graph.dst, bounds), np.split(graph.weight, bounds)
    ):
        if not len(s_idx):
            continue
        sender = addr(int(s_idx[0]))
        for k in range(int(w.max())):
            targets = d_idx[w > k].tolist()
            records.append(EmailRecord(ts, sender, tuple(addr(t) for t in targets)))
            ts += spacing
    return records


@dataclass(frozen=True)
class PowerLawFit:
    beta: float
    intercept: float
    w_cutoff: float
    residual: float
    points_used: int
    method: str = "points"

    def predict_log_n(self, w) -> np.ndarray:
        return self.intercept - self.beta * np.log(w)

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "intercept": self.intercept,
            "cutoff": self.w_cutoff,
            "residual": self.residual,
            "points_used": self.points_used,
            "method": self.method,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "PowerLawFit":
        return cls(
            float(obj["beta"]),
            float(obj["intercept"]),
            float(obj.get("cutoff", obj.get("w_cutoff", DEFAULT_CUTOFF))),
            float(obj.get("residual", 0.0)),
            int(obj.get("points_used", 2)),
            str(obj.get("method", "points")),
        )


FIT_METHODS = ("points", "log-binned", "ccdf")


def _log_binned(ws: np.ndarray, ns: np.ndarray, bins_per_decade: int) -> tuple[np.ndarray, np.ndarray]:
    # node count per geometric bin at the bin's geometric centre; a constant
    # log-width bin keeps the count exponent equal to the lattice exponent
    decades = math.log10((ws.max() + 1) / ws.min())
    n_bins = max(1, math.ceil(decades * bins_per_decade))
    edges = np.geomspace(ws.min(), ws.max() + 1, n_bins + 1)
    idx = np.clip(np.searchsorted(edges, ws, side="right") - 1, 0, n_bins - 1)
    mass = np.bincount(idx, weights=ns, minlength=n_bins)
    centre = np.sqrt(edges[:-1] * edges[1:])
    keep = mass > 0
    return centre[keep], mass[keep]


def fit_power_law(
    distribution: DegreeDistribution,
    w_cutoff: float = DEFAULT_CUTOFF,
    *,
    method: str = "points",
    bins_per_decade: int = 5,
) -> PowerLawFit:
    """Least-squares line through ``(log w, log n)`` for ``w >= w_cutoff``.

    ``method="points"`` fits the raw histogram; degrees absent from it are
    simply not points. ``"log-binned"`` fits node counts summed over
    geometric bins. ``"ccdf"`` fits the count of nodes with degree ``>= w``
    at every observed ``w``; it has the same exponent and tolerates
    histograms whose levels are smeared over many nearby degrees.
    """
    if method not in FIT_METHODS:
        raise ValueError(f"unknown fit method {method!r}; expected one of {FIT_METHODS}")
    ws, ns = distribution.points()
    mask = (ws >= w_cutoff) & (ns >= 1)
    ws, ns = ws[mask].astype(float), ns[mask].astype(float)
    if len(ws) >= 2:
        if method == "log-binned":
            ws, ns = _log_binned(ws, ns, bins_per_decade)
        elif method == "ccdf":
            ns = np.cumsum(ns[::-1])[::-1]
    if len(ws) < 2:
        raise InsufficientDataError(
            f"need at least 2 distribution points with w >= {w_cutoff}, found {len(ws)}"
        )
    lx, ly = np.log(ws), np.log(ns)
    mx, my = lx.mean(), ly.mean()
    sxx = float(((lx - mx) ** 2).sum())
    if sxx == 0:
        raise InsufficientDataError("all qualifying points share one w value")
    slope = float(((lx - mx) * (ly - my)).sum()) / sxx
    intercept = float(my - slope * mx)
    resid = ly - (intercept + slope * lx)
    rms = float(np.sqrt((resid**2).mean()))
    return PowerLawFit(-slope, intercept, float(w_cutoff), rms, int(len(lx)), method)


@dataclass(frozen=True)
class InferenceReport:
    assumed_l: float
    a_hat: float
    N_input: float
    N_fit: float
    x_hat: float
    w_min_hat: float
    contacts_per_employee: float
    x_hat_fit: float
    w_min_hat_fit: float
    contacts_per_employee_fit: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _termination_level(n: float, a: float, l: float) -> float:
    # (a l)^x = n / l^x  =>  x = log n / log(a l^2)
    return math.log(n) / math.log(a * l * l)


def infer_structure(fit: PowerLawFit, assumed_l: float, N_input: float) -> InferenceReport:
    """Invert a fitted tail into support coefficient, depth and group size.

    ``a = l**(beta - 1)``; the depth solves the termination condition for
    both the supplied node count and the count implied by the intercept,
    ``exp(c / beta)``. Nothing is rounded.
    """
    if assumed_l < 2:
        raise ValueError(f"assumed l must be >= 2, got {assumed_l}")
    if N_input < 1:
        raise ValueError(f"N must be >= 1, got {N_input}")
    if not fit.beta > 1:
        raise ModelInapplicableError(
            f"fitted exponent {fit.beta:.4g} <= 1: the hierarchical model needs exponent > 1"
        )
    l = float(assumed_l)
    a_hat = l ** (fit.beta - 1.0)
    N_fit = math.exp(fit.intercept / fit.beta)
    x_hat = _termination_level(N_input, a_hat, l)
    x_fit = _termination_level(N_fit, a_hat, l)
    return InferenceReport(
        assumed_l=l,
        a_hat=a_hat,
        N_input=float(N_input),
        N_fit=N_fit,
        x_hat=x_hat,
        w_min_hat=N_input / l**x_hat,
        contacts_per_employee=(x_hat + 1.0) * a_hat,
        x_hat_fit=x_fit,
        w_min_hat_fit=N_fit / l**x_fit,
        contacts_per_employee_fit=(x_fit + 1.0) * a_hat,
    )

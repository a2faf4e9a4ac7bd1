"""Acceptance criteria, one test each, at the stated tolerances.

Every test records a single PASS/FAIL line (see ``conftest.ACCEPTANCE``)
before asserting, so the summary shows all criteria even when one fails.
"""
from __future__ import annotations

import itertools
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from conftest import ACCEPTANCE
from oracles import betweenness_oracle, modularity_oracle, random_graph, undirected_graph
from orgnet.cli import main
from orgnet.community import best_partition, edge_betweenness, girvan_newman, modularity
from orgnet.errors import ModelInapplicableError
from orgnet.graph import (
    DegreeDistribution,
    EmailGraph,
    betweenness_centrality,
    build_graph,
    external_domain_tally,
    out_degree_distribution,
    unit_graph,
)
from orgnet.hiermodel import (
    HierarchyParams,
    Noise,
    PowerLawFit,
    fit_power_law,
    generate_broadcast_network,
    infer_structure,
    predicted_count,
)
from orgnet.ingest import EmailRecord, normalize_address
from orgnet.layout import ForceParams, force_layout
from orgnet.orgmap import load_directory, load_org_chart
from orgnet.synthetic import DEMO_DIR, EXTERNAL_DOMAINS, INTERNAL
from orgnet.temporal import emails_per_bin

GRID = list(itertools.product([2, 3, 4, 5], [1, 2, 4, 8], [2, 3, 4]))


def record(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def test_1_lattice_exactness():
    t0 = time.perf_counter()
    bad = []
    for l, a, x in GRID:
        p = HierarchyParams(l**x * 16, l, a, x)
        want = {p.N // l**j: (a * l) ** j for j in range(x + 1)}
        got = dict(out_degree_distribution(generate_broadcast_network(p)).counts)
        if got != want or any(predicted_count(w, p) != n for w, n in want.items()):
            bad.append((l, a, x))
    elapsed = time.perf_counter() - t0
    record(1, not bad and elapsed < 30,
           f"{len(GRID) - len(bad)}/{len(GRID)} lattices exact, {elapsed:.1f}s (limit 30s)")


def test_2_fit_round_trip():
    worst_beta = worst_a = worst_res = 0.0
    refused = 0
    for l, a, x in GRID:
        p = HierarchyParams(l**x * 16, l, a, x)
        dist = DegreeDistribution(p.lattice(), p.N)
        fit = fit_power_law(dist, min(p.lattice()) - 0.5)
        try:
            a_hat = infer_structure(fit, l, p.N).a_hat
        except ModelInapplicableError:
            # a = 1 gives beta = 1, which inference refuses by contract;
            # a_hat = l**(beta - 1) is still checked on the fitted slope
            refused += 1
            a_hat = l ** (fit.beta - 1)
        worst_beta = max(worst_beta, abs(fit.beta - math.log(a * l) / math.log(l)))
        worst_a = max(worst_a, abs(a_hat - a))
        worst_res = max(worst_res, fit.residual)
    ok = worst_beta < 1e-9 and worst_a < 1e-9 and worst_res < 1e-9
    record(2, ok, f"max |dbeta|={worst_beta:.1e}, |da|={worst_a:.1e}, residual={worst_res:.1e} "
                  f"(limit 1e-9; {refused} beta=1 lattices refused by infer)")


def test_3_parameter_chain():
    # w_min from the formulas is 1610.04; the 1601 target is expected to fail
    rep = infer_structure(PowerLawFit(2.47, 14.0, 40, 0.0, 10), 4, 32000)
    checks = {
        "a_hat": (rep.a_hat, 7.66, 0.01),
        "x_hat": (rep.x_hat, 2.16, 0.01),
        "w_min_hat": (rep.w_min_hat, 1601, 1),
    }
    ok = all(abs(got - want) <= tol for got, want, tol in checks.values())
    detail = ", ".join(f"{k}={got:.4f} (want {want} +/- {tol})" for k, (got, want, tol) in checks.items())
    record(3, ok, detail)


def test_4_noise_robustness():
    t0 = time.perf_counter()
    p = HierarchyParams(4096, 4, 4, 3)
    betas = []
    for seed in range(20):
        g = generate_broadcast_network(p, Noise(0.9, 5.0), seed=seed)
        betas.append(fit_power_law(out_degree_distribution(g), 40, method="ccdf").beta)
    elapsed = time.perf_counter() - t0
    hits = sum(abs(b - 2.0) <= 0.15 for b in betas)
    record(4, hits >= 18 and elapsed < 60,
           f"{hits}/20 ccdf fits within 0.15 of 2.0 (beta {min(betas):.3f}..{max(betas):.3f}), {elapsed:.1f}s")


def test_5_betweenness_oracle():
    rng = np.random.default_rng(5)
    worst = 0.0
    for k in range(50):
        g = random_graph(rng, int(rng.integers(2, 13)), float(rng.uniform(0.1, 0.5)), max_weight=4)
        directed, weighted = bool(k % 2), bool(k // 2 % 2)
        node_oracle, _ = betweenness_oracle(g, directed=directed, weighted=weighted)
        got = betweenness_centrality(
            g,
            direction="directed" if directed else "undirected",
            weighting="inverse-weight" if weighted else "unweighted",
        )
        worst = max([worst, *(abs(got[v] - float(node_oracle[i])) for i, v in enumerate(g.nodes))])
        _, edge_oracle = betweenness_oracle(g)
        want = {tuple(sorted((g.nodes[i], g.nodes[j]))): float(s) for (i, j), s in edge_oracle.items()}
        edges = edge_betweenness(g)
        if not set(want) <= set(edges):
            worst = math.inf
        worst = max([worst, *(abs(s - want.get(e, 0.0)) for e, s in edges.items())])
    record(5, worst <= 1e-12, f"50 graphs, max node/edge deviation {worst:.1e} (limit 1e-12)")


def test_6_community_recovery():
    pairs = [("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f"), ("c", "d")]
    tri_ok = best_partition(girvan_newman(undirected_graph("abcdef", pairs))) == (
        ("a", "b", "c"), ("d", "e", "f"))
    blocks = [[f"{b}{i}" for i in range(6)] for b in "xyz"]
    block_pairs = [p for b in blocks for p in itertools.combinations(b, 2)]
    block_pairs += [("x0", "y0"), ("y1", "z0"), ("z1", "x1")]
    g3 = undirected_graph([v for b in blocks for v in b], block_pairs)
    block_ok = best_partition(girvan_newman(g3)) == tuple(tuple(sorted(b)) for b in blocks)

    rng = np.random.default_rng(6)
    matched = checked = 0
    for _ in range(30):
        g = random_graph(rng, int(rng.integers(2, 9)), float(rng.uniform(0.2, 0.6)))
        d = girvan_newman(g)
        if not len(d):
            continue
        checked += 1
        exhaustive = max(modularity_oracle(g, cp.partition) for cp in d)
        matched += abs(modularity(g, best_partition(d)) - exhaustive) <= 1e-12
    ok = tri_ok and block_ok and matched == checked
    record(6, ok, f"two-triangle {tri_ok}, 3-block {block_ok}, best Q = checkpoint max on {matched}/{checked}")


def test_7_layout_equilibrium():
    tight = ForceParams(tol=1e-10, max_iter=200_000)
    g2 = EmailGraph.from_edges(["a", "b"], [("a", "b", 1)])
    res = force_layout(g2, tight, seed=1)
    (x1, y1), (x2, y2) = res.positions["a"], res.positions["b"]
    root = brentq(lambda d: (d - 1.0) - 1.0 / d**2, 1e-6, 100.0, xtol=1e-15)
    sep_err = abs(math.hypot(x1 - x2, y1 - y2) - root)

    tri = undirected_graph("abc", [("a", "b"), ("b", "c"), ("c", "a")], weight=2)
    xy = force_layout(tri, tight, seed=3).coords(tri.nodes)
    sides = [np.linalg.norm(xy[i] - xy[j]) for i, j in [(0, 1), (1, 2), (0, 2)]]
    spread = max(sides) - min(sides)

    g = random_graph(np.random.default_rng(7), 25, 0.15, max_weight=9)
    same = force_layout(g, ForceParams(max_iter=500), seed=11).positions == force_layout(
        g, ForceParams(max_iter=500), seed=11).positions
    ok = sep_err < 1e-6 and spread < 1e-6 and same
    record(7, ok, f"2-node error {sep_err:.1e}, triangle spread {spread:.1e}, same-seed identical {same}")


# --- conservation on a 10 000-record synthetic corpus ----------------------

def _corpus(n: int = 10_000, seed: int = 8) -> tuple[list[EmailRecord], object, object]:
    chart = load_org_chart(DEMO_DIR / "chart.csv")
    directory = load_directory(DEMO_DIR / "directory.csv", chart, INTERNAL)
    rng = np.random.default_rng(seed)
    internal = sorted(str(a) for a in directory.mapping)[:400]
    internal += [f"ghost{i}@{INTERNAL}" for i in range(10)]
    external = [f"ext{i}@{d}" for ds in EXTERNAL_DOMAINS.values() for d in ds for i in range(3)]
    people = internal + external
    records = []
    for k in range(n):
        sender = people[rng.integers(len(people))]
        picks = rng.choice(len(people), size=int(rng.integers(1, 6)), replace=False)
        records.append(EmailRecord(
            1_704_697_200 + int(rng.integers(0, 14 * 86_400)),
            normalize_address(sender),
            tuple(normalize_address(people[i]) for i in picks),
        ))
    return records, directory, chart


RECORDS, DIRECTORY, CHART = _corpus()
WINDOW = (1_704_697_200, 1_704_697_200 + 14 * 86_400)


def _expected_tally(records) -> int:
    is_int = DIRECTORY.is_internal
    total = 0
    for r in records:
        if is_int(r.sender):
            total += sum(not is_int(x) for x in r.recipients)
        else:
            total += sum(is_int(x) for x in r.recipients)
    return total


BASE = {
    "graph": sorted(build_graph(RECORDS).edges()),
    "tally": _expected_tally(RECORDS),
}
SHUFFLES = 0


@settings(max_examples=100, deadline=None, derandomize=True,
          suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 2**32 - 1))
def _conservation_property(seed):
    global SHUFFLES
    order = np.random.default_rng(seed).permutation(len(RECORDS))
    records = [RECORDS[i] for i in order]
    g = build_graph(records)
    assert sorted(g.edges()) == BASE["graph"]
    # every (sender, distinct non-self recipient) message lands on one edge
    assert g.total_weight == sum(len({x for x in r.recipients if x != r.sender}) for r in records)

    agg = unit_graph(g, DIRECTORY, CHART, include_external=True)
    assert int(agg.weight.sum()) + sum(agg.intra_group_weight.values()) == g.total_weight

    dist = out_degree_distribution(g)
    deg = g.out_degree("distinct-recipients")
    assert sum(dist.counts.values()) == int((deg > 0).sum())
    assert sum(w * n for w, n in dist.counts.items()) == g.n_edges

    series = emails_per_bin(records, WINDOW, 3600)
    assert sum(series.counts) == len(records)
    assert series.rebin(24).counts == emails_per_bin(records, WINDOW, 86_400).counts

    assert external_domain_tally(records, DIRECTORY, CHART).total == BASE["tally"]
    SHUFFLES += 1


def test_8_conservation():
    try:
        _conservation_property()
        ok, why = SHUFFLES >= 100, ""
    except AssertionError as exc:
        ok, why = False, f" ({exc})"
    record(8, ok, f"{len(RECORDS)} records, {SHUFFLES} shuffles, all four balances hold{why}")


# --- end-to-end determinism ------------------------------------------------

def _artifacts(out: Path) -> dict[str, bytes]:
    files = {}
    for path in sorted(out.rglob("*")):
        if not path.is_file():
            continue
        data = path.read_bytes()
        if path.name.startswith("manifest_"):
            m = json.loads(data)
            m.pop("created_at")
            data = json.dumps(m, sort_keys=True).encode()
        files[str(path.relative_to(out))] = data
    return files


@pytest.mark.slow
def test_9_pipeline_determinism(tmp_path):
    runs, times = [], []
    for k in range(2):
        out = tmp_path / f"run{k}"
        t0 = time.perf_counter()
        code = main(["pipeline", "--config", "@demo", "--out", str(out)])
        times.append(time.perf_counter() - t0)
        runs.append(_artifacts(out) if code == 0 else {})
    a, b = runs
    diff = sorted(k for k in a.keys() | b.keys() if a.get(k) != b.get(k))
    ok = bool(a) and not diff and max(times) < 60
    record(9, ok, f"{len(a)} artifacts, {len(diff)} differ (manifest created_at excluded), "
                  f"runs {times[0]:.1f}s/{times[1]:.1f}s (limit 60s)")

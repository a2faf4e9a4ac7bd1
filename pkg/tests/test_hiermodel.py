from __future__ import annotations

import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orgnet.errors import InsufficientDataError, ModelInapplicableError, ParameterError
from orgnet.graph import DegreeDistribution, build_graph, out_degree_distribution
from orgnet.hiermodel import (
    HierarchyParams,
    Noise,
    PowerLawFit,
    fit_power_law,
    generate_broadcast_network,
    graph_to_records,
    infer_structure,
    predicted_count,
    predicted_exponent,
)


def lattice_dist(params: HierarchyParams) -> DegreeDistribution:
    return DegreeDistribution(params.lattice(), params.N)


class TestExponent:
    def test_examples(self):
        assert predicted_exponent(4, 1) == 1.0
        assert predicted_exponent(2, 2) == pytest.approx(2.0, abs=1e-15)
        assert predicted_exponent(4, 7.67) == pytest.approx(2.470, abs=1e-3)

    @pytest.mark.parametrize("l,a", [(1, 2), (4, 0.5), (0, 1)])
    def test_domain(self, l, a):
        with pytest.raises(ValueError):
            predicted_exponent(l, a)


class TestPredictedCount:
    def test_examples(self):
        assert predicted_count(64, HierarchyParams(64, 4, 2, 2)) == 1
        assert predicted_count(16, HierarchyParams(64, 4, 2, 2)) == 8
        assert predicted_count(4, HierarchyParams(64, 2, 1, 4)) == 16

    def test_off_lattice_extension(self):
        p = HierarchyParams(64, 4, 2, 2)
        assert predicted_count(32, p) == pytest.approx(2**1.5)
        # below the last level the lattice stops but the real extension continues
        assert predicted_count(1, p) == pytest.approx(64**1.5)

    @pytest.mark.parametrize("w", [0, -1, 65])
    def test_domain(self, w):
        with pytest.raises(ValueError):
            predicted_count(w, HierarchyParams(64, 4, 2, 2))

    @given(st.integers(2, 6), st.integers(1, 8), st.integers(0, 4))
    def test_monotone(self, l, a, x):
        p = HierarchyParams(l**x * 4, l, a, x)
        counts = [predicted_count(w, p) for w in range(1, p.N + 1)]
        assert all(c1 > c2 for c1, c2 in zip(counts, counts[1:]))


class TestParams:
    def test_validation(self):
        with pytest.raises(ParameterError):
            HierarchyParams(0, 4, 1, 1)
        with pytest.raises(ParameterError):
            HierarchyParams(16, 1, 2, 1)
        with pytest.raises(ParameterError):
            HierarchyParams(16, 4, 0, 1)

    def test_divisibility_message(self):
        with pytest.raises(ParameterError, match="multiple of l\\*\\*x=16.*32"):
            generate_broadcast_network(HierarchyParams(100, 4, 2, 2))

    def test_non_integer_a(self):
        with pytest.raises(ParameterError):
            generate_broadcast_network(HierarchyParams(64, 4, 1.5, 2))


class TestGenerator:
    def test_small_examples(self):
        g = generate_broadcast_network(HierarchyParams(4, 2, 1, 2))
        assert dict(out_degree_distribution(g).counts) == {4: 1, 2: 2, 1: 4}
        g = generate_broadcast_network(HierarchyParams(64, 4, 2, 2))
        assert dict(out_degree_distribution(g).counts) == {64: 1, 16: 8, 4: 64}

    def test_nested_divisions(self):
        p = HierarchyParams(16, 2, 2, 2)
        g = generate_broadcast_network(p)
        targets = {}
        for u, v, _ in g.edges():
            targets.setdefault(u, set()).add(v)
        level1 = [t for u, t in targets.items() if u.startswith("bc1.")]
        level2 = [t for u, t in targets.items() if u.startswith("bc2.")]
        assert len(level1) == 4 and len(level2) == 16
        for inner in level2:
            assert any(inner <= outer for outer in level1)

    def test_seeded(self):
        p, noise = HierarchyParams(256, 4, 2, 3), Noise(0.8, 3.0)
        g1 = generate_broadcast_network(p, noise, seed=5)
        g2 = generate_broadcast_network(p, noise, seed=5)
        assert list(g1.edges()) == list(g2.edges())
        g3 = generate_broadcast_network(p, noise, seed=6)
        assert list(g3.edges()) != list(g1.edges())

    def test_background_degree(self):
        p = HierarchyParams(4096, 4, 1, 0)
        g = generate_broadcast_network(p, Noise(background_mean_degree=5.0), seed=1)
        emp = g.out_degree("total-messages")[: p.N]
        assert emp.mean() == pytest.approx(5.0, abs=0.2)

    def test_noise_validation(self):
        with pytest.raises(ParameterError):
            Noise(coverage_p=0)
        with pytest.raises(ParameterError):
            Noise(background_mean_degree=-1)

    def test_records_rebuild_graph(self):
        p = HierarchyParams(64, 4, 2, 2)
        g = generate_broadcast_network(p, Noise(0.9, 2.0), seed=3)
        back = build_graph(graph_to_records(g))
        assert sorted(back.edges()) == sorted(g.edges())


class TestFit:
    def test_exact_lattice(self):
        fit = fit_power_law(lattice_dist(HierarchyParams(4**6, 4, 7, 3)), 40)
        assert fit.beta == pytest.approx(math.log(28) / math.log(4), abs=1e-9)
        assert fit.residual < 1e-9 and fit.points_used == 4

    def test_two_points(self):
        fit = fit_power_law(DegreeDistribution({10: 100, 100: 1}, 101), 1)
        assert fit.beta == pytest.approx(2.0, abs=1e-12)
        assert fit.intercept == pytest.approx(math.log(1e4), abs=1e-12)

    def test_below_cutoff(self):
        with pytest.raises(InsufficientDataError):
            fit_power_law(DegreeDistribution({1: 5, 2: 3, 39: 1}, 9), 40)
        with pytest.raises(InsufficientDataError):
            fit_power_law(DegreeDistribution({50: 5}, 9), 40)

    def test_cutoff_inclusive(self):
        fit = fit_power_law(DegreeDistribution({40: 16, 160: 1}, 17), 40)
        assert fit.points_used == 2

    # log bins that straddle sparse lattice points put mass at bin centres
    # rather than at the points, which biases the slope by a bin fraction
    @pytest.mark.parametrize("method,tol", [("log-binned", 0.2), ("ccdf", 0.05)])
    def test_methods_near_exact(self, method, tol):
        fit = fit_power_law(lattice_dist(HierarchyParams(4**7, 4, 4, 4)), 4, method=method)
        assert fit.beta == pytest.approx(2.0, abs=tol)
        assert fit.method == method

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            fit_power_law(DegreeDistribution({10: 2, 20: 1}, 3), 1, method="mle")

    def test_json(self):
        fit = fit_power_law(DegreeDistribution({10: 100, 100: 1}, 101), 1)
        obj = json.loads(fit.to_json())
        assert {"beta", "intercept", "cutoff", "residual", "points_used"} <= obj.keys()
        assert PowerLawFit.from_dict(obj) == fit

    def test_raw_points_underestimate_noisy_tail(self):
        # Coverage noise spreads each level over many distinct degrees with
        # small counts, which flattens a raw-point fit well below 2.
        p = HierarchyParams(4096, 4, 4, 3)
        betas = []
        for seed in range(5):
            d = out_degree_distribution(generate_broadcast_network(p, Noise(0.9, 5.0), seed=seed))
            betas.append(fit_power_law(d, 40).beta)
        assert max(betas) < 1.85


class TestInfer:
    def test_reference_chain_formula_values(self):
        fit = PowerLawFit(2.47, 14.0, 40, 0.0, 10)
        rep = infer_structure(fit, 4, 32000)
        assert rep.a_hat == pytest.approx(4**1.47, rel=1e-12)
        assert rep.a_hat == pytest.approx(7.6741, abs=1e-4)
        assert rep.x_hat == pytest.approx(2.15645, abs=1e-5)
        # the formulas give 1610.04, not the rounded 1601 quoted elsewhere
        assert rep.w_min_hat == pytest.approx(1610.04, abs=0.01)
        assert rep.N_fit == pytest.approx(math.exp(14.0 / 2.47), rel=1e-12)
        assert rep.contacts_per_employee == pytest.approx((rep.x_hat + 1) * rep.a_hat)

    def test_rounded_chain_values_disagree(self):
        # The rounded chain "x ~ 3, w_min ~ 48" does not follow from the
        # formulas; these stay visible as explicit inequalities.
        rep = infer_structure(PowerLawFit(2.47, 14.0, 40, 0.0, 10), 4, 32000)
        assert abs(rep.x_hat - 3) > 0.8
        assert abs(rep.w_min_hat - 48) > 1000
        assert abs(32000 / 4**3 - 48) > 400
        assert abs(rep.N_fit - 32000) > 30000

    def test_sqrt2(self):
        rep = infer_structure(PowerLawFit(1.5, 3.0, 40, 0.0, 2), 2, 100)
        assert rep.a_hat == pytest.approx(math.sqrt(2), abs=1e-12)
        assert predicted_exponent(2, rep.a_hat) == pytest.approx(1.5, abs=1e-12)

    def test_termination_consistency(self):
        rep = infer_structure(PowerLawFit(2.47, 14.0, 40, 0.0, 10), 4, 32000)
        lhs = (rep.a_hat * 4) ** rep.x_hat
        rhs = 32000 / 4**rep.x_hat
        assert lhs == pytest.approx(rhs, rel=1e-6)

    def test_inapplicable(self):
        with pytest.raises(ModelInapplicableError):
            infer_structure(PowerLawFit(1.0, 3.0, 40, 0.0, 2), 4, 100)
        with pytest.raises(ValueError):
            infer_structure(PowerLawFit(2.0, 3.0, 40, 0.0, 2), 1, 100)

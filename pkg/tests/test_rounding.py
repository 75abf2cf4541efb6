import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import (
    antipodal_embedding,
    multigraphs,
    naive_has_triangle,
    naive_max_cut,
    random_embedding,
    random_multigraph,
    triangle_embedding,
)
from trifree.derand import DerandConfig
from trifree.graph import EdgeSelection, Multigraph
from trifree.params import RoundingParams, hybrid_params
from trifree.rounding import (
    CASE_DERAND,
    CASE_GW,
    CASE_LONG,
    Hyperplane,
    RoundingOutcome,
    TriangleFreeViolation,
    band_masks,
    derandomised_round,
    expected_weight,
    inclusion_probability,
    round_gw,
    round_hybrid,
    round_hybrid_case_b,
    sample_hyperplane,
    simulate_inclusion,
)
from trifree.sdp import Embedding, edge_angles, sdp_objective, solve_maxcut_sdp

K2 = Multigraph.from_edges(2, [(0, 1, 1)])
K3 = Multigraph.from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
PARAMS = hybrid_params()


def circle_embedding(angles):
    """Unit vectors in the plane at the given polar angles."""
    a = np.asarray(angles, dtype=float)
    return Embedding.normalised(np.stack([np.cos(a), np.sin(a)], axis=1))


def path_with_angles(thetas):
    """A path whose consecutive vectors are separated by the given angles."""
    polar = np.concatenate([[0.0], np.cumsum(thetas)])
    g = Multigraph.from_edges(len(polar), [(i, i + 1, 1) for i in range(len(thetas))])
    return g, circle_embedding(polar)


class TestHyperplane:
    def test_zero_normal_rejected(self):
        with pytest.raises(ValueError):
            Hyperplane(np.zeros(3))

    def test_ties_go_positive(self):
        emb = circle_embedding([0.0, math.pi / 2])
        assert list(Hyperplane([0.0, 1.0]).sides(emb)) == [True, True]

    def test_rank_mismatch(self):
        with pytest.raises(ValueError):
            Hyperplane([1.0, 0.0, 0.0]).sides(triangle_embedding())

    def test_sample_is_deterministic(self):
        assert np.array_equal(sample_hyperplane(4, 7).normal, sample_hyperplane(4, 7).normal)


class TestGwRounding:
    def test_antipodal_always_separated(self):
        for s in range(50):
            assert round_gw(K2, antipodal_embedding(), sample_hyperplane(2, s)).weight == 1

    def test_separation_frequency_at_120_degrees(self):
        emb = triangle_embedding()
        hits = [round_gw(K2, Embedding(emb.vectors[:2]), sample_hyperplane(2, s)).weight for s in range(5000)]
        assert np.mean(hits) == pytest.approx(2 / 3, abs=0.02)

    def test_k3_expectation(self):
        emb = triangle_embedding()
        w = [round_gw(K3, emb, sample_hyperplane(2, s)).weight for s in range(4000)]
        assert np.mean(w) == pytest.approx(2.0, abs=0.05)
        assert max(w) == 2

    def test_case_label(self):
        assert round_gw(K2, antipodal_embedding(), Hyperplane([1.0, 0.0])).case_used == CASE_GW


class TestOutcome:
    def test_triangle_rejected(self):
        with pytest.raises(TriangleFreeViolation):
            RoundingOutcome(K3, EdgeSelection.full(K3), CASE_GW)

    def test_to_dict(self):
        d = RoundingOutcome(K3, EdgeSelection.from_indices(K3, [0]), CASE_LONG).to_dict()
        assert d == {"weight": 1, "case": CASE_LONG, "selection": [[0, 1, 1]]}


class TestBands:
    def test_masks(self):
        s = PARAMS.middle_threshold
        g, emb = path_with_angles([math.pi, PARAMS.tau + 1e-6, PARAMS.tau - 1e-3, s + 1e-3, s - 1e-3, 0.5])
        long_, middle = band_masks(g, emb, PARAMS)
        assert list(long_) == [True, True, False, False, False, False]
        assert list(middle) == [False, False, True, True, False, False]

    def test_case_b_keeps_long_and_separated_middle(self):
        # polar angles 0, pi, pi + 2.1, pi + 2.4; bands long, middle, short
        g, emb = path_with_angles([math.pi, 2.1, 0.3])
        out = round_hybrid_case_b(g, emb, PARAMS, Hyperplane([0.0, 1.0]))
        assert out.selection.indices() == [0, 1]
        assert out.case_used == CASE_LONG

    def test_case_b_drops_unseparated_middle(self):
        g, emb = path_with_angles([math.pi, 2.1])
        bisector = math.pi + 1.05
        out = round_hybrid_case_b(g, emb, PARAMS, Hyperplane([math.cos(bisector), math.sin(bisector)]))
        assert out.selection.indices() == [0]


class TestHybridRounding:
    def test_p_one_is_the_cut_branch(self):
        p = RoundingParams.with_p(PARAMS.alpha, PARAMS.tau, 1.0)
        g, emb = path_with_angles([math.pi, 2.0, 1.0])
        for s in range(20):
            out = round_hybrid(g, emb, p, s)
            assert out.case_used == CASE_GW

    def test_p_zero_is_the_long_branch(self):
        p = RoundingParams.with_p(PARAMS.alpha, PARAMS.tau, 0.0)
        g, emb = path_with_angles([math.pi, 2.0, 1.0])
        for s in range(20):
            out = round_hybrid(g, emb, p, s)
            assert out.case_used == CASE_LONG and 0 in out.selection.indices()

    def test_deterministic(self):
        g, emb = path_with_angles([2.5, 2.0, 1.0])
        assert round_hybrid(g, emb, PARAMS, 5) == round_hybrid(g, emb, PARAMS, 5)

    @settings(max_examples=40, deadline=None)
    @given(multigraphs(max_n=7, min_edges=1), st.integers(0, 2**32 - 1))
    def test_always_triangle_free(self, g, seed):
        emb = random_embedding(np.random.default_rng(seed), g.n, 3)
        out = round_hybrid(g, emb, PARAMS, seed)
        assert not naive_has_triangle([(u, v) for u, v, _ in out.selection.pairs(g)])


class TestInclusionLaw:
    def test_examples(self):
        p, q = PARAMS.p_case1, PARAMS.q_case2
        assert inclusion_probability(math.pi, PARAMS) == pytest.approx(1.0)
        assert inclusion_probability(0.0, PARAMS) == 0.0
        assert inclusion_probability(2.1, PARAMS) == pytest.approx(2.1 / math.pi)
        assert inclusion_probability(1.0, PARAMS) == pytest.approx(p / math.pi)
        assert inclusion_probability(PARAMS.tau, PARAMS) == pytest.approx(p * PARAMS.tau / math.pi + q)

    def test_rejects_bad_angle(self):
        with pytest.raises(ValueError):
            inclusion_probability(4.0, PARAMS)

    @given(st.floats(0.0, math.pi))
    def test_dominates_alpha_times_sdp_term(self, t):
        assert inclusion_probability(t, PARAMS) >= PARAMS.alpha * (1 - math.cos(t)) / 2 - 1e-9

    def test_frequencies_match_law(self):
        s = PARAMS.middle_threshold
        g, emb = path_with_angles([math.pi, 2.3, 2.0, s + 0.01, 1.2, 0.4])
        trials = 200_000
        freq = simulate_inclusion(g, emb, PARAMS, trials, seed=1)
        law = inclusion_probability(edge_angles(g, emb), PARAMS)
        se = np.sqrt(law * (1 - law) / trials)
        assert np.all(np.abs(freq - law) <= 3 * se + 1e-12)

    def test_round_hybrid_frequencies_match_law(self):
        g, emb = path_with_angles([2.9, 2.0, 1.0])
        trials = 6000
        counts = np.zeros(g.m)
        for s in range(trials):
            counts[list(round_hybrid(g, emb, PARAMS, s).selection.indices())] += 1
        law = inclusion_probability(edge_angles(g, emb), PARAMS)
        se = np.sqrt(law * (1 - law) / trials)
        assert np.all(np.abs(counts / trials - law) <= 4 * se)

    @settings(max_examples=30, deadline=None)
    @given(multigraphs(max_n=7, min_edges=1), st.integers(0, 2**32 - 1))
    def test_expectation_beats_alpha_sdp(self, g, seed):
        emb = random_embedding(np.random.default_rng(seed), g.n, 3)
        assert expected_weight(g, emb, PARAMS) >= PARAMS.alpha * sdp_objective(g, emb) - 1e-9


class TestDerandomisedRound:
    def test_all_antipodal(self):
        g = Multigraph.from_edges(4, [(0, 1, 2), (1, 2, 1), (2, 3, 3)])
        out = derandomised_round(g, antipodal_embedding(4), PARAMS)
        assert out.weight == 6 and out.case_used == CASE_DERAND

    def test_k3(self):
        assert derandomised_round(K3, triangle_embedding(), PARAMS).weight == 2

    def test_empty_graph(self):
        g = Multigraph.from_edges(3, [])
        assert derandomised_round(g, random_embedding(np.random.default_rng(0), 3, 2), PARAMS).weight == 0

    def test_config_is_used(self):
        out = derandomised_round(K3, triangle_embedding(), PARAMS, DerandConfig(grid_n=4))
        assert out.weight == 2

    def test_ratio_on_random_graphs(self, rng, backend):
        for _ in range(100):
            g = random_multigraph(rng, 2, 7)
            emb, rep = solve_maxcut_sdp(g, 1e-6, seed=int(rng.integers(1 << 30)))
            out = derandomised_round(g, emb, PARAMS)
            assert out.weight >= 0.8823 * naive_max_cut(g) - 1e-9

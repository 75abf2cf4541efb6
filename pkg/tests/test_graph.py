import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import multigraphs, naive_has_triangle
from trifree.graph import (
    CutAssignment,
    EdgeSelection,
    GraphParseError,
    HeaderError,
    LoopError,
    Multigraph,
    MultiplicityError,
    VertexRangeError,
    bipartition,
    cut_selection,
    cut_weight,
    distances_from,
    is_triangle_free,
    parse_graph,
    selection_weight,
    serialise_graph,
)
from trifree.hardness import gadget9, gadget17

K3 = "p 3 3\ne 0 1 1\ne 1 2 1\ne 0 2 1\n"


def cycle(n):
    return Multigraph.from_edges(n, [(i, (i + 1) % n, 1) for i in range(n)])


def complete_bipartite(a, b):
    return Multigraph.from_edges(a + b, [(u, a + v, 1) for u in range(a) for v in range(b)])


class TestParse:
    def test_k2(self):
        g = parse_graph("p 2 1\ne 0 1 1")
        assert g.n == 2 and g.edges == ((0, 1, 1),)

    def test_k3(self):
        g = parse_graph(K3)
        assert g.n == 3 and g.m == 3 and g.total_weight == 3

    def test_bytes_and_comments(self):
        g = parse_graph(b"# a comment\np 3 2\n\ne 2 0 4\n# mid\ne 1 2 1\n")
        assert g.edges == ((0, 2, 4), (1, 2, 1))

    def test_repeated_pairs_aggregate(self):
        g = parse_graph("p 2 2\ne 0 1 2\ne 1 0 3\n")
        assert g.edges == ((0, 1, 5),)
        assert g.multiplicity(1, 0) == 5

    @pytest.mark.parametrize(
        "text, exc, line",
        [
            ("p 2 1\ne 0 0 1", LoopError, 2),
            ("p 2 1\ne 0 2 1", VertexRangeError, 2),
            ("p 2 1\ne 0 1 0", MultiplicityError, 2),
            ("p 2 1\ne 0 1 -3", MultiplicityError, 2),
            ("e 0 1 1", HeaderError, 1),
            ("p 2", HeaderError, 1),
            ("p 2 2\ne 0 1 1", HeaderError, 1),
            ("p x 1\ne 0 1 1", HeaderError, 1),
            ("p 2 1\np 2 1\ne 0 1 1", HeaderError, 2),
            ("", HeaderError, 0),
        ],
    )
    def test_errors_are_distinct_and_located(self, text, exc, line):
        with pytest.raises(exc) as info:
            parse_graph(text)
        assert isinstance(info.value, GraphParseError)
        assert info.value.line == line

    @given(multigraphs())
    def test_serialise_round_trip(self, g):
        assert parse_graph(serialise_graph(g)) == g


class TestWeights:
    def test_cut_weight_k3(self):
        g = parse_graph(K3)
        for mask in range(8):
            c = CutAssignment.from_mask(3, mask)
            assert cut_weight(g, c) == (0 if mask in (0, 7) else 2)

    def test_cut_weight_k2(self):
        g = parse_graph("p 2 1\ne 0 1 1")
        assert cut_weight(g, CutAssignment((0, 1))) == 1

    def test_gadget9_cut(self):
        # sides {x, y, z} against {a, 0}
        g = gadget9().graph
        assert cut_weight(g, CutAssignment.from_sets(5, {1, 2, 3})) == 9

    def test_selection_weights(self):
        g = parse_graph(K3)
        assert selection_weight(g, EdgeSelection.full(g)) == 3
        assert selection_weight(g, EdgeSelection.empty(g)) == 0

    def test_gadget17_bipartite_selection(self):
        g = gadget17().graph
        left, right = {0, 1, 2, 3}, {4, 5}
        s = EdgeSelection.from_pairs(g, [(u, v) for u in left for v in right])
        assert selection_weight(g, s) == 17

    @given(multigraphs(), st.data())
    def test_selection_weight_monotone(self, g, data):
        a = data.draw(st.integers(0, (1 << g.m) - 1))
        b = data.draw(st.integers(0, (1 << g.m) - 1))
        small, big = EdgeSelection(g.m, a & b), EdgeSelection(g.m, a)
        assert small.issubset(big)
        assert selection_weight(g, small) <= selection_weight(g, big)


class TestTriangleFree:
    def test_examples(self):
        g = parse_graph(K3)
        assert not is_triangle_free(g, EdgeSelection.full(g))
        assert is_triangle_free(g, EdgeSelection.from_indices(g, [0, 1]))
        c5 = cycle(5)
        assert is_triangle_free(c5, EdgeSelection.full(c5))

    @given(multigraphs(max_n=6), st.data())
    def test_matches_naive(self, g, data):
        mask = data.draw(st.integers(0, (1 << g.m) - 1))
        s = EdgeSelection(g.m, mask)
        assert is_triangle_free(g, s) == (not naive_has_triangle([(u, v) for u, v, _ in s.pairs(g)]))

    @given(multigraphs(), st.data())
    def test_cuts_are_triangle_free(self, g, data):
        mask = data.draw(st.integers(0, (1 << g.n) - 1))
        assert is_triangle_free(g, cut_selection(g, CutAssignment.from_mask(g.n, mask)))


class TestBipartition:
    def test_c5_odd_cycle(self):
        g = cycle(5)
        bp = bipartition(g, EdgeSelection.full(g))
        assert not bp.is_bipartite
        assert sorted(bp.odd_cycle) == [0, 1, 2, 3, 4]

    def test_c4_and_k23(self):
        for g in (cycle(4), complete_bipartite(2, 3)):
            assert bipartition(g, EdgeSelection.full(g)).is_bipartite

    @given(multigraphs(max_n=7), st.data())
    def test_colouring_or_witness(self, g, data):
        s = EdgeSelection(g.m, data.draw(st.integers(0, (1 << g.m) - 1)))
        bp = bipartition(g, s)
        if bp.is_bipartite:
            side = bp.sides.side
            assert all(side[u] != side[v] for u, v, _ in s.pairs(g))
        else:
            cyc = bp.odd_cycle
            assert len(cyc) % 2 == 1 and len(set(cyc)) == len(cyc)
            sel = {(min(u, v), max(u, v)) for u, v, _ in s.pairs(g)}
            for i in range(len(cyc)):
                a, b = cyc[i], cyc[(i + 1) % len(cyc)]
                assert (min(a, b), max(a, b)) in sel


class TestDistances:
    def test_path(self):
        g = Multigraph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
        assert distances_from(g, EdgeSelection.full(g), 0) == [0, 1, 2]

    def test_isolated(self):
        g = Multigraph.from_edges(3, [(0, 1, 1)])
        assert distances_from(g, EdgeSelection.full(g), 0)[2] is None

    def test_gadget_k23(self):
        # parts {a, 0} and {x, y, z}: terminal 0 touches x, y, z directly
        g = gadget9().graph
        s = EdgeSelection.from_pairs(g, [(u, v) for u in (0, 4) for v in (1, 2, 3)])
        d = distances_from(g, s, 0)
        assert d[1] == d[2] == d[3] == 1 and d[4] == 2

    def test_gadget_star_through_a(self):
        g = gadget9().graph
        s = EdgeSelection.from_pairs(g, [(v, 4) for v in range(4)])
        d = distances_from(g, s, 0)
        assert d[1] == d[2] == d[3] == 2

    def test_bad_source(self):
        g = Multigraph.from_edges(2, [(0, 1, 1)])
        with pytest.raises(ValueError):
            distances_from(g, EdgeSelection.full(g), 5)


class TestModel:
    def test_rejects_bad_edges(self):
        with pytest.raises(ValueError):
            Multigraph(2, ((1, 0, 1),))
        with pytest.raises(ValueError):
            Multigraph(2, ((0, 1, 0),))
        with pytest.raises(ValueError):
            Multigraph.from_edges(2, [(0, 0, 1)])

    def test_selection_mask_bounds(self):
        with pytest.raises(ValueError):
            EdgeSelection(2, 0b100)

    def test_triangles_of_k4(self):
        g = Multigraph.from_edges(4, [(u, v, 1) for u in range(4) for v in range(u + 1, 4)])
        assert len(g.triangles) == 4

    @settings(max_examples=50)
    @given(multigraphs())
    def test_csr_is_symmetric(self, g):
        indptr, indices, weights = g.csr
        pairs = {}
        for u in range(g.n):
            for p in range(indptr[u], indptr[u + 1]):
                pairs[(u, int(indices[p]))] = weights[p]
        for (u, v), w in pairs.items():
            assert pairs[(v, u)] == w == g.multiplicity(u, v)

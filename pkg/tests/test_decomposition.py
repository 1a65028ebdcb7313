import random
from pathlib import Path

import pytest

import twgadget as tg
from twgadget.decomposition import claw_center
from twgadget.graph import bits

from helpers import (
    formula_32b,
    naive_validate,
    pervar_instance,
    random_formula,
    random_graph,
)

GOLDEN = Path(__file__).parent / "golden"


def single_clause_instance():
    f = tg.Formula.from_ints(3, [(1, 2, 3)])
    return pervar_instance(f)


class TestValidate:
    def test_single_full_bag(self):
        g = random_graph(random.Random(0), 6, 0.5)
        td = tg.TreeDecomposition.from_bag_sets(6, [range(1, 7)], [])
        report = tg.validate(g, td)
        assert report.valid and report.width == 5

    def test_uncovered_edge(self):
        g = tg.Graph(2, [(1, 2)])
        td = tg.TreeDecomposition.from_bag_sets(2, [{1}, {2}], [(1, 2)])
        report = tg.validate(g, td)
        assert not report.valid
        assert "covered by no bag" in report.violation

    def test_disconnected_tree(self):
        g = tg.Graph(2, [(1, 2)])
        td = tg.TreeDecomposition.from_bag_sets(2, [{1, 2}, {1, 2}], [])
        report = tg.validate(g, td)
        assert not report.valid and "edges" in report.violation

    def test_cyclic(self):
        g = tg.Graph(2, [(1, 2)])
        td = tg.TreeDecomposition.from_bag_sets(
            2, [{1, 2}, {1, 2}, {1}], [(1, 2), (2, 3), (3, 1)]
        )
        report = tg.validate(g, td)
        assert not report.valid

    def test_missing_vertex(self):
        g = tg.Graph(3, [(1, 2)])
        td = tg.TreeDecomposition.from_bag_sets(3, [{1, 2}], [])
        report = tg.validate(g, td)
        assert not report.valid and "vertex 3" in report.violation

    def test_disconnected_trace(self):
        g = tg.Graph(3, [(1, 2), (2, 3)])
        td = tg.TreeDecomposition.from_bag_sets(
            3, [{1, 2}, {2}, {2, 3, 1}], [(1, 2), (2, 3)]
        )
        report = tg.validate(g, td)
        assert not report.valid and "trace of vertex 1" in report.violation

    def test_unknown_vertex_in_bag(self):
        g = tg.Graph(2, [(1, 2)])
        td = tg.TreeDecomposition(2, (0b1110,), ())
        report = tg.validate(g, td)
        assert not report.valid and "unknown vertex 3" in report.violation

    def test_vertex_count_mismatch(self):
        g = tg.Graph(2, [(1, 2)])
        td = tg.TreeDecomposition.from_bag_sets(3, [{1, 2, 3}], [])
        assert not tg.validate(g, td).valid

    def test_agrees_with_naive_reimplementation(self):
        rng = random.Random(9)
        agree = 0
        for _ in range(120):
            g = random_graph(rng, rng.randint(2, 9), rng.uniform(0.2, 0.8))
            td = tg.greedy_decomposition(g)
            variant = rng.randrange(4)
            if variant == 1 and td.node_count > 1:
                # drop one vertex from a random bag
                bags = list(td.bags)
                t = rng.randrange(len(bags))
                if bags[t]:
                    victims = list(bits(bags[t]))
                    bags[t] &= ~(1 << rng.choice(victims))
                td = tg.TreeDecomposition(td.n, tuple(bags), td.edges)
            elif variant == 2 and len(td.edges) >= 2:
                # rewire one tree edge (may disconnect or create a cycle)
                edges = list(td.edges)
                k = rng.randrange(len(edges))
                edges[k] = (
                    rng.randint(1, td.node_count),
                    rng.randint(1, td.node_count),
                )
                try:
                    td = tg.TreeDecomposition(td.n, td.bags, tuple(edges))
                except ValueError:
                    continue
            elif variant == 3:
                # clear one bag entirely
                bags = list(td.bags)
                bags[rng.randrange(len(bags))] = 0
                td = tg.TreeDecomposition(td.n, tuple(bags), td.edges)
            mine = tg.validate(g, td).valid
            theirs = naive_validate(g, td)
            assert mine == theirs
            agree += 1
        assert agree == 120


class TestBuildFromAssignment:
    def test_center_bag_size(self):
        rng = random.Random(21)
        for _ in range(20):
            f = random_formula(rng, rng.randint(3, 6), rng.randint(1, 6))
            inst = pervar_instance(f)
            a = tuple(rng.random() < 0.5 for _ in range(f.n))
            td = tg.build_from_assignment(inst, a)
            satisfied = tg.evaluate(f, a)
            assert td.bag(1).bit_count() == inst.sum_gamma + 7 * f.m - satisfied

    def test_leaf_bags_exact(self):
        inst = single_clause_instance()
        a = (True, False, True)
        td = tg.build_from_assignment(inst, a)
        a_prime = td.bag(1) & inst.a_mask
        leaf_bags = set()
        nbrs = td.node_neighbors()
        for t in range(2, td.node_count + 1):
            if len(nbrs[t]) == 1:
                leaf_bags.add(td.bag(t))
        assert leaf_bags == {
            a_prime | inst.b_all_mask,
            a_prime | inst.c_all_mask,
            inst.a_mask,
        }

    def test_validates_and_respects_cap(self):
        rng = random.Random(22)
        for _ in range(15):
            f = random_formula(rng, rng.randint(3, 7), rng.randint(1, 7))
            inst = pervar_instance(f)
            a = tuple(rng.random() < 0.5 for _ in range(f.n))
            td = tg.build_from_assignment(inst, a)
            report = tg.validate(inst.graph, td)
            assert report.valid
            satisfied = tg.evaluate(f, a)
            cap = inst.sum_gamma + inst.max_gamma + 7 * f.m - satisfied
            assert all(b.bit_count() <= cap for b in td.bags)

    def test_trunk_bag_sizes(self):
        # bags between the B and C leaves are the center size or the center
        # size plus the currently open block's gamma
        rng = random.Random(23)
        f = random_formula(rng, 5, 4)
        inst = pervar_instance(f)
        a = (True, False, True, False, True)
        td = tg.build_from_assignment(inst, a)
        center_size = td.bag(1).bit_count()
        sizes = set()
        nbrs = td.node_neighbors()
        # the B path is nodes 2.. up to its leaf; walk from the center
        falses = [i for i in range(1, 6) if not a[i - 1]]
        trues = [i for i in range(1, 6) if a[i - 1]]
        b_nodes = range(2, 2 + 2 * len(falses) + 1)
        c_nodes = range(
            2 + 2 * len(falses) + 1, 2 + 2 * len(falses) + 1 + 2 * len(trues) + 1
        )
        open_gammas = {inst.gammas.of(i) for i in range(1, 6)}
        for t in list(b_nodes) + list(c_nodes):
            delta = td.bag(t).bit_count() - center_size
            assert delta == 0 or delta in open_gammas

    def test_all_true_and_all_false(self):
        inst = single_clause_instance()
        for a in ((True,) * 3, (False,) * 3):
            td = tg.build_from_assignment(inst, a)
            assert tg.validate(inst.graph, td).valid
            assert td.node_count == 4 * 3 + 3

    def test_width_bounds_exact_treewidth(self):
        inst = single_clause_instance()
        td = tg.build_from_assignment(inst, (True, True, True))
        assert tg.validate(inst.graph, td).valid
        assert tg.treewidth_via_quotient(inst) <= td.width

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            tg.build_from_assignment(single_clause_instance(), (True,))


class TestFindCliqueNode:
    def test_single_vertex(self):
        inst = single_clause_instance()
        td = tg.build_from_assignment(inst, (True, True, True))
        t = tg.find_clique_node(td, [8])
        assert 8 in td.bag_vertices(t)

    def test_whole_clique_parts(self):
        inst = single_clause_instance()
        td = tg.build_from_assignment(inst, (True, False, True))
        for mask in (inst.a_mask, inst.b_all_mask, inst.c_all_mask):
            t = tg.find_clique_node(td, bits(mask))
            assert mask & ~td.bag(t) == 0

    def test_smallest_node_wins(self):
        td = tg.TreeDecomposition.from_bag_sets(2, [{1, 2}, {1, 2}], [(1, 2)])
        assert tg.find_clique_node(td, [1, 2]) == 1

    def test_non_clique_pair_fails(self):
        # path graph 1-2-3 with its natural path decomposition: 1 and 3
        # never share a bag
        td = tg.TreeDecomposition.from_bag_sets(3, [{1, 2}, {2, 3}], [(1, 2)])
        with pytest.raises(ValueError, match="no bag contains"):
            tg.find_clique_node(td, [1, 3])


class TestNormalizeToClaw:
    def test_single_bag_becomes_star(self):
        inst = single_clause_instance()
        n = inst.vertex_count
        td = tg.TreeDecomposition.from_bag_sets(n, [range(1, n + 1)], [])
        claw = tg.normalize_to_claw(inst, td)
        assert claw.node_count == 4
        assert all(bag == td.bag(1) for bag in claw.bags)
        assert tg.validate(inst.graph, claw).valid
        assert claw.width == td.width

    def test_idempotent(self):
        rng = random.Random(31)
        for _ in range(8):
            f = random_formula(rng, rng.randint(3, 5), rng.randint(1, 4))
            inst = pervar_instance(f)
            td = tg.greedy_decomposition(inst.graph)
            once = tg.normalize_to_claw(inst, td)
            twice = tg.normalize_to_claw(inst, once)
            assert twice == once

    def test_never_widens_and_center_covers(self):
        rng = random.Random(32)
        for _ in range(12):
            f = random_formula(rng, rng.randint(3, 6), rng.randint(1, 5))
            inst = pervar_instance(f)
            source = rng.choice(("greedy", "built"))
            if source == "greedy":
                td = tg.greedy_decomposition(inst.graph)
            else:
                a = tuple(rng.random() < 0.5 for _ in range(f.n))
                td = tg.build_from_assignment(inst, a)
            claw = tg.normalize_to_claw(inst, td)
            assert tg.validate(inst.graph, claw).valid
            assert claw.width <= td.width
            cover = tg.center_cover(inst, claw)
            assert tg.is_vertex_cover(tg.incidence_graph(inst), cover)

    def test_invalid_input_rejected(self):
        inst = single_clause_instance()
        bad = tg.TreeDecomposition.from_bag_sets(inst.vertex_count, [{1}], [])
        with pytest.raises(ValueError, match="invalid tree decomposition"):
            tg.normalize_to_claw(inst, bad)


class TestCenterCover:
    def test_build_output_center_is_chosen_cover(self):
        rng = random.Random(33)
        for _ in range(8):
            f = random_formula(rng, rng.randint(3, 5), rng.randint(1, 4))
            inst = pervar_instance(f)
            a = tuple(rng.random() < 0.5 for _ in range(f.n))
            td = tg.build_from_assignment(inst, a)
            assert tg.center_cover(inst, td) == tg.cover_from_assignment(inst, a)

    def test_cover_size_bounded_by_width(self):
        inst = single_clause_instance()
        td = tg.build_from_assignment(inst, (False, True, False))
        assert len(tg.center_cover(inst, td)) <= td.width + 1

    def test_not_claw_rejected(self):
        inst = single_clause_instance()
        n = inst.vertex_count
        td = tg.TreeDecomposition.from_bag_sets(n, [range(1, n + 1)], [])
        with pytest.raises(tg.NotAClawError):
            tg.center_cover(inst, td)
        with pytest.raises(tg.NotAClawError):
            claw_center(td)


class TestDecodeAssignment:
    def test_round_trip_near_optimal(self):
        rng = random.Random(34)
        for _ in range(10):
            f = random_formula(rng, rng.randint(3, 5), rng.randint(1, 5))
            inst = pervar_instance(f)
            best, witness = tg.max_sat_bruteforce(f)
            td = tg.build_from_assignment(inst, witness)
            decoded, satisfied = tg.decode_assignment(inst, td)
            assert satisfied == tg.evaluate(f, decoded)
            assert satisfied >= best - inst.max_gamma

    def test_guarantee_on_any_valid_decomposition(self):
        rng = random.Random(35)
        for _ in range(10):
            f = random_formula(rng, rng.randint(3, 5), rng.randint(1, 4))
            inst = pervar_instance(f)
            td = tg.greedy_decomposition(inst.graph)
            decoded, satisfied = tg.decode_assignment(inst, td)
            assert satisfied >= inst.sum_gamma + 7 * f.m - td.width - 1

    def test_single_bag_vacuous(self):
        inst = single_clause_instance()
        n = inst.vertex_count
        td = tg.TreeDecomposition.from_bag_sets(n, [range(1, n + 1)], [])
        decoded, satisfied = tg.decode_assignment(inst, td)
        assert len(decoded) == 3
        assert satisfied >= inst.sum_gamma + 7 - (n - 1) - 1  # trivially true


class TestGreedyDecomposition:
    def test_complete_graph(self):
        g = tg.Graph(5, [(u, v) for u in range(1, 6) for v in range(u + 1, 6)])
        td = tg.greedy_decomposition(g)
        assert tg.validate(g, td).valid
        assert td.width == 4

    def test_tree_width_one(self):
        g = tg.Graph(7, [(1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7)])
        td = tg.greedy_decomposition(g)
        assert tg.validate(g, td).valid
        assert td.width == 1

    def test_always_valid(self):
        rng = random.Random(36)
        for _ in range(30):
            g = random_graph(rng, rng.randint(1, 12), rng.uniform(0, 1))
            td = tg.greedy_decomposition(g)
            assert tg.validate(g, td).valid

    def test_deterministic(self):
        g = random_graph(random.Random(37), 10, 0.4)
        assert tg.greedy_decomposition(g) == tg.greedy_decomposition(g)


class TestTdIO:
    def test_round_trip(self):
        rng = random.Random(38)
        for _ in range(10):
            g = random_graph(rng, rng.randint(2, 10), 0.5)
            td = tg.greedy_decomposition(g)
            assert tg.parse_td(tg.write_td(td)) == td

    def test_header_reports_width_plus_one(self):
        inst = single_clause_instance()
        td = tg.build_from_assignment(inst, (True, True, True))
        header = tg.write_td(td).splitlines()[0].split()
        assert header == ["s", "td", str(td.node_count), str(td.width + 1), str(td.n)]

    def test_golden_single_clause(self):
        inst = single_clause_instance()
        assert tg.write_gr(inst.graph) == (GOLDEN / "single_clause.gr").read_text()
        td = tg.build_from_assignment(inst, (True, True, True))
        assert tg.write_td(td) == (GOLDEN / "single_clause.td").read_text()
        parsed = tg.parse_td((GOLDEN / "single_clause.td").read_text())
        assert tg.validate(inst.graph, parsed).valid

    def test_empty_bag_allowed(self):
        td = tg.parse_td("s td 2 2 3\nb 1 1 2\nb 2\n1 2\n")
        assert td.bag(2) == 0

    @pytest.mark.parametrize(
        "text",
        [
            "b 1 1\n",
            "s td 1 1 2\nb 1 1\nb 1 1\n",
            "s td 2 1 2\nb 1 1\n",
            "s td 1 1 2\nb 1 3\n",
            "s td 2 1 2\nb 1 1\nb 2 2\n1 3\n",
            "s td 1 1\nb 1 1\n",
            "s td 1 1 2\nb one 1\n",
        ],
    )
    def test_errors(self, text):
        with pytest.raises(tg.TdFormatError):
            tg.parse_td(text)

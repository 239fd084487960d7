"""Closed forms, greedy construction, residual redistribution, root variants."""

import math
import warnings

import numpy as np
import pytest

from isolect import (
    CoincidenceMatrix,
    DomainError,
    build_dendrogram,
    coincidence_from_distance,
    fit_report,
    leaf_distances,
    redistribute_residuals,
    three_language_tree,
    two_language_family,
)
from isolect.dendrogram import ChainNode, Dendrogram, Leaf, RootLink, attach_depth


def matrix_from_distances(labels, dist) -> CoincidenceMatrix:
    """Assemble a coincidence matrix from a {frozenset: L} distance map."""
    k = len(labels)
    values = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(i + 1, k):
            c = coincidence_from_distance(dist[frozenset((labels[i], labels[j]))])
            values[i, j] = values[j, i] = c
    return CoincidenceMatrix(labels, values)


def matrix_from_tree(tree) -> CoincidenceMatrix:
    return matrix_from_distances(tree.leaves(), leaf_distances(tree))


class TestTwoLanguageFamily:
    def test_pure_divergence_endpoint(self):
        family = two_language_family(20.0)
        assert family.chain_width(10.0) == 0.0

    def test_pidgin_endpoint(self):
        assert two_language_family(20.0).chain_width(0.0) == 20.0

    def test_intermediate(self):
        assert two_language_family(20.0).chain_width(6.0) == pytest.approx(8.0)

    def test_parameter_range(self):
        family = two_language_family(20.0)
        with pytest.raises(DomainError):
            family.chain_width(10.5)
        with pytest.raises(DomainError):
            family.chain_width(-0.1)

    def test_negative_distance_rejected(self):
        with pytest.raises(DomainError):
            two_language_family(-1.0)

    def test_realize_round_trip(self):
        tree = two_language_family(20.0).realize(6.0)
        assert leaf_distances(tree)[frozenset(("1", "2"))] == pytest.approx(20.0)


class TestThreeLanguageTree:
    def test_worked_example(self):
        tree = three_language_tree(20.0, 30.0, 26.0)
        node = tree.root.left
        assert node.width == pytest.approx(4.0, abs=1e-12)
        assert node.left_edge == pytest.approx(8.0, abs=1e-12)
        assert node.right_edge == pytest.approx(8.0, abs=1e-12)
        assert node.attach_side == "right"
        assert tree.root.length == pytest.approx(18.0, abs=1e-12)
        dists = leaf_distances(tree)
        assert dists[frozenset(("1", "2"))] == pytest.approx(20.0, abs=1e-12)
        assert dists[frozenset(("1", "3"))] == pytest.approx(30.0, abs=1e-12)
        assert dists[frozenset(("2", "3"))] == pytest.approx(26.0, abs=1e-12)

    def test_symmetric_case_collapses_chain(self):
        a = 7.0
        tree = three_language_tree(2 * a, 2 * a, 2 * a)
        node = tree.root.left
        assert node.width == 0.0
        assert node.left_edge == pytest.approx(a)
        assert tree.root.length == pytest.approx(a)

    def test_indic_subtriple(self):
        l45 = 100.0 * math.log(100.0 / 79.0)
        l46 = 100.0 * math.log(100.0 / 63.0)
        l56 = 100.0 * math.log(100.0 / 65.0)
        tree = three_language_tree(l45, l46, l56, labels=("hindi", "panjabi", "nepali"))
        node = tree.root.left
        assert node.width == pytest.approx(3.125, abs=5e-4)
        assert node.left_edge == pytest.approx(10.223, abs=5e-4)
        assert tree.root.length == pytest.approx(32.855, abs=5e-4)

    def test_deepest_link_point_is_half_nearer_distance(self):
        # the deep-point realization of the last link bottoms out at half the
        # distance between the attached-side language and the third language
        tree = three_language_tree(20.0, 30.0, 26.0)
        from isolect import ancestor_depth

        assert ancestor_depth(tree) == pytest.approx(26.0 / 2.0, abs=1e-12)

    def test_requires_minimal_first_distance(self):
        with pytest.raises(DomainError, match="minimal"):
            three_language_tree(30.0, 20.0, 26.0)

    def test_triangle_violation_warns_and_clamps(self):
        with pytest.warns(UserWarning, match="triangle"):
            tree = three_language_tree(1.0, 50.0, 2.0)
        node = tree.root.left
        assert node.left_edge == 0.0
        assert node.width == pytest.approx(48.0)


def random_triangle_triples(n, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        l = np.sort(rng.uniform(1.0, 120.0, size=3))
        l12 = float(l[0])
        rest = rng.permutation(l[1:])
        l13, l23 = float(rest[0]), float(rest[1])
        if abs(l13 - l23) > l12:
            continue  # triangle inequality (the other two hold since l12 is minimal)
        if abs(l13 - l23) < 1e-9 or abs(l12 - min(l13, l23)) < 1e-9:
            continue  # avoid tie-break ambiguity in the equivalence check
        out.append((l12, l13, l23))
    return out


class TestBuildMatchesClosedForm:
    def test_equivalence_on_random_triples(self):
        for l12, l13, l23 in random_triangle_triples(300, seed=7):
            closed = three_language_tree(l12, l13, l23)
            m = matrix_from_distances(
                ("1", "2", "3"),
                {
                    frozenset(("1", "2")): l12,
                    frozenset(("1", "3")): l13,
                    frozenset(("2", "3")): l23,
                },
            )
            built, steps = build_dendrogram(m)
            assert len(steps) == 1
            c_node = closed.root.left
            b_node = built.root.left
            assert b_node.width == pytest.approx(c_node.width, abs=1e-9)
            assert b_node.left_edge == pytest.approx(c_node.left_edge, abs=1e-9)
            assert b_node.right_edge == pytest.approx(c_node.right_edge, abs=1e-9)
            assert b_node.attach_side == c_node.attach_side
            assert built.root.length == pytest.approx(closed.root.length, abs=1e-9)

    def test_stem_formulas_agree(self):
        for l12, l13, l23 in random_triangle_triples(300, seed=8):
            width = abs(l13 - l23)
            vertical = (l12 - width) / 2.0
            if l13 >= l23:
                stem_far = l13 - (vertical + width)
                stem_near = l23 - vertical
            else:
                stem_far = l23 - (vertical + width)
                stem_near = l13 - vertical
            assert stem_far == pytest.approx(stem_near, abs=1e-9)
            assert 2.0 * vertical + width == pytest.approx(l12, abs=1e-9)


class TestBuildDendrogram:
    def test_two_languages(self):
        m = matrix_from_distances(("x", "y"), {frozenset(("x", "y")): 24.0})
        tree, steps = build_dendrogram(m)
        assert steps == ()
        assert isinstance(tree.root, RootLink)
        assert tree.root.length == pytest.approx(24.0, abs=1e-9)

    def test_rejects_single_language(self):
        m = CoincidenceMatrix(("solo",), np.full((1, 1), np.nan))
        with pytest.raises(DomainError, match="at least 2"):
            build_dendrogram(m)

    def test_join_step_invariants(self, table1, table2):
        for matrix in (table1, table2):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                tree, steps = build_dendrogram(matrix)
            for step in steps:
                assert step.chain_width >= 0.0
                assert step.left_vertical >= 0.0
                assert step.right_vertical >= 0.0
                assert step.path_residual >= 0.0
                assert 2.0 * step.divergence_length + step.chain_width == pytest.approx(
                    step.pair_distance, abs=1e-9
                )
                realized = step.left_vertical + step.chain_width + step.right_vertical
                assert realized == pytest.approx(
                    step.pair_distance + step.path_residual, abs=1e-9
                )
            for node in tree.chain_nodes():
                assert node.width >= 0.0
                assert node.left_edge >= 0.0
                assert node.right_edge >= 0.0

    def test_mean_difference_recorded_with_observers(self, table1):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _, steps = build_dendrogram(table1)
        first = steps[0]
        assert len(first.observer_residuals) == 4
        deviations = [dev for _, dev in first.observer_residuals]
        assert sum(deviations) == pytest.approx(0.0, abs=1e-9)

    def test_deterministic(self, table1):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            tree_a, steps_a = build_dendrogram(table1)
            tree_b, steps_b = build_dendrogram(table1)
        assert steps_a == steps_b
        assert tree_a == tree_b

    def test_exact_recovery_two_cherries(self, two_cherry_tree):
        m = matrix_from_tree(two_cherry_tree)
        built, _ = build_dendrogram(m)
        assert built.topology_signature() == two_cherry_tree.topology_signature()
        dists_true = leaf_distances(two_cherry_tree)
        dists_built = leaf_distances(built)
        for pair, l in dists_true.items():
            assert dists_built[pair] == pytest.approx(l, abs=1e-6)
        widths_true = sorted(n.width for n in two_cherry_tree.chain_nodes())
        widths_built = sorted(n.width for n in built.chain_nodes())
        assert widths_built == pytest.approx(widths_true, abs=1e-6)
        assert built.root.length == pytest.approx(30.0, abs=1e-6)

    def test_exact_recovery_nested_tree(self):
        inner = ChainNode(id="i", width=3.0, left=Leaf("a"), right=Leaf("b"),
                          left_edge=5.0, right_edge=5.0, attach_side="right")
        middle = ChainNode(id="m", width=2.0, left=inner, right=Leaf("c"),
                           left_edge=4.0, right_edge=9.0, attach_side="left")
        truth = Dendrogram(RootLink(length=21.0, left=middle, right=Leaf("d")))
        m = matrix_from_tree(truth)
        built, steps = build_dendrogram(m)
        assert built.topology_signature() == truth.topology_signature()
        for pair, l in leaf_distances(truth).items():
            assert leaf_distances(built)[pair] == pytest.approx(l, abs=1e-6)
        by_clade_truth = {
            clade: node_id for node_id, clade in truth.clades().items()
        }
        truth_nodes = {n.id: n for n in truth.chain_nodes()}
        built_nodes = {n.id: n for n in built.chain_nodes()}
        built_by_clade = {clade: node_id for node_id, clade in built.clades().items()}
        for clade, node_id in by_clade_truth.items():
            tn = truth_nodes[node_id]
            bn = built_nodes[built_by_clade[clade]]
            assert bn.width == pytest.approx(tn.width, abs=1e-6)
            assert sorted((bn.left_edge, bn.right_edge)) == pytest.approx(
                sorted((tn.left_edge, tn.right_edge)), abs=1e-6
            )

    def test_borrowing_shift_keeps_widths_and_drops_verticals(self, borrowing_table):
        from isolect import coincidence_from_cognacy

        m_inc = coincidence_from_cognacy(borrowing_table, exclude_borrowed=False)
        m_exc = coincidence_from_cognacy(borrowing_table, exclude_borrowed=True)
        shift = 100.0 * math.log(100.0 / 95.0)
        tree_inc, _ = build_dendrogram(m_inc)
        tree_exc, _ = build_dendrogram(m_exc)
        assert tree_inc.topology_signature() == tree_exc.topology_signature()
        inc_by_clade = {clade: nid for nid, clade in tree_inc.clades().items()}
        exc_by_clade = {clade: nid for nid, clade in tree_exc.clades().items()}
        inc_nodes = {n.id: n for n in tree_inc.chain_nodes()}
        exc_nodes = {n.id: n for n in tree_exc.chain_nodes()}
        for clade, nid in inc_by_clade.items():
            a = inc_nodes[nid]
            b = exc_nodes[exc_by_clade[clade]]
            assert b.width == pytest.approx(a.width, abs=1e-6)
            assert b.left_edge == pytest.approx(a.left_edge - shift / 2.0, abs=1e-6)
            assert b.right_edge == pytest.approx(a.right_edge - shift / 2.0, abs=1e-6)


class TestRedistributeResiduals:
    def test_exact_input_unchanged(self, two_cherry_tree):
        m = matrix_from_tree(two_cherry_tree)
        built, _ = build_dendrogram(m)
        adjusted = redistribute_residuals(built, m)
        assert adjusted == built

    def test_four_leaf_single_perturbation_already_optimal(self, two_cherry_tree):
        # with four leaves the mean-based greedy estimates solve the least
        # squares normal equations exactly, so the adjustment pass correctly
        # reports no improvement and returns the tree unchanged
        dists = dict(leaf_distances(two_cherry_tree))
        dists[frozenset(("alpha", "gamma"))] += 3.0
        m = matrix_from_distances(two_cherry_tree.leaves(), dists)
        built, _ = build_dendrogram(m)
        before = fit_report(built, m)
        adjusted = redistribute_residuals(built, m)
        after = fit_report(adjusted, m)
        assert adjusted == built
        assert after.rms_distance == pytest.approx(before.rms_distance, abs=1e-12)
        # the +3 error spreads as 3/4 over the four cross pairs
        assert before.max_abs_distance == pytest.approx(0.75, abs=1e-9)

    def test_noisy_five_leaf_strictly_improves(self, two_cherry_tree):
        # beyond four leaves the pairwise stem average is no longer the
        # least squares solution, so the adjustment strictly reduces RMS
        rng = np.random.default_rng(5)
        extra = ChainNode(id="x", width=0.0, left=two_cherry_tree.root.left,
                          right=Leaf("omega"), left_edge=6.0, right_edge=22.0,
                          attach_side="left")
        truth = Dendrogram(RootLink(length=30.0, left=extra,
                                    right=two_cherry_tree.root.right))
        improved = 0
        for trial in range(5):
            dists = {
                pair: l + rng.normal(0.0, 1.5)
                for pair, l in leaf_distances(truth).items()
            }
            m = matrix_from_distances(truth.leaves(), dists)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                built, _ = build_dendrogram(m)
                before = fit_report(built, m)
                adjusted = redistribute_residuals(built, m)
            after = fit_report(adjusted, m)
            assert after.rms_distance <= before.rms_distance + 1e-12
            improved += after.rms_distance < before.rms_distance - 1e-9
        assert improved >= 3

    def test_table1_rms_strictly_improves(self, table1):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            built, _ = build_dendrogram(table1)
        before = fit_report(built, table1)
        adjusted = redistribute_residuals(built, table1)
        after = fit_report(adjusted, table1)
        assert after.rms_distance < before.rms_distance
        for node in adjusted.chain_nodes():
            assert node.width >= 0.0
            assert node.left_edge >= 0.0
            assert node.right_edge >= 0.0

    def test_label_mismatch_rejected(self, two_cherry_tree, table1):
        with pytest.raises(DomainError, match="differ"):
            redistribute_residuals(two_cherry_tree, table1)


class TestBuiltGeometry:
    def test_attachment_depths_monotone_along_path(self, table1):
        # every parent chain sits at or above the depth of the child it
        # attaches to (independent development cannot be negative)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            tree, _ = build_dendrogram(table1)

        def walk(node):
            if isinstance(node, Leaf):
                return
            for child, edge in ((node.left, node.left_edge), (node.right, node.right_edge)):
                child_depth = attach_depth(child)
                parent_end = child_depth + edge
                assert parent_end >= child_depth - 1e-12
                walk(child)

        walk(tree.root.left)
        walk(tree.root.right)

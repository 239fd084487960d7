"""Scalar conversions, matrix transforms, cognacy counting, borrowings."""

import numpy as np
import pytest

from isolect import (
    BorrowingAdjustment,
    CognacyTable,
    CoincidenceMatrix,
    DomainError,
    InputFormatError,
    adjust_coincidence_for_borrowings,
    adjust_matrix_for_borrowings,
    coincidence_from_cognacy,
    coincidence_from_distance,
    distance_from_coincidence,
    distance_matrix,
)

# frozen high-precision evaluations of 100*ln(100/C)
L_79 = 23.572233352106983
L_50 = 69.31471805599453


class TestScalarConversions:
    def test_identity_case(self):
        assert distance_from_coincidence(100.0) == 0.0

    def test_c79(self):
        assert distance_from_coincidence(79.0) == pytest.approx(L_79, abs=1e-9)

    def test_c50_is_100_ln2(self):
        assert distance_from_coincidence(50.0) == pytest.approx(L_50, abs=1e-9)

    def test_monotone_decreasing(self):
        values = [distance_from_coincidence(c) for c in (5.0, 20.0, 50.0, 80.0, 100.0)]
        assert values == sorted(values, reverse=True)

    @pytest.mark.parametrize("bad", [0.0, -1.0, 100.5, float("nan"), float("inf")])
    def test_domain_errors(self, bad):
        with pytest.raises(DomainError):
            distance_from_coincidence(bad)

    def test_inverse_identity(self):
        assert coincidence_from_distance(0.0) == 100.0

    def test_inverse_values(self):
        assert coincidence_from_distance(L_50) == pytest.approx(50.0, abs=1e-9)
        assert coincidence_from_distance(L_79) == pytest.approx(79.0, abs=1e-9)

    def test_inverse_domain_error(self):
        with pytest.raises(DomainError):
            coincidence_from_distance(-0.001)

    def test_round_trip_over_range(self):
        for l in np.arange(0.0, 500.0 + 1e-9, 0.25):
            back = distance_from_coincidence(coincidence_from_distance(l))
            assert abs(back - l) <= 1e-9 * max(1.0, l)


class TestCoincidenceMatrix:
    def test_two_by_two_full_coincidence(self):
        m = CoincidenceMatrix(("a", "b"), [[np.nan, 100.0], [100.0, np.nan]])
        dm = distance_matrix(m)
        assert dm.value("a", "b") == 0.0

    def test_table1_entries(self, table1):
        dm = distance_matrix(table1)
        assert dm.value("kalderash", "hindi") == pytest.approx(63.488, abs=5e-4)
        assert dm.value("hindi", "panjabi") == pytest.approx(23.572, abs=5e-4)
        assert sum(1 for _ in dm.pairs()) == 15

    def test_symmetry_required(self):
        with pytest.raises(DomainError, match="asymmetric"):
            CoincidenceMatrix(("a", "b"), [[np.nan, 70.0], [71.0, np.nan]])

    def test_out_of_range_names_pair(self):
        with pytest.raises(DomainError, match=r"\(a, b\)"):
            CoincidenceMatrix(("a", "b"), [[np.nan, 101.0], [101.0, np.nan]])

    def test_duplicate_labels_rejected(self):
        with pytest.raises(DomainError, match="duplicate"):
            CoincidenceMatrix(("a", "a"), [[np.nan, 50.0], [50.0, np.nan]])

    def test_values_read_only(self, table1):
        with pytest.raises(ValueError):
            table1.values[0, 1] = 5.0


def _table_from_columns(langs, columns, borrowed_slots=()):
    """columns: list over slots of per-language class tokens."""
    rows = []
    for j, column in enumerate(columns):
        slot = f"s{j:03d}"
        for i, lang in enumerate(langs):
            rows.append((lang, slot, column[i], slot in borrowed_slots))
    return CognacyTable.from_rows(rows)


class TestCognacyCounting:
    def test_identical_columns_give_full_coincidence(self):
        columns = [(f"w{j}", f"w{j}") for j in range(94)]
        table = _table_from_columns(("x", "y"), columns)
        m = coincidence_from_cognacy(table)
        assert m.value("x", "y") == 100.0
        assert m.list_size == 94

    def test_counting_definition(self):
        columns = [(f"w{j}", f"w{j}") for j in range(79)]
        columns += [(f"u{j}", f"v{j}") for j in range(21)]
        table = _table_from_columns(("x", "y"), columns)
        assert coincidence_from_cognacy(table).value("x", "y") == pytest.approx(79.0)

    def test_exclusion_hand_count(self):
        # 100 slots, 79 shared, 5 borrowed-everywhere slots among the shared
        columns = [(f"w{j}", f"w{j}") for j in range(79)]
        columns += [(f"u{j}", f"v{j}") for j in range(21)]
        table = _table_from_columns(
            ("x", "y"), columns, borrowed_slots={f"s{j:03d}" for j in range(5)}
        )
        m = coincidence_from_cognacy(table, exclude_borrowed=True)
        assert m.value("x", "y") == pytest.approx(100.0 * 74.0 / 95.0, abs=1e-12)
        assert m.list_size == 95

    def test_missing_slots_error_lists_slots(self):
        rows = [
            ("x", "s0", "w", False),
            ("x", "s1", "w", False),
            ("y", "s0", "w", False),
        ]
        table = CognacyTable.from_rows(rows)
        with pytest.raises(InputFormatError, match="s1"):
            coincidence_from_cognacy(table)

    def test_empty_effective_list(self):
        rows = [
            ("x", "s0", "w", True),
            ("y", "s0", "w", False),
        ]
        table = CognacyTable.from_rows(rows)
        with pytest.raises(InputFormatError, match="no slots left"):
            coincidence_from_cognacy(table, exclude_borrowed=True)

    def test_duplicate_row_rejected(self):
        with pytest.raises(InputFormatError, match="duplicate"):
            CognacyTable.from_rows(
                [("x", "s0", "w", False), ("x", "s0", "v", False)]
            )

    def test_permutation_invariance(self):
        rng = np.random.default_rng(11)
        langs = ("p", "q", "r")
        columns = [
            tuple(rng.integers(0, 3, size=3).astype(str)) for _ in range(60)
        ]
        table = _table_from_columns(langs, columns)
        base = coincidence_from_cognacy(table)

        rows = list(table.iter_rows())
        for trial in range(5):
            rng.shuffle(rows)
            shuffled = CognacyTable.from_rows(rows)
            m = coincidence_from_cognacy(shuffled)
            for a, b, value in base.pairs():
                assert m.value(a, b) == pytest.approx(value, abs=1e-12)


class TestBorrowingAdjustment:
    def test_shift_value(self):
        adj = BorrowingAdjustment(n0=100, n3=5)
        assert adj.shift == pytest.approx(5.129329438755058, abs=1e-12)

    def test_shift_approximates_n3(self):
        for n3 in range(1, 6):
            adj = BorrowingAdjustment(n0=100, n3=n3)
            assert abs(adj.shift - n3) < 0.15

    def test_adjust_example(self):
        adj = BorrowingAdjustment(n0=100, n3=5)
        assert adjust_coincidence_for_borrowings(79.0, adj) == pytest.approx(
            83.15789473684211, abs=1e-9
        )

    def test_noop_when_no_borrowings(self):
        adj = BorrowingAdjustment(n0=100, n3=0)
        assert adj.shift == 0.0
        assert adjust_coincidence_for_borrowings(50.0, adj) == 50.0

    def test_overflow_rejected(self):
        adj = BorrowingAdjustment(n0=100, n3=5)
        with pytest.raises(DomainError, match="exceeds 100"):
            adjust_coincidence_for_borrowings(99.0, adj)

    @pytest.mark.parametrize("n0,n3", [(0, 0), (10, 10), (10, 11), (10, -1)])
    def test_bad_counts(self, n0, n3):
        with pytest.raises(DomainError):
            BorrowingAdjustment(n0=n0, n3=n3)

    def test_shift_theorem_on_random_matrices(self):
        rng = np.random.default_rng(23)
        for trial in range(20):
            k = int(rng.integers(2, 7))
            labels = tuple(f"l{i}" for i in range(k))
            values = np.full((k, k), np.nan)
            for i in range(k):
                for j in range(i + 1, k):
                    values[i, j] = values[j, i] = rng.uniform(2.0, 60.0)
            n3 = int(rng.integers(0, 21))
            m = CoincidenceMatrix(labels, values)
            adj = BorrowingAdjustment(n0=100, n3=n3)
            adjusted = adjust_matrix_for_borrowings(m, adj)
            dm = distance_matrix(m)
            dm_adj = distance_matrix(adjusted)
            for a, b, l in dm.pairs():
                assert dm_adj.value(a, b) == pytest.approx(l - adj.shift, abs=1e-9)

    def test_list_size_must_match(self):
        m = CoincidenceMatrix(("a", "b"), [[np.nan, 50.0], [50.0, np.nan]], list_size=94)
        with pytest.raises(DomainError, match="list_size"):
            adjust_matrix_for_borrowings(m, BorrowingAdjustment(n0=100, n3=2))

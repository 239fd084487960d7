"""Shared fixtures: golden matrices, synthetic trees, borrowing tables."""

from pathlib import Path

import numpy as np
import pytest

from isolect import CognacyTable, CoincidenceMatrix
from isolect.dendrogram import ChainNode, Dendrogram, Leaf, RootLink
from isolect.treeio import read_coincidence_matrix

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def table1() -> CoincidenceMatrix:
    return read_coincidence_matrix(DATA_DIR / "table1.csv")


@pytest.fixture(scope="session")
def table2() -> CoincidenceMatrix:
    return read_coincidence_matrix(DATA_DIR / "table2.csv")


@pytest.fixture
def fig4_tree() -> Dendrogram:
    """Three languages: chain of width 4 at depth 8, stem 18 above language 2."""
    chain = ChainNode(
        id="n1",
        width=4.0,
        left=Leaf("1"),
        right=Leaf("2"),
        left_edge=8.0,
        right_edge=8.0,
        attach_side="right",
    )
    return Dendrogram(RootLink(length=18.0, left=chain, right=Leaf("3")))


@pytest.fixture
def two_cherry_tree() -> Dendrogram:
    """Four leaves, one nonzero chain width, committed as the golden truth."""
    cherry1 = ChainNode(
        id="t1",
        width=6.0,
        left=Leaf("alpha"),
        right=Leaf("beta"),
        left_edge=10.0,
        right_edge=10.0,
        attach_side="right",
    )
    cherry2 = ChainNode(
        id="t2",
        width=0.0,
        left=Leaf("gamma"),
        right=Leaf("delta"),
        left_edge=12.0,
        right_edge=12.0,
        attach_side="right",
    )
    return Dendrogram(RootLink(length=30.0, left=cherry1, right=cherry2))


def make_borrowing_table() -> CognacyTable:
    """Four languages, 100 slots, 5 same-slot borrowings that coincide nowhere.

    Shared counts by construction: AB=80, CD=78, AC=AD=BC=50, BD=48, so
    excluding the 5 borrowed slots multiplies every coincidence by 100/95
    exactly.
    """
    langs = ("lang_a", "lang_b", "lang_c", "lang_d")
    k = len(langs)
    blocks = []  # per-slot class column (length k); distinct ints = distinct classes

    def add(column, count):
        for _ in range(count):
            blocks.append(list(column))

    add([0, 0, 0, 0], 48)  # all four share
    add([0, 1, 0, 2], 2)  # a and c share
    add([0, 1, 2, 0], 2)  # a and d share
    add([0, 1, 1, 2], 2)  # b and c share
    add([0, 0, 1, 1], 30)  # a-b share and c-d share
    add([0, 0, 1, 2], 2)  # a and b share
    add([0, 1, 2, 3], 14)  # nobody shares
    assert len(blocks) == 100
    ids = np.array(blocks, dtype=np.int64).T.copy()
    borrowed = np.zeros((k, 100), dtype=bool)
    borrowed[:, 95:100] = True  # five of the nobody-shares slots, in all languages
    slots = tuple(f"s{j:03d}" for j in range(100))
    return CognacyTable(langs, slots, ids, borrowed)


@pytest.fixture
def borrowing_table() -> CognacyTable:
    return make_borrowing_table()

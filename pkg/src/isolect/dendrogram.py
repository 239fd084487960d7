"""Dendrogram structure: isolect chains joined by divergence lines.

A reconstructed family is a rooted tree whose internal nodes are horizontal
isolect chains (synchronous dialect continua of some width in swadesh units)
and whose edges are divergence lines (independent development, measured
vertically in swadesh units). The two children of a chain hang below its two
endpoints; the parent edge attaches at one endpoint (``attach_side``). The
topmost element is either a single node (degenerate one-language case) or a
root link of known length but undetermined configuration.
"""

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .errors import DomainError, IsolectError
from .lexstat import CoincidenceMatrix, coincidence_from_distance

__all__ = [
    "ChainNode",
    "Dendrogram",
    "FitReport",
    "Leaf",
    "PairFit",
    "RootGeometry",
    "RootLink",
    "ancestor_depth",
    "attach_depth",
    "endpoint_depths",
    "fit_report",
    "leaf_distances",
    "path_distance",
    "root_geometry",
    "root_variants",
    "theoretical_matrix",
]

_VARIANTS = (None, "max_chain", "deep_point", "parametrized")


def _check_length(value: float, what: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise DomainError(f"{what} must be finite and >= 0, got {value!r}")
    return value


@dataclass(frozen=True)
class Leaf:
    """A modern language at depth zero."""

    label: str


@dataclass(frozen=True)
class ChainNode:
    """An isolect chain with one subtree hanging below each endpoint."""

    id: str
    width: float
    left: "Node"
    right: "Node"
    left_edge: float
    right_edge: float
    attach_side: str = "left"

    def __post_init__(self):
        object.__setattr__(self, "width", _check_length(self.width, "chain width"))
        object.__setattr__(self, "left_edge", _check_length(self.left_edge, "divergence length"))
        object.__setattr__(self, "right_edge", _check_length(self.right_edge, "divergence length"))
        if self.attach_side not in ("left", "right"):
            raise DomainError(f"attach_side must be 'left' or 'right', got {self.attach_side!r}")


Node = Union[Leaf, ChainNode]


@dataclass(frozen=True)
class RootLink:
    """The final edge between the last two subtrees.

    Only its path length is determined by the data; ``variant`` records a
    chosen realization (``max_chain``, ``deep_point`` or ``parametrized``
    with an interpolation ``fraction``), or None while undetermined.
    """

    length: float
    left: Node
    right: Node
    variant: str = None
    fraction: float = None

    def __post_init__(self):
        object.__setattr__(self, "length", _check_length(self.length, "root link length"))
        if self.variant not in _VARIANTS:
            raise DomainError(f"unknown root variant {self.variant!r}")
        if self.variant == "parametrized":
            f = float(self.fraction)
            if not 0.0 <= f <= 1.0:
                raise DomainError(f"variant fraction must lie in [0, 1], got {f!r}")
            object.__setattr__(self, "fraction", f)


@dataclass(frozen=True)
class Dendrogram:
    """A reconstructed family: a root link over two subtrees, or one node."""

    root: Union[RootLink, Node]

    def __post_init__(self):
        labels = self.leaves()
        if len(set(labels)) != len(labels):
            dupes = sorted({x for x in labels if labels.count(x) > 1})
            raise DomainError(f"duplicate leaf labels in dendrogram: {dupes}")

    def leaves(self) -> tuple:
        """Leaf labels in left-to-right drawing order."""
        out = []

        def walk(node):
            if isinstance(node, Leaf):
                out.append(node.label)
            else:
                walk(node.left)
                walk(node.right)

        if isinstance(self.root, RootLink):
            walk(self.root.left)
            walk(self.root.right)
        else:
            walk(self.root)
        return tuple(out)

    @property
    def k(self) -> int:
        return len(self.leaves())

    def chain_nodes(self) -> tuple:
        """All chain nodes in pre-order (left subtree first)."""
        out = []

        def walk(node):
            if isinstance(node, ChainNode):
                out.append(node)
                walk(node.left)
                walk(node.right)

        if isinstance(self.root, RootLink):
            walk(self.root.left)
            walk(self.root.right)
        else:
            walk(self.root)
        return tuple(out)

    def clades(self) -> dict:
        """Map each chain node id to the frozenset of leaf labels below it."""
        out = {}

        def walk(node):
            if isinstance(node, Leaf):
                return frozenset((node.label,))
            clade = walk(node.left) | walk(node.right)
            out[node.id] = clade
            return clade

        if isinstance(self.root, RootLink):
            walk(self.root.left)
            walk(self.root.right)
        else:
            walk(self.root)
        return out

    def topology_signature(self) -> frozenset:
        """Hashable summary of the branching structure, lengths ignored."""
        parts = set(self.clades().values())
        if isinstance(self.root, RootLink):

            def side(node):
                if isinstance(node, Leaf):
                    return frozenset((node.label,))
                leaves = []

                def walk(n):
                    if isinstance(n, Leaf):
                        leaves.append(n.label)
                    else:
                        walk(n.left)
                        walk(n.right)

                walk(node)
                return frozenset(leaves)

            parts.add(frozenset((side(self.root.left), side(self.root.right))))
        return frozenset(parts)


def attach_depth(node: Node) -> float:
    """Depth (swadesh before present) of the endpoint carrying the parent edge."""
    if isinstance(node, Leaf):
        return 0.0
    if node.attach_side == "left":
        return node.left_edge + attach_depth(node.left)
    return node.right_edge + attach_depth(node.right)


def endpoint_depths(node: ChainNode) -> tuple:
    """Depths of the chain's (left, right) endpoints; equal when horizontal."""
    return (
        node.left_edge + attach_depth(node.left),
        node.right_edge + attach_depth(node.right),
    )


def _collect(node: Node):
    """Distances of every leaf below ``node`` to its attach endpoint.

    Returns (dist_to_attach, pairs) where pairs already contains every
    leaf pair resolved inside this subtree. A chain adds its width only for
    leaves hanging off the endpoint opposite the one being left through.
    """
    if isinstance(node, Leaf):
        return {node.label: 0.0}, {}
    dl, pl = _collect(node.left)
    dr, pr = _collect(node.right)
    dl = {x: v + node.left_edge for x, v in dl.items()}
    dr = {x: v + node.right_edge for x, v in dr.items()}
    pairs = {**pl, **pr}
    for x, vx in dl.items():
        for y, vy in dr.items():
            pairs[frozenset((x, y))] = vx + node.width + vy
    if node.attach_side == "left":
        datt = {**dl, **{x: v + node.width for x, v in dr.items()}}
    else:
        datt = {**{x: v + node.width for x, v in dl.items()}, **dr}
    return datt, pairs


def leaf_distances(d: Dendrogram) -> dict:
    """All pairwise leaf-to-leaf path distances, keyed by frozenset pairs."""
    if isinstance(d.root, RootLink):
        dl, pl = _collect(d.root.left)
        dr, pr = _collect(d.root.right)
        pairs = {**pl, **pr}
        for x, vx in dl.items():
            for y, vy in dr.items():
                pairs[frozenset((x, y))] = vx + d.root.length + vy
        return pairs
    _, pairs = _collect(d.root)
    return pairs


def path_distance(d: Dendrogram, leaf_a: str, leaf_b: str) -> float:
    """Tree-implied distance between two leaves, in swadesh units."""
    labels = d.leaves()
    for name in (leaf_a, leaf_b):
        if name not in labels:
            raise DomainError(f"unknown leaf {name!r}; tree has {sorted(labels)}")
    if leaf_a == leaf_b:
        return 0.0
    return leaf_distances(d)[frozenset((leaf_a, leaf_b))]


def theoretical_matrix(d: Dendrogram, list_size: int = 100) -> CoincidenceMatrix:
    """Coincidence matrix implied by the tree's path distances."""
    labels = d.leaves()
    k = len(labels)
    values = np.full((k, k), np.nan)
    if k > 1:
        pairs = leaf_distances(d)
        for i in range(k):
            for j in range(i + 1, k):
                l = pairs[frozenset((labels[i], labels[j]))]
                values[i, j] = values[j, i] = coincidence_from_distance(l)
    return CoincidenceMatrix(labels, values, list_size=list_size)


@dataclass(frozen=True)
class RootGeometry:
    """One concrete realization of the root link."""

    variant: str
    left_vertical: float
    right_vertical: float
    chain_width: float
    depth: float


def root_geometry(d: Dendrogram, variant: str = None, fraction: float = None) -> RootGeometry:
    """Realize the root link as verticals plus a chain, preserving its length.

    ``max_chain`` keeps the chain as wide as the subtree depths allow,
    ``deep_point`` spends the whole length on two verticals meeting in a
    single ancestor point, and ``parametrized`` interpolates between them
    (fraction 0 = max_chain, 1 = deep_point). Every realization preserves
    all leaf-to-leaf path distances.
    """
    if not isinstance(d.root, RootLink):
        raise IsolectError("dendrogram has no root link")
    link = d.root
    if variant is None:
        variant = link.variant or "deep_point"
        fraction = link.fraction if fraction is None else fraction
    h_l = attach_depth(link.left)
    h_r = attach_depth(link.right)
    shallow = min(h_l, h_r)
    deep = max(h_l, h_r)
    point_depth = (link.length + h_l + h_r) / 2.0
    if variant == "deep_point":
        depth = point_depth
    elif variant == "max_chain":
        depth = deep
    elif variant == "parametrized":
        f = 0.0 if fraction is None else float(fraction)
        depth = deep + f * (point_depth - deep)
    else:
        raise DomainError(f"unknown root variant {variant!r}")
    if depth < deep - 1e-9:
        # link shorter than the depth difference: degenerate, all chain
        depth = deep
    v_l = max(0.0, depth - h_l)
    v_r = max(0.0, depth - h_r)
    width = max(0.0, link.length - v_l - v_r)
    return RootGeometry(variant, v_l, v_r, width, depth)


def ancestor_depth(d: Dendrogram) -> float:
    """Depth of the deepest possible common ancestor point of the root link."""
    return root_geometry(d, variant="deep_point").depth


def root_variants(d: Dendrogram) -> tuple:
    """The two limiting realizations of the root link, as new dendrograms."""
    if not isinstance(d.root, RootLink):
        raise IsolectError("dendrogram has no root link")
    return (
        Dendrogram(replace(d.root, variant="max_chain", fraction=None)),
        Dendrogram(replace(d.root, variant="deep_point", fraction=None)),
    )


@dataclass(frozen=True)
class PairFit:
    """Measured vs tree-implied values for one language pair."""

    pair: tuple
    measured_distance: float
    theoretical_distance: float
    residual_distance: float
    measured_coincidence: float
    theoretical_coincidence: float
    residual_coincidence: float


@dataclass(frozen=True)
class FitReport:
    """Residual table plus summary statistics in both unit systems."""

    pairs: tuple
    rms_distance: float
    max_abs_distance: float
    rms_coincidence: float
    max_abs_coincidence: float


def fit_report(d: Dendrogram, measured: CoincidenceMatrix) -> FitReport:
    """Compare tree-implied distances and coincidences against measured ones.

    Residuals are theoretical minus measured; RMS is taken over all pairs.
    """
    tree_labels = set(d.leaves())
    matrix_labels = set(measured.labels)
    if tree_labels != matrix_labels:
        diff = sorted(tree_labels.symmetric_difference(matrix_labels))
        raise DomainError(f"tree and matrix label sets differ: {diff}")
    dists = leaf_distances(d)
    rows = []
    for a, b, c_meas in measured.pairs():
        l_meas = 100.0 * math.log(100.0 / c_meas)
        l_theo = dists[frozenset((a, b))]
        c_theo = coincidence_from_distance(l_theo)
        rows.append(
            PairFit(
                pair=(a, b),
                measured_distance=l_meas,
                theoretical_distance=l_theo,
                residual_distance=l_theo - l_meas,
                measured_coincidence=c_meas,
                theoretical_coincidence=c_theo,
                residual_coincidence=c_theo - c_meas,
            )
        )
    res_l = np.array([r.residual_distance for r in rows]) if rows else np.zeros(0)
    res_c = np.array([r.residual_coincidence for r in rows]) if rows else np.zeros(0)
    if rows:
        rms_l = float(np.sqrt(np.mean(res_l**2)))
        rms_c = float(np.sqrt(np.mean(res_c**2)))
        max_l = float(np.max(np.abs(res_l)))
        max_c = float(np.max(np.abs(res_c)))
    else:
        rms_l = rms_c = max_l = max_c = 0.0
    return FitReport(tuple(rows), rms_l, max_l, rms_c, max_c)

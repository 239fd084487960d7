"""Reconstruction of the prior state of a language system.

Given a matrix of pairwise swadesh distances the builder agglomerates the
two closest points (languages or already-built nodes) into an isolect chain,
estimating the chain width from the mean signed difference of distances to
all other active points. Because distances to an internal node are measured
from its attachment endpoint, which already sits at some depth, the raw mean
difference mixes that depth offset with the true horizontal offset; the
width estimate therefore corrects for the depth difference of the two
points being joined:

    width = | mean_m(L(i,m) - L(j,m)) + (depth_i - depth_j) |

Chains are kept horizontal (their isolects are synchronous by definition),
so the chain settles at the depth that splits the remaining pair distance
into the two verticals; when the data contradict the already-built geometry
the verticals are clamped at zero and the path discrepancy is recorded on
the join step instead of producing negative lengths. Distances from a fresh
node to every remaining point use the stem formula
(L(i,m) + L(j,m) - L(i,j)) / 2, which is exact for three languages.

The final two points are joined by a root link of known length but
undetermined configuration. Measurement contradictions accumulated by the
greedy pass can afterwards be spread over all free lengths by a nonnegative
least-squares adjustment.
"""

import itertools
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.optimize

from .dendrogram import ChainNode, Dendrogram, Leaf, RootLink, root_variants
from .errors import DomainError
from .lexstat import CoincidenceMatrix, distance_matrix

__all__ = [
    "JoinStep",
    "TwoLanguageFamily",
    "build_dendrogram",
    "redistribute_residuals",
    "root_variants",
    "three_language_tree",
    "two_language_family",
]


@dataclass(frozen=True)
class TwoLanguageFamily:
    """The one-parameter ambiguity family behind a single distance.

    Two languages at distance ``total`` may have diverged a' swadesh ago from
    the endpoints of a chain of width ``total - 2a'`` for any a' in
    [0, total/2]: a' = total/2 is divergence from a single point, a' = 0 the
    lexifier-pidgin limit of a contemporary chain of full width.
    """

    total: float

    def __post_init__(self):
        if not math.isfinite(self.total) or self.total < 0.0:
            raise DomainError(f"distance must be finite and >= 0, got {self.total!r}")

    @property
    def max_divergence(self) -> float:
        return self.total / 2.0

    def chain_width(self, a_prime: float) -> float:
        """Chain width induced by a divergence time of ``a_prime`` swadesh."""
        if not 0.0 <= a_prime <= self.total / 2.0 + 1e-12:
            raise DomainError(
                f"divergence parameter must lie in [0, {self.total / 2.0}], got {a_prime!r}"
            )
        return max(0.0, self.total - 2.0 * a_prime)

    def realize(self, a_prime: float) -> Dendrogram:
        """Concrete two-leaf tree for one member of the family."""
        width = self.chain_width(a_prime)
        node = ChainNode(
            id="n1",
            width=width,
            left=Leaf("1"),
            right=Leaf("2"),
            left_edge=a_prime,
            right_edge=a_prime,
            attach_side="left",
        )
        return Dendrogram(node)


def two_language_family(l12: float) -> TwoLanguageFamily:
    """Full ambiguity family for a two-language system."""
    return TwoLanguageFamily(float(l12))


@dataclass(frozen=True)
class JoinStep:
    """Bookkeeping for one agglomeration step.

    ``pair`` holds the ids of the joined items (leaf labels or node ids).
    ``divergence_length`` is the symmetric closed-form vertical
    (pair_distance - chain_width) / 2 before any clamping; the realized
    verticals are ``left_vertical``/``right_vertical``. ``path_residual`` is
    the excess of the realized pair path over the working distance (positive
    only when clamping fired). ``observer_residuals`` are the per-observer
    deviations from the mean signed difference.
    """

    node_id: str
    pair: tuple
    pair_distance: float
    mean_signed_difference: float
    depth_correction: float
    chain_width: float
    divergence_length: float
    left_vertical: float
    right_vertical: float
    orientation: str
    observer_residuals: tuple
    path_residual: float


def three_language_tree(
    l12: float, l13: float, l23: float, labels: tuple = ("1", "2", "3")
) -> Dendrogram:
    """Closed-form reconstruction for three languages.

    ``l12`` must be the smallest of the three distances (reorder before
    calling). The chain width is the difference of the two distances to the
    third language, oriented so the third language attaches above the nearer
    of the pair; the stem comes out identical whether counted from language 1
    or language 2.
    """
    for name, value in (("l12", l12), ("l13", l13), ("l23", l23)):
        if not math.isfinite(value) or value < 0.0:
            raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
    if l12 > min(l13, l23) + 1e-9:
        raise DomainError(
            f"l12={l12!r} must be the minimal distance (got l13={l13!r}, l23={l23!r})"
        )
    if l13 + l23 < l12 - 1e-9 or l12 + l23 < l13 - 1e-9 or l12 + l13 < l23 - 1e-9:
        warnings.warn(
            f"triangle inequality violated for ({l12}, {l13}, {l23}); lengths clamped",
            stacklevel=2,
        )
    a, b, c = labels
    width = abs(l13 - l23)
    attach_side = "right" if l13 >= l23 else "left"  # third language joins the nearer one
    vertical = max(0.0, (l12 - width) / 2.0)
    node = ChainNode(
        id="n1",
        width=width,
        left=Leaf(a),
        right=Leaf(b),
        left_edge=vertical,
        right_edge=vertical,
        attach_side=attach_side,
    )
    stem = max(0.0, (l13 + l23 - l12) / 2.0)
    return Dendrogram(RootLink(length=stem, left=node, right=Leaf(c)))


class _Item:
    """An active point of the agglomeration: a leaf or a built node."""

    __slots__ = ("uid", "node", "depth", "key")

    def __init__(self, uid, node, depth, key):
        self.uid = uid
        self.node = node
        self.depth = depth
        self.key = key


def build_dendrogram(m: CoincidenceMatrix) -> tuple:
    """Greedy reconstruction of the whole system from a coincidence matrix.

    Returns ``(dendrogram, steps)`` where ``steps`` records one ``JoinStep``
    per created chain node in creation order. Requires at least two
    languages; with exactly two the result is a bare root link and no steps.
    """
    if m.k < 2:
        raise DomainError(f"need at least 2 languages to reconstruct, got {m.k}")
    dm = distance_matrix(m)

    items = [_Item(label, Leaf(label), 0.0, label) for label in dm.labels]
    dist = {}
    for i, a in enumerate(dm.labels):
        for j in range(i + 1, len(dm.labels)):
            dist[frozenset((a, dm.labels[j]))] = float(dm.values[i, j])

    steps = []
    counter = 0
    while len(items) > 2:
        u, v = min(
            itertools.combinations(items, 2),
            key=lambda p: (
                dist[frozenset((p[0].uid, p[1].uid))],
                min(p[0].key, p[1].key),
                max(p[0].key, p[1].key),
            ),
        )
        if u.key > v.key:
            u, v = v, u
        l_pair = dist[frozenset((u.uid, v.uid))]
        observers = [it for it in items if it is not u and it is not v]
        diffs = [
            dist[frozenset((u.uid, it.uid))] - dist[frozenset((v.uid, it.uid))]
            for it in observers
        ]
        dbar = sum(diffs) / len(diffs)
        correction = u.depth - v.depth
        signed_width = dbar + correction
        width = abs(signed_width)
        # positive signed width: u lies horizontally farther from the rest,
        # so future attachments happen at v's endpoint
        attach_side = "right" if signed_width >= 0.0 else "left"

        level = (l_pair - width + u.depth + v.depth) / 2.0
        level = max(level, u.depth, v.depth)
        left_vertical = level - u.depth
        right_vertical = level - v.depth
        path_residual = (left_vertical + width + right_vertical) - l_pair
        if path_residual > 1e-9:
            warnings.warn(
                f"join of ({u.uid}, {v.uid}) contradicts the built geometry; "
                f"verticals clamped, path excess {path_residual:.3f} swadesh",
                stacklevel=2,
            )

        counter += 1
        node_id = f"n{counter}"
        node = ChainNode(
            id=node_id,
            width=width,
            left=u.node,
            right=v.node,
            left_edge=left_vertical,
            right_edge=right_vertical,
            attach_side=attach_side,
        )
        steps.append(
            JoinStep(
                node_id=node_id,
                pair=(u.uid, v.uid),
                pair_distance=l_pair,
                mean_signed_difference=dbar,
                depth_correction=correction,
                chain_width=width,
                divergence_length=(l_pair - width) / 2.0,
                left_vertical=left_vertical,
                right_vertical=right_vertical,
                orientation=attach_side,
                observer_residuals=tuple(
                    (it.uid, diff - dbar) for it, diff in zip(observers, diffs)
                ),
                path_residual=max(0.0, path_residual),
            )
        )

        new_item = _Item(node_id, node, level, min(u.key, v.key))
        for it in observers:
            stem = (
                dist[frozenset((u.uid, it.uid))]
                + dist[frozenset((v.uid, it.uid))]
                - l_pair
            ) / 2.0
            if stem < 0.0:
                warnings.warn(
                    f"negative stem distance from {node_id} to {it.uid} clamped to 0",
                    stacklevel=2,
                )
                stem = 0.0
            dist[frozenset((node_id, it.uid))] = stem
        items = observers + [new_item]

    a, b = sorted(items, key=lambda it: it.key)
    length = dist[frozenset((a.uid, b.uid))]
    tree = Dendrogram(RootLink(length=length, left=a.node, right=b.node))
    return tree, tuple(steps)


def _parameters(d: Dendrogram):
    """Free lengths of the tree in a stable order, with their setters.

    Returns (values, rebuild) where ``rebuild(new_values)`` produces a new
    dendrogram with the lengths replaced, topology and orientations fixed.
    """
    values = []

    def collect(node):
        if isinstance(node, Leaf):
            return
        values.append(node.left_edge)
        values.append(node.right_edge)
        values.append(node.width)
        collect(node.left)
        collect(node.right)

    if isinstance(d.root, RootLink):
        collect(d.root.left)
        collect(d.root.right)
        values.append(d.root.length)
    else:
        collect(d.root)

    def rebuild(new_values):
        new_values = list(new_values)
        pos = 0

        def apply(node):
            nonlocal pos
            if isinstance(node, Leaf):
                return node
            left_edge = new_values[pos]
            right_edge = new_values[pos + 1]
            width = new_values[pos + 2]
            pos += 3
            return replace(
                node,
                left_edge=left_edge,
                right_edge=right_edge,
                width=width,
                left=apply(node.left),
                right=apply(node.right),
            )

        if isinstance(d.root, RootLink):
            left = apply(d.root.left)
            right = apply(d.root.right)
            return Dendrogram(replace(d.root, left=left, right=right, length=new_values[-1]))
        return Dendrogram(apply(d.root))

    return np.array(values), rebuild


def _design_matrix(d: Dendrogram, measured: CoincidenceMatrix):
    """0/1 matrix mapping free lengths to pairwise path distances.

    The parameter layout must match ``_parameters``: three slots per chain
    node in pre-order (left edge, right edge, width), root length last.
    """
    order = []

    def layout(node):
        if isinstance(node, Leaf):
            return
        order.append(node.id)
        layout(node.left)
        layout(node.right)

    if isinstance(d.root, RootLink):
        layout(d.root.left)
        layout(d.root.right)
    else:
        layout(d.root)
    offsets = {node_id: 3 * i for i, node_id in enumerate(order)}
    n_params = 3 * len(order) + (1 if isinstance(d.root, RootLink) else 0)
    root_index = n_params - 1 if isinstance(d.root, RootLink) else None

    def collect(node):
        """Per-leaf parameter index lists to the attach endpoint, plus pairs."""
        if isinstance(node, Leaf):
            return {node.label: ()}, {}
        base = offsets[node.id]
        dl, pl = collect(node.left)
        dr, pr = collect(node.right)
        dl = {x: ix + (base,) for x, ix in dl.items()}
        dr = {x: ix + (base + 1,) for x, ix in dr.items()}
        pairs = {**pl, **pr}
        for x, ix in dl.items():
            for y, iy in dr.items():
                pairs[frozenset((x, y))] = ix + (base + 2,) + iy
        if node.attach_side == "left":
            datt = {**dl, **{x: ix + (base + 2,) for x, ix in dr.items()}}
        else:
            datt = {**{x: ix + (base + 2,) for x, ix in dl.items()}, **dr}
        return datt, pairs

    if isinstance(d.root, RootLink):
        dl, pl = collect(d.root.left)
        dr, pr = collect(d.root.right)
        pairs = {**pl, **pr}
        for x, ix in dl.items():
            for y, iy in dr.items():
                pairs[frozenset((x, y))] = ix + (root_index,) + iy
    else:
        _, pairs = collect(d.root)

    rows = []
    rhs = []
    for a, b, c in measured.pairs():
        row = np.zeros(n_params)
        for idx in pairs[frozenset((a, b))]:
            row[idx] += 1.0
        rows.append(row)
        rhs.append(100.0 * math.log(100.0 / c))
    return np.array(rows), np.array(rhs)


def redistribute_residuals(d: Dendrogram, measured: CoincidenceMatrix) -> Dendrogram:
    """Spread measurement contradictions over all free lengths.

    Minimizes the sum of squared differences between tree paths and measured
    distances over all divergence lengths, chain widths and the root-link
    length, subject to nonnegativity, with topology and orientations fixed.
    Returns the input tree unchanged when no improvement is possible.
    """
    tree_labels = set(d.leaves())
    matrix_labels = set(measured.labels)
    if tree_labels != matrix_labels:
        diff = sorted(tree_labels.symmetric_difference(matrix_labels))
        raise DomainError(f"tree and matrix label sets differ: {diff}")
    x0, rebuild = _parameters(d)
    if x0.size == 0:
        return d
    design, rhs = _design_matrix(d, measured)
    sse0 = float(np.sum((design @ x0 - rhs) ** 2))
    solution, rnorm = scipy.optimize.nnls(design, rhs)
    if rnorm**2 >= sse0 - 1e-12:
        return d
    return rebuild(solution)


def build_and_adjust(m: CoincidenceMatrix) -> tuple:
    """Convenience pipeline: greedy build followed by the least-squares pass."""
    tree, steps = build_dendrogram(m)
    adjusted = redistribute_residuals(tree, m)
    return tree, adjusted, steps

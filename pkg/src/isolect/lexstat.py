"""Scalar lexicostatistic formulas and matrix-level transforms.

Distances are measured in swadesh units: one swadesh corresponds to a 1%
mismatch of the basic list, so a coincidence percentage C on (0, 100] maps
to the distance L = 100*ln(100/C) and back via C = 100*exp(-L/100).
Coincidence values are kept as reals on the 0..100 scale throughout;
rounding to whole percent happens only in display code.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, InputFormatError

__all__ = [
    "BorrowingAdjustment",
    "CognacyTable",
    "CoincidenceMatrix",
    "DistanceMatrix",
    "adjust_coincidence_for_borrowings",
    "adjust_matrix_for_borrowings",
    "coincidence_from_cognacy",
    "coincidence_from_distance",
    "distance_from_coincidence",
    "distance_matrix",
]


def distance_from_coincidence(c: float) -> float:
    """Convert a coincidence percentage to a distance in swadesh units."""
    if not math.isfinite(c) or c <= 0.0 or c > 100.0:
        raise DomainError(f"coincidence must lie on (0, 100], got {c!r}")
    return 100.0 * math.log(100.0 / c)


def coincidence_from_distance(l: float) -> float:
    """Convert a swadesh distance back to a coincidence percentage."""
    if not math.isfinite(l) or l < 0.0:
        raise DomainError(f"swadesh distance must be finite and >= 0, got {l!r}")
    return 100.0 * math.exp(-l / 100.0)


def _check_labels(labels) -> tuple:
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        dupes = sorted({x for x in labels if labels.count(x) > 1})
        raise DomainError(f"duplicate language labels: {dupes}")
    if not labels:
        raise DomainError("at least one language label required")
    return labels


def _symmetric_array(labels, values, kind: str, check) -> np.ndarray:
    k = len(labels)
    arr = np.array(values, dtype=float)
    if arr.shape != (k, k):
        raise DomainError(f"{kind} matrix must be {k}x{k}, got shape {arr.shape}")
    for i in range(k):
        for j in range(i + 1, k):
            if not np.isclose(arr[i, j], arr[j, i], rtol=0.0, atol=1e-9):
                raise DomainError(
                    f"asymmetric {kind} for pair ({labels[i]}, {labels[j]}): "
                    f"{arr[i, j]!r} vs {arr[j, i]!r}"
                )
            check(arr[i, j], labels[i], labels[j])
    np.fill_diagonal(arr, np.nan)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CoincidenceMatrix:
    """Symmetric matrix of basic-list coincidence percentages.

    The diagonal is meaningless and stored as NaN; ``list_size`` is the
    number of basic-list slots behind the percentages.
    """

    labels: tuple
    values: np.ndarray
    list_size: int = 100

    def __post_init__(self):
        labels = _check_labels(self.labels)
        object.__setattr__(self, "labels", labels)

        def check(v, a, b):
            if not np.isfinite(v) or v <= 0.0 or v > 100.0:
                raise DomainError(
                    f"coincidence for pair ({a}, {b}) must lie on (0, 100], got {v!r}"
                )

        object.__setattr__(
            self, "values", _symmetric_array(labels, self.values, "coincidence", check)
        )
        if int(self.list_size) <= 0:
            raise DomainError(f"list_size must be positive, got {self.list_size!r}")
        object.__setattr__(self, "list_size", int(self.list_size))

    @property
    def k(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DomainError(f"unknown language {label!r}") from None

    def value(self, a: str, b: str) -> float:
        return float(self.values[self.index(a), self.index(b)])

    def pairs(self):
        """Yield (label_a, label_b, value) for all i < j in label order."""
        for i in range(self.k):
            for j in range(i + 1, self.k):
                yield self.labels[i], self.labels[j], float(self.values[i, j])


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric matrix of pairwise swadesh distances (diagonal NaN)."""

    labels: tuple
    values: np.ndarray

    def __post_init__(self):
        labels = _check_labels(self.labels)
        object.__setattr__(self, "labels", labels)

        def check(v, a, b):
            if not np.isfinite(v) or v < 0.0:
                raise DomainError(
                    f"distance for pair ({a}, {b}) must be finite and >= 0, got {v!r}"
                )

        object.__setattr__(
            self, "values", _symmetric_array(labels, self.values, "distance", check)
        )

    @property
    def k(self) -> int:
        return len(self.labels)

    def value(self, a: str, b: str) -> float:
        i = self.labels.index(a)
        j = self.labels.index(b)
        return float(self.values[i, j])

    def pairs(self):
        for i in range(self.k):
            for j in range(i + 1, self.k):
                yield self.labels[i], self.labels[j], float(self.values[i, j])


def distance_matrix(m: CoincidenceMatrix) -> DistanceMatrix:
    """Convert every off-diagonal coincidence entry to a swadesh distance."""
    k = m.k
    out = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            try:
                out[i, j] = out[j, i] = distance_from_coincidence(m.values[i, j])
            except DomainError as exc:
                raise DomainError(f"pair ({m.labels[i]}, {m.labels[j]}): {exc}") from None
    return DistanceMatrix(m.labels, out)


@dataclass(frozen=True)
class CognacyTable:
    """Per-language cognate-class assignments over a shared slot universe.

    ``class_ids`` holds one int per (language, slot); equality within a slot
    column means the two languages carry the same cognate class there. A
    negative id marks a missing entry. ``borrowed`` flags loanword entries.
    """

    languages: tuple
    slots: tuple
    class_ids: np.ndarray
    borrowed: np.ndarray

    def __post_init__(self):
        languages = _check_labels(self.languages)
        slots = tuple(self.slots)
        if len(set(slots)) != len(slots):
            raise InputFormatError("duplicate slot identifiers in cognacy table")
        ids = np.ascontiguousarray(self.class_ids, dtype=np.int64)
        flags = np.ascontiguousarray(self.borrowed, dtype=bool)
        shape = (len(languages), len(slots))
        if ids.shape != shape or flags.shape != shape:
            raise InputFormatError(
                f"cognacy arrays must have shape {shape}, got {ids.shape} and {flags.shape}"
            )
        ids.setflags(write=False)
        flags.setflags(write=False)
        object.__setattr__(self, "languages", languages)
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "class_ids", ids)
        object.__setattr__(self, "borrowed", flags)

    @classmethod
    def from_rows(cls, rows) -> "CognacyTable":
        """Build a table from (language, slot, class_token, borrowed) rows.

        Languages and slots keep first-appearance order; class tokens are
        opaque and compared by equality within each slot.
        """
        languages: list = []
        slots: list = []
        lang_index: dict = {}
        slot_index: dict = {}
        entries: dict = {}
        for language, slot, token, borrowed in rows:
            key = (language, slot)
            if key in entries:
                raise InputFormatError(
                    f"duplicate cognacy row for language {language!r}, slot {slot!r}"
                )
            if language not in lang_index:
                lang_index[language] = len(languages)
                languages.append(language)
            if slot not in slot_index:
                slot_index[slot] = len(slots)
                slots.append(slot)
            entries[key] = (token, bool(borrowed))
        ids = np.full((len(languages), len(slots)), -1, dtype=np.int64)
        flags = np.zeros((len(languages), len(slots)), dtype=bool)
        for j, slot in enumerate(slots):
            token_ids: dict = {}
            for i, language in enumerate(languages):
                entry = entries.get((language, slot))
                if entry is None:
                    continue
                token, borrowed = entry
                if token not in token_ids:
                    token_ids[token] = len(token_ids)
                ids[i, j] = token_ids[token]
                flags[i, j] = borrowed
        return cls(tuple(languages), tuple(slots), ids, flags)

    @property
    def list_size(self) -> int:
        return len(self.slots)

    def borrowed_slot_count(self) -> int:
        """Number of distinct slots flagged as borrowed in any language."""
        return int(np.count_nonzero(self.borrowed.any(axis=0)))

    def iter_rows(self):
        """Yield (language, slot, class_token, borrowed) rows, language-major."""
        for i, language in enumerate(self.languages):
            for j, slot in enumerate(self.slots):
                cid = int(self.class_ids[i, j])
                if cid < 0:
                    continue
                yield language, slot, f"c{cid}", bool(self.borrowed[i, j])


def coincidence_from_cognacy(
    table: CognacyTable, exclude_borrowed: bool = False
) -> CoincidenceMatrix:
    """Count shared cognate classes per language pair into a matrix.

    With ``exclude_borrowed`` every slot flagged as borrowed in any language
    is dropped for all languages, and the effective list size shrinks
    accordingly. Values are real percentages, never rounded.
    """
    missing = np.argwhere(table.class_ids < 0)
    if missing.size:
        per_lang: dict = {}
        for i, j in missing:
            per_lang.setdefault(table.languages[i], []).append(table.slots[j])
        detail = "; ".join(
            f"{lang}: {', '.join(slots[:10])}" + (" ..." if len(slots) > 10 else "")
            for lang, slots in per_lang.items()
        )
        raise InputFormatError(f"languages with missing slots: {detail}")
    if exclude_borrowed:
        keep = ~table.borrowed.any(axis=0)
    else:
        keep = np.ones(len(table.slots), dtype=bool)
    n_eff = int(np.count_nonzero(keep))
    if n_eff == 0:
        raise InputFormatError("no slots left after excluding borrowed entries")
    classes = np.ascontiguousarray(table.class_ids[:, keep])
    counts = _kernels.pair_shared_counts(classes)
    k = len(table.languages)
    for i in range(k):
        for j in range(i + 1, k):
            if counts[i, j] == 0:
                raise DomainError(
                    f"pair ({table.languages[i]}, {table.languages[j]}) shares no "
                    "cognate classes; coincidence of 0 has no finite distance"
                )
    values = 100.0 * counts.astype(float) / n_eff
    return CoincidenceMatrix(table.languages, values, list_size=n_eff)


@dataclass(frozen=True)
class BorrowingAdjustment:
    """Effect of dropping ``n3`` borrowed slots from an ``n0``-slot list.

    Excluding the same ``n3`` non-coinciding slots everywhere multiplies all
    coincidences by n0/(n0-n3), which subtracts the constant
    ``shift = 100*ln(n0/(n0-n3))`` from every pairwise distance.
    """

    n0: int
    n3: int
    shift: float = field(init=False)

    def __post_init__(self):
        if self.n0 <= 0 or self.n3 < 0 or self.n3 >= self.n0:
            raise DomainError(
                f"need 0 <= n3 < n0 with n0 > 0, got n0={self.n0!r}, n3={self.n3!r}"
            )
        object.__setattr__(
            self, "shift", 100.0 * math.log(self.n0 / (self.n0 - self.n3))
        )


def adjust_coincidence_for_borrowings(c: float, adj: BorrowingAdjustment) -> float:
    """Rescale one coincidence value to the borrowing-excluded list."""
    if not math.isfinite(c) or c <= 0.0 or c > 100.0:
        raise DomainError(f"coincidence must lie on (0, 100], got {c!r}")
    adjusted = c * adj.n0 / (adj.n0 - adj.n3)
    if adjusted > 100.0:
        raise DomainError(
            f"adjusted coincidence {adjusted:.6f} exceeds 100; "
            f"n3={adj.n3} is inconsistent with c={c!r}"
        )
    return adjusted


def adjust_matrix_for_borrowings(
    m: CoincidenceMatrix, adj: BorrowingAdjustment
) -> CoincidenceMatrix:
    """Apply the borrowing-exclusion rescale to every pair of a matrix."""
    if m.list_size != adj.n0:
        raise DomainError(
            f"matrix list_size {m.list_size} does not match adjustment n0 {adj.n0}"
        )
    k = m.k
    out = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(i + 1, k):
            try:
                out[i, j] = out[j, i] = adjust_coincidence_for_borrowings(
                    float(m.values[i, j]), adj
                )
            except DomainError as exc:
                raise DomainError(f"pair ({m.labels[i]}, {m.labels[j]}): {exc}") from None
    return CoincidenceMatrix(m.labels, out, list_size=adj.n0 - adj.n3)

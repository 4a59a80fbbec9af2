"""Hashed unigram + bigram features, L2-normalized."""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch
from .rng import hash64

FEATURE_HASH_SEED = 0


class FeatureVector(NamedTuple):
    """Sparse vector: strictly increasing ``indices`` below ``dim`` with ``values``."""

    dim: int
    indices: np.ndarray
    values: np.ndarray

    @classmethod
    def checked(cls, dim, indices, values) -> "FeatureVector":
        indices = np.asarray(indices, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        if indices.shape != values.shape or indices.ndim != 1:
            raise ValueError("indices and values must be 1-d arrays of equal length")
        if indices.size and (indices[0] < 0 or indices[-1] >= dim
                             or np.any(np.diff(indices) <= 0)):
            raise ValueError("indices must be strictly increasing and inside [0, dim)")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        return cls(dim, indices, values)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out


class _BucketTable(dict):
    """gram -> bucket memo for one dimension, filled on first lookup.

    Bigram keys are ``(left, right)`` tuples, hashed as ``"left right"``.
    """

    def __init__(self, dim: int):
        super().__init__()
        self.dim = dim

    def __missing__(self, gram) -> int:
        if len(self) >= _TABLE_LIMIT:
            self.clear()
        text = gram if isinstance(gram, str) else gram[0] + " " + gram[1]
        idx = self[gram] = hash64(text, FEATURE_HASH_SEED) % self.dim
        return idx


_TABLE_LIMIT = 1 << 21
_tables: dict[int, _BucketTable] = {}


def _table(dim: int) -> _BucketTable:
    table = _tables.get(dim)
    if table is None:
        table = _tables[dim] = _BucketTable(dim)
    return table


def bucket(gram: str, dim: int) -> int:
    """Feature index of a unigram or space-joined bigram."""
    if " " in gram:
        left, right = gram.split(" ", 1)
        return _table(dim)[(left, right)]
    return _table(dim)[gram]


def featurize(seq: Sequence[str], dim: int) -> FeatureVector:
    """Count unigrams and adjacent bigrams into ``dim`` hashed buckets.

    Colliding grams add up. The count vector is scaled to unit L2 norm.
    """
    if dim < 2:
        raise ValueError("feature dimension must be at least 2")
    if not seq:
        raise ValueError("cannot featurize an empty sequence")
    rows = featurize_batch([seq], dim)
    return FeatureVector(dim, rows.cols, rows.vals)


class Rows(NamedTuple):
    """Compressed sparse rows without the scipy overhead, for the SGD loop."""

    cols: np.ndarray
    vals: np.ndarray
    indptr: np.ndarray
    dim: int

    @property
    def n_rows(self) -> int:
        return len(self.indptr) - 1

    @classmethod
    def from_lists(cls, rows: Sequence[tuple[list[int], list[float]]], dim: int) -> "Rows":
        cols: list[int] = []
        vals: list[float] = []
        indptr = [0]
        for idx, val in rows:
            cols += idx
            vals += val
            indptr.append(len(cols))
        return cls(np.array(cols, dtype=np.int64), np.array(vals, dtype=np.float64),
                   np.array(indptr, dtype=np.int64), dim)

    @classmethod
    def from_arrays(cls, rows: Sequence[tuple[np.ndarray, np.ndarray]], dim: int) -> "Rows":
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum([len(idx) for idx, _ in rows], out=indptr[1:])
        return cls(np.concatenate([idx for idx, _ in rows]),
                   np.concatenate([val for _, val in rows]), indptr, dim)

    @classmethod
    def from_vectors(cls, vectors: Iterable[FeatureVector], dim: int) -> "Rows":
        vectors = list(vectors)
        for v in vectors:
            if v.dim != dim:
                raise DimensionMismatch(f"feature dimension {v.dim} != model dimension {dim}")
        return cls.from_lists([(v.indices.tolist(), v.values.tolist()) for v in vectors], dim)

    def concat(self, other: "Rows") -> "Rows":
        return Rows(np.concatenate([self.cols, other.cols]),
                    np.concatenate([self.vals, other.vals]),
                    np.concatenate([self.indptr, other.indptr[1:] + self.indptr[-1]]),
                    self.dim)

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.cols[lo:hi], self.vals[lo:hi]

    def to_csr(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.vals, self.cols, self.indptr), shape=(self.n_rows, self.dim))

    def row_ids(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_rows), np.diff(self.indptr))


def featurize_batch(seqs: Iterable[Sequence[str]], dim: int) -> Rows:
    """:func:`featurize` for many sequences at once, as :class:`Rows`.

    Only the bucket lookups run per token in Python; counting, sorting and
    normalization are done once for the whole batch.
    """
    table = _table(dim)
    lookup = table.__getitem__
    cols: list[int] = []
    lengths = []
    for seq in seqs:
        before = len(cols)
        cols += map(lookup, seq)
        cols += map(lookup, zip(seq, seq[1:]))
        lengths.append(len(cols) - before)
    n_rows = len(lengths)
    keys = np.array(cols, dtype=np.int64)
    keys += np.repeat(np.arange(n_rows, dtype=np.int64) * dim, lengths)
    uniq, counts = np.unique(keys, return_counts=True)
    row = uniq // dim
    counts = counts.astype(np.float64)
    norms = np.sqrt(np.bincount(row, weights=counts * counts, minlength=n_rows))
    indptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(row, minlength=n_rows), out=indptr[1:])
    return Rows(uniq - row * dim, counts / norms[row], indptr, dim)


def stack(vectors: Iterable[FeatureVector], dim: int) -> sp.csr_matrix:
    """Rows of a CSR matrix, one per vector."""
    vectors = list(vectors)
    for v in vectors:
        if v.dim != dim:
            raise DimensionMismatch(f"feature dimension {v.dim} != model dimension {dim}")
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    np.cumsum([len(v.indices) for v in vectors], out=indptr[1:])
    if vectors:
        indices = np.concatenate([v.indices for v in vectors])
        data = np.concatenate([v.values for v in vectors])
    else:
        indices = np.zeros(0, dtype=np.int64)
        data = np.zeros(0)
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))

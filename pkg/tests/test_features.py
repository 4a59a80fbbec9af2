import math

import numpy as np
import pytest

from mtvaug.errors import DimensionMismatch
from mtvaug.features import FeatureVector, Rows, featurize, stack
from mtvaug.rng import hash64
from mtvaug.textcore import TokenSequence, tokenize


def test_single_token():
    fv = featurize(TokenSequence(["a"]), 16)
    assert fv.indices.tolist() == [hash64("a") % 16] and fv.values.tolist() == [1.0]


def test_repeated_token():
    fv = featurize(TokenSequence(["a", "a"]), 1 << 20)
    dense = fv.to_dense()
    assert dense[hash64("a") % (1 << 20)] == pytest.approx(2 / math.sqrt(5))
    assert dense[hash64("a a") % (1 << 20)] == pytest.approx(1 / math.sqrt(5))


def test_brute_force_counts():
    seq = tokenize("the cat saw the other cat , the end")
    dim = 32
    expected = np.zeros(dim)
    grams = list(seq) + [f"{a} {b}" for a, b in zip(seq, seq[1:])]
    for g in grams:
        expected[hash64(g) % dim] += 1
    expected /= np.linalg.norm(expected)
    got = featurize(seq, dim).to_dense()
    assert np.allclose(got, expected, rtol=0, atol=1e-15)
    assert np.linalg.norm(got) == pytest.approx(1.0, abs=1e-12)


def test_feature_vector_checks():
    FeatureVector.checked(4, [0, 3], [0.5, 0.5])
    with pytest.raises(ValueError):
        FeatureVector.checked(4, [3, 0], [0.5, 0.5])
    with pytest.raises(ValueError):
        FeatureVector.checked(4, [0, 4], [0.5, 0.5])
    with pytest.raises(ValueError):
        featurize(TokenSequence(["a"]), 1)


def test_rows_and_stack_agree():
    vecs = [featurize(tokenize(t), 64) for t in ["a b c", "b c", "c c c d"]]
    X = stack(vecs, 64).toarray()
    rows = Rows.from_vectors(vecs, 64)
    assert rows.n_rows == 3
    dense = np.zeros((3, 64))
    np.add.at(dense, (rows.row_ids(), rows.cols), rows.vals)
    assert np.array_equal(dense, X)
    both = rows.concat(rows)
    assert both.n_rows == 6 and both.indptr[-1] == 2 * rows.indptr[-1]
    with pytest.raises(DimensionMismatch):
        stack(vecs, 32)

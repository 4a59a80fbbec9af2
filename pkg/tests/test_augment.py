from collections import Counter
from decimal import ROUND_HALF_UP, Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from mtvaug.augment import (AugmentationConfig, Operator, augment, augment_dataset,
                            perturbation_count, pervasive_dropout, positional_shuffling,
                            token_injection, token_substitution)
from mtvaug.rng import RandomStream
from mtvaug.textcore import Dataset, SynonymLexicon, TokenSequence

LEX = SynonymLexicon({"a": ["x", "y"], "b": ["z"], "good": ["fine", "nice"]})
INJ_LEX = SynonymLexicon({"a": ["x", "y"], "b": ["z"], "good": ["fine"]})


@pytest.mark.parametrize("alpha,length,expected", [
    (0.5, 10, 5), (0.0, 10, 0), (0.05, 7, 1), (0.35, 10, 4), (0.25, 2, 1), (0.15, 10, 2),
    (1.0, 3, 3), (0.3, 5, 2), (0.45, 10, 5),
])
def test_perturbation_count_examples(alpha, length, expected):
    assert perturbation_count(alpha, length) == expected


@given(st.floats(0, 1), st.integers(1, 500))
def test_perturbation_count_rule(alpha, length):
    n = perturbation_count(alpha, length)
    exact = int((Decimal(repr(alpha)) * length).quantize(Decimal(1), rounding=ROUND_HALF_UP))
    assert n == (0 if alpha == 0 else max(1, exact))
    assert perturbation_count(alpha, length, cap=True) == min(n, length)


def test_perturbation_count_rejects_empty():
    with pytest.raises(ValueError):
        perturbation_count(0.1, 0)


def test_config_validates_alpha():
    with pytest.raises(ValueError):
        AugmentationConfig(Operator.DROPOUT, 1.5)
    with pytest.raises(ValueError):
        AugmentationConfig(Operator.DROPOUT, -0.1)
    assert AugmentationConfig("shuffling", 0).is_identity


def test_substitution_single_eligible():
    out = token_substitution(TokenSequence(["the", "movie", "was", "good"]),
                             {"good": ["fine"]}, 1, RandomStream(0))
    assert list(out) == ["the", "movie", "was", "fine"]


def test_injection_without_headwords_is_identity():
    seq = TokenSequence(["p", "q", "r"])
    assert token_injection(seq, LEX, 3, RandomStream(1)) == seq


def test_dropout_keeps_one_token():
    assert list(pervasive_dropout(TokenSequence(["a"]), 1, RandomStream(0))) == ["a"]
    assert len(pervasive_dropout(TokenSequence(list("abcd")), 9, RandomStream(0))) == 1


def test_shuffling_single_token():
    assert list(positional_shuffling(TokenSequence(["a"]), 3, RandomStream(0))) == ["a"]


@pytest.mark.parametrize("op", list(Operator))
def test_zero_perturbations_identity(op):
    seq = TokenSequence(["a", "b", "good", "c"])
    out = augment(seq, AugmentationConfig(op, 0.0), LEX, RandomStream(5))
    assert out == seq


def test_dispatch_lengths():
    full = SynonymLexicon({w: ["s"] for w in "abcdefghij"})
    seq = TokenSequence(list("abcdefghij"))
    assert len(augment(seq, AugmentationConfig("dropout", 0.5), full, RandomStream(0))) == 5
    assert len(augment(seq, AugmentationConfig("injection", 0.5), full, RandomStream(0))) == 15


def test_determinism():
    seq = TokenSequence(["a", "b", "good", "c", "a"])
    for op in Operator:
        cfg = AugmentationConfig(op, 0.4)
        outs = {augment(seq, cfg, LEX, RandomStream(42)) for _ in range(3)}
        assert len(outs) == 1


def test_substitution_full_coverage_edit_count():
    full = SynonymLexicon({w: [w + "_s"] for w in "abcdefgh"})
    rng = RandomStream(9)
    for length in range(1, 9):
        seq = TokenSequence(list("abcdefgh"[:length]))
        for n in range(0, 10):
            out = token_substitution(seq, full, n, rng)
            assert sum(x != y for x, y in zip(seq, out)) == min(n, length)


def test_augment_dataset_keeps_labels_and_groups_copies():
    ds = Dataset.from_pairs([("pos", "a good b"), ("neg", "b a c")])
    out = augment_dataset(ds, AugmentationConfig("substitution", 0.5), LEX, 3, RandomStream(0),
                          include_original=True)
    assert len(out) == 8
    assert out.labels == [0, 0, 0, 0, 1, 1, 1, 1]
    assert out.examples[0] == ds.examples[0]


def _is_subsequence(short, long):
    it = iter(long)
    return all(tok in it for tok in short)


words = st.sampled_from(["a", "b", "c", "good", "d"])
seqs = st.lists(words, min_size=1, max_size=12).map(TokenSequence)


@settings(max_examples=300)
@given(seqs, st.floats(0, 1), st.integers(0, 2**32))
def test_operator_laws(seq, alpha, seed):
    l = len(seq)
    n = perturbation_count(alpha, l)
    sub = augment(seq, AugmentationConfig("substitution", alpha), LEX, RandomStream(seed))
    assert len(sub) == l
    assert all(x == y or y in LEX[x] for x, y in zip(seq, sub))
    drop = augment(seq, AugmentationConfig("dropout", alpha), LEX, RandomStream(seed))
    assert len(drop) == max(1, l - n) and _is_subsequence(drop, seq)
    inj = augment(seq, AugmentationConfig("injection", alpha), LEX, RandomStream(seed))
    assert l <= len(inj) <= l + n and _is_subsequence(seq, inj)
    shuf = augment(seq, AugmentationConfig("shuffling", alpha), LEX, RandomStream(seed))
    assert sorted(shuf) == sorted(seq)


def _frequencies(fn, draws, seed):
    rng = RandomStream(seed)
    return Counter(tuple(fn(rng)) for _ in range(draws))


@pytest.mark.parametrize("case", [
    ("shuffling", ("a", "b", "c"), 1),
    ("dropout", ("a", "b", "c", "d"), 2),
    ("injection", ("good", "movie"), 1),
    ("substitution", ("good", "good"), 2),
    ("injection", ("a", "c", "b"), 2),
])
def test_distribution_small(case):
    name, seq, n = case
    seq = TokenSequence(seq)
    fn = {
        "shuffling": lambda r: positional_shuffling(seq, n, r),
        "dropout": lambda r: pervasive_dropout(seq, n, r),
        "injection": lambda r: token_injection(seq, INJ_LEX, n, r),
        "substitution": lambda r: token_substitution(seq, LEX, n, r),
    }[name]
    dist = {
        "shuffling": lambda: oracles.shuffling(seq, n),
        "dropout": lambda: oracles.dropout(seq, n),
        "injection": lambda: oracles.injection(seq, INJ_LEX, n),
        "substitution": lambda: oracles.substitution(seq, LEX, n),
    }[name]()
    assert sum(dist.values()) == 1
    assert oracles.chi_square_pvalue(_frequencies(fn, 20000, 11), dist) > 0.001


def test_oracle_examples():
    from fractions import Fraction
    assert oracles.shuffling(("a", "b", "c"), 1) == {
        ("b", "a", "c"): Fraction(1, 3), ("c", "b", "a"): Fraction(1, 3),
        ("a", "c", "b"): Fraction(1, 3)}
    assert len(oracles.dropout("abcd", 2)) == 6
    assert set(oracles.substitution(("good", "good"), {"good": ("fine", "nice")}, 2).values()) \
        == {Fraction(1, 4)}

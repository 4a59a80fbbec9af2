"""Exact outcome distributions of the augmentation operators by enumeration.

Each function walks every random choice an operator can make and returns
``{output tuple: Fraction}``. Nothing here calls the package's operators or
random stream; the distributions follow from the operator definitions alone.
"""

from collections import defaultdict
from fractions import Fraction
from itertools import combinations, product


def _merge(items):
    out = defaultdict(Fraction)
    for outcome, p in items:
        out[outcome] += p
    return dict(out)


def substitution(seq, lexicon, n):
    seq = tuple(seq)
    eligible = [i for i, t in enumerate(seq) if lexicon.get(t)]
    k = min(n, len(eligible))
    subsets = list(combinations(eligible, k))
    items = []
    for subset in subsets:
        choices = [lexicon[seq[i]] for i in subset]
        n_combos = 1
        for c in choices:
            n_combos *= len(c)
        for picks in product(*choices):
            out = list(seq)
            for i, word in zip(subset, picks):
                out[i] = word
            items.append((tuple(out), Fraction(1, len(subsets) * n_combos)))
    return _merge(items)


def dropout(seq, n):
    seq = tuple(seq)
    k = max(0, min(n, len(seq) - 1))
    subsets = list(combinations(range(len(seq)), k))
    return _merge((tuple(t for i, t in enumerate(seq) if i not in s), Fraction(1, len(subsets)))
                  for s in subsets)


def _injection_step(seq, lexicon):
    length = len(seq)
    eligible = [i for i, t in enumerate(seq) if lexicon.get(t)]
    if not eligible:
        return [(seq, Fraction(1))]
    per_position = Fraction(1, len(eligible))
    items = []
    for i in eligible:
        syns = lexicon[seq[i]]
        for word in syns:
            for slot in range(length + 1):
                out = seq[:slot] + (word,) + seq[slot:]
                items.append((out, per_position / len(syns) / (length + 1)))
    return items


def injection(seq, lexicon, n):
    dist = {tuple(seq): Fraction(1)}
    for _ in range(n):
        dist = _merge((out, p * q) for s, p in dist.items()
                      for out, q in _injection_step(s, lexicon))
    return dist


def shuffling(seq, n):
    dist = {tuple(seq): Fraction(1)}
    if len(seq) < 2:
        return dist
    pairs = list(combinations(range(len(seq)), 2))
    for _ in range(n):
        items = []
        for s, p in dist.items():
            for i, j in pairs:
                out = list(s)
                out[i], out[j] = out[j], out[i]
                items.append((tuple(out), p / len(pairs)))
        dist = _merge(items)
    return dist


def total(dist):
    return sum(dist.values())




def chi_square_pvalue(counts, dist):
    """Goodness-of-fit p-value of observed ``counts`` against ``dist``.

    An outcome the enumeration says is impossible gives 0.0; a degenerate
    (single-outcome) distribution gives 1.0 when every draw hit it.
    """
    from scipy.stats import chisquare

    if set(counts) - set(dist):
        return 0.0
    draws = sum(counts.values())
    outcomes = sorted(dist)
    if len(outcomes) == 1:
        return 1.0
    observed = [counts.get(o, 0) for o in outcomes]
    expected = [float(dist[o]) * draws for o in outcomes]
    return float(chisquare(observed, expected).pvalue)

"""Token-level augmentation operators with a strength parameter ``alpha``.

Each operator performs ``n`` perturbations on a working copy of the
sequence, drawing all randomness from an explicit :class:`RandomStream`.
``n`` comes from :func:`perturbation_count`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from functools import lru_cache
from typing import Mapping, Sequence

from .rng import RandomStream
from .textcore import Dataset, LabeledExample, TokenSequence


class Operator(str, enum.Enum):
    SUBSTITUTION = "substitution"
    DROPOUT = "dropout"
    INJECTION = "injection"
    SHUFFLING = "shuffling"

    @property
    def needs_lexicon(self) -> bool:
        return self in (Operator.SUBSTITUTION, Operator.INJECTION)

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AugmentationConfig:
    operator: Operator
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "operator", Operator(self.operator))
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")

    @property
    def is_identity(self) -> bool:
        return self.alpha == 0.0


@lru_cache(maxsize=4096)
def perturbation_count(alpha: float, length: int, cap: bool = False) -> int:
    """Number of perturbations ``n`` for strength ``alpha`` on ``length`` tokens.

    ``n = round_half_up(alpha * length)``, raised to 1 whenever ``alpha > 0``
    and, with ``cap=True``, limited to ``length``.

    >>> perturbation_count(0.5, 10), perturbation_count(0.05, 7)
    (5, 1)
    """
    if length < 1:
        raise ValueError("sequence length must be at least 1")
    if alpha == 0:
        return 0
    # Decimal(repr) so that e.g. 0.35 * 10 rounds as the decimal 3.5 would.
    product = Decimal(repr(float(alpha))) * length
    n = max(1, int(product.quantize(Decimal(1), rounding=ROUND_HALF_UP)))
    return min(n, length) if cap else n


def token_substitution(seq: Sequence[str], lexicon: Mapping[str, Sequence[str]],
                       n: int, rng: RandomStream) -> TokenSequence:
    """Replace ``min(n, |eligible|)`` distinct positions with a random synonym."""
    tokens = list(seq)
    if n <= 0:
        return TokenSequence._trusted(tokens)
    eligible = [i for i, tok in enumerate(tokens) if lexicon.get(tok)]
    for pos in rng.sample(eligible, min(n, len(eligible))):
        tokens[pos] = rng.choice(lexicon[tokens[pos]])
    return TokenSequence._trusted(tokens)


def pervasive_dropout(seq: Sequence[str], n: int, rng: RandomStream) -> TokenSequence:
    """Delete ``min(n, l - 1)`` random positions, keeping survivor order."""
    k = min(n, len(seq) - 1)
    if k <= 0:
        return TokenSequence._trusted(seq)
    dropped = set(rng.sample(range(len(seq)), k))
    return TokenSequence._trusted(tok for i, tok in enumerate(seq) if i not in dropped)


def token_injection(seq: Sequence[str], lexicon: Mapping[str, Sequence[str]],
                    n: int, rng: RandomStream) -> TokenSequence:
    """Insert, ``n`` times, a synonym of a random in-sequence token at a random slot.

    The source token is uniform over the tokens of the current sequence that
    have synonyms (the limit of resampling until a hit). With no such token
    the sequence comes back unchanged.
    """
    tokens = list(seq)
    if n <= 0:
        return TokenSequence._trusted(tokens)
    get = lexicon.get
    eligible = [i for i, tok in enumerate(tokens) if get(tok)]
    if not eligible:
        return TokenSequence._trusted(tokens)
    for _ in range(n):
        syns = get(tokens[eligible[rng.below(len(eligible))]])
        new = syns[rng.below(len(syns))]
        slot = rng.below(len(tokens) + 1)
        tokens.insert(slot, new)
        eligible = [i + 1 if i >= slot else i for i in eligible]
        if get(new):
            eligible.append(slot)
    return TokenSequence._trusted(tokens)


def positional_shuffling(seq: Sequence[str], n: int, rng: RandomStream) -> TokenSequence:
    """Swap the tokens at a uniformly drawn pair of distinct positions, ``n`` times."""
    tokens = list(seq)
    if len(tokens) < 2:
        return TokenSequence._trusted(tokens)
    length = len(tokens)
    for _ in range(n):
        i, j = rng.pair(length)
        tokens[i], tokens[j] = tokens[j], tokens[i]
    return TokenSequence._trusted(tokens)


def augment(seq: Sequence[str], cfg: AugmentationConfig,
            lexicon: Mapping[str, Sequence[str]], rng: RandomStream) -> TokenSequence:
    """Apply ``cfg.operator`` with ``n = perturbation_count(cfg.alpha, len(seq))``."""
    op = cfg.operator
    if op is Operator.SUBSTITUTION:
        return token_substitution(seq, lexicon, perturbation_count(cfg.alpha, len(seq)), rng)
    if op is Operator.DROPOUT:
        return pervasive_dropout(seq, perturbation_count(cfg.alpha, len(seq), True), rng)
    if op is Operator.INJECTION:
        return token_injection(seq, lexicon, perturbation_count(cfg.alpha, len(seq)), rng)
    if op is Operator.SHUFFLING:
        return positional_shuffling(seq, perturbation_count(cfg.alpha, len(seq), True), rng)
    raise ValueError(f"unknown operator {op!r}")


def augment_dataset(dataset: Dataset, cfg: AugmentationConfig,
                    lexicon: Mapping[str, Sequence[str]], copies: int,
                    rng: RandomStream, include_original: bool = False) -> Dataset:
    """Static corpus of ``copies`` augmented versions per example, labels kept.

    Copies of an example are emitted consecutively, preceded by the original
    when ``include_original`` is set.
    """
    if copies < 0:
        raise ValueError("copies must be non-negative")
    out = []
    for ex in dataset:
        if include_original:
            out.append(ex)
        for _ in range(copies):
            out.append(LabeledExample(augment(ex.sequence, cfg, lexicon, rng), ex.label))
    return Dataset(tuple(out), dataset.label_names)

"""Synthetic two-class corpus with a matching synonym lexicon.

The corpus is built so that the known failure modes of strong token-level
augmentation show up on a bag-of-n-grams model:

* Sentiment is carried by *concepts*, each realized by several surface
  forms drawn with Zipf weights, so test sentences contain rare forms that a
  small training set barely covers; the lexicon lists all forms of a concept
  as mutual synonyms.
* A fraction ``negation_rate`` of sentiment phrases is a negator followed by
  a form of the *opposite* polarity (``not <negative word>`` in a positive
  sentence). Only the bigram identifies the class, so deleting, moving or
  separating tokens can invert the apparent label.
* The lexicon is imperfect: with probability ``lexicon_noise`` a sentiment
  form also lists a form of the opposite polarity, mimicking polysemous
  entries in a general-purpose thesaurus.
* ``label_noise`` flips that fraction of labels uniformly at random.

Words are pronounceable pseudo-words, so nothing depends on a real language.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from pathlib import Path

from .rng import RandomStream, mix64
from .textcore import Dataset, LabeledExample, SynonymLexicon, TokenSequence, write_lexicon

LABELS = ("pos", "neg")
NEGATORS = ("not", "never", "hardly")

_ONSETS = "b d f g k l m n p r s t v z".split()
_VOWELS = "a e i o u".split()


@dataclass(frozen=True)
class SyntheticConfig:
    """Generator parameters. The defaults are the acceptance corpus.

    Each sentence has ``min_filler..max_filler`` filler words and
    ``min_phrases..max_phrases`` sentiment phrases inserted at random spots.
    """

    n_train: int = 2000
    n_test: int = 1000
    seed: int = 0
    concepts_per_class: int = 6
    forms_per_concept: int = 5
    form_zipf: float = 1.3
    n_filler: int = 300
    filler_group: int = 3
    min_filler: int = 3
    max_filler: int = 7
    min_phrases: int = 1
    max_phrases: int = 3
    negation_rate: float = 0.25
    lexicon_noise: float = 1.0
    label_noise: float = 0.05


@dataclass(frozen=True)
class SyntheticCorpus:
    train: Dataset
    test: Dataset
    lexicon: SynonymLexicon
    config: SyntheticConfig

    def write(self, out_dir: str | Path) -> dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {"train": out / "train.tsv", "test": out / "test.tsv",
                 "lexicon": out / "lexicon.tsv"}
        write_dataset(self.train, paths["train"])
        write_dataset(self.test, paths["test"])
        write_lexicon(self.lexicon, paths["lexicon"])
        return paths


def write_dataset(dataset: Dataset, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for ex in dataset:
            fh.write(f"{dataset.label_names[ex.label]}\t{' '.join(ex.sequence)}\n")


def _pseudo_words(count: int, rng: RandomStream) -> list[str]:
    syllables = [o + v for o in _ONSETS for v in _VOWELS]
    pool = ["".join(p) for p in itertools.product(syllables, repeat=2)]
    pool += ["".join(p) for p in itertools.product(syllables[:30], repeat=3)]
    if count > len(pool):
        raise ValueError("too many pseudo-words requested")
    words = rng.sample(pool, count)
    return words


def _zipf_cdf(n: int, s: float) -> list[float]:
    weights = list(itertools.accumulate(1.0 / (k + 1) ** s for k in range(n)))
    return [w / weights[-1] for w in weights]


def _draw(cdf: list[float], rng: RandomStream) -> int:
    u = rng.random()
    for i, c in enumerate(cdf):
        if u < c:
            return i
    return len(cdf) - 1


def generate(config: SyntheticConfig = SyntheticConfig()) -> SyntheticCorpus:
    """Generate train/test sets and lexicon; identical config gives identical output."""
    cfg = config
    vocab_rng = RandomStream(mix64(cfg.seed, 101))
    n_forms = 2 * cfg.concepts_per_class * cfg.forms_per_concept
    words = _pseudo_words(n_forms + cfg.n_filler, vocab_rng)
    forms, filler = words[:n_forms], words[n_forms:]

    # concepts[polarity][concept] -> surface forms, most frequent first
    concepts = [[forms[(p * cfg.concepts_per_class + c) * cfg.forms_per_concept:
                       (p * cfg.concepts_per_class + c + 1) * cfg.forms_per_concept]
                 for c in range(cfg.concepts_per_class)] for p in range(2)]
    form_cdf = _zipf_cdf(cfg.forms_per_concept, cfg.form_zipf)
    filler_cdf = _zipf_cdf(cfg.n_filler, 1.0)
    negator_cdf = _zipf_cdf(len(NEGATORS), 1.5)

    entries: dict[str, list[str]] = {}
    for polarity in range(2):
        for group in concepts[polarity]:
            for form in group:
                syns = [f for f in group if f != form]
                if vocab_rng.random() < cfg.lexicon_noise:
                    wrong = vocab_rng.choice(concepts[1 - polarity])
                    syns.append(vocab_rng.choice(wrong))
                entries[form] = syns
    for start in range(0, cfg.n_filler, cfg.filler_group):
        group = filler[start:start + cfg.filler_group]
        for word in group:
            if len(group) > 1:
                entries[word] = [w for w in group if w != word]
    for neg in NEGATORS:
        entries[neg] = [w for w in NEGATORS if w != neg]
    lexicon = SynonymLexicon(entries)

    def sentence(label: int, rng: RandomStream) -> list[str]:
        tokens = [filler[_draw(filler_cdf, rng)]
                  for _ in range(cfg.min_filler + rng.below(cfg.max_filler - cfg.min_filler + 1))]
        n_phrases = cfg.min_phrases + rng.below(cfg.max_phrases - cfg.min_phrases + 1)
        for _ in range(n_phrases):
            if rng.random() < cfg.negation_rate:
                group = rng.choice(concepts[1 - label])
                phrase = [NEGATORS[_draw(negator_cdf, rng)], group[_draw(form_cdf, rng)]]
            else:
                group = rng.choice(concepts[label])
                phrase = [group[_draw(form_cdf, rng)]]
            at = rng.below(len(tokens) + 1)
            tokens[at:at] = phrase
        return tokens

    def split(n: int, tag: int) -> Dataset:
        rng = RandomStream(mix64(cfg.seed, tag))
        examples = []
        for i in range(n):
            label = i % 2
            tokens = sentence(label, rng)
            if rng.random() < cfg.label_noise:
                label = 1 - label
            examples.append(LabeledExample(TokenSequence(tokens), label))
        rng.shuffle(examples)
        return Dataset(tuple(examples), LABELS)

    return SyntheticCorpus(split(cfg.n_train, 201), split(cfg.n_test, 202), lexicon, cfg)


def describe(config: SyntheticConfig) -> dict:
    return asdict(config)

"""Tokenization, token sequences, labeled datasets and synonym lexicons."""

from __future__ import annotations

import re
from importlib import resources
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import EmptyDataset, EmptyInput, MalformedLine, SingleClassDataset

PUNCTUATION = frozenset(".,!?;:'\"()")

_TOKEN_RE = re.compile(r"""[.,!?;:'"()]|[^\s.,!?;:'"()]+""")
_WS_RE = re.compile(r"\s")


class TokenSequence(tuple):
    """Immutable, non-empty sequence of lowercase whitespace-free tokens.

    A plain ``tuple`` subclass, so slicing, hashing and equality behave as
    for tuples. Construction validates every token.
    """

    __slots__ = ()

    def __new__(cls, tokens: Iterable[str] = ()):
        tokens = tuple(tokens)
        if not tokens:
            raise EmptyInput("a token sequence needs at least one token")
        for tok in tokens:
            if not isinstance(tok, str) or not tok or _WS_RE.search(tok):
                raise ValueError(f"invalid token {tok!r}")
        return super().__new__(cls, tokens)

    @classmethod
    def _trusted(cls, tokens: Iterable[str]) -> "TokenSequence":
        # Skips validation; callers only rearrange tokens that were already valid.
        return tuple.__new__(cls, tokens)

    @property
    def length(self) -> int:
        return len(self)

    def __repr__(self) -> str:
        return f"TokenSequence({list(self)!r})"


def tokenize(text: str) -> TokenSequence:
    """Lowercase, split on whitespace and isolate punctuation characters.

    >>> list(tokenize("Good, right?"))
    ['good', ',', 'right', '?']
    """
    tokens = _TOKEN_RE.findall(text.lower())
    if not tokens:
        raise EmptyInput("text is empty or whitespace only")
    return TokenSequence._trusted(tokens)


def detokenize(seq: Sequence[str]) -> str:
    return " ".join(seq)


@dataclass(frozen=True)
class LabeledExample:
    sequence: TokenSequence
    label: int

    def __post_init__(self):
        if self.label < 0:
            raise ValueError("label must be a non-negative class id")


@dataclass(frozen=True)
class Dataset:
    """Labeled examples plus the original label strings, indexed by class id."""

    examples: tuple[LabeledExample, ...]
    label_names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "examples", tuple(self.examples))
        object.__setattr__(self, "label_names", tuple(self.label_names))
        if not self.examples:
            raise EmptyDataset("dataset has no examples")
        if len(set(self.label_names)) != len(self.label_names):
            raise ValueError("duplicate label names")
        n_classes = len(self.label_names)
        for ex in self.examples:
            if ex.label >= n_classes:
                raise ValueError(f"label id {ex.label} outside {n_classes} classes")
        if len({ex.label for ex in self.examples}) < 2:
            raise SingleClassDataset("dataset needs at least two distinct labels")

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    @property
    def n_classes(self) -> int:
        return len(self.label_names)

    @property
    def labels(self) -> list[int]:
        return [ex.label for ex in self.examples]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]],
                   label_names: Sequence[str] | None = None) -> "Dataset":
        """Build from ``(label, text)`` pairs; ids follow first appearance
        unless ``label_names`` fixes the mapping."""
        names = list(label_names) if label_names is not None else []
        index = {name: i for i, name in enumerate(names)}
        examples = []
        for label, text in pairs:
            if label not in index:
                if label_names is not None:
                    raise ValueError(f"unknown label {label!r}")
                index[label] = len(names)
                names.append(label)
            examples.append(LabeledExample(tokenize(text), index[label]))
        return cls(tuple(examples), tuple(names))


class SynonymLexicon(Mapping):
    """Read-only mapping from headword to a tuple of synonyms."""

    def __init__(self, entries: Mapping[str, Iterable[str]] | None = None):
        clean: dict[str, tuple[str, ...]] = {}
        for head, syns in (entries or {}).items():
            head = _normalize_word(head)
            merged = list(clean.get(head, ()))
            for syn in syns:
                syn = _normalize_word(syn)
                if syn != head and syn not in merged:
                    merged.append(syn)
            if merged:
                clean[head] = tuple(merged)
            else:
                clean.pop(head, None)
        self._entries = MappingProxyType(clean)
        # C-level lookup; returns None for a missing headword
        self.get = self._entries.get

    def __getitem__(self, key: str) -> tuple[str, ...]:
        return self._entries[key]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def without(self, stopwords: Iterable[str]) -> "SynonymLexicon":
        """Copy with the given headwords removed."""
        drop = {_normalize_word(w) for w in stopwords}
        return SynonymLexicon({h: s for h, s in self._entries.items() if h not in drop})

    def __repr__(self) -> str:
        return f"SynonymLexicon({len(self)} entries)"


def _normalize_word(word: str) -> str:
    word = word.strip().lower()
    if not word or _WS_RE.search(word):
        raise ValueError(f"lexicon words must be single non-empty tokens, got {word!r}")
    return word


def synonyms(lexicon: Mapping[str, Sequence[str]], token: str) -> list[str]:
    return list(lexicon.get(token, ()))


def load_lexicon(path: str | Path) -> SynonymLexicon:
    """Read a ``headword<TAB>syn1,syn2,...`` file.

    Repeated headwords are merged in file order, synonyms deduplicated and a
    headword listed as its own synonym is dropped. ``#`` lines and blank lines
    are skipped.
    """
    merged: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            if line.count("\t") != 1:
                raise MalformedLine(lineno, "expected exactly one tab")
            head, rest = line.split("\t")
            try:
                head = _normalize_word(head)
                syns = [_normalize_word(s) for s in rest.split(",") if s.strip()]
            except ValueError as exc:
                raise MalformedLine(lineno, str(exc)) from None
            merged.setdefault(head, []).extend(syns)
    return SynonymLexicon(merged)


def sample_lexicon() -> SynonymLexicon:
    """Small general-English lexicon shipped with the package, for demos."""
    ref = resources.files(__package__) / "data" / "sample_lexicon.tsv"
    with resources.as_file(ref) as path:
        return load_lexicon(path)


def load_stopwords(path: str | Path) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(w.strip().lower() for w in fh if w.strip())


def write_lexicon(lexicon: Mapping[str, Sequence[str]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for head in sorted(lexicon):
            fh.write(f"{head}\t{','.join(lexicon[head])}\n")

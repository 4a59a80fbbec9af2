"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

import numbers
from typing import Iterable, Sequence

from .errors import MissingLexicon
from .textcore import TokenSequence, tokenize


def check_unit_interval(value, name: str) -> float:
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, numbers.Integral) or isinstance(value, bool) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_texts(texts: Iterable) -> list[TokenSequence]:
    """Tokenize raw strings; pre-tokenized sequences are validated as they are."""
    if isinstance(texts, str):
        raise TypeError("expected a collection of texts, got a single string")
    out = []
    for i, text in enumerate(texts):
        if isinstance(text, str):
            out.append(tokenize(text))
        elif isinstance(text, Sequence):
            out.append(TokenSequence(text))
        else:
            raise TypeError(f"item {i}: expected str or token sequence, got {type(text).__name__}")
    if not out:
        raise ValueError("no texts given")
    return out


def check_lexicon(operator, lexicon) -> None:
    if operator is not None and operator.needs_lexicon and not lexicon:
        raise MissingLexicon(f"operator {operator.value!r} needs a synonym lexicon")

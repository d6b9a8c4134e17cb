"""Character + Pinyin factored input features.

Combined format, one sentence per line::

    语|yu 音|yin 翻|fan 译|yi

Split format writes the surfaces and the syllables to two line-aligned files.
In the combined format a literal ``\\`` or ``|`` inside a surface is
backslash-escaped; syllables never contain either.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import asdict, dataclass
from typing import Iterable, Iterator, NamedTuple, Optional

import numpy as np

from asrnoise.corpus import Pathlike, SentencePair, SentenceTokens, read_lines, tokenize
from asrnoise.errors import CorpusError
from asrnoise.noiser import PLACEHOLDER
from asrnoise.pinyin import PinyinDictionary, UNK

SEPARATOR = "|"
_UNESCAPE_RE = re.compile(r"\\(.)")


class FactoredToken(NamedTuple):
    surface: str
    syllable: str

    def __str__(self):
        return f"[{self.surface};{self.syllable}]"


def factorize_sentence(
    sentence: SentenceTokens, dictionary: PinyinDictionary, placeholder: str = PLACEHOLDER
) -> list:
    return [FactoredToken(t.surface, dictionary.syllable(t.surface, placeholder)) for t in sentence.tokens]


def escape_surface(surface: str) -> str:
    return surface.replace("\\", "\\\\").replace(SEPARATOR, "\\" + SEPARATOR)


def unescape_surface(surface: str) -> str:
    return _UNESCAPE_RE.sub(r"\1", surface)


def format_combined(tokens: Iterable[FactoredToken]) -> str:
    return " ".join(f"{escape_surface(t.surface)}{SEPARATOR}{t.syllable}" for t in tokens)


def parse_combined(line: str) -> list:
    out = []
    for item in line.split():
        surface, sep, syllable = item.rpartition(SEPARATOR)
        if not sep or not surface or not syllable:
            raise CorpusError(f"malformed factored token {item!r}")
        out.append(FactoredToken(unescape_surface(surface), syllable))
    return out


def parse_split(surface_line: str, syllable_line: str) -> list:
    surfaces, syllables = surface_line.split(), syllable_line.split()
    if len(surfaces) != len(syllables):
        raise CorpusError(f"{len(surfaces)} surfaces but {len(syllables)} syllables")
    return [FactoredToken(a, b) for a, b in zip(surfaces, syllables)]


def factored_paths(stem: Pathlike, fmt: str) -> tuple:
    stem = os.fspath(stem)
    if fmt == "combined":
        return (stem + ".factored",)
    if fmt == "split":
        return (stem + ".chars", stem + ".pinyin")
    raise ValueError(f"unknown format {fmt!r}")


def emit_factored_corpus(
    corpus: Iterable,
    dictionary: PinyinDictionary,
    stem: Pathlike,
    fmt: str = "combined",
    placeholder: str = PLACEHOLDER,
) -> dict:
    """Write factored features for ``corpus`` and return coverage counts.

    Returns the written paths plus ``cjk`` (CJK tokens seen) and ``unk`` (CJK
    tokens without a dictionary entry).
    """
    paths = factored_paths(stem, fmt)
    handles = [open(p, "w", encoding="utf-8", newline="\n") for p in paths]
    stats = {"paths": paths, "sentences": 0, "cjk": 0, "unk": 0}
    try:
        for idx, item in enumerate(corpus):
            if isinstance(item, SentencePair):
                item = item.src
            elif not isinstance(item, SentenceTokens):
                item = tokenize(item, idx)
            tokens = factorize_sentence(item, dictionary, placeholder)
            for tok, ft in zip(item.tokens, tokens):
                if tok.is_cjk:
                    stats["cjk"] += 1
                    stats["unk"] += ft.syllable == UNK
            if fmt == "combined":
                handles[0].write(format_combined(tokens) + "\n")
            else:
                handles[0].write(" ".join(t.surface for t in tokens) + "\n")
                handles[1].write(" ".join(t.syllable for t in tokens) + "\n")
            stats["sentences"] += 1
    finally:
        for h in handles:
            h.close()
    return stats


def read_factored_corpus(stem: Pathlike, fmt: str = "combined") -> Iterator[list]:
    paths = factored_paths(stem, fmt)
    if fmt == "combined":
        for line in read_lines(paths[0]):
            yield parse_combined(line)
        return
    chars, syls = read_lines(paths[0]), read_lines(paths[1])
    for i, a in enumerate(chars, start=1):
        b = next(syls, None)
        if b is None:
            raise CorpusError(f"{paths[1]} shorter than {paths[0]} at line {i}")
        try:
            yield parse_split(a, b)
        except CorpusError as exc:
            raise CorpusError(f"line {i}: {exc}") from None
    if next(syls, None) is not None:
        raise CorpusError(f"{paths[1]} longer than {paths[0]}")


@dataclass(frozen=True)
class EmbeddingSpec:
    char_dim: int = 64
    pinyin_dim: int = 448

    def __post_init__(self):
        if self.char_dim < 1 or self.pinyin_dim < 1:
            raise ValueError("embedding dimensions must be positive")

    @property
    def total_dim(self) -> int:
        return self.char_dim + self.pinyin_dim

    def to_json(self, path: Pathlike) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(asdict(self), f, indent=2)
            f.write("\n")

    @classmethod
    def from_json(cls, path: Pathlike) -> "EmbeddingSpec":
        with open(path, encoding="utf-8") as f:
            return cls(**json.load(f))


class EmbeddingTables:
    """Character and Pinyin lookup tables for shape checks; never trained.

    Unknown keys fall back to the ``<unk>`` row of the respective table.
    """

    def __init__(self, char_vectors: dict, pinyin_vectors: dict):
        self.char_vectors = char_vectors
        self.pinyin_vectors = pinyin_vectors
        self.char_dim = _uniform_dim(char_vectors, "character")
        self.pinyin_dim = _uniform_dim(pinyin_vectors, "pinyin")

    @classmethod
    def random(
        cls,
        chars: Iterable[str],
        syllables: Iterable[str],
        spec: EmbeddingSpec = EmbeddingSpec(),
        seed: int = 0,
        scale: float = 0.1,
    ) -> "EmbeddingTables":
        rng = np.random.default_rng(seed)
        chars = list(dict.fromkeys([UNK, *chars]))
        syllables = list(dict.fromkeys([UNK, *syllables]))
        cm = rng.uniform(-scale, scale, size=(len(chars), spec.char_dim))
        pm = rng.uniform(-scale, scale, size=(len(syllables), spec.pinyin_dim))
        return cls(dict(zip(chars, cm)), dict(zip(syllables, pm)))

    def char(self, surface: str) -> np.ndarray:
        return self.char_vectors.get(surface, self.char_vectors.get(UNK))

    def pinyin(self, syllable: str) -> np.ndarray:
        return self.pinyin_vectors.get(syllable, self.pinyin_vectors.get(UNK))


def _uniform_dim(table: dict, name: str) -> int:
    dims = {np.shape(v) for v in table.values()}
    if len(dims) > 1:
        raise ValueError(f"{name} table mixes vector shapes {sorted(dims)}")
    if not dims:
        return 0
    (shape,) = dims
    if len(shape) != 1:
        raise ValueError(f"{name} table vectors must be 1-d, got shape {shape}")
    return shape[0]


def concat_embedding(tables: EmbeddingTables, token: FactoredToken) -> np.ndarray:
    """Character vector followed by Pinyin vector."""
    c, p = tables.char(token.surface), tables.pinyin(token.syllable)
    if c is None or p is None:
        raise KeyError(f"no embedding (and no <unk> row) for {token}")
    if np.shape(c) != (tables.char_dim,) or np.shape(p) != (tables.pinyin_dim,):
        raise ValueError(
            f"vector shapes {np.shape(c)}, {np.shape(p)} do not match table dims "
            f"{tables.char_dim}, {tables.pinyin_dim}"
        )
    return np.concatenate([c, p])

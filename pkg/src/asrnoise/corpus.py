"""Character-level tokenization, parallel corpus loading and corpus statistics."""

from __future__ import annotations

import enum
import logging
import os
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

from asrnoise.errors import AlignmentError, CorpusError
from asrnoise.parallel import ordered_map

logger = logging.getLogger(__name__)

Pathlike = Union[str, os.PathLike]

# CJK Unified Ideographs and Extension A. CJK punctuation (U+3000-U+303F)
# is deliberately not included.
CJK_RANGES = ((0x4E00, 0x9FFF), (0x3400, 0x4DBF))
_CJK_CLASS = "\u3400-\u4dbf\u4e00-\u9fff"
_TOKEN_RE = re.compile(f"([{_CJK_CLASS}])|[^\\s{_CJK_CLASS}]+")


def is_cjk(ch: str) -> bool:
    if len(ch) != 1:
        return False
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in CJK_RANGES)


class TokenKind(enum.Enum):
    CJK = "cjk"
    OTHER = "other"


@dataclass(eq=True, slots=True)
class Token:
    surface: str
    kind: TokenKind
    # character offsets into the source line, used to re-render noised text
    start: int = field(default=-1, compare=False)
    end: int = field(default=-1, compare=False)

    @property
    def is_cjk(self) -> bool:
        return self.kind is TokenKind.CJK


@dataclass(slots=True)
class SentenceTokens:
    id: int
    tokens: tuple
    text: str = field(default="", compare=False)

    def __len__(self):
        return len(self.tokens)

    @property
    def surfaces(self) -> list:
        return [t.surface for t in self.tokens]

    def render(self, surfaces: Sequence[str]) -> str:
        """Rebuild the line with ``surfaces`` spliced into the original token spans.

        Inter-token whitespace of the original line is kept. A non-CJK
        replacement is padded with a space wherever it would otherwise fuse
        with a neighbouring non-CJK run, so re-tokenizing the output yields the
        same number of tokens.
        """
        if len(surfaces) != len(self.tokens):
            raise ValueError(
                f"expected {len(self.tokens)} surfaces, got {len(surfaces)}"
            )
        if not self.text and self.tokens:
            return " ".join(surfaces)
        parts = []
        pos = 0
        text = self.text
        last = ""
        for tok, new in zip(self.tokens, surfaces):
            gap = text[pos:tok.start]
            if not gap and new and _fuses(last) and _fuses(new[0]):
                gap = " "
            parts.append(gap)
            parts.append(new)
            last = new[-1:] if new else (gap[-1:] or last)
            pos = tok.end
        parts.append(text[pos:])
        return "".join(parts)


def _fuses(ch: str) -> bool:
    """True if ``ch`` would merge with an adjacent non-CJK run."""
    return bool(ch) and not ch.isspace() and not is_cjk(ch)


@dataclass(frozen=True)
class SentencePair:
    src: SentenceTokens
    tgt: str


def _decode(line: Union[str, bytes], line_number: Optional[int] = None) -> str:
    if isinstance(line, str):
        return line
    try:
        return line.decode("utf-8")
    except UnicodeDecodeError as exc:
        where = f"line {line_number}, " if line_number is not None else ""
        raise CorpusError(
            f"invalid UTF-8 at {where}byte offset {exc.start}: {exc.reason}"
        ) from exc


def tokenize(line: Union[str, bytes], id: int = 0) -> SentenceTokens:
    """Split a line into CJK characters and maximal non-CJK, non-space runs.

    >>> tokenize("语音翻译").surfaces
    ['语', '音', '翻', '译']
    >>> tokenize("下滑近90%").surfaces
    ['下', '滑', '近', '90%']
    """
    text = _decode(line)
    cjk, other = TokenKind.CJK, TokenKind.OTHER
    tokens = tuple(
        Token(m[0], other if m[1] is None else cjk, *m.span())
        for m in _TOKEN_RE.finditer(text)
    )
    return SentenceTokens(id, tokens, text)


def read_lines(path: Pathlike) -> Iterator[str]:
    """Stream decoded lines of a UTF-8 file without their line terminators."""
    with open(path, "rb") as f:
        for i, raw in enumerate(f, start=1):
            yield _decode(raw.rstrip(b"\n").rstrip(b"\r"), i)


def count_lines(path: Pathlike) -> int:
    with open(path, "rb") as f:
        return sum(1 for _ in f)


class ParallelCorpus:
    """Re-iterable stream of :class:`SentencePair` read lazily from two files.

    The line-count check happens while iterating; a mismatch raises
    :class:`AlignmentError` naming both counts once the shorter file ends.
    """

    def __init__(self, src_path: Pathlike, tgt_path: Optional[Pathlike] = None):
        for p in (src_path, tgt_path):
            if p is not None and not os.path.isfile(p):
                raise FileNotFoundError(f"no such file: {p}")
        self.src_path = src_path
        self.tgt_path = tgt_path

    def __iter__(self) -> Iterator[SentencePair]:
        src = read_lines(self.src_path)
        if self.tgt_path is None:
            for i, line in enumerate(src):
                yield SentencePair(tokenize(line, i), "")
            return
        tgt = read_lines(self.tgt_path)
        n = 0
        for s in src:
            t = next(tgt, None)
            if t is None:
                n_tgt = n
                n_src = n + 1 + sum(1 for _ in src)
                raise AlignmentError(
                    f"line-count mismatch: {self.src_path} has {n_src} lines, "
                    f"{self.tgt_path} has {n_tgt}"
                )
            yield SentencePair(tokenize(s, n), t)
            n += 1
        rest = sum(1 for _ in tgt)
        if rest:
            raise AlignmentError(
                f"line-count mismatch: {self.src_path} has {n} lines, "
                f"{self.tgt_path} has {n + rest}"
            )

    def sources(self) -> Iterator[SentenceTokens]:
        for pair in self:
            yield pair.src


def load_parallel_corpus(src_path: Pathlike, tgt_path: Optional[Pathlike] = None) -> ParallelCorpus:
    return ParallelCorpus(src_path, tgt_path)


@dataclass
class FrequencyTable:
    counts: dict = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, ch: str) -> int:
        return self.counts.get(ch, 0)

    def __len__(self):
        return len(self.counts)

    def sorted_items(self) -> list:
        """Entries by descending count, ties broken by code point."""
        return sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))

    def to_tsv(self, path: Pathlike) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for ch, n in self.sorted_items():
                f.write(f"{ch}\t{n}\n")

    @classmethod
    def from_tsv(cls, path: Pathlike) -> "FrequencyTable":
        counts = {}
        for i, line in enumerate(read_lines(path), start=1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not is_cjk(parts[0]):
                raise CorpusError(f"{path}: line {i}: expected 'char<TAB>count', got {line!r}")
            try:
                n = int(parts[1])
            except ValueError:
                raise CorpusError(f"{path}: line {i}: bad count {parts[1]!r}") from None
            if n < 0:
                raise CorpusError(f"{path}: line {i}: negative count")
            counts[parts[0]] = counts.get(parts[0], 0) + n
        return cls(counts)


class Vocabulary:
    """Ordered set of CJK characters with dense integer ids."""

    def __init__(self, chars: Iterable[str] = ()):
        self._chars = []
        self._ids = {}
        for ch in chars:
            if ch not in self._ids:
                self._ids[ch] = len(self._chars)
                self._chars.append(ch)

    @classmethod
    def from_frequencies(cls, freq: FrequencyTable) -> "Vocabulary":
        return cls(ch for ch, n in freq.sorted_items() if n > 0)

    def __len__(self):
        return len(self._chars)

    def __contains__(self, ch):
        return ch in self._ids

    def __iter__(self):
        return iter(self._chars)

    def id(self, ch: str) -> int:
        return self._ids[ch]

    def lookup(self, idx: int) -> str:
        return self._chars[idx]

    @property
    def chars(self) -> list:
        return list(self._chars)


def _count_cjk(lines: Sequence[str]) -> Counter:
    counts = Counter()
    for line in lines:
        for m in _TOKEN_RE.finditer(line):
            if m.group(1) is not None:
                counts[m.group(1)] += 1
    return counts


def _chunked_texts(corpus, size):
    chunk = []
    for item in corpus:
        if isinstance(item, SentencePair):
            item = item.src
        chunk.append(item.text if isinstance(item, SentenceTokens) else _decode(item))
        if len(chunk) >= size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def build_statistics(corpus: Iterable, workers: int = 1, chunk_size: int = 2000):
    """Count CJK characters over the source side of ``corpus``.

    ``corpus`` may yield :class:`SentencePair`, :class:`SentenceTokens` or raw
    lines. Returns ``(Vocabulary, FrequencyTable)``; the vocabulary is ordered
    by descending count then code point, so results do not depend on
    ``workers`` or shard boundaries.
    """
    counts = Counter()
    for part in ordered_map(_count_cjk, _chunked_texts(corpus, chunk_size), workers):
        counts.update(part)
    freq = FrequencyTable(dict(counts))
    return Vocabulary.from_frequencies(freq), freq

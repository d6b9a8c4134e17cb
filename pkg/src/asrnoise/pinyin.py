"""Toneless Pinyin lookup and homophone grouping."""

from __future__ import annotations

import logging
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Optional

from asrnoise.corpus import FrequencyTable, Pathlike, SentenceTokens, Vocabulary, is_cjk, read_lines
from asrnoise.errors import DictionaryError

logger = logging.getLogger(__name__)

NA = "<na>"
UNK = "<unk>"
SUB = "<sub>"
RESERVED_SYLLABLES = frozenset({NA, UNK, SUB})

_SYLLABLE_RE = re.compile(r"^[a-z]+$")
_DIAERESIS = "\u0308"


def strip_tone(syllable: str) -> str:
    """Lowercase a Pinyin syllable and drop tone marks and tone digits.

    ``ü`` (or ``u:``) is written as ``v`` so that e.g. lü and lu stay distinct.

    >>> strip_tone("shù")
    'shu'
    >>> strip_tone("LV4")
    'lv'
    >>> strip_tone("nǚ")
    'nv'
    """
    s = unicodedata.normalize("NFD", syllable.strip().lower())
    s = s.replace("u" + _DIAERESIS, "v").replace("u:", "v")
    return "".join(
        ch for ch in s if not unicodedata.combining(ch) and not ch.isdigit()
    )


class PinyinDictionary:
    """Character to canonical toneless syllable.

    Polyphonic characters keep the first syllable listed for them.
    """

    def __init__(self, mapping: Optional[dict] = None):
        self._map = dict(mapping or {})
        self.duplicates = 0

    def __len__(self):
        return len(self._map)

    def __contains__(self, ch):
        return ch in self._map

    def __getitem__(self, ch):
        return self._map[ch]

    def get(self, ch, default=None):
        return self._map.get(ch, default)

    def items(self):
        return self._map.items()

    def syllable(self, surface: str, placeholder: Optional[str] = None) -> str:
        """Pinyin factor for one token surface, including the reserved symbols."""
        if placeholder is not None and surface == placeholder:
            return SUB
        if not is_cjk(surface):
            return NA
        return self._map.get(surface, UNK)


def parse_pinyin_line(line: str, line_number: Optional[int] = None):
    if "\t" not in line:
        raise DictionaryError(f"no TAB separator in {line!r}", line_number)
    ch, _, readings = line.partition("\t")
    ch = ch.strip()
    syllables = [strip_tone(r) for r in readings.split(",")]
    syllables = [s for s in syllables if s]
    if not ch or not syllables:
        raise DictionaryError(f"empty field in {line!r}", line_number)
    bad = [s for s in syllables if not _SYLLABLE_RE.match(s)]
    if bad:
        raise DictionaryError(f"not a Pinyin syllable: {bad[0]!r}", line_number)
    return ch, syllables


def load_pinyin_dictionary(path: Pathlike) -> PinyinDictionary:
    """Read a ``char<TAB>syllable[,syllable...]`` file.

    Blank lines and lines starting with ``#`` are skipped. When a character is
    listed twice the later row wins and ``duplicates`` is incremented.
    """
    d = PinyinDictionary()
    for i, line in enumerate(read_lines(path), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        ch, syllables = parse_pinyin_line(line, i)
        if ch in d._map:
            d.duplicates += 1
        d._map[ch] = syllables[0]
    if d.duplicates:
        logger.warning("%s: %d duplicate character rows (last row kept)", path, d.duplicates)
    return d


def to_pinyin(sentence: SentenceTokens, dictionary: PinyinDictionary) -> list:
    return [dictionary.syllable(t.surface) for t in sentence.tokens]


@dataclass
class HomophoneTable:
    """Vocabulary characters grouped by canonical syllable, with corpus counts.

    ``groups`` lists members by descending count then code point. ``missing``
    holds vocabulary characters the dictionary does not cover.
    """

    groups: dict = field(default_factory=dict)
    syllable_of: dict = field(default_factory=dict)
    missing: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.groups)

    def group(self, ch: str) -> list:
        syl = self.syllable_of.get(ch)
        return self.groups.get(syl, []) if syl is not None else []

    def coverage(self) -> float:
        known = sum(n for g in self.groups.values() for _, n in g)
        total = known + sum(self.missing.values())
        return known / total if total else 1.0

    def write_coverage_report(self, path: Pathlike) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for ch, n in sorted(self.missing.items(), key=lambda kv: (-kv[1], kv[0])):
                f.write(f"{ch}\t{n}\n")


def build_homophone_table(
    vocab: Iterable[str], freq: FrequencyTable, dictionary: PinyinDictionary
) -> HomophoneTable:
    table = HomophoneTable()
    for ch in vocab:
        syl = dictionary.get(ch)
        if syl is None or syl in RESERVED_SYLLABLES:
            table.missing[ch] = freq[ch]
            continue
        table.groups.setdefault(syl, []).append((ch, freq[ch]))
        table.syllable_of[ch] = syl
    for members in table.groups.values():
        members.sort(key=lambda m: (-m[1], m[0]))
    if table.missing:
        logger.info("%d vocabulary characters lack a Pinyin entry", len(table.missing))
    return table


def homophones_of(ch: str, table: HomophoneTable) -> list:
    """Members of ``ch``'s homophone group other than ``ch`` itself."""
    return [m for m in table.group(ch) if m[0] != ch]

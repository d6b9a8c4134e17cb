"""Bernoulli substitution mask and the four noise-sampling strategies.

Every eligible source position is replaced with probability ``p``. The noise
symbol is drawn by one of:

* ``placeholder``: always the placeholder token (``<SUB>`` by default);
* ``uniform``: any vocabulary character with probability ``1/|V|``, the
  original character included;
* ``frequency``: ``Count(x) / sum(Count(y) for y in V if y != c)`` for
  ``x != c``;
* ``homophone``: the same unigram weighting restricted to the characters that
  share ``c``'s toneless syllable, ``c`` excluded.
"""

from __future__ import annotations

import bisect
import enum
import itertools
import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from asrnoise.corpus import (
    FrequencyTable,
    SentencePair,
    SentenceTokens,
    Vocabulary,
    tokenize,
)
from asrnoise.errors import ConfigError
from asrnoise.parallel import ordered_map
from asrnoise.pinyin import HomophoneTable, PinyinDictionary, build_homophone_table
from asrnoise.rng import DEFAULT_SEED, NOISE_STREAM, child_rng

logger = logging.getLogger(__name__)

PLACEHOLDER = "<SUB>"


class Strategy(enum.Enum):
    PLACEHOLDER = "placeholder"
    UNIFORM = "uniform"
    FREQUENCY = "frequency"
    HOMOPHONE = "homophone"


@dataclass(frozen=True)
class NoiseConfig:
    strategy: Strategy = Strategy.PLACEHOLDER
    p: float = 0.1
    seed: int = DEFAULT_SEED
    placeholder_token: str = PLACEHOLDER

    def __post_init__(self):
        if not isinstance(self.strategy, Strategy):
            object.__setattr__(self, "strategy", Strategy(self.strategy))
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"substitution rate p must be in [0, 1], got {self.p}")


class NoiseContext:
    """Read-only sampling tables shared by all sentences of a run.

    Cumulative-count tables for the frequency and homophone samplers are
    built once; per-character homophone tables are cached lazily.
    """

    def __init__(
        self,
        vocab: Vocabulary,
        freq: FrequencyTable,
        homophones: Optional[HomophoneTable] = None,
        placeholder_token: str = PLACEHOLDER,
    ):
        self.vocab = vocab
        self.freq = freq
        self.homophones = homophones
        self.placeholder_token = placeholder_token
        self.chars = vocab.chars
        self.cum_counts = list(itertools.accumulate(freq[c] for c in self.chars))
        self.total_count = self.cum_counts[-1] if self.cum_counts else 0
        self._homophone_cache = {}

    @classmethod
    def build(
        cls,
        vocab: Vocabulary,
        freq: FrequencyTable,
        dictionary: Optional[PinyinDictionary] = None,
        placeholder_token: str = PLACEHOLDER,
    ) -> "NoiseContext":
        table = build_homophone_table(vocab, freq, dictionary) if dictionary is not None else None
        return cls(vocab, freq, table, placeholder_token)

    def check(self, strategy: Strategy) -> None:
        """Raise :class:`ConfigError` if ``strategy`` cannot sample from this context."""
        strategy = Strategy(strategy)
        if strategy is Strategy.UNIFORM and len(self.chars) == 0:
            raise ConfigError("uniform sampling needs a non-empty vocabulary")
        if strategy is Strategy.FREQUENCY and len(self.chars) <= 1:
            raise ConfigError(
                f"frequency sampling needs at least 2 vocabulary characters, got {len(self.chars)}"
            )
        if strategy is Strategy.HOMOPHONE and self.homophones is None:
            raise ConfigError("homophone sampling needs a homophone table (Pinyin dictionary)")

    def homophone_choices(self, ch: str):
        """``(members, cumulative counts)`` over ``ch``'s group minus ``ch``."""
        hit = self._homophone_cache.get(ch)
        if hit is None:
            members = [m for m in self.homophones.group(ch) if m[0] != ch and m[1] > 0]
            hit = (
                [m[0] for m in members],
                list(itertools.accumulate(m[1] for m in members)),
            )
            self._homophone_cache[ch] = hit
        return hit

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_homophone_cache"] = {}
        return state


@dataclass
class NoisySentence:
    id: int
    source: SentenceTokens
    tokens: list
    substituted_positions: list = field(default_factory=list)
    n_eligible: int = 0
    skipped: int = 0

    def __len__(self):
        return len(self.tokens)

    @property
    def text(self) -> str:
        return self.source.render(self.tokens)

    @property
    def n_changed(self) -> int:
        return sum(1 for _, orig, new in self.substituted_positions if orig != new)


def eligible_positions(sentence: SentenceTokens, vocab) -> list:
    """Indices of CJK tokens that are in the vocabulary."""
    return [i for i, t in enumerate(sentence.tokens) if t.is_cjk and t.surface in vocab]


def sample_mask(sentence: SentenceTokens, p: float, rng: random.Random, eligible=None) -> list:
    """One Bernoulli(p) draw per token; ineligible positions are forced to False.

    A variate is consumed for every position, so the stream used per sentence
    depends only on its length.
    """
    if eligible is None:
        eligible = {i for i, t in enumerate(sentence.tokens) if t.is_cjk}
    elif not isinstance(eligible, (set, frozenset)):
        eligible = set(eligible)
    draws = [rng.random() < p for _ in sentence.tokens]
    return [bit and i in eligible for i, bit in enumerate(draws)]


def sample_noise(
    strategy: Strategy,
    ch: str,
    context: NoiseContext,
    rng: random.Random,
    counters: Optional[Counter] = None,
) -> str:
    strategy = Strategy(strategy)
    if strategy is Strategy.PLACEHOLDER:
        return context.placeholder_token

    if strategy is Strategy.UNIFORM:
        if not context.chars:
            raise ConfigError("uniform sampling needs a non-empty vocabulary")
        return context.chars[rng.randrange(len(context.chars))]

    if strategy is Strategy.FREQUENCY:
        # rejection against the full table == renormalising over V minus ch
        if context.total_count - context.freq[ch] <= 0:
            raise ConfigError(f"frequency sampling has empty support for {ch!r}")
        while True:
            idx = bisect.bisect_right(context.cum_counts, rng.randrange(context.total_count))
            pick = context.chars[idx]
            if pick != ch:
                return pick

    if strategy is Strategy.HOMOPHONE:
        if context.homophones is None:
            raise ConfigError("homophone sampling needs a homophone table (Pinyin dictionary)")
        members, cum = context.homophone_choices(ch)
        if not members:
            if counters is not None:
                counters["homophone_skips"] += 1
            return ch
        return members[bisect.bisect_right(cum, rng.randrange(cum[-1]))]

    raise ConfigError(f"unknown strategy {strategy!r}")


def perturb_sentence(
    sentence: SentenceTokens,
    config: NoiseConfig,
    context: NoiseContext,
    rng: random.Random,
    mask: Optional[list] = None,
) -> NoisySentence:
    """Substitute noise at the true positions of a freshly drawn (or given) mask."""
    eligible = eligible_positions(sentence, context.vocab)
    if mask is None:
        mask = sample_mask(sentence, config.p, rng, eligible)
    elif len(mask) != len(sentence.tokens):
        raise ValueError(f"mask has {len(mask)} bits for {len(sentence.tokens)} tokens")
    else:
        allowed = set(eligible)
        mask = [bit and i in allowed for i, bit in enumerate(mask)]

    tokens = sentence.surfaces
    out = NoisySentence(sentence.id, sentence, tokens, n_eligible=len(eligible))
    counters = Counter()
    for i, bit in enumerate(mask):
        if bit:
            orig = tokens[i]
            new = sample_noise(config.strategy, orig, context, rng, counters)
            tokens[i] = new
            out.substituted_positions.append((i, orig, new))
    out.skipped = counters["homophone_skips"]
    return out


def _as_sentence(item, idx: int) -> SentenceTokens:
    if isinstance(item, SentencePair):
        return item.src
    if isinstance(item, SentenceTokens):
        return item
    return tokenize(item, idx)


def _perturb_chunk(state, chunk):
    config, context, epoch = state[0], state[1], chunk[0]
    return epoch, [
        perturb_sentence(s, config, context, child_rng(config.seed, NOISE_STREAM, epoch, s.id))
        for s in chunk[1]
    ]


def _chunks(corpus: Iterable, epoch: int, size: int):
    chunk = []
    for idx, item in enumerate(corpus):
        chunk.append(_as_sentence(item, idx))
        if len(chunk) >= size:
            yield epoch, chunk
            chunk = []
    if chunk:
        yield epoch, chunk


def perturb_corpus(
    corpus: Iterable,
    config: NoiseConfig,
    context: NoiseContext,
    epochs: int = 1,
    workers: int = 1,
    chunk_size: int = 500,
) -> Iterator:
    """Yield ``(epoch, NoisySentence)`` for every sentence, epoch by epoch.

    Epochs are numbered from 1. Each sentence draws from its own stream keyed
    by ``(seed, epoch, sentence id)``, so output is the same for any
    ``workers``. For ``epochs > 1`` the corpus must be re-iterable (a list or a
    :class:`~asrnoise.corpus.ParallelCorpus`, not a generator).
    """
    if epochs < 1:
        raise ConfigError(f"epochs must be a positive integer, got {epochs}")
    context.check(config.strategy)
    if epochs > 1 and iter(corpus) is corpus:
        raise ConfigError("corpus must be re-iterable when epochs > 1")

    def work():
        for epoch in range(1, epochs + 1):
            yield from _chunks(corpus, epoch, chunk_size)

    for epoch, batch in ordered_map(_perturb_chunk, work(), workers, state=(config, context)):
        for noisy in batch:
            yield epoch, noisy

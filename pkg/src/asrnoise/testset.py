"""Noisy evaluation sets with exactly ``k`` homophone substitutions per sentence.

Output is sentence-major: the ``variants`` copies of sentence ``i`` occupy
lines ``i * variants`` to ``i * variants + variants - 1``, and each reference
is repeated ``variants`` times alongside.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from asrnoise.corpus import SentencePair, SentenceTokens, tokenize
from asrnoise.errors import AlignmentError, ConfigError
from asrnoise.noiser import NoiseContext, Strategy, eligible_positions, sample_noise
from asrnoise.parallel import ordered_map
from asrnoise.rng import DEFAULT_SEED, TESTSET_STREAM, child_rng

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 10


@dataclass(frozen=True)
class NoisyTestSpec:
    k: int
    variants: int = 3
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.variants < 1:
            raise ConfigError(f"variants must be >= 1, got {self.variants}")


@dataclass
class NoisyVariant:
    sentence_id: int
    variant: int
    source: SentenceTokens
    reference: str
    tokens: list
    substitutions: list = field(default_factory=list)  # (position, original, homophone)
    n_candidates: int = 0
    attempts: int = 1
    duplicate: bool = False
    k_requested: int = 0

    @property
    def text(self) -> str:
        return self.source.render(self.tokens)

    @property
    def shortfall(self) -> bool:
        return len(self.substitutions) < self.k_requested


def homophone_eligible(sentence: SentenceTokens, context: NoiseContext) -> list:
    """Eligible positions whose homophone group has at least one other member."""
    return [
        i
        for i in eligible_positions(sentence, context.vocab)
        if context.homophone_choices(sentence.tokens[i].surface)[0]
    ]


def _check_context(context: NoiseContext) -> None:
    if context.homophones is None or not context.homophones.groups:
        raise ConfigError("noisy test sets need a non-empty homophone table")


def craft_sentence(sentence: SentenceTokens, reference: str, spec: NoisyTestSpec, context: NoiseContext) -> list:
    candidates = homophone_eligible(sentence, context)
    n = min(spec.k, len(candidates))
    seen = set()
    out = []
    for v in range(spec.variants):
        rng = child_rng(spec.seed, TESTSET_STREAM, spec.k, sentence.id, v)
        attempts = 0
        while True:
            attempts += 1
            positions = sorted(rng.sample(candidates, n))
            tokens = sentence.surfaces
            subs = []
            for i in positions:
                new = sample_noise(Strategy.HOMOPHONE, tokens[i], context, rng)
                subs.append((i, tokens[i], new))
                tokens[i] = new
            key = tuple(tokens)
            if key not in seen or n == 0 or attempts >= MAX_ATTEMPTS:
                break
        duplicate = n > 0 and key in seen
        seen.add(key)
        out.append(
            NoisyVariant(
                sentence.id, v, sentence, reference, tokens, subs,
                n_candidates=len(candidates), attempts=attempts,
                duplicate=duplicate, k_requested=spec.k,
            )
        )
    return out


def _craft_chunk(state, chunk):
    spec, context = state
    return [craft_sentence(s, ref, spec, context) for s, ref in chunk]


def _pairs(corpus: Iterable, size: int):
    chunk = []
    for idx, item in enumerate(corpus):
        if isinstance(item, SentencePair):
            pair = (item.src, item.tgt)
        elif isinstance(item, SentenceTokens):
            pair = (item, "")
        else:
            pair = (tokenize(item, idx), "")
        chunk.append(pair)
        if len(chunk) >= size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def craft_noisy_testset(
    corpus: Iterable,
    spec: NoisyTestSpec,
    context: NoiseContext,
    workers: int = 1,
    chunk_size: int = 200,
) -> Iterator[NoisyVariant]:
    """Yield every noisy variant in sentence-major order.

    Each variant replaces ``min(k, |E|)`` distinct positions, drawn uniformly
    without replacement from the homophone-eligible positions ``E``, with a
    homophone drawn by corpus frequency. A variant that repeats an earlier one
    for the same sentence is redrawn up to ``MAX_ATTEMPTS`` times.
    """
    _check_context(context)
    for batch in ordered_map(_craft_chunk, _pairs(corpus, chunk_size), workers, state=(spec, context)):
        for variants in batch:
            for nv in variants:
                if nv.shortfall:
                    logger.debug("sentence %d: only %d of %d positions available",
                                 nv.sentence_id, len(nv.substitutions), spec.k)
                yield nv


def write_audit_row(f, line_number: int, nv: NoisyVariant) -> None:
    for pos, orig, new in nv.substitutions:
        f.write(f"{line_number}\t{nv.variant}\t{pos}\t{orig}\t{new}\n")


@dataclass
class VerificationReport:
    lines_checked: int = 0
    substitutions: int = 0
    shortfall_lines: int = 0
    violations: list = field(default_factory=list)  # (noisy line number, message)

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        status = "OK" if self.ok else f"{len(self.violations)} violation(s)"
        return (
            f"checked {self.lines_checked} lines, {self.substitutions} substitutions, "
            f"{self.shortfall_lines} shortfall lines: {status}"
        )


def _syllable(ch, context, dictionary):
    if dictionary is not None:
        return dictionary.get(ch)
    return context.homophones.syllable_of.get(ch)


def verify_testset(
    original: Iterable,
    noisy: Iterable,
    spec: NoisyTestSpec,
    context: NoiseContext,
    dictionary=None,
    audit: Optional[Iterable] = None,
) -> VerificationReport:
    """Check a crafted set line by line against its source corpus.

    ``noisy`` yields text lines (or :class:`NoisyVariant`). Violations are
    reported with 1-based noisy line numbers. ``audit`` optionally supplies
    ``(line, variant, position, original, homophone)`` rows whose positions
    must be pairwise distinct per line.
    """
    _check_context(context)
    report = VerificationReport()
    noisy_it = iter(noisy)
    line_no = 0
    n_orig = 0
    for idx, item in enumerate(original):
        src = item.src if isinstance(item, SentencePair) else (
            item if isinstance(item, SentenceTokens) else tokenize(item, idx))
        n_orig += 1
        expected = min(spec.k, len(homophone_eligible(src, context)))
        for v in range(spec.variants):
            got = next(noisy_it, None)
            if got is None:
                raise AlignmentError(
                    f"noisy corpus too short: expected {spec.variants} lines per sentence, "
                    f"ran out at sentence {idx} variant {v}"
                )
            line_no += 1
            hyp = got.tokens if isinstance(got, NoisyVariant) else tokenize(got).surfaces
            report.lines_checked += 1
            if expected < spec.k:
                report.shortfall_lines += 1
            ref = src.surfaces
            if len(hyp) != len(ref):
                report.violations.append((line_no, f"length {len(hyp)} != original {len(ref)}"))
                continue
            diffs = [i for i in range(len(ref)) if ref[i] != hyp[i]]
            report.substitutions += len(diffs)
            if len(diffs) != expected:
                report.violations.append(
                    (line_no, f"{len(diffs)} substitutions, expected {expected}"))
            for i in diffs:
                a, b = _syllable(ref[i], context, dictionary), _syllable(hyp[i], context, dictionary)
                if a is None or a != b:
                    report.violations.append(
                        (line_no, f"position {i}: {ref[i]!r} -> {hyp[i]!r} is not a homophone"))
    extra = sum(1 for _ in noisy_it)
    if extra:
        raise AlignmentError(
            f"noisy corpus has {line_no + extra} lines, expected {spec.variants * n_orig}")
    if audit is not None:
        seen = {}
        for row in audit:
            line, pos = int(row[0]), int(row[2])
            positions = seen.setdefault(line, set())
            if pos in positions:
                report.violations.append((line, f"position {pos} substituted twice"))
            positions.add(pos)
    return report

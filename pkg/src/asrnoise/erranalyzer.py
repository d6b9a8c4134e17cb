"""Levenshtein alignment and substitution/deletion/insertion error rates."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from asrnoise.corpus import tokenize
from asrnoise.errors import AlignmentError, UndefinedRateError

MAX_TOKENS = 10_000


class OpKind(enum.Enum):
    MATCH = "match"
    SUBSTITUTION = "sub"
    DELETION = "del"
    INSERTION = "ins"


class AlignmentOp(NamedTuple):
    kind: OpKind
    ref_token: Optional[str] = None
    hyp_token: Optional[str] = None

    @property
    def cost(self) -> int:
        return 0 if self.kind is OpKind.MATCH else 1


def _as_tokens(seq) -> list:
    if isinstance(seq, str):
        return tokenize(seq).surfaces
    return list(seq)


def levenshtein_align(ref: Sequence, hyp: Sequence) -> list:
    """Minimum-edit alignment of two token sequences under unit costs.

    Strings are tokenized first (one token per CJK character). Among
    equal-cost alignments the backtrace prefers, at each step, a match, then
    a substitution, then a deletion, then an insertion.
    """
    ref, hyp = _as_tokens(ref), _as_tokens(hyp)
    n, m = len(ref), len(hyp)
    if n > MAX_TOKENS or m > MAX_TOKENS:
        raise ValueError(f"sequences longer than {MAX_TOKENS} tokens are not aligned ({n}, {m})")

    # dist[i][j] = edit distance between ref[:i] and hyp[:j]
    prev = list(range(m + 1))
    dist = [prev]
    for i in range(1, n + 1):
        r = ref[i - 1]
        row = [i]
        left = i
        for j in range(m):
            best = prev[j] + (r != hyp[j])
            up = prev[j + 1] + 1
            if up < best:
                best = up
            if left + 1 < best:
                best = left + 1
            row.append(best)
            left = best
        dist.append(row)
        prev = row

    match, sub, dele, ins = OpKind.MATCH, OpKind.SUBSTITUTION, OpKind.DELETION, OpKind.INSERTION
    ops = []
    i, j = n, m
    while i and j:
        here = dist[i][j]
        a, b = ref[i - 1], hyp[j - 1]
        if a == b and here == dist[i - 1][j - 1]:
            ops.append(AlignmentOp(match, a, b))
            i -= 1
            j -= 1
        elif a != b and here == dist[i - 1][j - 1] + 1:
            ops.append(AlignmentOp(sub, a, b))
            i -= 1
            j -= 1
        elif here == dist[i - 1][j] + 1:
            ops.append(AlignmentOp(dele, a, None))
            i -= 1
        else:
            ops.append(AlignmentOp(ins, None, b))
            j -= 1
    while i:
        ops.append(AlignmentOp(dele, ref[i - 1], None))
        i -= 1
    while j:
        ops.append(AlignmentOp(ins, None, hyp[j - 1]))
        j -= 1
    ops.reverse()
    return ops


def edit_distance(ref: Sequence, hyp: Sequence) -> int:
    return sum(op.cost for op in levenshtein_align(ref, hyp))


@dataclass
class ErrorReport:
    substitutions: int = 0
    deletions: int = 0
    insertions: int = 0
    ref_tokens: int = 0
    sentences: int = 0

    def add(self, ops: Iterable[AlignmentOp]) -> None:
        for op in ops:
            if op.kind is OpKind.SUBSTITUTION:
                self.substitutions += 1
            elif op.kind is OpKind.DELETION:
                self.deletions += 1
            elif op.kind is OpKind.INSERTION:
                self.insertions += 1
            if op.ref_token is not None:
                self.ref_tokens += 1
        self.sentences += 1

    def merge(self, other: "ErrorReport") -> "ErrorReport":
        return ErrorReport(
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
            self.ref_tokens + other.ref_tokens,
            self.sentences + other.sentences,
        )

    def _rate(self, count: int) -> float:
        if self.ref_tokens == 0:
            raise UndefinedRateError("error rates are undefined with zero reference tokens")
        return count / self.ref_tokens

    @property
    def sub_rate(self) -> float:
        return self._rate(self.substitutions)

    @property
    def del_rate(self) -> float:
        return self._rate(self.deletions)

    @property
    def ins_rate(self) -> float:
        return self._rate(self.insertions)

    @property
    def wer(self) -> float:
        return self._rate(self.substitutions + self.deletions + self.insertions)

    def rows(self) -> list:
        return [
            ("substitution", self.substitutions, self.sub_rate),
            ("deletion", self.deletions, self.del_rate),
            ("insertion", self.insertions, self.ins_rate),
            ("wer", self.substitutions + self.deletions + self.insertions, self.wer),
        ]

    def to_tsv(self) -> str:
        lines = ["category\tcount\trate"]
        lines += [f"{name}\t{n}\t{rate:.4f}" for name, n, rate in self.rows()]
        lines.append(f"ref_tokens\t{self.ref_tokens}\t")
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        return (
            f"sentences={self.sentences} ref_tokens={self.ref_tokens}\n"
            f"Substitution {self.substitutions:>8d} {self.sub_rate:.2%}\n"
            f"Deletion     {self.deletions:>8d} {self.del_rate:.2%}\n"
            f"Insertion    {self.insertions:>8d} {self.ins_rate:.2%}\n"
            f"WER          {self.wer:.4f}"
        )


def error_rates(pairs: Iterable) -> ErrorReport:
    """Aggregate alignment counts over ``(ref, hyp)`` pairs.

    Raises :class:`UndefinedRateError` if the references hold no tokens.
    """
    report = ErrorReport()
    for ref, hyp in pairs:
        report.add(levenshtein_align(ref, hyp))
    if report.ref_tokens == 0:
        raise UndefinedRateError("error rates are undefined with zero reference tokens")
    return report


@dataclass
class NoiseAudit:
    report: ErrorReport = field(default_factory=ErrorReport)
    per_line: list = field(default_factory=list)  # substitution count per line
    eligible: int = 0
    length_mismatches: list = field(default_factory=list)  # 1-based line numbers

    @property
    def substitution_only(self) -> bool:
        """No deletion or insertion in the minimum-edit alignment.

        This can be False even for a pure substitution noiser: a shifted run
        such as 丁丁一 -> 丂丁丁 aligns more cheaply as one insertion plus one
        deletion. :attr:`lengths_preserved` is the positional check.
        """
        return self.report.deletions == 0 and self.report.insertions == 0

    @property
    def lengths_preserved(self) -> bool:
        return not self.length_mismatches

    @property
    def substitution_rate(self) -> float:
        """Substitutions per eligible (CJK) reference token."""
        return self.report.substitutions / self.eligible if self.eligible else 0.0

    def summary(self) -> str:
        r = self.report
        verdict = "substitution-only" if self.substitution_only else "NOT substitution-only"
        return (
            f"lines={len(self.per_line)} eligible={self.eligible} "
            f"sub={r.substitutions} del={r.deletions} ins={r.insertions} "
            f"sub_rate={self.substitution_rate:.4f} length_mismatches={len(self.length_mismatches)} "
            f"({verdict})"
        )


def noise_audit(original: Iterable[str], noised: Iterable[str], vocab=None) -> NoiseAudit:
    """Align each noised line against its original.

    The substitution rate is normalised by the number of CJK tokens in the
    original (restricted to ``vocab`` when given).
    """
    audit = NoiseAudit()
    orig_it, noised_it = iter(original), iter(noised)
    n = 0
    for a in orig_it:
        b = next(noised_it, None)
        if b is None:
            rest = sum(1 for _ in orig_it)
            raise AlignmentError(
                f"line-count mismatch: original has {n + 1 + rest} lines, noised has {n}")
        n += 1
        ref, hyp = tokenize(a), tokenize(b).surfaces
        if len(hyp) != len(ref):
            audit.length_mismatches.append(n)
        ops = levenshtein_align(ref.surfaces, hyp)
        audit.report.add(ops)
        audit.per_line.append(sum(op.kind is OpKind.SUBSTITUTION for op in ops))
        audit.eligible += sum(
            1 for t in ref.tokens if t.is_cjk and (vocab is None or t.surface in vocab))
    rest = sum(1 for _ in noised_it)
    if rest:
        raise AlignmentError(f"line-count mismatch: original has {n} lines, noised has {n + rest}")
    return audit

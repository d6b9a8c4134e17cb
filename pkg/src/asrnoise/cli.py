"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 validation or
configuration error (including verification failures).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from asrnoise.corpus import FrequencyTable, ParallelCorpus, Vocabulary, build_statistics, read_lines
from asrnoise.erranalyzer import error_rates, noise_audit
from asrnoise.errors import AlignmentError, AsrNoiseError
from asrnoise.factored import EmbeddingSpec, emit_factored_corpus
from asrnoise.noiser import PLACEHOLDER, NoiseConfig, NoiseContext, Strategy, perturb_corpus
from asrnoise.pinyin import build_homophone_table, load_pinyin_dictionary
from asrnoise.rng import DEFAULT_SEED
from asrnoise.testset import NoisyTestSpec, craft_noisy_testset, verify_testset, write_audit_row

logger = logging.getLogger("asrnoise")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VALIDATION = 4


class ValidationFailed(AsrNoiseError):
    pass


def _probability(text):
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"p must be in [0, 1], got {p}")
    return p


def _positive(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _seed(text):
    try:
        n = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= n < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return n


def _require_files(*paths):
    for p in paths:
        if p is None:
            continue
        if not os.path.isfile(p):
            raise FileNotFoundError(f"no such file: {p}")
        if not os.access(p, os.R_OK):
            raise PermissionError(f"cannot read {p}")


def _out_dir(args, src) -> Path:
    out = Path(args.out_dir) if args.out_dir else Path(src).parent
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_stats(args):
    if args.stats:
        _require_files(args.stats)
        freq = FrequencyTable.from_tsv(args.stats)
        return Vocabulary.from_frequencies(freq), freq
    return build_statistics(read_lines(args.src), workers=args.workers)


def _load_dictionary(args, required=False):
    if args.pinyin_dict is None:
        if required:
            raise ValidationFailed("--pinyin-dict is required for this command")
        return None
    _require_files(args.pinyin_dict)
    return load_pinyin_dictionary(args.pinyin_dict)


def _announce_seed(seed):
    print(f"seed={seed}", file=sys.stderr)


def cmd_stats(args) -> int:
    _require_files(args.src, args.tgt)
    vocab, freq = build_statistics(ParallelCorpus(args.src, args.tgt), workers=args.workers)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    freq.to_tsv(args.out)
    print(f"vocabulary={len(vocab)} cjk_tokens={freq.total}")
    return EXIT_OK


def cmd_noise(args) -> int:
    _require_files(args.src, args.tgt)
    config = NoiseConfig(Strategy(args.strategy), args.p, args.seed, args.placeholder)
    dictionary = _load_dictionary(args, required=config.strategy is Strategy.HOMOPHONE)
    vocab, freq = _load_stats(args)
    context = NoiseContext.build(vocab, freq, dictionary, args.placeholder)
    context.check(config.strategy)
    out_dir = _out_dir(args, args.src)
    stem = Path(args.src).name
    _announce_seed(config.seed)

    corpus = ParallelCorpus(args.src, args.tgt)
    eligible = masked = changed = skipped = 0
    current = None
    out = log = None
    try:
        for epoch, noisy in perturb_corpus(corpus, config, context, args.epochs, args.workers):
            if epoch != current:
                for h in (out, log):
                    if h is not None:
                        h.close()
                log = None
                current = epoch
                path = out_dir / f"{stem}.epoch{epoch}.noised"
                out = open(path, "w", encoding="utf-8", newline="\n")
                if args.log:
                    log = open(out_dir / f"{stem}.epoch{epoch}.log.tsv", "w", encoding="utf-8", newline="\n")
                logger.info("writing %s", path)
            out.write(noisy.text + "\n")
            if log is not None:
                for pos, orig, new in noisy.substituted_positions:
                    log.write(f"{noisy.id}\t{pos}\t{orig}\t{new}\n")
            eligible += noisy.n_eligible
            masked += len(noisy.substituted_positions)
            changed += noisy.n_changed
            skipped += noisy.skipped
    finally:
        for h in (out, log):
            if h is not None:
                h.close()
    if current is None:
        for epoch in range(1, args.epochs + 1):
            open(out_dir / f"{stem}.epoch{epoch}.noised", "w").close()
    rate = masked / eligible if eligible else 0.0
    changed_rate = changed / eligible if eligible else 0.0
    print(
        f"strategy={config.strategy.value} p={config.p} epochs={args.epochs} "
        f"eligible={eligible} substituted={masked} substitution_rate={rate:.6f} "
        f"changed_rate={changed_rate:.6f} homophone_skips={skipped}"
    )
    return EXIT_OK


def cmd_testset(args) -> int:
    _require_files(args.src, args.refs)
    specs = [NoisyTestSpec(k, args.variants, args.seed) for k in args.k]
    dictionary = _load_dictionary(args, required=True)
    vocab, freq = _load_stats(args)
    context = NoiseContext(vocab, freq, build_homophone_table(vocab, freq, dictionary))
    out_dir = _out_dir(args, args.src)
    stem = Path(args.src).name

    planned = {}
    for spec in specs:
        paths = [out_dir / f"{stem}.k{spec.k}.{ext}" for ext in ("noisy", "refs", "audit.tsv")]
        if not args.refs:
            paths[1] = None
        existing = [str(p) for p in paths if p is not None and p.exists()]
        if existing and not args.force:
            raise ValidationFailed(f"refusing to overwrite {', '.join(existing)} (use --force)")
        planned[spec.k] = paths
    _announce_seed(args.seed)

    failed = False
    for spec in specs:
        noisy_path, refs_path, audit_path = planned[spec.k]
        corpus = ParallelCorpus(args.src, args.refs)
        shortfall = duplicates = 0
        with open(noisy_path, "w", encoding="utf-8", newline="\n") as out, \
                open(audit_path, "w", encoding="utf-8", newline="\n") as audit:
            refs = open(refs_path, "w", encoding="utf-8", newline="\n") if refs_path else None
            try:
                for line_no, nv in enumerate(
                        craft_noisy_testset(corpus, spec, context, workers=args.workers), start=1):
                    out.write(nv.text + "\n")
                    if refs is not None:
                        refs.write(nv.reference + "\n")
                    write_audit_row(audit, line_no, nv)
                    if nv.shortfall:
                        shortfall += 1
                        audit.write(f"{line_no}\t{nv.variant}\tshortfall\t{len(nv.substitutions)}\t{spec.k}\n")
                    duplicates += nv.duplicate
            finally:
                if refs is not None:
                    refs.close()
        audit_rows = [
            row.split("\t") for row in read_lines(audit_path) if row.split("\t")[2] != "shortfall"
        ]
        report = verify_testset(
            ParallelCorpus(args.src), read_lines(noisy_path), spec, context,
            dictionary=dictionary, audit=audit_rows,
        )
        print(f"k={spec.k}: {noisy_path} {report.summary()} duplicate_variants={duplicates}")
        for line, msg in report.violations[:20]:
            print(f"  line {line}: {msg}", file=sys.stderr)
        failed |= not report.ok
    return EXIT_VALIDATION if failed else EXIT_OK


def cmd_factorize(args) -> int:
    _require_files(args.src)
    dictionary = _load_dictionary(args, required=True)
    out_dir = _out_dir(args, args.src)
    stats = emit_factored_corpus(
        ParallelCorpus(args.src), dictionary, out_dir / Path(args.src).name,
        args.format, args.placeholder,
    )
    if args.embedding_spec:
        EmbeddingSpec(args.char_dim, args.pinyin_dim).to_json(args.embedding_spec)
    covered = stats["cjk"] - stats["unk"]
    coverage = covered / stats["cjk"] if stats["cjk"] else 1.0
    print(
        f"wrote {' '.join(str(p) for p in stats['paths'])}; "
        f"dictionary coverage {coverage:.2%} ({covered}/{stats['cjk']} CJK tokens)"
    )
    return EXIT_OK


def cmd_analyze(args) -> int:
    _require_files(args.refs, args.hyps)
    if args.audit:
        audit = noise_audit(read_lines(args.refs), read_lines(args.hyps))
        print(audit.summary())
        report = audit.report
    else:
        report = error_rates(_paired_lines(args.refs, args.hyps))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(report.to_tsv())
    print(report.summary())
    if args.audit and not audit.lengths_preserved:
        for line in audit.length_mismatches[:20]:
            print(f"  line {line}: token count changed", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def _paired_lines(a, b):
    it_a, it_b = read_lines(a), read_lines(b)
    n = 0
    for x in it_a:
        y = next(it_b, None)
        if y is None:
            raise AlignmentError(f"{a} has more lines than {b} ({n + 1 + sum(1 for _ in it_a)} vs {n})")
        n += 1
        yield x, y
    rest = sum(1 for _ in it_b)
    if rest:
        raise AlignmentError(f"{b} has more lines than {a} ({n + rest} vs {n})")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=_positive, default=1, help="worker processes (default 1)")
    common.add_argument("--config", help="JSON file of flag defaults (keys are flag names)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="asrnoise", description="ASR-style noise for Chinese-sourced parallel corpora")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", parents=[common], help="character vocabulary and frequency TSV")
    p.add_argument("src")
    p.add_argument("--tgt")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("noise", parents=[common], help="perturb a source corpus")
    p.add_argument("src")
    p.add_argument("--tgt", help="target file, only checked for line alignment")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="homophone")
    p.add_argument("--p", type=_probability, default=0.1)
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    p.add_argument("--epochs", type=_positive, default=1)
    p.add_argument("--stats", help="frequency TSV from `stats` (default: computed from SRC)")
    p.add_argument("--pinyin-dict")
    p.add_argument("--placeholder", default=PLACEHOLDER)
    p.add_argument("--out-dir")
    p.add_argument("--log", action="store_true", help="write a substitution log TSV per epoch")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("testset", parents=[common], help="craft k-substitution homophone test sets")
    p.add_argument("src")
    p.add_argument("--refs")
    p.add_argument("--k", type=_positive, nargs="+", default=[1, 2, 3])
    p.add_argument("--variants", type=_positive, default=3)
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    p.add_argument("--stats")
    p.add_argument("--pinyin-dict")
    p.add_argument("--out-dir")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_testset)

    p = sub.add_parser("factorize", parents=[common], help="emit character|pinyin factored input")
    p.add_argument("src")
    p.add_argument("--pinyin-dict")
    p.add_argument("--format", choices=["combined", "split"], default="combined")
    p.add_argument("--placeholder", default=PLACEHOLDER)
    p.add_argument("--out-dir")
    p.add_argument("--embedding-spec", help="also write a char_dim/pinyin_dim JSON here")
    p.add_argument("--char-dim", type=_positive, default=64)
    p.add_argument("--pinyin-dim", type=_positive, default=448)
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("analyze", parents=[common], help="Levenshtein error rates")
    p.add_argument("refs")
    p.add_argument("hyps")
    p.add_argument("--out", help="write the report as TSV")
    p.add_argument("--audit", action="store_true",
                   help="treat hyps as noiser output; fail unless substitution-only")
    p.set_defaults(func=cmd_analyze)
    return parser


def _apply_config(parser, argv):
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    with open(args.config, encoding="utf-8") as f:
        values = json.load(f)
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    subparser.set_defaults(**{k.replace("-", "_"): v for k, v in values.items()})
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: bad config file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (AsrNoiseError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Exit codes: 0 success, 1 data or validation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .corpus import load_manifest, load_parallel, read_lines, subsample
from .coverage import format_dump, inspect, missing_char_proportion
from .errors import ConfigError, TokfairError
from .info_parity import (
    DEFAULT_ALPHA,
    DEFAULT_ORDER,
    corpus_ip,
    corpus_ip_from_records,
    ingest_external_nll,
    train_scorers,
)
from .parity import tp_table
from .registry import char_set, load_registry
from .report import (
    AuditRun,
    coverage_table,
    correlation_table,
    emit_report,
    inspect_table,
    ip_table,
    read_metric_vectors,
    read_score_vector,
    read_table,
)
from .report import tp_table as tp_report_table
from .stats import correlate, default_expected_sign, sign_report
from .tokenizers import load_tokenizer

log = logging.getLogger("tokfair")


class UsageError(Exception):
    pass


def _codes(raw: str | None) -> list[str]:
    return [c.strip() for c in raw.split(",") if c.strip()] if raw else []


def _format(args) -> str:
    if args.format:
        return args.format
    suffix = Path(args.out).suffix.lower() if args.out else ""
    return {".json": "doc", ".svg": "svg", ".txt": "dump"}.get(suffix, "csv")


def _load_models(args):
    models = [load_tokenizer(p) for p in args.tokenizer]
    if getattr(args, "normalize", None):
        models = [dataclasses.replace(m, normalize=args.normalize, _state={}) for m in models]
    return models


def _load_corpus(args, codes, ref):
    manifest = load_manifest(args.manifest) if args.manifest else None
    corpus = load_parallel(args.corpus_dir, codes, ref, manifest)
    if args.sample:
        corpus = subsample(corpus, args.sample, args.seed)
    return corpus


def _emit(args, run, table, registry=None):
    fmt = _format(args)
    if fmt == "dump":
        raise UsageError("--format dump is only available for diagnose")
    text = emit_report(table, fmt, args.out, run, registry)
    if args.out:
        run.outputs.append(args.out)
    else:
        sys.stdout.write(text)


def cmd_tp(args, run):
    registry = load_registry(args.registry)
    ref = args.ref or registry.reference
    codes = _codes(args.langs)
    if not codes:
        raise UsageError("--langs is required")
    corpus = _load_corpus(args, codes, ref)
    models = _load_models(args)
    report = tp_table(models, corpus, codes)
    for (model, code), msg in report.errors().items():
        log.warning("%s / %s: %s", model, code, msg)
    _emit(args, run, tp_report_table(report), registry)


def cmd_ip(args, run):
    registry = load_registry(args.registry)
    ref = args.ref or registry.reference
    codes = _codes(args.langs)
    if not codes:
        raise UsageError("--langs is required")
    stats = []
    if args.scorer == "external":
        if not args.nll_file:
            raise UsageError("--scorer external needs --nll-file")
        records = ingest_external_nll(args.nll_file)
        n_lines = None
        if args.corpus_dir:
            n_lines = _load_corpus(args, codes, ref).n_lines
        for code in codes:
            stats.append(corpus_ip_from_records(records, ref, code, n_lines))
        name = Path(args.nll_file).stem
    else:
        if not args.train_dir or not args.corpus_dir:
            raise UsageError("--scorer ngram needs --train-dir and --corpus-dir")
        corpus = _load_corpus(args, codes, ref)
        texts = {}
        for code in corpus.codes:
            path = Path(args.train_dir) / f"{code}.txt"
            if not path.is_file():
                raise ConfigError(f"no training text for {code}: {path}")
            texts[code] = "\n".join(read_lines(path)).encode("utf-8")
        scorers = train_scorers(texts, args.order, args.alpha)
        for code in codes:
            stats.append(corpus_ip(scorers, corpus, code))
        name = f"ngram-k{args.order}-a{args.alpha:g}"
    _emit(args, run, ip_table(name, stats), registry)


def cmd_coverage(args, run):
    registry = load_registry(args.registry)
    codes = _codes(args.langs) or [p.code for p in registry if char_set(p)]
    rows = []
    for model in _load_models(args):
        table = coverage_table(model.name, [missing_char_proportion(model, registry[c]) for c in codes])
        rows.extend(table.rows)
    table.rows = rows
    _emit(args, run, table, registry)


def cmd_diagnose(args, run):
    if len(args.tokenizer) != 1:
        raise UsageError("diagnose takes exactly one --tokenizer")
    model = _load_models(args)[0]
    text = " ".join(args.text) if args.text else sys.stdin.read().rstrip("\n")
    records = inspect(model, text)
    fmt = _format(args) if (args.format or args.out) else "dump"
    if fmt == "dump":
        out = format_dump(records)
        if args.out:
            Path(args.out).write_text(out, encoding="utf-8")
            run.outputs.append(args.out)
        else:
            sys.stdout.write(out)
        return
    _emit(args, run, inspect_table(records))


def cmd_correlate(args, run):
    if not (args.metric or args.shared_metric) or not args.scores:
        raise UsageError("correlate needs --metric or --shared-metric, and --scores")
    registry = load_registry(args.registry)
    # per-model metrics pair with the score file of the same model; shared
    # metrics (e.g. n-gram IP, which involves no tokenizer) pair with every one
    metrics = [(v, False) for path in args.metric or [] for v in read_metric_vectors(path)]
    metrics += [(v, True) for path in args.shared_metric or [] for v in read_metric_vectors(path)]
    scores = [read_score_vector(p) for p in args.scores]
    results = []
    for sv in scores:
        for mv, shared in metrics:
            if not shared and mv.model_name != sv.model_name:
                continue
            res = correlate(mv, sv, registry, args.collapse_middle)
            results.append(sign_report(res, args.expected_sign or default_expected_sign(mv.name)))
    if not results:
        raise ConfigError("no metric vector matches any score vector's model")
    _emit(args, run, correlation_table(results), registry)


def cmd_report(args, run):
    if not args.metric or len(args.metric) != 1:
        raise UsageError("report takes exactly one --metric input file")
    registry = load_registry(args.registry)
    _emit(args, run, read_table(args.metric[0]), registry)


COMMANDS = {
    "tp": cmd_tp,
    "ip": cmd_ip,
    "coverage": cmd_coverage,
    "diagnose": cmd_diagnose,
    "correlate": cmd_correlate,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tokfair", description="Tokenizer fairness audits.")
    parser.add_argument("--version", action="version", version=f"tokfair {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def common(p, formats=("csv", "doc", "svg")):
        p.add_argument("--registry", help="language registry file (default: bundled)")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=formats, help="output format (default: from --out suffix)")

    def corpus_flags(p):
        p.add_argument("--corpus-dir", help="directory with one <code>.txt per language")
        p.add_argument("--manifest", help="JSON file mapping language codes to corpus files")
        p.add_argument("--ref", help="reference language code (default: registry reference)")
        p.add_argument("--langs", help="comma-separated language codes")
        p.add_argument("--sample", type=int, help="use this many randomly chosen lines")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("tp", help="tokenization parity per language")
    p.add_argument("--tokenizer", action="append", required=True, help="tokenizer model file (repeatable)")
    p.add_argument("--normalize", choices=("none", "nfc", "nfkc"))
    corpus_flags(p)
    common(p)

    p = sub.add_parser("ip", help="information parity per language")
    p.add_argument("--scorer", choices=("ngram", "external"), default="ngram")
    p.add_argument("--nll-file", help="tab-separated NLL records (with --scorer external)")
    p.add_argument("--train-dir", help="monolingual training texts, one <code>.txt per language")
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    corpus_flags(p)
    common(p)

    p = sub.add_parser("coverage", help="missing-character proportion per language")
    p.add_argument("--tokenizer", action="append", required=True)
    p.add_argument("--langs", help="comma-separated language codes (default: all with ranges)")
    common(p)

    p = sub.add_parser("diagnose", help="per-token byte and mojibake inspection")
    p.add_argument("--tokenizer", action="append", required=True)
    p.add_argument("--normalize", choices=("none", "nfc", "nfkc"))
    p.add_argument("text", nargs="*", help="text to inspect (default: stdin)")
    common(p, formats=("dump", "csv", "doc"))

    p = sub.add_parser("correlate", help="Pearson correlation of metrics with task scores")
    p.add_argument("--metric", action="append", help="metric file: tp/ip/coverage output or code,value CSV")
    p.add_argument("--shared-metric", action="append",
                   help="metric file correlated against every score file regardless of model")
    p.add_argument("--scores", action="append", help="score file: code,value CSV with '# task:' and '# model:'")
    p.add_argument("--expected-sign", choices=("positive", "negative"))
    p.add_argument("--collapse-middle", action="store_true", help="count Middle-tier languages as Low")
    common(p)

    p = sub.add_parser("report", help="re-render a result file as csv, doc or svg")
    p.add_argument("--metric", action="append", help="result file written by another subcommand")
    common(p)
    return parser


def _params(args) -> dict:
    skip = {"command", "out", "format", "tokenizer", "metric", "shared_metric", "scores", "registry", "corpus_dir",
            "manifest", "nll_file", "train_dir", "text"}
    if getattr(args, "scorer", None) == "external":
        skip |= {"order", "alpha"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v not in (None, False, [])}


def _inputs(args) -> list[str]:
    out = []
    for key in ("tokenizer", "metric", "shared_metric", "scores"):
        out.extend(getattr(args, key, None) or [])
    for key in ("registry", "corpus_dir", "manifest", "nll_file", "train_dir"):
        v = getattr(args, key, None)
        if v:
            out.append(v)
    return out


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO, format="tokfair: %(message)s", stream=sys.stderr)
    run_rec = AuditRun(args.command, _inputs(args), _params(args), started=time.time())
    try:
        COMMANDS[args.command](args, run_rec)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"tokfair: error: {e}", file=sys.stderr)
        return 2
    except (TokfairError, OSError, ValueError, KeyError) as e:
        print(f"tokfair: error: {e}", file=sys.stderr)
        return 1
    run_rec.finished = time.time()
    log.debug("%s finished in %.3fs", args.command, run_rec.finished - run_rec.started)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command-line front end.

Eight subcommands wire files to the library: metrics extraction, trend
tests, cross-parser agreement, noise sensitivity, attachment scoring,
adversarial attacks, sentence filtering and balanced sampling. Every
command is a pure function of (inputs, flags, seed): re-running
produces byte-identical outputs. Tabular outputs start with ``#``
comment lines recording the tool version, the seed and a hash of the
effective configuration.

Exit codes: 0 on success, 1 on domain errors (defective data, underfull
cells), 2 on usage or I/O errors.
"""

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys

from . import __version__
from .attack import ALPHABET_PROFILES, AttackConfig, SpellingLexicon, historical_attack, ocr_attack
from .conllu import read_conllu, write_conllu
from .errors import DomainError, UsageError
from .evaluate import score
from .metrics import METRIC_NAMES, compute_all
from .pipeline import (
    PERIOD_MEAN, POOLED, TrendCase, TrendTable, build_series, case_id,
    majority_vote, observation_table, parser_agreement, per_metric_fleiss,
    sensitivity_report, trend_table,
)
from .sampling import (
    DEFAULT_ANCHORS, DEFAULT_OFFSET, DEFAULT_PER_CELL, DEFAULT_PERIOD_GROUPS,
    SamplingPlan, assign_cells, balanced_sample, filter_sentence,
)
from .seeding import derive_rng
from .stats import LabelSeries, TrendResult
from .tree import TreeDefect, build_tree

log = logging.getLogger(__name__)

METRIC_TABLE_COLUMNS = ("sent_id", "parser", "period", "length") + METRIC_NAMES
TREND_TABLE_COLUMNS = ("parser", "metric", "anchor", "direction",
                       "s", "var_s", "z", "p", "n")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _config_hash(config):
    digest = hashlib.sha256(json.dumps(config, sort_keys=True).encode("utf-8"))
    return digest.hexdigest()[:16]


def _header_lines(command, seed, config):
    return [f"# tool = syntrend {__version__}",
            f"# command = {command}",
            f"# seed = {'' if seed is None else seed}",
            f"# config = {_config_hash(config)}"]


def _write_table(path, command, seed, config, columns, rows, fmt="csv"):
    buffer = io.StringIO()
    if fmt == "csv":
        for line in _header_lines(command, seed, config):
            buffer.write(line + "\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    elif fmt == "jsonl":
        header = {"tool": f"syntrend {__version__}", "command": command,
                  "seed": seed, "config": _config_hash(config)}
        buffer.write(json.dumps({"header": header}, sort_keys=True) + "\n")
        for row in rows:
            obj = {col: val for col, val in zip(columns, row)}
            buffer.write(json.dumps(obj, sort_keys=True) + "\n")
    else:
        raise UsageError(f"unknown output format {fmt!r}")
    data = buffer.getvalue()
    if path == "-":
        sys.stdout.write(data)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(data)


def _read_table(path):
    """Rows of a #-commented CSV (or jsonl) table as dictionaries."""
    rows = []
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    if not lines:
        return rows
    if lines[0].lstrip().startswith("{"):
        for line in lines:
            obj = json.loads(line)
            if "header" not in obj:
                rows.append(obj)
        return rows
    reader = csv.DictReader(lines)
    return list(reader)


def _default_seed(value):
    if value is not None:
        return value
    env = os.environ.get("SYNTREND_SEED")
    return int(env) if env else 0


def _parse_anchors(text):
    try:
        return tuple(int(a) for a in text.split(","))
    except ValueError:
        raise UsageError(f"bad anchor list {text!r}; expected e.g. 5,10,15")


def _parse_period_groups(text):
    groups = []
    try:
        for chunk in text.split(","):
            start, _, end = chunk.partition("-")
            groups.append((int(start), int(end)))
    except ValueError:
        raise UsageError(f"bad period groups {text!r}; expected e.g. "
                         "1860-1879,1880-1899")
    return tuple(groups)


def _sentence_period(meta):
    if "decade" in meta:
        return meta["decade"]
    if "date" in meta:
        return meta["date"].split("-")[0]
    return ""


# ---------------------------------------------------------------- metrics

def cmd_metrics(args):
    seed = _default_seed(args.seed)
    config = {"inputs": [str(p) for p in args.inputs], "seed": seed,
              "parser": args.parser, "format": args.format}
    rows = []
    defects = []
    for path in args.inputs:
        treebank = read_conllu(path)
        for index, record in enumerate(treebank):
            meta = record.meta
            sent_id = meta.get("sent_id", f"{os.path.basename(path)}:{index + 1}")
            parser = meta.get("parser", args.parser)
            tree = build_tree(record)
            if isinstance(tree, TreeDefect):
                defects.append((sent_id, parser, tree.kind,
                                ",".join(str(p) for p in tree.detail)))
                continue
            rng = derive_rng(seed, "metrics", sent_id)
            vector = compute_all(tree, rng, meta=meta)
            values = vector.as_dict()
            row = [sent_id, parser, _sentence_period(meta),
                   vector.sentence_length]
            row.extend(values[name] for name in METRIC_NAMES)
            rows.append(row)
    _write_table(args.out, "metrics", seed, config, METRIC_TABLE_COLUMNS,
                 rows, fmt=args.format)
    defect_path = args.defects or (args.out + ".defects.csv")
    if args.out != "-":
        _write_table(defect_path, "metrics-defects", seed, config,
                     ("sent_id", "parser", "kind", "positions"), defects)
    if defects:
        log.warning("skipped %d defective parses (see %s)",
                    len(defects), defect_path)
    return 0


# ------------------------------------------------------------------ trend

def _load_observations(path, args):
    groups = _parse_period_groups(args.period_groups) if args.period_groups else None
    try:
        return observation_table(
            _read_table(path), anchors=_parse_anchors(args.anchors),
            offset=args.offset, period_groups=groups)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"{path}: bad metric table row ({exc})")


def _single_parser(table, requested):
    parsers = table.parsers()
    if requested:
        if requested not in parsers:
            raise UsageError(f"parser {requested!r} not in table "
                             f"(has: {', '.join(parsers)})")
        return requested
    if len(parsers) != 1:
        raise UsageError(f"table has several parsers ({', '.join(parsers)}); "
                         "pick one with --parser")
    return parsers[0]


def cmd_trend(args):
    table = _load_observations(args.table, args)
    parser = _single_parser(table, args.parser)
    mode = {"period-mean": PERIOD_MEAN, "pooled": POOLED}[args.mode]
    config = {"table": str(args.table), "parser": parser, "alpha": args.alpha,
              "mode": args.mode, "partial": args.partial_length,
              "anchors": args.anchors, "offset": args.offset,
              "period_groups": args.period_groups}
    result = trend_table(table, parser, alpha=args.alpha, mode=mode,
                         anchors=_parse_anchors(args.anchors),
                         partial_with_length=args.partial_length)
    rows = []
    for case in result.cases:
        r = case.result
        if r is None:
            rows.append([parser, case.metric, case.anchor, "", "", "", "", "", ""])
        else:
            rows.append([parser, case.metric, case.anchor, r.direction,
                         r.s, r.var_s, r.z, r.p, r.n])
    _write_table(args.out, "trend", None, config, TREND_TABLE_COLUMNS, rows)
    if args.plot_data:
        plot_rows = []
        for case in result.cases:
            if case.result is None:
                continue
            sub = table.filter_parser(parser)
            periods = sorted({r.period for r in sub.rows if r.anchor == case.anchor})
            series = build_series(sub, case.metric, case.anchor, mode=mode)
            if mode == PERIOD_MEAN:
                for period, value in zip(periods, series):
                    plot_rows.append([parser, case.metric, case.anchor,
                                      period, float(value)])
        _write_table(args.plot_data, "trend-plot-data", None, config,
                     ("parser", "metric", "anchor", "period", "value"),
                     plot_rows)
    return 0


def _load_label_series(paths):
    """Trend-table files -> {parser: LabelSeries}, plus full result rows."""
    series = {}
    for path in paths:
        rows = _read_table(path)
        if not rows:
            raise UsageError(f"{path}: empty trend table")
        parsers = {row["parser"] for row in rows}
        if len(parsers) != 1:
            raise UsageError(f"{path}: expected one parser per trend table, "
                             f"found {sorted(parsers)}")
        parser = parsers.pop()
        if parser in series:
            raise UsageError(f"duplicate trend table for parser {parser!r}")
        labels = tuple(row["direction"] or None for row in rows)
        ids = tuple(case_id(row["metric"], int(row["anchor"])) for row in rows)
        series[parser] = LabelSeries(labels=labels, case_ids=ids)
    return series


def cmd_agree(args):
    series = _load_label_series(args.tables)
    config = {"tables": [str(p) for p in args.tables],
              "threshold": args.threshold,
              "crossing_threshold": args.crossing_threshold}
    os.makedirs(args.out_dir, exist_ok=True)

    report = parser_agreement(series)
    rows = []
    for i, parser in enumerate(report.parsers):
        rows.append([parser] + list(report.matrix[i])
                    + [report.averages[parser]])
    _write_table(os.path.join(args.out_dir, "agreement.csv"), "agree", None,
                 config, ("parser",) + report.parsers + ("average",), rows)

    fleiss = per_metric_fleiss(series)
    fleiss_rows = [[metric, fleiss[metric]] for metric in METRIC_NAMES
                   if metric in fleiss]
    _write_table(os.path.join(args.out_dir, "fleiss.csv"), "agree", None,
                 config, ("metric", "fleiss_kappa"), fleiss_rows)

    stable = majority_vote(series, threshold=args.threshold,
                           crossing_threshold=args.crossing_threshold)
    stable_rows = [[e.metric, e.anchor, e.direction or "",
                    e.support if e.direction else ""]
                   for e in stable.entries]
    _write_table(os.path.join(args.out_dir, "stable_trends.csv"), "agree",
                 None, config, ("metric", "anchor", "direction", "support"),
                 stable_rows)
    return 0


def cmd_sensitivity(args):
    original = _load_observations(args.original, args)
    corrected = _load_observations(args.corrected, args)
    report = sensitivity_report(original, corrected)
    config = {"original": str(args.original), "corrected": str(args.corrected)}
    columns = ("metric",) + report.parsers + ("average",)
    rows = []
    for metric in report.metrics:
        rows.append([metric] + [report.cell(metric, p) for p in report.parsers]
                    + [report.metric_averages[metric]])
    rows.append(["average"] + [report.parser_averages[p] for p in report.parsers]
                + [report.overall])
    _write_table(args.out, "sensitivity", None, config, columns, rows)
    return 0


# ------------------------------------------------------- evaluate / attack

def cmd_evaluate(args):
    gold = read_conllu(args.gold)
    system = read_conllu(args.system)
    result = score(gold, system, on_mismatch=args.on_mismatch)
    config = {"gold": str(args.gold), "system": str(args.system),
              "on_mismatch": args.on_mismatch}
    columns = ("uas_precision", "uas_recall", "uas_f1",
               "las_precision", "las_recall", "las_f1",
               "uas_correct", "las_correct", "gold_tokens", "system_tokens")
    row = [getattr(result, col) for col in columns]
    _write_table(args.out, "evaluate", None, config, columns, [row])
    return 0


def cmd_attack(args):
    treebank = read_conllu(args.input)
    seed = _default_seed(args.seed)
    if args.kind == "historical":
        if not args.lexicon:
            raise UsageError("historical attack needs --lexicon")
        lexicon = SpellingLexicon.from_file(args.lexicon)
        attacked, affected = historical_attack(treebank, lexicon)
        print(f"affected sentences: {affected}")
    else:
        alphabet = args.alphabet or ALPHABET_PROFILES[args.profile]
        config = AttackConfig(char_fraction=args.fraction,
                              tokens_per_sentence=args.tokens,
                              alphabet=alphabet, seed=seed)
        attacked = ocr_attack(treebank, config)
    write_conllu(attacked, args.out)
    return 0


# --------------------------------------------------------- filter / sample

def cmd_filter(args):
    treebank = read_conllu(args.input)
    kept = []
    rejected = []
    for index, record in enumerate(treebank):
        sent_id = record.meta.get("sent_id", str(index + 1))
        verdict = filter_sentence(record)
        if verdict.keep:
            kept.append(record)
        else:
            rejected.append([sent_id, ";".join(verdict.failed)])
    out_treebank = type(treebank)(kept, source=treebank.source)
    write_conllu(out_treebank, args.out)
    report_path = args.report or (args.out + ".rejected.csv")
    config = {"input": str(args.input)}
    _write_table(report_path, "filter", None, config,
                 ("sent_id", "failed_rules"), rejected)
    return 0


def cmd_sample(args):
    seed = _default_seed(args.seed)
    plan = SamplingPlan(
        anchors=_parse_anchors(args.anchors), offset=args.offset,
        period_groups=_parse_period_groups(args.period_groups),
        per_cell=args.per_cell, seed=seed)
    records = []
    for row in _read_table(args.index):
        try:
            records.append((row["sent_id"], int(row["length"]), int(row["year"])))
        except (KeyError, ValueError) as exc:
            raise UsageError(f"{args.index}: bad index row ({exc})")
    cells, unassigned = assign_cells(records, plan)
    if unassigned:
        log.warning("%d sentences fit no (length, period) cell", len(unassigned))
    manifest = balanced_sample(cells, plan, strict=not args.lenient)
    config = {"index": str(args.index), "anchors": args.anchors,
              "offset": args.offset, "period_groups": args.period_groups,
              "per_cell": args.per_cell, "lenient": args.lenient}
    _write_table(args.out, "sample", seed, config,
                 ("anchor", "period_start", "sent_id"), manifest)
    return 0


# ------------------------------------------------------------------ parser

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="syntrend",
        description="Dependency-tree metrics and diachronic trend analysis")
    parser.add_argument("--version", action="version",
                        version=f"syntrend {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metrics", help="per-sentence metric table from CoNLL-U")
    p.add_argument("inputs", nargs="+", help="CoNLL-U files")
    p.add_argument("--out", required=True, help="output table ('-' = stdout)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--parser", default="unknown",
                   help="parser name when metadata has none")
    p.add_argument("--defects", default=None, help="defect sidecar path")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("trend", help="Mann-Kendall trend table from metrics")
    p.add_argument("table", help="metric table file")
    p.add_argument("--out", required=True)
    p.add_argument("--parser", default=None)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--mode", choices=("period-mean", "pooled"),
                   default="period-mean")
    p.add_argument("--partial-length", action="store_true",
                   help="condition on sentence length (partial test)")
    p.add_argument("--anchors", default=",".join(map(str, DEFAULT_ANCHORS)))
    p.add_argument("--offset", type=int, default=DEFAULT_OFFSET)
    p.add_argument("--period-groups", default=None,
                   help="fold periods into groups, e.g. 1860-1879,1880-1899")
    p.add_argument("--plot-data", default=None,
                   help="also emit tidy per-period series for plotting")
    p.set_defaults(func=cmd_trend)

    p = sub.add_parser("agree", help="agreement reports over trend tables")
    p.add_argument("tables", nargs="+", help="one trend table per parser")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--threshold", type=int, default=3)
    p.add_argument("--crossing-threshold", type=int, default=2)
    p.set_defaults(func=cmd_agree)

    p = sub.add_parser("sensitivity",
                       help="Spearman correlation between two metric tables")
    p.add_argument("original")
    p.add_argument("corrected")
    p.add_argument("--out", required=True)
    p.add_argument("--anchors", default=",".join(map(str, DEFAULT_ANCHORS)))
    p.add_argument("--offset", type=int, default=DEFAULT_OFFSET)
    p.add_argument("--period-groups", default=None)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("evaluate", help="UAS/LAS of a system parse vs gold")
    p.add_argument("gold")
    p.add_argument("system")
    p.add_argument("--out", default="-")
    p.add_argument("--on-mismatch", choices=("error", "prefix"),
                   default="error")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("attack", help="adversarial treebank generation")
    p.add_argument("input")
    p.add_argument("--kind", choices=("historical", "ocr"), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lexicon", default=None, help="modern<TAB>historical pairs")
    p.add_argument("--fraction", type=float, default=0.10,
                   help="share of characters to corrupt per token")
    p.add_argument("--tokens", type=int, default=1,
                   help="tokens to corrupt per sentence")
    p.add_argument("--profile", choices=sorted(ALPHABET_PROFILES),
                   default="german")
    p.add_argument("--alphabet", default=None,
                   help="explicit replacement character pool")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("filter", help="apply the sentence-quality rules")
    p.add_argument("input")
    p.add_argument("--out", required=True, help="kept sentences (CoNLL-U)")
    p.add_argument("--report", default=None, help="rejection report path")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("sample", help="length/period-balanced sampling")
    p.add_argument("index", help="CSV with sent_id,length,year")
    p.add_argument("--out", required=True)
    p.add_argument("--anchors", default=",".join(map(str, DEFAULT_ANCHORS)))
    p.add_argument("--offset", type=int, default=DEFAULT_OFFSET)
    p.add_argument("--per-cell", type=int, default=DEFAULT_PER_CELL)
    p.add_argument("--period-groups",
                   default=",".join(f"{s}-{e}" for s, e in DEFAULT_PERIOD_GROUPS))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--lenient", action="store_true",
                   help="sample underfull cells instead of failing")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None):
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""
Command-line entry point.

    readspont features  FILE...            feature CSV
    readspont classify  FILE...            label / score per file
    readspont evaluate  MANIFEST -o DIR    report.json + CSV exports
    readspont synth     -o DIR             synthetic labeled corpus
    readspont histogram REPORT.json        score histogram CSV

Exit codes: 0 success, 1 I/O failure, 2 malformed input, 3 bad configuration.
"""

from __future__ import annotations

import argparse
import logging
import sys
from contextlib import contextmanager
from pathlib import Path

from .alphabet import Label, StreamFormatError, WordPolicy, read_als
from .corpus import (
    FileError,
    ManifestError,
    borderline_report,
    evaluate,
    export_histogram,
    export_scatter,
    load_report_records,
    read_manifest,
    write_histogram_csv,
    write_records_csv,
    write_report_json,
    write_scatter_csv,
)
from .features import extract, fmt, write_feature_csv
from .scoring import ConfigError, ScoreParams, classify
from .synthgen import READ_PROFILE, SPONT_PROFILE, GenProfile, InfeasibleProfile, generate_corpus

EXIT_OK, EXIT_IO, EXIT_FORMAT, EXIT_CONFIG = 0, 1, 2, 3

PARAM_FLAGS = ("lambda1", "lambda2", "lambda3", "tau1", "tau2", "tau3", "tau_r", "delta")


class _Parser(argparse.ArgumentParser):
    # unknown flags and bad values are configuration errors, not format errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--stride-ms", type=float, default=20.0,
                   help="milliseconds per frame when a file has no header (default 20)")
    p.add_argument("--policy", choices=[w.value for w in WordPolicy], default=WordPolicy.ANY_SYMBOL.value,
                   help="word policy: 'any' counts all-unknown runs as words, 'active' drops them")


def _add_params(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("score parameters")
    g.add_argument("--params", metavar="PATH", help="key=value parameter file")
    for name in PARAM_FLAGS:
        g.add_argument("--" + name.replace("_", "-"), dest=name, type=float, default=None)
    g.add_argument("--rule-polarity", default=None,
                   help="spontaneous-above (default) or paper-literal")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="readspont", description="Classify read vs spontaneous speech from alphabet streams.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("features", help="measured and derived features as CSV")
    p.add_argument("files", nargs="+")
    p.add_argument("-o", "--output")
    _add_common(p)

    p = sub.add_parser("classify", help="score and label each file")
    p.add_argument("files", nargs="+")
    p.add_argument("-o", "--output")
    _add_common(p)
    _add_params(p)

    p = sub.add_parser("evaluate", help="evaluate a manifest of labeled streams")
    p.add_argument("manifest")
    p.add_argument("-o", "--out-dir", required=True)
    p.add_argument("--min-duration", type=float, default=2.0, help="drop segments shorter than this (s)")
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--workers", type=int, default=None)
    _add_common(p)
    _add_params(p)

    p = sub.add_parser("synth", help="write a synthetic labeled corpus")
    p.add_argument("-o", "--out-dir", required=True)
    p.add_argument("--n-read", type=int, default=50)
    p.add_argument("--n-spont", type=int, default=50)
    p.add_argument("--jitter", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--stride-ms", type=float, default=20.0)
    p.add_argument("--intra-fraction", type=float, default=0.7)
    for prefix, prof in (("read", READ_PROFILE), ("spont", SPONT_PROFILE)):
        p.add_argument(f"--{prefix}-wps", type=float, default=prof.wps_target)
        p.add_argument(f"--{prefix}-active-awl", type=float, default=prof.active_awl_target)
        p.add_argument(f"--{prefix}-inactive-aps", type=float, default=prof.inactive_aps_target)
        p.add_argument(f"--{prefix}-duration", type=float, default=prof.duration_s)

    p = sub.add_parser("histogram", help="score histogram from a report.json")
    p.add_argument("report")
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("-o", "--output")
    return parser


def params_from_args(args) -> ScoreParams:
    params = ScoreParams()
    if args.params:
        try:
            params = ScoreParams.from_file(args.params)
        except OSError as exc:
            raise FileError(args.params, exc.strerror or exc) from exc
    overrides = {k: getattr(args, k) for k in PARAM_FLAGS if getattr(args, k) is not None}
    if args.rule_polarity is not None:
        overrides["rule_polarity"] = args.rule_polarity
    return ScoreParams.from_mapping(overrides, params)


@contextmanager
def _output(path):
    if not path:
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise FileError(path, exc.strerror or exc) from exc
    with fh:
        yield fh


def _load_files(paths, stride_ms):
    streams = []
    for path in paths:
        try:
            streams.append(read_als(path, stride_ms, id=Path(path).stem))
        except StreamFormatError as exc:
            raise StreamFormatError(f"{path}: {exc}") from exc
        except OSError as exc:
            raise FileError(path, exc.strerror or exc) from exc
    return streams


def cmd_features(args) -> int:
    policy = WordPolicy(args.policy)
    streams = _load_files(args.files, args.stride_ms)
    rows = [(s.id, *extract(s, policy)) for s in streams]
    with _output(args.output) as fh:
        write_feature_csv(rows, fh)
    return EXIT_OK


def cmd_classify(args) -> int:
    params = params_from_args(args)
    policy = WordPolicy(args.policy)
    streams = _load_files(args.files, args.stride_ms)
    with _output(args.output) as fh:
        fh.write(f"# stride_ms={args.stride_ms:g} policy={policy.value} "
                 f"rule_polarity={params.rule_polarity.value} tau_r={params.tau_r:g} delta={params.delta:g}\n")
        fh.write("id\tlabel\tscore\tborderline\n")
        for s in streams:
            _, d = extract(s, policy)
            decision = classify(d, params)
            fh.write(f"{s.id}\t{decision.label.value}\t{fmt(decision.score)}\t{int(decision.borderline)}\n")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    params = params_from_args(args)
    if args.min_duration < 0:
        raise ConfigError("--min-duration must be >= 0")
    if args.bins < 1:
        raise ConfigError("--bins must be >= 1")
    manifest = read_manifest(args.manifest)
    report = evaluate(manifest, params, WordPolicy(args.policy), args.min_duration, args.stride_ms, args.workers)

    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise FileError(out, exc.strerror or exc) from exc
    with _output(out / "report.json") as fh:
        write_report_json(report, fh)
    with _output(out / "segments.csv") as fh:
        write_records_csv(report.records, fh)
    with _output(out / "histogram.csv") as fh:
        write_histogram_csv(export_histogram(report, args.bins), fh)
    with _output(out / "scatter.csv") as fh:
        write_scatter_csv(export_scatter(report), fh)

    c = report.confusion
    band = borderline_report(report, params)
    print(f"# stride_ms={args.stride_ms:g} policy={report.policy.value} min_duration_s={args.min_duration:g} "
          f"rule_polarity={params.rule_polarity.value}")
    print(f"segments={len(report.records)} filtered={len(report.filtered)} errors={len(report.errors)} "
          f"undetermined={len(report.undetermined)}")
    counts = c.as_dict()
    print("confusion " + " ".join(f"{k}={counts[k]}" for k in list(counts)[:4]))
    print(f"accuracy={fmt(c.accuracy)} recall_read={fmt(c.recall(Label.READ))} "
          f"recall_spontaneous={fmt(c.recall(Label.SPONTANEOUS))}")
    print(f"borderline={len(band.records)} borderline_accuracy={fmt(band.accuracy)}")
    return EXIT_OK


def cmd_synth(args) -> int:
    read = GenProfile(args.read_wps, args.read_active_awl, args.read_inactive_aps, args.read_duration, args.stride_ms)
    spont = GenProfile(args.spont_wps, args.spont_active_awl, args.spont_inactive_aps, args.spont_duration,
                       args.stride_ms)
    if args.n_read < 0 or args.n_spont < 0:
        raise ConfigError("counts must be >= 0")
    if not 0 <= args.jitter < 1:
        raise ConfigError("--jitter must lie in [0, 1)")
    try:
        entries, _ = generate_corpus(args.n_read, args.n_spont, read, spont, args.jitter, args.seed,
                                     out_dir=args.out_dir, intra_fraction=args.intra_fraction)
    except OSError as exc:
        raise FileError(args.out_dir, exc.strerror or exc) from exc
    print(f"wrote {len(entries)} streams and manifest.csv to {args.out_dir}")
    return EXIT_OK


def cmd_histogram(args) -> int:
    if args.bins < 1:
        raise ConfigError("--bins must be >= 1")
    try:
        records = load_report_records(args.report)
    except OSError as exc:
        raise FileError(args.report, exc.strerror or exc) from exc
    except (ValueError, KeyError) as exc:
        raise ManifestError(f"{args.report}: not a report file ({exc})") from exc
    with _output(args.output) as fh:
        write_histogram_csv(export_histogram(records, args.bins), fh)
    return EXIT_OK


COMMANDS = {
    "features": cmd_features,
    "classify": cmd_classify,
    "evaluate": cmd_evaluate,
    "synth": cmd_synth,
    "histogram": cmd_histogram,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, InfeasibleProfile) as exc:
        print(f"readspont: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StreamFormatError, ManifestError) as exc:
        print(f"readspont: input error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"readspont: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

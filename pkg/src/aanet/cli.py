"""Command-line front end.

Exit codes: 0 ok, 2 configuration or argument error, 3 data error,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from . import checkpoint
from .config import ExperimentConfig
from .data import Dataset, load_idx, make_synthetic
from .errors import AANetError, ArgumentError, ConfigError, DataFormatError, DegenerateBaselineError, NumericError
from .fewshot import mean_confidence_interval, ncc_classify, sample_episode
from .network import LayerGraph, build_network
from .plotting import bar_chart, line_chart
from .robustness import CorruptionReport, ErrorTable, corruption_report
from .spectral import AliasReport, ConsistencyReport, shift_consistency, subsampling_profile
from .training import corruption_error_table, error_rate, extract_features, fit

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

CHECKPOINT_NAME = "checkpoint.aanet"
HISTORY_NAME = "history.csv"
CONFIG_NAME = "config.json"


# ---------------------------------------------------------------------------
# shared plumbing
# ---------------------------------------------------------------------------


def load_data(cfg: ExperimentConfig) -> tuple[Dataset, Dataset]:
    d = cfg.data
    if d.source == "idx":
        train = load_idx(d.train_images, d.train_labels)
        if d.test_images:
            test = load_idx(d.test_images, d.test_labels)
        else:
            if len(train) <= d.test_size:
                raise DataFormatError(f"{len(train)} examples cannot hold out {d.test_size} for testing")
            train, test = train.split(len(train) - d.test_size)
        if train.images.shape[1:] != cfg.arch.input_shape:
            raise DataFormatError(f"IDX images {train.images.shape[1:]} do not match arch.input_shape")
        if max(train.labels.max(initial=0), test.labels.max(initial=0)) >= cfg.arch.num_classes:
            raise DataFormatError("IDX labels exceed arch.num_classes")
        return train, test
    make = lambda size, seed: make_synthetic(d.source, size, d.num_classes, d.image_size, seed, d.noise)  # noqa: E731
    return make(d.train_size, d.seed), make(d.test_size, d.seed + 1)


def network_for(cfg: ExperimentConfig, checkpoint_path=None) -> LayerGraph:
    """Build the configured network; load weights when a checkpoint is given."""
    net = build_network(cfg.arch, cfg.placement, cfg.train.seed)
    if checkpoint_path:
        try:
            net.load_state_dict(checkpoint.load(checkpoint_path))
        except OSError as exc:
            raise DataFormatError(f"cannot read checkpoint: {exc}") from exc
        except (KeyError, ValueError) as exc:
            if isinstance(exc, AANetError):
                raise
            raise DataFormatError(f"checkpoint does not match the configured network: {exc}") from exc
    return net.eval()


def read_error_table(path) -> ErrorTable:
    text = _read_text(path)
    if text.lstrip().startswith("{"):
        try:
            return ErrorTable.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: {exc}") from exc
    return ErrorTable.from_csv(text)


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc


def _rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


class Run:
    """One invocation: resolved config, output directory and format."""

    def __init__(self, args):
        self.args = args
        cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        self.cfg = cfg
        self.out = Path(args.out) if args.out else None
        self.format = args.format

    def echo(self):
        resolved = {"command": self.args.command, "seed": self.cfg.train.seed, "config": self.cfg.to_dict()}
        print(json.dumps(resolved, sort_keys=True), file=sys.stderr)

    def write(self, name: str, text: str | bytes) -> Path | None:
        if self.out is None:
            return None
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        if isinstance(text, bytes):
            path.write_bytes(text)
        else:
            path.write_text(text)
        return path

    def emit(self, stem: str, obj: dict, rows: list[dict] | None = None):
        """Print a result and save it as ``stem.json`` or ``stem.csv``."""
        if self.format == "csv" and rows:
            text = _rows_to_csv(rows)
            self.write(f"{stem}.csv", text)
        else:
            text = _dump(obj)
            self.write(f"{stem}.json", text)
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_train(run: Run) -> int:
    cfg = run.cfg
    train, _ = load_data(cfg)
    net = build_network(cfg.arch, cfg.placement, cfg.train.seed)
    t = cfg.train
    history = fit(net, train.images, train.labels, epochs=t.epochs, batch_size=t.batch, lr=t.lr,
                  momentum=t.momentum, lr_decay=t.lr_decay, seed=t.seed)
    run.write(CONFIG_NAME, cfg.dumps() + "\n")
    run.write(CHECKPOINT_NAME, checkpoint.dumps(net.state_dict()))
    if history:
        run.write(HISTORY_NAME, _rows_to_csv(history))
    summary = {"epochs": len(history), "final_train_error": history[-1]["train_error"] if history else None,
               "parameters": net.parameter_count()}
    sys.stdout.write(_dump(summary))
    return EXIT_OK


def cmd_eval(run: Run) -> int:
    _, test = load_data(run.cfg)
    net = network_for(run.cfg, run.args.checkpoint)
    err = error_rate(net, test.images, test.labels)
    run.emit("eval", {"accuracy": 1.0 - err, "error": err, "examples": len(test)})
    return EXIT_OK


def cmd_corrupt_eval(run: Run) -> int:
    cfg = run.cfg
    _, test = load_data(cfg)
    net = network_for(cfg, run.args.checkpoint)
    corruptions = cfg.eval.corruption_list if cfg.eval.corruptions else ()
    table = corruption_error_table(net, test.images, test.labels, corruptions, seed=cfg.train.seed)
    if run.format == "csv":
        run.write("error_table.csv", table.to_csv())
    else:
        run.write("error_table.json", _dump(table.to_dict()))
    out = {"error_table": table.to_dict()}
    if run.args.baseline:
        report = corruption_report(table, read_error_table(run.args.baseline))
        run.write("corruption_report.json", _dump(report.to_dict()))
        out["corruption_report"] = report.to_dict()
    sys.stdout.write(_dump(out))
    return EXIT_OK


def cmd_spectrum(run: Run) -> int:
    _, test = load_data(run.cfg)
    net = network_for(run.cfg, run.args.checkpoint)
    profile = subsampling_profile(net, test.images[: run.cfg.eval.consistency_size])
    rows = [{"layer": name, **rep.to_dict()} for name, rep in profile]
    run.emit("spectrum", {"sites": rows}, rows)
    return EXIT_OK


def cmd_consistency(run: Run) -> int:
    _, test = load_data(run.cfg)
    net = network_for(run.cfg, run.args.checkpoint)
    report = shift_consistency(net, test.images[: run.cfg.eval.consistency_size], run.cfg.eval.shift_max)
    run.emit("consistency", report.to_dict(), [report.to_dict()])
    return EXIT_OK


def cmd_episode_eval(run: Run) -> int:
    cfg = run.cfg
    e = cfg.eval
    _, test = load_data(cfg)
    net = network_for(cfg, run.args.checkpoint)
    features = extract_features(net, test.images)
    accs = []
    for i in range(e.episodes):
        ep = sample_episode(features, test.labels, e.way, e.shots, e.queries, seed=cfg.train.seed * 100003 + i)
        pred = ncc_classify(ep.support_x, ep.support_y, ep.query_x)
        accs.append(float(np.mean(pred == ep.query_y)))
    mean, ci = mean_confidence_interval(accs)
    rows = [{"episode": i, "accuracy": a} for i, a in enumerate(accs)]
    run.emit("episodes", {"episodes": e.episodes, "way": e.way, "shots": e.shots, "mean_accuracy": mean,
                          "ci95": ci}, rows)
    return EXIT_OK


def cmd_mce(run: Run) -> int:
    report = corruption_report(read_error_table(run.args.model_table), read_error_table(run.args.baseline_table))
    rows = [{"corruption": c, "ce": v} for c, v in report.ce.items()] + [{"corruption": "mean", "ce": report.mce}]
    run.emit("corruption_report", report.to_dict(), rows)
    return EXIT_OK


def _read_csv(path) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(_read_text(path))))
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    return rows


def _floats(rows, col, path):
    try:
        return [float(r[col]) for r in rows]
    except KeyError:
        raise ArgumentError(f"{path} has no column {col!r}; columns are {list(rows[0])}") from None
    except ValueError as exc:
        raise DataFormatError(f"{path}: column {col!r} is not numeric ({exc})") from exc


def cmd_plot(run: Run) -> int:
    args = run.args
    rows = _read_csv(args.csv)
    ys = args.y.split(",")
    title = args.title or Path(args.csv).stem
    if args.kind == "line":
        xs = _floats(rows, args.x, args.csv)
        svg = line_chart({y: (xs, _floats(rows, y, args.csv)) for y in ys}, title, args.x, ", ".join(ys))
    else:
        if args.x not in rows[0]:
            raise ArgumentError(f"{args.csv} has no column {args.x!r}")
        vals = _floats(rows, ys[0], args.csv)
        groups: dict[str, list[float]] = {}
        for r, v in zip(rows, vals):
            groups.setdefault(r[args.x], []).append(v)
        svg = bar_chart(list(groups), [float(np.mean(v)) for v in groups.values()], title, args.x, ys[0])
    path = run.write(args.name or f"{Path(args.csv).stem}.svg", svg)
    sys.stdout.write(_dump({"svg": str(path) if path else None, "points": len(rows)}))
    return EXIT_OK


def identify(path) -> str:
    """Name the artifact type of ``path`` after validating its contents."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    if raw.startswith(checkpoint.MAGIC):
        checkpoint.loads(raw)
        return "checkpoint"
    text = raw.decode("utf-8", errors="replace")
    if text.lstrip().startswith("<svg"):
        try:
            ET.fromstring(text)
        except ET.ParseError as exc:
            raise DataFormatError(f"{path}: malformed SVG ({exc})") from exc
        return "svg"
    if text.lstrip().startswith("{"):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: {exc}") from exc
        for kind, parse in (
            ("config", ExperimentConfig.from_dict),
            ("error_table", ErrorTable.from_dict),
            ("corruption_report", CorruptionReport.from_dict),
        ):
            if kind == "config" and not set(d) <= {"arch", "placement", "train", "data", "eval"}:
                continue
            try:
                parse(d)
                return kind
            except (AANetError, TypeError, KeyError):
                continue
        if set(d) == {f for f in ConsistencyReport.__dataclass_fields__}:
            ConsistencyReport(**d)
            return "consistency_report"
        if "sites" in d:
            for site in d["sites"]:
                AliasReport(**{k: v for k, v in site.items() if k != "layer"})
            return "spectrum"
        return "json_report"
    if text.startswith("corruption,severity,error"):
        ErrorTable.from_csv(text)
        return "error_table"
    _read_csv(path)
    return "csv"


def cmd_inspect(run: Run) -> int:
    kinds = {str(p): identify(p) for p in run.args.paths}
    sys.stdout.write(_dump(kinds))
    return EXIT_OK


COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "corrupt-eval": cmd_corrupt_eval,
    "spectrum": cmd_spectrum,
    "consistency": cmd_consistency,
    "episode-eval": cmd_episode_eval,
    "mce": cmd_mce,
    "plot": cmd_plot,
    "inspect": cmd_inspect,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config JSON (defaults apply when omitted)")
    common.add_argument("--seed", type=int, help="overrides train.seed")
    common.add_argument("--out", help="directory for artifacts")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="aanet", description="Anti-aliased CNN experiments at desk scale.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("train", parents=[common], help="train and write checkpoint + per-epoch CSV")
    for name, text in (
        ("eval", "clean accuracy on the test split"),
        ("corrupt-eval", "error table over corruptions and severities"),
        ("spectrum", "aliased energy at every subsampling site"),
        ("consistency", "prediction agreement under circular shifts"),
        ("episode-eval", "few-shot nearest-centroid accuracy"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--checkpoint", help="trained weights; omitted means the seeded initialisation")
        if name == "corrupt-eval":
            p.add_argument("--baseline", help="reference ErrorTable (JSON or CSV) for a CE/mCE report")
    p = sub.add_parser("mce", parents=[common], help="CE/mCE from two ErrorTable files")
    p.add_argument("model_table")
    p.add_argument("baseline_table")
    p = sub.add_parser("plot", parents=[common], help="SVG chart from a CSV artifact")
    p.add_argument("csv")
    p.add_argument("--x", default="epoch")
    p.add_argument("--y", default="loss", help="comma-separated columns (bar charts use the first)")
    p.add_argument("--kind", choices=("line", "bar"), default="line")
    p.add_argument("--title")
    p.add_argument("--name", help="output file name inside --out")
    p = sub.add_parser("inspect", parents=[common], help="identify and validate artifact files")
    p.add_argument("paths", nargs="+")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = Run(args)
        run.echo()
        return COMMANDS[args.command](run)
    except (ConfigError, ArgumentError) as exc:
        code, msg = EXIT_CONFIG, exc
    except (DataFormatError, DegenerateBaselineError) as exc:
        code, msg = EXIT_DATA, exc
    except NumericError as exc:
        code, msg = EXIT_NUMERIC, exc
    except AANetError as exc:
        code, msg = EXIT_DATA, exc
    print(f"aanet {args.command}: error: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""``amids`` command line: preprocess, train, evaluate, sweep, compare, monitor.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import io
import json
import os
import sys

import numpy as np

from . import dataset, experiments, mlp
from .config import _ints, _names, _shapes, apply_overrides, load_config
from .dataset import EncodingTable
from .errors import AmidsError, ConfigError
from .fileio import atomic_write_text
from .serialize import load_model, save_model
from .stream import SensorRole, StreamClassifier

ACTIVATIONS = [a.value for a in mlp.Activation]


def _err(msg):
    print(f"amids: {msg}", file=sys.stderr)


def _out_path(cfg, name):
    return os.path.join(cfg.output_dir, name)


def load_encoding(path) -> EncodingTable:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        return EncodingTable.from_dict(doc["encoding"])
    except (KeyError, TypeError, AttributeError):
        raise ConfigError(f"{path}: no encoding table") from None


def load_data(paths, encoding_path=None):
    """Concatenate raw NSL-KDD files and/or encoded CSVs into ``(X, y, table, raw)``."""
    if not paths:
        raise ConfigError("no input data (give --data or [data] train)")
    for p in paths:
        if not os.path.exists(p):
            raise ConfigError(f"no such file: {p}")
    raw, parts = [], []
    for p in paths:
        if dataset.is_encoded_csv(p):
            parts.append(("encoded", p))
        else:
            recs = dataset.read_nslkdd(p)
            raw.extend(recs)
            parts.append(("raw", recs))
    table = None
    if encoding_path:
        table = load_encoding(encoding_path)
    else:
        for kind, p in parts:
            sibling = os.path.join(os.path.dirname(os.path.abspath(p)), "encoding.json") if kind == "encoded" else None
            if sibling and os.path.exists(sibling):
                table = load_encoding(sibling)
                break
    if table is None:
        if any(kind == "encoded" for kind, _ in parts):
            raise ConfigError("encoded CSV input needs --encoding (or encoding.json beside it)")
        table = dataset.build_encoding(raw)
    Xs, ys = [], []
    for kind, item in parts:
        X, y = dataset.read_encoded_csv(item) if kind == "encoded" else dataset.encode_records(item, table)
        Xs.append(X)
        ys.append(y)
    return np.vstack(Xs), np.concatenate(ys), table, raw


def _feature_stats(X):
    return {
        name: {"mean": float(X[:, i].mean()), "std": float(X[:, i].std()),
               "min": float(X[:, i].min()), "max": float(X[:, i].max())}
        for i, name in enumerate(dataset.FEATURE_NAMES)
    }


def cmd_preprocess(cfg, args):
    paths = cfg.train
    X, y, table, raw = load_data(paths, cfg.encoding)
    params = dataset.fit_standardization(X)
    buf = io.StringIO()
    dataset.write_encoded_csv(buf, X, y)
    atomic_write_text(_out_path(cfg, "encoded.csv"), buf.getvalue())
    counts = dataset.category_counts(raw) if raw else None
    report = {
        "inputs": list(paths),
        "records": int(y.shape[0]),
        "normal": int((y == 0).sum()),
        "attack": int((y == 1).sum()),
        "categories": counts,
        "services": len(table.service_map),
        "encoding": table.to_dict(),
        "standardization": params.to_dict(),
        "feature_stats": _feature_stats(X),
    }
    atomic_write_text(_out_path(cfg, "encoding.json"), json.dumps(report, indent=1) + "\n")
    print(f"records: {report['records']}")
    print(f"normal: {report['normal']}")
    print(f"attack: {report['attack']}")
    if counts:
        for cat in dataset.CATEGORY_ORDER:
            print(f"  {cat}: {counts[cat]}")
    print(f"distinct services: {report['services']} (codes {dataset.SERVICE_BASE}..{dataset.SERVICE_BASE + report['services'] - 1})")
    print(f"wrote {_out_path(cfg, 'encoded.csv')} and {_out_path(cfg, 'encoding.json')}")
    return 0


def cmd_train(cfg, args):
    tc = cfg.train_config()
    X, y, table, _ = load_data(cfg.train, cfg.encoding)
    params = dataset.fit_standardization(X)
    model, traces = mlp.train(dataset.standardize(X, params), y, tc)
    model_path = args.model_out or _out_path(cfg, "model.json")
    trace_path = args.trace_out or _out_path(cfg, "train_trace.csv")
    save_model(model_path, model, table, params)
    rows = ["epoch,loss,accuracy"] + [f"{t.epoch},{t.loss:.6f},{t.accuracy:.6f}" for t in traces]
    atomic_write_text(trace_path, "\n".join(rows) + "\n")
    last = traces[-1]
    print(f"final training accuracy: {last.accuracy:.6f}")
    print(f"final training loss: {last.loss:.6f}")
    print(f"wrote {model_path} and {trace_path}")
    return 0


def cmd_evaluate(cfg, args):
    out = args.out or _out_path(cfg, "evaluation.csv")
    if args.model:
        if not os.path.exists(args.model):
            raise ConfigError(f"no such file: {args.model}")
        bundle = load_model(args.model)
        paths = cfg.test or cfg.train
        if not paths:
            raise ConfigError("no evaluation data (give --data or [data] test)")
        for p in paths:
            if not os.path.exists(p):
                raise ConfigError(f"no such file: {p}")
        records = [r for p in paths for r in dataset.read_nslkdd(p)]
        kept, skipped = [], 0
        for r in records:
            try:
                bundle.prepare([r])
                kept.append(r)
            except AmidsError:
                skipped += 1
        X, y = bundle.prepare(kept)
        cls, conf = bundle.predict_batch(X)
        report = experiments.evaluate(cls, y, conf if bundle.probabilistic else None)
        result = experiments.CVResult(None, [report])
        text = experiments.fold_table_text(result)
        if skipped:
            print(f"skipped {skipped} records with symbols unknown to the model", file=sys.stderr)
    else:
        X, y, _, _ = load_data(cfg.train, cfg.encoding)
        result = experiments.cross_validate(
            experiments.MLPAlgorithm(cfg.train_config()), X, y, cfg.folds, cfg.seed)
        text = experiments.fold_table_text(result)
    atomic_write_text(out, text)
    print(f"accuracy: {result.mean('accuracy'):.6f}")
    if result.mean("loss") is not None:
        print(f"loss: {result.mean('loss'):.6f}")
    print(f"wrote {out}")
    return 0


def _baseline_algorithms(cfg):
    mlp_cfg = cfg.train_config(hidden_layers=cfg.compare_hidden_layers, epochs=cfg.compare_epochs)
    return [
        experiments.MLPAlgorithm(mlp_cfg),
        experiments.ForestAlgorithm(cfg.trees),
        experiments.SVMAlgorithm(cfg.svm_c, cfg.svm_gamma, cfg.svm_tolerance, cfg.svm_max_passes, cfg.svm_max_train),
        experiments.NaiveBayesAlgorithm(cfg.nb_smoothing),
    ]


def _flusher(path, timing_path):
    def flush(result):
        experiments.emit_csv(result, path, timing_path)
    return flush


def cmd_sweep(cfg, args):
    param = args.param
    X, y, _, _ = load_data(cfg.train, cfg.encoding)
    if param == "architecture":
        activations = ("sigmoid",)
    else:
        activations = cfg.sweep_activations
    written = []
    for act in activations:
        tc = cfg.train_config(activation=act)
        stem = f"sweep_{param}_{act}"
        path = args.out if (args.out and len(activations) == 1) else _out_path(cfg, stem + ".csv")
        timing = os.path.splitext(path)[0] + "_timing.csv"
        flush = _flusher(path, timing)
        if param == "packets":
            res = experiments.sweep_packets(X, y, cfg.sweep_packets, experiments.MLPAlgorithm(tc), cfg.folds, cfg.seed, flush)
        elif param == "epochs":
            res = experiments.sweep_epochs(X, y, cfg.sweep_epochs, tc, cfg.folds, cfg.seed, flush)
        else:
            res = experiments.sweep_architecture(X, y, cfg.sweep_architecture, tc, cfg.folds, cfg.seed, flush)
        flush(res)
        written.append(path)
        for row in res.rows:
            print(f"{act} {param}={row.value}: accuracy {row.result.accuracy:.6f}"
                  + (f", loss {row.result.loss:.6f}" if row.result.loss is not None else ""))
    print("wrote " + ", ".join(written))
    return 0


def cmd_compare(cfg, args):
    X, y, _, _ = load_data(cfg.train, cfg.encoding)
    if cfg.compare_packets is not None:
        idx = dataset.subsample_indices(y, cfg.compare_packets, cfg.seed)
        X, y = X[idx], y[idx]
    path = args.out or _out_path(cfg, "compare.csv")
    timing = os.path.splitext(path)[0] + "_timing.csv"
    flush = _flusher(path, timing)
    res = experiments.compare_algorithms(X, y, cfg.seed, _baseline_algorithms(cfg), cfg.folds, flush)
    flush(res)
    for row in res.rows:
        ref = row.reference_accuracy
        print(f"{row.algorithm}: accuracy {row.result.accuracy:.6f}" + (f" (reference {ref:.3f})" if ref is not None else ""))
    print(f"wrote {path}")
    return 0


def cmd_monitor(cfg, args):
    if not os.path.exists(args.model):
        raise ConfigError(f"no such file: {args.model}")
    try:
        bundle = load_model(args.model)
    except AmidsError as exc:
        raise ConfigError(f"cannot load model {args.model}: {exc}") from None
    clf = StreamClassifier(bundle, SensorRole.parse(cfg.role), cfg.threshold)
    if args.input in (None, "-"):
        source = sys.stdin
        close = False
    else:
        if not os.path.exists(args.input):
            raise ConfigError(f"no such file: {args.input}")
        source = open(args.input, "r", encoding="utf-8")
        close = True
    try:
        if args.alerts_out:
            lines = [a.to_line() for a in clf.run(source)]
            atomic_write_text(args.alerts_out, "".join(line + "\n" for line in lines))
        else:
            for alert in clf.run(source):
                print(alert.to_line(), flush=True)
    finally:
        if close:
            source.close()
    summary = json.dumps(clf.summary.to_dict(), indent=1)
    print(summary, file=sys.stderr)
    if args.summary_out:
        atomic_write_text(args.summary_out, summary + "\n")
    return 0


def _csv_ints(text):
    try:
        return _ints(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="INI", help="run configuration file (flags override its values)")
    common.add_argument("--seed", type=int, help="top-level random seed (default 42)")
    common.add_argument("--output-dir", help="directory for all outputs (default ./out)")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--data", action="append", metavar="PATH",
                      help="NSL-KDD text file or encoded CSV; repeat to pool several files")
    data.add_argument("--encoding", metavar="JSON", help="encoding.json from `preprocess` (needed for encoded CSV input)")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--hidden-layers", type=_csv_ints, metavar="N,N,...", help="hidden layer widths (default 300,300)")
    model.add_argument("--activation", choices=ACTIVATIONS, help="hidden-layer activation (default sigmoid)")
    model.add_argument("--epochs", type=int, help="training epochs (default 3)")
    model.add_argument("--batch-size", type=int, help="mini-batch size (default 128)")
    model.add_argument("--learning-rate", type=float, help="Adam step size (default 0.001)")
    model.add_argument("--folds", type=int, help="cross-validation folds (default 10)")

    parser = argparse.ArgumentParser(prog="amids", description="Deep-learning intrusion detection on NSL-KDD records.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", parents=[common, data], help="encode raw NSL-KDD files and report statistics")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train", parents=[common, data, model], help="train the classifier and write a model document")
    p.add_argument("--model-out", metavar="PATH", help="model document path (default OUTPUT_DIR/model.json)")
    p.add_argument("--trace-out", metavar="PATH", help="per-epoch trace CSV (default OUTPUT_DIR/train_trace.csv)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", parents=[common, data, model],
                       help="score a saved model on held-out data, or cross-validate the configured model")
    p.add_argument("--model", metavar="PATH", help="model document to score; omit to cross-validate instead")
    p.add_argument("--out", metavar="PATH", help="report CSV (default OUTPUT_DIR/evaluation.csv)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", parents=[common, data, model], help="cross-validated sweep over one parameter")
    p.add_argument("--param", required=True, choices=["packets", "epochs", "architecture"], help="parameter to sweep")
    p.add_argument("--grid", metavar="LIST",
                   help="grid values: sample sizes or epoch counts (1,2,3) or shapes LAYERSxNODES (2x5,2x300)")
    p.add_argument("--activations", metavar="LIST",
                   help="comma-separated activations to sweep, one CSV each (ignored for architecture)")
    p.add_argument("--out", metavar="PATH", help="CSV path when a single activation is swept")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", parents=[common, data, model],
                       help="cross-validate the MLP, random forest, SVM and naive Bayes on shared folds")
    p.add_argument("--trees", type=int, help="random forest size (default 100)")
    p.add_argument("--mlp-hidden-layers", type=_csv_ints, metavar="N,N,...", help="MLP shape for the comparison (default 5,5)")
    p.add_argument("--mlp-epochs", type=int, help="MLP epochs for the comparison (default 100)")
    p.add_argument("--packets", type=int, metavar="N", help="compare on a stratified sample of N records (default all)")
    p.add_argument("--svm-c", type=float, help="SVM box constraint (default 1.0)")
    p.add_argument("--svm-gamma", type=float, help="RBF width (default 1/feature count)")
    p.add_argument("--svm-max-train", type=int, help="cap on SVM training points per fold (default 5000)")
    p.add_argument("--out", metavar="PATH", help="comparison CSV (default OUTPUT_DIR/compare.csv)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("monitor", parents=[common], help="classify a record stream and emit alerts")
    p.add_argument("--model", required=True, metavar="PATH", help="model document with its encoding and standardization")
    p.add_argument("--input", default="-", metavar="PATH", help="NSL-KDD lines to read, '-' for standard input (default)")
    p.add_argument("--role", choices=[r.value for r in SensorRole], help="sensor role stamped on alerts (default network)")
    p.add_argument("--threshold", type=float, help="minimum attack confidence that raises an alert, in [0.5, 1] (default 0.5)")
    p.add_argument("--alerts-out", metavar="PATH", help="alert log file (default standard output)")
    p.add_argument("--summary-out", metavar="PATH", help="also write the JSON summary here (always printed to stderr)")
    p.set_defaults(func=cmd_monitor)
    return parser


def _resolve(args):
    cfg = load_config(args.config)
    ov = {
        "seed": args.seed,
        "output_dir": args.output_dir,
        "train": tuple(args.data) if getattr(args, "data", None) else None,
        "encoding": getattr(args, "encoding", None),
        "hidden_layers": getattr(args, "hidden_layers", None),
        "activation": getattr(args, "activation", None),
        "epochs": getattr(args, "epochs", None),
        "batch_size": getattr(args, "batch_size", None),
        "learning_rate": getattr(args, "learning_rate", None),
        "folds": getattr(args, "folds", None),
        "trees": getattr(args, "trees", None),
        "compare_hidden_layers": getattr(args, "mlp_hidden_layers", None),
        "compare_epochs": getattr(args, "mlp_epochs", None),
        "compare_packets": getattr(args, "packets", None),
        "svm_c": getattr(args, "svm_c", None),
        "svm_gamma": getattr(args, "svm_gamma", None),
        "svm_max_train": getattr(args, "svm_max_train", None),
        "role": getattr(args, "role", None),
        "threshold": getattr(args, "threshold", None),
    }
    if args.command == "evaluate" and getattr(args, "model", None) and getattr(args, "data", None):
        # --data names the held-out set when scoring a saved model
        ov["test"] = tuple(args.data)
        ov["train"] = None
    grid = getattr(args, "grid", None)
    if grid is not None:
        param = args.param
        ov["sweep_" + param] = _shapes(grid) if param == "architecture" else _ints(grid)
    if getattr(args, "activations", None):
        ov["sweep_activations"] = _names(args.activations)
    return apply_overrides(cfg, ov).validate()


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
        return args.func(cfg, args)
    except ConfigError as exc:
        _err(str(exc))
        return 2
    except (AmidsError, OSError) as exc:
        _err(str(exc))
        return 1
    except KeyboardInterrupt:
        _err("interrupted; completed sweep rows were already written")
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line surface: validate, train, cv, compare, predict.

Exit codes: 0 success, 2 input error, 3 runtime/training error.
Defaults can come from a flat `key = value` config file (--config); any
flag given on the command line overrides the file. The CARDIOSEQ_OUT
environment variable sets the default output directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import baselines as bl
from . import data as dp
from . import evaluation as ev
from . import model_io
from . import network as nn
from . import training as tr
from .errors import CardioseqError

EXIT_INPUT_ERROR = 2
EXIT_RUNTIME_ERROR = 3


@dataclass
class RunConfig:
    data: str = None
    dialect: str = "statlog"
    model: str = "cnn"
    epochs: int = 50
    lr: float = 0.001
    dropout: float = 0.5
    batch: int = 16
    kernels: int = 8
    pool: str = "global"
    k: int = 10
    seed: int = 0
    out: str = None


_CONFIG_TYPES = {f.name: f.type for f in fields(RunConfig)}


def load_config_file(path):
    values = {}
    with open(path, encoding="ascii") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_TYPES:
                raise ValueError(f"{path}:{line_no}: unknown key {key!r}")
            values[key] = value
    return values


def build_config(args):
    cfg = RunConfig()
    explicit = set()
    file_values = load_config_file(args.config) if getattr(args, "config", None) else {}
    casts = {"int": int, "float": float, "str": str}
    for key, raw in file_values.items():
        setattr(cfg, key, casts.get(_CONFIG_TYPES[key], str)(raw))
        explicit.add(key)
    for key in _CONFIG_TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            setattr(cfg, key, flag)
            explicit.add(key)
    if cfg.out is None:
        cfg.out = os.environ.get("CARDIOSEQ_OUT", ".")
    cfg.explicit = explicit
    return cfg


def hyper_from_config(cfg):
    return tr.Hyperparams(
        learning_rate=cfg.lr,
        dropout_rate=cfg.dropout,
        epochs=cfg.epochs,
        batch_size=cfg.batch,
        kernels_per_width=cfg.kernels,
        pool_mode=nn.parse_pool_mode(cfg.pool),
        seed=cfg.seed,
    )


def cmd_validate(cfg):
    dataset = dp.parse_dataset(cfg.data, cfg.dialect)
    raw = dataset.feature_array()
    labels = dataset.labels
    print(f"{len(dataset)} records")
    print(f"class balance: {int(np.sum(labels == 0))} absence, "
          f"{int(np.sum(labels == 1))} presence")
    missing = np.isnan(raw).sum(axis=0)
    if missing.any():
        print("missing values per column:")
        for name, count in zip(dataset.feature_names, missing):
            if count:
                print(f"  {name}: {int(count)}")
    else:
        print("no missing values")
    return 0


def cmd_train(cfg):
    dataset = dp.parse_dataset(cfg.data, cfg.dialect)
    model = tr.train(dataset, hyper_from_config(cfg))
    os.makedirs(cfg.out, exist_ok=True)
    model_path = os.path.join(cfg.out, "model.txt")
    curve_path = os.path.join(cfg.out, "curve.csv")
    model_io.save_model(model_path, model)
    lines = ["epoch,train_acc,train_loss,val_acc,val_loss"]
    for i in range(len(model.curve)):
        lines.append(
            f"{i + 1},{model.curve.train_accuracy[i]:.17g},"
            f"{model.curve.train_loss[i]:.17g},,"
        )
    model_io.atomic_write(curve_path, "\n".join(lines) + "\n")
    if len(model.curve):
        print(f"final train accuracy: {model.curve.train_accuracy[-1]:.6f}")
        print(f"final train loss: {model.curve.train_loss[-1]:.6f}")
    else:
        print("0 epochs: wrote initialized model")
    print(f"wrote {model_path} and {curve_path}")
    return 0


def cmd_cv(cfg):
    dataset = dp.parse_dataset(cfg.data, cfg.dialect)
    report = ev.cross_validate(
        dataset, cfg.model, hyper=hyper_from_config(cfg), k=cfg.k, seed=cfg.seed
    )
    os.makedirs(cfg.out, exist_ok=True)
    txt_path = os.path.join(cfg.out, f"cv_{cfg.model}.txt")
    csv_path = os.path.join(cfg.out, f"cv_{cfg.model}.csv")
    model_io.atomic_write(txt_path, ev.report_to_text(report))
    model_io.atomic_write(csv_path, ev.report_to_csv(report))
    print(f"mean accuracy: {report.mean_accuracy:.6f}")
    print(f"wrote {txt_path} and {csv_path}")
    return 0


def cmd_compare(cfg):
    paths = cfg.data.split(",")
    dialects = cfg.dialect.split(",")
    if len(dialects) == 1:
        dialects *= len(paths)
    if len(dialects) != len(paths):
        raise ValueError("--dialect must match --data (one value or one per path)")
    datasets = {}
    for path, dialect in zip(paths, dialects):
        name = dialect if dialect not in datasets else os.path.basename(path)
        datasets[name] = dp.parse_dataset(path, dialect)
    kinds = cfg.model.split(",") if "model" in cfg.explicit else list(ev.MODEL_KINDS)
    table = ev.compare_models(
        datasets, model_kinds=kinds, hyper=hyper_from_config(cfg), k=cfg.k, seed=cfg.seed
    )
    os.makedirs(cfg.out, exist_ok=True)
    txt_path = os.path.join(cfg.out, "comparison.txt")
    csv_path = os.path.join(cfg.out, "comparison.csv")
    model_io.atomic_write(txt_path, ev.table_to_text(table))
    model_io.atomic_write(csv_path, ev.table_to_csv(table))
    print(ev.table_to_text(table), end="")
    print(f"wrote {txt_path} and {csv_path}")
    return EXIT_RUNTIME_ERROR if table.failures else 0


def parse_record(text):
    tokens = [t.strip() for t in text.split(",")]
    if len(tokens) != dp.N_FEATURES:
        raise ValueError(f"expected {dp.N_FEATURES} comma-separated values")
    features = tuple(None if t == "?" else float(t) for t in tokens)
    return dp.SampleRecord(features, 0)


def cmd_predict(args):
    model = model_io.load_model(args.model_file)
    record = parse_record(args.record)
    if isinstance(model, tr.TrainedModel):
        cls, probs = tr.predict(model, record)
    else:
        cls, score = bl.baseline_predict(model, record)
        if np.isscalar(score) or np.ndim(score) == 0:
            probs = np.array([1.0 - float(score), float(score)])
        else:
            probs = nn.softmax(np.asarray(score, dtype=float))
    print(f"class {cls}, p = {probs[0]:.6f} {probs[1]:.6f}")
    return 0


def _add_common(parser, need_data=True):
    parser.add_argument("--data", required=False, help="dataset path")
    parser.add_argument("--dialect", choices=None, default=None,
                        help="statlog or cleveland (comma list for compare)")
    parser.add_argument("--model", default=None,
                        help="cnn, dv_logistic or pso_elm (comma list for compare)")
    parser.add_argument("--epochs", type=int, default=None)
    parser.add_argument("--lr", type=float, default=None)
    parser.add_argument("--dropout", type=float, default=None)
    parser.add_argument("--batch", type=int, default=None)
    parser.add_argument("--kernels", type=int, default=None)
    parser.add_argument("--pool", default=None, help="global or windowed:SIZE:STRIDE")
    parser.add_argument("--k", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--config", default=None, help="key = value config file")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="cardioseq",
        description="1D-CNN cardiovascular-risk classifier with baselines",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "train", "cv", "compare"):
        _add_common(sub.add_parser(name))
    pred = sub.add_parser("predict")
    pred.add_argument("model_file", help="path to a saved model file")
    pred.add_argument("record", help="13 comma-separated values, ? = missing")

    args = parser.parse_args(argv)
    try:
        if args.command == "predict":
            return cmd_predict(args)
        cfg = build_config(args)
        if cfg.data is None:
            print("error: --data is required", file=sys.stderr)
            return EXIT_INPUT_ERROR
        if args.command == "validate":
            return cmd_validate(cfg)
        if args.command == "train":
            return cmd_train(cfg)
        if args.command == "cv":
            return cmd_cv(cfg)
        if args.command == "compare":
            return cmd_compare(cfg)
    except (OSError, ValueError, CardioseqError) as exc:
        from .errors import EmptyDatasetError, MalformedRowError

        input_error = isinstance(
            exc, (OSError, ValueError, MalformedRowError, EmptyDatasetError)
        )
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR if input_error else EXIT_RUNTIME_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())

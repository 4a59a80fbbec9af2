"""Command line: ``mtvaug {augment,train,sweep,report,gen-synthetic}``.

Exit codes are 0 on success, 1 on runtime errors (bad files, missing
lexicon, ...) and 2 on usage errors. Errors go to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import __version__
from .augment import AugmentationConfig, Operator, augment
from .classifier import LossKind, MixWeights, TrainConfig, evaluate, train_mtv
from .errors import MtvError
from .experiment import (BASELINE_NAME, DEFAULT_ALPHAS, DEFAULT_GAMMAS, DESK_DIM, DESK_TRAIN,
                         RUNS_HEADER, RunResult, RunSpec, _csv_text, emit_report, load_dataset,
                         read_pairs, read_runs, report_from_runs, run_rows, sweep, sweep_specs)
from .rng import RandomStream
from .synthetic import SyntheticConfig, generate
from .textcore import detokenize, load_lexicon, tokenize
from .validation import check_lexicon

OPERATOR_CHOICES = [op.value for op in Operator]


class UsageError(Exception):
    """Bad flag or config value; reported with exit code 2."""


def _unit_interval(text) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{value} is outside [0, 1]")
    return value


def _positive_int(text) -> int:
    try:
        value = int(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} is not positive")
    return value


def _positive_float(text) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"{value} is not positive")
    return value


def _non_negative_float(text) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{value} is negative")
    return value


def _list_of(convert):
    def parse(text):
        items = text if isinstance(text, list) else str(text).split(",")
        try:
            return [convert(str(item).strip()) for item in items if str(item).strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def _operator(text) -> Operator:
    try:
        return Operator(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown operator {text!r} (choose from {', '.join(OPERATOR_CHOICES)})") from None


def _seed(text) -> int:
    value = int(text)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seeds are unsigned 64-bit integers")
    return value


def _add_training_flags(p, defaults: bool = True):
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--loss", choices=[k.value for k in LossKind], default=d(DESK_TRAIN.loss.value))
    p.add_argument("--epochs", type=_positive_int, default=d(DESK_TRAIN.epochs))
    p.add_argument("--batch-size", type=_positive_int, default=d(DESK_TRAIN.batch_size))
    p.add_argument("--lr", type=_positive_float, default=d(DESK_TRAIN.learning_rate),
                   help="SGD learning rate")
    p.add_argument("--l2", type=_non_negative_float, default=d(DESK_TRAIN.l2_lambda),
                   help="L2 penalty on the weights")
    p.add_argument("--dim", type=_positive_int, default=d(DESK_DIM),
                   help="number of hashed feature buckets")


def _train_config(opts, seed: int = 0) -> TrainConfig:
    return TrainConfig(opts["loss"], opts["epochs"], opts["batch_size"], opts["lr"], opts["l2"], seed)


def _lexicon(path):
    return load_lexicon(path) if path else None


# ------------------------------------------------------------------ augment

def cmd_augment(args) -> int:
    op = args.operator
    lexicon = _lexicon(args.lexicon)
    check_lexicon(op, lexicon)
    cfg = AugmentationConfig(op, args.alpha)
    rng = RandomStream(args.seed)
    lines = []
    for label, text in read_pairs(args.input):
        seq = tokenize(text)
        for _ in range(args.copies):
            lines.append(f"{label}\t{detokenize(augment(seq, cfg, lexicon or {}, rng))}\n")
    _write_text(args.output, "".join(lines))
    return 0


# -------------------------------------------------------------------- train

def cmd_train(args) -> int:
    opts = vars(args)
    train = load_dataset(args.train)
    test = load_dataset(args.test, train.label_names)
    lexicon = _lexicon(args.lexicon)
    op = args.operator
    check_lexicon(op, lexicon)
    aug = None if op is None else AugmentationConfig(op, args.alpha)
    weights = MixWeights.vanilla() if op is None else MixWeights(args.gamma_o)
    model = train_mtv(train, _train_config(opts, args.seed), aug, lexicon, weights, args.dim)
    accuracy = evaluate(model, test)
    if args.model_out:
        model.save(args.model_out)
    print(f"accuracy {accuracy:.4f}")
    return 0


# -------------------------------------------------------------------- sweep

SWEEP_DEFAULTS = {
    "alphas": list(DEFAULT_ALPHAS),
    "gammas": list(DEFAULT_GAMMAS),
    "operators": list(Operator),
    "seeds": [0, 1, 2, 3, 4],
    "loss": DESK_TRAIN.loss.value,
    "epochs": DESK_TRAIN.epochs,
    "batch_size": DESK_TRAIN.batch_size,
    "lr": DESK_TRAIN.learning_rate,
    "l2": DESK_TRAIN.l2_lambda,
    "dim": DESK_DIM,
    "jobs": 1,
    "lexicon": None,
}

SWEEP_CONVERTERS = {
    "alphas": _list_of(_unit_interval),
    "gammas": _list_of(_unit_interval),
    "operators": _list_of(_operator),
    "seeds": _list_of(_seed),
    "loss": lambda v: LossKind(v).value,
    "epochs": _positive_int,
    "batch_size": _positive_int,
    "lr": _positive_float,
    "l2": _non_negative_float,
    "dim": _positive_int,
    "jobs": _positive_int,
    "lexicon": str,
    "train": str,
    "test": str,
    "out": str,
}


def _sweep_options(args) -> dict:
    """Flags override the JSON config, which overrides the defaults."""
    opts = dict(SWEEP_DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config}: invalid JSON: {exc}") from None
        if not isinstance(config, dict):
            raise UsageError(f"{args.config}: expected a JSON object")
        for key, value in config.items():
            name = key.replace("-", "_")
            if name not in SWEEP_CONVERTERS:
                raise UsageError(f"{args.config}: unknown option {key!r}")
            try:
                opts[name] = SWEEP_CONVERTERS[name](value)
            except (argparse.ArgumentTypeError, ValueError, TypeError) as exc:
                raise UsageError(f"{args.config}: {key}: {exc}") from None
    flags = {k: v for k, v in vars(args).items() if k not in ("func", "config", "fresh")}
    opts.update(flags)
    for name in ("train", "test", "out"):
        if not opts.get(name):
            raise UsageError(f"--{name} is required (as a flag or in --config)")
    return opts


def _fingerprint(opts) -> dict:
    keys = ("alphas", "gammas", "operators", "seeds", "loss", "epochs", "batch_size", "lr",
            "l2", "dim", "train", "test", "lexicon")
    return {k: ([str(v) for v in opts[k]] if isinstance(opts[k], list) else opts[k]) for k in keys}


def cmd_sweep(args) -> int:
    opts = _sweep_options(args)
    train = load_dataset(opts["train"])
    test = load_dataset(opts["test"], train.label_names)
    lexicon = _lexicon(opts["lexicon"])
    base = RunSpec(None, 0.0, 1.0, tuple(opts["seeds"]), _train_config(opts), opts["dim"])
    specs = sweep_specs(base, opts["alphas"], opts["gammas"], opts["operators"])
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    runs_path, state_path = out / "runs.csv", out / "sweep.json"

    fingerprint = _fingerprint(opts)
    completed: dict = {}
    if runs_path.exists() and state_path.exists() and not args.fresh:
        previous = json.loads(state_path.read_text(encoding="utf-8"))
        if previous != fingerprint:
            raise MtvError(f"{out} holds results of a different sweep; pass --fresh to overwrite")
        partial = read_runs(runs_path, allow_partial=True)
        completed = {k: r for k, r in partial.items() if r.seeds == base.seeds}
    state_path.write_text(json.dumps(fingerprint, indent=2) + "\n", encoding="utf-8")

    total = len(specs) + 1
    count = 0
    baseline_key = (None, 0.0, 1.0)
    if baseline_key not in completed:
        completed = {}
    # keep only whole cells from an interrupted run, then append as cells finish
    kept = [completed[baseline_key]] if completed else []
    kept += [completed[s.key] for s in specs if s.key in completed]
    rows = [row for r in kept for row in run_rows(r, kept[0])]
    with open(runs_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_csv_text(RUNS_HEADER, rows))

    def on_cell(result: RunResult, baseline: RunResult):
        nonlocal count
        count += 1
        name = result.operator.value if result.operator is not None else BASELINE_NAME
        print(f"cell {count}/{total} operator={name} alpha={result.alpha} "
              f"gamma_o={result.gamma_o} mean_acc={result.mean_accuracy:.4f}", flush=True)
        if result.key not in completed:
            with open(runs_path, "a", encoding="utf-8", newline="\n") as fh:
                text = _csv_text(RUNS_HEADER, run_rows(result, baseline))
                fh.write(text.split("\n", 1)[1])
                fh.flush()

    result = sweep(base, opts["alphas"], opts["gammas"], opts["operators"], train, test,
                   lexicon, jobs=opts["jobs"], completed=completed, on_cell=on_cell)
    emit_report(result, out)
    print(f"wrote {out}")
    return 0


# ------------------------------------------------------------------- report

def cmd_report(args) -> int:
    report_from_runs(args.runs, args.out)
    print(f"wrote {args.out}")
    return 0


# ------------------------------------------------------------ gen-synthetic

def cmd_gen_synthetic(args) -> int:
    values = {f.name: getattr(args, f.name) for f in dataclasses.fields(SyntheticConfig)}
    try:
        config = SyntheticConfig(**values)
        corpus = generate(config)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    paths = corpus.write(args.out)
    config_path = Path(args.out) / "config.json"
    config_path.write_text(json.dumps(dataclasses.asdict(config), indent=2) + "\n",
                           encoding="utf-8")
    for name, path in sorted(paths.items()):
        print(f"{name}: {path}")
    return 0


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtvaug", description="Text augmentation with a weighted original/augmented objective.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    p = sub.add_parser("augment", help="write k augmented copies of every example")
    p.add_argument("--input", required=True, help="dataset TSV (label<TAB>text)")
    p.add_argument("--output", required=True, help="output TSV")
    p.add_argument("--operator", type=_operator, required=True, help=", ".join(OPERATOR_CHOICES))
    p.add_argument("--alpha", type=_unit_interval, default=0.1, help="augmentation strength")
    p.add_argument("--copies", "-k", type=_positive_int, default=1)
    p.add_argument("--lexicon", help="synonym lexicon TSV (headword<TAB>syn1,syn2)")
    p.add_argument("--seed", type=_seed, default=0)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("train", help="train once and print test accuracy")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--operator", type=lambda t: None if t == BASELINE_NAME else _operator(t),
                   default=None, help=f"{', '.join(OPERATOR_CHOICES)} or {BASELINE_NAME} (default)")
    p.add_argument("--alpha", type=_unit_interval, default=0.1)
    p.add_argument("--gamma-o", type=_unit_interval, default=0.5,
                   help="weight of the original-data loss (1 = plain training)")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--model-out", help="write the trained model here")
    _add_training_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", help="alpha x gamma_o grid over several seeds, with reports",
                       description="Flags override --config values, which override defaults. "
                                   "Rerunning into the same --out resumes finished cells.")
    p.add_argument("--config", help="JSON object whose keys mirror the flag names")
    p.add_argument("--train", default=argparse.SUPPRESS)
    p.add_argument("--test", default=argparse.SUPPRESS)
    p.add_argument("--lexicon", default=argparse.SUPPRESS)
    p.add_argument("--out", default=argparse.SUPPRESS, help="report directory")
    p.add_argument("--alphas", type=SWEEP_CONVERTERS["alphas"], default=argparse.SUPPRESS,
                   help="comma list (default 0.05,0.1,0.2,0.3,0.4,0.5)")
    p.add_argument("--gammas", type=SWEEP_CONVERTERS["gammas"], default=argparse.SUPPRESS,
                   help="comma list of gamma_o values (default 0,0.5)")
    p.add_argument("--operators", type=SWEEP_CONVERTERS["operators"], default=argparse.SUPPRESS,
                   help="comma list (default: all four)")
    p.add_argument("--seeds", type=SWEEP_CONVERTERS["seeds"], default=argparse.SUPPRESS,
                   help="comma list (default 0,1,2,3,4)")
    p.add_argument("--jobs", type=_positive_int, default=argparse.SUPPRESS,
                   help="worker processes; results do not depend on it")
    p.add_argument("--fresh", action="store_true", help="ignore results already in --out")
    _add_training_flags(p, defaults=False)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="rebuild summary, curves and heatmap from runs.csv")
    p.add_argument("--runs", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("gen-synthetic", help="write the synthetic corpus and its lexicon",
                       description="Two-class pseudo-word corpus with a noisy synonym lexicon. "
                                   "Defaults reproduce the bundled acceptance corpus.")
    p.add_argument("--out", required=True)
    for f in dataclasses.fields(SyntheticConfig):
        p.add_argument("--" + f.name.replace("_", "-"), type=type(f.default), default=f.default)
    p.set_defaults(func=cmd_gen_synthetic)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func = args.func
    try:
        return func(args)
    except UsageError as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    except MtvError as exc:
        print(f"{parser.prog}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

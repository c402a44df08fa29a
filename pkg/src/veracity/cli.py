"""Command line interface.

Exit codes form the contract for scripting around the tool:
  0  success
  1  usage errors (bad flags, unknown subcommands)
  2  data errors (missing files, malformed inputs, invalid config values)
  3  numeric failures (non-finite loss, gradient check over tolerance)
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
import numpy as np

from .audio import MfccConfig, extract_mfcc, mfcc_csv_text, read_wav, write_mfcc_csv
from .checkpoint import load_checkpoint, save_checkpoint
from .dataset import SplitSpec, load_manifest, split_dataset, validate_sample
from .errors import ConfigError, DataError, NumericError
from .fusion import ModalityCombo, all_combos
from .grid import run_grid, write_report
from .nn import ModelKind, ModelSpec, gradient_check, init_params
from .synth import generate_overfit_dataset, generate_synthetic_dataset
from .training import (
    TrainConfig,
    evaluate,
    metrics_from_predictions,
    predict,
    train,
    write_predictions_csv,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse subclass that reports usage problems via exit code 1."""

    def error(self, message: str):
        raise UsageError(message)


_TRAIN_KEYS = (
    "epochs",
    "learning_rate",
    "batch_size",
    "seed",
    "target_len",
    "train_fraction",
)


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="JSON", help="config file; flags override its values")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--target-len", type=int, default=None, help="frames after resampling")
    p.add_argument("--train-fraction", type=float, default=None)
    p.add_argument("--hidden", type=int, default=None, help="recurrent state width")


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    allowed = set(_TRAIN_KEYS) | {"hidden"}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return doc


def _merge_train_config(args: argparse.Namespace) -> tuple[TrainConfig, int]:
    """Precedence: explicit flag, then config file, then defaults."""
    file_cfg = _load_config_file(getattr(args, "config", None))
    values: dict = {}
    for key in _TRAIN_KEYS:
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
        elif key in file_cfg:
            values[key] = file_cfg[key]
    try:
        cfg = TrainConfig(**values)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    hidden = args.hidden if args.hidden is not None else file_cfg.get("hidden", 128)
    if not isinstance(hidden, int) or hidden < 1:
        raise ConfigError(f"hidden must be a positive integer, got {hidden!r}")
    return cfg, hidden


def _parse_combo(text: str) -> ModalityCombo:
    try:
        return ModalityCombo.parse(text)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def cmd_validate(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    n_bad = 0
    for record in manifest.samples:
        result = validate_sample(record)
        if result.ok:
            print(f"{record.id}: ok")
        else:
            n_bad += 1
            for check in result.checks:
                if not check.ok:
                    print(f"{record.id}: {check.modality}: {check.reason}")
    print(
        f"{manifest.n_total} samples "
        f"({manifest.n_deceptive} deceptive / {manifest.n_truthful} truthful), "
        f"{n_bad} with problems"
    )
    return EXIT_OK if n_bad == 0 else EXIT_DATA


def cmd_extract_audio(args: argparse.Namespace) -> int:
    signal = read_wav(args.wav)
    config = MfccConfig()
    seq = extract_mfcc(signal, config)
    if args.output is None:
        sys.stdout.write(mfcc_csv_text(seq, config))
    else:
        write_mfcc_csv(args.output, seq, config)
        print(f"wrote {seq.length} x {seq.dim} coefficients to {args.output}")
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    cfg, hidden = _merge_train_config(args)
    combo = _parse_combo(args.combo)
    try:
        kind = ModelKind(args.model)
    except ValueError as e:
        raise ConfigError(f"unknown model kind {args.model!r}") from e
    manifest = load_manifest(args.manifest)
    train_samples, test_samples = split_dataset(
        manifest, SplitSpec(train_fraction=cfg.train_fraction, seed=cfg.seed)
    )
    spec = ModelSpec(kind=kind, hidden=hidden, init_seed=cfg.seed)
    started = time.time()
    ckpt, history = train(spec, combo, train_samples, cfg)
    save_checkpoint(args.output, ckpt)
    last = history[-1]
    print(
        f"trained {kind.value} on {combo.label} "
        f"({len(train_samples)} train / {len(test_samples)} held out) "
        f"in {time.time() - started:.1f}s"
    )
    print(f"final epoch: loss={last.loss:.6f} accuracy={last.accuracy:.4f}")
    print(f"checkpoint: {args.output}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    ckpt = load_checkpoint(args.checkpoint)
    manifest = load_manifest(args.manifest)
    if args.split == "all":
        samples = manifest.samples
    else:
        spec = SplitSpec(
            train_fraction=float(ckpt.train_config.get("train_fraction", 0.8)),
            seed=int(ckpt.train_config.get("seed", 0)),
        )
        train_samples, test_samples = split_dataset(manifest, spec)
        samples = train_samples if args.split == "train" else test_samples
    predictions = predict(ckpt, samples)
    metrics = metrics_from_predictions(predictions)
    if args.predictions:
        write_predictions_csv(args.predictions, predictions)
    print(json.dumps({"split": args.split, **metrics.to_dict()}, indent=1))
    return EXIT_OK


def cmd_grid(args: argparse.Namespace) -> int:
    cfg, hidden = _merge_train_config(args)
    manifest = load_manifest(args.manifest)
    kinds = None
    if args.models:
        try:
            kinds = [ModelKind(m.strip()) for m in args.models.split(",") if m.strip()]
        except ValueError as e:
            raise ConfigError(f"unknown model kind in --models: {e}") from e
    combos = [_parse_combo(c) for c in args.combo] if args.combo else None
    started = time.time()
    report = run_grid(manifest, kinds, combos, cfg, hidden=hidden, jobs=args.jobs)
    write_report(args.output, report)
    sidecar = {
        "report": str(args.output),
        "elapsed_seconds": round(time.time() - started, 3),
        "finished_unix": int(time.time()),
    }
    Path(str(args.output) + ".meta").write_text(
        json.dumps(sidecar, indent=1) + "\n", encoding="utf-8"
    )
    print(report.render_text())
    if report.failed:
        for (kind, label), msg in report.failed.items():
            print(f"FAILED {kind.value}/{label}:\n{msg}", file=sys.stderr)
        return EXIT_DATA
    print(f"report: {args.output}")
    return EXIT_OK


def cmd_gradcheck(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for kind in ModelKind:
        if kind is ModelKind.MINICONV:
            shape, hidden = (args.conv_rows, args.conv_cols), args.hidden
        else:
            shape, hidden = (args.steps, args.dim), args.hidden
        spec = ModelSpec(kind=kind, hidden=hidden, init_seed=args.seed)
        params = init_params(spec, shape[1])
        x = rng.standard_normal(shape)
        report = gradient_check(spec, params, x, eps=args.eps)
        worst = max(worst, report.max_rel_error)
        print(
            f"{kind.value}: max relative error {report.max_rel_error:.3e} "
            f"(worst parameter: {report.worst_param})"
        )
    if worst > args.tolerance:
        print(f"FAIL: {worst:.3e} exceeds tolerance {args.tolerance:.3e}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"OK: all gradients within {args.tolerance:.3e}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    if args.overfit:
        n = args.samples if args.samples is not None else 8
        path = generate_overfit_dataset(args.out_dir, n_samples=n, seed=args.seed)
    else:
        n = args.samples if args.samples is not None else 120
        path = generate_synthetic_dataset(args.out_dir, n_samples=n, seed=args.seed)
    print(path)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="veracity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="cmd", metavar="COMMAND")

    p = sub.add_parser("validate", help="check every file referenced by a manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("extract-audio", help="compute MFCC features from a WAV file")
    p.add_argument("wav")
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_extract_audio)

    p = sub.add_parser("train", help="train one model on the train split")
    p.add_argument("manifest")
    p.add_argument("-o", "--output", required=True, help="checkpoint JSON path")
    p.add_argument("--model", default="lstm", help="lstm, bilstm, or miniconv")
    p.add_argument("--combo", default="v,a,t", help="modalities, e.g. v or a,t")
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint against a manifest")
    p.add_argument("checkpoint")
    p.add_argument("manifest")
    p.add_argument("--split", choices=("train", "test", "all"), default="test")
    p.add_argument("--predictions", help="write per-sample CSV here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("grid", help="train and evaluate every model x combo cell")
    p.add_argument("manifest")
    p.add_argument("-o", "--output", required=True, help="report JSON path")
    p.add_argument("--models", help="comma list: lstm,bilstm,miniconv (default all)")
    p.add_argument(
        "--combo",
        action="append",
        help="repeatable, e.g. --combo v --combo v,a,t (default: all seven)",
    )
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    _add_train_flags(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("gradcheck", help="compare analytic gradients to finite differences")
    p.add_argument("--hidden", type=int, default=4)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--steps", type=int, default=5, help="sequence length")
    p.add_argument("--conv-rows", type=int, default=16, help="input rows for the conv model")
    p.add_argument("--conv-cols", type=int, default=8, help="input cols for the conv model")
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("synth", help="generate a labelled synthetic dataset")
    p.add_argument("out_dir")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--overfit",
        action="store_true",
        help="tiny trivially separable set instead of the mixed-signal one",
    )
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "func", None) is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except DataError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

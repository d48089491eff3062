"""Command-line entry point: generate, train, eval, serve.

Every command writes a run manifest under the runs directory.  Exit codes:
0 success, 2 usage error, 3 data or environment error.
"""

from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path

from .datafiles import load_dataset, save_dataset
from .errors import DataFormatError, DomainError
from .evaluate import ConfusionMatrix, SplitSpec, stratified_split
from .manifest import RunManifest, run_directory
from .osc import DEFAULT_UDP_PORT
from .pipeline import (METHOD_NAMES, labels_of, load_trained, save_trained,
                       train_method)
from .report import format_report, write_run_report
from .serve import DEFAULT_WS_PORT, GestureService, ServeConfig
from .synth import SynthSpec, synth_dataset

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tacgest",
        description="Hand-gesture recognition for a 9x9 textile pressure sensor.")
    parser.add_argument("--runs-dir", default="runs",
                        help="directory for manifests and result files")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser(
        "generate", help="synthesize a labeled gesture dataset")
    generate.add_argument("--out", required=True, help="output dataset (JSONL)")
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--participants", type=int, default=34)

    train = commands.add_parser("train", help="fit a recognition method")
    train.add_argument("--data", required=True, help="dataset file (JSONL)")
    train.add_argument("--method", required=True, choices=METHOD_NAMES)
    train.add_argument("--augment", action="store_true",
                       help="shift-augment the training partition")
    train.add_argument("--cv", action="store_true",
                       help="leave-one-subject-out hyperparameter search")
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--out", required=True, help="output model file")

    evaluate = commands.add_parser(
        "eval", help="score a saved model on its held-out split")
    evaluate.add_argument("--model", required=True)
    evaluate.add_argument("--data", required=True)

    serve = commands.add_parser(
        "serve", help="run the live recognition service")
    serve.add_argument("--model", required=True)
    serve.add_argument("--udp", type=int, default=DEFAULT_UDP_PORT)
    serve.add_argument("--ws", type=int, default=DEFAULT_WS_PORT)
    serve.add_argument("--log", default=None,
                       help="prediction log path (default: inside the run dir)")
    return parser


def _cmd_generate(args) -> int:
    config = {"seed": args.seed, "participants": args.participants,
              "out": str(args.out)}
    manifest = RunManifest("generate", config, seeds={"corpus": args.seed})
    spec = SynthSpec(participants=args.participants)
    recs = synth_dataset(spec, corpus_seed=args.seed)
    count = save_dataset(recs, args.out)
    manifest.add_output("dataset", args.out)
    manifest.add_result("recordings", count)
    run_dir = run_directory(args.runs_dir, "generate", config)
    manifest.write(run_dir / "manifest.json")
    print(f"wrote {count} recordings to {args.out}")
    return EXIT_OK


def _confusion_payload(confusion: ConfusionMatrix) -> list:
    return [[int(v) for v in row] for row in confusion.counts]


def _cmd_train(args) -> int:
    config = {"data": str(args.data), "method": args.method,
              "augment": args.augment, "cv": args.cv, "seed": args.seed,
              "out": str(args.out)}
    manifest = RunManifest("train", config, seeds={"split": args.seed,
                                                   "model": args.seed})
    manifest.add_input("dataset", args.data)
    recs = load_dataset(args.data)
    outcome = train_method(args.method, recs, seed=args.seed,
                           augment=args.augment, cv=args.cv)
    save_trained(outcome, args.out, seed=args.seed,
                 extra={"data": str(args.data)})
    run_dir = run_directory(args.runs_dir, "train", config)
    payload = {
        "command": "train",
        "method": args.method,
        "seed": args.seed,
        "augment": args.augment,
        "cv": args.cv,
        "hyperparams": outcome.hyperparams,
        "accuracy": outcome.accuracy,
        "n_train": outcome.n_train,
        "n_test": outcome.n_test,
        "skipped_silent": outcome.skipped_silent,
        "confusion": _confusion_payload(outcome.confusion),
    }
    if outcome.cv is not None:
        payload["cv"] = {"best_params": outcome.cv.best_params,
                         "best_mean_accuracy": outcome.cv.best_mean_accuracy,
                         "fold_participants": outcome.cv.fold_participants,
                         "scores": outcome.cv.scores}
    paths = write_run_report(run_dir, payload, outcome.confusion,
                             title=f"{args.method} test confusion")
    manifest.add_output("model", args.out)
    for name, path in paths.items():
        manifest.add_output(name, path)
    manifest.add_result("accuracy", outcome.accuracy)
    manifest.add_result("hyperparams", outcome.hyperparams)
    manifest.write(run_dir / "manifest.json")
    print(format_report(f"{args.method} on {args.data}", outcome.accuracy,
                        outcome.confusion))
    print(f"\nmodel: {args.out}\nresults: {paths['results']}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    config = {"model": str(args.model), "data": str(args.data)}
    manifest = RunManifest("eval", config)
    manifest.add_input("model", args.model)
    manifest.add_input("dataset", args.data)
    model, metadata = load_trained(args.model)
    recs = load_dataset(args.data)
    seed = int(metadata.get("seed", 0))
    _, test = stratified_split(recs, SplitSpec(seed=seed))
    predicted = model.predict_ids(test)
    confusion = ConfusionMatrix.from_predictions(labels_of(test), predicted)
    run_dir = run_directory(args.runs_dir, "eval", config)
    payload = {
        "command": "eval",
        "method": metadata.get("method"),
        "seed": seed,
        "accuracy": confusion.accuracy,
        "n_test": confusion.total,
        "confusion": _confusion_payload(confusion),
    }
    paths = write_run_report(run_dir, payload, confusion,
                             title=f"{metadata.get('method')} eval confusion")
    for name, path in paths.items():
        manifest.add_output(name, path)
    manifest.add_result("accuracy", confusion.accuracy)
    manifest.write(run_dir / "manifest.json")
    print(format_report(f"{metadata.get('method')} on {args.data}",
                        confusion.accuracy, confusion))
    return EXIT_OK


def _cmd_serve(args) -> int:
    config = {"model": str(args.model), "udp": args.udp, "ws": args.ws}
    manifest = RunManifest("serve", config)
    manifest.add_input("model", args.model)
    model, metadata = load_trained(args.model)
    run_dir = run_directory(args.runs_dir, "serve", config)
    log_path = Path(args.log) if args.log else run_dir / "predictions.ndjson"
    serve_config = ServeConfig(udp_port=args.udp, ws_port=args.ws,
                               log_path=log_path)
    service = GestureService(model, serve_config)

    async def _run() -> None:
        await service.start()
        print(f"serving {metadata.get('method')} model: "
              f"udp://127.0.0.1:{args.udp} ws://127.0.0.1:{args.ws}/stream "
              f"log={log_path}", flush=True)
        try:
            await asyncio.Event().wait()
        finally:
            await service.stop()

    manifest.add_result("log", str(log_path))
    manifest.write(run_dir / "manifest.json")
    try:
        asyncio.run(_run())
    except KeyboardInterrupt:
        print(f"\nstopped: {service.stats.predictions} predictions, "
              f"{service.stats.frames} frames, "
              f"{service.stats.overflows} overflows")
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (DomainError, DataFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

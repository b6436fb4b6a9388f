"""quality-service command line: train, evaluate, serve, synth."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .data import load_examples, make_synthetic_corpus, save_examples, stratified_split
from .evaluate import evaluate
from .model import ModelConfig, ScoringBundle
from .thresholds import Thresholds
from .train import TrainConfig, train


def cmd_train(args) -> int:
    examples = load_examples(args.data)
    config = TrainConfig(epochs=args.epochs, seed=args.seed,
                         model=ModelConfig(dim=args.dim, layers=args.layers, seed=args.seed))
    result = train(examples, config, out_dir=args.out)
    print(json.dumps({
        "artifacts": str(args.out),
        "train_examples": result.train_examples,
        "validation_mse": round(result.validation_loss, 6),
        "thresholds": list(result.thresholds.cuts),
        "wall_seconds": round(result.wall_seconds, 1),
    }, indent=2))
    return 0


def cmd_evaluate(args) -> int:
    bundle = ScoringBundle.load(args.artifacts)
    thresholds = Thresholds.load(Path(args.artifacts) / "thresholds.json")
    examples = load_examples(args.data)
    if args.split:
        _train, _val, examples = stratified_split(examples, seed=args.seed)
    report = evaluate(bundle, thresholds, examples)
    print(json.dumps(report, indent=2))
    return 0


def cmd_serve(args) -> int:
    from .serve import run

    run(args.artifacts, host=args.host, port=args.port, max_batch=args.max_batch)
    return 0


def cmd_synth(args) -> int:
    examples = make_synthetic_corpus(args.n, seed=args.seed)
    save_examples(examples, args.out)
    print(f"wrote {len(examples)} synthetic examples to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quality-service")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the regression model + thresholds")
    p.add_argument("--data", required=True, help="JSONL with text/label/language per line")
    p.add_argument("--out", required=True, help="artifact directory")
    p.add_argument("--epochs", type=int, default=12)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("evaluate", help="per-language per-class metrics")
    p.add_argument("--artifacts", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--split", action="store_true",
                   help="evaluate on the test portion of the standard split")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("serve", help="serve POST /score and GET /health")
    p.add_argument("--artifacts", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8400)
    p.add_argument("--max-batch", dest="max_batch", type=int, default=256)

    p = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)

    return parser


_COMMANDS = {"train": cmd_train, "evaluate": cmd_evaluate, "serve": cmd_serve,
             "synth": cmd_synth}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

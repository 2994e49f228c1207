"""Command line: train a toy model on processed records, emit candidates."""

from __future__ import annotations

import argparse
import sys

from .data import load_examples
from .decode import exact_match_rate, predict_to_file
from .model import ToyModelConfig
from .train import load_checkpoint, save_checkpoint, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toyseq2seq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    defaults = ToyModelConfig()

    p = sub.add_parser("train", help="fit on a processed-records file")
    p.add_argument("--data", required=True, help="processed records (JSON lines)")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--embedding-size", type=int, default=defaults.embedding_size)
    p.add_argument("--hidden-size", type=int, default=defaults.hidden_size)
    p.add_argument("--layers", type=int, default=defaults.layers)
    p.add_argument("--epochs", type=int, default=defaults.epochs)
    p.add_argument("--batch-size", type=int, default=defaults.batch_size)
    p.add_argument("--learning-rate", type=float, default=defaults.learning_rate)
    p.add_argument("--dropout", type=float, default=defaults.dropout)
    p.add_argument("--beam-size", type=int, default=defaults.beam_size)
    p.add_argument("--seed", type=int, default=defaults.seed)
    p.add_argument("--max-decode-len", type=int, default=defaults.max_decode_len)

    p = sub.add_parser("predict", help="emit a top-1 candidate file")
    p.add_argument("--model", required=True, help="checkpoint path")
    p.add_argument("--data", required=True, help="processed records (JSON lines)")
    p.add_argument("--out", required=True, help="candidate rows destination")
    p.add_argument("--model-id", default="toy")
    p.add_argument("--beam-size", type=int, help="default: training config")

    return parser


def cmd_train(args) -> int:
    cfg = ToyModelConfig(
        embedding_size=args.embedding_size,
        hidden_size=args.hidden_size,
        layers=args.layers,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        dropout=args.dropout,
        beam_size=args.beam_size,
        seed=args.seed,
        max_decode_len=args.max_decode_len,
    )
    examples = load_examples(args.data)
    model, src_vocab, tgt_vocab, history = train(examples, cfg)
    save_checkpoint(args.out, model, src_vocab, tgt_vocab, history)
    match = exact_match_rate(model, src_vocab, tgt_vocab, examples, beam_size=1)
    print(
        f"trained on {len(examples)} records for {cfg.epochs} epochs: "
        f"loss {history[0]:.3f} -> {history[-1]:.3f}, "
        f"train exact match {match:.1%} -> {args.out}",
        file=sys.stderr,
    )
    return 0


def cmd_predict(args) -> int:
    model, src_vocab, tgt_vocab = load_checkpoint(args.model)
    examples = load_examples(args.data)
    predict_to_file(
        model, src_vocab, tgt_vocab, examples, args.out, args.model_id, args.beam_size
    )
    print(f"wrote {len(examples)} candidates -> {args.out}", file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return {"train": cmd_train, "predict": cmd_predict}[args.command](args)
    except (OSError, ValueError) as exc:
        print(f"toyseq2seq {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

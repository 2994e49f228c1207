"""Training loop and checkpointing."""

from __future__ import annotations

import random
from pathlib import Path

import torch
from torch import nn

from .data import BOS, EOS, Example, Vocab, build_vocabs
from .model import Seq2Seq, ToyModelConfig, seed_everything

# a toy with an embedding table this large is a data bug, not a use case
MAX_VOCAB = 50_000


def _encode_batch(batch: list[Example], src_vocab: Vocab, tgt_vocab: Vocab):
    src_len = max(len(ex.source) for ex in batch)
    tgt_len = max(len(ex.target) for ex in batch) + 1  # BOS shift / EOS
    src = torch.full((len(batch), src_len), src_vocab.pad, dtype=torch.long)
    tgt_in = torch.full((len(batch), tgt_len), tgt_vocab.pad, dtype=torch.long)
    tgt_out = torch.full((len(batch), tgt_len), tgt_vocab.pad, dtype=torch.long)
    for i, ex in enumerate(batch):
        for j, tok in enumerate(ex.source):
            src[i, j] = src_vocab.encode(tok)
        seq = [tgt_vocab.encode(BOS)] + [tgt_vocab.encode(t) for t in ex.target]
        out = [tgt_vocab.encode(t) for t in ex.target] + [tgt_vocab.encode(EOS)]
        tgt_in[i, : len(seq)] = torch.tensor(seq)
        tgt_out[i, : len(out)] = torch.tensor(out)
    return src, tgt_in, tgt_out


def train(
    examples: list[Example], cfg: ToyModelConfig = ToyModelConfig()
) -> tuple[Seq2Seq, Vocab, Vocab, list[float]]:
    """Token-level cross-entropy training; returns per-epoch mean losses.

    Deterministic for a fixed config: seeding covers parameter init,
    dropout, and the per-epoch shuffle.
    """
    if not examples:
        raise ValueError("no training examples")
    seed_everything(cfg.seed)
    src_vocab, tgt_vocab = build_vocabs(examples)
    if len(src_vocab) > MAX_VOCAB or len(tgt_vocab) > MAX_VOCAB:
        raise ValueError(
            f"vocabulary overflow: {len(src_vocab)} source / {len(tgt_vocab)} "
            f"target tokens exceeds {MAX_VOCAB}"
        )
    model = Seq2Seq(len(src_vocab), len(tgt_vocab), cfg, src_vocab.pad, tgt_vocab.pad)
    optim = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    loss_fn = nn.CrossEntropyLoss(ignore_index=tgt_vocab.pad)
    shuffle_rng = random.Random(cfg.seed)

    history = []
    order = list(range(len(examples)))
    model.train()
    for _epoch in range(cfg.epochs):
        shuffle_rng.shuffle(order)
        total, batches = 0.0, 0
        for start in range(0, len(order), cfg.batch_size):
            batch = [examples[i] for i in order[start : start + cfg.batch_size]]
            src, tgt_in, tgt_out = _encode_batch(batch, src_vocab, tgt_vocab)
            logits = model(src, tgt_in)
            loss = loss_fn(logits.reshape(-1, logits.shape[-1]), tgt_out.reshape(-1))
            optim.zero_grad()
            loss.backward()
            optim.step()
            total += loss.item()
            batches += 1
        history.append(total / batches)
    return model, src_vocab, tgt_vocab, history


def save_checkpoint(path: str | Path, model: Seq2Seq, src_vocab: Vocab,
                    tgt_vocab: Vocab, history: list[float]) -> None:
    torch.save(
        {
            "config": model.cfg.to_dict(),
            "src_tokens": src_vocab.tokens,
            "tgt_tokens": tgt_vocab.tokens,
            "state": model.state_dict(),
            "loss_history": history,
        },
        path,
    )


def load_checkpoint(path: str | Path) -> tuple[Seq2Seq, Vocab, Vocab]:
    payload = torch.load(path, weights_only=False)
    cfg = ToyModelConfig(**payload["config"])
    src_vocab = Vocab(tuple(payload["src_tokens"]))
    tgt_vocab = Vocab(tuple(payload["tgt_tokens"]))
    model = Seq2Seq(len(src_vocab), len(tgt_vocab), cfg, src_vocab.pad, tgt_vocab.pad)
    model.load_state_dict(payload["state"])
    model.eval()
    return model, src_vocab, tgt_vocab

"""Beam-search decoding and candidate-file emission."""

from __future__ import annotations

import json
from pathlib import Path

import torch

from .data import BOS, EOS, PAD, UNK, Example, Vocab
from .model import Seq2Seq


def beam_decode(
    model: Seq2Seq,
    src_vocab: Vocab,
    tgt_vocab: Vocab,
    source: tuple[str, ...],
    beam_size: int | None = None,
) -> tuple[list[str], list[float]]:
    """Most probable target sequence and its per-token log probabilities.

    Beam size 1 is exactly greedy decoding. The returned tokens exclude
    BOS/EOS; the log probabilities align with the returned tokens.
    """
    beam_size = beam_size or model.cfg.beam_size
    model.eval()
    with torch.no_grad():
        src = torch.tensor(
            [[src_vocab.encode(t) for t in source]], dtype=torch.long
        )
        keys, state = model.encoder(src)
        mask = src != model.src_pad

        # special tokens other than EOS must never be emitted
        forbid = [tgt_vocab.encode(t) for t in (PAD, UNK, BOS)]
        bos, eos = tgt_vocab.encode(BOS), tgt_vocab.encode(EOS)

        # each beam: (cumulative logprob, token ids, per-step logprobs, state, done)
        beams = [(0.0, [bos], [], state.contiguous(), False)]
        for _ in range(model.cfg.max_decode_len):
            if all(done for *_, done in beams):
                break
            grown = []
            for cum, ids, lps, st, done in beams:
                if done:
                    grown.append((cum, ids, lps, st, done))
                    continue
                step = torch.tensor([[ids[-1]]], dtype=torch.long)
                logits, new_state = model.decoder(step, st, keys, mask)
                logp = torch.log_softmax(logits[0, -1], dim=-1)
                logp[forbid] = float("-inf")
                top = torch.topk(logp, k=min(beam_size, logp.shape[0]))
                for value, idx in zip(top.values.tolist(), top.indices.tolist()):
                    grown.append(
                        (cum + value, ids + [idx], lps + [value], new_state, idx == eos)
                    )
            grown.sort(key=lambda b: (-b[0], b[1]))
            beams = grown[:beam_size]

        cum, ids, lps, _, done = max(beams, key=lambda b: b[0])
    content = [(i, lp) for i, lp in zip(ids[1:], lps) if i != eos]
    tokens = [tgt_vocab.decode(i) for i, _ in content]
    return tokens, [lp for _, lp in content]


def predict_to_file(
    model: Seq2Seq,
    src_vocab: Vocab,
    tgt_vocab: Vocab,
    examples: list[Example],
    path: str | Path,
    model_id: str,
    beam_size: int | None = None,
) -> None:
    """Top-1 candidate per record, in the ensemble's file contract."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for ex in examples:
            tokens, lps = beam_decode(model, src_vocab, tgt_vocab, ex.source, beam_size)
            if not tokens:  # degenerate immediate-EOS decode still needs a row
                tokens, lps = [UNK], [-1e9]
            fh.write(
                json.dumps(
                    {
                        "id": ex.record_id,
                        "model": model_id,
                        "tokens": " ".join(tokens),
                        "total_logprob": sum(lps),
                        "token_logprobs": lps,
                    },
                    ensure_ascii=False,
                    separators=(",", ":"),
                )
                + "\n"
            )


def exact_match_rate(
    model: Seq2Seq,
    src_vocab: Vocab,
    tgt_vocab: Vocab,
    examples: list[Example],
    beam_size: int | None = None,
) -> float:
    hits = 0
    for ex in examples:
        tokens, _ = beam_decode(model, src_vocab, tgt_vocab, ex.source, beam_size)
        hits += tuple(tokens) == ex.target
    return hits / len(examples) if examples else 0.0

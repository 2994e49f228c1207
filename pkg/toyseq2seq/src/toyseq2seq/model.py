"""Small GRU encoder-decoder with dot-product attention.

Sized for memorizing a few hundred records on a CPU in minutes; held
deliberately simple (full teacher forcing, single attention head).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import torch
from torch import nn


@dataclass(frozen=True)
class ToyModelConfig:
    embedding_size: int = 64
    hidden_size: int = 128
    layers: int = 1
    epochs: int = 200
    batch_size: int = 16
    learning_rate: float = 3e-3
    dropout: float = 0.1
    beam_size: int = 3
    seed: int = 42
    max_decode_len: int = 40

    def __post_init__(self):
        for name in ("embedding_size", "hidden_size", "layers", "epochs",
                     "batch_size", "beam_size", "max_decode_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0 <= self.dropout < 1:
            raise ValueError("dropout must be in [0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)


def seed_everything(seed: int) -> None:
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True)
    torch.set_num_threads(1)


class Encoder(nn.Module):
    def __init__(self, vocab_size: int, cfg: ToyModelConfig, pad: int):
        super().__init__()
        self.embed = nn.Embedding(vocab_size, cfg.embedding_size, padding_idx=pad)
        self.rnn = nn.GRU(
            cfg.embedding_size,
            cfg.hidden_size,
            num_layers=cfg.layers,
            batch_first=True,
            bidirectional=True,
            dropout=cfg.dropout if cfg.layers > 1 else 0.0,
        )
        self.bridge = nn.Linear(2 * cfg.hidden_size, cfg.hidden_size)

    def forward(self, src: torch.Tensor):
        # src: (batch, src_len)
        out, state = self.rnn(self.embed(src))
        # out: (batch, src_len, 2h); state: (2*layers, batch, h)
        layers = state.shape[0] // 2
        fwd, bwd = state[0::2], state[1::2]  # (layers, batch, h) each
        init = torch.tanh(self.bridge(torch.cat([fwd, bwd], dim=-1)))
        keys = self.bridge(out)  # shared projection keeps it small
        return keys, init


class Decoder(nn.Module):
    def __init__(self, vocab_size: int, cfg: ToyModelConfig, pad: int):
        super().__init__()
        self.embed = nn.Embedding(vocab_size, cfg.embedding_size, padding_idx=pad)
        self.rnn = nn.GRU(
            cfg.embedding_size,
            cfg.hidden_size,
            num_layers=cfg.layers,
            batch_first=True,
            dropout=cfg.dropout if cfg.layers > 1 else 0.0,
        )
        self.combine = nn.Linear(2 * cfg.hidden_size, cfg.hidden_size)
        self.out = nn.Linear(cfg.hidden_size, vocab_size)
        self.drop = nn.Dropout(cfg.dropout)

    def forward(self, step_in, state, keys, key_mask):
        # step_in: (batch, tgt_len); keys: (batch, src_len, h)
        query, state = self.rnn(self.drop(self.embed(step_in)), state)
        # query: (batch, tgt_len, h)
        scores = torch.bmm(query, keys.transpose(1, 2))  # (batch, tgt, src)
        scores = scores.masked_fill(~key_mask.unsqueeze(1), float("-inf"))
        context = torch.bmm(torch.softmax(scores, dim=-1), keys)
        mixed = torch.tanh(self.combine(torch.cat([query, context], dim=-1)))
        return self.out(self.drop(mixed)), state


class Seq2Seq(nn.Module):
    def __init__(self, src_vocab_size: int, tgt_vocab_size: int,
                 cfg: ToyModelConfig, src_pad: int, tgt_pad: int):
        super().__init__()
        self.cfg = cfg
        self.encoder = Encoder(src_vocab_size, cfg, src_pad)
        self.decoder = Decoder(tgt_vocab_size, cfg, tgt_pad)
        self.src_pad = src_pad

    def forward(self, src: torch.Tensor, tgt_in: torch.Tensor) -> torch.Tensor:
        keys, state = self.encoder(src)
        logits, _ = self.decoder(tgt_in, state.contiguous(), keys, src != self.src_pad)
        return logits

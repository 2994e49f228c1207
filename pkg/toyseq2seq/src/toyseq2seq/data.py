"""Reading processed-record files and building model examples.

The input contract is the preprocessing pipeline's JSON-lines output:
{id, tokens, mapping, infix, postorder, ans, coverage}. The source
sequence is the problem's token list with each mapped number position
replaced by its token name (n1, n2, ...); the target is the normalized
postorder sequence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

PAD = "<pad>"
UNK = "<unk>"
BOS = "<s>"
EOS = "</s>"


@dataclass(frozen=True)
class Example:
    record_id: str
    source: tuple[str, ...]
    target: tuple[str, ...]


def load_examples(path: str | Path) -> list[Example]:
    examples = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                tokens = list(obj["tokens"])
                for slot in obj["mapping"]:
                    tokens[slot["pos"]] = slot["token"]
                examples.append(
                    Example(
                        record_id=str(obj["id"]),
                        source=tuple(tokens),
                        target=tuple(obj["postorder"].split()),
                    )
                )
            except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
                raise ValueError(f"{path}: line {line_no}: {exc}") from None
    return examples


class Vocab:
    def __init__(self, tokens: tuple[str, ...]):
        self.tokens = tuple(tokens)
        self._index = {t: i for i, t in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocab) and self.tokens == other.tokens

    def encode(self, token: str) -> int:
        return self._index.get(token, self._index[UNK])

    def decode(self, idx: int) -> str:
        return self.tokens[idx]

    @property
    def pad(self) -> int:
        return self._index[PAD]


def build_vocabs(examples: list[Example]) -> tuple[Vocab, Vocab]:
    """(source vocab, target vocab); deterministic: sorted token sets."""
    src = sorted({tok for ex in examples for tok in ex.source})
    tgt = sorted({tok for ex in examples for tok in ex.target})
    return (
        Vocab((PAD, UNK, *src)),
        Vocab((PAD, UNK, BOS, EOS, *tgt)),
    )

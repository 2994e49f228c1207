"""Cross-model candidate selection by generation probability.

Each model contributes one candidate sequence per problem together with
the total log probability of generating it (the sum over decoding steps).
Selection keeps, per problem, the candidate whose sequence was most
probable under its own model; exact ties fall back to a configured model
priority order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

LOGPROB_SLACK = 1e-9  # float noise allowance on the <= 0 invariant


@dataclass(frozen=True)
class Candidate:
    problem_id: str
    model_id: str
    tokens: str  # space-separated postorder sequence
    total_logprob: float
    token_logprobs: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.tokens.split():
            raise ValueError(f"{self.problem_id}/{self.model_id}: empty token sequence")
        if self.total_logprob > LOGPROB_SLACK:
            raise ValueError(
                f"{self.problem_id}/{self.model_id}: log probability "
                f"{self.total_logprob} is positive"
            )
        if self.token_logprobs is not None:
            total = score_from_token_logprobs(list(self.token_logprobs))
            if not math.isclose(total, self.total_logprob, rel_tol=0, abs_tol=1e-9):
                raise ValueError(
                    f"{self.problem_id}/{self.model_id}: token log probabilities "
                    f"sum to {total}, total says {self.total_logprob}"
                )


@dataclass(frozen=True)
class EnsembleConfig:
    """Tie-break order: earlier model ids win exact probability ties."""

    priority: tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.priority)) != len(self.priority):
            raise ValueError("priority list contains duplicate model ids")


def score_from_token_logprobs(logprobs: list[float]) -> float:
    """Total log probability of a sequence from its per-token terms."""
    if not logprobs:
        raise ValueError("sequences must be non-empty")
    for i, term in enumerate(logprobs):
        if term > LOGPROB_SLACK:
            raise ValueError(f"log probability at step {i} is positive: {term}")
    return sum(logprobs)


def select(
    candidates: list[Candidate], cfg: EnsembleConfig = EnsembleConfig()
) -> list[Candidate]:
    """Pick the most probable candidate per problem id.

    Output is sorted by problem id. Sequence validity is deliberately not
    checked here; scoring downstream treats malformed winners as wrong.
    """
    rank = {model: i for i, model in enumerate(cfg.priority)}
    fallback = len(cfg.priority)

    groups: dict[str, list[Candidate]] = {}
    for cand in candidates:
        groups.setdefault(cand.problem_id, []).append(cand)

    chosen = []
    for pid in sorted(groups):
        group = sorted(
            groups[pid],
            key=lambda c: (
                -c.total_logprob,
                rank.get(c.model_id, fallback),
                c.model_id,
                c.tokens,
            ),
        )
        chosen.append(group[0])
    return chosen


# ---------------------------------------------------------------------------
# file plumbing


def read_candidates(path: str | Path) -> list[Candidate]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                token_lps = obj.get("token_logprobs")
                total = obj.get("total_logprob")
                if total is None:
                    if token_lps is None:
                        raise ValueError("need total_logprob or token_logprobs")
                    total = score_from_token_logprobs(list(token_lps))
                out.append(
                    Candidate(
                        problem_id=str(obj["id"]),
                        model_id=str(obj["model"]),
                        tokens=str(obj["tokens"]),
                        total_logprob=float(total),
                        token_logprobs=tuple(token_lps) if token_lps is not None else None,
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}: line {line_no}: {exc}") from None
    return out


def write_selection(path_or_fh, chosen: list[Candidate]) -> None:
    def emit(fh) -> None:
        for cand in chosen:
            fh.write(
                json.dumps(
                    {"id": cand.problem_id, "model": cand.model_id, "tokens": cand.tokens},
                    ensure_ascii=False,
                    separators=(",", ":"),
                )
                + "\n"
            )

    if hasattr(path_or_fh, "write"):
        emit(path_or_fh)
    else:
        with open(path_or_fh, "w", encoding="utf-8", newline="\n") as fh:
            emit(fh)

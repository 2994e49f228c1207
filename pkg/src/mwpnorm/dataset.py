"""Corpus ingestion, preprocessing, splits, and solution scoring.

File contracts (all UTF-8):

* raw input — the dataset's released shape: either one JSON array or a
  stream of concatenated JSON objects, each with id / original_text /
  segmented_text / equation / ans.
* processed records — JSON lines with exactly the fields
  {id, tokens, mapping, infix, postorder, ans, coverage}; "infix" renders
  the raw template, "postorder" the normalized one; rationals are "p/q".
* prediction rows — JSON lines carrying {id, postorder} (a "tokens" field
  is accepted as an alias so candidate/selection files score directly).
* score report — one verdict row per record, then a final summary row.

Outputs are byte-deterministic for identical inputs and flags, whatever
the worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
import random

from .evaluate import EvaluationError, check_answer, evaluate, parse_answer
from .expr import (
    InvalidSequence,
    ParseError,
    StrayUnknownError,
    parse_infix,
    parse_postorder,
    postorder_string,
    to_infix,
)
from .mapping import (
    ExtractedNumber,
    MappingEntry,
    NumberMapping,
    build_template,
    extract_numbers,
)
from .normalize import NormalizeConfig, normalize
from .rational import format_number, parse_number

_SINGLE_PASS = {
    "se": NormalizeConfig(se=True, oe=False, eb=False),
    "oe": NormalizeConfig(se=False, oe=True, eb=False),
    "eb": NormalizeConfig(se=False, oe=False, eb=True),
    "all": NormalizeConfig(se=True, oe=True, eb=True),
}


@dataclass(frozen=True)
class RawRecord:
    id: str
    original_text: str
    segmented_text: str
    equation: str
    ans: str


@dataclass(frozen=True)
class ProcessedRecord:
    id: str
    tokens: tuple[str, ...]
    mapping: NumberMapping
    infix: str  # raw template (pre-normalization)
    postorder: str  # normalized template
    ans: str  # canonical rational
    coverage: bool

    def to_json_obj(self) -> dict:
        return {
            "id": self.id,
            "tokens": list(self.tokens),
            "mapping": [
                {
                    "token": f"n{e.index}",
                    "value": format_number(e.number.value),
                    "pos": e.number.position,
                    "surface": e.number.surface,
                }
                for e in self.mapping.entries
            ],
            "infix": self.infix,
            "postorder": self.postorder,
            "ans": self.ans,
            "coverage": self.coverage,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ProcessedRecord":
        entries = []
        for slot in obj["mapping"]:
            value = parse_number(slot["value"])
            if value is None:
                raise ValueError(f"bad mapping value {slot['value']!r}")
            entries.append(
                MappingEntry(
                    int(slot["token"][1:]),
                    ExtractedNumber(slot["pos"], value, slot.get("surface", "")),
                )
            )
        return cls(
            id=str(obj["id"]),
            tokens=tuple(obj["tokens"]),
            mapping=NumberMapping(tuple(entries)),
            infix=obj["infix"],
            postorder=obj["postorder"],
            ans=obj["ans"],
            coverage=bool(obj["coverage"]),
        )


@dataclass
class CorpusStats:
    records: int = 0
    processed: int = 0
    failed: int = 0
    failures: dict[str, int] = field(default_factory=dict)
    covered: int = 0
    distinct_raw: int = 0
    distinct_normalized: int = 0
    distinct_by_pass: dict[str, int] = field(default_factory=dict)
    template_length_hist: dict[int, int] = field(default_factory=dict)
    config: dict[str, bool] = field(default_factory=dict)

    @property
    def coverage_rate(self) -> float:
        return self.covered / self.processed if self.processed else 0.0

    def dedup_delta(self) -> dict[str, int]:
        return {
            name: self.distinct_raw - count
            for name, count in sorted(self.distinct_by_pass.items())
        }

    def to_dict(self) -> dict:
        return {
            "records": self.records,
            "processed": self.processed,
            "failed": self.failed,
            "failures": dict(sorted(self.failures.items())),
            "covered": self.covered,
            "coverage_rate": self.coverage_rate,
            "distinct_raw": self.distinct_raw,
            "distinct_normalized": self.distinct_normalized,
            "distinct_by_pass": dict(sorted(self.distinct_by_pass.items())),
            "dedup_delta": self.dedup_delta(),
            "template_length_hist": {
                str(k): v for k, v in sorted(self.template_length_hist.items())
            },
            "config": self.config,
        }


# ---------------------------------------------------------------------------
# ingestion


def _as_raw_record(obj: object, where: str, seen_ids: set[str]) -> RawRecord:
    if not isinstance(obj, dict):
        raise ValueError(f"{where}: not an object")
    rid = obj.get("id")
    if rid is None or str(rid) == "":
        raise ValueError(f"{where}: missing id")
    rid = str(rid)
    if rid in seen_ids:
        raise ValueError(f"{where}: duplicate id {rid!r}")
    equation = obj.get("equation")
    if not isinstance(equation, str) or not equation.strip():
        raise ValueError(f"{where}: missing equation")
    seen_ids.add(rid)
    return RawRecord(
        id=rid,
        original_text=str(obj.get("original_text", "")),
        segmented_text=str(obj.get("segmented_text", "")),
        equation=equation,
        ans=str(obj.get("ans", "")),
    )


def load_math23k(path: str | Path, lenient: bool = False) -> tuple[list[RawRecord], list[str]]:
    """Read a dataset file: a JSON array, or concatenated JSON objects.

    Returns (records, report lines). Malformed records are fatal unless
    lenient, in which case they are skipped and reported with their line
    (or ordinal, for array input).
    """
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise ValueError(f"{path}: empty file")

    records: list[RawRecord] = []
    report: list[str] = []
    seen: set[str] = set()

    def admit(obj: object, where: str) -> None:
        try:
            records.append(_as_raw_record(obj, where, seen))
        except ValueError as exc:
            if not lenient:
                raise
            report.append(str(exc))

    if text.lstrip().startswith("["):
        items = json.loads(text)  # a broken array has no recovery point
        if not isinstance(items, list):
            raise ValueError(f"{path}: expected an array of records")
        for ordinal, obj in enumerate(items, start=1):
            admit(obj, f"{path}: record {ordinal}")
        return records, report

    decoder = json.JSONDecoder()
    pos = 0
    n = len(text)
    while pos < n:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        line = text.count("\n", 0, pos) + 1
        try:
            obj, end = decoder.raw_decode(text, pos)
        except json.JSONDecodeError:
            if not lenient:
                raise ValueError(f"{path}: line {line}: malformed JSON") from None
            report.append(f"{path}: line {line}: malformed JSON, skipped")
            nl = text.find("\n", pos)
            if nl == -1:
                break
            pos = nl + 1
            continue
        admit(obj, f"{path}: line {line}")
        pos = end
    return records, report


# ---------------------------------------------------------------------------
# preprocessing


def _process_one(
    raw: RawRecord, cfg: NormalizeConfig
) -> tuple[str, ProcessedRecord | None, dict[str, str] | None]:
    """Returns (failure reason | "", record, per-pass postorder strings)."""
    tokens = raw.segmented_text.split()
    numbers = extract_numbers(tokens)
    try:
        trec = build_template(raw.equation, numbers, raw.id)
    except StrayUnknownError:
        return "unknown_misplaced", None, None
    except ParseError:
        return "equation_syntax", None, None
    except ValueError:
        return "bad_equation", None, None
    try:
        answer = parse_answer(raw.ans)
    except EvaluationError:
        return "bad_answer", None, None

    posts = {
        name: postorder_string(normalize(trec.template, pass_cfg))
        for name, pass_cfg in _SINGLE_PASS.items()
    }
    posts["raw"] = postorder_string(trec.template)
    posts["active"] = postorder_string(normalize(trec.template, cfg))
    record = ProcessedRecord(
        id=raw.id,
        tokens=tuple(tokens),
        mapping=trec.mapping,
        infix=to_infix(trec.template),
        postorder=posts["active"],
        ans=format_number(answer),
        coverage=trec.coverage,
    )
    return "", record, posts


def preprocess(
    records: list[RawRecord],
    cfg: NormalizeConfig = NormalizeConfig(),
    workers: int = 1,
) -> tuple[list[ProcessedRecord], CorpusStats]:
    """Run the full per-record pipeline; output order equals input order.

    Failures are tallied in the stats, never fatal. Results are identical
    for any worker count.
    """
    stats = CorpusStats(records=len(records))
    stats.config = {"se": cfg.se, "oe": cfg.oe, "eb": cfg.eb}

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_process_one, records, [cfg] * len(records), chunksize=64))
    else:
        results = [_process_one(raw, cfg) for raw in records]

    processed: list[ProcessedRecord] = []
    raw_set: set[str] = set()
    pass_sets: dict[str, set[str]] = {name: set() for name in _SINGLE_PASS}
    active_set: set[str] = set()
    for reason, record, posts in results:
        if record is None:
            stats.failed += 1
            stats.failures[reason] = stats.failures.get(reason, 0) + 1
            continue
        processed.append(record)
        stats.processed += 1
        if record.coverage:
            stats.covered += 1
        raw_set.add(posts["raw"])
        active_set.add(posts["active"])
        for name in _SINGLE_PASS:
            pass_sets[name].add(posts[name])
        length = len(record.postorder.split())
        stats.template_length_hist[length] = stats.template_length_hist.get(length, 0) + 1

    stats.distinct_raw = len(raw_set)
    stats.distinct_normalized = len(active_set)
    stats.distinct_by_pass = {name: len(s) for name, s in pass_sets.items()}
    return processed, stats


def recompute_stats(
    processed: list[ProcessedRecord], cfg: NormalizeConfig = NormalizeConfig()
) -> CorpusStats:
    """Stats from an existing processed file; templates re-read from infix."""
    stats = CorpusStats(records=len(processed))
    stats.config = {"se": cfg.se, "oe": cfg.oe, "eb": cfg.eb}
    raw_set: set[str] = set()
    pass_sets: dict[str, set[str]] = {name: set() for name in _SINGLE_PASS}
    active_set: set[str] = set()
    for record in processed:
        template = parse_infix(record.infix)
        stats.processed += 1
        if record.coverage:
            stats.covered += 1
        raw_set.add(postorder_string(template))
        active_set.add(postorder_string(normalize(template, cfg)))
        for name, pass_cfg in _SINGLE_PASS.items():
            pass_sets[name].add(postorder_string(normalize(template, pass_cfg)))
        length = len(record.postorder.split())
        stats.template_length_hist[length] = stats.template_length_hist.get(length, 0) + 1
    stats.distinct_raw = len(raw_set)
    stats.distinct_normalized = len(active_set)
    stats.distinct_by_pass = {name: len(s) for name, s in pass_sets.items()}
    return stats


# ---------------------------------------------------------------------------
# splits


def split(
    records: list[RawRecord],
    validation_size: int,
    seed: int,
    test_records: list[RawRecord] | None = None,
) -> tuple[list[RawRecord], list[RawRecord], list[RawRecord]]:
    """Carve a validation sample out of the training records.

    Deterministic for a given seed; both partitions keep the input order;
    the test partition (shipped separately) passes through untouched.
    """
    if validation_size < 0:
        raise ValueError("validation size must be >= 0")
    if validation_size >= len(records) and validation_size > 0:
        raise ValueError(
            f"validation size {validation_size} too large for {len(records)} records"
        )
    rng = random.Random(seed)
    chosen = set(rng.sample(range(len(records)), validation_size))
    train = [r for i, r in enumerate(records) if i not in chosen]
    valid = [r for i, r in enumerate(records) if i in chosen]
    return train, valid, list(test_records or [])


# ---------------------------------------------------------------------------
# scoring


@dataclass
class ScoreReport:
    rows: list[dict]
    total: int
    correct: int
    breakdown: dict[str, int]
    tolerance: float

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def summary(self) -> dict:
        return {
            "total": self.total,
            "correct": self.correct,
            "accuracy": self.accuracy,
            "breakdown": dict(sorted(self.breakdown.items())),
            "tolerance": self.tolerance,
        }


def score_predictions(
    processed: list[ProcessedRecord],
    predictions: list[tuple[str, str]],
    tolerance: float = 1e-4,
) -> ScoreReport:
    """Verdict per record: does the predicted template hit the answer?

    Invalid postorder sequences and evaluation failures count as wrong;
    records without a prediction count as missing.
    """
    by_id: dict[str, str] = {}
    known = {r.id for r in processed}
    for rid, post in predictions:
        rid = str(rid)
        if rid not in known:
            raise ValueError(f"prediction for unknown record id {rid!r}")
        if rid in by_id:
            raise ValueError(f"duplicate prediction for record id {rid!r}")
        by_id[rid] = post

    rows: list[dict] = []
    breakdown = {"invalid": 0, "wrong_value": 0, "eval_error": 0, "missing": 0}
    correct = 0
    for record in processed:
        expected = record.ans
        row = {"id": record.id, "verdict": "", "value": None, "expected": expected}
        post = by_id.get(record.id)
        if post is None:
            row["verdict"] = "missing"
        else:
            tree = parse_postorder(post)
            if isinstance(tree, InvalidSequence):
                row["verdict"] = "invalid"
            else:
                try:
                    value = evaluate(tree, record.mapping.to_values())
                except EvaluationError:
                    row["verdict"] = "eval_error"
                else:
                    gold = parse_number(expected)
                    try:
                        row["value"] = (
                            format_number(value)
                            if not isinstance(value, float)
                            else repr(value)
                        )
                    except ValueError:  # too many digits to print
                        row["value"] = "overflow"
                    if gold is not None and check_answer(value, gold, tolerance):
                        row["verdict"] = "correct"
                        correct += 1
                    else:
                        row["verdict"] = "wrong_value"
        if row["verdict"] in breakdown:
            breakdown[row["verdict"]] += 1
        rows.append(row)
    return ScoreReport(rows, len(processed), correct, breakdown, tolerance)


# ---------------------------------------------------------------------------
# file plumbing


def _dumps(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_processed(path: str | Path, records: list[ProcessedRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(_dumps(record.to_json_obj()) + "\n")


def read_processed(path: str | Path) -> list[ProcessedRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(ProcessedRecord.from_json_obj(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ValueError(f"{path}: line {line_no}: {exc}") from None
    return out


def read_predictions(path: str | Path) -> list[tuple[str, str]]:
    """Prediction rows; "postorder" preferred, "tokens" accepted."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            post = obj.get("postorder", obj.get("tokens"))
            if "id" not in obj or not isinstance(post, str):
                raise ValueError(
                    f"{path}: line {line_no}: need id and postorder/tokens fields"
                )
            out.append((str(obj["id"]), post))
    return out


def write_score_report(path_or_fh, report: ScoreReport) -> None:
    def emit(fh) -> None:
        for row in report.rows:
            fh.write(_dumps(row) + "\n")
        fh.write(_dumps({"summary": report.summary()}) + "\n")

    if hasattr(path_or_fh, "write"):
        emit(path_or_fh)
    else:
        with open(path_or_fh, "w", encoding="utf-8", newline="\n") as fh:
            emit(fh)


def write_raw_records(path: str | Path, records: list[RawRecord]) -> None:
    """Write records back out in the dataset's array shape."""
    objs = [
        {
            "id": r.id,
            "original_text": r.original_text,
            "segmented_text": r.segmented_text,
            "equation": r.equation,
            "ans": r.ans,
        }
        for r in records
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(objs, fh, ensure_ascii=False, indent=1)
        fh.write("\n")


def write_stats(path_or_fh, stats: CorpusStats, extra: dict | None = None) -> None:
    payload = stats.to_dict()
    if extra:
        payload["run"] = extra
    text = json.dumps(payload, ensure_ascii=False, indent=2) + "\n"
    if hasattr(path_or_fh, "write"):
        path_or_fh.write(text)
    else:
        Path(path_or_fh).write_text(text, encoding="utf-8")

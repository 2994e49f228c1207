"""Acceptance suite: one test per release criterion, each printing a
single [PASS]/[FAIL] line (run with ``pytest tests/test_acceptance.py -s``).

Each criterion carries its time budget and tolerance inline; nothing is
deferred to later calibration.
"""

import json
import math
import os
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import pytest

from mwpnorm.cli import main as cli_main
from mwpnorm.dataset import load_math23k, preprocess
from mwpnorm.ensemble import Candidate, EnsembleConfig, select
from mwpnorm.evaluate import EvaluationError, evaluate, evaluate_postorder
from mwpnorm.expr import (
    InvalidSequence,
    parse_infix,
    parse_postorder,
    postorder_string,
    to_infix,
    to_postorder,
)
from mwpnorm.mapping import build_template, extract_numbers
from mwpnorm.normalize import NormalizeConfig, equivalent_by_oracle, normalize
from treegen import (
    permute_signed,
    tail_bracketed,
    build_left_leaning,
    random_bracketing,
    random_evaluable_tree,
    random_signed_terms,
    random_tree,
)

FIXTURE = Path(__file__).parent.parent / "data" / "math23k_sample50.json"
ALL_CFGS = [
    NormalizeConfig(se=se, oe=oe, eb=eb)
    for se in (False, True)
    for oe in (False, True)
    for eb in (False, True)
]


@contextmanager
def criterion(name: str, budget_seconds: float):
    start = time.monotonic()
    try:
        yield
    except Exception:
        print(f"[FAIL] {name}")
        raise
    elapsed = time.monotonic() - start
    if elapsed > budget_seconds:
        print(f"[FAIL] {name} (took {elapsed:.2f}s, budget {budget_seconds}s)")
        raise AssertionError(f"{name}: {elapsed:.2f}s over budget {budget_seconds}s")
    print(f"[PASS] {name} ({elapsed:.2f}s, budget {budget_seconds}s)")


def test_worked_examples():
    with criterion("worked examples", budget_seconds=1.0):
        # number mapping and template for the running problem
        text = (
            "Dan has 5 pens and 3 pencils , Jessica has 4 more pens and 2 "
            "less pencils than him . How many pens and pencils does Jessica "
            "have in total ?"
        )
        rec = build_template("x = 5+4+3-2", extract_numbers(text.split()))
        assert to_infix(rec.template) == "n1+n3+n2-n4"
        assert [(e.index, e.number.value) for e in rec.mapping.entries] == [
            (1, 5), (2, 3), (3, 4), (4, 2),
        ]

        # cancellation of a redundant complementary pair
        assert to_infix(normalize(parse_infix("n1+n2+n3+n3-n3"))) == "n1+n2+n3"

        # all order variants collapse to the mapping order
        for variant in ("n1+n3+n2", "n1+n2+n3", "n3+n1+n2"):
            assert to_infix(normalize(parse_infix(variant))) == "n1+n2+n3"

        # bracket variants are the same normalized tree
        assert normalize(parse_infix("n1+(n3-n2)")) == normalize(parse_infix("n1+n3-n2"))

        # solution of the running problem
        values = {1: Fraction(5), 2: Fraction(3), 3: Fraction(4), 4: Fraction(2)}
        assert evaluate(rec.template, values) == 10

        # model-output sequences: one valid, one structurally broken
        assert not isinstance(parse_postorder("n1 n2 / n3 -"), InvalidSequence)
        assert isinstance(parse_postorder("n2 n1 n3 n3 +"), InvalidSequence)

        # round-trip answer for the correct long template, via both routes
        seq = "n1 n2 * n3 * n2 n3 + /"
        vals = {1: Fraction(500), 2: Fraction(3), 3: Fraction(2)}
        assert evaluate(parse_postorder(seq), vals) == 600
        assert evaluate_postorder(seq, vals) == 600


def test_normalization_property_suite():
    with criterion("normalization properties (1000 trees)", budget_seconds=60.0):
        rng = random.Random(42)
        trees = [random_tree(rng, max_depth=6) for _ in range(1000)]
        for tree in trees:
            for cfg in ALL_CFGS:
                once = normalize(tree, cfg)
                assert normalize(once, cfg) == once

        rng = random.Random(43)
        for i in range(1000):
            tree = random_evaluable_tree(rng, max_depth=6)
            assert equivalent_by_oracle(tree, normalize(tree), trials=20, seed=i)

        rng = random.Random(44)
        for _ in range(500):
            terms = random_signed_terms(rng, rng.randint(2, 6))
            base = normalize(build_left_leaning(terms))
            only_positive = [(1, t) for _, t in terms]
            for _ in range(2):
                shuffled = only_positive[:]
                rng.shuffle(shuffled)
                assert normalize(build_left_leaning(shuffled)) == normalize(
                    build_left_leaning(only_positive)
                )
            for _ in range(2):
                assert normalize(random_bracketing(terms, rng)) == base


def test_roundtrip_fuzz():
    with criterion("round-trip fuzz (10^4 trees)", budget_seconds=30.0):
        rng = random.Random(1234)
        values = {k: Fraction(v) for k, v in zip(range(1, 7), (5, 3, 4, 2, 7, 9))}
        for _ in range(10_000):
            tree = random_tree(rng, max_depth=6)
            tokens = to_postorder(tree)
            assert parse_postorder(tokens) == tree
            assert parse_infix(to_infix(tree)) == tree
            try:
                via_tree = evaluate(tree, values)
            except EvaluationError:
                with pytest.raises(EvaluationError):
                    evaluate_postorder(tokens, values)
                continue
            via_stack = evaluate_postorder(tokens, values)
            if isinstance(via_tree, float) or isinstance(via_stack, float):
                assert via_stack == pytest.approx(via_tree)
            else:
                assert via_stack == via_tree


def test_dedup_direction():
    with criterion("dedup on synthetic variant corpus", budget_seconds=30.0):
        rng = random.Random(2024)
        bases: dict = {}
        while len(bases) < 100:
            terms = random_signed_terms(rng, rng.randint(3, 6))
            bases.setdefault(normalize(build_left_leaning(terms)), terms)
        corpus = []
        for terms in bases.values():
            corpus.append(build_left_leaning(terms))  # the base itself
            corpus.append(tail_bracketed(terms))  # guaranteed distinct raw form
            corpus.append(build_left_leaning(permute_signed(terms, rng)))
            corpus.append(random_bracketing(terms, rng))
            corpus.append(random_bracketing(permute_signed(terms, rng), rng))
        raw = {postorder_string(t) for t in corpus}
        normalized = {postorder_string(normalize(t)) for t in corpus}
        assert len(normalized) == 100  # equivalence classes by construction
        assert len(normalized) < len(raw)


def test_ensemble_equivalence():
    with criterion("ensemble matches brute force (500 groups)", budget_seconds=30.0):
        rng = random.Random(99)
        priority = ("model0", "model1", "model2", "model3", "model4")
        cfg = EnsembleConfig(priority=priority)
        for g in range(500):
            group = []
            for m in range(rng.randint(1, 5)):
                lps = [
                    math.log(rng.uniform(0.05, 1.0)) for _ in range(rng.randint(1, 7))
                ]
                group.append(
                    Candidate(f"p{g}", f"model{m}", " ".join(["n1"] * len(lps)),
                              sum(lps), tuple(lps))
                )
            (winner,) = select(group, cfg)
            brute = max(
                group,
                key=lambda c: (
                    math.prod(math.exp(t) for t in c.token_logprobs),
                    -priority.index(c.model_id),
                ),
            )
            assert winner.model_id == brute.model_id

            shifted = [
                Candidate(c.problem_id, c.model_id, c.tokens, c.total_logprob - 7.25)
                for c in group
            ]
            (shifted_winner,) = select(shifted, cfg)
            assert shifted_winner.model_id == winner.model_id


def test_pipeline_on_fixture(tmp_path, capsys):
    with criterion("fixture pipeline determinism + coverage", budget_seconds=60.0):
        records, report = load_math23k(FIXTURE)
        assert len(records) == 50 and report == []
        _, stats = preprocess(records)
        assert stats.coverage_rate >= 0.95

        outputs = []
        for run_id, workers in (("a", 1), ("b", 1), ("c", 2)):
            out = tmp_path / f"proc_{run_id}.jsonl"
            stats_file = tmp_path / f"stats_{run_id}.json"
            code = cli_main(
                ["preprocess", "--in", str(FIXTURE), "--out", str(out),
                 "--stats", str(stats_file), "--workers", str(workers)]
            )
            capsys.readouterr()
            assert code == 0
            outputs.append((out.read_bytes(), stats_file.read_bytes()))
        assert outputs[0] == outputs[1] == outputs[2]


def test_real_dataset_if_supplied(capsys):
    path = os.environ.get("MWPNORM_MATH23K", "")
    if not path or not Path(path).exists():
        pytest.skip("real dataset not supplied; set MWPNORM_MATH23K to run")
    with criterion("real dataset ingestion", budget_seconds=600.0):
        records, report = load_math23k(path, lenient=True)
        total = len(records) + len(report)
        assert len(records) / total >= 0.99
        _, stats = preprocess(records)
        print(
            f"  real dataset: {stats.processed}/{stats.records} processed, "
            f"coverage {stats.coverage_rate:.1%}, "
            f"templates {stats.distinct_raw} raw / {stats.distinct_normalized} normalized"
        )

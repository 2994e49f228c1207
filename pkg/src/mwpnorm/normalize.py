"""Canonicalization of equation templates.

Three independently toggleable passes over the tree:

* cancellation (``se``)  — structurally identical terms with opposite signs
  annihilate, as do identical numerator/denominator factor pairs.
* ordering (``oe``)      — within a +/- chain, positive terms come first and
  each sign class sorts by canonical key; within a */ chain, numerator
  factors precede denominator factors, likewise sorted.
* debracketing (``eb``)  — chains re-associate into a left-leaning shape so
  the infix rendering needs no parentheses.

With all passes on the result is a canonical form: two templates that
differ only by operand order, redundant complementary terms, or
bracketing map to the identical tree. There is no constant folding and no
algebra beyond the above; ``^`` subtrees are normalized internally but are
never merged into surrounding chains.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .evaluate import EvaluationError, evaluate
from .expr import Constant, Expr, Op, postorder_string, token_indices

SUM_OPS = "+-"
PRODUCT_OPS = "*/"


@dataclass(frozen=True)
class NormalizeConfig:
    """Which passes run. All eight combinations are valid."""

    se: bool = True
    oe: bool = True
    eb: bool = True


ALL_ON = NormalizeConfig()


def canonical_key(tree: Expr) -> tuple[float, str]:
    """Total order used to sort chain operands.

    Primary: smallest number-token index in the subtree (+inf when the
    subtree is constant-only), i.e. "closest to the front of the problem
    text wins". Tie-break: the postorder rendering, lexicographically.
    """
    indices = token_indices(tree)
    first = min(indices) if indices else math.inf
    return (first, postorder_string(tree))


# ---------------------------------------------------------------------------
# chain plumbing


def _copy_chain_normalized(node: Expr, ops: str, cfg: NormalizeConfig) -> Expr:
    """Preserve the chain skeleton, normalize everything hanging off it."""
    if isinstance(node, Op) and node.op in ops:
        return Op(
            node.op,
            _copy_chain_normalized(node.left, ops, cfg),
            _copy_chain_normalized(node.right, ops, cfg),
        )
    return normalize(node, cfg)


def _split_sum(node: Expr, sign: int = 1) -> list[tuple[int, Expr]]:
    """Signed terms of a maximal +/- chain, left to right."""
    if isinstance(node, Op) and node.op in SUM_OPS:
        right_sign = sign if node.op == "+" else -sign
        return _split_sum(node.left, sign) + _split_sum(node.right, right_sign)
    return [(sign, node)]


def _split_product(node: Expr, numerator: bool = True) -> list[tuple[bool, Expr]]:
    """Factors of a maximal */ chain, tagged numerator/denominator."""
    if isinstance(node, Op) and node.op in PRODUCT_OPS:
        right_side = numerator if node.op == "*" else not numerator
        return _split_product(node.left, numerator) + _split_product(
            node.right, right_side
        )
    return [(numerator, node)]


def _cancel(items: list[tuple[int, Expr]]) -> list[tuple[int, Expr]]:
    """Drop complementary pairs; later occurrences cancel first.

    ``items`` carries +1/-1 flags (term signs, or numerator/denominator
    encoded as +1/-1). For each distinct subtree, min(#plus, #minus) pairs
    are removed.
    """
    plus: dict[Expr, int] = {}
    minus: dict[Expr, int] = {}
    for flag, tree in items:
        bucket = plus if flag > 0 else minus
        bucket[tree] = bucket.get(tree, 0) + 1
    quota = {
        tree: min(plus.get(tree, 0), minus.get(tree, 0))
        for tree in plus.keys() | minus.keys()
    }
    remaining = {(tree, s): quota[tree] for tree in quota for s in (1, -1)}
    kept: list[tuple[int, Expr]] = []
    for flag, tree in reversed(items):
        if remaining.get((tree, flag), 0) > 0:
            remaining[(tree, flag)] -= 1
        else:
            kept.append((flag, tree))
    kept.reverse()
    return kept


def _order(items: list[tuple[int, Expr]]) -> list[tuple[int, Expr]]:
    """Plus/numerator first, then canonical key within each class; stable.

    Sorting applies even when cancellation left no +1 entry: the rebuild
    will prepend an identity head there, and a second pass must see an
    already-sorted tail or idempotence breaks.
    """
    return sorted(items, key=lambda it: (0 if it[0] > 0 else 1, canonical_key(it[1])))


def _rebuild_sum(terms: list[tuple[int, Expr]]) -> Expr:
    if not terms:
        return Constant(Fraction(0))
    if terms[0][0] > 0:
        acc = terms[0][1]
        rest = terms[1:]
    else:
        acc = Constant(Fraction(0))
        rest = terms
    for sign, tree in rest:
        acc = Op("+" if sign > 0 else "-", acc, tree)
    return acc


def _rebuild_product(factors: list[tuple[int, Expr]]) -> Expr:
    if not factors:
        return Constant(Fraction(1))
    if factors[0][0] > 0:
        acc = factors[0][1]
        rest = factors[1:]
    else:
        acc = Constant(Fraction(1))
        rest = factors
    for flag, tree in rest:
        acc = Op("*" if flag > 0 else "/", acc, tree)
    return acc


def _reassociate(node: Expr, chain_op: str, ops: str) -> Expr:
    """Token-preserving left rotation: x+(y-z) -> (x+y)-z, x*(y/z) -> (x*y)/z.

    Only the fully associative head operator rotates; x-(y-z) and x/(y*z)
    would need sign redistribution and are left alone.
    """

    def rot(op: str, left: Expr, right: Expr) -> Expr:
        if op == chain_op and isinstance(right, Op) and right.op in ops:
            return rot(right.op, rot(op, left, right.left), right.right)
        return Op(op, left, right)

    if isinstance(node, Op) and node.op in ops:
        return rot(node.op, _reassociate(node.left, chain_op, ops),
                   _reassociate(node.right, chain_op, ops))
    return node


def _normalize_chain(node: Op, cfg: NormalizeConfig, ops: str) -> Expr:
    node = _copy_chain_normalized(node, ops, cfg)
    items = _split_sum(node) if ops == SUM_OPS else [
        (1 if num else -1, tree) for num, tree in _split_product(node)
    ]
    cancelled = False
    if cfg.se:
        kept = _cancel(items)
        cancelled = len(kept) != len(items)
        items = kept
    if cfg.oe:
        items = _order(items)
    if cfg.oe or cancelled:
        return _rebuild_sum(items) if ops == SUM_OPS else _rebuild_product(items)
    if cfg.eb:
        chain_op = "+" if ops == SUM_OPS else "*"
        return _reassociate(node, chain_op, ops)
    return node


def _normalize_pass(tree: Expr, cfg: NormalizeConfig) -> Expr:
    if not isinstance(tree, Op):
        return tree
    if tree.op in SUM_OPS:
        return _normalize_chain(tree, cfg, SUM_OPS)
    if tree.op in PRODUCT_OPS:
        return _normalize_chain(tree, cfg, PRODUCT_OPS)
    return Op(tree.op, normalize(tree.left, cfg), normalize(tree.right, cfg))


@lru_cache(maxsize=1 << 15)
def _normalize_fixpoint(tree: Expr, cfg: NormalizeConfig) -> Expr:
    out = _normalize_pass(tree, cfg)
    # each extra round only ever fires on a fresh cancellation, which
    # strictly shrinks the tree, so this terminates quickly
    for _ in range(len(postorder_string(tree).split()) + 2):
        again = _normalize_pass(out, cfg)
        if again == out:
            return out
        out = again
    raise RuntimeError(f"normalization did not converge for {postorder_string(tree)}")


def normalize(tree: Expr, cfg: NormalizeConfig = ALL_ON) -> Expr:
    """Canonicalize a template tree under the configured passes.

    Total and idempotent for every configuration; with everything enabled
    the output is the canonical form whose value agrees with the input
    wherever no cancelled denominator is zero.

    The pass runs to a fixpoint: a rebuild can prepend an identity head
    (0-... or 1/...) that itself cancels against a genuine identical
    factor on the next pass, and idempotence requires settling that.
    Results are memoized; templates repeat heavily across a corpus.
    """
    return _normalize_fixpoint(tree, cfg)


# ---------------------------------------------------------------------------
# randomized equivalence oracle

# nonzero, pairwise distinct, denominators chosen so collisions of distinct
# templates are unlikely while arithmetic stays small
ORACLE_POOL = tuple(
    Fraction(p, q)
    for p, q in [
        (2, 1), (3, 1), (5, 1), (7, 1), (11, 1), (13, 1),
        (1, 2), (3, 2), (5, 2), (2, 3), (4, 3), (7, 3),
        (3, 4), (5, 4), ((-2), 1), ((-3), 2),
    ]
)

MAX_REDRAWS = 10


class OracleExhaustedError(RuntimeError):
    """Every trial had to be skipped; no evidence either way."""


def equivalent_by_oracle(
    a: Expr,
    b: Expr,
    trials: int = 20,
    seed: int = 0,
    pool: tuple[Fraction, ...] = ORACLE_POOL,
) -> bool:
    """Test whether two templates denote the same function.

    Each trial draws an independent value for every number token from the
    pool (deterministic given the seed) and compares exact evaluations. A
    trial where either side fails to evaluate exactly (division by zero,
    oversized or fractional exponent) is redrawn up to MAX_REDRAWS times,
    then skipped. False as soon as any completed trial disagrees.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    indices = sorted(token_indices(a) | token_indices(b))
    rng = random.Random(seed)
    completed = 0
    for _ in range(trials):
        for _attempt in range(1 + MAX_REDRAWS):
            values = {k: pool[rng.randrange(len(pool))] for k in indices}
            try:
                left = evaluate(a, values)
                right = evaluate(b, values)
            except EvaluationError:
                continue
            if isinstance(left, float) or isinstance(right, float):
                continue  # inexact power; not usable as exact evidence
            completed += 1
            if left != right:
                return False
            break
    if completed == 0:
        raise OracleExhaustedError(
            f"all {trials} trials skipped; templates cannot be evaluated exactly"
        )
    return True

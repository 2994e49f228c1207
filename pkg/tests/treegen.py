"""Seeded random tree generators shared by the fuzz/property tests."""

from __future__ import annotations

import random
from fractions import Fraction

from mwpnorm.expr import Constant, Expr, NumberToken, Op

DEFAULT_TOKENS = (1, 2, 3, 4, 5, 6)
DEFAULT_CONSTANTS = (Fraction(1), Fraction(2))
# ^ is rare in real equations; keep it rare here so exact evaluation
# remains possible for most assignments
DEFAULT_OPS = "+-*/+-*/^"


def random_tree(
    rng: random.Random,
    max_depth: int = 6,
    tokens: tuple[int, ...] = DEFAULT_TOKENS,
    constants: tuple[Fraction, ...] = DEFAULT_CONSTANTS,
    ops: str = DEFAULT_OPS,
    tame_powers: bool = False,
) -> Expr:
    """Random template tree.

    tame_powers restricts every ^ to a small constant exponent so exact
    evaluation stays possible; use it for oracle-driven suites.
    """
    if max_depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.25:
            return Constant(rng.choice(constants))
        return NumberToken(rng.choice(tokens))
    op = rng.choice(ops)
    left = random_tree(rng, max_depth - 1, tokens, constants, ops, tame_powers)
    if op == "^" and tame_powers:
        return Op(op, left, Constant(Fraction(rng.choice((2, 3)))))
    right = random_tree(rng, max_depth - 1, tokens, constants, ops, tame_powers)
    return Op(op, left, right)


def random_evaluable_tree(
    rng: random.Random, max_depth: int = 6, probes: int = 5
) -> Expr:
    """Random tree rejected unless some pool assignment evaluates exactly.

    Filters out identically singular shapes (denominators like n1-n1 that
    are zero under every assignment) so oracle-driven properties can
    demand a verdict for every tree.
    """
    from mwpnorm.evaluate import EvaluationError, evaluate
    from mwpnorm.expr import token_indices
    from mwpnorm.normalize import ORACLE_POOL

    while True:
        tree = random_tree(rng, max_depth=max_depth, tame_powers=True)
        indices = sorted(token_indices(tree))
        for _ in range(probes):
            values = {k: ORACLE_POOL[rng.randrange(len(ORACLE_POOL))] for k in indices}
            try:
                if not isinstance(evaluate(tree, values), float):
                    return tree
            except EvaluationError:
                continue


def random_leaf(rng: random.Random, tokens=DEFAULT_TOKENS) -> Expr:
    if rng.random() < 0.2:
        return Constant(rng.choice(DEFAULT_CONSTANTS))
    return NumberToken(rng.choice(tokens))


def random_signed_terms(
    rng: random.Random, length: int, distinct: bool = True
) -> list[tuple[int, Expr]]:
    """Signed term list for a +/- chain; head sign is always +."""
    pool = list(DEFAULT_TOKENS)
    rng.shuffle(pool)
    terms = []
    for i in range(length):
        if distinct and i < len(pool):
            leaf: Expr = NumberToken(pool[i])
        else:
            leaf = random_leaf(rng)
        sign = 1 if i == 0 else rng.choice((1, -1))
        terms.append((sign, leaf))
    return terms


def build_left_leaning(terms: list[tuple[int, Expr]]) -> Expr:
    assert terms and terms[0][0] == 1
    acc = terms[0][1]
    for sign, tree in terms[1:]:
        acc = Op("+" if sign > 0 else "-", acc, tree)
    return acc


def random_bracketing(terms: list[tuple[int, Expr]], rng: random.Random) -> Expr:
    """A random binary association realizing the same signed term sequence.

    Splitting [t_1..t_n] at k either joins with '+' (right part keeps its
    signs, so it must start positive) or with '-' (right part's signs all
    flip, so it must start negative).
    """
    assert terms[0][0] == 1
    if len(terms) == 1:
        return terms[0][1]
    k = rng.randrange(1, len(terms))
    left = random_bracketing(terms[:k], rng)
    rest = terms[k:]
    if rest[0][0] == 1:
        return Op("+", left, random_bracketing(rest, rng))
    flipped = [(-s, t) for s, t in rest]
    return Op("-", left, random_bracketing(flipped, rng))


def permute_signed(
    terms: list[tuple[int, Expr]], rng: random.Random
) -> list[tuple[int, Expr]]:
    """Shuffle a signed term list, rotating a positive term to the head."""
    out = terms[:]
    rng.shuffle(out)
    for i, (sign, _) in enumerate(out):
        if sign == 1:
            out[0], out[i] = out[i], out[0]
            break
    return out


def tail_bracketed(terms: list[tuple[int, Expr]]) -> Expr:
    """((t1 ± ... ± t_{n-2}) ± (t_{n-1} ∘ t_n)): always differs structurally
    from the left-leaning build for n >= 3."""
    assert len(terms) >= 3 and terms[0][0] == 1
    head = build_left_leaning(terms[:-2])
    (sa, a), (sb, b) = terms[-2], terms[-1]
    if sa == 1:
        return Op("+", head, Op("+" if sb == 1 else "-", a, b))
    return Op("-", head, Op("+" if sb == -1 else "-", a, b))


def build_product(factors: list[Expr]) -> Expr:
    acc = factors[0]
    for f in factors[1:]:
        acc = Op("*", acc, f)
    return acc

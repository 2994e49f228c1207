"""Exact evaluation of templates and answer checking.

Arithmetic is rational throughout; only a power with a non-integer
exponent degrades to float, and the float type itself is the inexactness
flag callers test for.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .expr import Constant, Expr, NumberToken, PRECEDENCE, token_index
from .rational import parse_number

# guards against pathological towers like 2^2^2^2^2 blowing up the session
MAX_EXPONENT = 10_000
MAX_RESULT_BITS = 12_000  # keeps exact powers printable and fast

Number = Fraction | float


class EvaluationError(ValueError):
    """Template cannot be evaluated under the given values."""


def _power(base: Number, exponent: Number) -> Number:
    if isinstance(exponent, Fraction) and exponent.denominator == 1:
        exp = exponent.numerator
        if abs(exp) > MAX_EXPONENT:
            raise EvaluationError(
                f"exponent of {exp.bit_length()} bits exceeds limit {MAX_EXPONENT}"
            )
        if base == 0 and exp < 0:
            raise EvaluationError("zero raised to a negative power")
        if isinstance(base, Fraction):
            bits = max(base.numerator.bit_length(), base.denominator.bit_length())
            if bits * abs(exp) > MAX_RESULT_BITS:
                raise EvaluationError("power result too large")
        return base**exp
    # non-integer exponent: approximate, flagged by the float type
    try:
        result = float(base) ** float(exponent)
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise EvaluationError(f"power failed: {exc}") from exc
    if isinstance(result, complex):
        raise EvaluationError("power of a negative base is not real")
    return result


def _apply(op: str, left: Number, right: Number) -> Number:
    try:
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if right == 0:
                raise EvaluationError("division by zero")
            return left / right
        return _power(left, right)
    except OverflowError as exc:
        # a huge exact value met a float and could not be coerced
        raise EvaluationError(f"value too large for approximate arithmetic: {exc}") from exc


def evaluate(tree: Expr, values: Mapping[int, Fraction]) -> Number:
    """Evaluate a tree with number tokens bound to exact values.

    Returns a Fraction unless a non-integer exponent forced a float.
    Raises EvaluationError on division by zero, an unbound token, zero to
    a negative power, or an oversized exponent.
    """
    if isinstance(tree, Constant):
        return tree.value
    if isinstance(tree, NumberToken):
        try:
            return values[tree.index]
        except KeyError:
            raise EvaluationError(f"unbound number token n{tree.index}") from None
    return _apply(tree.op, evaluate(tree.left, values), evaluate(tree.right, values))


def evaluate_postorder(
    tokens: list[str] | str, values: Mapping[int, Fraction]
) -> Number:
    """Stack-machine evaluation of a postorder sequence.

    Deliberately independent of parse_postorder/evaluate so the two routes
    can check each other. Raises EvaluationError for malformed sequences.
    """
    if isinstance(tokens, str):
        tokens = tokens.split()
    stack: list[Number] = []
    for token in tokens:
        if token in PRECEDENCE:
            if len(stack) < 2:
                raise EvaluationError(f"operator {token!r} underflows the stack")
            right = stack.pop()
            left = stack.pop()
            stack.append(_apply(token, left, right))
        else:
            index = token_index(token)
            if index is not None:
                if index not in values:
                    raise EvaluationError(f"unbound number token n{index}")
                stack.append(values[index])
                continue
            value = parse_number(token)
            if value is None:
                raise EvaluationError(f"bad token {token!r}")
            stack.append(value)
    if len(stack) != 1:
        raise EvaluationError("sequence leaves leftover operands")
    return stack[0]


def check_answer(predicted: Number, gold: Number, tolerance: float = 1e-4) -> bool:
    """Relative-band comparison: |p - g| <= tolerance * max(1, |g|)."""
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    return abs(predicted - gold) <= tolerance * max(1, abs(gold))


def parse_answer(text: str) -> Fraction:
    """Parse a gold answer string; same lexicon as number extraction."""
    value = parse_number(text)
    if value is None:
        raise EvaluationError(f"unparseable answer {text!r}")
    return value

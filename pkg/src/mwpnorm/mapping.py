"""Number extraction and template construction.

Stage one of the pipeline: pull the numbers out of the problem text in
reading order, match them against the literals of the gold equation, and
rewrite the equation into a template over n-tokens. A text number is
significant exactly when the equation consumed it; insignificant numbers
are dropped and the surviving ones re-indexed 1..m in text order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expr import Constant, Expr, NumberToken, Op, parse_infix, token_indices
from .rational import parse_number


@dataclass(frozen=True)
class ExtractedNumber:
    """A number found in the problem text."""

    position: int  # token offset in the segmented text, 0-based
    value: Fraction
    surface: str


@dataclass(frozen=True)
class MappingEntry:
    index: int  # 1-based n-token index
    number: ExtractedNumber


@dataclass(frozen=True)
class NumberMapping:
    """Ordered association n_k -> extracted number, k = 1..m in text order."""

    entries: tuple[MappingEntry, ...]

    def __post_init__(self):
        for k, entry in enumerate(self.entries, start=1):
            if entry.index != k:
                raise ValueError(f"mapping indices must be 1..m, got {entry.index} at slot {k}")
        positions = [e.number.position for e in self.entries]
        if positions != sorted(positions) or len(set(positions)) != len(positions):
            raise ValueError("mapping entries must be in strictly increasing text order")

    def __len__(self) -> int:
        return len(self.entries)

    def to_values(self) -> dict[int, Fraction]:
        return {e.index: e.number.value for e in self.entries}


@dataclass(frozen=True)
class TemplateRecord:
    """A gold equation rewritten over the significant-number mapping."""

    problem_id: str
    mapping: NumberMapping
    template: Expr
    significant: tuple[bool, ...]  # one flag per extracted number
    coverage: bool  # every equation literal found a text number

    def __post_init__(self):
        bound = {e.index for e in self.mapping.entries}
        unbound = token_indices(self.template) - bound
        if unbound:
            raise ValueError(f"template references unmapped tokens {sorted(unbound)}")


def extract_numbers(text_tokens: list[str]) -> list[ExtractedNumber]:
    """Numbers appearing as whole tokens, left to right.

    Integers, decimals, percents and single-token fractions all count;
    anything else is skipped.
    """
    out = []
    for position, token in enumerate(text_tokens):
        value = parse_number(token)
        if value is not None:
            out.append(ExtractedNumber(position, value, token))
    return out


def significant_filter(
    numbers: list[ExtractedNumber], matched: list[bool]
) -> NumberMapping:
    """Keep the flagged numbers and re-index them 1..m in text order.

    Training passes the flags computed by build_template; inference passes
    all-true to keep every extracted number.
    """
    if len(numbers) != len(matched):
        raise ValueError("one flag per extracted number required")
    kept = [n for n, keep in zip(numbers, matched) if keep]
    kept.sort(key=lambda n: n.position)
    return NumberMapping(
        tuple(MappingEntry(k, n) for k, n in enumerate(kept, start=1))
    )


def build_template(
    equation: str, numbers: list[ExtractedNumber], problem_id: str = ""
) -> TemplateRecord:
    """Rewrite a gold equation into a template over n-tokens.

    Each literal, scanned left to right, binds to the earliest
    not-yet-consumed text number of equal exact value. Unmatched literals
    stay constants and clear the coverage flag. Zero literals never bind:
    the parser fabricates 0 when desugaring unary minus, so a zero in the
    tree is not evidence of a zero in the equation text.
    """
    tree = parse_infix(equation)
    if token_indices(tree):
        raise ValueError("equation already contains number tokens")

    consumed = [False] * len(numbers)
    matches: list[int | None] = []  # per constant leaf, traversal order

    def scan(node: Expr) -> None:
        if isinstance(node, Op):
            scan(node.left)
            scan(node.right)
            return
        if isinstance(node, Constant):
            match: int | None = None
            if node.value != 0:
                for j, number in enumerate(numbers):
                    if not consumed[j] and number.value == node.value:
                        consumed[j] = True
                        match = j
                        break
            matches.append(match)

    scan(tree)
    mapping = significant_filter(numbers, consumed)
    index_of = {
        entry.number.position: entry.index for entry in mapping.entries
    }
    coverage = all(
        match is not None or leaf.value == 0
        for match, leaf in zip(matches, _constant_leaves(tree))
    )

    cursor = iter(matches)

    def rewrite(node: Expr) -> Expr:
        if isinstance(node, Op):
            left = rewrite(node.left)
            right = rewrite(node.right)
            return Op(node.op, left, right)
        if isinstance(node, Constant):
            j = next(cursor)
            if j is not None:
                return NumberToken(index_of[numbers[j].position])
        return node

    template = rewrite(tree)
    return TemplateRecord(problem_id, mapping, template, tuple(consumed), coverage)


def _constant_leaves(tree: Expr) -> list[Constant]:
    if isinstance(tree, Constant):
        return [tree]
    if isinstance(tree, Op):
        return _constant_leaves(tree.left) + _constant_leaves(tree.right)
    return []


def instantiate(tree: Expr, values: dict[int, Fraction]) -> Expr:
    """Replace every number token with its concrete value as a constant."""
    if isinstance(tree, NumberToken):
        return Constant(values[tree.index])
    if isinstance(tree, Op):
        return Op(tree.op, instantiate(tree.left, values), instantiate(tree.right, values))
    return tree

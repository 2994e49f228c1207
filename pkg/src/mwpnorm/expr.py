"""Binary expression trees over number tokens and constants.

The tree is the canonical carrier for equation templates: inner nodes are
one of the five binary operators, leaves are either a positional number
token ("n1", "n2", ...) or an exact rational constant. Parenthesization
exists only in the infix surface syntax, never in the tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .rational import format_number, parse_number

OPERATORS = "+-*/^"

# binding strength; ^ is right-associative, the rest left-associative
PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}

_TOKEN_INDEX_RE = re.compile(r"^n([1-9]\d*)$")

# surface variants seen in the wild (full-width punctuation, unicode ops)
_CHAR_TRANSLATION = str.maketrans(
    {
        "×": "*",
        "÷": "/",
        "−": "-",
        "＋": "+",
        "（": "(",
        "）": ")",
        "＝": "=",
        "．": ".",
        "％": "%",
    }
)


def token_index(token: str) -> int | None:
    """The k in a well-formed "n<k>" token, else None."""
    m = _TOKEN_INDEX_RE.match(token)
    return int(m.group(1)) if m else None


class ParseError(ValueError):
    """Malformed infix input; carries the character offset of the fault."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class StrayUnknownError(ParseError):
    """The unknown appears somewhere other than a leading 'x ='."""


@dataclass(frozen=True)
class NumberToken:
    """Leaf referring to the k-th mapped number, 1-based."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"number token index must be >= 1, got {self.index}")

    def render(self) -> str:
        return f"n{self.index}"


@dataclass(frozen=True)
class Constant:
    """Leaf holding an exact rational literal."""

    value: Fraction

    def render(self) -> str:
        return format_number(self.value)


@dataclass(frozen=True)
class Op:
    """Inner node: binary operator with exactly two children."""

    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in PRECEDENCE:
            raise ValueError(f"unknown operator {self.op!r}")


Expr = Op | NumberToken | Constant


@dataclass(frozen=True)
class InvalidSequence:
    """Outcome of decoding a malformed postorder sequence.

    This is a value, not an error: model output is routinely malformed and
    scoring needs to count it rather than crash on it.
    """

    reason: str
    position: int | None = None


# ---------------------------------------------------------------------------
# infix parsing


def _lex(text: str) -> list[tuple[str, str, int]]:
    """Tokenize to (kind, value, position); kind in {num, ntok, op, lparen,
    rparen, eq, x}."""
    out: list[tuple[str, str, int]] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in OPERATORS:
            if c == "*" and i + 1 < n and text[i + 1] == "*":
                out.append(("op", "^", i))
                i += 2
            else:
                out.append(("op", c, i))
                i += 1
            continue
        if c == "(":
            out.append(("lparen", c, i))
            i += 1
            continue
        if c == ")":
            out.append(("rparen", c, i))
            i += 1
            continue
        if c == "=":
            out.append(("eq", c, i))
            i += 1
            continue
        if c == "x" or c == "X":
            out.append(("x", "x", i))
            i += 1
            continue
        if c == "n" and i + 1 < n and text[i + 1].isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            word = text[i:j]
            if _TOKEN_INDEX_RE.match(word) is None:
                raise ParseError(f"bad number token {word!r}", i)
            out.append(("ntok", word, i))
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] == "%":
                j += 1
            word = text[i:j]
            if parse_number(word) is None:
                raise ParseError(f"bad numeric literal {word!r}", i)
            out.append(("num", word, i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    return out


def _strip_unknown(tokens: list[tuple[str, str, int]]) -> list[tuple[str, str, int]]:
    """Drop an optional leading 'x ='; reject 'x' anywhere else."""
    if len(tokens) >= 2 and tokens[0][0] == "x" and tokens[1][0] == "eq":
        tokens = tokens[2:]
    for kind, _, pos in tokens:
        if kind == "x":
            raise StrayUnknownError("unknown 'x' allowed only as leading 'x ='", pos)
        if kind == "eq":
            raise ParseError("unexpected '='", pos)
    return tokens


def parse_infix(text: str) -> Expr:
    """Parse an infix expression to a tree.

    Standard precedence (^ over * / over + -), left associativity except
    for ^, parentheses override. A leading "x =" is stripped. Unary minus
    parses as (0 - operand) so the tree stays strictly binary.
    """
    tokens = _strip_unknown(_lex(text.translate(_CHAR_TRANSLATION)))
    if not tokens:
        raise ParseError("empty expression", 0)

    # "neg" is prefix minus, desugared to (0 - x); it binds tighter than
    # * / and looser than ^, matching the usual convention (-2^2 == -(2^2),
    # a*-b == a*(-b)).
    binding = dict(PRECEDENCE, neg=2.5)

    operands: list[Expr] = []
    ops: list[tuple[str, int]] = []  # operator, "neg", or "(" with position

    def reduce_once(pos: int) -> None:
        op, op_pos = ops.pop()
        if op == "(":
            raise ParseError("unbalanced '('", op_pos)
        if op == "neg":
            if not operands:
                raise ParseError("unary '-' lacks operand", op_pos)
            operands.append(Op("-", Constant(Fraction(0)), operands.pop()))
            return
        if len(operands) < 2:
            raise ParseError(f"operator {op!r} lacks operands", op_pos)
        right = operands.pop()
        left = operands.pop()
        operands.append(Op(op, left, right))

    def should_reduce(incoming: str) -> bool:
        if not ops or ops[-1][0] == "(":
            return False
        top = ops[-1][0]
        if incoming == "^":
            return binding[top] > binding[incoming]  # right-assoc
        return binding[top] >= binding[incoming]

    expect_operand = True
    last_pos = 0
    for kind, value, pos in tokens:
        last_pos = pos
        if kind == "num":
            if not expect_operand:
                raise ParseError("expected operator", pos)
            operands.append(Constant(parse_number(value)))
            expect_operand = False
        elif kind == "ntok":
            if not expect_operand:
                raise ParseError("expected operator", pos)
            operands.append(NumberToken(int(value[1:])))
            expect_operand = False
        elif kind == "lparen":
            if not expect_operand:
                raise ParseError("expected operator before '('", pos)
            ops.append(("(", pos))
        elif kind == "rparen":
            if expect_operand:
                raise ParseError("expected operand before ')'", pos)
            while ops and ops[-1][0] != "(":
                reduce_once(pos)
            if not ops:
                raise ParseError("unbalanced ')'", pos)
            ops.pop()
        else:  # operator
            if expect_operand:
                if value == "-":  # prefix minus; no reduction, it's a prefix
                    ops.append(("neg", pos))
                    continue
                raise ParseError(f"operator {value!r} lacks left operand", pos)
            while should_reduce(value):
                reduce_once(pos)
            ops.append((value, pos))
            expect_operand = True

    if expect_operand:
        raise ParseError("dangling operator", last_pos)
    while ops:
        reduce_once(last_pos)
    if len(operands) != 1:
        raise ParseError("malformed expression", last_pos)
    return operands[0]


# ---------------------------------------------------------------------------
# postorder codec


def to_postorder(tree: Expr) -> list[str]:
    """Serialize left subtree, right subtree, then operator."""
    out: list[str] = []

    def walk(node: Expr) -> None:
        if isinstance(node, Op):
            walk(node.left)
            walk(node.right)
            out.append(node.op)
        else:
            out.append(node.render())

    walk(tree)
    return out


def postorder_string(tree: Expr) -> str:
    return " ".join(to_postorder(tree))


def parse_postorder(tokens: list[str] | str) -> Expr | InvalidSequence:
    """Rebuild a tree from postorder tokens via a stack.

    Returns InvalidSequence (never raises) when the sequence is empty,
    underflows the stack, leaves more than one operand, or contains a
    token that is neither an operator, an n-token, nor a constant.
    """
    if isinstance(tokens, str):
        tokens = tokens.split()
    if not tokens:
        return InvalidSequence("empty")
    stack: list[Expr] = []
    for i, token in enumerate(tokens):
        if token in PRECEDENCE:
            if len(stack) < 2:
                return InvalidSequence("stack underflow", i)
            right = stack.pop()
            left = stack.pop()
            stack.append(Op(token, left, right))
        else:
            index = token_index(token)
            if index is not None:
                stack.append(NumberToken(index))
            else:
                value = parse_number(token)
                if value is None:
                    return InvalidSequence("bad token", i)
                stack.append(Constant(value))
    if len(stack) != 1:
        return InvalidSequence("leftover operands", len(tokens) - 1)
    return stack[0]


# ---------------------------------------------------------------------------
# infix rendering


def to_infix(tree: Expr) -> str:
    """Render with minimal parentheses; parse_infix(to_infix(t)) == t."""

    def needs_parens(child: Expr, parent: Op, right_side: bool) -> bool:
        if not isinstance(child, Op):
            return False
        pc, pp = PRECEDENCE[child.op], PRECEDENCE[parent.op]
        if pc < pp:
            return True
        if pc > pp:
            return False
        # equal precedence: association direction decides
        if parent.op == "^":
            return not right_side
        return right_side

    def walk(node: Expr) -> str:
        if not isinstance(node, Op):
            return node.render()
        left = walk(node.left)
        right = walk(node.right)
        if needs_parens(node.left, node, right_side=False):
            left = f"({left})"
        if needs_parens(node.right, node, right_side=True):
            right = f"({right})"
        return f"{left}{node.op}{right}"

    return walk(tree)


def token_indices(tree: Expr) -> set[int]:
    """All number-token indices appearing in the tree."""
    if isinstance(tree, NumberToken):
        return {tree.index}
    if isinstance(tree, Op):
        return token_indices(tree.left) | token_indices(tree.right)
    return set()

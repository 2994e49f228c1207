"""Shared lexicon for exact numbers.

Everything that crosses a text boundary (problem tokens, equation literals,
answer strings, constant tokens in postorder sequences) goes through the two
functions here, so "0.5", "50%" and "1/2" all land on the same Fraction and
render back to a stable canonical surface form.
"""

from __future__ import annotations

import re
from fractions import Fraction

# int / decimal / fraction (optionally parenthesized), each with optional %
_NUMBER_RE = re.compile(
    r"""^
    (?P<sign>-)?
    (?:
        \(?(?P<fnum>\d+)/(?P<fden>\d+)\)?
      | (?P<dec>\d+\.\d+)
      | (?P<int>\d+)
    )
    (?P<pct>%)?
    $""",
    re.VERBOSE,
)


def parse_number(text: str) -> Fraction | None:
    """Parse a numeric surface form to an exact Fraction, or None.

    Accepts integers ("42"), decimals ("3.14"), percents ("50%", "12.5%"),
    and single-token fractions ("3/5", "(3/5)").
    """
    m = _NUMBER_RE.match(text.strip())
    if m is None:
        return None
    if m.group("fnum") is not None:
        den = int(m.group("fden"))
        if den == 0:
            return None
        value = Fraction(int(m.group("fnum")), den)
    elif m.group("dec") is not None:
        value = Fraction(m.group("dec"))
    else:
        value = Fraction(int(m.group("int")))
    if m.group("pct"):
        value /= 100
    if m.group("sign"):
        value = -value
    return value


def _pow_split(n: int, base: int) -> tuple[int, int]:
    """Return (k, rest) with n == base**k * rest and rest not divisible."""
    k = 0
    while n % base == 0:
        n //= base
        k += 1
    return k, n


def format_number(value: Fraction) -> str:
    """Render a Fraction canonically.

    Integers print bare, finite decimals print as decimals ("0.5"),
    everything else as "p/q". Round-trips through parse_number.
    """
    num, den = value.numerator, value.denominator
    if den == 1:
        return str(num)
    twos, rest = _pow_split(den, 2)
    fives, rest = _pow_split(rest, 5)
    if rest != 1:
        return f"{num}/{den}"
    digits = max(twos, fives)
    scaled = abs(num) * 10**digits // den
    text = str(scaled).rjust(digits + 1, "0")
    whole, frac = text[:-digits], text[-digits:]
    frac = frac.rstrip("0") or "0"
    sign = "-" if num < 0 else ""
    return f"{sign}{whole}.{frac}"

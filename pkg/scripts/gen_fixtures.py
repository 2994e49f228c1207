#!/usr/bin/env python3
"""Regenerate the bundled dataset fixtures (deterministic).

Writes data/math23k_sample50.json (pipeline fixture, mixed difficulty,
49/50 records with full template coverage) and data/math23k_sample100.json
(short templates over a small vocabulary, meant for overfitting a toy
model). Both files use the dataset's release shape: a JSON array of
{id, original_text, segmented_text, equation, ans}.
"""

from __future__ import annotations

import json
import random
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def fmt(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    scaled = value * 100
    if scaled.denominator == 1:
        # keep some answers in decimal form on purpose
        return str(float(value))
    return f"{value.numerator}/{value.denominator}"


def record(rid: int, text: str, equation: str, ans: Fraction) -> dict:
    return {
        "id": str(rid),
        "original_text": text.replace(" ,", ",").replace(" .", ".").replace(" ?", "?"),
        "segmented_text": text,
        "equation": equation,
        "ans": fmt(ans),
    }


def sample50() -> list[dict]:
    rng = random.Random(20240501)
    out = []
    rid = 1

    # classic add/subtract chain; annotators wrote the sum in varying order
    for _ in range(8):
        a, b, c, d = (rng.randint(2, 30) for _ in range(4))
        text = (
            f"Dan has {a} pens and {b} pencils , Jessica has {c} more pens "
            f"and {d} less pencils than him . How many pens and pencils does "
            f"Jessica have in total ?"
        )
        terms = [a, c, b]
        rng.shuffle(terms)
        if rng.random() < 0.4:  # some annotators bracket the tail sum
            eq = f"x={terms[0]}+({terms[1]}+{terms[2]})-{d}"
        else:
            eq = "x=" + "+".join(str(t) for t in terms) + f"-{d}"
        out.append(record(rid, text, eq, Fraction(a + c + b - d)))
        rid += 1

    # rate problems: a/b - c
    for _ in range(7):
        b = rng.randint(3, 20)
        c = rng.randint(5, 40)
        total = b * (c + rng.randint(2, 25))
        text = (
            f"Two groups produced {total} items in {b} days . The first group "
            f"made {c} each day . How many did the second group make each day ?"
        )
        out.append(record(rid, text, f"x={total}/{b}-{c}", Fraction(total, b) - c))
        rid += 1

    # unit price times quantity
    for _ in range(7):
        p = rng.randint(2, 15)
        q = rng.randint(3, 60)
        text = (
            f"One notebook costs {p} yuan . How much do {q} notebooks cost ?"
        )
        out.append(record(rid, text, f"x={p}*{q}", Fraction(p * q)))
        rid += 1

    # grouped purchase: (a+b)*c, sometimes written with the sum flipped
    for _ in range(6):
        a, b = rng.randint(2, 12), rng.randint(2, 12)
        c = rng.randint(3, 25)
        text = (
            f"A pen costs {a} yuan and a ruler costs {b} yuan . What do "
            f"{c} such sets cost ?"
        )
        eq = f"x=({a}+{b})*{c}" if rng.random() < 0.5 else f"x=({b}+{a})*{c}"
        out.append(record(rid, text, eq, Fraction((a + b) * c)))
        rid += 1

    # sharing: a*b/c with both factor orders in the wild
    for _ in range(6):
        a = rng.randint(4, 24)
        b = rng.randint(2, 9)
        c = rng.choice([2, 3, 4, 6])
        text = (
            f"There are {a} boxes with {b} cakes each , shared by {c} children . "
            f"How many cakes does each child get ?"
        )
        eq = f"x={a}*{b}/{c}" if rng.random() < 0.5 else f"x={b}*{a}/{c}"
        out.append(record(rid, text, eq, Fraction(a * b, c)))
        rid += 1

    # percentages: text says N%, equation uses the decimal form
    for _ in range(5):
        pct = rng.choice([20, 25, 40, 50, 75])
        base = rng.randint(40, 400)
        text = (
            f"A tank holds {base} liters . {pct}% of it is already full . "
            f"How many liters are inside ?"
        )
        out.append(
            record(rid, text, f"x={base}*{pct / 100}", Fraction(base * pct, 100))
        )
        rid += 1

    # decimals
    for _ in range(4):
        price = Fraction(rng.randint(5, 39), 2)  # k.5 prices
        n = rng.randint(2, 14)
        text = f"A kilogram of apples costs {float(price)} yuan . How much do {n} kilograms cost ?"
        out.append(record(rid, text, f"x={float(price)}*{n}", price * n))
        rid += 1

    # fractions as single text tokens; equation uses the decimal notation
    for _ in range(3):
        den = rng.choice([2, 4, 5])
        total = den * rng.randint(4, 30)
        text = (
            f"A rope is {total} meters long . (1/{den}) of it is cut off . "
            f"How many meters were cut ?"
        )
        decimal = {2: "0.5", 4: "0.25", 5: "0.2"}[den]
        out.append(record(rid, text, f"x={total}*{decimal}", Fraction(total, den)))
        rid += 1

    # a-b+c, written flat or with the bracketed difference
    for _ in range(3):
        a = rng.randint(30, 90)
        b = rng.randint(5, 25)
        c = rng.randint(5, 25)
        text = (
            f"A bus had {a} passengers . {b} got off and {c} got on at the stop . "
            f"How many passengers are on the bus now ?"
        )
        eq = f"x={a}-({b}-{c})" if rng.random() < 0.5 else f"x={a}-{b}+{c}"
        out.append(record(rid, text, eq, Fraction(a - b + c)))
        rid += 1

    # one deliberate coverage gap: equation reuses a literal the text has once
    a, b, c = 2, 7, 10
    text = (
        f"Stamp A costs {a} paise and stamp B costs {b} paise . Buying {c} of "
        f"each , how much more do the B stamps cost ?"
    )
    out.append(record(rid, text, f"x={b}*{c}-{a}*{c}", Fraction(b * c - a * c)))
    rid += 1

    return out


def sample100() -> list[dict]:
    rng = random.Random(20240502)
    nouns = ["apples", "books", "coins", "cards", "shells", "marbles", "stickers"]
    names = ["Li", "Wang", "Chen", "Zhao", "Amy", "Ben", "Mia", "Tom"]
    out = []
    for rid in range(1, 101):
        kind = rng.randrange(6)
        noun = rng.choice(nouns)
        who = rng.choice(names)
        a = rng.randint(2, 50)
        b = rng.randint(2, 50)
        c = rng.randint(2, 9)
        if kind == 0:
            text = f"{who} has {a} {noun} and finds {b} more . How many {noun} now ?"
            eq, ans = f"x={a}+{b}", Fraction(a + b)
        elif kind == 1:
            hi, lo = max(a, b), min(a, b)
            text = f"{who} had {hi} {noun} and gave away {lo} . How many are left ?"
            eq, ans = f"x={hi}-{lo}", Fraction(hi - lo)
        elif kind == 2:
            text = f"There are {a} bags with {c} {noun} each . How many {noun} in total ?"
            eq, ans = f"x={a}*{c}", Fraction(a * c)
        elif kind == 3:
            total = a * c
            text = f"{total} {noun} are shared by {c} children . How many does each get ?"
            eq, ans = f"x={total}/{c}", Fraction(a)
        elif kind == 4:
            text = (
                f"{who} picked {a} {noun} , then {b} more , then lost {c} . "
                f"How many {noun} remain ?"
            )
            eq, ans = f"x={a}+{b}-{c}", Fraction(a + b - c)
        else:
            text = f"A box holds {a} {noun} and a crate holds {b} . What do {c} of each hold ?"
            eq, ans = f"x=({a}+{b})*{c}", Fraction((a + b) * c)
        out.append(record(rid, text, eq, ans))
    return out


def main() -> None:
    data_dir = ROOT / "data"
    data_dir.mkdir(exist_ok=True)
    for name, records in [
        ("math23k_sample50.json", sample50()),
        ("math23k_sample100.json", sample100()),
    ]:
        path = data_dir / name
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(records, fh, ensure_ascii=False, indent=1)
            fh.write("\n")
        print(f"wrote {path} ({len(records)} records)")


if __name__ == "__main__":
    main()

"""Exact exponent-pair calculus with the A and B processes.

Pairs are stored as :class:`fractions.Fraction` values, so every
comparison below is exact. Words over ``{A, B}`` are applied to the seed
pairs and deduplicated by value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .errors import DenominatorVanishes

HALF = Fraction(1, 2)


@dataclass(frozen=True, order=True)
class ExponentPair:
    """An exponent pair ``(p, q)`` with the word that produced it.

    Ordering and equality use ``(p, q)`` only; ``derivation`` lists the
    seed name followed by the processes applied, innermost first.
    """

    p: Fraction
    q: Fraction
    derivation: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "q", Fraction(self.q))

    @property
    def admissible(self) -> bool:
        """Whether ``0 <= p <= 1/2 <= q <= 1`` holds."""
        return 0 <= self.p <= HALF <= self.q <= 1

    def word(self) -> str:
        """Human-readable derivation such as ``A B (trivial)``."""
        seed, *steps = self.derivation or ("?",)
        return " ".join(reversed(steps)) + (" " if steps else "") + f"({seed})"

    def __str__(self) -> str:
        return f"({self.p}, {self.q})"


TRIVIAL = ExponentPair(Fraction(0), Fraction(1), ("trivial",))
BOURGAIN = ExponentPair(Fraction(13, 84), Fraction(55, 84), ("bourgain",))
SEEDS = (TRIVIAL, BOURGAIN)


def a_process(pair: ExponentPair) -> ExponentPair:
    """Apply ``(k, h) -> (k/(2k+2), (k+h+1)/(2k+2))``."""
    k, h = pair.p, pair.q
    den = 2 * k + 2
    return ExponentPair(k / den, (k + h + 1) / den, pair.derivation + ("A",))


def b_process(pair: ExponentPair) -> ExponentPair:
    """Apply ``(k, h) -> (h - 1/2, k + 1/2)``; an involution."""
    return ExponentPair(pair.q - HALF, pair.p + HALF, pair.derivation + ("B",))


def generate(depth: int, seeds: Iterable[ExponentPair] = SEEDS) -> set[ExponentPair]:
    """Closure of ``seeds`` under words in A and B of length at most ``depth``.

    Pairs are deduplicated by value; the shortest derivation found first
    is kept.
    """
    if not 0 <= depth <= 12:
        raise ValueError("depth must lie in [0, 12]")
    found: dict[tuple[Fraction, Fraction], ExponentPair] = {}
    frontier = []
    for s in seeds:
        if (s.p, s.q) not in found:
            found[(s.p, s.q)] = s
            frontier.append(s)
    for _ in range(depth):
        nxt = []
        for pair in frontier:
            for image in (a_process(pair), b_process(pair)):
                key = (image.p, image.q)
                if key not in found:
                    found[key] = image
                    nxt.append(image)
        frontier = nxt
    return set(found.values())


@dataclass(frozen=True)
class LinearFractional:
    """Objective ``(n0 + n1 p + n2 q) / (d0 + d1 p + d2 q)`` with exact coefficients."""

    num: tuple[Fraction, Fraction, Fraction]
    den: tuple[Fraction, Fraction, Fraction]

    def __call__(self, p: Fraction, q: Fraction) -> Fraction:
        den = self.den[0] + self.den[1] * p + self.den[2] * q
        if den == 0:
            raise DenominatorVanishes(f"denominator vanishes at ({p}, {q})")
        return (self.num[0] + self.num[1] * p + self.num[2] * q) / den

    @classmethod
    def parse(cls, text: str) -> "LinearFractional":
        """Parse ``"38+33p-28q/58+48p-43q"`` (parentheses optional)."""
        parts = text.replace(" ", "").split("/")
        if len(parts) != 2:
            raise ValueError(f"expected 'numerator/denominator': {text!r}")
        return cls(_parse_linear(parts[0]), _parse_linear(parts[1]))

    def __str__(self) -> str:
        return f"{_format_linear(self.num)}/{_format_linear(self.den)}"


_TERM = re.compile(r"([+-]?)(\d+(?:\.\d+)?(?:/\d+)?)?\*?([pq]?)")


def _parse_linear(text: str) -> tuple[Fraction, Fraction, Fraction]:
    text = text.strip("()")
    coeffs = [Fraction(0)] * 3
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or not (m.group(2) or m.group(3)):
            raise ValueError(f"cannot parse linear form {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        value = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        slot = {"": 0, "p": 1, "q": 2}[m.group(3)]
        coeffs[slot] += sign * value
        pos = m.end()
    return tuple(coeffs)


def _format_linear(c: tuple[Fraction, Fraction, Fraction]) -> str:
    out = f"{c[0]}"
    for value, name in ((c[1], "p"), (c[2], "q")):
        out += f"{'-' if value < 0 else '+'}{abs(value)}{name}"
    return f"({out})"


BALANCE_OBJECTIVE = LinearFractional.parse("38+33p-28q/58+48p-43q")
"""The exponent of the GL5 error term as a function of the pair used."""


@dataclass(frozen=True)
class OptimizeResult:
    best: ExponentPair
    value: Fraction
    values: dict[ExponentPair, Fraction]


def optimize(
    objective: Callable[[Fraction, Fraction], Fraction], pairs: Iterable[ExponentPair]
) -> OptimizeResult:
    """Minimize an exact objective over ``pairs``.

    Ties are broken by the smallest ``(p, q)`` in lexicographic order.

    Raises:
        DenominatorVanishes: if the objective is undefined at some pair.
        ValueError: if ``pairs`` is empty.
    """
    values: dict[ExponentPair, Fraction] = {}
    for pair in sorted(pairs):
        try:
            values[pair] = Fraction(objective(pair.p, pair.q))
        except ZeroDivisionError as exc:
            raise DenominatorVanishes(str(exc)) from exc
    if not values:
        raise ValueError("no pairs to optimize over")
    best = min(values, key=lambda pr: (values[pr], pr.p, pr.q))
    return OptimizeResult(best, values[best], values)


def solve_balance(a: Fraction, b: Fraction, c: Fraction) -> Fraction:
    """Solve ``a*delta + b = c - delta`` exactly."""
    if a == -1:
        raise DenominatorVanishes("a = -1 leaves delta undetermined")
    return (Fraction(c) - Fraction(b)) / (Fraction(a) + 1)


def balance_delta() -> Fraction:
    """Saving that balances ``(109/69) delta + 91/138`` against ``2/3 - delta``."""
    return solve_balance(Fraction(109, 69), Fraction(91, 138), Fraction(2, 3))

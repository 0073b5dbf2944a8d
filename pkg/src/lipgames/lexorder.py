"""Sorted lexicographical comparisons.

Both comparators sort their inputs in non-increasing order before
comparing, so ``(2, 1)`` and ``(1, 2)`` are equal.  Entries are expected to
be exact numbers (``int`` or ``fractions.Fraction``); floats work but lose
the guarantee that ``EQUAL`` is decided exactly.
"""

from __future__ import annotations

import enum
from collections.abc import Sequence
from fractions import Fraction
from numbers import Real

__all__ = [
    "DimensionError",
    "Ordering",
    "a_lex_compare",
    "sorted_desc",
    "sorted_lex_compare",
]


class DimensionError(ValueError):
    """Vectors of different length were compared."""


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1

    @classmethod
    def of(cls, a, b) -> "Ordering":
        if a < b:
            return cls.LESS
        if a > b:
            return cls.GREATER
        return cls.EQUAL


def _check_lengths(a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise DimensionError(f"cannot compare vectors of length {len(a)} and {len(b)}")


def sorted_desc(values) -> tuple:
    """Entries of ``values`` in non-increasing order, as a tuple."""
    return tuple(sorted(values, reverse=True))


def sorted_lex_compare(a: Sequence[Real], b: Sequence[Real]) -> Ordering:
    """Compare two non-negative vectors in the sorted lexicographical order.

    >>> sorted_lex_compare((1, 3, 2), (3, 3, 0))
    <Ordering.LESS: -1>
    >>> sorted_lex_compare((2, 1), (1, 2))
    <Ordering.EQUAL: 0>
    """
    _check_lengths(a, b)
    for v in (*a, *b):
        if v < 0:
            raise ValueError(f"cost vectors must be non-negative, got {v}")
    # Python compares equal-length tuples lexicographically.
    return Ordering.of(sorted_desc(a), sorted_desc(b))


def a_lex_compare(a: Sequence[tuple[Real, Real]], b: Sequence[tuple[Real, Real]]) -> Ordering:
    """Compare vectors of ``(cost, load)`` pairs.

    Pairs are ordered lexicographically (cost first, load breaks ties); each
    vector is sorted non-increasingly under that pair order and the sorted
    sequences are then compared lexicographically.
    """
    _check_lengths(a, b)
    ka = sorted_desc(_as_pair(p) for p in a)
    kb = sorted_desc(_as_pair(p) for p in b)
    return Ordering.of(ka, kb)


def _as_pair(p) -> tuple:
    cost, load = p
    if cost < 0 or load < 0:
        raise ValueError(f"pair entries must be non-negative, got {p!r}")
    return (cost, load)


def as_fraction(value) -> Fraction:
    """Exact conversion used by parsers; floats are rejected."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, float):
        raise TypeError(f"binary float {value!r} is not accepted; use a decimal string")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact rational")

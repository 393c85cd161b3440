"""Subsets of a ground set V = {0, ..., n-1}, stored as integer bit masks.

Python integers give exact set algebra at any n (single machine word up to
64 elements, multi-word beyond), so the same representation serves both the
desk-scale solvers and the n=1000 clustering experiments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import GroundSetMismatchError


@dataclass(frozen=True)
class ElementSet:
    """Immutable subset of {0..n-1}; ``bits`` bit j set iff element j is a member."""

    n: int
    bits: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"ground set size must be >= 0, got {self.n}")
        if self.bits < 0:
            raise ValueError("bit mask must be nonnegative")
        if self.bits >> self.n:
            raise ValueError(f"mask has members >= n={self.n}")

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "ElementSet":
        bits = 0
        for j in indices:
            if not 0 <= j < n:
                raise ValueError(f"element {j} out of range for n={n}")
            bits |= 1 << j
        return cls(n, bits)

    @classmethod
    def empty(cls, n: int) -> "ElementSet":
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> "ElementSet":
        return cls(n, (1 << n) - 1)

    @classmethod
    def singleton(cls, n: int, j: int) -> "ElementSet":
        if not 0 <= j < n:
            raise ValueError(f"element {j} out of range for n={n}")
        return cls(n, 1 << j)

    def _check(self, other: "ElementSet") -> None:
        if self.n != other.n:
            raise GroundSetMismatchError(
                f"ground sets differ: {self.n} vs {other.n}"
            )

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, j: int) -> bool:
        return 0 <= j < self.n and (self.bits >> j) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __or__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.n, self.bits | other.bits)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.n, self.bits & other.bits)

    def __sub__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.n, self.bits & ~other.bits)

    def __xor__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.n, self.bits ^ other.bits)

    def complement(self) -> "ElementSet":
        return ElementSet(self.n, ((1 << self.n) - 1) ^ self.bits)

    def issubset(self, other: "ElementSet") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def add(self, j: int) -> "ElementSet":
        if not 0 <= j < self.n:
            raise ValueError(f"element {j} out of range for n={self.n}")
        return ElementSet(self.n, self.bits | (1 << j))

    def remove(self, j: int) -> "ElementSet":
        if not 0 <= j < self.n:
            raise ValueError(f"element {j} out of range for n={self.n}")
        return ElementSet(self.n, self.bits & ~(1 << j))

    def indices(self) -> np.ndarray:
        """Member indices as a sorted int array."""
        return np.flatnonzero(self.indicator())

    def indicator(self) -> np.ndarray:
        """Boolean membership vector of length n."""
        if self.n == 0:
            return np.zeros(0, dtype=bool)
        nbytes = (self.n + 7) // 8
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.n].astype(bool)

    def __repr__(self) -> str:
        return f"ElementSet(n={self.n}, {{{', '.join(map(str, self))}}})"


def sym_diff(a: ElementSet, b: ElementSet) -> ElementSet:
    """(A \\ B) | (B \\ A); commutative, A ^ A is empty."""
    return a ^ b


def all_subsets(n: int) -> Iterator[ElementSet]:
    """All 2^n subsets in ascending mask order."""
    for bits in range(1 << n):
        yield ElementSet(n, bits)

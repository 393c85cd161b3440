"""SH problem instances: F(A) = sum_i f_i(A xor B_i) under a cardinality constraint."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    GroundSetMismatchError,
    InfeasibleConstraintError,
    PolymatroidValidationError,
)
from .functions import PolymatroidFunction, SetFunction, _masks
from .sets import ElementSet


@dataclass(frozen=True)
class Constraint:
    """Cardinality constraint on the solution set. kind 'unconstrained' ignores k."""

    kind: str
    k: int = 0

    KINDS = ("unconstrained", "at_least", "at_most", "exact")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if self.kind != "unconstrained" and self.k < 0:
            raise ValueError("cardinality bound must be >= 0")

    @classmethod
    def unconstrained(cls) -> "Constraint":
        return cls("unconstrained")

    @classmethod
    def at_least(cls, k: int) -> "Constraint":
        return cls("at_least", k)

    @classmethod
    def at_most(cls, k: int) -> "Constraint":
        return cls("at_most", k)

    @classmethod
    def exact(cls, k: int) -> "Constraint":
        return cls("exact", k)

    @property
    def is_unconstrained(self) -> bool:
        return self.kind == "unconstrained"

    def admits(self, size: int) -> bool:
        if self.kind == "unconstrained":
            return True
        if self.kind == "at_least":
            return size >= self.k
        if self.kind == "at_most":
            return size <= self.k
        return size == self.k

    def check_feasible(self, n: int) -> None:
        if self.kind in ("at_least", "exact") and self.k > n:
            raise InfeasibleConstraintError(
                f"constraint {self.kind}({self.k}) infeasible on ground set of size {n}"
            )

    def __str__(self) -> str:
        if self.kind == "unconstrained":
            return "unconstrained"
        return f"{self.kind}({self.k})"


UNCONSTRAINED = Constraint.unconstrained()


class ShInstance:
    """Sequence of (f_i, B_i) pairs plus a constraint.

    ``homogeneous`` is true iff all f_i describe the same function, which is
    when the Best-B guarantee applies.
    """

    def __init__(
        self,
        functions: Sequence[PolymatroidFunction],
        b_sets: Sequence[ElementSet],
        constraint: Constraint = UNCONSTRAINED,
    ):
        if len(functions) == 0:
            raise PolymatroidValidationError("an instance needs at least one (f, B) pair")
        if len(functions) != len(b_sets):
            raise PolymatroidValidationError(
                f"{len(functions)} functions but {len(b_sets)} B sets"
            )
        n = functions[0].n
        for f in functions:
            if f.n != n:
                raise GroundSetMismatchError("functions disagree on ground set size")
        for b in b_sets:
            if b.n != n:
                raise GroundSetMismatchError("B sets must live on the functions' ground set")
        self.n = n
        self.functions = list(functions)
        self.b_sets = list(b_sets)
        self.constraint = constraint
        first = self.functions[0]
        self.homogeneous = all(
            f is first or f == first for f in self.functions[1:]
        ) if len(self.functions) > 1 else True

    @classmethod
    def from_shared(
        cls,
        f: PolymatroidFunction,
        b_sets: Sequence[ElementSet],
        constraint: Constraint = UNCONSTRAINED,
    ) -> "ShInstance":
        return cls([f] * len(b_sets), b_sets, constraint)

    @property
    def m(self) -> int:
        return len(self.functions)

    def objective(self, a: ElementSet) -> float:
        return sh_objective(self, a)

    def __repr__(self) -> str:
        tag = "homogeneous" if self.homogeneous else "heterogeneous"
        return f"ShInstance(n={self.n}, m={self.m}, {tag}, {self.constraint})"


def sh_objective(instance: ShInstance, a: ElementSet) -> float:
    """F(A) = sum_i f_i(A xor B_i)."""
    if a.n != instance.n:
        raise GroundSetMismatchError(
            f"candidate set over n={a.n}, instance over n={instance.n}"
        )
    return float(
        sum(f.evaluate(a ^ b) for f, b in zip(instance.functions, instance.b_sets))
    )


class SHObjective(SetFunction):
    """F as an evaluation handle. Not submodular in general; brute force only."""

    def __init__(self, instance: ShInstance):
        self.instance = instance
        self.n = instance.n

    def evaluate(self, s: ElementSet) -> float:
        return sh_objective(self.instance, s)

    def value_table(self) -> np.ndarray:
        masks = _masks(self.n)
        out = np.zeros(len(masks))
        for f, b in zip(self.instance.functions, self.instance.b_sets):
            out += f.value_table()[masks ^ np.uint32(b.bits)]
        return out


class UnionSplitSurrogate(SetFunction):
    """F'(A) = sum_i [f_i(A \\ B_i) + f_i(B_i \\ A)].

    Submodular in A (each side is a restriction or complement-restriction of a
    submodular function) and sandwiched as F <= F' <= 2F. Not normalized:
    F'(empty) = sum_i f_i(B_i).
    """

    def __init__(self, instance: ShInstance):
        self.instance = instance
        self.n = instance.n

    def evaluate(self, s: ElementSet) -> float:
        self._check_set(s)
        total = 0.0
        for f, b in zip(self.instance.functions, self.instance.b_sets):
            total += f.evaluate(s - b) + f.evaluate(b - s)
        return float(total)

    def value_table(self) -> np.ndarray:
        masks = _masks(self.n)
        out = np.zeros(len(masks))
        for f, b in zip(self.instance.functions, self.instance.b_sets):
            tab = f.value_table()
            bbits = np.uint32(b.bits)
            out += tab[masks & ~bbits] + tab[bbits & ~masks]
        return out


def union_split_surrogate(instance: ShInstance) -> UnionSplitSurrogate:
    """The split objective used by the Union-Split solvers."""
    return UnionSplitSurrogate(instance)


def modular_representation(instance: ShInstance) -> tuple[float, np.ndarray]:
    """Exact (offset, weights) form of F when every f_i is modular.

    F(A) = offset + sum_{j in A} w(j) with w(j) picking up +w_i(j) when
    j is outside B_i and -w_i(j) when inside (adding j then removes it from
    the symmetric difference).
    """
    offset = 0.0
    weights = np.zeros(instance.n)
    for f, b in zip(instance.functions, instance.b_sets):
        if f.variant != "modular":
            raise PolymatroidValidationError(
                "modular representation requires every f_i to be modular"
            )
        ind = b.indicator()
        offset += float(f.weights[ind].sum())
        weights += np.where(ind, -f.weights, f.weights)
    return offset, weights

"""Positive polymatroid functions over a finite ground set.

Every function here is normalized (f(empty)=0), monotone nondecreasing,
submodular, and strictly positive off the empty set. Positivity is enforced
structurally at construction (e.g. strictly positive modular weights, a
positive entry in every facility-location column) so instances are valid by
construction rather than by enumeration; the behavioral checkers in
``checks`` verify the other properties on demand.

All functions expose marginal-gain helpers and, at small n, a vectorized
table of values over all 2^n subsets (used by the brute-force oracles and
the exhaustive checkers).
"""

from __future__ import annotations

from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .errors import GroundSetMismatchError, PolymatroidValidationError
from .sets import ElementSet, sym_diff

# Memory guard for vectorized subset tables that keep per-mask row state.
_TABLE_ROWSTATE_BITS = 16
TABLE_MAX_BITS = 22


class SetFunction:
    """Real-valued function of an ElementSet with marginal-gain helpers."""

    n: int

    def evaluate(self, s: ElementSet) -> float:
        raise NotImplementedError

    def __call__(self, s: ElementSet) -> float:
        return self.evaluate(s)

    def _check_set(self, s: ElementSet) -> None:
        if s.n != self.n:
            raise GroundSetMismatchError(
                f"set over ground set of size {s.n}, function expects {self.n}"
            )

    def gain(self, j: int, s: ElementSet) -> float:
        """f(j | S) = f(S + j) - f(S); zero when j is already a member."""
        if not 0 <= j < self.n:
            raise GroundSetMismatchError(f"element {j} out of range for n={self.n}")
        if j in s:
            return 0.0
        return self.evaluate(s.add(j)) - self.evaluate(s)

    def add_gains(self, s: ElementSet) -> np.ndarray:
        """Vector of f(j | S) over all j (zero at members of S)."""
        self._check_set(s)
        base = self.evaluate(s)
        out = np.zeros(self.n)
        for j in range(self.n):
            if j not in s:
                out[j] = self.evaluate(s.add(j)) - base
        return out

    def drop_gains(self, s: ElementSet) -> np.ndarray:
        """Vector of f(j | S \\ j) = f(S) - f(S - j) over j in S (zero elsewhere)."""
        self._check_set(s)
        base = self.evaluate(s)
        out = np.zeros(self.n)
        for j in s:
            out[j] = base - self.evaluate(s.remove(j))
        return out

    @cached_property
    def singleton_values(self) -> np.ndarray:
        """f({j}) for every element j."""
        return self.add_gains(ElementSet.empty(self.n))

    @cached_property
    def top_drop_gains(self) -> np.ndarray:
        """f(j | V \\ j) for every element j (the smallest possible gains)."""
        return self.drop_gains(ElementSet.full(self.n))

    def value_table(self) -> np.ndarray:
        """f over all 2^n masks, indexed by mask integer. Requires n <= 22."""
        if self.n > TABLE_MAX_BITS:
            raise ValueError(f"value_table needs n <= {TABLE_MAX_BITS}, got {self.n}")
        return np.array(
            [self.evaluate(ElementSet(self.n, m)) for m in range(1 << self.n)]
        )


class OracleFunction(SetFunction):
    """Wrap an arbitrary callable on ElementSets; no validation is applied."""

    def __init__(self, n: int, fn: Callable[[ElementSet], float], name: str = "oracle"):
        self.n = n
        self._fn = fn
        self.name = name

    def evaluate(self, s: ElementSet) -> float:
        self._check_set(s)
        return float(self._fn(s))


def _masks(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.uint32)


def _popcounts(masks: np.ndarray) -> np.ndarray:
    # bitwise_count yields uint8; cast so downstream sqrt/power stay float64
    return np.bitwise_count(masks).astype(np.float64)


class PolymatroidFunction(SetFunction):
    """Base for the built-in positive polymatroid variants."""

    variant: str = ""

    def record(self) -> dict:
        """JSON-able description (variant tag + parameters)."""
        raise NotImplementedError

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolymatroidFunction)
            and self.variant == other.variant
            and self.record() == other.record()
        )

    def __hash__(self):
        return hash((self.variant, self.n))


class Modular(PolymatroidFunction):
    """f(Y) = sum of per-element weights; the weighted-Hamming base case."""

    variant = "modular"

    def __init__(self, weights: Sequence[float]):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1:
            raise PolymatroidValidationError("modular weights must be a vector")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise PolymatroidValidationError(
                "modular weights must be finite and strictly positive"
            )
        w.setflags(write=False)
        self.weights = w
        self.n = len(w)

    @classmethod
    def hamming(cls, n: int) -> "Modular":
        return cls(np.ones(n))

    def evaluate(self, s: ElementSet) -> float:
        self._check_set(s)
        return float(self.weights[s.indicator()].sum())

    def gain(self, j: int, s: ElementSet) -> float:
        if not 0 <= j < self.n:
            raise GroundSetMismatchError(f"element {j} out of range for n={self.n}")
        return 0.0 if j in s else float(self.weights[j])

    def add_gains(self, s: ElementSet) -> np.ndarray:
        self._check_set(s)
        return np.where(s.indicator(), 0.0, self.weights)

    def drop_gains(self, s: ElementSet) -> np.ndarray:
        self._check_set(s)
        return np.where(s.indicator(), self.weights, 0.0)

    def value_table(self) -> np.ndarray:
        masks = _masks(self.n)
        out = np.zeros(len(masks))
        for j in range(self.n):
            out += np.where((masks >> j) & 1, self.weights[j], 0.0)
        return out

    def record(self) -> dict:
        return {"variant": self.variant, "weights": [float(x) for x in self.weights]}


class ConcaveCardinality(PolymatroidFunction):
    """f(Y) = |Y|^(1/alpha) for alpha >= 1 (alpha=1 is plain cardinality)."""

    variant = "concave_cardinality"

    def __init__(self, n: int, alpha: float):
        if n <= 0:
            raise PolymatroidValidationError("ground set must be nonempty")
        if not np.isfinite(alpha) or alpha < 1.0:
            raise PolymatroidValidationError(f"alpha must be >= 1, got {alpha}")
        self.n = n
        self.alpha = float(alpha)

    def _of_count(self, k) -> np.ndarray:
        return np.asarray(k, dtype=float) ** (1.0 / self.alpha)

    def evaluate(self, s: ElementSet) -> float:
        self._check_set(s)
        return float(self._of_count(len(s)))

    def gain(self, j: int, s: ElementSet) -> float:
        if not 0 <= j < self.n:
            raise GroundSetMismatchError(f"element {j} out of range for n={self.n}")
        if j in s:
            return 0.0
        k = len(s)
        return float(self._of_count(k + 1) - self._of_count(k))

    def add_gains(self, s: ElementSet) -> np.ndarray:
        self._check_set(s)
        k = len(s)
        g = float(self._of_count(k + 1) - self._of_count(k))
        return np.where(s.indicator(), 0.0, g)

    def drop_gains(self, s: ElementSet) -> np.ndarray:
        self._check_set(s)
        k = len(s)
        if k == 0:
            return np.zeros(self.n)
        g = float(self._of_count(k) - self._of_count(k - 1))
        return np.where(s.indicator(), g, 0.0)

    def value_table(self) -> np.ndarray:
        return self._of_count(_popcounts(_masks(self.n)))

    def record(self) -> dict:
        return {"variant": self.variant, "n": self.n, "alpha": self.alpha}


class ClusteredConcave(PolymatroidFunction):
    """f(Y) = sum over word classes W of sqrt(|Y & W|).

    The classes must partition the ground set, so every singleton scores 1
    and positivity holds by construction.
    """

    variant = "clustered_concave"

    def __init__(self, n: int, classes: Sequence[Sequence[int]]):
        seen = np.zeros(n, dtype=bool)
        class_of = np.full(n, -1, dtype=np.int64)
        masks = []
        for c, members in enumerate(classes):
            mask = 0
            for j in members:
                if not 0 <= j < n:
                    raise PolymatroidValidationError(
                        f"class member {j} out of range for n={n}"
                    )
                if seen[j]:
                    raise PolymatroidValidationError(
                        f"element {j} appears in more than one class"
                    )
                seen[j] = True
                class_of[j] = c
                mask |= 1 << j
            if mask == 0:
                raise PolymatroidValidationError(f"class {c} is empty")
            masks.append(mask)
        if not seen.all():
            missing = int(np.flatnonzero(~seen)[0])
            raise PolymatroidValidationError(
                f"element {missing} belongs to no class (classes must cover V)"
            )
        self.n = n
        self.classes = [tuple(sorted(members)) for members in classes]
        self.class_of = class_of
        self.class_masks = masks
        self.num_classes = len(masks)

    def _counts(self, s: ElementSet) -> np.ndarray:
        members = s.indices()
        return np.bincount(self.class_of[members], minlength=self.num_classes)

    def evaluate(self, s: ElementSet) -> float:
        self._check_set(s)
        return float(np.sqrt(self._counts(s)).sum())

    def gain(self, j: int, s: ElementSet) -> float:
        if not 0 <= j < self.n:
            raise GroundSetMismatchError(f"element {j} out of range for n={self.n}")
        if j in s:
            return 0.0
        c = (s.bits & self.class_masks[self.class_of[j]]).bit_count()
        return float(np.sqrt(c + 1.0) - np.sqrt(c))

    def add_gains(self, s: ElementSet) -> np.ndarray:
        self._check_set(s)
        counts = self._counts(s).astype(float)
        per_class = np.sqrt(counts + 1.0) - np.sqrt(counts)
        return np.where(s.indicator(), 0.0, per_class[self.class_of])

    def drop_gains(self, s: ElementSet) -> np.ndarray:
        self._check_set(s)
        counts = self._counts(s).astype(float)
        per_class = np.sqrt(counts) - np.sqrt(np.maximum(counts - 1.0, 0.0))
        return np.where(s.indicator(), per_class[self.class_of], 0.0)

    def value_table(self) -> np.ndarray:
        masks = _masks(self.n)
        out = np.zeros(len(masks))
        for mask in self.class_masks:
            out += np.sqrt(_popcounts(masks & np.uint32(mask)))
        return out

    def record(self) -> dict:
        return {
            "variant": self.variant,
            "n": self.n,
            "classes": [list(c) for c in self.classes],
        }


class FacilityLocation(PolymatroidFunction):
    """f(Y) = sum_i max_{j in Y} S_ij over a nonnegative similarity matrix."""

    variant = "facility_location"

    def __init__(self, similarity: Sequence[Sequence[float]]):
        s = np.asarray(similarity, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise PolymatroidValidationError("similarity must be a square matrix")
        if not np.all(np.isfinite(s)) or np.any(s < 0):
            raise PolymatroidValidationError("similarities must be finite and >= 0")
        if np.any(s.max(axis=0) <= 0):
            raise PolymatroidValidationError(
                "every column needs a positive entry (positivity of singletons)"
            )
        s.setflags(write=False)
        self.similarity = s
        self.n = s.shape[0]

    def evaluate(self, s: ElementSet) -> float:
        self._check_set(s)
        if len(s) == 0:
            return 0.0
        return float(self.similarity[:, s.indices()].max(axis=1).sum())

    def _row_maxes(self, s: ElementSet) -> np.ndarray:
        if len(s) == 0:
            return np.zeros(self.n)
        return self.similarity[:, s.indices()].max(axis=1)

    def add_gains(self, s: ElementSet) -> np.ndarray:
        self._check_set(s)
        cur = self._row_maxes(s)
        gains = np.maximum(self.similarity - cur[:, None], 0.0).sum(axis=0)
        return np.where(s.indicator(), 0.0, gains)

    def gain(self, j: int, s: ElementSet) -> float:
        if not 0 <= j < self.n:
            raise GroundSetMismatchError(f"element {j} out of range for n={self.n}")
        if j in s:
            return 0.0
        cur = self._row_maxes(s)
        return float(np.maximum(self.similarity[:, j] - cur, 0.0).sum())

    def drop_gains(self, s: ElementSet) -> np.ndarray:
        self._check_set(s)
        members = s.indices()
        out = np.zeros(self.n)
        if len(members) == 0:
            return out
        sub = self.similarity[:, members]
        if len(members) == 1:
            out[members[0]] = sub[:, 0].sum()
            return out
        order = np.argsort(sub, axis=1)
        top1 = sub[np.arange(self.n), order[:, -1]]
        top2 = sub[np.arange(self.n), order[:, -2]]
        argmax_col = order[:, -1]
        for pos, j in enumerate(members):
            without = np.where(argmax_col == pos, top2, top1)
            out[j] = (top1 - without).sum()
        return out

    def value_table(self) -> np.ndarray:
        if self.n > _TABLE_ROWSTATE_BITS:
            return super().value_table()
        size = 1 << self.n
        rowmax = np.zeros((size, self.n))
        for b in range(self.n):
            half = 1 << b
            rowmax[half : 2 * half] = np.maximum(rowmax[:half], self.similarity[:, b])
        return rowmax.sum(axis=1)

    def record(self) -> dict:
        return {
            "variant": self.variant,
            "similarity": [[float(x) for x in row] for row in self.similarity],
        }


class SaturatedCoverage(PolymatroidFunction):
    """f(Y) = sum_i min(sum_{j in Y} w_ij, c_i): coverage with per-row caps."""

    variant = "saturated_coverage"

    def __init__(self, weights: Sequence[Sequence[float]], caps: Sequence[float]):
        w = np.asarray(weights, dtype=float)
        c = np.asarray(caps, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise PolymatroidValidationError("weights must be a square matrix")
        if len(c) != w.shape[0]:
            raise PolymatroidValidationError("caps length must match the matrix")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise PolymatroidValidationError("weights must be finite and >= 0")
        if not np.all(np.isfinite(c)) or np.any(c <= 0):
            raise PolymatroidValidationError("caps must be finite and > 0")
        if np.any(w.max(axis=0) <= 0):
            raise PolymatroidValidationError(
                "every column needs a positive entry (positivity of singletons)"
            )
        w.setflags(write=False)
        c.setflags(write=False)
        self.weights = w
        self.caps = c
        self.n = w.shape[0]

    def _row_sums(self, s: ElementSet) -> np.ndarray:
        if len(s) == 0:
            return np.zeros(self.n)
        return self.weights[:, s.indices()].sum(axis=1)

    def evaluate(self, s: ElementSet) -> float:
        self._check_set(s)
        return float(np.minimum(self._row_sums(s), self.caps).sum())

    def add_gains(self, s: ElementSet) -> np.ndarray:
        self._check_set(s)
        r = self._row_sums(s)
        capped = np.minimum(r, self.caps)
        after = np.minimum(r[:, None] + self.weights, self.caps[:, None])
        return np.where(s.indicator(), 0.0, (after - capped[:, None]).sum(axis=0))

    def drop_gains(self, s: ElementSet) -> np.ndarray:
        self._check_set(s)
        r = self._row_sums(s)
        capped = np.minimum(r, self.caps)
        ind = s.indicator()
        before = np.minimum(r[:, None] - self.weights, self.caps[:, None])
        return np.where(ind, (capped[:, None] - before).sum(axis=0), 0.0)

    def value_table(self) -> np.ndarray:
        if self.n > _TABLE_ROWSTATE_BITS:
            return super().value_table()
        size = 1 << self.n
        rowsum = np.zeros((size, self.n))
        for b in range(self.n):
            half = 1 << b
            rowsum[half : 2 * half] = rowsum[:half] + self.weights[:, b]
        return np.minimum(rowsum, self.caps).sum(axis=1)

    def record(self) -> dict:
        return {
            "variant": self.variant,
            "weights": [[float(x) for x in row] for row in self.weights],
            "caps": [float(x) for x in self.caps],
        }


class SetCover(PolymatroidFunction):
    """f(Y) = |union of cover sets of the members of Y| over a finite universe."""

    variant = "set_cover"

    def __init__(self, n: int, covers: Sequence[Sequence[int]], universe: int | None = None):
        if len(covers) != n:
            raise PolymatroidValidationError("need one cover set per element")
        top = -1
        masks = []
        for j, cov in enumerate(covers):
            mask = 0
            for u in cov:
                if u < 0:
                    raise PolymatroidValidationError("universe items must be >= 0")
                mask |= 1 << u
                top = max(top, u)
            if mask == 0:
                raise PolymatroidValidationError(
                    f"cover of element {j} is empty (positivity fails)"
                )
            masks.append(mask)
        self.n = n
        self.universe = universe if universe is not None else top + 1
        if self.universe <= top:
            raise PolymatroidValidationError("universe smaller than cover items")
        self.covers = [tuple(sorted(set(c))) for c in covers]
        self.cover_masks = masks

    def _union_mask(self, s: ElementSet) -> int:
        mask = 0
        for j in s:
            mask |= self.cover_masks[j]
        return mask

    def evaluate(self, s: ElementSet) -> float:
        self._check_set(s)
        return float(self._union_mask(s).bit_count())

    def gain(self, j: int, s: ElementSet) -> float:
        if not 0 <= j < self.n:
            raise GroundSetMismatchError(f"element {j} out of range for n={self.n}")
        if j in s:
            return 0.0
        covered = self._union_mask(s)
        return float((self.cover_masks[j] & ~covered).bit_count())

    def add_gains(self, s: ElementSet) -> np.ndarray:
        self._check_set(s)
        covered = self._union_mask(s)
        out = np.zeros(self.n)
        for j in range(self.n):
            if j not in s:
                out[j] = (self.cover_masks[j] & ~covered).bit_count()
        return out

    def drop_gains(self, s: ElementSet) -> np.ndarray:
        self._check_set(s)
        out = np.zeros(self.n)
        members = list(s)
        for j in members:
            others = 0
            for i in members:
                if i != j:
                    others |= self.cover_masks[i]
            out[j] = (self.cover_masks[j] & ~others).bit_count()
        return out

    def value_table(self) -> np.ndarray:
        size = 1 << self.n
        covered = [0] * size
        out = np.zeros(size)
        for mask in range(1, size):
            low = mask & -mask
            cov = covered[mask ^ low] | self.cover_masks[low.bit_length() - 1]
            covered[mask] = cov
            out[mask] = cov.bit_count()
        return out

    def record(self) -> dict:
        return {
            "variant": self.variant,
            "n": self.n,
            "universe": self.universe,
            "covers": [list(c) for c in self.covers],
        }


class Scaled(PolymatroidFunction):
    """factor * inner for a positive factor; preserves all four properties."""

    variant = "scaled"

    def __init__(self, inner: PolymatroidFunction, factor: float):
        if not np.isfinite(factor) or factor <= 0:
            raise PolymatroidValidationError(f"scale factor must be > 0, got {factor}")
        self.inner = inner
        self.factor = float(factor)
        self.n = inner.n

    def evaluate(self, s: ElementSet) -> float:
        return self.factor * self.inner.evaluate(s)

    def gain(self, j: int, s: ElementSet) -> float:
        return self.factor * self.inner.gain(j, s)

    def add_gains(self, s: ElementSet) -> np.ndarray:
        return self.factor * self.inner.add_gains(s)

    def drop_gains(self, s: ElementSet) -> np.ndarray:
        return self.factor * self.inner.drop_gains(s)

    def value_table(self) -> np.ndarray:
        return self.factor * self.inner.value_table()

    def record(self) -> dict:
        return {"variant": self.variant, "factor": self.factor, "inner": self.inner.record()}


class SumFunction(PolymatroidFunction):
    """Sum of positive polymatroids over a common ground set."""

    variant = "sum"

    def __init__(self, terms: Sequence[PolymatroidFunction]):
        if not terms:
            raise PolymatroidValidationError("sum needs at least one term")
        n = terms[0].n
        for t in terms:
            if t.n != n:
                raise PolymatroidValidationError("sum terms disagree on ground set size")
        self.terms = list(terms)
        self.n = n

    def evaluate(self, s: ElementSet) -> float:
        return float(sum(t.evaluate(s) for t in self.terms))

    def gain(self, j: int, s: ElementSet) -> float:
        return float(sum(t.gain(j, s) for t in self.terms))

    def add_gains(self, s: ElementSet) -> np.ndarray:
        out = np.zeros(self.n)
        for t in self.terms:
            out += t.add_gains(s)
        return out

    def drop_gains(self, s: ElementSet) -> np.ndarray:
        out = np.zeros(self.n)
        for t in self.terms:
            out += t.drop_gains(s)
        return out

    def value_table(self) -> np.ndarray:
        out = self.terms[0].value_table().copy()
        for t in self.terms[1:]:
            out += t.value_table()
        return out

    def record(self) -> dict:
        return {"variant": self.variant, "terms": [t.record() for t in self.terms]}


class ShiftedOracle(SetFunction):
    """g_B(A) = f(A xor B): the non-submodular view the SH solvers work around."""

    def __init__(self, f: SetFunction, b: ElementSet):
        if f.n != b.n:
            raise GroundSetMismatchError("shift set must live on the function's ground set")
        self.f = f
        self.b = b
        self.n = f.n

    def evaluate(self, s: ElementSet) -> float:
        self._check_set(s)
        return self.f.evaluate(s ^ self.b)

    def value_table(self) -> np.ndarray:
        tab = self.f.value_table()
        return tab[_masks(self.n) ^ np.uint32(self.b.bits)]


_VARIANTS = {
    cls.variant: cls
    for cls in (
        Modular,
        ConcaveCardinality,
        ClusteredConcave,
        FacilityLocation,
        SaturatedCoverage,
        SetCover,
        Scaled,
        SumFunction,
    )
}


def function_from_record(rec: dict) -> PolymatroidFunction:
    """Rebuild a polymatroid from its tagged record; inverse of .record()."""
    if not isinstance(rec, dict) or "variant" not in rec:
        raise PolymatroidValidationError("function record needs a 'variant' tag")
    variant = rec["variant"]
    if variant not in _VARIANTS:
        raise PolymatroidValidationError(f"unknown function variant {variant!r}")
    try:
        if variant == "modular":
            return Modular(rec["weights"])
        if variant == "concave_cardinality":
            return ConcaveCardinality(rec["n"], rec["alpha"])
        if variant == "clustered_concave":
            return ClusteredConcave(rec["n"], rec["classes"])
        if variant == "facility_location":
            return FacilityLocation(rec["similarity"])
        if variant == "saturated_coverage":
            return SaturatedCoverage(rec["weights"], rec["caps"])
        if variant == "set_cover":
            return SetCover(rec["n"], rec["covers"], rec.get("universe"))
        if variant == "scaled":
            return Scaled(function_from_record(rec["inner"]), rec["factor"])
        return SumFunction([function_from_record(t) for t in rec["terms"]])
    except KeyError as exc:
        raise PolymatroidValidationError(
            f"function record for {variant!r} is missing field {exc}"
        ) from exc


def metric_distance(f: SetFunction, a: ElementSet, b: ElementSet) -> float:
    """d_f(A, B) = f(A xor B); a metric whenever f is a positive polymatroid."""
    return f.evaluate(sym_diff(a, b))

"""Seeded generators for random polymatroids, SH instances, and the named
fixture families used by the certification suite and the CLI presets."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .functions import (
    ClusteredConcave,
    ConcaveCardinality,
    FacilityLocation,
    Modular,
    PolymatroidFunction,
    SaturatedCoverage,
    SetCover,
    ShiftedOracle,
)
from .instance import Constraint, ShInstance, UNCONSTRAINED
from .sets import ElementSet

VARIANT_NAMES = (
    "modular",
    "concave_cardinality",
    "clustered_concave",
    "facility_location",
    "saturated_coverage",
    "set_cover",
)


def random_polymatroid(
    rng: np.random.Generator, n: int, variant: Optional[str] = None
) -> PolymatroidFunction:
    if variant is None:
        variant = VARIANT_NAMES[rng.integers(len(VARIANT_NAMES))]
    if variant == "modular":
        return Modular(rng.uniform(0.2, 2.0, size=n))
    if variant == "concave_cardinality":
        return ConcaveCardinality(n, float(rng.uniform(1.0, 4.0)))
    if variant == "clustered_concave":
        num_classes = int(rng.integers(1, max(2, n // 2 + 1)))
        ids = rng.integers(num_classes, size=n)
        classes = [np.flatnonzero(ids == c) for c in range(num_classes)]
        classes = [list(map(int, c)) for c in classes if len(c)]
        return ClusteredConcave(n, classes)
    if variant == "facility_location":
        s = rng.uniform(0.0, 1.0, size=(n, n))
        np.fill_diagonal(s, rng.uniform(0.5, 1.0, size=n))
        return FacilityLocation(s)
    if variant == "saturated_coverage":
        w = rng.uniform(0.0, 1.0, size=(n, n))
        np.fill_diagonal(w, rng.uniform(0.5, 1.0, size=n))
        caps = rng.uniform(0.5, 2.0, size=n)
        return SaturatedCoverage(w, caps)
    if variant == "set_cover":
        universe = 2 * n
        covers = [
            sorted(
                int(u)
                for u in rng.choice(universe, size=int(rng.integers(1, 5)), replace=False)
            )
            for _ in range(n)
        ]
        return SetCover(n, covers, universe)
    raise ValueError(f"unknown variant {variant!r}")


def random_subset_of(rng: np.random.Generator, n: int) -> ElementSet:
    mask = int.from_bytes(rng.bytes((n + 7) // 8), "little") & ((1 << n) - 1)
    return ElementSet(n, mask)


def random_instance(
    rng: np.random.Generator,
    n: int,
    m: int,
    constraint: Constraint = UNCONSTRAINED,
    homogeneous: bool = False,
    variants: Optional[Sequence[str]] = None,
) -> ShInstance:
    def pick_variant():
        if variants is None:
            return None
        return variants[rng.integers(len(variants))]

    if homogeneous:
        f = random_polymatroid(rng, n, pick_variant())
        functions = [f] * m
    else:
        functions = [random_polymatroid(rng, n, pick_variant()) for _ in range(m)]
    b_sets = [random_subset_of(rng, n) for _ in range(m)]
    return ShInstance(functions, b_sets, constraint)


def tightness_instance(alpha: float) -> ShInstance:
    """Two-element family where the split surrogate is constant.

    The surrogate sees every subset at value 2 while the true objective is
    minimized at either singleton with value 2^(1/alpha), so the ratio of a
    split-based minimizer approaches 2 as alpha grows.
    """
    f = ConcaveCardinality(2, alpha)
    b_sets = [ElementSet.from_indices(2, [0]), ElementSet.from_indices(2, [1])]
    return ShInstance.from_shared(f, b_sets)


def best_b_counterexample() -> ShInstance:
    """Cardinality objective with the three pairwise doubletons of {0,1,2}.

    The best input set scores 4 while the full set scores 3, so scanning
    the inputs alone is beaten by split-based minimization here.
    """
    f = Modular.hamming(3)
    b_sets = [
        ElementSet.from_indices(3, [0, 1]),
        ElementSet.from_indices(3, [0, 2]),
        ElementSet.from_indices(3, [1, 2]),
    ]
    return ShInstance.from_shared(f, b_sets)


def sqrt_shift_example() -> ShiftedOracle:
    """sqrt-cardinality shifted by a doubleton: the standard witness that
    g_B(A) = f(A xor B) need not be submodular in A."""
    f = ConcaveCardinality(3, 2.0)
    b = ElementSet.from_indices(3, [0, 1])
    return ShiftedOracle(f, b)

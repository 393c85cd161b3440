"""Maximization primitives.

Lazy greedy serves monotone objectives; the deterministic double greedy and
the seeded randomized greedy serve nonnegative non-monotone submodular
objectives (which is what the split SH-max surrogates are). All randomized
procedures are pure functions of (inputs, seed).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GroundSetTooLargeError
from .functions import SetFunction
from .instance import Constraint, UNCONSTRAINED
from .minimize import BRUTE_FORCE_LIMIT, _feasible_mask
from .sets import ElementSet


@dataclass
class MaxResult:
    argmax: ElementSet
    value: float
    method: str
    seed: Optional[int] = None
    trace: list = field(default_factory=list)


def brute_force_max(
    f: SetFunction, constraint: Constraint = UNCONSTRAINED
) -> MaxResult:
    """Exact maximum by enumeration; ties go to the smallest mask."""
    n = f.n
    if n > BRUTE_FORCE_LIMIT:
        raise GroundSetTooLargeError(
            f"brute force capped at n <= {BRUTE_FORCE_LIMIT}, got {n}"
        )
    constraint.check_feasible(n)
    tab = f.value_table()
    sizes = np.bitwise_count(np.arange(1 << n, dtype=np.uint32))
    values = np.where(_feasible_mask(sizes, constraint), tab, -np.inf)
    best = int(np.argmax(values))
    return MaxResult(ElementSet(n, best), float(tab[best]), "brute_force")


def greedy_max_card(f: SetFunction, k: int) -> MaxResult:
    """Lazy greedy for monotone f under |A| = k; identical to naive greedy.

    The heap is keyed by (-gain, index), so ties resolve to the smallest
    element exactly as a naive argmax scan would.
    """
    n = f.n
    if k > n:
        raise ValueError(f"k={k} exceeds ground set size {n}")
    s = ElementSet.empty(n)
    value = f.evaluate(s)
    trace = []
    heap = [(-g, j) for j, g in enumerate(f.add_gains(s))]
    heapq.heapify(heap)
    fresh = {}  # element -> gain recomputed against the current s
    for _ in range(k):
        while True:
            neg_gain, j = heapq.heappop(heap)
            if fresh.get(j) == -neg_gain:
                break
            g = f.gain(j, s)
            fresh[j] = g
            if heap and (-g, j) > heap[0]:
                heapq.heappush(heap, (-g, j))
            else:
                neg_gain = -g
                break
        s = s.add(j)
        value += -neg_gain
        trace.append((j, -neg_gain))
        fresh.clear()
    return MaxResult(s, float(f.evaluate(s)), "lazy_greedy", trace=trace)


def bidirectional_greedy(f: SetFunction, seed: Optional[int] = None) -> MaxResult:
    """Double greedy for nonnegative submodular f, over elements 0..n-1.

    Deterministic variant (seed None) keeps element j iff the add-gain is at
    least the removal-gain and guarantees a 1/3 fraction of the maximum; the
    seeded variant accepts with probability a/(a+b) on the clipped gains and
    guarantees 1/2 in expectation.
    """
    n = f.n
    rng = np.random.default_rng(seed) if seed is not None else None
    low = ElementSet.empty(n)
    high = ElementSet.full(n)
    f_low = f.evaluate(low)
    f_high = f.evaluate(high)
    trace = []
    for j in range(n):
        a = f.evaluate(low.add(j)) - f_low
        b = f.evaluate(high.remove(j)) - f_high
        if rng is None:
            keep = a >= b
        else:
            a_pos, b_pos = max(a, 0.0), max(b, 0.0)
            keep = True if a_pos + b_pos == 0 else rng.random() < a_pos / (a_pos + b_pos)
        if keep:
            low = low.add(j)
            f_low += a
        else:
            high = high.remove(j)
            f_high += b
        trace.append((j, a, b, keep))
    return MaxResult(low, float(f.evaluate(low)), "bidirectional_greedy", seed=seed, trace=trace)


def randomized_greedy_card(f: SetFunction, k: int, seed: int) -> MaxResult:
    """Randomized greedy for nonnegative submodular f under |A| <= k.

    Each round takes the k largest marginal gains, replaces the negative
    ones by no-op dummies, and picks one of the k slots uniformly; a dummy
    pick skips the round. Gives 1/e of the cardinality-constrained optimum
    in expectation.
    """
    n = f.n
    if k > n:
        raise ValueError(f"k={k} exceeds ground set size {n}")
    rng = np.random.default_rng(seed)
    s = ElementSet.empty(n)
    trace = []
    for _ in range(k):
        gains = f.add_gains(s)
        ind = s.indicator()
        order = np.lexsort((np.arange(n), np.where(ind, np.inf, -gains)))
        candidates = [int(j) for j in order[: min(k, n - len(s))] if not ind[j]]
        slot = int(rng.integers(k))
        if slot >= len(candidates) or gains[candidates[slot]] < 0:
            trace.append((None, 0.0))
            continue
        j = candidates[slot]
        s = s.add(j)
        trace.append((j, float(gains[j])))
    return MaxResult(s, float(f.evaluate(s)), "randomized_greedy", seed=seed, trace=trace)


def random_subset(n: int, seed: int) -> ElementSet:
    """Each element independently with probability 1/2."""
    rng = np.random.default_rng(seed)
    picks = np.flatnonzero(rng.random(n) < 0.5)
    return ElementSet.from_indices(n, (int(j) for j in picks))

"""Submodular and modular minimization.

Unconstrained submodular minimization runs the Fujishige-Wolfe minimum-norm
point algorithm on the base polytope, with vertices produced by the sorted
greedy rule of the Lovasz extension, followed by level-set rounding.
Constrained minimization is only offered for modular objectives (which is
all the Major-Min solver needs); everything has a brute-force oracle twin
for certification at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConvergenceError, GroundSetTooLargeError, InfeasibleConstraintError
from .functions import SetFunction
from .instance import Constraint, UNCONSTRAINED
from .sets import ElementSet

BRUTE_FORCE_LIMIT = 22
MIN_NORM_TOL = 1e-7

# Numeric guards from Wolfe's method (point-in-hull and zero-coefficient cut).
_Z1 = 1e-12
_Z2 = 1e-10


@dataclass
class MinResult:
    argmin: ElementSet
    value: float
    method: str
    iterations: int = 0
    gap: float = 0.0
    exact: bool = False


@dataclass
class LovaszPoint:
    x: np.ndarray
    value: float
    subgradient: np.ndarray


def brute_force_min(
    f: SetFunction, constraint: Constraint = UNCONSTRAINED
) -> MinResult:
    """Exact minimum by enumeration; ties go to the smallest mask."""
    n = f.n
    if n > BRUTE_FORCE_LIMIT:
        raise GroundSetTooLargeError(
            f"brute force capped at n <= {BRUTE_FORCE_LIMIT}, got {n}"
        )
    constraint.check_feasible(n)
    tab = f.value_table()
    sizes = np.bitwise_count(np.arange(1 << n, dtype=np.uint32))
    feasible = _feasible_mask(sizes, constraint)
    values = np.where(feasible, tab, np.inf)
    best = int(np.argmin(values))
    return MinResult(
        argmin=ElementSet(n, best),
        value=float(tab[best]),
        method="brute_force",
        exact=True,
    )


def _feasible_mask(sizes: np.ndarray, constraint: Constraint) -> np.ndarray:
    if constraint.kind == "unconstrained":
        return np.ones(len(sizes), dtype=bool)
    if constraint.kind == "at_least":
        return sizes >= constraint.k
    if constraint.kind == "at_most":
        return sizes <= constraint.k
    return sizes == constraint.k


def lovasz_eval(f: SetFunction, x: np.ndarray) -> LovaszPoint:
    """Lovasz extension value and a base-polytope subgradient at x in [0,1]^n.

    Elements are visited in nonincreasing order of x (ties by index); the
    subgradient entries are the marginal gains along that chain, which is
    the greedy vertex maximizing <x, y> over the base polytope.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (f.n,):
        raise ValueError(f"need a length-{f.n} vector, got shape {x.shape}")
    if np.any(x < -1e-12) or np.any(x > 1 + 1e-12):
        raise ValueError("coordinates must lie in [0, 1]")
    order = np.lexsort((np.arange(f.n), -x))
    gains = _chain_gains(f, order)
    return LovaszPoint(x=x, value=float(x[order] @ gains), subgradient=_scatter(order, gains))


def _chain_gains(f: SetFunction, order: np.ndarray) -> np.ndarray:
    """Marginal gains of f along the prefix chain of ``order``."""
    gains = np.empty(len(order))
    s = ElementSet.empty(f.n)
    prev = f.evaluate(s)
    for pos, j in enumerate(order):
        s = s.add(int(j))
        cur = f.evaluate(s)
        gains[pos] = cur - prev
        prev = cur
    return gains


def _scatter(order: np.ndarray, gains: np.ndarray) -> np.ndarray:
    out = np.empty(len(order))
    out[order] = gains
    return out


class _Memo:
    """Per-call evaluation cache keyed by bit mask."""

    def __init__(self, f: SetFunction):
        self.f = f
        self.n = f.n
        self.cache: dict[int, float] = {}

    def __call__(self, s: ElementSet) -> float:
        v = self.cache.get(s.bits)
        if v is None:
            v = self.f.evaluate(s)
            self.cache[s.bits] = v
        return v


def _greedy_min_vertex(memo: _Memo, w: np.ndarray) -> np.ndarray:
    """Base-polytope vertex minimizing <w, y>: greedy in ascending-w order."""
    order = np.lexsort((np.arange(memo.n), w))
    gains = np.empty(memo.n)
    s = ElementSet.empty(memo.n)
    prev = memo(s)
    for pos, j in enumerate(order):
        s = s.add(int(j))
        cur = memo(s)
        gains[pos] = cur - prev
        prev = cur
    return _scatter(order, gains)


def _affine_minimizer(S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Min-norm point of the affine hull of the rows of S, with coefficients."""
    m = S.shape[0]
    M = np.empty((m + 1, m + 1))
    M[0, 0] = 0.0
    M[0, 1:] = 1.0
    M[1:, 0] = 1.0
    M[1:, 1:] = S @ S.T
    rhs = np.zeros(m + 1)
    rhs[0] = 1.0
    try:
        coeffs = np.linalg.solve(M, rhs)[1:]
    except np.linalg.LinAlgError:
        coeffs = np.linalg.lstsq(M, rhs, rcond=None)[0][1:]
    return coeffs, coeffs @ S


def _round_level_sets(memo: _Memo, x: np.ndarray) -> tuple[ElementSet, float]:
    """Scan the ascending-x prefix chain and keep the first strict minimum.

    The chain starts at the empty set, so zero-valued coordinates only join
    the solution if they strictly lower the objective (they never do at the
    true norm point), matching the threshold-at-0, exclude-ties rule.
    """
    n = memo.n
    order = np.lexsort((np.arange(n), x))
    best_set = ElementSet.empty(n)
    best = memo(best_set)
    s = best_set
    for j in order:
        s = s.add(int(j))
        v = memo(s)
        if v < best:
            best, best_set = v, s
    return best_set, best


def submodular_min_unconstrained(
    f: SetFunction,
    tol: float = MIN_NORM_TOL,
    max_iter: Optional[int] = None,
) -> MinResult:
    """Minimize a submodular function exactly via the minimum-norm point.

    The handle need not be normalized; internally the algorithm works on
    f - f(empty) (greedy-vertex marginals cancel the offset) and the
    reported value is the true f at the argmin. ``gap`` is the final
    duality gap value - (f(empty) + sum of negative norm-point entries).
    """
    n = f.n
    memo = _Memo(f)
    offset = memo(ElementSet.empty(n))
    if n == 0:
        return MinResult(ElementSet.empty(0), offset, "min_norm_point", 0, 0.0, True)
    if max_iter is None:
        max_iter = max(10 * n * n, 100)

    x = _greedy_min_vertex(memo, np.zeros(n))
    S = x.reshape(1, n)
    lam = np.ones(1)
    iterations = 0
    converged = False

    for _ in range(max_iter):
        iterations += 1
        best_set, best_val = _round_level_sets(memo, x)
        gap = best_val - (offset + np.minimum(x, 0.0).sum())
        if gap <= tol:
            converged = True
            break
        q = _greedy_min_vertex(memo, x)
        if np.any(np.all(np.abs(S - q) < _Z2, axis=1)):
            converged = True
            break
        scale = max((S * S).sum(axis=1).max(), q @ q, 1.0)
        if x @ q >= x @ x - _Z1 * scale:
            converged = True
            break
        S = np.vstack([S, q])
        lam = np.append(lam, 0.0)

        while True:
            coeffs, y = _affine_minimizer(S)
            if np.all(coeffs >= -_Z2):
                x, lam = y, np.maximum(coeffs, 0.0)
                break
            moving = lam - coeffs > _Z2
            theta = np.min(lam[moving] / (lam - coeffs)[moving])
            lam = theta * coeffs + (1 - theta) * lam
            keep = lam > _Z2
            if keep.all():
                keep[np.argmin(lam)] = False
            S = S[keep]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = lam @ S

    if not converged:
        raise ConvergenceError(
            f"min-norm point did not converge in {max_iter} iterations "
            "(tolerance too tight or the handle is not submodular)"
        )
    best_set, best_val = _round_level_sets(memo, x)
    gap = best_val - (offset + np.minimum(x, 0.0).sum())
    return MinResult(
        argmin=best_set,
        value=best_val,
        method="min_norm_point",
        iterations=iterations,
        gap=float(gap),
    )


def modular_min(
    weights: np.ndarray,
    offset: float = 0.0,
    constraint: Constraint = UNCONSTRAINED,
) -> MinResult:
    """Exact constrained minimization of offset + sum_{j in A} w(j).

    Unconstrained keeps exactly the strictly negative weights; at_least pads
    them with the smallest nonnegative ones; at_most keeps up to k of the
    most negative; exact keeps the k smallest. Ties break by element index.
    """
    w = np.asarray(weights, dtype=float)
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    n = len(w)
    constraint.check_feasible(n)
    order = np.lexsort((np.arange(n), w))
    negatives = [int(j) for j in order if w[j] < 0]

    if constraint.kind == "unconstrained":
        chosen = negatives
    elif constraint.kind == "at_least":
        chosen = list(negatives)
        if len(chosen) < constraint.k:
            pad = [int(j) for j in order if w[j] >= 0]
            chosen += pad[: constraint.k - len(chosen)]
    elif constraint.kind == "at_most":
        chosen = negatives[: constraint.k]
    else:
        chosen = [int(j) for j in order[: constraint.k]]

    s = ElementSet.from_indices(n, chosen)
    return MinResult(
        argmin=s,
        value=float(offset + w[list(chosen)].sum()) if chosen else float(offset),
        method="modular",
        exact=True,
    )

"""The SH-min / SH-max solvers and guarantee certification.

Union-Split minimizes (or maximizes) the submodular split surrogate
F'(A) = sum_i [f_i(A-B_i) + f_i(B_i-A)]; Best-B scans the input sets;
Major-Min iterates modular upper bounds; Rand-Set samples. Every returned
Solution carries the TRUE objective F at its set, never a surrogate value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .checks import curvature_bound_factor
from .errors import UnsupportedConstraintError
from .functions import SetFunction
from .instance import (
    Constraint,
    SHObjective,
    ShInstance,
    UnionSplitSurrogate,
    sh_objective,
    union_split_surrogate,
)
from .maximize import (
    bidirectional_greedy,
    brute_force_max,
    randomized_greedy_card,
)
from .minimize import (
    MIN_NORM_TOL,
    brute_force_min,
    modular_min,
    submodular_min_unconstrained,
)
from .sets import ElementSet

CERT_TOL = 1e-6
MAJOR_MIN_TOL = 1e-9
MAJOR_MIN_MAX_ITER = 100


@dataclass
class Solution:
    set: ElementSet
    value: float
    solver: str
    bound: Optional[float] = None
    iterations: int = 0
    seed: Optional[int] = None
    mean_value: Optional[float] = None
    trace: list = field(default_factory=list)


@dataclass
class Certificate:
    direction: str
    opt_value: float
    achieved_ratio: float
    bound: Optional[float]
    ok: bool
    opt_set: Optional[ElementSet] = None


@dataclass
class ModularBound:
    """offset + sum_{j in A} weights[j], an upper bound on F tight at ``anchor``."""

    offset: float
    weights: np.ndarray
    anchor: ElementSet
    mode: str

    def evaluate(self, a: ElementSet) -> float:
        return float(self.offset + self.weights[a.indicator()].sum())


def build_modular_bound(
    instance: ShInstance, anchor: ElementSet, mode: str
) -> ModularBound:
    """Superdifferential modular upper bound on F, tight at ``anchor``.

    For each i the bound on f_i is anchored at Y_i = anchor xor B_i with
    per-element coefficients: grow uses the drop-gain f_i(j | V-j) inside
    Y_i and the add-gain f_i(j | Y_i) outside; shrink uses f_i(j | Y_i - j)
    inside and the singleton f_i(j) outside. Re-expressing the sum over
    A xor B_i as a function of A flips the sign of coefficients of elements
    inside B_i and folds their base contribution into the offset.
    """
    if mode not in ("grow", "shrink"):
        raise ValueError(f"mode must be 'grow' or 'shrink', got {mode!r}")
    n = instance.n
    offset = 0.0
    weights = np.zeros(n)
    for f, b in zip(instance.functions, instance.b_sets):
        y = anchor ^ b
        in_y = y.indicator()
        if mode == "grow":
            coeff = np.where(in_y, f.top_drop_gains, f.add_gains(y))
        else:
            coeff = np.where(in_y, f.drop_gains(y), f.singleton_values)
        const = f.evaluate(y) - coeff[in_y].sum()
        in_b = b.indicator()
        offset += const + coeff[in_b].sum()
        weights += np.where(in_b, -coeff, coeff)
    return ModularBound(offset=float(offset), weights=weights, anchor=anchor, mode=mode)


def _singleton_bound(instance: ShInstance) -> tuple[float, np.ndarray]:
    """The subadditive bound f_i(Y) <= sum_{j in Y} f_i(j), in A-space.

    This is the surrogate whose constrained minimizer satisfies the
    curvature approximation factor; Major-Min keeps it among its candidates
    so the guarantee holds from the first improvement step.
    """
    offset = 0.0
    weights = np.zeros(instance.n)
    for f, b in zip(instance.functions, instance.b_sets):
        coeff = f.singleton_values
        in_b = b.indicator()
        offset += coeff[in_b].sum()
        weights += np.where(in_b, -coeff, coeff)
    return float(offset), weights


def union_split_min(instance: ShInstance, tol: float = MIN_NORM_TOL) -> Solution:
    """Split F into a submodular surrogate and minimize it exactly.

    Unconstrained only; the sandwich F <= F' <= 2F makes the result a
    2-approximation for SH-min.
    """
    if not instance.constraint.is_unconstrained:
        raise UnsupportedConstraintError(
            "union_split_min covers the unconstrained problem only"
        )
    surrogate = union_split_surrogate(instance)
    res = submodular_min_unconstrained(surrogate, tol=tol)
    return Solution(
        set=res.argmin,
        value=sh_objective(instance, res.argmin),
        solver="union-split",
        bound=2.0,
        iterations=res.iterations,
    )


def best_b(instance: ShInstance) -> Solution:
    """Return the best of B_1..B_m by true objective value.

    Exact for m=1; a (2 - 2/m)-approximation for homogeneous unconstrained
    instances. Heterogeneous input is allowed but carries no bound.
    """
    best_set = None
    best_val = math.inf
    for b in instance.b_sets:
        v = sh_objective(instance, b)
        if v < best_val:
            best_set, best_val = b, v
    if instance.constraint.is_unconstrained and (instance.homogeneous or instance.m == 1):
        bound = 1.0 if instance.m == 1 else 2.0 - 2.0 / instance.m
    else:
        bound = None
    return Solution(set=best_set, value=best_val, solver="best-b", bound=bound)


def major_min(
    instance: ShInstance,
    mode: str = "both",
    tol: float = MAJOR_MIN_TOL,
    max_iter: int = MAJOR_MIN_MAX_ITER,
) -> Solution:
    """Majorize-minimize: build modular upper bounds at the current set and
    minimize them under the constraint until the true objective stops
    strictly improving.

    ``mode`` selects the superdifferential ('grow', 'shrink', or 'both');
    the subadditive singleton bound is always kept as an extra candidate.
    Moves are accepted only on strict improvement of the true F, so the
    objective trace is nonincreasing. The reported ``bound`` is the
    curvature approximation factor evaluated at the final (best known) set.
    """
    if mode not in ("grow", "shrink", "both"):
        raise ValueError(f"mode must be 'grow', 'shrink' or 'both', got {mode!r}")
    modes = ("grow", "shrink") if mode == "both" else (mode,)
    constraint = instance.constraint
    constraint.check_feasible(instance.n)
    objective = SHObjective(instance)

    empty = ElementSet.empty(instance.n)
    if constraint.admits(0):
        current = empty
    else:
        seed_bound = build_modular_bound(instance, empty, "grow")
        current = modular_min(seed_bound.weights, seed_bound.offset, constraint).argmin
    current_val = objective.evaluate(current)
    trace = [current_val]

    iterations = 0
    singleton_offset, singleton_weights = _singleton_bound(instance)
    for _ in range(max_iter):
        candidates = [
            modular_min(singleton_weights, singleton_offset, constraint).argmin
        ]
        for m in modes:
            bound = build_modular_bound(instance, current, m)
            candidates.append(modular_min(bound.weights, bound.offset, constraint).argmin)
        best_set, best_val = None, math.inf
        for cand in candidates:
            v = objective.evaluate(cand)
            if v < best_val:
                best_set, best_val = cand, v
        if best_val < current_val - tol:
            current, current_val = best_set, best_val
            trace.append(current_val)
            iterations += 1
        else:
            break

    factor = major_min_bound_factor(instance, current)
    return Solution(
        set=current,
        value=current_val,
        solver="major-min",
        bound=factor,
        iterations=iterations,
        trace=trace,
    )


def major_min_bound_factor(instance: ShInstance, a_star: ElementSet) -> float:
    """max_i |Y_i| / (1 + (|Y_i|-1)(1-kappa_{f_i}(Y_i))) at Y_i = a_star xor B_i."""
    factor = 1.0
    for f, b in zip(instance.functions, instance.b_sets):
        factor = max(factor, curvature_bound_factor(f, a_star ^ b))
    return factor


def union_split_max(instance: ShInstance, seed: Optional[int] = None) -> Solution:
    """Maximize the split surrogate, score by the true objective.

    Unconstrained: double greedy on F' (deterministic 1/6 floor; with a
    seed, the randomized variant targeting 1/4 in expectation). Cardinality
    at_most(k): seeded randomized greedy, 1/(2e) in expectation. The factor
    2 between F and F' is where the guarantee halves.
    """
    surrogate = union_split_surrogate(instance)
    constraint = instance.constraint
    if constraint.is_unconstrained:
        res = bidirectional_greedy(surrogate, seed=seed)
        bound = 1.0 / 4.0 if seed is not None else 1.0 / 6.0
    elif constraint.kind == "at_most":
        res = randomized_greedy_card(surrogate, constraint.k, seed=0 if seed is None else seed)
        bound = 1.0 / (2.0 * math.e)
    else:
        raise UnsupportedConstraintError(
            f"union_split_max supports unconstrained or at_most, not {constraint}"
        )
    return Solution(
        set=res.argmax,
        value=sh_objective(instance, res.argmax),
        solver="union-split-max",
        bound=bound,
        seed=seed,
        trace=res.trace,
    )


def rand_set_max(instance: ShInstance, seed: int, draws: int = 1000) -> Solution:
    """Evaluate F on ``draws`` coin-flip subsets and keep the best.

    The 1/8 guarantee governs the expectation, reported as ``mean_value``.
    """
    if not instance.constraint.is_unconstrained:
        raise UnsupportedConstraintError("rand_set_max covers the unconstrained problem only")
    if draws < 1:
        raise ValueError("draws must be >= 1")
    rng = np.random.default_rng(seed)
    n = instance.n
    objective = SHObjective(instance)
    best_set, best_val, total = None, -math.inf, 0.0
    for _ in range(draws):
        picks = np.flatnonzero(rng.random(n) < 0.5)
        s = ElementSet.from_indices(n, (int(j) for j in picks))
        v = objective.evaluate(s)
        total += v
        if v > best_val:
            best_set, best_val = s, v
    return Solution(
        set=best_set,
        value=best_val,
        solver="rand-set",
        bound=1.0 / 8.0,
        seed=seed,
        mean_value=total / draws,
    )


def certify(instance: ShInstance, solution: Solution, direction: str) -> Certificate:
    """Compare a solution against the brute-force optimum and its declared bound.

    Minimization ratios are value/OPT >= 1 and must stay at most the bound;
    maximization ratios are value/OPT <= 1 and must stay at least the bound.
    For Major-Min the bound is re-evaluated at the true optimal set, which
    is what the guarantee is stated against.
    """
    if direction not in ("min", "max"):
        raise ValueError("direction must be 'min' or 'max'")
    objective = SHObjective(instance)
    if direction == "min":
        opt = brute_force_min(objective, instance.constraint)
        opt_val = opt.value
        opt_set = opt.argmin
    else:
        opt = brute_force_max(objective, instance.constraint)
        opt_val = opt.value
        opt_set = opt.argmax

    if abs(opt_val) <= 1e-12:
        ratio = 1.0 if abs(solution.value) <= 1e-9 else math.inf
    else:
        ratio = solution.value / opt_val

    bound = solution.bound
    if solution.solver == "major-min":
        bound = major_min_bound_factor(instance, opt_set)

    if bound is None:
        ok = True
    elif direction == "min":
        ok = ratio <= bound + CERT_TOL
    else:
        ok = ratio >= bound - CERT_TOL
    return Certificate(
        direction=direction,
        opt_value=opt_val,
        achieved_ratio=ratio,
        bound=bound,
        ok=ok,
        opt_set=opt_set,
    )

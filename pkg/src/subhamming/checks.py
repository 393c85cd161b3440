"""Behavioral checkers: polymatroid properties, metric axioms, curvature.

Exhaustive modes run on full 2^n value tables (pairs capped at n<=14,
triples at n<=6 by default); randomized modes sample with a seeded
generator. Every failure carries a concrete witness that reproduces the
violation when re-evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import PolymatroidValidationError
from .functions import SetFunction
from .sets import ElementSet

CHECK_TOL = 1e-9
EXHAUSTIVE_PAIR_LIMIT = 14
EXHAUSTIVE_TRIPLE_LIMIT = 6
_ZERO_TOL = 1e-12


@dataclass
class Witness:
    """Sets and the values whose comparison failed."""

    sets: tuple
    lhs: float
    rhs: float


@dataclass
class PropertyReport:
    normalized: bool
    positive: bool
    monotone: bool
    submodular: bool
    mode: str
    trials: int = 0
    seed: Optional[int] = None
    normalized_value: float = 0.0
    positive_witness: Optional[ElementSet] = None
    monotone_witness: Optional[Witness] = None
    submodular_witness: Optional[Witness] = None

    @property
    def ok(self) -> bool:
        return self.normalized and self.positive and self.monotone and self.submodular


@dataclass
class MetricReport:
    nonnegative: bool
    identity: bool
    symmetric: bool
    triangle: bool
    mode: str
    trials: int = 0
    seed: Optional[int] = None
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.nonnegative and self.identity and self.symmetric and self.triangle


def _exhaustive_property_check(f: SetFunction, tol: float) -> PropertyReport:
    n = f.n
    tab = f.value_table()
    masks = np.arange(1 << n, dtype=np.uint32)

    report = PropertyReport(
        normalized=True, positive=True, monotone=True, submodular=True,
        mode="exhaustive", normalized_value=float(tab[0]),
    )
    if abs(tab[0]) > tol:
        report.normalized = False

    nonpos = np.flatnonzero(tab[1:] <= _ZERO_TOL)
    if len(nonpos):
        report.positive = False
        report.positive_witness = ElementSet(n, int(nonpos[0]) + 1)

    for j in range(n):
        bit = np.uint32(1 << j)
        without = masks[(masks & bit) == 0]
        bad = np.flatnonzero(tab[without | bit] < tab[without] - tol)
        if len(bad):
            m = int(without[bad[0]])
            a, b = ElementSet(n, m), ElementSet(n, m | (1 << j))
            report.monotone = False
            report.monotone_witness = Witness((a, b), float(tab[m]), float(tab[m | (1 << j)]))
            break

    # Marginal form of submodularity: f(X+i) + f(X+j) >= f(X+i+j) + f(X)
    # for all X and i != j outside X; equivalent to the pairwise definition.
    done = False
    for i in range(n):
        if done:
            break
        for j in range(i + 1, n):
            bi, bj = np.uint32(1 << i), np.uint32(1 << j)
            base = masks[(masks & (bi | bj)) == 0]
            lhs = tab[base | bi] + tab[base | bj]
            rhs = tab[base | bi | bj] + tab[base]
            bad = np.flatnonzero(lhs < rhs - tol)
            if len(bad):
                m = int(base[bad[0]])
                a1 = ElementSet(n, m | (1 << i))
                a2 = ElementSet(n, m | (1 << j))
                report.submodular = False
                report.submodular_witness = Witness(
                    (a1, a2), float(lhs[bad[0]]), float(rhs[bad[0]])
                )
                done = True
                break
    return report


def _random_set(rng: np.random.Generator, n: int) -> ElementSet:
    return ElementSet(n, int.from_bytes(rng.bytes((n + 7) // 8), "little") & ((1 << n) - 1))


def _randomized_property_check(f, trials: int, seed, tol: float) -> PropertyReport:
    n = f.n
    rng = np.random.default_rng(seed)
    report = PropertyReport(
        normalized=True, positive=True, monotone=True, submodular=True,
        mode="randomized", trials=trials, seed=seed,
        normalized_value=float(f.evaluate(ElementSet.empty(n))),
    )
    if abs(report.normalized_value) > tol:
        report.normalized = False

    for _ in range(trials):
        a = _random_set(rng, n)
        if len(a) and report.positive and f.evaluate(a) <= _ZERO_TOL:
            report.positive = False
            report.positive_witness = a
        if report.monotone:
            j = int(rng.integers(n))
            x = a.remove(j)
            lo, hi = f.evaluate(x), f.evaluate(x.add(j))
            if hi < lo - tol:
                report.monotone = False
                report.monotone_witness = Witness((x, x.add(j)), lo, hi)
        if report.submodular:
            b = _random_set(rng, n)
            lhs = f.evaluate(a) + f.evaluate(b)
            rhs = f.evaluate(a | b) + f.evaluate(a & b)
            if lhs < rhs - tol:
                report.submodular = False
                report.submodular_witness = Witness((a, b), lhs, rhs)
        if not (report.positive or report.monotone or report.submodular):
            break
    return report


def check_polymatroid(
    f: SetFunction,
    mode: str = "exhaustive",
    trials: int = 2000,
    seed: Optional[int] = None,
    tol: float = CHECK_TOL,
    exhaustive_limit: int = EXHAUSTIVE_PAIR_LIMIT,
) -> PropertyReport:
    """Verify normalized / positive / monotone / submodular, with witnesses."""
    if mode == "exhaustive":
        if f.n > exhaustive_limit:
            raise ValueError(
                f"exhaustive mode capped at n <= {exhaustive_limit}; use randomized"
            )
        return _exhaustive_property_check(f, tol)
    if mode == "randomized":
        return _randomized_property_check(f, trials, seed, tol)
    raise ValueError(f"unknown mode {mode!r}")


def _exhaustive_metric_check(f: SetFunction, tol: float) -> MetricReport:
    n = f.n
    tab = f.value_table()
    masks = np.arange(1 << n, dtype=np.uint32)
    report = MetricReport(
        nonnegative=True, identity=True, symmetric=True, triangle=True,
        mode="exhaustive",
    )

    neg = np.flatnonzero(tab < -tol)
    if len(neg):
        m = int(neg[0])
        report.nonnegative = False
        report.witnesses["nonnegative"] = Witness(
            (ElementSet(n, m), ElementSet.empty(n)), float(tab[m]), 0.0
        )

    if abs(tab[0]) > tol:
        report.identity = False
        report.witnesses["identity"] = Witness(
            (ElementSet.empty(n), ElementSet.empty(n)), float(tab[0]), 0.0
        )
    else:
        zero = np.flatnonzero(np.abs(tab[1:]) <= _ZERO_TOL)
        if len(zero):
            m = int(zero[0]) + 1
            report.identity = False
            report.witnesses["identity"] = Witness(
                (ElementSet(n, m), ElementSet.empty(n)), float(tab[m]), 0.0
            )

    # d(A,B) = f(A xor B) is symmetric because xor is; verify on a sample of
    # evaluations so oracle-backed handles are still exercised.
    for m in range(min(1 << n, 32)):
        a, b = ElementSet(n, m), ElementSet(n, (m * 7 + 3) % (1 << n))
        if abs(f.evaluate(a ^ b) - f.evaluate(b ^ a)) > tol:
            report.symmetric = False
            report.witnesses["symmetric"] = Witness(
                (a, b), f.evaluate(a ^ b), f.evaluate(b ^ a)
            )
            break

    # Triangle over all triples reduces to xor-subadditivity of the table:
    # d(A,B) <= d(A,C) + d(C,B) for all A,B,C iff
    # tab[x] <= tab[y] + tab[x^y] for all masks x, y.
    for y in range(1 << n):
        lhs = tab
        rhs = tab[y] + tab[masks ^ np.uint32(y)]
        bad = np.flatnonzero(lhs > rhs + tol)
        if len(bad):
            x = int(bad[0])
            a = ElementSet.empty(n)
            b = ElementSet(n, x)
            c = ElementSet(n, y)
            report.triangle = False
            report.witnesses["triangle"] = Witness(
                (a, b, c), float(tab[x]), float(rhs[x])
            )
            break
    return report


def _randomized_metric_check(f, trials: int, seed, tol: float) -> MetricReport:
    n = f.n
    rng = np.random.default_rng(seed)
    report = MetricReport(
        nonnegative=True, identity=True, symmetric=True, triangle=True,
        mode="randomized", trials=trials, seed=seed,
    )
    for _ in range(trials):
        a, b, c = (_random_set(rng, n) for _ in range(3))
        dab = f.evaluate(a ^ b)
        if report.nonnegative and dab < -tol:
            report.nonnegative = False
            report.witnesses["nonnegative"] = Witness((a, b), dab, 0.0)
        if report.identity:
            if a.bits != b.bits and abs(dab) <= _ZERO_TOL:
                report.identity = False
                report.witnesses["identity"] = Witness((a, b), dab, 0.0)
            if abs(f.evaluate(a ^ a)) > tol:
                report.identity = False
                report.witnesses["identity"] = Witness((a, a), f.evaluate(a ^ a), 0.0)
        if report.symmetric and abs(dab - f.evaluate(b ^ a)) > tol:
            report.symmetric = False
            report.witnesses["symmetric"] = Witness((a, b), dab, f.evaluate(b ^ a))
        if report.triangle:
            dac, dcb = f.evaluate(a ^ c), f.evaluate(c ^ b)
            if dab > dac + dcb + tol:
                report.triangle = False
                report.witnesses["triangle"] = Witness((a, b, c), dab, dac + dcb)
        if not report.ok:
            break
    return report


def metric_axiom_check(
    f: SetFunction,
    mode: str = "exhaustive",
    trials: int = 2000,
    seed: Optional[int] = None,
    tol: float = CHECK_TOL,
    exhaustive_limit: int = EXHAUSTIVE_TRIPLE_LIMIT,
) -> MetricReport:
    """Check all four metric axioms of d_f(A,B) = f(A xor B)."""
    if mode == "exhaustive":
        if f.n > exhaustive_limit:
            raise ValueError(
                f"exhaustive triple mode capped at n <= {exhaustive_limit}; use randomized"
            )
        return _exhaustive_metric_check(f, tol)
    if mode == "randomized":
        return _randomized_metric_check(f, trials, seed, tol)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class CurvatureReport:
    """kappa = 1 - min_j f(j | V-j)/f(j); 0 for modular, at most 1."""

    kappa_total: float
    gain_ratios: np.ndarray
    _f: SetFunction = None

    def kappa_restricted(self, y: ElementSet) -> float:
        return restricted_curvature(self._f, y)


def curvature(f: SetFunction) -> CurvatureReport:
    singles = f.singleton_values
    if np.any(singles <= 0):
        raise PolymatroidValidationError(
            "curvature needs f({j}) > 0 for every element (positivity)"
        )
    ratios = f.top_drop_gains / singles
    return CurvatureReport(
        kappa_total=float(1.0 - ratios.min()), gain_ratios=ratios, _f=f
    )


def restricted_curvature(f: SetFunction, y: ElementSet) -> float:
    """Curvature of f restricted to Y: 1 - min_{j in Y} f(j | Y-j)/f(j)."""
    if len(y) == 0:
        return 0.0
    singles = f.singleton_values[y.indices()]
    if np.any(singles <= 0):
        raise PolymatroidValidationError(
            "restricted curvature needs f({j}) > 0 on the query set"
        )
    drops = f.drop_gains(y)[y.indices()]
    return float(1.0 - (drops / singles).min())


def curvature_bound_factor(f: SetFunction, y: ElementSet) -> float:
    """|Y| / (1 + (|Y|-1)(1-kappa_f(Y))): the modular-surrogate blowup on Y."""
    size = len(y)
    if size == 0:
        return 1.0
    kappa = restricted_curvature(f, y)
    return size / (1.0 + (size - 1.0) * (1.0 - kappa))

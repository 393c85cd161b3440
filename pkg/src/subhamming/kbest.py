"""Diverse k-best subset selection.

Produces summaries A_1..A_k of fixed size ell, each maximizing
g(A) + sum_{i<t} f(A xor A_i) against the summaries already chosen. Three
optimizers: HM folds a (modular) Hamming diversity into greedy, SP runs
greedy on the raw objective, TP runs greedy on the Union-Split form
g(A) + sum_i [f(A - A_i) + f(A_i - A)]. Greedy always runs to exactly ell
elements, adding the least-bad element even past negative marginals (the
size constraint is hard; none of the optimizers carries a guarantee here).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InfeasibleConstraintError
from .functions import PolymatroidFunction, SetFunction
from .sets import ElementSet

OPTIMIZERS = ("hm", "sp", "tp")


@dataclass
class KBestResult:
    summaries: list[ElementSet]
    qualities: list[float]
    diversities: list[float]
    method: str

    @property
    def objectives(self) -> list[float]:
        return [q + d for q, d in zip(self.qualities, self.diversities)]

    def pairwise_overlap(self) -> np.ndarray:
        k = len(self.summaries)
        out = np.zeros((k, k))
        for s in range(k):
            for t in range(k):
                if s != t:
                    out[s, t] = len(self.summaries[s] & self.summaries[t])
        return out

    def mean_pairwise_overlap(self) -> float:
        k = len(self.summaries)
        if k < 2:
            return 0.0
        return float(self.pairwise_overlap().sum() / (k * (k - 1)))


def _greedy_to_size(n: int, ell: int, marginal: Callable[[int], float], commit) -> ElementSet:
    """Pick ell elements, best marginal first (ties by index), even if negative."""
    s = ElementSet.empty(n)
    for _ in range(ell):
        best_j, best_gain = -1, -np.inf
        for j in range(n):
            if j in s:
                continue
            gain = marginal(j)
            if gain > best_gain:
                best_j, best_gain = j, gain
        s = s.add(best_j)
        commit(best_j)
    return s


def _next_summary_hm(
    quality: SetFunction, prev: list[ElementSet], ell: int
) -> ElementSet:
    n = quality.n
    counts = np.zeros(n)
    for a in prev:
        counts += a.indicator()
    div_w = len(prev) - 2.0 * counts  # per-element Hamming contribution
    state = {"s": ElementSet.empty(n)}

    def marginal(j: int) -> float:
        return quality.gain(j, state["s"]) + div_w[j]

    def commit(j: int) -> None:
        state["s"] = state["s"].add(j)

    return _greedy_to_size(n, ell, marginal, commit)


def _next_summary_sp(
    quality: SetFunction, diversity: SetFunction, prev: list[ElementSet], ell: int
) -> ElementSet:
    n = quality.n
    state = {"s": ElementSet.empty(n), "shifted": [a for a in prev]}

    def marginal(j: int) -> float:
        total = quality.gain(j, state["s"])
        for y in state["shifted"]:  # y = current A xor A_i
            if j in y:
                total -= diversity.evaluate(y) - diversity.evaluate(y.remove(j))
            else:
                total += diversity.gain(j, y)
        return total

    def commit(j: int) -> None:
        state["s"] = state["s"].add(j)
        state["shifted"] = [y ^ ElementSet.singleton(n, j) for y in state["shifted"]]

    return _greedy_to_size(n, ell, marginal, commit)


def _next_summary_tp(
    quality: SetFunction, diversity: SetFunction, prev: list[ElementSet], ell: int
) -> ElementSet:
    n = quality.n
    # Track both split parts per previous summary: P_i = A - A_i, Q_i = A_i - A.
    state = {
        "s": ElementSet.empty(n),
        "p": [ElementSet.empty(n) for _ in prev],
        "q": [a for a in prev],
    }

    def marginal(j: int) -> float:
        total = quality.gain(j, state["s"])
        for a_i, p, q in zip(prev, state["p"], state["q"]):
            if j in a_i:
                total -= diversity.evaluate(q) - diversity.evaluate(q.remove(j))
            else:
                total += diversity.gain(j, p)
        return total

    def commit(j: int) -> None:
        state["s"] = state["s"].add(j)
        state["p"] = [
            p if j in a_i else p.add(j) for a_i, p in zip(prev, state["p"])
        ]
        state["q"] = [
            q.remove(j) if j in a_i else q for a_i, q in zip(prev, state["q"])
        ]

    return _greedy_to_size(n, ell, marginal, commit)


def diverse_kbest(
    quality: PolymatroidFunction,
    diversity: Optional[PolymatroidFunction],
    k: int,
    ell: int,
    optimizer: str = "tp",
    seed: Optional[int] = None,
) -> KBestResult:
    """Sequentially build k summaries of size ell.

    HM diversity is the Hamming distance and is built in (pass diversity as
    None); SP and TP require a diversity polymatroid, and None there drops
    the diversity term entirely, so every summary is the plain greedy
    quality maximizer. All three optimizers are deterministic; ``seed`` is
    accepted for harness uniformity only.
    """
    if optimizer not in OPTIMIZERS:
        raise ValueError(f"optimizer must be one of {OPTIMIZERS}, got {optimizer!r}")
    if optimizer == "hm" and diversity is not None:
        raise ValueError("the hm optimizer defines its own Hamming diversity")
    n = quality.n
    if ell > n:
        raise InfeasibleConstraintError(f"ell={ell} exceeds ground set size {n}")
    if k < 1:
        raise ValueError("need k >= 1 summaries")
    if diversity is not None and diversity.n != n:
        raise ValueError("quality and diversity functions disagree on ground set size")

    summaries: list[ElementSet] = []
    qualities: list[float] = []
    diversities: list[float] = []
    for _ in range(k):
        if optimizer == "hm":
            a = _next_summary_hm(quality, summaries, ell)
        elif diversity is None:
            a = _next_summary_hm(quality, [], ell)
        elif optimizer == "sp":
            a = _next_summary_sp(quality, diversity, summaries, ell)
        else:
            a = _next_summary_tp(quality, diversity, summaries, ell)
        qualities.append(quality.evaluate(a))
        if optimizer == "hm":
            diversities.append(float(sum(len(a ^ s) for s in summaries)))
        elif diversity is None:
            diversities.append(0.0)
        else:
            diversities.append(float(sum(diversity.evaluate(a ^ s) for s in summaries)))
        summaries.append(a)
    return KBestResult(
        summaries=summaries,
        qualities=qualities,
        diversities=diversities,
        method=optimizer,
    )


def synth_kbest_collection(
    n: int = 60, num_clusters: int = 6, dim: int = 8, seed: int = 0
) -> np.ndarray:
    """Similarity matrix for a clustered synthetic item collection.

    Items are nonnegative feature vectors around per-cluster centers;
    similarities are dot products, so within-cluster entries are large and
    the matrix is a valid facility-location parameter (positive diagonal).
    """
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.5, 1.5, size=(num_clusters, dim))
    feats = np.empty((n, dim))
    for i in range(n):
        c = i % num_clusters
        feats[i] = np.clip(centers[c] + rng.normal(0.0, 0.2, size=dim), 0.05, None)
    return feats @ feats.T

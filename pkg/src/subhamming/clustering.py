"""k-means over token-set documents with a submodular Hamming distance.

Documents are subsets of a feature universe; cluster centers are sets of at
least ``ell`` features found by solving the centroid SH-min problem
min_{|A| >= ell} sum_{i in cluster} f(A xor B_i) -- exactly for modular f,
via Major-Min otherwise. Assignment is quota-balanced: documents are
visited in a seeded random order and each takes the nearest center that
still has room.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InfeasibleConstraintError, PolymatroidValidationError
from .functions import PolymatroidFunction, SetFunction, metric_distance
from .instance import Constraint, ShInstance, modular_representation
from .minimize import brute_force_min, modular_min
from .sets import ElementSet
from .solvers import major_min


@dataclass
class Corpus:
    n: int
    docs: list[ElementSet]
    labels: Optional[list[int]] = None
    classes: Optional[list[tuple[int, ...]]] = None

    def __post_init__(self):
        for d in self.docs:
            if d.n != self.n:
                raise ValueError("documents must live on the corpus ground set")
        if self.labels is not None and len(self.labels) != len(self.docs):
            raise ValueError("one label per document required")
        if self.classes is not None:
            seen = np.zeros(self.n, dtype=bool)
            for cls in self.classes:
                for j in cls:
                    if seen[j]:
                        raise ValueError("word classes must be disjoint")
                    seen[j] = True
            if not seen.all():
                raise ValueError("word classes must cover the feature universe")

    @property
    def num_docs(self) -> int:
        return len(self.docs)


@dataclass
class ClusteringResult:
    k: int
    centers: list[ElementSet]
    assignments: list[int]
    corpus: Corpus
    accuracy: Optional[float] = None
    objective: float = 0.0
    iterations: int = 0
    trace: list = field(default_factory=list)

    def cluster_members(self, c: int) -> list[int]:
        return [i for i, a in enumerate(self.assignments) if a == c]


def synth_corpus(
    num_docs: int = 100,
    num_clusters: int = 10,
    n: int = 1000,
    num_word_classes: int = 100,
    words_per_doc: int = 10,
    overlap_mode: str = "disjoint",
    seed: int = 0,
) -> Corpus:
    """Synthetic labeled corpus: word classes are split evenly across true
    clusters and each document draws its words from its cluster's classes.

    In disjoint mode each document takes one word from each associated class
    and no word repeats across documents; in sampled mode each document
    samples its words from the pooled associated classes, so same-cluster
    documents can share words.
    """
    if overlap_mode not in ("disjoint", "sampled"):
        raise ValueError(f"unknown overlap mode {overlap_mode!r}")
    if num_docs % num_clusters:
        raise ValueError("num_clusters must divide num_docs")
    if num_word_classes % num_clusters:
        raise ValueError("num_clusters must divide num_word_classes")
    if n % num_word_classes:
        raise ValueError("num_word_classes must divide n")
    docs_per_cluster = num_docs // num_clusters
    classes_per_cluster = num_word_classes // num_clusters
    words_per_class = n // num_word_classes
    if overlap_mode == "disjoint":
        if words_per_doc != classes_per_cluster:
            raise ValueError(
                "disjoint mode needs words_per_doc == classes per cluster "
                f"({classes_per_cluster})"
            )
        if docs_per_cluster > words_per_class:
            raise ValueError("not enough words per class for distinct assignments")
    elif words_per_doc > classes_per_cluster * words_per_class:
        raise ValueError("words_per_doc exceeds the cluster word pool")

    rng = np.random.default_rng(seed)
    classes = [
        tuple(range(c * words_per_class, (c + 1) * words_per_class))
        for c in range(num_word_classes)
    ]
    docs: list[ElementSet] = []
    labels: list[int] = []
    for cluster in range(num_clusters):
        assoc = range(cluster * classes_per_cluster, (cluster + 1) * classes_per_cluster)
        if overlap_mode == "disjoint":
            picks = {
                w: rng.permutation(words_per_class)[:docs_per_cluster]
                for w in assoc
            }
            for d in range(docs_per_cluster):
                words = [classes[w][picks[w][d]] for w in assoc]
                docs.append(ElementSet.from_indices(n, words))
                labels.append(cluster)
        else:
            pool = np.concatenate([np.asarray(classes[w]) for w in assoc])
            for _ in range(docs_per_cluster):
                words = rng.choice(pool, size=words_per_doc, replace=False)
                docs.append(ElementSet.from_indices(n, (int(w) for w in words)))
                labels.append(cluster)
    return Corpus(n=n, docs=docs, labels=labels, classes=classes)


def sh_centroid(
    docs: Sequence[ElementSet], f: PolymatroidFunction, ell: int
) -> ElementSet:
    """argmin_{|A| >= ell} sum_i f(A xor B_i): exact for modular f, Major-Min otherwise."""
    if not docs:
        raise ValueError("cannot build a centroid for an empty cluster")
    n = docs[0].n
    if ell > n:
        raise InfeasibleConstraintError(f"ell={ell} exceeds ground set size {n}")
    constraint = Constraint.at_least(ell)
    instance = ShInstance.from_shared(f, list(docs), constraint)
    if f.variant == "modular":
        offset, weights = modular_representation(instance)
        return modular_min(weights, offset, constraint).argmin
    return major_min(instance).set


def accuracy(assignments: Sequence[int], truth: Sequence[int]) -> float:
    """Fraction of agreements under the best matching of predicted to true labels."""
    if len(assignments) != len(truth):
        raise ValueError("assignment and truth lengths differ")
    preds = np.asarray(assignments)
    trues = np.asarray(truth)
    k = int(max(preds.max(), trues.max())) + 1
    table = np.zeros((k, k))
    for p, t in zip(preds, trues):
        table[p, t] += 1
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum() / len(assignments))


def kmeans_score(result: ClusteringResult, g: SetFunction) -> float:
    """sum_j sum_{i in C_j} g(center_j xor B_i) under an arbitrary scoring g."""
    total = 0.0
    for i, c in enumerate(result.assignments):
        total += g.evaluate(result.centers[c] ^ result.corpus.docs[i])
    return float(total)


def _nearest(
    doc: ElementSet,
    centers: list[ElementSet],
    f: SetFunction,
    counts: np.ndarray,
    quota: int,
) -> int:
    best, best_d = -1, math.inf
    for c, center in enumerate(centers):
        if counts[c] >= quota:
            continue
        d = metric_distance(f, doc, center)
        if d < best_d:
            best, best_d = c, d
    return best


def _init_centers(
    corpus: Corpus, f: SetFunction, k: int, init: str, rng: np.random.Generator
) -> list[ElementSet]:
    docs = corpus.docs
    first = int(rng.integers(corpus.num_docs))
    chosen = [first]
    min_dist = np.array([metric_distance(f, d, docs[first]) for d in docs])
    while len(chosen) < k:
        if init == "kmeanspp":
            weights = min_dist**2
            total = weights.sum()
            if total <= 0:
                remaining = [i for i in range(corpus.num_docs) if i not in chosen]
                pick = int(rng.choice(remaining))
            else:
                pick = int(rng.choice(corpus.num_docs, p=weights / total))
        else:  # farthest_first
            pick = int(np.argmax(min_dist))
        chosen.append(pick)
        dist_new = np.array([metric_distance(f, d, docs[pick]) for d in docs])
        min_dist = np.minimum(min_dist, dist_new)
    return [docs[i] for i in chosen]


def sh_kmeans(
    corpus: Corpus,
    f: PolymatroidFunction,
    k: int,
    ell: int,
    init: str = "kmeanspp",
    quota: Optional[int] = None,
    max_iter: int = 50,
    seed: int = 0,
) -> ClusteringResult:
    """Balanced k-means under the distance d_f; see the module docstring.

    Stops when the assignment repeats or after ``max_iter`` rounds (the
    quota makes assignment order-dependent, so a cap guards against cycling).
    """
    if init not in ("kmeanspp", "farthest_first"):
        raise ValueError(f"unknown init {init!r}")
    num_docs = corpus.num_docs
    if quota is None:
        quota = math.ceil(num_docs / k)
    if k * quota < num_docs:
        raise InfeasibleConstraintError(
            f"quota {quota} too small: {k} clusters cannot hold {num_docs} documents"
        )
    rng = np.random.default_rng(seed)
    centers = _init_centers(corpus, f, k, init, rng)
    assignments = [-1] * num_docs
    trace = []
    iterations = 0

    for iterations in range(1, max_iter + 1):
        counts = np.zeros(k, dtype=int)
        new_assign = [-1] * num_docs
        for d in rng.permutation(num_docs):
            c = _nearest(corpus.docs[d], centers, f, counts, quota)
            new_assign[d] = c
            counts[c] += 1

        for c in range(k):
            if counts[c] == 0:
                worst, worst_d = -1, -math.inf
                for d in range(num_docs):
                    if counts[new_assign[d]] <= 1:
                        continue
                    dist = metric_distance(f, corpus.docs[d], centers[new_assign[d]])
                    if dist > worst_d:
                        worst, worst_d = d, dist
                counts[new_assign[worst]] -= 1
                new_assign[worst] = c
                counts[c] += 1
                centers[c] = corpus.docs[worst]

        if new_assign == assignments:
            break
        assignments = new_assign
        centers = [
            sh_centroid([corpus.docs[i] for i in range(num_docs) if assignments[i] == c], f, ell)
            for c in range(k)
        ]
        objective = sum(
            metric_distance(f, centers[c], corpus.docs[i])
            for i, c in enumerate(assignments)
        )
        trace.append(objective)

    result = ClusteringResult(
        k=k,
        centers=centers,
        assignments=assignments,
        corpus=corpus,
        objective=trace[-1] if trace else 0.0,
        iterations=iterations,
        trace=trace,
    )
    if corpus.labels is not None:
        result.accuracy = accuracy(assignments, corpus.labels)
    return result

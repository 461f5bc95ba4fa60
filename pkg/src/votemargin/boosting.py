"""AdaBoost over finite stump classes and synthetic tasks with exact losses.

The stump class over a d-dimensional integer lattice contains both
polarities of every axis-aligned threshold stump plus the two constant
hypotheses, so |H| = 2·d·k + 2 exactly and margin rescaling never needs to
extend the class.  Synthetic tasks carry an explicit distribution, so true
margin losses of boosted classifiers are exact expectations rather than
estimates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DataDistribution,
    DiscreteDomain,
    HypothesisClass,
    LabeledSample,
    VotingClassifier,
    margins_on_sample,
)

__all__ = [
    "StumpClassSpec",
    "build_stump_class",
    "generate_synthetic",
    "BoostingRound",
    "BoostingRun",
    "adaboost",
    "MarginHistogram",
    "margin_histogram",
    "EPSILON_CLAMP",
]

#: Weighted-error clamp keeping α_t finite on perfect or hopeless stumps.
EPSILON_CLAMP = 1e-12


@dataclass(frozen=True)
class StumpClassSpec:
    """Axis-aligned threshold stumps over the lattice {0..k}^d.

    The class holds, for every feature a and integer threshold t < k, the
    stump 1{x_a ≤ t} in both polarities, plus the two constants:
    |H| = 2·d·k + 2.
    """

    d: int
    k: int

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")

    @property
    def H_size(self) -> int:
        return 2 * self.d * self.k + 2

    @property
    def domain_size(self) -> int:
        return (self.k + 1) ** self.d


def build_stump_class(spec: StumpClassSpec):
    """(domain, class) for a stump spec.

    Domain points are d-tuples over {0..k} in lexicographic order.  Rows:
    positive stumps feature-major/threshold-ascending, then the matching
    negatives, then the constant +1 and constant −1 hypotheses.
    """
    points = list(itertools.product(range(spec.k + 1), repeat=spec.d))
    domain = DiscreteDomain(points)
    coords = np.array(points, dtype=np.int64)  # (|X|, d)
    rows = []
    for a in range(spec.d):
        for t in range(spec.k):
            rows.append(np.where(coords[:, a] <= t, 1, -1).astype(np.int8))
    rows.extend([-r for r in rows[: spec.d * spec.k]])
    rows.append(np.ones(len(points), dtype=np.int8))
    rows.append(-np.ones(len(points), dtype=np.int8))
    return domain, HypothesisClass(domain, np.vstack(rows))


def generate_synthetic(spec: StumpClassSpec, n: int, noise: float, rng_seed):
    """A stump-majority task: explicit distribution plus an i.i.d. sample.

    Ground truth is the majority vote of up to five distinct random
    non-constant stumps (an odd number, so never a tie).  Each lattice point
    carries mass (1−noise)/|X| on its true label and noise/|X| on the flip.
    Deterministic given the seed.
    """
    noise = float(noise)
    if not 0.0 <= noise < 0.5:
        raise ValueError(f"noise must lie in [0, 0.5), got {noise}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(rng_seed)
    domain, H = build_stump_class(spec)
    num_stumps = 2 * spec.d * spec.k
    count = min(5, num_stumps)
    if count % 2 == 0:
        count -= 1
    chosen = rng.choice(num_stumps, size=count, replace=False)
    truth = np.sign(H.matrix[chosen].astype(np.int64).sum(axis=0)).astype(np.int8)

    size = len(domain)
    probs = {}
    for pos, point in enumerate(domain.points):
        y = int(truth[pos])
        probs[(point, y)] = (1.0 - noise) / size
        if noise > 0.0:
            probs[(point, -y)] = noise / size
    D = DataDistribution(probs)
    S = D.sample(n, rng)
    return D, S


@dataclass(frozen=True)
class BoostingRound:
    """One completed boosting round and the aggregate's statistics after it."""

    round: int
    hypothesis: int
    epsilon: float
    alpha: float
    train_error: float
    min_margin: float
    exp_loss: float


@dataclass(frozen=True)
class BoostingRun:
    """A full training trace plus the final normalized voting classifier."""

    rounds: tuple
    classifier: VotingClassifier
    status: str
    T_requested: int

    @property
    def T_completed(self) -> int:
        return len(self.rounds)


def adaboost(S: LabeledSample, H: HypothesisClass, T: int, rng_seed=None) -> BoostingRun:
    """Standard exponential-weights boosting over a finite class.

    Each round selects the hypothesis with the smallest weighted error
    (ties broken by lowest index) and sets α_t = ½·ln((1−ε_t)/ε_t) with ε_t
    clamped away from {0, 1}.  A perfect hypothesis ends the run with all
    weight on it; if no hypothesis beats error ½ the run stops early.  The
    algorithm is deterministic — ``rng_seed`` is accepted for interface
    uniformity with the samplers and ignored.

    Final weights aggregate the α's per distinct hypothesis and normalize,
    so the product is a valid voting classifier over H.
    """
    del rng_seed  # deterministic; accepted for signature uniformity
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    values = H.sample_values(S).astype(np.float64)  # (|H|, n)
    labels = S.labels.astype(np.float64)
    n = len(S)
    mismatch = (values != labels).astype(np.float64)  # h(x_i) != y_i

    w = np.full(n, 1.0 / n)
    agreement = values * labels  # y_i·h(x_i), reused every round
    score = np.zeros(n)  # y_i·Σ_t α_t·h_t(x_i)
    alphas = []
    picks = []
    rounds = []
    status = "completed"

    for t in range(1, T + 1):
        eps_all = mismatch @ w
        best = int(np.argmin(eps_all))
        eps = float(eps_all[best])
        if eps >= 0.5:
            status = "early-stop"
            break
        eps_c = min(max(eps, EPSILON_CLAMP), 1.0 - EPSILON_CLAMP)
        alpha = 0.5 * math.log((1.0 - eps_c) / eps_c)
        picks.append(best)
        alphas.append(alpha)
        score = score + alpha * agreement[best]
        alpha_sum = math.fsum(alphas)
        margins = score / alpha_sum
        rounds.append(
            BoostingRound(
                round=t,
                hypothesis=best,
                epsilon=eps,
                alpha=alpha,
                train_error=float(np.count_nonzero(margins <= 0.0)) / n,
                min_margin=float(margins.min()),
                exp_loss=float(np.exp(-score).mean()),
            )
        )
        if eps == 0.0:
            status = "perfect-hypothesis"
            break
        w = w * np.exp(-alpha * agreement[best])
        w /= w.sum()

    if not rounds:
        # no usable round at all: fall back to the flat vote so the run
        # still carries a valid classifier alongside its early-stop status
        classifier = VotingClassifier(np.full(len(H), 1.0 / len(H)))
    elif status == "perfect-hypothesis":
        classifier = VotingClassifier.point_mass(picks[-1], len(H))
    else:
        totals = np.bincount(picks, weights=alphas, minlength=len(H))
        classifier = VotingClassifier(totals / totals.sum())
    return BoostingRun(
        rounds=tuple(rounds), classifier=classifier, status=status, T_requested=int(T)
    )


@dataclass(frozen=True)
class MarginHistogram:
    """Counts of sample margins over uniform right-closed bins of [−1, 1]."""

    edges: tuple
    counts: tuple

    @property
    def n(self) -> int:
        return int(sum(self.counts))

    def cumulative_fraction(self) -> np.ndarray:
        """Fraction of margins ≤ each interior/upper edge (edges[1:]).

        Because bins are right-closed, the value at an edge that lies in
        [0, 1] equals the empirical margin loss at that threshold exactly.
        """
        return np.cumsum(self.counts) / self.n


def margin_histogram(
    f: VotingClassifier, H: HypothesisClass, S: LabeledSample, bin_count: int
) -> MarginHistogram:
    """Histogram of y_i·f(x_i) over ``bin_count`` uniform bins of [−1, 1].

    Bins are right-closed — bin b covers (edges[b], edges[b+1]], with the
    lowest bin additionally including −1 — so the cumulative count at any
    edge θ equals n·empirical_margin_loss(f, H, S, θ).
    """
    if bin_count < 2:
        raise ValueError(f"bin_count must be >= 2, got {bin_count}")
    edges = np.linspace(-1.0, 1.0, bin_count + 1)
    m = margins_on_sample(f, H, S)
    idx = np.searchsorted(edges, m, side="left") - 1
    np.clip(idx, 0, bin_count - 1, out=idx)
    counts = np.bincount(idx, minlength=bin_count)
    return MarginHistogram(edges=tuple(edges.tolist()), counts=tuple(int(c) for c in counts))

"""Finite domains, ±1 hypothesis classes, voting classifiers, margin losses.

Hypotheses are stored as explicit ±1 tables over a finite ordered domain,
which keeps every quantity downstream (losses, discretization laws, bound
experiments) exactly computable by enumeration.  Margin-loss comparisons are
non-strict: a point whose margin ties the threshold counts as a loss.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "C_THETA",
    "WEIGHT_TOL",
    "PreconditionError",
    "DiscreteDomain",
    "Hypothesis",
    "HypothesisClass",
    "VotingClassifier",
    "LabeledSample",
    "DataDistribution",
    "constant_hypothesis",
    "margin",
    "margins_on_sample",
    "margins_on_support",
    "empirical_margin_loss",
    "true_margin_loss",
    "scale_reduction",
]

#: Global margin-rescaling factor; fixed, not configurable.
C_THETA = 1.0 / math.sqrt(2.0)

#: Tolerance for "sums to one" checks on weights and probabilities.
WEIGHT_TOL = 1e-12


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold."""


def _check_label(y) -> int:
    y = int(y)
    if y not in (-1, 1):
        raise ValueError(f"label must be +1 or -1, got {y}")
    return y


def _check_threshold(theta: float) -> float:
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"margin threshold must lie in [0, 1], got {theta}")
    return theta


def _force_unit_sum(w: np.ndarray) -> None:
    """Nudge the largest entry so the float sum is exactly 1.0, in place.

    Division by the total leaves the sum within a few ulps of 1; folding the
    residual into the largest entry (comfortably above ulp scale) makes
    downstream expectations exact without disturbing any other entry.
    """
    for _ in range(4):
        residual = 1.0 - float(w.sum())
        if residual == 0.0:
            return
        w[int(np.argmax(w))] += residual


class DiscreteDomain:
    """A finite ordered collection of distinct, hashable point ids."""

    __slots__ = ("points", "_index")

    def __init__(self, points: Iterable):
        pts = tuple(points)
        if not pts:
            raise ValueError("domain must contain at least one point")
        index = {p: i for i, p in enumerate(pts)}
        if len(index) != len(pts):
            raise ValueError("domain points must be distinct")
        self.points = pts
        self._index = index

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, point) -> bool:
        return point in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, DiscreteDomain) and self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def position(self, point) -> int:
        """Index of ``point`` in domain order; raises if unknown."""
        try:
            return self._index[point]
        except KeyError:
            raise ValueError(f"point {point!r} is not in the domain") from None

    def positions(self, points: Iterable) -> np.ndarray:
        return np.fromiter(
            (self.position(p) for p in points), dtype=np.intp, count=-1
        )


class Hypothesis:
    """A total ±1 classifier tabulated over a domain."""

    __slots__ = ("domain", "table")

    def __init__(self, domain: DiscreteDomain, values):
        if isinstance(values, Mapping):
            missing = [p for p in domain.points if p not in values]
            if missing:
                raise ValueError(
                    f"hypothesis must be total over the domain; missing {missing[:3]}"
                )
            table = np.array([values[p] for p in domain.points], dtype=np.int8)
        else:
            table = np.asarray(values, dtype=np.int8)
            if table.shape != (len(domain),):
                raise ValueError(
                    f"hypothesis table has shape {table.shape}, expected ({len(domain)},)"
                )
        if not np.isin(table, (-1, 1)).all():
            raise ValueError("hypothesis values must be +1 or -1")
        self.domain = domain
        self.table = table

    def value(self, point) -> int:
        return int(self.table[self.domain.position(point)])

    def as_dict(self) -> dict:
        return {p: int(v) for p, v in zip(self.domain.points, self.table)}


def constant_hypothesis(domain: DiscreteDomain, label: int) -> Hypothesis:
    """The all-(+1) or all-(−1) hypothesis over ``domain``."""
    label = _check_label(label)
    return Hypothesis(domain, np.full(len(domain), label, dtype=np.int8))


class HypothesisClass:
    """An ordered finite class of ±1 hypotheses over a common domain.

    ``includes_constants`` is true when the all-(+1) and all-(−1) hypotheses
    each occur exactly once.  Duplicate constant hypotheses are rejected;
    duplicates among non-constant hypotheses are permitted (|H| counts them).
    """

    __slots__ = ("domain", "matrix", "includes_constants", "plus_index", "minus_index")

    def __init__(self, domain: DiscreteDomain, hypotheses):
        if isinstance(hypotheses, np.ndarray):
            matrix = hypotheses.astype(np.int8, copy=True)
        else:
            rows = []
            for h in hypotheses:
                if isinstance(h, Hypothesis):
                    if h.domain != domain:
                        raise ValueError("hypothesis domain mismatch")
                    rows.append(h.table)
                elif isinstance(h, Mapping):
                    rows.append(Hypothesis(domain, h).table)
                else:
                    rows.append(np.asarray(h, dtype=np.int8))
            if not rows:
                raise ValueError("hypothesis class must be non-empty")
            matrix = np.vstack(rows).astype(np.int8)
        if matrix.ndim != 2 or matrix.shape[1] != len(domain):
            raise ValueError(
                f"hypothesis matrix has shape {matrix.shape}, expected (*, {len(domain)})"
            )
        if matrix.shape[0] < 1:
            raise ValueError("hypothesis class must be non-empty")
        if not np.isin(matrix, (-1, 1)).all():
            raise ValueError("hypothesis values must be +1 or -1")
        plus_rows = np.flatnonzero((matrix == 1).all(axis=1))
        minus_rows = np.flatnonzero((matrix == -1).all(axis=1))
        if len(plus_rows) > 1 or len(minus_rows) > 1:
            raise ValueError("a constant hypothesis occurs more than once")
        matrix.setflags(write=False)
        self.domain = domain
        self.matrix = matrix
        self.includes_constants = len(plus_rows) == 1 and len(minus_rows) == 1
        self.plus_index = int(plus_rows[0]) if len(plus_rows) == 1 else None
        self.minus_index = int(minus_rows[0]) if len(minus_rows) == 1 else None

    def __len__(self) -> int:
        return int(self.matrix.shape[0])

    def hypothesis(self, i: int) -> Hypothesis:
        return Hypothesis(self.domain, self.matrix[i])

    def sample_values(self, sample: "LabeledSample") -> np.ndarray:
        """Matrix of h(x_i) with shape (|H|, n), columns in sample order."""
        pos = self.domain.positions(sample.points)
        return self.matrix[:, pos]


class VotingClassifier:
    """Convex weights over a hypothesis class, indexed by hypothesis.

    Weights must be nonnegative and sum to 1 within ``WEIGHT_TOL``; they are
    renormalized to an exact unit sum on construction (boosting updates
    accumulate float error).
    """

    __slots__ = ("weights",)

    def __init__(self, weights):
        w = np.asarray(weights, dtype=np.float64).copy()
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a non-empty 1-d array")
        if not np.isfinite(w).all():
            raise ValueError("weights must be finite")
        if (w < 0).any():
            raise ValueError("weights must be nonnegative")
        total = float(w.sum())
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(
                f"weights must sum to 1 within {WEIGHT_TOL:g}; got sum {total!r}"
            )
        w /= total
        _force_unit_sum(w)
        w.setflags(write=False)
        self.weights = w

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, float], size: int) -> "VotingClassifier":
        w = np.zeros(int(size), dtype=np.float64)
        for i, a in mapping.items():
            w[int(i)] = a
        return cls(w)

    @classmethod
    def point_mass(cls, index: int, size: int) -> "VotingClassifier":
        return cls.from_mapping({index: 1.0}, size)

    def __len__(self) -> int:
        return int(self.weights.size)

    def values_on(self, H: HypothesisClass) -> np.ndarray:
        """f(x) for every domain point, in domain order."""
        if len(self) != len(H):
            raise ValueError(
                f"classifier has {len(self)} weights but class has {len(H)} hypotheses"
            )
        # A convex combination of ±1 values lies in [-1, 1]; the float dot
        # product can overshoot by one ulp, so clamp back to the exact range.
        return np.clip(self.weights @ H.matrix, -1.0, 1.0)


class LabeledSample:
    """A finite labeled sample: pairs (point-id, ±1 label), order preserved."""

    __slots__ = ("points", "labels")

    def __init__(self, items: Iterable):
        items = list(items)
        if not items:
            raise ValueError("sample must contain at least one point")
        self.points = tuple(p for p, _ in items)
        self.labels = np.array([_check_label(y) for _, y in items], dtype=np.int8)
        self.labels.setflags(write=False)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(zip(self.points, (int(y) for y in self.labels)))


class DataDistribution:
    """An explicit distribution over (point-id, ±1 label) atoms.

    Probabilities must be nonnegative and sum to 1 within ``WEIGHT_TOL``;
    they are renormalized exactly on construction so losses computed from the
    distribution are exact expectations.
    """

    __slots__ = ("atoms", "probabilities")

    def __init__(self, probabilities: Mapping):
        if not probabilities:
            raise ValueError("distribution must have at least one atom")
        atoms = []
        probs = []
        for (point, label), p in probabilities.items():
            atoms.append((point, _check_label(label)))
            probs.append(float(p))
        if len(set(atoms)) != len(atoms):
            raise ValueError("distribution atoms must be distinct")
        probs = np.array(probs, dtype=np.float64)
        if (probs < 0).any():
            raise ValueError("probabilities must be nonnegative")
        total = float(probs.sum())
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(
                f"probabilities must sum to 1 within {WEIGHT_TOL:g}; got sum {total!r}"
            )
        probs /= total
        _force_unit_sum(probs)
        probs.setflags(write=False)
        self.atoms = tuple(atoms)
        self.probabilities = probs

    @classmethod
    def empirical(cls, sample: LabeledSample) -> "DataDistribution":
        """The empirical distribution of a sample (atom mass = frequency)."""
        counts: dict = {}
        for point, label in sample:
            counts[(point, label)] = counts.get((point, label), 0) + 1
        n = len(sample)
        return cls({atom: c / n for atom, c in counts.items()})

    def __len__(self) -> int:
        return len(self.atoms)

    def sample(self, n: int, rng: np.random.Generator) -> LabeledSample:
        """Draw n i.i.d. atoms."""
        if n < 1:
            raise ValueError(f"sample size must be >= 1, got {n}")
        idx = rng.choice(len(self.atoms), size=int(n), p=self.probabilities)
        return LabeledSample([self.atoms[i] for i in idx])


def margin(f: VotingClassifier, H: HypothesisClass, x, y) -> float:
    """The margin y·f(x) ∈ [−1, 1] of a single labeled point."""
    y = _check_label(y)
    pos = H.domain.position(x)
    return float(y) * float(f.values_on(H)[pos])


def margins_on_sample(f: VotingClassifier, H: HypothesisClass, S: LabeledSample) -> np.ndarray:
    """Margins y_i·f(x_i) for every sample point, in sample order."""
    values = f.values_on(H)
    pos = H.domain.positions(S.points)
    return S.labels * values[pos]


def margins_on_support(f: VotingClassifier, H: HypothesisClass, D: DataDistribution):
    """(margins, probabilities) over the atoms of D, in atom order."""
    values = f.values_on(H)
    pos = H.domain.positions(p for p, _ in D.atoms)
    labels = np.array([y for _, y in D.atoms], dtype=np.int8)
    return labels * values[pos], D.probabilities


def empirical_margin_loss(f: VotingClassifier, H: HypothesisClass, S: LabeledSample, theta: float) -> float:
    """Fraction of sample points with margin ≤ θ (ties count as losses).

    θ = 0 gives the empirical 0-1 loss.
    """
    theta = _check_threshold(theta)
    m = margins_on_sample(f, H, S)
    return float(np.count_nonzero(m <= theta)) / m.size


def true_margin_loss(f: VotingClassifier, H: HypothesisClass, D: DataDistribution, theta: float) -> float:
    """Pr over D of margin ≤ θ, computed exactly over the atoms of D."""
    theta = _check_threshold(theta)
    m, p = margins_on_support(f, H, D)
    return float(p[m <= theta].sum())


def scale_reduction(f: VotingClassifier, H: HypothesisClass):
    """Rescale f toward the constants: f̄ = c_θ·f + ((1−c_θ)/2)·(h₊ + h₋).

    Every margin scales by exactly c_θ (the constants cancel in y·f̄(x)), so
    sign decisions are preserved while margins land in [−c_θ, c_θ].  Returns
    (f̄, H̄) where H̄ extends H with the two constant hypotheses unless they
    are already present.
    """
    if len(f) != len(H):
        raise ValueError(
            f"classifier has {len(f)} weights but class has {len(H)} hypotheses"
        )
    half_rest = (1.0 - C_THETA) / 2.0
    if H.includes_constants:
        w = C_THETA * f.weights
        w = w.copy()
        w[H.plus_index] += half_rest
        w[H.minus_index] += half_rest
        return VotingClassifier(w), H
    extended = np.vstack(
        [
            H.matrix,
            np.ones(len(H.domain), dtype=np.int8),
            -np.ones(len(H.domain), dtype=np.int8),
        ]
    )
    H_bar = HypothesisClass(H.domain, extended)
    w = np.concatenate([C_THETA * f.weights, [half_rest, half_rest]])
    return VotingClassifier(w), H_bar

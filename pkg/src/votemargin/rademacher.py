"""Empirical Rademacher complexity of finite ±1 classes.

Three views of the same quantity: a Monte Carlo estimator (exact supremum
over the class per sign draw), an exhaustive oracle that enumerates all 2ⁿ
sign vectors in integer arithmetic, and the finite-class comparator
√(2·ln|H|/n).  A fourth check confirms the convexity collapse: the supremum
over the ±1 class equals the supremum over its convex hull, so voting
classifiers add no complexity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import HypothesisClass, LabeledSample, PreconditionError

__all__ = [
    "RademacherEstimate",
    "empirical_rademacher",
    "exhaustive_rademacher",
    "massart_bound",
    "convexity_collapse_check",
    "EXHAUSTIVE_LIMIT",
]

#: Largest sample size the exhaustive oracle will enumerate (2ⁿ vectors).
EXHAUSTIVE_LIMIT = 20


@dataclass(frozen=True)
class RademacherEstimate:
    """An estimate of (1/n)·E_σ[sup_h Σ σ_i·h(x_i)]."""

    value: float
    std_error: float
    trials: int
    mode: str

    def __post_init__(self):
        if self.mode not in ("monte-carlo", "exhaustive"):
            raise ValueError(f"mode must be monte-carlo or exhaustive, got {self.mode!r}")
        if self.mode == "exhaustive" and self.std_error != 0.0:
            raise ValueError("exhaustive estimates are exact; std_error must be 0")


def empirical_rademacher(
    H: HypothesisClass, S: LabeledSample, trials: int = 10_000, rng_seed=None
) -> RademacherEstimate:
    """Monte Carlo estimate: average of sup_h Σ σ_i h(x_i) over sign draws.

    The supremum over the finite class is computed exactly for every draw;
    only the expectation over σ is sampled.  ``rng_seed`` may be an integer
    or a numpy Generator.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(rng_seed)
    values = H.sample_values(S).astype(np.float64)
    n = values.shape[1]
    sups = np.empty(trials, dtype=np.float64)
    chunk = max(1, int(5e7) // max(1, n * len(H)))
    for start in range(0, trials, chunk):
        m = min(chunk, trials - start)
        sigma = rng.integers(0, 2, size=(m, n)).astype(np.float64) * 2.0 - 1.0
        sups[start : start + m] = (sigma @ values.T).max(axis=1)
    per_draw = sups / n
    value = float(per_draw.mean())
    std_error = (
        float(per_draw.std(ddof=1) / np.sqrt(trials)) if trials > 1 else float("inf")
    )
    return RademacherEstimate(
        value=value, std_error=std_error, trials=int(trials), mode="monte-carlo"
    )


def exhaustive_rademacher(H: HypothesisClass, S: LabeledSample) -> RademacherEstimate:
    """Exact value by enumerating all 2ⁿ sign vectors (n ≤ 20).

    Per-vector suprema are integers in [−n, n]; the grand total is
    accumulated exactly, so the result is correct to one float division.
    """
    n = len(S)
    if n > EXHAUSTIVE_LIMIT:
        raise PreconditionError(
            f"exhaustive enumeration is limited to n <= {EXHAUSTIVE_LIMIT}, got n = {n}"
        )
    values = H.sample_values(S).astype(np.int16)
    total = 0
    count = 1 << n
    bits = np.arange(n, dtype=np.int64)
    chunk = 1 << 18
    for start in range(0, count, chunk):
        idx = np.arange(start, min(start + chunk, count), dtype=np.int64)
        signs = (((idx[:, None] >> bits) & 1) * 2 - 1).astype(np.int16)
        sups = (signs @ values.T).max(axis=1)
        total += int(sups.astype(np.int64).sum())
    return RademacherEstimate(
        value=total / (count * n), std_error=0.0, trials=count, mode="exhaustive"
    )


def massart_bound(H_size: int, n: int) -> float:
    """Finite-class ceiling √(2·ln|H|/n) on the empirical Rademacher value."""
    if H_size < 1:
        raise ValueError(f"H_size must be >= 1, got {H_size}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return float(np.sqrt(2.0 * np.log(H_size) / n))


def convexity_collapse_check(
    H: HypothesisClass,
    S: LabeledSample,
    trials: int = 200,
    rng_seed=None,
    num_combos: int = 50,
    tol: float = 1e-9,
) -> bool:
    """Per sign draw, sup over random convex combinations never beats sup over H.

    Draws ``num_combos`` Dirichlet weight vectors over H and checks, for
    every σ, that max_w Σ_i σ_i·(Σ_h w_h·h(x_i)) ≤ max_h Σ_i σ_i·h(x_i) + tol.
    Returns True iff no violation occurs.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if num_combos < 1:
        raise ValueError(f"num_combos must be >= 1, got {num_combos}")
    rng = np.random.default_rng(rng_seed)
    values = H.sample_values(S).astype(np.float64)
    n = values.shape[1]
    combos = rng.dirichlet(np.ones(len(H)), size=num_combos)
    sigma = rng.integers(0, 2, size=(trials, n)).astype(np.float64) * 2.0 - 1.0
    corr = sigma @ values.T                      # (trials, |H|)
    sup_class = corr.max(axis=1)
    sup_hull = (corr @ combos.T).max(axis=1)
    return bool((sup_hull <= sup_class + tol).all())

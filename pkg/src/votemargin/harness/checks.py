"""Per-lemma numerical check suites behind `validate <lemma-id>`.

Each suite sweeps a grid or Monte Carlo trial set, persists one CSV of raw
rows plus a plain-text summary, and returns a LemmaCheckReport whose verdict
is pass iff the max violation is within the stated tolerance.  Where a
statement carries an unpinned universal constant, the suite reports the
smallest constant that makes every check pass instead of asserting one.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import binom as _binom_dist

from ..bounds import build_partition, delta_allocation
from ..core import (
    C_THETA,
    DataDistribution,
    DiscreteDomain,
    HypothesisClass,
    LabeledSample,
    VotingClassifier,
)
from ..discretize import (
    binom_margin_tail,
    decomposition_residual,
    expected_half_margin_loss_bound_check,
    margin_law_monotone_check,
    sample_discretization,
)
from ..phirho import (
    LIPSCHITZ_REGIONS,
    PhiRhoParams,
    branch_continuity_residuals,
    diff_replacement_check,
    lip_const_bound,
    lipschitz_slope_check,
    phi_bound_check,
)
from ..rademacher import (
    convexity_collapse_check,
    exhaustive_rademacher,
    massart_bound,
)
from ..rng import stream
from .config import DEFAULT_SEED
from .reporting import LemmaCheckReport, resolve_out_dir, write_csv, write_summary

__all__ = [
    "VALID_LEMMA_IDS",
    "validate",
    "repair_duplicate_constants",
    "random_hypothesis_class",
    "random_distribution",
    "random_voting",
    "smallest_c_monotone",
    "binomial_ci",
]

VALID_LEMMA_IDS = (
    "margin-law",
    "monotonicity",
    "decomposition",
    "phi-rho-ineq",
    "phi-bound",
    "lipschitz",
    "delta-allocation",
    "partition-coverage",
    "massart",
    "convexity-collapse",
    "half-margin-expectation",
)


# ---------------------------------------------------------------------------
# Shared random-instance builders and calibration helpers
# ---------------------------------------------------------------------------


def repair_duplicate_constants(matrix: np.ndarray) -> np.ndarray:
    """Flip the first entry of surplus constant rows, in place.

    Classes reject a twice-occurring constant hypothesis; random or planted
    row constructions use this so a draw never has to be rejected.
    """
    for label in (1, -1):
        rows = np.flatnonzero((matrix == label).all(axis=1))
        for r in rows[1:]:
            matrix[r, 0] = -label
    return matrix


def random_hypothesis_class(rng, X_size: int, H_size: int) -> HypothesisClass:
    """A seeded random ±1 class over the integer domain {0..X_size−1}."""
    if X_size < 2:
        raise ValueError(f"X_size must be at least 2, got {X_size}")
    matrix = (rng.integers(0, 2, size=(H_size, X_size)) * 2 - 1).astype(np.int8)
    return HypothesisClass(DiscreteDomain(range(X_size)), repair_duplicate_constants(matrix))


def random_distribution(rng, domain: DiscreteDomain) -> DataDistribution:
    """Random labels and Dirichlet atom masses over a domain."""
    labels = rng.integers(0, 2, size=len(domain)) * 2 - 1
    probs = rng.dirichlet(np.ones(len(domain)))
    return DataDistribution(
        {
            (point, int(labels[i])): float(probs[i])
            for i, point in enumerate(domain.points)
        }
    )


def random_voting(rng, size: int) -> VotingClassifier:
    return VotingClassifier(rng.dirichlet(np.ones(size)))


def smallest_c_monotone(fn, target: float, hi: float = 1.0) -> float:
    """Smallest c ≥ 0 with fn(c) ≥ target, for fn increasing in c."""
    if target <= 0.0:
        return 0.0
    grow = 0
    while fn(hi) < target:
        hi *= 2.0
        grow += 1
        if grow > 200:
            raise ValueError("no constant reaches the target")
    lo = 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if fn(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def binomial_ci(trials: int, p: float, level: float = 0.95):
    """Central exact binomial interval of counts at the given level."""
    alpha = (1.0 - level) / 2.0
    lo = int(_binom_dist.ppf(alpha, trials, p))
    hi = int(_binom_dist.ppf(1.0 - alpha, trials, p))
    return lo, hi


def _out_paths(lemma_id: str, out):
    out_dir = resolve_out_dir(out)
    slug = lemma_id.replace("-", "_")
    return out_dir / f"validate_{slug}.csv", out_dir / f"validate_{slug}.txt"


def _finish(lemma_id, out, header, rows, summary, max_violation, tolerance,
            passed, calibrated=None) -> LemmaCheckReport:
    csv_path, txt_path = _out_paths(lemma_id, out)
    write_csv(csv_path, header, rows)
    report = LemmaCheckReport(
        lemma=lemma_id,
        summary=summary,
        max_violation=float(max_violation),
        tolerance=float(tolerance),
        passed=bool(passed),
        calibrated_constant=calibrated,
        csv_path=str(csv_path),
    )
    write_summary(txt_path, report.lines())
    return report


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def _check_margin_law(seed, out, trials, grid_points):
    del grid_points
    M = trials or 20_000
    rows = []
    worst = -math.inf
    for b, N in enumerate((8, 32, 128)):
        for lam in (-0.9, -0.5, 0.0, 0.3, 0.7):
            for eta in (0.0, 0.25, 0.5):
                exact = binom_margin_tail(N, lam, eta)
                rng = stream(seed, 0, b, int(lam * 10) + 10, int(eta * 100))
                draws = rng.binomial(N, 0.5 + 0.5 * lam, size=M)
                mc = float(np.count_nonzero((2.0 * draws - N) / N > eta)) / M
                tol = 5.0 * math.sqrt(exact * (1.0 - exact) / M) + 1e-6
                gap = abs(mc - exact) - tol
                worst = max(worst, gap)
                rows.append((N, lam, eta, exact, mc, tol, gap <= 0.0))
    return _finish(
        "margin-law", out,
        ["N", "lambda", "eta", "exact_tail", "mc_tail", "tolerance", "ok"],
        rows,
        f"Monte Carlo vs exact binomial margin tail on a {len(rows)}-point grid, "
        f"{M} draws per point (5-sigma tolerance)",
        worst, 0.0, worst <= 0.0,
    )


def _check_monotonicity(seed, out, trials, grid_points):
    del seed, trials
    pts = grid_points or 1000
    rows = []
    violations = 0
    for N in (8, 32, 128, 1024):
        for eta in (0.0, 0.25, 0.5):
            grid = np.linspace(-1.0, 1.0, pts)
            ok, first = margin_law_monotone_check(N, eta, grid)
            violations += 0 if ok else 1
            rows.append((N, eta, pts, ok, "" if first is None else first))
    return _finish(
        "monotonicity", out,
        ["N", "eta", "grid_points", "ok", "first_violation"],
        rows,
        f"margin tail non-decreasing in lambda over {pts}-point grids",
        float(violations), 0.0, violations == 0,
    )


def _check_decomposition(seed, out, trials, grid_points):
    del grid_points
    count = trials or 100
    rows = []
    worst = 0.0
    for t in range(count):
        rng = stream(seed, 1, t)
        X_size = int(rng.integers(2, 65))
        H_size = int(rng.integers(2, 9))
        N = int(rng.integers(1, 17))
        H = random_hypothesis_class(rng, X_size, H_size)
        D = random_distribution(rng, H.domain)
        f = random_voting(rng, H_size)
        g = sample_discretization(f, H, N, rng)
        S = D.sample(int(rng.integers(5, 51)), rng)
        theta = float(rng.uniform(1e-6, 1.0))
        theta_i = float(rng.uniform(1e-6, 1.0))
        residual = decomposition_residual(f, g, H, D, S, theta, theta_i)
        worst = max(worst, residual)
        rows.append((t, X_size, H_size, N, theta, theta_i, residual))
    return _finish(
        "decomposition", out,
        ["trial", "X_size", "H_size", "N", "theta", "theta_i", "residual"],
        rows,
        f"loss-splitting identity residual on {count} random instances",
        worst, 1e-12, worst <= 1e-12,
    )


def _draw_pair(rng):
    """A (θ_i, N) pair with N at or above the slope precondition."""
    theta_i = float(rng.uniform(0.05, C_THETA))
    mult = float(rng.choice((1.0, 2.0, 4.0)))
    N = math.ceil(mult * 32.0 * (2.0 * theta_i) ** -2)
    return theta_i, N


def _check_phi_rho_ineq(seed, out, trials, grid_points):
    count = trials or 50
    pts = grid_points or 2001
    rows = []
    total = 0
    worst = 0.0
    grid = np.linspace(-C_THETA, C_THETA, pts)
    for t in range(count):
        rng = stream(seed, 2, t)
        theta_i, N = _draw_pair(rng)
        theta = float(rng.uniform(theta_i, 2.0 * theta_i))
        theta = min(max(theta, np.nextafter(theta_i, 2)), 2.0 * theta_i)
        report = diff_replacement_check(PhiRhoParams(theta_i, N), theta, grid)
        total += sum(report.violations)
        worst = max(worst, report.max_violation)
        rows.append((t, theta_i, N, theta, *report.violations, report.max_violation))
    return _finish(
        "phi-rho-ineq", out,
        ["trial", "theta_i", "N", "theta",
         "viol_lower_phi", "viol_upper_phi", "viol_lower_rho", "viol_upper_rho",
         "max_violation"],
        rows,
        f"four indicator-replacement inequalities on {count} ({pts}-point) grids",
        float(total), 0.0, total == 0,
    )


def _check_phi_bound(seed, out, trials, grid_points):
    count = trials or 50
    pts = grid_points or 10_001
    rows = []
    worst = -math.inf
    grid = np.linspace(-C_THETA, C_THETA, pts)
    for t in range(count):
        rng = stream(seed, 3, t)
        theta_i, N = _draw_pair(rng)
        params = PhiRhoParams(theta_i, N)
        cont = branch_continuity_residuals(params)
        sup_phi, bound, holds = phi_bound_check(params, grid)
        gap = sup_phi - bound
        worst = max(worst, gap, float(cont.max()) - 1e-12)
        rows.append((t, theta_i, N, float(cont.max()), sup_phi, bound, holds))
    return _finish(
        "phi-bound", out,
        ["trial", "theta_i", "N", "max_continuity_residual",
         "sup_phi", "bound", "ok"],
        rows,
        f"sup(phi) <= exp(-N*theta_i^2/16) plus branch continuity on {count} pairs",
        worst, 0.0, worst <= 0.0,
    )


def _check_lipschitz(seed, out, trials, grid_points):
    del seed, trials
    pts = grid_points or 10_000
    thetas = (0.1, 0.2, 0.35, 0.5, 0.7)
    mults = (1.0, 4.0, 16.0)
    rows = []
    worst = -math.inf
    calibrated = 0.0
    for theta_i in thetas:
        for mult in mults:
            N = math.ceil(mult * 32.0 * (2.0 * theta_i) ** -2)
            params = PhiRhoParams(theta_i, N)
            pair_slope = 0.0
            for region in LIPSCHITZ_REGIONS:
                slope, bound, holds = lipschitz_slope_check(
                    params, region, num_points=pts
                )
                pair_slope = max(pair_slope, slope)
                worst = max(worst, slope - bound)
                rows.append((theta_i, N, region, slope, bound, holds))
            calibrated = max(
                calibrated,
                smallest_c_monotone(lambda c: lip_const_bound(params, c), pair_slope),
            )
    return _finish(
        "lipschitz", out,
        ["theta_i", "N", "region", "max_slope", "bound", "ok"],
        rows,
        f"finite-difference slopes vs analytic ceilings, {len(thetas) * len(mults)} "
        f"(theta_i, N) pairs x {len(LIPSCHITZ_REGIONS)} regions",
        worst, 0.0, worst <= 0.0, calibrated=calibrated,
    )


_DELTA_GRID_N = (10**2, 10**3, 10**4, 10**6)
_DELTA_GRID_H = (2**4, 2**10, 2**20)
_DELTA_GRID_DELTA = (0.5, 0.05, 0.001)


def _check_delta_allocation(seed, out, trials, grid_points):
    del seed, trials, grid_points
    rows = []
    worst = -math.inf
    for n in _DELTA_GRID_N:
        for H_size in _DELTA_GRID_H:
            scheme = build_partition(n, H_size)
            for delta in _DELTA_GRID_DELTA:
                alloc = delta_allocation(delta, n, H_size, scheme)
                budget = delta / 2.0
                gap = max(alloc.pair_sum - budget, alloc.cell_sum - budget)
                worst = max(worst, gap)
                rows.append(
                    (n, H_size, delta, alloc.pair_sum, alloc.cell_sum, budget,
                     gap <= 0.0)
                )
    return _finish(
        "delta-allocation", out,
        ["n", "H_size", "delta", "pair_sum", "cell_sum", "budget", "ok"],
        rows,
        "per-cell failure budgets sum within delta/2 per family over the "
        f"{len(_DELTA_GRID_N)}x{len(_DELTA_GRID_H)}x{len(_DELTA_GRID_DELTA)} grid",
        worst, 0.0, worst <= 0.0,
    )


def _check_partition_coverage(seed, out, trials, grid_points):
    del seed, trials
    pts = grid_points or 10_000
    rows = []
    bad = 0
    for n in _DELTA_GRID_N:
        for H_size in _DELTA_GRID_H:
            scheme = build_partition(n, H_size)
            eps = (1.0 - scheme.theta_floor) * 1e-9
            thetas = np.linspace(scheme.theta_floor + eps, 1.0, pts)
            cover = np.zeros(pts, dtype=np.int64)
            for cell in scheme.theta_cells:
                inside = (thetas > cell.lo) & (thetas <= cell.hi)
                cover += inside
            t_unc = int(np.count_nonzero(cover == 0))
            t_dbl = int(np.count_nonzero(cover > 1))
            losses = np.linspace(0.0, 1.0, pts)
            cover_l = np.zeros(pts, dtype=np.int64)
            for cell in scheme.loss_cells:
                if cell.closed_left:
                    inside = (losses >= cell.lo) & (losses <= cell.hi)
                else:
                    inside = (losses > cell.lo) & (losses <= cell.hi)
                cover_l += inside
            l_unc = int(np.count_nonzero(cover_l == 0))
            l_dbl = int(np.count_nonzero(cover_l > 1))
            bad += t_unc + t_dbl + l_unc + l_dbl
            rows.append((n, H_size, t_unc, t_dbl, l_unc, l_dbl))
    return _finish(
        "partition-coverage", out,
        ["n", "H_size", "theta_uncovered", "theta_doubly_covered",
         "loss_uncovered", "loss_doubly_covered"],
        rows,
        f"membership sweeps of {pts} points per range per (n, |H|) pair",
        float(bad), 0.0, bad == 0,
    )


def _check_massart(seed, out, trials, grid_points):
    del grid_points
    count = trials or 200
    rows = []
    worst = -math.inf
    for t in range(count):
        rng = stream(seed, 4, t)
        n = int(rng.integers(1, 15))
        H_size = int(rng.integers(2, 33))
        H = random_hypothesis_class(rng, max(n, 2), H_size)
        S = LabeledSample(
            [(int(p), 1) for p in rng.integers(0, len(H.domain), size=n)]
        )
        exact = exhaustive_rademacher(H, S).value
        bound = massart_bound(H_size, n)
        worst = max(worst, exact - bound)
        rows.append((t, n, H_size, exact, bound, exact <= bound))
    return _finish(
        "massart", out,
        ["trial", "n", "H_size", "exhaustive", "bound", "ok"],
        rows,
        f"exhaustive Rademacher value vs sqrt(2 ln|H|/n) on {count} instances",
        worst, 0.0, worst <= 0.0,
    )


def _check_convexity_collapse(seed, out, trials, grid_points):
    del grid_points
    count = trials or 50
    rows = []
    failures = 0
    for t in range(count):
        rng = stream(seed, 5, t)
        n = int(rng.integers(2, 21))
        H_size = int(rng.integers(2, 17))
        H = random_hypothesis_class(rng, max(n, 2), H_size)
        S = LabeledSample(
            [(int(p), 1) for p in rng.integers(0, len(H.domain), size=n)]
        )
        ok = convexity_collapse_check(H, S, trials=200, rng_seed=rng)
        failures += 0 if ok else 1
        rows.append((t, n, H_size, ok))
    return _finish(
        "convexity-collapse", out,
        ["trial", "n", "H_size", "ok"],
        rows,
        f"hull supremum never exceeds class supremum, {count} instances x 200 draws",
        float(failures), 0.0, failures == 0,
    )


def _check_half_margin_expectation(seed, out, trials, grid_points):
    del grid_points
    count = trials or 50
    rows = []
    worst = -math.inf
    for t in range(count):
        rng = stream(seed, 6, t)
        theta_i, N = _draw_pair(rng)
        X_size = int(rng.integers(2, 33))
        H_size = int(rng.integers(2, 9))
        H = random_hypothesis_class(rng, X_size, H_size)
        D = random_distribution(rng, H.domain)
        f = random_voting(rng, H_size)
        lhs, rhs, holds = expected_half_margin_loss_bound_check(f, H, D, theta_i, N)
        worst = max(worst, lhs - rhs)
        rows.append((t, theta_i, N, lhs, rhs, holds))
    return _finish(
        "half-margin-expectation", out,
        ["trial", "theta_i", "N", "lhs", "rhs", "ok"],
        rows,
        "expected half-threshold loss of the discretization vs the 3/4-threshold "
        f"source loss plus exp(-N*theta_i^2/128), {count} random instances",
        worst, 0.0, worst <= 0.0,
    )


_SUITES = {
    "margin-law": _check_margin_law,
    "monotonicity": _check_monotonicity,
    "decomposition": _check_decomposition,
    "phi-rho-ineq": _check_phi_rho_ineq,
    "phi-bound": _check_phi_bound,
    "lipschitz": _check_lipschitz,
    "delta-allocation": _check_delta_allocation,
    "partition-coverage": _check_partition_coverage,
    "massart": _check_massart,
    "convexity-collapse": _check_convexity_collapse,
    "half-margin-expectation": _check_half_margin_expectation,
}


def validate(lemma_id: str, config=None) -> LemmaCheckReport:
    """Run one named check suite, persist its CSV, return the report.

    ``config`` is an optional parsed [validate] section providing seed,
    trial count, grid density, and the output directory.
    """
    if lemma_id not in _SUITES:
        raise ValueError(
            f"unknown lemma id {lemma_id!r}; valid ids: {', '.join(VALID_LEMMA_IDS)}"
        )
    seed = config.seed if config is not None else DEFAULT_SEED
    params = config.params if config is not None else {}
    return _SUITES[lemma_id](
        seed,
        params.get("out"),
        params.get("trials"),
        params.get("grid_points"),
    )

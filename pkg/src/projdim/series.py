"""Series over enumerated holes and matrix words, and the critical-exponent
estimators built on their per-level growth.

Every truncated series converges, so critical exponents are never read off
directly.  The level-growth statistic g(t) fits a least-squares slope to
log a_n(t) over the trailing third of the computed levels; the exponent
estimate is the root of g, found by bisection, with a bracket widened by the
shift observed when two levels are dropped.  Counting exponents instead come
from a log-log regression on the tail of a norm-cap schedule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _counting
from .levels import get_level_data
from .system import IfsSystem, enumerate_holes
from .words import MaxDepth, NormCap, PruningPolicy, enumerate_words, singular_values

WINDOW_FRACTION = 1.0 / 3.0  # trailing share of levels used by the growth fit


@dataclass(frozen=True)
class SeriesReport:
    """Per-level partial sums of a positive-term series, in log space."""

    kind: str                            # hole-series | norm-series | singular-series | counting-function
    parameter: float                     # t, r, or s
    levels: tuple[int, ...]              # level indices (dyadic shell indices for norm series)
    level_log_sums: tuple[float, ...]    # log a_n; -inf marks an empty level
    truncation: str

    def __post_init__(self):
        if len(self.levels) != len(self.level_log_sums):
            raise ValueError("levels and sums must align")

    @property
    def level_sums(self) -> tuple[float, ...]:
        return tuple(math.exp(v) for v in self.level_log_sums)

    @property
    def cumulative(self) -> float:
        return float(np.sum(np.exp(np.asarray(self.level_log_sums))))

    def cumulative_sums(self) -> tuple[float, ...]:
        return tuple(np.cumsum(np.exp(np.asarray(self.level_log_sums))))

    def growth_rate(self, window_fraction: float = WINDOW_FRACTION) -> float:
        return _growth_slope(list(self.level_log_sums), window_fraction)


@dataclass(frozen=True)
class ExponentEstimate:
    """A point estimate of a critical exponent with an honest-effort bracket."""

    estimate: float
    bracket: tuple[float, float]
    method: str                          # level-growth-root | counting-regression
    truncation: str

    def __post_init__(self):
        lo, hi = self.bracket
        if not lo <= self.estimate <= hi:
            raise ValueError("bracket must contain the point estimate")


@dataclass(frozen=True)
class DimensionEstimate:
    """Dimension facts assembled from exponent estimates; partial by design.

    The box-dimension side carries d + sigma; the lower-bound side carries
    the counting-based bound max(d-1, d*rho/(d+1)).  Either side may be
    absent when only one estimator has run.
    """

    d: int
    box_dimension: float | None = None
    box_bracket: tuple[float, float] | None = None
    lower_bound: float | None = None
    lower_bracket: tuple[float, float] | None = None
    notes: dict = field(default_factory=dict)


def _growth_slope(log_sums, window_fraction: float = WINDOW_FRACTION) -> float:
    """Least-squares slope of log a_n vs n over the trailing window."""
    pts = [(n, y) for n, y in enumerate(log_sums) if math.isfinite(y)]
    if len(pts) < 2:
        raise ValueError("need at least two finite level sums for a growth rate")
    k = max(2, math.ceil(len(pts) * window_fraction))
    tail = pts[-k:]
    mx = sum(x for x, _ in tail) / k
    my = sum(y for _, y in tail) / k
    num = sum((x - mx) * (y - my) for x, y in tail)
    den = sum((x - mx) ** 2 for x, _ in tail)
    return num / den


def _logsumexp(arr: np.ndarray) -> float:
    arr = np.asarray(arr, dtype=np.float64)
    if arr.size == 0:
        return -math.inf
    m = float(arr.max())
    if not math.isfinite(m):
        return m
    return m + math.log(float(np.exp(arr - m).sum()))


def _bisect_root(g, lo: float, hi: float, xtol: float = 5e-4):
    """Root of a decreasing sign-changing statistic; returns (root, (lo, hi))."""
    glo, ghi = g(lo), g(hi)
    if not (glo > 0.0 > ghi):
        raise ValueError(
            "non-bracketing interval: g(%g) = %.4g, g(%g) = %.4g "
            "(deepen the truncation or widen the interval)" % (lo, glo, hi, ghi)
        )
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), (lo, hi)


def _policy_label(policy: PruningPolicy) -> str:
    if isinstance(policy, MaxDepth):
        return "depth=%d" % policy.depth
    if isinstance(policy, NormCap):
        return "norm-cap=%d" % policy.cap
    return "volume-floor=%g" % policy.floor


def _hole_level_terms(system: IfsSystem, policy: PruningPolicy):
    """Per-level (log_vol, log_in) arrays for all holes under the policy."""
    if isinstance(policy, MaxDepth):
        data = get_level_data(system, policy.depth)
        return list(zip(data.hole_log_vol, data.hole_log_in))
    buckets: dict[int, list] = {}

    def visit(record):
        buckets.setdefault(len(record.word), []).append(
            (record.log_volume, math.log(record.inradius))
        )

    enumerate_holes(system, policy, visit)
    out = []
    for n in range(max(buckets) + 1):
        pairs = buckets.get(n, [])
        lv = np.array([p[0] for p in pairs])
        li = np.array([p[1] for p in pairs])
        out.append((lv, li))
    return out


def hole_series(system: IfsSystem, t: float, policy: PruningPolicy) -> SeriesReport:
    """Level sums a_n(t) = sum over holes at level n of vol * inradius^t.

    Assumes the system tiles (run validate_tiling first); t >= -1 keeps the
    terms finite on degenerate-free hole sets.
    """
    if t < -1.0:
        raise ValueError("t must be >= -1")
    terms = _hole_level_terms(system, policy)
    sums = tuple(_logsumexp(lv + t * li) for lv, li in terms)
    return SeriesReport("hole-series", float(t), tuple(range(len(sums))), sums,
                        _policy_label(policy))


def bernoulli_coefficient(d: int, t: float) -> float:
    """d! / (t (t+1) ... (t+d)), the weight in the closed Laplace form."""
    if t <= 0:
        raise ValueError("t must be positive")
    out = float(math.factorial(d))
    for j in range(d + 1):
        out /= t + j
    return out


def laplace_transform_closed(system: IfsSystem, t: float, policy: PruningPolicy) -> float:
    """vol(Delta)/t - bernoulli_coefficient(d, t) * truncated hole series at t."""
    if t <= 0:
        raise ValueError("t must be positive")
    report = hole_series(system, t, policy)
    vol_delta = math.exp(system.simplex.log_volume)
    return vol_delta / t - bernoulli_coefficient(system.d, t) * report.cumulative


def neighborhood_volume(system: IfsSystem, eps: float, policy: PruningPolicy):
    """(lower, upper) bounds on the volume of the eps-neighborhood of the
    attractor inside the simplex.

    Each enumerated hole contributes the exact volume of its inner band of
    width eps; holes beyond the truncation lie inside the un-excised residual,
    which the upper bound counts in full.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    d = system.d
    lower = 0.0
    total_hole = 0.0
    for lv, li in _hole_level_terms(system, policy):
        vol = np.exp(lv)
        inr = np.exp(li)
        total_hole += float(vol.sum())
        core = np.maximum(0.0, 1.0 - eps / inr) ** d
        lower += float((vol * (1.0 - core)).sum())
    residual = math.exp(system.simplex.log_volume) - total_hole
    return lower, lower + residual


def norm_series(system: IfsSystem, r: float, cap: int) -> SeriesReport:
    """Sum of ||N_i||^-r over exactly the words with ||N_i|| <= cap.

    Levels in the report are dyadic shells: shell n covers norms in
    [2^(n-1), 2^n), so the empty word (norm 1) sits in shell 1.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    cap = int(cap)
    hist = _counting.norm_histogram(system, cap)
    vals = np.nonzero(hist)[0]
    weights = hist[vals].astype(np.float64)
    logterms = np.log(weights) - r * np.log(vals.astype(np.float64))
    shells = []
    sums = []
    n = 1
    while 2 ** (n - 1) <= cap:
        mask = (vals >= 2 ** (n - 1)) & (vals < 2 ** n)
        shells.append(n)
        sums.append(_logsumexp(logterms[mask]))
        n += 1
    return SeriesReport("norm-series", float(r), tuple(shells), tuple(sums),
                        "norm-cap=%d" % cap)


def counting_function(system: IfsSystem, cap: int) -> SeriesReport:
    """Dyadic shell counts of words by norm; the r = 0 norm series relabeled."""
    base = norm_series(system, 0.0, cap)
    return SeriesReport("counting-function", 0.0, base.levels,
                        base.level_log_sums, base.truncation)


def counting_exponent(system: IfsSystem, schedule) -> ExponentEstimate:
    """Polynomial growth rate of the counting function over a cap schedule.

    Least-squares slope of log count vs log cap over the schedule tail (the
    last max(3, ceil(n/2)) points); the bracket spans the slopes of
    consecutive tail pairs, which always contain the least-squares value.
    """
    caps = [int(c) for c in schedule]
    if len(caps) < 4:
        raise ValueError("schedule needs at least 4 norm caps")
    if any(b <= a for a, b in zip(caps, caps[1:])):
        raise ValueError("schedule must be strictly increasing")
    if caps[0] < 1:
        raise ValueError("norm caps must be >= 1")
    hist = _counting.norm_histogram(system, caps[-1])
    cum = np.cumsum(hist)
    counts = [int(cum[c]) for c in caps]
    xs = np.log(np.asarray(caps, dtype=np.float64))
    ys = np.log(np.asarray(counts, dtype=np.float64))
    k = max(3, math.ceil(len(caps) / 2))
    tx, ty = xs[-k:], ys[-k:]
    slope = float(np.polyfit(tx, ty, 1)[0])
    pair = (ty[1:] - ty[:-1]) / (tx[1:] - tx[:-1])
    # the LS slope is a convex combination of pair slopes; the min/max only
    # needs nudging when rounding puts it epsilon outside
    bracket = (min(float(pair.min()), slope), max(float(pair.max()), slope))
    return ExponentEstimate(slope, bracket,
                            "counting-regression", "norm-cap=%d" % caps[-1])


def de_leo_lower_bound(d: int, rho) -> DimensionEstimate:
    """Dimension lower bound max(d-1, d*rho/(d+1)) from a counting exponent."""
    if isinstance(rho, ExponentEstimate):
        point, (lo, hi) = rho.estimate, rho.bracket
    else:
        point = float(rho)
        lo = hi = point
    if point < 0:
        raise ValueError("counting exponent must be >= 0")
    bound = lambda r: max(d - 1.0, d * r / (d + 1.0))
    return DimensionEstimate(d=d, lower_bound=bound(point),
                             lower_bracket=(bound(lo), bound(hi)))


_SINGULAR_VARIANTS = ("s-2", "s-1")


def _singular_level_terms(system: IfsSystem, policy: PruningPolicy):
    """Per-level (r21, r31) = (log s2/s1, log s3/s1) arrays over words."""
    if system.d != 2:
        raise ValueError("singular series requires 3x3 products (d = 2)")
    if isinstance(policy, MaxDepth):
        data = get_level_data(system, policy.depth, with_sv=True)
        return list(zip(data.sv_r21, data.sv_r31))
    buckets: dict[int, list] = {}

    def visit(word, product):
        s1, s2, s3 = singular_values(product)
        buckets.setdefault(len(word), []).append(
            (math.log(s2) - math.log(s1), math.log(s3) - math.log(s1))
        )

    enumerate_words(system.generators, policy, visit)
    return [
        (np.array([p[0] for p in buckets[n]]), np.array([p[1] for p in buckets[n]]))
        for n in range(max(buckets) + 1)
    ]


def singular_series(system: IfsSystem, s: float, variant: str = "s-2",
                    policy: PruningPolicy = MaxDepth(8)) -> SeriesReport:
    """Level sums of (s2/s1) * (s3/s1)^e over words, e = s-2 or s-1.

    Both exponent variants are retained behind the flag; they differ by one
    power of s3/s1 and have very different convergence behavior on parabolic
    families (see estimate_hausdorff for which one admits a root).
    """
    if not 1.0 < s < 2.0:
        raise ValueError("s must lie in (1, 2)")
    if variant not in _SINGULAR_VARIANTS:
        raise ValueError("variant must be one of %s" % (_SINGULAR_VARIANTS,))
    e = s - 2.0 if variant == "s-2" else s - 1.0
    terms = _singular_level_terms(system, policy)
    sums = tuple(_logsumexp(r21 + e * r31) for r21, r31 in terms)
    return SeriesReport("singular-series", float(s), tuple(range(len(sums))),
                        sums, _policy_label(policy))


def _estimate_by_level_growth(level_terms, weight, interval, depth, xtol=5e-4):
    """Shared bisection machinery: weight(param) maps (a, b) arrays to log terms."""
    lo, hi = interval

    def g_at(trunc):
        terms = level_terms[: trunc + 1]

        def g(x):
            return _growth_slope([_logsumexp(weight(x, a, b)) for a, b in terms])

        return g

    root, (blo, bhi) = _bisect_root(g_at(depth), lo, hi, xtol)
    root_shallow, _ = _bisect_root(g_at(depth - 2), lo, hi, xtol)
    delta = abs(root - root_shallow)
    return ExponentEstimate(root, (blo - delta, bhi + delta),
                            "level-growth-root", "depth=%d" % depth)


def estimate_sigma(system: IfsSystem, interval=(-1.0, 0.0), depth: int = 12) -> ExponentEstimate:
    """Critical exponent of the hole series; box dimension is d + sigma.

    Bisection of the level-growth statistic over interval within [-1, 0];
    the bracket adds the shift of the root when estimated two levels lower.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not (-1.0 <= lo < hi <= 0.0):
        raise ValueError("search interval must lie within [-1, 0]")
    depth = int(depth)
    if depth < 6:
        raise ValueError("depth must be >= 6 for a stable growth fit")
    data = get_level_data(system, depth)
    terms = list(zip(data.hole_log_vol, data.hole_log_in))
    return _estimate_by_level_growth(
        terms, lambda t, lv, li: lv + t * li, (lo, hi), depth)


def estimate_hausdorff(system: IfsSystem, interval=(1.05, 1.95), depth: int = 12) -> ExponentEstimate:
    """Critical parameter of the singular-value series, bisected like sigma.

    Uses the s-1 exponent variant: with unimodular products the s-1 form at
    s = 2 sums squared reciprocal-norm areas and is the normalization whose
    convergence threshold sits inside (1, 2); the s-2 form diverges on the
    whole interval for parabolic families, leaving no root to find.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not (1.0 < lo < hi < 2.0):
        raise ValueError("search interval must lie within (1, 2)")
    depth = int(depth)
    if depth < 6:
        raise ValueError("depth must be >= 6 for a stable growth fit")
    terms = _singular_level_terms(system, MaxDepth(depth))
    return _estimate_by_level_growth(
        terms, lambda s, r21, r31: r21 + (s - 1.0) * r31, (lo, hi), depth)

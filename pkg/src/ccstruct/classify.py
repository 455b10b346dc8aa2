"""Decision procedures for uniform global structure (UGS).

A density field admits a UGS when a single profile f(delta) is
comparable to the structure value uniformly over base points; the theory
forces any such profile to be comparable to delta (linear type) or to
delta^2 (quadratic type).  These procedures probe that trichotomy on a
declared finite window and delta ladder:

* ``check_linear_conditions`` — the two equivalent linear-type
  conditions: (a) disk masses mu(z, delta)/delta uniformly bounded (no
  growth trend), and (b) the small-scale double supremum
  sup_{zhat near z} sup_{h <= M} mu(zhat, h)/h bounded away from zero
  uniformly in z.
* ``check_quadratic_conditions`` — a crossover scale delta* below which
  mu/delta is bounded and above which mu/delta^2 is pinched in a
  two-sided band.
* ``dichotomy_probe`` — per-base-point log-log slopes of the structure
  proxy combined with the condition checks into a verdict.

Everything is quantified over the recorded window only; `Inconclusive`
is a first-class verdict and finite data is never forced into the
dichotomy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .density import DELTA_HAT_MIN, DensityField
from .structure import SupOptions, lambda_sup, optimize_weighted_disk

#: reduced search budget for classification sweeps (many lambda_sup calls)
CLASSIFY_OPTS = SupOptions(n_rungs=10, grid=17, n_polish=2,
                           polish_maxiter=60)


@dataclass(frozen=True)
class Window:
    """Axis-aligned base-point window sampled on an n x n lattice."""
    x0: float
    y0: float
    x1: float
    y1: float
    n: int = 5

    def __post_init__(self):
        if self.x1 < self.x0 or self.y1 < self.y0 or self.n < 1:
            raise ValueError("empty window")

    def points(self):
        xs = np.linspace(self.x0, self.x1, self.n)
        ys = np.linspace(self.y0, self.y1, self.n)
        return [complex(x, y) for y in ys for x in xs]

    def as_dict(self):
        return {"x0": self.x0, "y0": self.y0, "x1": self.x1, "y1": self.y1,
                "n": self.n}


@dataclass
class ConditionCheck:
    name: str
    statistic: float
    verdict: str                    # 'pass' | 'fail' | 'inconclusive'
    window: dict = dc_field(default_factory=dict)
    context: dict = dc_field(default_factory=dict)

    def as_dict(self):
        return {"name": self.name, "statistic": self.statistic,
                "verdict": self.verdict, "window": self.window,
                "context": self.context}


@dataclass
class UGSReport:
    verdict: str                    # 'Linear' | 'Quadratic' | 'NoUGS' | 'Inconclusive'
    checks: list
    slopes: dict                    # per-z fitted slope
    slope_spread: float
    window: dict
    deltas: tuple
    meta: dict = dc_field(default_factory=dict)

    def as_dict(self):
        return {
            "verdict": self.verdict,
            "slope_spread": self.slope_spread,
            "slopes": {f"{z.real:g}+{z.imag:g}j": s
                       for z, s in self.slopes.items()},
            "checks": [c.as_dict() for c in self.checks],
            "window": self.window,
            "deltas": list(self.deltas),
            "meta": self.meta,
        }


def fit_loglog_slope(deltas, values):
    """Least-squares slope of log(values) against log(deltas), skipping
    non-positive values.  Returns nan when fewer than two usable points."""
    d = np.asarray(deltas, dtype=float)
    v = np.asarray(values, dtype=float)
    keep = (v > 0) & (d > 0)
    if keep.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(d[keep]), np.log(v[keep]), 1)[0])


def track_slope(field, track, deltas, opts: SupOptions = None):
    """Slope of log lambda_sup(track(delta), delta) vs log delta along a
    moving base point, e.g. track = lambda d: d**1.5."""
    opts = opts or CLASSIFY_OPTS
    vals = [lambda_sup(field, track(d), d, opts).value for d in deltas]
    return fit_loglog_slope(deltas, vals)


def _mass_table(field, zs, deltas):
    """mu(z, delta) over the lattice: array of shape (len(deltas), len(zs))."""
    zs = np.asarray(zs, dtype=complex)
    return np.array([np.asarray(field.disk_mass_many(zs, float(d)), dtype=float)
                     for d in deltas])


def check_linear_conditions(field: DensityField, window: Window, deltas,
                            delta_star_ladder=(1.0, 2.0, 4.0, 8.0, 16.0),
                            trend_tol=0.2, trend_tail=4,
                            opts: SupOptions = None):
    """The two linear-type conditions on the sampled window.

    (a) passes when sup_z mu(z, delta)/delta shows no growth trend: the
    log-log slope over the last ``trend_tail`` ladder rungs is at most
    ``trend_tol``.
    (b) passes when, for some crossover delta* on the ladder (with reach
    M = delta*/2), the per-z double supremum of mu(zhat, h)/h is bounded
    away from zero: its infimum is at least 1e-3 times its median, with
    positive median.
    """
    opts = opts or CLASSIFY_OPTS
    zs = window.points()
    deltas = tuple(float(d) for d in deltas)

    table = _mass_table(field, zs, deltas)
    per_delta_sup = table.max(axis=1) / np.asarray(deltas)
    tail = min(max(trend_tail, 2), len(deltas))
    trend = fit_loglog_slope(deltas[-tail:], per_delta_sup[-tail:])
    stat_a = float(per_delta_sup.max())
    if math.isnan(trend):
        verdict_a = "inconclusive"
    else:
        verdict_a = "pass" if trend <= trend_tol else "fail"
    check_a = ConditionCheck(
        "linear_a_mass_over_delta_bounded", stat_a, verdict_a,
        window.as_dict(),
        {"trend_slope": trend, "trend_tol": trend_tol,
         "per_delta_sup": per_delta_sup.tolist(), "deltas": list(deltas)})

    best = None
    for dstar in delta_star_ladder:
        m_reach = dstar / 2.0
        per_z = []
        for z in zs:
            val, _ = optimize_weighted_disk(
                field, z, dstar, DELTA_HAT_MIN, m_reach,
                weight=lambda h: 1.0 / h, opts=opts)
            per_z.append(val)
        per_z = np.asarray(per_z)
        inf_v = float(per_z.min())
        med_v = float(np.median(per_z))
        ok = med_v > 0 and inf_v >= 1e-3 * med_v
        cand = (ok, inf_v, med_v, dstar, m_reach)
        if best is None or (cand[0], cand[1]) > (best[0], best[1]):
            best = cand
    ok, inf_v, med_v, dstar, m_reach = best
    check_b = ConditionCheck(
        "linear_b_small_scale_inf_sup", inf_v,
        "pass" if ok else "fail", window.as_dict(),
        {"median": med_v, "delta_star": dstar, "M": m_reach,
         "delta_star_ladder": list(delta_star_ladder)})
    return check_a, check_b


def check_quadratic_conditions(field: DensityField, window: Window, deltas,
                               delta_star_ladder=(1.0, 2.0, 4.0, 8.0, 16.0),
                               band_ratio_max=50.0, trend_tol=0.1):
    """Crossover conditions for quadratic type.

    Searches delta* on the ladder.  (a) below delta*, mu/delta must show
    no growth trend (vacuously true with < 2 rungs below delta*).
    (b) above delta*, mu/delta^2 over all sampled (z, delta) must be
    pinched in a band of ratio at most ``band_ratio_max`` *and* show a
    flat trend in delta (otherwise a slow drift toward 0 or infinity
    passes the band test on any finite ladder).
    """
    zs = window.points()
    deltas = np.asarray(sorted(float(d) for d in deltas))
    table = _mass_table(field, zs, deltas)

    best_a = best_b = None
    for dstar in delta_star_ladder:
        below = deltas <= dstar
        above = ~below
        if above.sum() < 2:
            continue
        # (a): no growth trend of sup_z mu/delta below the crossover
        if below.sum() >= 2:
            sup_small = table[below].max(axis=1) / deltas[below]
            trend_a = fit_loglog_slope(deltas[below], sup_small)
            ok_a = math.isnan(trend_a) or trend_a <= trend_tol
            stat_a = float(sup_small.max())
        else:
            trend_a, ok_a, stat_a = math.nan, True, 0.0
        # (b): two-sided band for mu/delta^2 above the crossover
        quad = table[above] / (deltas[above, None] ** 2)
        sup_q = float(quad.max())
        inf_q = float(quad.min())
        trend_b = fit_loglog_slope(deltas[above], quad.max(axis=1))
        if inf_q <= 0:
            ratio = math.inf
        else:
            ratio = sup_q / inf_q
        ok_b = (ratio <= band_ratio_max and not math.isnan(trend_b)
                and abs(trend_b) <= trend_tol)
        if ok_a and ok_b:
            best_a = (stat_a, trend_a, dstar, "pass")
            best_b = (ratio, trend_b, dstar, "pass")
            break
        if best_b is None or (ratio < best_b[0]):
            best_a = (stat_a, trend_a, dstar, "pass" if ok_a else "fail")
            best_b = (ratio, trend_b, dstar, "pass" if ok_b else "fail")

    if best_b is None:   # ladder too short for any crossover
        check_a = ConditionCheck("quadratic_a_linear_below_crossover",
                                 math.nan, "inconclusive", window.as_dict())
        check_b = ConditionCheck("quadratic_b_band_above_crossover",
                                 math.nan, "inconclusive", window.as_dict())
        return check_a, check_b
    stat_a, trend_a, dstar_a, va = best_a
    ratio, trend_b, dstar, vb = best_b
    check_a = ConditionCheck(
        "quadratic_a_linear_below_crossover", stat_a, va, window.as_dict(),
        {"trend_slope": trend_a, "delta_star": dstar_a})
    check_b = ConditionCheck(
        "quadratic_b_band_above_crossover", ratio, vb, window.as_dict(),
        {"trend_slope": trend_b, "delta_star": dstar,
         "band_ratio_max": band_ratio_max,
         "delta_star_ladder": list(delta_star_ladder)})
    return check_a, check_b


LINEAR_BAND = (0.85, 1.15)
QUADRATIC_BAND = (1.85, 2.15)


def _decide(slopes, spread, linear_ok, quadratic_ok, slope_tol, spread_tol):
    """Verdict rule combining slope geometry with the condition checks.

    The checks carry the structural evidence; slopes alone decide only
    the clear-cut cases.  A tight slope cluster sitting outside both
    admissible bands contradicts the dichotomy on this window, as does a
    large cross-z spread with no check support: both yield NoUGS.
    """
    vals = [s for s in slopes.values() if not math.isnan(s)]
    if not vals:
        return "Inconclusive"
    mean = float(np.mean(vals))
    lin_lo, lin_hi = LINEAR_BAND
    quad_lo, quad_hi = QUADRATIC_BAND

    if linear_ok and quadratic_ok:
        return "Inconclusive"   # mutual exclusion: never render both
    if linear_ok and not quadratic_ok:
        return "Linear"
    if quadratic_ok and not linear_ok:
        return "Quadratic"

    # neither family of conditions holds
    if spread <= spread_tol:
        in_linear = lin_lo - slope_tol <= mean <= lin_hi + slope_tol
        in_quadratic = quad_lo - slope_tol <= mean <= quad_hi + slope_tol
        if not in_linear and not in_quadratic:
            return "NoUGS"      # uniform growth at an inadmissible exponent
        return "Inconclusive"   # slopes look fine but checks disagree
    if spread > spread_tol:
        return "NoUGS"          # exponent varies with the base point
    return "Inconclusive"


def dichotomy_probe(field: DensityField, window: Window, deltas,
                    slope_tol=0.15, spread_tol=0.3,
                    opts: SupOptions = None):
    """Probe the linear/quadratic dichotomy on the window.

    Fits a log-log slope of the structure proxy per base point, runs both
    condition checks, and combines them into a verdict.  Requires the
    delta ladder to span at least two decades, otherwise Inconclusive.
    """
    opts = opts or CLASSIFY_OPTS
    deltas = tuple(sorted(float(d) for d in deltas))
    slopes = {}
    meta = {"slope_tol": slope_tol, "spread_tol": spread_tol,
            "opts": opts.key()}

    enough = len(deltas) >= 3 and deltas[-1] / deltas[0] >= 100.0
    if not enough:
        report = UGSReport("Inconclusive", [], {}, math.nan,
                           window.as_dict(), deltas, meta)
        report.meta["reason"] = "delta ladder spans fewer than two decades"
        return report

    for z in window.points():
        vals = [lambda_sup(field, z, d, opts).value for d in deltas]
        slopes[z] = fit_loglog_slope(deltas, vals)
    finite = [s for s in slopes.values() if not math.isnan(s)]
    spread = float(max(finite) - min(finite)) if finite else math.nan

    lin_a, lin_b = check_linear_conditions(field, window, deltas, opts=opts)
    quad_a, quad_b = check_quadratic_conditions(field, window, deltas)
    linear_ok = lin_a.verdict == "pass" and lin_b.verdict == "pass"
    quadratic_ok = quad_a.verdict == "pass" and quad_b.verdict == "pass"

    verdict = _decide(slopes, spread, linear_ok, quadratic_ok,
                      slope_tol, spread_tol)
    checks = [lin_a, lin_b, quad_a, quad_b]
    return UGSReport(verdict, checks, slopes, spread, window.as_dict(),
                     deltas, meta)


def doubling_ratio(field: DensityField, window: Window, deltas,
                   chain_bound=49.0, opts: SupOptions = None):
    """Per-delta table of max_z lambda_sup(z, 2 delta)/lambda_sup(z, delta).

    Only ladder entries whose double is also on the ladder (within 1e-9
    relative) are used.  Zero denominators are reported as skipped rows.
    The chain bound 49 applies to fields already classified as UGS; rows
    exceeding it are flagged, not fatal.
    """
    opts = opts or CLASSIFY_OPTS
    deltas = sorted(float(d) for d in deltas)
    zs = window.points()
    rows = []
    for d in deltas:
        if not any(abs(d2 - 2.0 * d) <= 1e-9 * d2 for d2 in deltas):
            continue
        ratios = []
        skipped = 0
        for z in zs:
            lo = lambda_sup(field, z, d, opts).value
            hi = lambda_sup(field, z, 2.0 * d, opts).value
            if lo <= 0:
                skipped += 1
                continue
            ratios.append(hi / lo)
        if ratios:
            worst = max(ratios)
            rows.append({"delta": d, "max_ratio": worst,
                         "flagged": worst > chain_bound,
                         "skipped": skipped})
        else:
            rows.append({"delta": d, "max_ratio": math.nan,
                         "flagged": False, "skipped": skipped})
    return rows

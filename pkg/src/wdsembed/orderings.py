"""Stochastic-order checks for measure families.

Implements the barycentre-type functions psi_wds / psi_mrl / psi_wis and the
positive kernel K(x) = C(x) - mean, and decides six orderings on finite
comparison grids.  The weak-decreasing-stochastic (wds) check runs two
independent routes -- pointwise psi comparison and a TP2 test on K -- and
reports Inconclusive if they ever disagree (tolerance effects only).

Infinity handling: +inf is represented by ``math.inf``; comparisons against
it are resolved by IEEE semantics (inf >= anything, inf <= inf) and no
arithmetic is ever performed on infinite values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .measures import Measure, MeasureFamily, MeasureError

DEFAULT_TOL = 1e-9
REFINE_PER_GAP = 32
FAR_LEFT_PROBES = (10.0, 100.0, 1000.0)
MAX_GRID_POINTS = 20000
# knot gaps narrower than this (relative) are float noise, not real cells
NEGLIGIBLE_GAP = 1e-12


class NonNegativeMeanError(MeasureError):
    pass


class NonPositiveMeanError(MeasureError):
    pass


class MeanSignViolationError(MeasureError):
    pass


class GridTooCoarseError(MeasureError):
    pass


class TP2GridError(ValueError):
    pass


class Relation(str, Enum):
    ST_INCREASING = "st_increasing"
    ST_DECREASING = "st_decreasing"
    ICX = "icx"
    DCX = "dcx"
    MRL = "mrl"
    WDS = "wds"
    WIS = "wis"


@dataclass(frozen=True)
class Witness:
    s: float
    t: float
    x: float
    lhs: float
    rhs: float


@dataclass(frozen=True)
class OrderVerdict:
    relation: Relation
    holds: bool
    witness: Optional[Witness] = None
    inconclusive: bool = False
    detail: str = ""

    def to_dict(self) -> dict:
        d = {
            "relation": self.relation.value,
            "holds": self.holds,
            "inconclusive": self.inconclusive,
            "detail": self.detail,
        }
        if self.witness is not None:
            d["witness"] = {
                "s": self.witness.s,
                "t": self.witness.t,
                "x": self.witness.x,
                "lhs": self.witness.lhs,
                "rhs": self.witness.rhs,
            }
        return d


@dataclass(frozen=True)
class TP2Report:
    ok: bool
    witness: Optional[tuple[float, float, float, float, float]] = None  # (t1, t2, x1, x2, det)


# -- pointwise functions ----------------------------------------------


def k_function(m: Measure, x: float) -> float:
    """K(x) = C(x) - mean; strictly positive for negative-mean measures."""
    mean = m.mean()
    if mean >= 0:
        raise NonNegativeMeanError(f"mean {mean} is not negative")
    return m.integrated_survival(x) - mean


def k_function_many(m: Measure, xs: np.ndarray) -> np.ndarray:
    mean = m.mean()
    if mean >= 0:
        raise NonNegativeMeanError(f"mean {mean} is not negative")
    return m.integrated_survival_many(xs) - mean


def psi_wds(m: Measure, x: float) -> float:
    return float(psi_wds_many(m, np.array([x]))[0])


def psi_wds_many(m: Measure, xs: np.ndarray) -> np.ndarray:
    """Vectorized psi_wds; +inf at and beyond the support supremum."""
    mean = m.mean()
    if mean >= 0:
        raise NonNegativeMeanError(f"mean {mean} is not negative")
    xs = np.asarray(xs, dtype=float)
    r = m.support_sup()
    surv = m.survival_from_many(xs)
    pmom = m.partial_first_moment_from_many(xs)
    out = np.full(xs.shape, math.inf)
    inside = (xs < r) & (surv > 0.0)
    out[inside] = (pmom[inside] - mean) / surv[inside]
    return out


def psi_mrl(m: Measure, x: float) -> float:
    """Mean-residual-life function; equals x at and beyond the support sup."""
    r = m.support_sup()
    if x >= r:
        return x
    surv = m.survival_from(x)
    if surv <= 0.0:
        return x
    return m.partial_first_moment_from(x) / surv


def psi_wis(m: Measure, x: float) -> float:
    """Mirror of psi_wds for positive-mean measures via reflection."""
    if m.mean() <= 0:
        raise NonPositiveMeanError(f"mean {m.mean()} is not positive")
    return psi_wds(m.reflect(), -x)


# -- grids ------------------------------------------------------------


def comparison_grid(
    mu: Measure,
    nu: Measure,
    n_refine: int = REFINE_PER_GAP,
    include_zero: bool = True,
) -> np.ndarray:
    """Union of both measures' knots, refinement points per knot gap, the
    origin, and three far-left probes."""
    knots = sorted(set(mu.knots()) | set(nu.knots()))
    pts = set(knots)
    if include_zero:
        pts.add(0.0)
    # keep total grid bounded for very knot-dense measures
    per_gap = n_refine
    if (len(knots) - 1) * n_refine > MAX_GRID_POINTS:
        per_gap = max(2, MAX_GRID_POINTS // max(1, len(knots) - 1))
    for a, b in zip(knots[:-1], knots[1:]):
        if b - a <= NEGLIGIBLE_GAP * max(1.0, abs(a), abs(b)):
            continue
        pts.update(np.linspace(a, b, per_gap + 2)[1:-1].tolist())
    lo = min(knots)
    pts.update(lo - p for p in FAR_LEFT_PROBES)
    return np.array(sorted(pts))


def check_grid_density(mu: Measure, nu: Measure, grid: Sequence[float]) -> None:
    """Raise GridTooCoarseError when a knot gap has fewer than 2 interior points."""
    grid = np.asarray(grid, dtype=float)
    knots = sorted(set(mu.knots()) | set(nu.knots()))
    for a, b in zip(knots[:-1], knots[1:]):
        if b - a <= NEGLIGIBLE_GAP * max(1.0, abs(a), abs(b)):
            continue
        inside = np.count_nonzero((grid > a) & (grid < b))
        if inside < 2:
            raise GridTooCoarseError(f"fewer than 2 grid points inside ({a}, {b})")


# -- TP2 machinery ----------------------------------------------------


def tp2_check_grid(
    times: Sequence[float],
    xs: Sequence[float],
    F: np.ndarray,
    tol: float = DEFAULT_TOL,
) -> TP2Report:
    """Check all adjacent 2x2 minors of a tabulated nonnegative kernel.

    Adjacent-minor nonnegativity propagates to all minors for positive
    matrices, so this certifies TP2 on the grid.  Determinants are compared
    against -tol * (scale of the minor's entries).
    """
    times = np.asarray(times, dtype=float)
    xs = np.asarray(xs, dtype=float)
    F = np.asarray(F, dtype=float)
    if F.shape != (len(times), len(xs)):
        raise TP2GridError("F shape does not match the grids")
    if np.any(np.diff(times) < 0) or np.any(np.diff(xs) < 0):
        raise TP2GridError("UnsortedGrid: grid axes must be sorted")
    if np.any(~np.isfinite(F)) or np.any(F < 0):
        raise TP2GridError("NegativeEntry: kernel values must be finite and >= 0")
    ad = F[:-1, :-1] * F[1:, 1:]
    bc = F[:-1, 1:] * F[1:, :-1]
    det = ad - bc
    scale = np.maximum(np.maximum(np.abs(ad), np.abs(bc)), 1e-300)
    bad = det < -tol * scale
    if not np.any(bad):
        return TP2Report(ok=True)
    # worst relative violation
    rel = np.where(bad, -det / scale, -np.inf)
    i, j = np.unravel_index(int(np.argmax(rel)), rel.shape)
    return TP2Report(
        ok=False,
        witness=(float(times[i]), float(times[i + 1]), float(xs[j]), float(xs[j + 1]), float(det[i, j])),
    )


# -- pairwise and familywise comparison -------------------------------


def _pointwise_check(
    relation: Relation,
    s: float,
    t: float,
    grid: np.ndarray,
    lhs: np.ndarray,
    rhs: np.ndarray,
    tol: float,
) -> tuple[bool, Optional[Witness]]:
    """Require lhs <= rhs on the grid.

    The reported witness is the grid point with the largest violation;
    ties break toward the smallest |x|, then the smallest x.
    """
    with np.errstate(invalid="ignore"):
        viol = lhs - rhs
    # inf <= inf and finite <= inf never violate; inf > finite always does
    both_inf = np.isinf(lhs) & np.isinf(rhs)
    viol = np.where(both_inf, -math.inf, viol)
    finite_pair = np.isfinite(lhs) & np.isfinite(rhs)
    allow = tol * np.maximum(1.0, np.maximum(np.abs(np.where(finite_pair, lhs, 0.0)),
                                             np.abs(np.where(finite_pair, rhs, 0.0))))
    bad = viol > allow
    if not np.any(bad):
        return True, None
    idx = np.nonzero(bad)[0]
    mags = viol[idx]
    best = idx[mags == np.max(mags)]
    order = np.lexsort((grid[best], np.abs(grid[best])))
    j = int(best[order[0]])
    return False, Witness(s=s, t=t, x=float(grid[j]), lhs=float(lhs[j]), rhs=float(rhs[j]))


def compare_pair(
    relation: Relation | str,
    mu: Measure,
    nu: Measure,
    s: float = 0.0,
    t: float = 1.0,
    grid: Optional[Sequence[float]] = None,
    tol: float = DEFAULT_TOL,
) -> OrderVerdict:
    """Decide whether the ordered pair (mu at time s, nu at time t) satisfies
    the relation."""
    relation = Relation(relation)
    if grid is None:
        xs = comparison_grid(mu, nu)
    else:
        xs = np.asarray(sorted(grid), dtype=float)
        check_grid_density(mu, nu, xs)

    if relation == Relation.WDS:
        if mu.mean() >= 0 or nu.mean() >= 0:
            raise MeanSignViolationError("wds requires negative means")
    if relation == Relation.WIS:
        if mu.mean() <= 0 or nu.mean() <= 0:
            raise MeanSignViolationError("wis requires positive means")
        inner = compare_pair(Relation.WDS, mu.reflect(), nu.reflect(), s=s, t=t,
                             grid=(-xs)[::-1], tol=tol)
        witness = None
        if inner.witness is not None:
            witness = Witness(s=s, t=t, x=-inner.witness.x,
                              lhs=inner.witness.lhs, rhs=inner.witness.rhs)
        return OrderVerdict(Relation.WIS, inner.holds, witness, inner.inconclusive, inner.detail)

    if relation == Relation.ST_INCREASING:
        ok, w = _pointwise_check(relation, s, t, xs,
                                 mu.survival_from_many(xs), nu.survival_from_many(xs), tol)
        return OrderVerdict(relation, ok, w)
    if relation == Relation.ST_DECREASING:
        ok, w = _pointwise_check(relation, s, t, xs,
                                 nu.survival_from_many(xs), mu.survival_from_many(xs), tol)
        if w is not None:
            # report the violated survival inequality in (mu, nu) order
            w = Witness(s=s, t=t, x=w.x, lhs=w.rhs, rhs=w.lhs)
        return OrderVerdict(relation, ok, w)
    if relation == Relation.ICX:
        ok, w = _pointwise_check(relation, s, t, xs,
                                 mu.integrated_survival_many(xs), nu.integrated_survival_many(xs), tol)
        return OrderVerdict(relation, ok, w)
    if relation == Relation.DCX:
        # K(x) + x = E[(x - X)^+]; comparing K compares the put values
        lhs = mu.integrated_survival_many(xs) - mu.mean()
        rhs = nu.integrated_survival_many(xs) - nu.mean()
        ok, w = _pointwise_check(relation, s, t, xs, lhs, rhs, tol)
        return OrderVerdict(relation, ok, w)
    if relation == Relation.MRL:
        lhs = np.array([psi_mrl(mu, float(x)) for x in xs])
        rhs = np.array([psi_mrl(nu, float(x)) for x in xs])
        ok, w = _pointwise_check(relation, s, t, xs, lhs, rhs, tol)
        return OrderVerdict(relation, ok, w)

    # wds: pointwise-psi route and TP2-on-K route must agree
    psi_ok, psi_w = _pointwise_check(relation, s, t, xs,
                                     psi_wds_many(mu, xs), psi_wds_many(nu, xs), tol)
    K = np.vstack([k_function_many(mu, xs), k_function_many(nu, xs)])
    tp2 = tp2_check_grid([s, t], xs, K, tol=tol)
    if psi_ok != tp2.ok:
        return OrderVerdict(Relation.WDS, holds=False, witness=psi_w, inconclusive=True,
                            detail=f"psi route holds={psi_ok}, TP2 route holds={tp2.ok}")
    if psi_ok:
        return OrderVerdict(Relation.WDS, holds=True)
    return OrderVerdict(Relation.WDS, holds=False, witness=psi_w,
                        detail="both psi and TP2 routes fail")


def compare_family(
    relation: Relation | str,
    fam: MeasureFamily,
    tol: float = DEFAULT_TOL,
    n_refine: int = REFINE_PER_GAP,
) -> OrderVerdict:
    """Fold compare_pair over consecutive family times (the orders are
    transitive, so consecutive checks suffice); first failure is reported."""
    relation = Relation(relation)
    inconclusive = None
    for (s, mu), (t, nu) in zip(fam.entries[:-1], fam.entries[1:]):
        grid = comparison_grid(mu, nu, n_refine=n_refine)
        verdict = compare_pair(relation, mu, nu, s=s, t=t, grid=grid, tol=tol)
        if verdict.inconclusive and inconclusive is None:
            inconclusive = verdict
            continue
        if not verdict.holds:
            return verdict
    if inconclusive is not None:
        return inconclusive
    return OrderVerdict(relation, holds=True)

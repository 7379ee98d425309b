"""Barrier construction for negative-mean targets via the price function.

The route here is deliberately independent of ``psi_wds``: the barrier is
assembled from the convex price function ``pi`` and its tangent geometry
(u, z), and the generalized inverse of the result is cross-checked against
psi_wds by the test suite.

Conventions:
  * theta = 1 is excluded (the z formula divides by 1 - theta); the barrier
    is closed off at the top with b = support_sup beyond the last knot.
  * the tangent point at theta = -1 is the left ray; z(-1) is taken as its
    limit 0.
  * between knots the barrier is a step function across atoms and piecewise
    linear inside density segments.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .measures import Measure, MeasureError
from .orderings import NonNegativeMeanError

SEGMENT_SAMPLES = 129
# depth of the geometric refinement toward the support top: 10^-k of the
# segment span for k = 1..3.  Deeper knots would put psi beyond ~1e4 where
# the z/psi cross-check loses absolute accuracy to float cancellation.
TOP_APPROACH_SAMPLES = 3
LEFT_RAY = -math.inf


class ThetaOutOfRangeError(MeasureError):
    pass


def _require_negative_mean(m: Measure) -> float:
    mean = m.mean()
    if mean >= 0:
        raise NonNegativeMeanError(f"mean {mean} is not negative")
    return mean


def pi_function(m: Measure, x: float) -> float:
    """pi(x) = integral |y - x| d mu - mean, via put-call parity 2C + x - 2*mean."""
    mean = _require_negative_mean(m)
    return 2.0 * m.integrated_survival(x) + x - 2.0 * mean


def pi_direct(m: Measure, x: float) -> float:
    """Direct |.| integration; only used to validate the parity reduction."""
    mean = _require_negative_mean(m)
    acc = sum(w * abs(loc - x) for loc, w in m.atoms)
    for s in m.segments:
        acc += s.first_moment(lo=x) - x * s.mass(lo=x)
        acc += x * s.mass_below(x) - s.first_moment_below(x)
    return acc - mean


def tangent_construction(m: Measure, theta: float) -> tuple[float, float]:
    """Return (u, z) for a tangent of gradient theta in [-1, 1).

    u is the smallest point whose subgradient of pi contains theta, found by
    inverting the strict survival function at level (1 - theta) / 2; z is the
    crossing of that tangent with the diagonal.  At theta = -1 the tangent
    touches only asymptotically: u is the left ray (-inf) and z its limit 0.
    """
    if not (-1.0 <= theta < 1.0):
        raise ThetaOutOfRangeError(f"theta {theta} outside [-1, 1)")
    _require_negative_mean(m)
    q = (1.0 - theta) / 2.0
    if q >= 1.0:
        return (LEFT_RAY, 0.0)

    u = _survival_level_point(m, q)
    z = (pi_function(m, u) - theta * u) / (1.0 - theta)
    return (u, z)


def _survival_level_point(m: Measure, q: float) -> float:
    """inf{y : mu((y, +inf)) <= q} for q in (0, 1)."""
    knots = m.knots()
    prev = knots[0] - 1.0
    for y in knots:
        if m.survival_above(y) <= q:
            # transition in (prev, y]; solve inside a density stretch if one
            # covers the bracket, otherwise the infimum is the knot itself
            seg = _covering_segment(m, prev, y)
            if seg is not None and m.survival_above(prev) > q:
                return _bisect_level(m, prev, y, q)
            return y
        prev = y
    return knots[-1]  # q <= 0 never reaches here for valid q


def _covering_segment(m: Measure, lo: float, hi: float) -> Optional[object]:
    for s in m.segments:
        if s.lower <= lo and hi <= s.upper:
            return s
    return None


def _bisect_level(m: Measure, lo: float, hi: float, q: float) -> float:
    """Leftmost point of the (monotone) level set {survival_above <= q}."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if m.survival_above(mid) <= q:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class Barrier:
    """Non-decreasing map alpha -> b(alpha) consumed by the stopping rule.

    knots are sorted by alpha; piece_linear[i] tells whether the stretch
    between knot i and knot i+1 interpolates linearly (density region) or
    holds the left value and jumps (atomic region).
    """

    alphas: tuple[float, ...]
    bvals: tuple[float, ...]
    piece_linear: tuple[bool, ...]
    r_sup: float

    def evaluate(self, alpha: float) -> float:
        alphas = self.alphas
        if alpha >= alphas[-1]:
            return self.r_sup if alpha > alphas[-1] else self.bvals[-1]
        i = int(np.searchsorted(alphas, alpha, side="right")) - 1
        if i < 0:
            return self.bvals[0]
        if self.piece_linear[i] and alphas[i + 1] > alphas[i]:
            frac = (alpha - alphas[i]) / (alphas[i + 1] - alphas[i])
            return self.bvals[i] + frac * (self.bvals[i + 1] - self.bvals[i])
        return self.bvals[i]

    def inverse(self, x: float) -> float:
        """Generalized inverse inf{alpha >= 0 : b(alpha) >= x}."""
        if x > self.r_sup:
            return math.inf
        bv = self.bvals
        if x <= bv[0]:
            return self.alphas[0]
        j = int(np.searchsorted(bv, x, side="left"))
        if j >= len(bv):
            return math.inf  # above the constructed top (density tails)
        if j > 0 and self.piece_linear[j - 1] and bv[j] > bv[j - 1]:
            frac = (x - bv[j - 1]) / (bv[j] - bv[j - 1])
            return self.alphas[j - 1] + frac * (self.alphas[j] - self.alphas[j - 1])
        return self.alphas[j]

    # -- serialization ------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "r_sup": repr(self.r_sup),
            "knots": [
                {"alpha": repr(a), "b": repr(b), "linear_to_next": bool(l)}
                for a, b, l in zip(self.alphas, self.bvals, list(self.piece_linear) + [False])
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Barrier":
        ks = d["knots"]
        return cls(
            alphas=tuple(float(k["alpha"]) for k in ks),
            bvals=tuple(float(k["b"]) for k in ks),
            piece_linear=tuple(bool(k["linear_to_next"]) for k in ks[:-1]),
            r_sup=float(d["r_sup"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Barrier":
        return cls.from_dict(json.loads(text))


def barrier(m: Measure, segment_samples: int = SEGMENT_SAMPLES) -> Barrier:
    """Build the barrier from the tangent construction.

    Atoms contribute exact step knots (theta at the left subgradient
    endpoint); density segments are sampled, geometrically refined toward the
    support supremum where the barrier climbs without bound.
    """
    _require_negative_mean(m)
    r = m.support_sup()
    raw: list[tuple[float, float, bool]] = []  # (alpha, b, from_density)

    for loc, _w in m.atoms:
        theta = 1.0 - 2.0 * m.survival_from(loc)
        if theta <= -1.0:
            raw.append((0.0, loc, False))  # bottom atom: z limit at theta -> -1
            continue
        # theta lies in the subgradient of pi at the atom; the tangent line
        # is flat on the stretch left of the atom, so z is computed from the
        # tangent at the atom itself (same line, same diagonal crossing)
        z = (pi_function(m, loc) - theta * loc) / (1.0 - theta)
        raw.append((z, loc, False))

    for s in m.segments:
        us = list(np.linspace(s.lower, s.upper, segment_samples))
        if s.upper >= r:
            # approach the top geometrically; psi blows up at r
            span = s.upper - s.lower
            us = us[:-1] + [s.upper - span * 10.0 ** (-k) for k in range(1, TOP_APPROACH_SAMPLES + 1)]
        for u_target in sorted(us):
            sa = m.survival_above(u_target)
            if sa <= 0.0:
                continue
            theta = 1.0 - 2.0 * sa
            if theta >= 1.0 - 1e-15:
                continue
            # inside a density stretch every point is a tangency point, so z
            # comes from the tangent line at u_target itself; re-deriving
            # u from theta would wobble by ~1 ulp, which the steep top of
            # the barrier amplifies enormously
            z = (pi_function(m, u_target) - theta * u_target) / (1.0 - theta)
            raw.append((z, u_target, True))

    raw.sort(key=lambda k: (k[0], k[1]))
    alphas: list[float] = []
    bvals: list[float] = []
    linear: list[bool] = []
    dens_flags: list[bool] = []
    for a, b, dens in raw:
        if alphas and a <= alphas[-1] + 0.0 and b <= bvals[-1]:
            continue  # duplicate or dominated knot
        if alphas and b < bvals[-1]:
            b = bvals[-1]  # clip float non-monotonicity
        alphas.append(float(a))
        bvals.append(float(b))
        dens_flags.append(dens)
    for i in range(len(alphas) - 1):
        linear.append(dens_flags[i] and dens_flags[i + 1])
    return Barrier(tuple(alphas), tuple(bvals), tuple(linear), r_sup=r)


def export_barrier(b: Barrier, path: str, n_samples: int = 256) -> None:
    """CSV with columns alpha,b,interp; knots plus interpolation samples for
    barriers with density (linear) stretches."""
    rows: list[tuple[float, float, str]] = []
    flags = list(b.piece_linear) + [False]
    for a, bv, lin in zip(b.alphas, b.bvals, flags):
        rows.append((a, bv, "linear" if lin else "step"))
    if any(b.piece_linear) and len(b.alphas) > 1:
        lo, hi = b.alphas[0], b.alphas[-1]
        for a in np.linspace(lo, hi, n_samples):
            rows.append((float(a), b.evaluate(float(a)), "sample"))
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "b", "interp"])
        for a, bv, kind in rows:
            writer.writerow([repr(float(a)), repr(float(bv)), kind])


def import_barrier(path: str, r_sup: Optional[float] = None) -> Barrier:
    """Rebuild a barrier from an exported CSV (samples rows are ignored)."""
    alphas: list[float] = []
    bvals: list[float] = []
    kinds: list[str] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            if row["interp"] == "sample":
                continue
            alphas.append(float(row["alpha"]))
            bvals.append(float(row["b"]))
            kinds.append(row["interp"])
    linear = tuple(k == "linear" for k in kinds[:-1])
    top = r_sup if r_sup is not None else bvals[-1]
    return Barrier(tuple(alphas), tuple(bvals), linear, r_sup=top)

"""Order-preserving transforms and built-in example families.

The five closure constructions (censoring, convex combination in time,
discrete subordination, random translation, scale mixing) and the reference
families used throughout the test-suite: the two-atom power family, the
two-segment density family, the translation counterexample, stochastically
shifted families and a constant-mean truncated-Gaussian control family.

Random translation and scale mixing are grid approximations: the input is
discretized, the mixing density is integrated per grid cell, and the result
is an atomic measure whose renormalization factor is reported alongside.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .measures import Measure, MeasureFamily, MeasureError, Segment
from .orderings import tp2_check_grid, TP2GridError

CONV_GRID_POINTS = 2048
RENORM_FLOOR = 0.999
LOG_CONCAVITY_TOL = 1e-9


class DegenerateIntervalError(MeasureError):
    pass


class TauOutOfRangeError(MeasureError):
    pass


class NotCenteredError(MeasureError):
    pass


class NotLogConcaveError(MeasureError):
    pass


class NotPositiveSupportError(MeasureError):
    pass


class KernelNotTP2Error(MeasureError):
    pass


class GridMismatchError(MeasureError):
    pass


class ParamOutOfRangeError(MeasureError):
    pass


# -- mixing inputs ----------------------------------------------------


@dataclass(frozen=True)
class LogConcaveDensity:
    """Density exp(log_values) tabulated on a sorted grid, zero outside."""

    grid: tuple[float, ...]
    log_values: tuple[float, ...]

    @classmethod
    def make(cls, grid: Sequence[float], log_values: Sequence[float]) -> "LogConcaveDensity":
        g = tuple(float(x) for x in grid)
        lv = tuple(float(v) for v in log_values)
        if len(g) != len(lv) or len(g) < 3:
            raise MeasureError("grid and log_values must share length >= 3")
        if any(b <= a for a, b in zip(g[:-1], g[1:])):
            raise MeasureError("grid must be strictly increasing")
        d = cls(g, lv)
        if not d.is_log_concave():
            raise NotLogConcaveError("log-density fails the midpoint concavity check")
        mass = d.total_mass()
        if abs(mass - 1.0) > 1e-6:
            raise MeasureError(f"density mass {mass} not 1 within 1e-6")
        return d

    def is_log_concave(self, tol: float = LOG_CONCAVITY_TOL) -> bool:
        g = np.array(self.grid)
        lv = np.array(self.log_values)
        for i in range(1, len(g) - 1):
            lam = (g[i + 1] - g[i]) / (g[i + 1] - g[i - 1])
            interp = lam * lv[i - 1] + (1.0 - lam) * lv[i + 1]
            if lv[i] < interp - tol:
                return False
        return True

    def values(self) -> np.ndarray:
        return np.exp(np.array(self.log_values))

    def total_mass(self) -> float:
        return float(np.trapezoid(self.values(), np.array(self.grid)))

    def mean(self) -> float:
        g = np.array(self.grid)
        return float(np.trapezoid(g * self.values(), g)) / self.total_mass()

    def cell_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """(cell midpoints, trapezoid cell masses), unnormalized."""
        g = np.array(self.grid)
        v = self.values()
        mids = 0.5 * (g[:-1] + g[1:])
        masses = 0.5 * (v[:-1] + v[1:]) * np.diff(g)
        return mids, masses

    @classmethod
    def triangular(cls, half_width: float = 1.0, n: int = 201) -> "LogConcaveDensity":
        xs = np.linspace(-half_width, half_width, n)
        dens = np.maximum((half_width - np.abs(xs)) / half_width**2, 1e-300)
        return cls.make(xs, np.log(dens))

    @classmethod
    def spike(cls, center: float = 0.0, width: float = 1e-6, n: int = 5) -> "LogConcaveDensity":
        xs = np.linspace(center - width, center + width, n)
        dens = np.maximum((width - np.abs(xs - center)) / width**2, 1e-300)
        return cls.make(xs, np.log(dens))


@dataclass(frozen=True)
class MixingKernel:
    """Discrete kernel rows p_t(lambda): nonnegative, rows sum to 1, TP2."""

    t_grid: tuple[float, ...]
    lambda_grid: tuple[float, ...]
    weights: tuple[tuple[float, ...], ...]

    @classmethod
    def make(cls, t_grid, lambda_grid, weights) -> "MixingKernel":
        tg = tuple(float(t) for t in t_grid)
        lg = tuple(float(v) for v in lambda_grid)
        W = np.asarray(weights, dtype=float)
        if W.shape != (len(tg), len(lg)):
            raise MeasureError("kernel shape mismatch")
        if np.any(W < 0):
            raise KernelNotTP2Error("kernel weights must be nonnegative")
        if np.any(np.abs(W.sum(axis=1) - 1.0) > 1e-9):
            raise MeasureError("kernel rows must sum to 1")
        try:
            report = tp2_check_grid(tg, lg, W)
        except TP2GridError as exc:
            raise KernelNotTP2Error(str(exc)) from exc
        if not report.ok:
            raise KernelNotTP2Error(f"kernel fails TP2 at {report.witness}")
        return cls(tg, lg, tuple(tuple(row) for row in W))


@dataclass(frozen=True)
class ApproximateTransform:
    """Grid-approximate transform output with its renormalization factor."""

    measure: Measure
    renormalization: float


# -- the five preservation transforms ---------------------------------


def censor(m: Measure, a: float, b: float) -> Measure:
    """Replace the mass on [a, b] by barycentric atoms at a and b.

    Mean-preserving by construction (each mass element y in [a, b] is split
    between a and b with weights proportional to b - y and y - a).
    """
    if b <= a:
        raise DegenerateIntervalError(f"need a < b, got [{a}, {b}]")
    inv = 1.0 / (b - a)

    def window_mass_and_moment() -> tuple[float, float]:
        mass = m.survival_from(a) - m.survival_above(b)
        moment = m.partial_first_moment_from(a) - (
            m.partial_first_moment_from(b) - b * m.atom_weight_at(b)
        )
        return mass, moment

    mass_ab, mom_ab = window_mass_and_moment()
    if mass_ab <= 0.0:
        return m
    alpha = inv * (b * mass_ab - mom_ab)
    beta = inv * (mom_ab - a * mass_ab)

    atoms = [(x, w) for x, w in m.atoms if x < a or x > b]
    if alpha > 0:
        atoms.append((a, alpha))
    if beta > 0:
        atoms.append((b, beta))
    segments = []
    for s in m.segments:
        if s.upper <= a or s.lower >= b:
            segments.append(s)
            continue
        if s.lower < a:
            segments.append(Segment(s.lower, a, s.coeffs))
        if s.upper > b:
            segments.append(Segment(b, s.upper, s.coeffs))
    return Measure.make(atoms=atoms, segments=segments)


def convex_combine_family(fam: MeasureFamily, tau: Sequence[float],
                          grid_per_gap: int = 3) -> MeasureFamily:
    """Piecewise-linear-in-time mixture through the anchor times tau.

    The output family is evaluated at the anchors and at grid_per_gap
    intermediate times per anchor gap; outside [tau_0, tau_r] the original
    entries are kept.
    """
    tau = [float(v) for v in tau]
    if sorted(tau) != tau or len(set(tau)) != len(tau) or len(tau) < 2:
        raise TauOutOfRangeError("tau must be strictly increasing with >= 2 entries")
    times = fam.times
    if tau[0] < times[0] or tau[-1] > times[-1]:
        raise TauOutOfRangeError("tau outside the family time range")
    by_time = dict(fam.entries)
    for v in tau:
        if v not in by_time:
            raise TauOutOfRangeError(f"no family entry at anchor time {v}")

    entries: list[tuple[float, Measure]] = [(t, m) for t, m in fam.entries if t < tau[0] or t > tau[-1]]
    for t0, t1 in zip(tau[:-1], tau[1:]):
        for t in np.linspace(t0, t1, grid_per_gap + 2)[:-1]:
            lam = (t1 - t) / (t1 - t0)
            entries.append((float(t), Measure.mix([by_time[t0], by_time[t1]], [lam, 1.0 - lam])))
    entries.append((tau[-1], by_time[tau[-1]]))
    return MeasureFamily.make(sorted(entries, key=lambda e: e[0]))


def random_translate(m: Measure, f: LogConcaveDensity,
                     n_grid: int = CONV_GRID_POINTS) -> ApproximateTransform:
    """Independent additive noise: convolution on a grid (atomic output)."""
    if abs(f.mean()) > 1e-9:
        raise NotCenteredError(f"density mean {f.mean()} not centered")
    base = m if not m.segments else m.to_atoms_on_grid(_discretization_grid(m, n_grid))
    mids, masses = f.cell_weights()
    locs = np.add.outer(base._atom_locs, mids).ravel()
    wts = np.multiply.outer(base._atom_wts, masses).ravel()
    return _atomic_from_products(locs, wts)


def scale_mix(m: Measure, f: LogConcaveDensity,
              n_grid: int = CONV_GRID_POINTS) -> ApproximateTransform:
    """Independent positive scaling whose log is log-concave."""
    if f.grid[0] <= 0.0:
        raise NotPositiveSupportError("scaling density must live on positive reals")
    log_grid = np.log(np.array(f.grid))
    # density of log Y at l is f(e^l) e^l
    log_dens = np.array(f.log_values) + log_grid
    probe = LogConcaveDensity(tuple(log_grid), tuple(log_dens))
    if not probe.is_log_concave():
        raise NotLogConcaveError("log of the scaling variable is not log-concave")
    base = m if not m.segments else m.to_atoms_on_grid(_discretization_grid(m, n_grid))
    mids, masses = f.cell_weights()
    locs = np.multiply.outer(base._atom_locs, mids).ravel()
    wts = np.multiply.outer(base._atom_wts, masses).ravel()
    return _atomic_from_products(locs, wts)


def subordinate(fam_y: MeasureFamily, kernel: MixingKernel) -> MeasureFamily:
    """Reindex a lambda-family through a TP2 discrete kernel in t."""
    by_lambda = dict(fam_y.entries)
    comps = []
    for lam in kernel.lambda_grid:
        if lam not in by_lambda:
            match = [t for t in by_lambda if abs(t - lam) <= 1e-12]
            if not match:
                raise GridMismatchError(f"family has no entry at lambda {lam}")
            lam = match[0]
        comps.append(by_lambda[lam])
    entries = []
    for t, row in zip(kernel.t_grid, kernel.weights):
        entries.append((t, Measure.mix(comps, list(row))))
    return MeasureFamily.make(entries)


def _discretization_grid(m: Measure, n_grid: int) -> np.ndarray:
    lo, hi = m.support_inf(), m.support_sup()
    pad = 1e-9 * max(1.0, abs(lo), abs(hi))
    return np.unique(np.concatenate([np.asarray(m.knots()), np.linspace(lo, hi - pad, n_grid)]))


def _atomic_from_products(locs: np.ndarray, wts: np.ndarray) -> ApproximateTransform:
    total = float(wts.sum())
    if total < RENORM_FLOOR:
        raise MeasureError(f"renormalization factor {total} below {RENORM_FLOOR}")
    order = np.argsort(locs)
    measure = Measure.make(atoms=list(zip(locs[order], wts[order] / total)))
    return ApproximateTransform(measure=measure, renormalization=total)


# -- example families -------------------------------------------------


def discrete_power_measure(k: int, t: float) -> Measure:
    """Two atoms at -t^k and 1-t^k with weights 1-t^k+t^{k+1} and t^k-t^{k+1}."""
    if not (0.0 < t < 1.0) or k < 1:
        raise ParamOutOfRangeError("need t in (0,1) and integer k >= 1")
    tk = t**k
    return Measure.make(atoms=[(-tk, 1.0 - tk + t * tk), (1.0 - tk, tk - t * tk)])


def density_alpha(k: int, t: float) -> float:
    return (k + 1) / (k + 2) * (2.0 * t) ** (k + 2) * (2.0 * t + 1.0) / (2.0 - t)


def density_power_measure(k: int, t: float) -> Measure:
    """Uniform mass on [-alpha(t), 0) plus a y^k density on [0, 1/t)."""
    if not (0.5 < t < 2.0) or not (0 <= k <= 8):
        raise ParamOutOfRangeError("need t in (1/2, 2) and integer k in 0..8")
    a = density_alpha(k, t)
    left = Segment(-a, 0.0, ((2.0 - t) / (2.0 * a),))
    coeffs = tuple([0.0] * k + [(k + 1) * t ** (k + 2) / 2.0])
    right = Segment(0.0, 1.0 / t, coeffs)
    return Measure.make(segments=[left, right])


def two_atom_measure(t: float) -> Measure:
    """Atoms at -t and 1-t with weights 1/(1+t) and t/(1+t)."""
    if t <= 0:
        raise ParamOutOfRangeError("need t > 0")
    return Measure.make(atoms=[(-t, 1.0 / (1.0 + t)), (1.0 - t, t / (1.0 + t))])


def translated_two_atom_measure(t: float) -> Measure:
    """The two-atom measure pushed forward by y -> y - 1 (not WDS ordered)."""
    return two_atom_measure(t).translate(-1.0)


def shifted_family(base: Measure, speed: float, times: Sequence[float]) -> MeasureFamily:
    """Deterministic downward drift: stochastically decreasing, hence WDS."""
    if speed <= 0:
        raise ParamOutOfRangeError("need speed > 0")
    return MeasureFamily.make([(t, base.translate(-speed * t)) for t in times])


def truncated_gaussian_measure(mean: float, sd: float, n_atoms: int = 401,
                               width: float = 6.0) -> Measure:
    """Discretized Gaussian, recentered so the mean is matched exactly."""
    xs = np.linspace(mean - width * sd, mean + width * sd, n_atoms)
    w = np.exp(-0.5 * ((xs - mean) / sd) ** 2)
    w /= w.sum()
    xs = xs + (mean - float(np.dot(xs, w)))  # exact recentering
    return Measure.make(atoms=list(zip(xs, w)))


def gaussian_peacock_family(mean: float, sds: Sequence[float],
                            n_atoms: int = 401) -> MeasureFamily:
    """Constant-mean variance-increasing control family (never WDS)."""
    if mean >= 0:
        raise ParamOutOfRangeError("control family needs a negative mean")
    return MeasureFamily.make(
        [(float(i + 1), truncated_gaussian_measure(mean, sd, n_atoms)) for i, sd in enumerate(sds)]
    )


EXAMPLE_FAMILIES = {
    "prop42": lambda k=1, times=(0.3, 0.6): MeasureFamily.make(
        [(t, discrete_power_measure(int(k), t)) for t in times]
    ),
    "prop44": lambda k=0, times=(0.6, 1.0, 1.5): MeasureFamily.make(
        [(t, density_power_measure(int(k), t)) for t in times]
    ),
    "two_atom": lambda times=(0.25, 0.5, 0.75): MeasureFamily.make(
        [(t, two_atom_measure(t)) for t in times]
    ),
    "translated_counterexample": lambda times=(0.25, 0.5, 0.75): MeasureFamily.make(
        [(t, translated_two_atom_measure(t)) for t in times]
    ),
    "shifted": lambda times=(1.0, 2.0, 3.0): shifted_family(
        Measure.point_mass(-1.0), 1.0, times
    ),
    "gaussian_peacock": lambda sds=(0.5, 1.0): gaussian_peacock_family(-1.0, sds),
}


def example_family(name: str, **params) -> MeasureFamily:
    if name not in EXAMPLE_FAMILIES:
        raise ParamOutOfRangeError(f"unknown example family {name!r}")
    return EXAMPLE_FAMILIES[name](**params)

"""Exact finite measures: weighted atoms plus piecewise-polynomial densities.

A measure is a finite list of atoms (location, weight) together with a list
of half-open density segments [lower, upper) carrying polynomial densities.
All supports are bounded, so every functional (mean, survival, integrated
survival) evaluates through exact polynomial antiderivatives.

Survival quantities use the closed interval [x, +inf): ``survival_from(x)``
includes the weight of an atom sitting exactly at ``x``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

MASS_TOL = 1e-12
ATOM_MERGE_TOL = 1e-12
MAX_POLY_DEGREE = 8
DENSITY_SAMPLES = 64


class MeasureError(ValueError):
    """Base class for measure construction/usage errors."""


class InvalidMeasureError(MeasureError):
    """Raised when a measure fails validation; carries the violation list."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class EmptySampleError(MeasureError):
    pass


def _poly_eval(coeffs: Sequence[float], y: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * y + c
    return acc


def _poly_mass(coeffs: Sequence[float], lo: float, hi: float) -> float:
    """Integral of the polynomial over [lo, hi]."""
    if hi <= lo:
        return 0.0
    acc = 0.0
    for j, c in enumerate(coeffs):
        acc += c * (hi ** (j + 1) - lo ** (j + 1)) / (j + 1)
    return acc


def _poly_first_moment(coeffs: Sequence[float], lo: float, hi: float) -> float:
    """Integral of y * p(y) over [lo, hi]."""
    if hi <= lo:
        return 0.0
    acc = 0.0
    for j, c in enumerate(coeffs):
        acc += c * (hi ** (j + 2) - lo ** (j + 2)) / (j + 2)
    return acc


@dataclass(frozen=True)
class Segment:
    """Density segment: density on [lower, upper) is sum coeffs[j] * y**j."""

    lower: float
    upper: float
    coeffs: tuple[float, ...]

    def density(self, y: float) -> float:
        if self.lower <= y < self.upper:
            return _poly_eval(self.coeffs, y)
        return 0.0

    def mass(self, lo: float = -math.inf) -> float:
        return _poly_mass(self.coeffs, max(self.lower, lo), self.upper)

    def first_moment(self, lo: float = -math.inf) -> float:
        return _poly_first_moment(self.coeffs, max(self.lower, lo), self.upper)

    def mass_below(self, hi: float) -> float:
        return _poly_mass(self.coeffs, self.lower, min(self.upper, hi))

    def first_moment_below(self, hi: float) -> float:
        return _poly_first_moment(self.coeffs, self.lower, min(self.upper, hi))


@dataclass(frozen=True)
class Measure:
    """Immutable probability measure with atoms and polynomial segments."""

    atoms: tuple[tuple[float, float], ...] = ()
    segments: tuple[Segment, ...] = ()

    # -- construction -------------------------------------------------

    @classmethod
    def make(
        cls,
        atoms: Iterable[tuple[float, float]] = (),
        segments: Iterable[Segment | tuple] = (),
    ) -> "Measure":
        """Normalize (sort atoms, merge near-duplicates) and validate."""
        segs = tuple(
            s if isinstance(s, Segment) else Segment(float(s[0]), float(s[1]), tuple(float(c) for c in s[2]))
            for s in segments
        )
        segs = tuple(sorted(segs, key=lambda s: s.lower))
        merged: list[list[float]] = []
        for x, w in sorted((float(x), float(w)) for x, w in atoms):
            if merged and x - merged[-1][0] <= ATOM_MERGE_TOL:
                merged[-1][1] += w
            else:
                merged.append([x, w])
        m = cls(tuple((x, w) for x, w in merged), segs)
        violations = validate(m)
        if violations:
            raise InvalidMeasureError(violations)
        return m

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[float, float]]) -> "Measure":
        return cls.make(atoms=atoms)

    @classmethod
    def point_mass(cls, x: float) -> "Measure":
        return cls.make(atoms=[(x, 1.0)])

    @classmethod
    def from_samples(cls, xs: Sequence[float]) -> "Measure":
        """Equal-weight empirical measure; duplicate values are merged."""
        if len(xs) == 0:
            raise EmptySampleError("empty sample")
        vals, counts = np.unique(np.asarray(xs, dtype=float), return_counts=True)
        n = float(len(xs))
        return cls.make(atoms=[(float(v), float(c) / n) for v, c in zip(vals, counts)])

    @classmethod
    def mix(cls, measures: Sequence["Measure"], weights: Sequence[float]) -> "Measure":
        """Exact convex combination: atom and segment lists concatenated."""
        if len(measures) != len(weights):
            raise MeasureError("mix: length mismatch")
        atoms: list[tuple[float, float]] = []
        segments: list[Segment] = []
        for m, w in zip(measures, weights):
            if w < 0:
                raise MeasureError("mix: negative weight")
            if w == 0.0:
                continue
            atoms.extend((x, w * aw) for x, aw in m.atoms)
            segments.extend(
                Segment(s.lower, s.upper, tuple(w * c for c in s.coeffs)) for s in m.segments
            )
        # overlapping segments from different components are summed where
        # boundaries coincide; distinct overlaps are split on the knot grid
        segments = _merge_segments(segments)
        return cls.make(atoms=atoms, segments=segments)

    # -- elementary functionals ---------------------------------------

    @cached_property
    def total_mass(self) -> float:
        return sum(w for _, w in self.atoms) + sum(s.mass() for s in self.segments)

    @cached_property
    def _atom_locs(self) -> np.ndarray:
        return np.array([x for x, _ in self.atoms], dtype=float)

    @cached_property
    def _atom_wts(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=float)

    @cached_property
    def _atom_suffix_mass(self) -> np.ndarray:
        # suffix[i] = total atom weight at locations >= atom i
        w = self._atom_wts
        return np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])

    @cached_property
    def _atom_suffix_moment(self) -> np.ndarray:
        mw = self._atom_locs * self._atom_wts
        return np.concatenate([np.cumsum(mw[::-1])[::-1], [0.0]])

    def mean(self) -> float:
        acc = float(np.dot(self._atom_locs, self._atom_wts)) if self.atoms else 0.0
        for s in self.segments:
            acc += s.first_moment()
        return acc

    def atom_weight_at(self, x: float) -> float:
        i = np.searchsorted(self._atom_locs, x)
        if i < len(self.atoms) and self._atom_locs[i] == x:
            return float(self._atom_wts[i])
        return 0.0

    def survival_from(self, x: float) -> float:
        """mu([x, +inf)), closed at x."""
        return float(self.survival_from_many(np.array([x]))[0])

    def survival_above(self, x: float) -> float:
        """mu((x, +inf)), open at x."""
        return self.survival_from(x) - self.atom_weight_at(x)

    def partial_first_moment_from(self, x: float) -> float:
        """integral of y over [x, +inf)."""
        return float(self.partial_first_moment_from_many(np.array([x]))[0])

    def integrated_survival(self, x: float) -> float:
        """C(x) = integral of (y - x) over [x, +inf)."""
        return float(self.integrated_survival_many(np.array([x]))[0])

    def put_value(self, x: float) -> float:
        """integral of (x - y)^+ over the real line (direct evaluation)."""
        acc = sum(w * (x - loc) for loc, w in self.atoms if loc < x)
        for s in self.segments:
            hi = min(s.upper, x)
            if hi > s.lower:
                acc += x * s.mass_below(hi) - s.first_moment_below(hi)
        return acc

    # vectorized versions; used by the ordering grids and the MC engine

    def survival_from_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        idx = np.searchsorted(self._atom_locs, xs, side="left")
        out = self._atom_suffix_mass[idx] if self.atoms else np.zeros(xs.shape)
        for s in self.segments:
            lo = np.clip(xs, s.lower, s.upper)
            out = out + np.array([_poly_mass(s.coeffs, float(v), s.upper) for v in lo])
        return out

    def survival_above_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        out = self.survival_from_many(xs)
        if self.atoms:
            idx = np.searchsorted(self._atom_locs, xs, side="left")
            inb = idx < len(self._atom_locs)
            hit = inb.copy()
            hit[inb] = self._atom_locs[idx[inb]] == xs[inb]
            out[hit] -= self._atom_wts[idx[hit]]
        return out

    def partial_first_moment_from_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        idx = np.searchsorted(self._atom_locs, xs, side="left")
        out = self._atom_suffix_moment[idx] if self.atoms else np.zeros(xs.shape)
        for s in self.segments:
            lo = np.clip(xs, s.lower, s.upper)
            out = out + np.array([_poly_first_moment(s.coeffs, float(v), s.upper) for v in lo])
        return out

    def integrated_survival_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        return self.partial_first_moment_from_many(xs) - xs * self.survival_from_many(xs)

    # -- support ------------------------------------------------------

    def support_sup(self) -> float:
        """r = inf{z : mu([z, +inf)) = 0}."""
        cands = [x for x, _ in self.atoms] + [s.upper for s in self.segments]
        if not cands:
            raise MeasureError("empty measure has no support")
        return max(cands)

    def support_inf(self) -> float:
        cands = [x for x, _ in self.atoms] + [s.lower for s in self.segments]
        if not cands:
            raise MeasureError("empty measure has no support")
        return min(cands)

    def knots(self) -> list[float]:
        """Structural points: atom locations and segment endpoints."""
        pts = {x for x, _ in self.atoms}
        for s in self.segments:
            pts.add(s.lower)
            pts.add(s.upper)
        return sorted(pts)

    # -- transforms ---------------------------------------------------

    def reflect(self) -> "Measure":
        """Pushforward under y -> -y."""
        atoms = [(-x, w) for x, w in self.atoms]
        segments = [
            Segment(-s.upper, -s.lower, tuple(((-1.0) ** j) * c for j, c in enumerate(s.coeffs)))
            for s in self.segments
        ]
        return Measure.make(atoms=atoms, segments=segments)

    def translate(self, c: float) -> "Measure":
        """Pushforward under y -> y + c; polynomial coefficients re-expanded."""
        atoms = [(x + c, w) for x, w in self.atoms]
        segments = []
        for s in self.segments:
            p = np.polynomial.Polynomial(list(s.coeffs))
            q = p(np.polynomial.Polynomial([-c, 1.0]))
            segments.append(Segment(s.lower + c, s.upper + c, tuple(float(v) for v in q.coef)))
        return Measure.make(atoms=atoms, segments=segments)

    def scale(self, c: float) -> "Measure":
        """Pushforward under y -> c*y for c > 0."""
        if c <= 0:
            raise MeasureError("scale factor must be positive")
        atoms = [(c * x, w) for x, w in self.atoms]
        segments = [
            Segment(c * s.lower, c * s.upper, tuple(co / c ** (j + 1) for j, co in enumerate(s.coeffs)))
            for s in self.segments
        ]
        return Measure.make(atoms=atoms, segments=segments)

    def to_atoms_on_grid(self, grid: np.ndarray) -> "Measure":
        """Atomic approximation: cell mass between consecutive grid points is
        placed on the left cell edge; mass outside the grid is clamped in."""
        grid = np.asarray(grid, dtype=float)
        surv = self.survival_from_many(grid)
        weights = np.empty(len(grid))
        weights[:-1] = surv[:-1] - surv[1:]
        weights[-1] = surv[-1]
        weights[0] += 1.0 - surv[0]
        keep = weights > 0
        return Measure.make(atoms=list(zip(grid[keep], weights[keep])))

    # -- serialization ------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "atoms": [{"x": repr(x), "w": repr(w)} for x, w in self.atoms],
            "segments": [
                {"a": repr(s.lower), "b": repr(s.upper), "coeffs": [repr(c) for c in s.coeffs]}
                for s in self.segments
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Measure":
        atoms = [(float(a["x"]), float(a["w"])) for a in d.get("atoms", [])]
        segments = [
            Segment(float(s["a"]), float(s["b"]), tuple(float(c) for c in s["coeffs"]))
            for s in d.get("segments", [])
        ]
        return cls.make(atoms=atoms, segments=segments)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Measure":
        return cls.from_dict(json.loads(text))


def _merge_segments(segments: list[Segment]) -> list[Segment]:
    """Split overlapping segments on the union knot grid and add densities."""
    if not segments:
        return []
    knots = sorted({s.lower for s in segments} | {s.upper for s in segments})
    out = []
    for lo, hi in zip(knots[:-1], knots[1:]):
        coeffs = np.zeros(MAX_POLY_DEGREE + 1)
        live = False
        for s in segments:
            if s.lower <= lo and hi <= s.upper:
                live = True
                for j, c in enumerate(s.coeffs):
                    coeffs[j] += c
        if live and np.any(coeffs != 0.0):
            deg = int(np.max(np.nonzero(coeffs)))
            out.append(Segment(lo, hi, tuple(coeffs[: deg + 1])))
    return out


def validate(m: Measure) -> list[str]:
    """Return the list of invariant violations (empty when valid)."""
    violations: list[str] = []
    if abs(m.total_mass - 1.0) > MASS_TOL:
        violations.append(f"MassNotOne: total mass {m.total_mass!r}")
    locs = [x for x, _ in m.atoms]
    if locs != sorted(locs):
        violations.append("UnsortedAtoms: atom locations not sorted")
    if len(set(locs)) != len(locs):
        violations.append("UnsortedAtoms: duplicate atom locations")
    if any(w <= 0 or w > 1 + MASS_TOL for _, w in m.atoms):
        violations.append("UnsortedAtoms: atom weight outside (0, 1]")
    prev_upper = -math.inf
    for s in m.segments:
        if s.upper <= s.lower:
            violations.append(f"OverlappingSegments: empty segment [{s.lower}, {s.upper})")
        if s.lower < prev_upper - 1e-15:
            violations.append(f"OverlappingSegments: segment starting at {s.lower} overlaps previous")
        prev_upper = s.upper
        if len(s.coeffs) > MAX_POLY_DEGREE + 1:
            violations.append(f"NegativeDensity: polynomial degree above {MAX_POLY_DEGREE}")
        ys = np.linspace(s.lower, s.upper, DENSITY_SAMPLES + 2)
        if any(_poly_eval(s.coeffs, y) < -1e-12 for y in ys):
            violations.append(f"NegativeDensity: density negative on [{s.lower}, {s.upper})")
        if not all(math.isfinite(x) for x in (s.lower, s.upper)):
            violations.append("OverlappingSegments: unbounded segment not allowed")
    return violations


@dataclass(frozen=True)
class MeasureFamily:
    """Time-indexed family (t, measure), strictly increasing in t."""

    entries: tuple[tuple[float, Measure], ...]

    @classmethod
    def make(cls, entries: Iterable[tuple[float, Measure]]) -> "MeasureFamily":
        ent = tuple((float(t), m) for t, m in entries)
        if len(ent) < 2:
            raise MeasureError("family needs at least 2 entries")
        ts = [t for t, _ in ent]
        if any(b <= a for a, b in zip(ts[:-1], ts[1:])):
            raise MeasureError("family times must be strictly increasing")
        for _, m in ent:
            violations = validate(m)
            if violations:
                raise InvalidMeasureError(violations)
        return cls(ent)

    @property
    def times(self) -> list[float]:
        return [t for t, _ in self.entries]

    @property
    def measures(self) -> list[Measure]:
        return [m for _, m in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def to_dict(self) -> dict:
        return {"family": [{"t": t, "measure": m.to_dict()} for t, m in self.entries]}

    @classmethod
    def from_dict(cls, d: dict) -> "MeasureFamily":
        return cls.make([(e["t"], Measure.from_dict(e["measure"])) for e in d["family"]])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "MeasureFamily":
        return cls.from_dict(json.loads(text))

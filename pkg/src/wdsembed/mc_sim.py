"""Discretized Brownian engine for the barrier stopping rule.

Each path draws its increments from its own Philox4x32-10 substream: the
128-bit counter holds (draw index, path index) and the 64-bit key holds the
user seed, so results do not depend on execution order or thread schedule.
Normals come from a 256-layer ziggurat fused into the path kernel.

The stopping rule for family time t halts the path the first time the
running maximum S reaches psi_t(B); the same path is then continued for the
next family time.  Barrier crossing is evaluated at grid points only (no
bridge correction); the induced bias is absorbed by the 2*sqrt(dt)
allowance in the statistical checks.

psi is evaluated through per-time lookup tables: exact step tables for
atomic measures, dense monotone tabulations (ceil-node convention) for
measures with density segments.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit, uint32, uint64

from .measures import Measure, MeasureFamily, MeasureError
from .orderings import (
    NonNegativeMeanError,
    Relation,
    compare_family,
    psi_wds_many,
)

DENSITY_TABLE_POINTS = 4096
CENSOR_HARD_LIMIT = 0.01


class NotWdsOrderedError(MeasureError):
    pass


class HorizonTooSmallError(MeasureError):
    pass


class BinTooSmallError(MeasureError):
    pass


# -- counter-based normal generator -----------------------------------

_PHILOX_M0 = uint64(0xD2511F53)
_PHILOX_M1 = uint64(0xCD9E8D57)
_PHILOX_W0 = uint32(0x9E3779B9)
_PHILOX_W1 = uint32(0xBB67AE85)

_ZIG_R = 3.6541528853610088  # rightmost layer edge of the 256-layer ziggurat
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


def _build_ziggurat() -> tuple[np.ndarray, np.ndarray]:
    """Layer edges w[0..256] and densities ff[i] = exp(-w[i]^2/2).

    w[0] is the virtual width of the base strip (base rectangle plus tail),
    w[1] = R, and w[256] = 0; every layer has equal area v.
    """
    f = lambda x: math.exp(-0.5 * x * x)
    tail = math.sqrt(math.pi / 2.0) * math.erfc(_ZIG_R / math.sqrt(2.0))
    v = _ZIG_R * f(_ZIG_R) + tail
    w = np.empty(257)
    ff = np.empty(257)
    w[1] = _ZIG_R
    w[0] = v / f(_ZIG_R)
    fi = f(_ZIG_R)
    for i in range(2, 257):
        fi = fi + v / w[i - 1]
        if fi >= 1.0:
            w[i] = 0.0
        else:
            w[i] = math.sqrt(-2.0 * math.log(fi))
    assert abs(fi - 1.0) < 1e-8, "ziggurat table failed to close"
    w[256] = 0.0
    for i in range(257):
        ff[i] = f(w[i])
    ff[0] = ff[1]  # layer 0 wedge never consults ff[0]; keep it sane
    ff[256] = 1.0
    return w, ff


_ZIG_W, _ZIG_F = _build_ziggurat()


@njit(cache=True, nogil=True, inline="always")
def _philox4x32(c0, c1, c2, c3, k0, k1):
    """Ten rounds of Philox4x32; returns four 32-bit words."""
    for _ in range(10):
        p0 = _PHILOX_M0 * uint64(c0)
        p1 = _PHILOX_M1 * uint64(c2)
        h0 = uint32(p0 >> uint64(32))
        l0 = uint32(p0 & uint64(0xFFFFFFFF))
        h1 = uint32(p1 >> uint64(32))
        l1 = uint32(p1 & uint64(0xFFFFFFFF))
        n0 = uint32(h1 ^ uint32(c1) ^ uint32(k0))
        n1 = l1
        n2 = uint32(h0 ^ uint32(c3) ^ uint32(k1))
        n3 = l0
        c0, c1, c2, c3 = n0, n1, n2, n3
        k0 = uint32(uint32(k0) + _PHILOX_W0)
        k1 = uint32(uint32(k1) + _PHILOX_W1)
    return c0, c1, c2, c3


@njit(cache=True, nogil=True, inline="always")
def _philox_words64(ctr, p_lo, p_hi, k0, k1):
    """Two 64-bit words from counter (ctr, path index) under key (seed)."""
    r0, r1, r2, r3 = _philox4x32(
        uint32(ctr & uint64(0xFFFFFFFF)),
        uint32(ctr >> uint64(32)),
        uint32(p_lo),
        uint32(p_hi),
        uint32(k0),
        uint32(k1),
    )
    lo = (uint64(r0) << uint64(32)) | uint64(r1)
    hi = (uint64(r2) << uint64(32)) | uint64(r3)
    return lo, hi


@njit(cache=True, nogil=True, inline="always")
def _zig_resolve(word, ctr, p_lo, p_hi, k0, k1, w, ff):
    """Turn one 64-bit word into a ziggurat attempt.

    Returns (accepted, value, new_ctr); extra uniforms for the wedge and
    tail branches consume fresh counter values.
    """
    i = int(word & uint64(0xFF))
    sign = -1.0 if (word >> uint64(8)) & uint64(1) else 1.0
    u = float(word >> uint64(11)) * _INV53
    x = u * w[i]
    if x < w[i + 1]:
        return True, sign * x, ctr
    if i == 0:
        # tail beyond R: exponential rejection
        while True:
            lo, hi = _philox_words64(ctr, p_lo, p_hi, k0, k1)
            ctr += uint64(1)
            u1 = (float(lo >> uint64(11)) + 0.5) * _INV53
            u2 = (float(hi >> uint64(11)) + 0.5) * _INV53
            xt = -math.log(u1) / _ZIG_R
            yt = -math.log(u2)
            if yt + yt >= xt * xt:
                return True, sign * (_ZIG_R + xt), ctr
    lo, hi = _philox_words64(ctr, p_lo, p_hi, k0, k1)
    ctr += uint64(1)
    u2 = float(lo >> uint64(11)) * _INV53
    if ff[i + 1] + u2 * (ff[i] - ff[i + 1]) < math.exp(-0.5 * x * x):
        return True, sign * x, ctr
    return False, 0.0, ctr


@njit(cache=True, nogil=True)
def _fill_normals(out, seed_lo, seed_hi, p_lo, p_hi, w, ff):
    """Reference filler exposing the per-path stream (used by tests)."""
    ctr = uint64(0)
    spare = uint64(0)
    have = False
    for j in range(out.shape[0]):
        while True:
            if have:
                word = spare
                have = False
            else:
                word, spare = _philox_words64(ctr, p_lo, p_hi, seed_lo, seed_hi)
                ctr += uint64(1)
                have = True
            ok, val, ctr = _zig_resolve(word, ctr, p_lo, p_hi, seed_lo, seed_hi, w, ff)
            if ok:
                out[j] = val
                break
    return out


def path_normals(seed: int, path_index: int, n: int) -> np.ndarray:
    """The first n standard normal increments of a path's substream."""
    out = np.empty(n)
    s = seed & 0xFFFFFFFFFFFFFFFF
    p = path_index & 0xFFFFFFFFFFFFFFFF
    _fill_normals(out, uint32(s & 0xFFFFFFFF), uint32(s >> 32),
                  uint32(p & 0xFFFFFFFF), uint32(p >> 32), _ZIG_W, _ZIG_F)
    return out


# -- configuration and results ----------------------------------------


@dataclass(frozen=True)
class PathConfig:
    dt: float
    horizon: float
    n_paths: int
    seed: int
    threads: Optional[int] = None

    def resolved_threads(self) -> int:
        if self.threads is not None and self.threads > 0:
            return self.threads
        env = os.environ.get("WDS_EMBED_THREADS", "0")
        try:
            v = int(env)
        except ValueError:
            v = 0
        if v > 0:
            return v
        return min(8, os.cpu_count() or 1)


@dataclass
class EmbeddingResult:
    times: list[float]
    T: np.ndarray  # (n_times, n_paths)
    BT: np.ndarray
    ST: np.ndarray
    censored: np.ndarray  # bool (n_times, n_paths)
    config: PathConfig

    @property
    def path_censored(self) -> np.ndarray:
        return self.censored.any(axis=0)

    def censor_fraction(self) -> float:
        return float(self.path_censored.mean())

    def empirical_measure(self, time_index: int) -> Measure:
        keep = ~self.censored[time_index]
        return Measure.from_samples(self.BT[time_index, keep])


# -- the path kernel --------------------------------------------------


@njit(cache=True, nogil=True)
def _simulate_path(seed_lo, seed_hi, p_lo, p_hi, nodes, vals, lens,
                   dt, sqrt_dt, max_steps, w, ff, out_T, out_B, out_S, out_C):
    """Run one path through every family time; returns 1 (done) or 2 (censored)."""
    B = 0.0
    S = 0.0
    n = 0
    ctr = uint64(0)
    spare = uint64(0)
    have = False
    n_times = nodes.shape[0]
    # every family time's rule is the first-entry time of its own stop set
    # from v = 0, evaluated on the shared path; times are tracked jointly so
    # a non-WDS family can legitimately stop a later time first
    done = np.zeros(n_times, np.uint8)
    n_done = 0
    # stop condition S >= psi(B) rewritten as B <= nodes[jmax] where jmax is
    # the last table level at or below the running maximum; jmax only moves
    # when S crosses a table value, so the hot loop needs one comparison per
    # step and time instead of a table lookup
    jmax = np.empty(n_times, np.int64)
    for ti in range(n_times):
        jm = -1
        while jm + 1 < lens[ti] and vals[ti, jm + 1] <= S:
            jm += 1
        jmax[ti] = jm
    while True:
        for ti in range(n_times):
            if done[ti] == 0 and jmax[ti] >= 0 and B <= nodes[ti, jmax[ti]]:
                out_T[ti] = n * dt
                out_B[ti] = B
                out_S[ti] = S
                out_C[ti] = 0
                done[ti] = 1
                n_done += 1
        if n_done == n_times:
            return 1
        if n >= max_steps:
            for ti in range(n_times):
                if done[ti] == 0:
                    out_T[ti] = n * dt
                    out_B[ti] = B
                    out_S[ti] = S
                    out_C[ti] = 1
            return 2
        # next increment
        while True:
            if have:
                word = spare
                have = False
            else:
                word, spare = _philox_words64(ctr, p_lo, p_hi, seed_lo, seed_hi)
                ctr += uint64(1)
                have = True
            ok, z, ctr = _zig_resolve(word, ctr, p_lo, p_hi, seed_lo, seed_hi, w, ff)
            if ok:
                break
        B += z * sqrt_dt
        n += 1
        if B > S:
            S = B
            for ti in range(n_times):
                if done[ti] == 0:
                    while jmax[ti] + 1 < lens[ti] and vals[ti, jmax[ti] + 1] <= S:
                        jmax[ti] += 1


# -- psi lookup tables ------------------------------------------------


def _psi_table(m: Measure) -> tuple[np.ndarray, np.ndarray]:
    """(nodes, vals) with psi(x) = vals[searchsorted(nodes, x)].

    Exact for purely atomic measures; for densities psi is tabulated on a
    dense grid with the value at the smallest node >= x (conservative:
    never stops earlier than the true rule).
    """
    if not m.segments:
        locs = m._atom_locs
        wts = m._atom_wts
        mean = m.mean()
        suffix_w = np.concatenate([np.cumsum(wts[::-1])[::-1], [0.0]])
        suffix_m = np.concatenate([np.cumsum((locs * wts)[::-1])[::-1], [0.0]])
        vals = np.empty(len(locs) + 1)
        vals[: len(locs)] = (suffix_m[: len(locs)] - mean) / suffix_w[: len(locs)]
        vals[len(locs)] = math.inf
        return locs.copy(), vals
    lo, hi = m.support_inf(), m.support_sup()
    nodes = np.unique(np.concatenate([np.asarray(m.knots()), np.linspace(lo, hi, DENSITY_TABLE_POINTS)]))
    vals = np.empty(len(nodes) + 1)
    vals[: len(nodes)] = psi_wds_many(m, nodes)
    vals[len(nodes)] = math.inf
    vals = np.maximum.accumulate(vals)
    return nodes, vals


def _stack_tables(tables: list[tuple[np.ndarray, np.ndarray]]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    kmax = max(len(n) for n, _ in tables)
    nodes = np.full((len(tables), kmax), math.inf)
    vals = np.full((len(tables), kmax + 1), math.inf)
    lens = np.empty(len(tables), dtype=np.int64)
    for i, (n, v) in enumerate(tables):
        nodes[i, : len(n)] = n
        vals[i, : len(v)] = v
        lens[i] = len(n)
    return nodes, vals, lens


# -- driver -----------------------------------------------------------


def embed_family(
    fam: MeasureFamily,
    cfg: PathConfig,
    allow_non_wds: bool = False,
    order_tol: float = 1e-9,
) -> EmbeddingResult:
    """Simulate the stopping rule for every family time on shared paths."""
    for t, m in fam.entries:
        if m.mean() >= 0:
            raise NonNegativeMeanError(f"family member at t={t} has non-negative mean")
    if not allow_non_wds:
        verdict = compare_family(Relation.WDS, fam, tol=order_tol)
        if not verdict.holds:
            raise NotWdsOrderedError(f"family is not WDS ordered: {verdict.to_dict()}")
    return _embed(fam.times, fam.measures, cfg)


def embed_measure(m: Measure, cfg: PathConfig) -> EmbeddingResult:
    """Embed a single target measure (family machinery with one time)."""
    if m.mean() >= 0:
        raise NonNegativeMeanError("target must have a negative mean")
    return _embed([0.0], [m], cfg)


def _embed(times: list[float], measures: list[Measure], cfg: PathConfig) -> EmbeddingResult:
    tables = [_psi_table(m) for m in measures]
    nodes, vals, lens = _stack_tables(tables)
    n_times = len(times)
    n = cfg.n_paths
    T = np.zeros((n_times, n))
    BT = np.zeros((n_times, n))
    ST = np.zeros((n_times, n))
    C = np.zeros((n_times, n), dtype=np.uint8)
    max_steps = int(round(cfg.horizon / cfg.dt))
    sqrt_dt = math.sqrt(cfg.dt)
    seed = cfg.seed & 0xFFFFFFFFFFFFFFFF
    s_lo = uint32(seed & 0xFFFFFFFF)
    s_hi = uint32(seed >> 32)

    def run_range(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            _simulate_path(
                s_lo, s_hi, uint32(i & 0xFFFFFFFF), uint32((i >> 32) & 0xFFFFFFFF),
                nodes, vals, lens, cfg.dt, sqrt_dt, max_steps, _ZIG_W, _ZIG_F,
                T[:, i], BT[:, i], ST[:, i], C[:, i],
            )

    workers = cfg.resolved_threads()
    if workers <= 1 or n < 2 * workers:
        run_range(0, n)
    else:
        bounds = np.linspace(0, n, workers + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_range, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
            for f in futures:
                f.result()

    res = EmbeddingResult(times=list(times), T=T, BT=BT, ST=ST, censored=C.astype(bool), config=cfg)
    if res.censor_fraction() > CENSOR_HARD_LIMIT:
        raise HorizonTooSmallError(
            f"{res.censor_fraction():.2%} of paths censored (> {CENSOR_HARD_LIMIT:.0%})"
        )
    return res


# -- statistical checks -----------------------------------------------


@dataclass(frozen=True)
class MonotonicityReport:
    n_paths: int
    n_checked: int
    n_violations: int

    @property
    def ok(self) -> bool:
        return self.n_violations == 0


def check_monotone_t(res: EmbeddingResult, tol: float = 0.0) -> MonotonicityReport:
    """Exact pathwise check that stopping times never decrease across family
    times (censored paths excluded)."""
    keep = ~res.path_censored
    T = res.T[:, keep]
    viol = 0
    if T.shape[0] >= 2:
        viol = int(np.count_nonzero(np.diff(T, axis=0) < -tol))
    return MonotonicityReport(n_paths=res.T.shape[1], n_checked=int(keep.sum()), n_violations=viol)


@dataclass(frozen=True)
class BinReport:
    lo: float
    hi: float
    n: int
    mean_diff: float
    stderr: float
    ok: bool


@dataclass(frozen=True)
class SupermartingaleReport:
    s: float
    t: float
    bins: tuple[BinReport, ...]

    @property
    def ok(self) -> bool:
        return all(b.ok for b in self.bins)


def check_supermartingale(
    res: EmbeddingResult,
    s: float,
    t: float,
    n_bins: int = 10,
    tol: float = 0.01,
    min_bin: int = 100,
) -> SupermartingaleReport:
    """Bin paths by the stopped value at time s and require each bin's mean
    increment to time t to be <= tol + 3 * (bin standard error)."""
    si = res.times.index(s)
    ti = res.times.index(t)
    keep = ~(res.censored[si] | res.censored[ti])
    bs = res.BT[si, keep]
    bt = res.BT[ti, keep]
    edges = np.quantile(bs, np.linspace(0, 1, n_bins + 1))
    edges[0] -= 1e-12
    edges[-1] += 1e-12
    bins = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mask = (bs > lo) & (bs <= hi)
        nb = int(mask.sum())
        if nb == 0:
            continue
        if nb < min_bin:
            raise BinTooSmallError(f"bin ({lo}, {hi}] holds {nb} < {min_bin} paths")
        d = bt[mask] - bs[mask]
        mean = float(d.mean())
        se = float(d.std(ddof=1) / math.sqrt(nb)) if nb > 1 else 0.0
        bins.append(BinReport(lo=float(lo), hi=float(hi), n=nb, mean_diff=mean,
                              stderr=se, ok=mean <= tol + 3.0 * se))
    return SupermartingaleReport(s=s, t=t, bins=tuple(bins))


# -- empirical distances ----------------------------------------------


def _cdf(m: Measure, xs: np.ndarray) -> np.ndarray:
    return 1.0 - m.survival_above_many(xs)


def empirical_distance(sample: Measure, target: Measure, metric: str = "ks") -> float:
    """Kolmogorov-Smirnov sup-distance or Wasserstein-1 between CDFs."""
    if sample.segments:
        raise MeasureError("sample measure must be atomic")
    pts = set(x for x, _ in sample.atoms) | set(target.knots())
    for seg in target.segments:
        pts.update(np.linspace(seg.lower, seg.upper, 257).tolist())
    pts_arr = np.array(sorted(pts))
    if metric == "ks":
        fs = _cdf(sample, pts_arr)
        ft = _cdf(target, pts_arr)
        # left limits catch jump mismatches
        fs_minus = 1.0 - sample.survival_from_many(pts_arr)
        ft_minus = 1.0 - target.survival_from_many(pts_arr)
        return float(max(np.max(np.abs(fs - ft)), np.max(np.abs(fs_minus - ft_minus))))
    if metric == "w1":
        mids = 0.5 * (pts_arr[:-1] + pts_arr[1:])
        gaps = np.diff(pts_arr)
        fs = _cdf(sample, mids)
        ft = _cdf(target, mids)
        return float(np.sum(np.abs(fs - ft) * gaps))
    raise ValueError(f"unknown metric {metric!r}")

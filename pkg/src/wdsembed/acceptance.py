"""The twelve release checks, runnable programmatically or via the CLI.

Each criterion returns a CriterionResult with a pass flag and a human
readable detail string; `run_all` executes them in order.  The checks mix
closed-form oracles (exact piecewise psi formulas for the built-in
families), construction identities (barrier inverse vs psi), statistical
Monte Carlo assertions, and randomized property sweeps.  Every randomized
sweep uses a fixed seed so reruns are bit-identical.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .cox_hobson import barrier
from .measures import Measure, MeasureFamily
from .orderings import (
    Relation,
    compare_family,
    compare_pair,
    psi_wds,
    psi_wds_many,
    tp2_check_grid,
)
from .mc_sim import (
    PathConfig,
    check_monotone_t,
    check_supermartingale,
    embed_family,
    embed_measure,
)
from .transforms import (
    LogConcaveDensity,
    MixingKernel,
    censor,
    convex_combine_family,
    density_alpha,
    density_power_measure,
    discrete_power_measure,
    gaussian_peacock_family,
    random_translate,
    scale_mix,
    shifted_family,
    subordinate,
    translated_two_atom_measure,
    two_atom_measure,
)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    @property
    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d} ({self.name}): {self.detail} [{self.seconds:.2f}s]"


def _result(number: int, name: str, started: float, passed: bool, detail: str) -> CriterionResult:
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - started)


# -- 1: closed-form psi, discrete power family ------------------------


def _discrete_power_psi_expected(k: int, t: float, xs: np.ndarray) -> np.ndarray:
    tk = t**k
    mid = 1.0 - tk + t / (1.0 - t)
    return np.where(xs <= -tk, 0.0, np.where(xs < 1.0 - tk, mid, math.inf))


def criterion_1() -> CriterionResult:
    started = time.perf_counter()
    worst = 0.0
    ok = True
    notes = []
    for k in (1, 2):
        for t in np.arange(0.1, 0.95, 0.1):
            t = round(float(t), 10)
            m = discrete_power_measure(k, t)
            tk = t**k
            xs = np.linspace(-tk - 1.0, 1.0 - tk + 1.0, 200)
            got = psi_wds_many(m, xs)
            want = _discrete_power_psi_expected(k, t, xs)
            finite = np.isfinite(want)
            if not np.array_equal(finite, np.isfinite(got)):
                ok = False
                notes.append(f"k={k} t={t}: infinite-branch mismatch")
                continue
            err = float(np.max(np.abs(got[finite] - want[finite]))) if finite.any() else 0.0
            worst = max(worst, err)
        fam = MeasureFamily.make(
            [(round(float(t), 10), discrete_power_measure(k, round(float(t), 10)))
             for t in np.arange(0.1, 0.95, 0.1)]
        )
        wds = compare_family(Relation.WDS, fam)
        if not wds.holds or wds.inconclusive:
            ok = False
            notes.append(f"k={k}: wds verdict {wds.to_dict()}")
        st = compare_family(Relation.ST_DECREASING, fam)
        if st.holds or st.witness is None or st.witness.x != 0.0:
            ok = False
            notes.append(f"k={k}: st-decreasing verdict {st.to_dict()}")
    if worst > 1e-12:
        ok = False
        notes.append(f"psi error {worst:.2e} > 1e-12")
    elapsed = time.perf_counter() - started
    if elapsed >= 1.0:
        ok = False
        notes.append(f"runtime {elapsed:.2f}s >= 1s")
    detail = "; ".join(notes) if notes else f"max |psi err| {worst:.2e}, wds holds, st-decreasing witness x=0"
    return _result(1, "discrete power family closed form", started, ok, detail)


# -- 2: closed-form psi, density power family -------------------------


def _density_power_psi_expected(k: int, t: float, x: float) -> float:
    """Closed-form psi branches assembled from the displayed partial
    integrals (survival and partial first moment) of the density power
    family; the mean is (k+1)/(2(k+2)) * (1 - (2t)^{k+2}(2t+1)/2)."""
    v = t
    mean = (k + 1) / (2.0 * (k + 2)) * (1.0 - 0.5 * (2.0 * v) ** (k + 2) * (2.0 * v + 1.0))
    if x >= 0.0:
        num = (k + 1) / (k + 2) * v ** (k + 1) * (2 ** (k + 1) * (2 * v + 1) - x ** (k + 2))
        return num / (1.0 - (v * x) ** (k + 1))
    c = (k + 2) * (2.0 - v) ** 2 / (2.0 * (k + 1) * (2.0 * v) ** (k + 2) * (2.0 * v + 1.0))
    surv = -c * x + v / 2.0
    pmom = -0.5 * c * x * x + (k + 1) / (2.0 * (k + 2))
    return (pmom - mean) / surv


def criterion_2() -> CriterionResult:
    started = time.perf_counter()
    worst = 0.0
    ok = True
    notes = []
    for k in (0, 1, 2):
        ms = {}
        for t in (0.6, 1.0, 1.5):
            m = density_power_measure(k, t)
            ms[t] = m
            a = density_alpha(k, t)
            xs = np.concatenate(
                [np.linspace(-0.999 * a, -1e-6, 100), np.linspace(0.0, 0.99 / t, 100)]
            )
            got = psi_wds_many(m, xs)
            want = np.array([_density_power_psi_expected(k, t, float(x)) for x in xs])
            err = float(np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want))))
            worst = max(worst, err)
        fam = MeasureFamily.make([(t, ms[t]) for t in (0.6, 1.0, 1.5)])
        wds = compare_family(Relation.WDS, fam)
        if not wds.holds or wds.inconclusive:
            ok = False
            notes.append(f"k={k}: wds verdict {wds.to_dict()}")
        st = compare_family(Relation.ST_DECREASING, fam)
        if st.holds:
            ok = False
            notes.append(f"k={k}: st-decreasing unexpectedly holds")
        # survival at 0 is v/2, increasing in v
        surv0 = [ms[t].survival_from(0.0) for t in (0.6, 1.0, 1.5)]
        if not all(abs(s - t / 2) < 1e-12 for s, t in zip(surv0, (0.6, 1.0, 1.5))):
            ok = False
            notes.append(f"k={k}: survival at 0 is {surv0}, expected v/2")
    if worst > 1e-10:
        ok = False
        notes.append(f"psi relative error {worst:.2e} > 1e-10")
    elapsed = time.perf_counter() - started
    if elapsed >= 2.0:
        ok = False
        notes.append(f"runtime {elapsed:.2f}s >= 2s")
    detail = "; ".join(notes) if notes else f"max rel psi err {worst:.2e}, wds holds, st-decreasing fails"
    return _result(2, "density power family closed form", started, ok, detail)


# -- 3: barrier inverse identity --------------------------------------


def barrier_corpus() -> list[Measure]:
    rng = np.random.default_rng(20240803)
    corpus: list[Measure] = []
    for k in (1, 2):
        for t in (0.2, 0.5, 0.8):
            corpus.append(discrete_power_measure(k, t))
    for t in (0.25, 0.5, 0.75):
        corpus.append(two_atom_measure(t))
        corpus.append(translated_two_atom_measure(t))
    corpus.append(Measure.point_mass(-1.0))
    corpus.append(Measure.point_mass(-0.5))
    for k in (0, 1):
        for t in (0.6, 1.0):
            corpus.append(density_power_measure(k, t))
    corpus.append(censor(density_power_measure(0, 1.0), -0.5, 0.5))
    corpus.append(censor(density_power_measure(1, 0.8), -0.25, 0.25))
    corpus.append(Measure.mix([discrete_power_measure(1, 0.3), density_power_measure(0, 0.8)], [0.5, 0.5]))
    corpus.append(Measure.mix([two_atom_measure(0.5), density_power_measure(1, 0.6)], [0.3, 0.7]))
    for _ in range(3):
        locs = np.sort(rng.normal(0.0, 1.0, 4))
        wts = rng.dirichlet(np.ones(4))
        m = Measure.make(atoms=list(zip(locs, wts)))
        corpus.append(m.translate(-0.3 - m.mean()))
    assert len(corpus) == 25
    return corpus


def _barrier_probe_grid(m: Measure, b) -> np.ndarray:
    r = m.support_sup()
    lo = m.support_inf()
    pts = set(x for x, _ in m.atoms)
    pts.update(v for v in b.bvals if math.isfinite(v))
    if not m.segments:
        locs = sorted(x for x, _ in m.atoms)
        pts.update(0.5 * (a + c) for a, c in zip(locs[:-1], locs[1:]))
    pts.update((lo - 1.0, lo - 10.0, lo - 100.0))
    cut = r - 1e-9 * max(1.0, abs(r))
    return np.array(sorted(p for p in pts if p < cut))


def criterion_3() -> CriterionResult:
    started = time.perf_counter()
    worst = 0.0
    ok = True
    notes = []
    for i, m in enumerate(barrier_corpus()):
        b = barrier(m)
        xs = _barrier_probe_grid(m, b)
        inv = np.array([b.inverse(float(x)) for x in xs])
        psi = psi_wds_many(m, xs)
        finite = np.isfinite(psi) & np.isfinite(inv)
        if not np.array_equal(np.isfinite(psi), np.isfinite(inv)):
            ok = False
            notes.append(f"measure {i}: infinite-branch mismatch")
            continue
        if finite.any():
            worst = max(worst, float(np.max(np.abs(inv[finite] - psi[finite]))))
    if worst > 1e-8:
        ok = False
        notes.append(f"sup |b_inverse - psi| = {worst:.2e} > 1e-8")
    elapsed = time.perf_counter() - started
    if elapsed >= 5.0:
        ok = False
        notes.append(f"runtime {elapsed:.2f}s >= 5s")
    detail = "; ".join(notes) if notes else f"25 measures, sup |b_inverse - psi| = {worst:.2e}"
    return _result(3, "barrier inverse identity", started, ok, detail)


# -- 4: embedding law for the two-atom benchmark ----------------------


def criterion_4(n_paths: int = 100_000, dt: float = 1e-4, horizon: float = 8000.0,
                seed: int = 11) -> CriterionResult:
    started = time.perf_counter()
    target = Measure.make(atoms=[(-2.0, 0.5), (1.0, 0.5)])
    cfg = PathConfig(dt=dt, horizon=horizon, n_paths=n_paths, seed=seed)
    res = embed_measure(target, cfg)
    keep = ~res.censored[0]
    bt = res.BT[0, keep]
    freq = float(np.mean(bt > -0.5))
    mean_bt = float(np.mean(bt))
    freq_tol = 4.0 * math.sqrt(0.25 / n_paths)
    mean_tol = 0.02 + 2.0 * math.sqrt(dt)
    ok = abs(freq - 0.5) <= freq_tol and abs(mean_bt + 0.5) <= mean_tol
    detail = (
        f"upper-atom freq {freq:.4f} (|diff| {abs(freq - 0.5):.4f} vs {freq_tol:.4f}), "
        f"mean B_T {mean_bt:.4f} (|diff| {abs(mean_bt + 0.5):.4f} vs {mean_tol:.4f}), "
        f"censored {res.censor_fraction():.3%}"
    )
    return _result(4, "two-atom embedding law", started, ok, detail)


# -- 5 & 6: monotone stopping times and supermartingale bins ----------


def _shared_run(n_paths: int = 10_000, dt: float = 1e-3, horizon: float = 10_000.0,
                seed: int = 5) -> object:
    fam = MeasureFamily.make([(t, discrete_power_measure(1, t)) for t in (0.2, 0.5, 0.8)])
    cfg = PathConfig(dt=dt, horizon=horizon, n_paths=n_paths, seed=seed)
    return embed_family(fam, cfg)


_shared_run_cache: dict = {}


def _get_shared_run():
    if "res" not in _shared_run_cache:
        _shared_run_cache["res"] = _shared_run()
    return _shared_run_cache["res"]


def criterion_5() -> CriterionResult:
    started = time.perf_counter()
    res = _get_shared_run()
    rep = check_monotone_t(res)
    ok = rep.ok and rep.n_checked > 0
    detail = f"{rep.n_violations} monotonicity violations over {rep.n_checked} uncensored paths"
    return _result(5, "stopping-time monotonicity", started, ok, detail)


def criterion_6() -> CriterionResult:
    started = time.perf_counter()
    res = _get_shared_run()
    ok = True
    parts = []
    for s, t in ((0.2, 0.5), (0.5, 0.8)):
        rep = check_supermartingale(res, s, t, n_bins=10, tol=0.01)
        ok = ok and rep.ok
        worst = max((b.mean_diff - 3 * b.stderr for b in rep.bins), default=-math.inf)
        parts.append(f"({s},{t}): {len(rep.bins)} bins, worst excess {worst:+.4f} (limit 0.01)")
    return _result(6, "supermartingale bins", started, ok, "; ".join(parts))


# -- 7: wds implies dcx on randomized families ------------------------


def _random_wds_family(rng: np.random.Generator, kind: int) -> MeasureFamily:
    if kind == 0:
        n = int(rng.integers(2, 5))
        locs = np.sort(rng.normal(0.0, 1.0, n))
        wts = rng.dirichlet(np.ones(n))
        base = Measure.make(atoms=list(zip(locs, wts)))
        base = base.translate(-0.2 - base.mean())
        times = np.sort(rng.uniform(0.1, 2.0, 3))
        return shifted_family(base, 0.3 + float(rng.random()), [float(t) for t in times])
    if kind == 1:
        k = int(rng.integers(1, 3))
        times = np.sort(rng.uniform(0.1, 0.9, 3))
        return MeasureFamily.make([(float(t), discrete_power_measure(k, float(t))) for t in times])
    times = np.sort(rng.uniform(0.2, 3.0, 3))
    return MeasureFamily.make([(float(t), two_atom_measure(float(t))) for t in times])


def criterion_7(n_trials: int = 100) -> CriterionResult:
    started = time.perf_counter()
    rng = np.random.default_rng(77)
    failures = []
    for i in range(n_trials):
        fam = _random_wds_family(rng, i % 3)
        wds = compare_family(Relation.WDS, fam)
        if not wds.holds or wds.inconclusive:
            failures.append(f"trial {i}: wds did not hold cleanly: {wds.to_dict()}")
            continue
        dcx = compare_family(Relation.DCX, fam)
        if not dcx.holds:
            failures.append(f"trial {i}: dcx failed: {dcx.to_dict()}")
    ok = not failures
    detail = failures[0] if failures else f"{n_trials}/{n_trials} wds families are dcx ordered"
    return _result(7, "wds implies dcx", started, ok, detail)


# -- 8: constant-mean variance-increasing family is not wds -----------


def criterion_8() -> CriterionResult:
    started = time.perf_counter()
    fam = gaussian_peacock_family(-1.0, (0.5, 1.0))
    v1 = compare_family(Relation.WDS, fam)
    v2 = compare_family(Relation.WDS, fam)
    ok = (not v1.holds) and v1.witness is not None and v1.to_dict() == v2.to_dict()
    detail = "verdict or witness not reproducible"
    if ok:
        w = v1.witness
        lhs = psi_wds(fam.measures[0], w.x)
        rhs = psi_wds(fam.measures[1], w.x)
        ok = lhs > rhs
        detail = f"wds fails with witness x={w.x:.4f}, psi_s={lhs:.6f} > psi_t={rhs:.6f}"
    return _result(8, "constant-mean family rejected", started, ok, detail)


# -- 9: translated two-atom counterexample ----------------------------


def criterion_9() -> CriterionResult:
    started = time.perf_counter()
    times = (0.25, 0.5, 0.75)
    good = MeasureFamily.make([(t, two_atom_measure(t)) for t in times])
    bad = MeasureFamily.make([(t, translated_two_atom_measure(t)) for t in times])
    ok = True
    notes = []
    v_good = compare_family(Relation.WDS, good)
    if not v_good.holds or v_good.inconclusive:
        ok = False
        notes.append(f"base family verdict {v_good.to_dict()}")
    v_bad = compare_family(Relation.WDS, bad)
    if v_bad.holds or v_bad.witness is None:
        ok = False
        notes.append(f"translated family verdict {v_bad.to_dict()}")
    else:
        w = v_bad.witness
        t = w.t
        if not (-t - 1.0 < w.x <= -t):
            ok = False
            notes.append(f"witness x={w.x} outside (-t-1, -t] for t={t}")
        else:
            # hand formula: on (-t-1, -t] the translated psi equals (t+1)/t
            want_s = (w.s + 1.0) / w.s
            want_t = (w.t + 1.0) / w.t
            if abs(w.lhs - want_s) > 1e-9 or abs(w.rhs - want_t) > 1e-9:
                ok = False
                notes.append(f"witness values ({w.lhs}, {w.rhs}) != ({want_s}, {want_t})")
            else:
                notes.append(
                    f"witness x={w.x:.4f} in (-{t}-1, -{t}], psi values "
                    f"{w.lhs:.4f} > {w.rhs:.4f} = (t+1)/t decreasing"
                )
    detail = "; ".join(notes)
    return _result(9, "translated counterexample", started, ok, detail)


# -- 10: preservation transform sweep ---------------------------------


def _prop42_family(times: Sequence[float] = (0.3, 0.6)) -> MeasureFamily:
    return MeasureFamily.make([(float(t), discrete_power_measure(1, float(t))) for t in times])


def _lognormal_scaling(sigma: float, n: int = 101) -> LogConcaveDensity:
    grid = np.exp(np.linspace(-3.0 * sigma, 3.0 * sigma, n))
    logv = -0.5 * (np.log(grid) / sigma) ** 2 - np.log(grid)
    dens = np.exp(logv)
    mass = np.trapezoid(dens, grid)
    return LogConcaveDensity.make(tuple(grid), tuple(logv - math.log(mass)))


def _check_wds(fam: MeasureFamily) -> Optional[str]:
    v = compare_family(Relation.WDS, fam)
    if v.holds and not v.inconclusive:
        return None
    return str(v.to_dict())


def _trial_censor(rng: np.random.Generator) -> Optional[str]:
    fam = _prop42_family()
    a = float(rng.uniform(-1.0, 0.4))
    b = a + float(rng.uniform(0.05, 0.8))
    return _check_wds(MeasureFamily.make([(t, censor(m, a, b)) for t, m in fam.entries]))


def _trial_convex(rng: np.random.Generator) -> Optional[str]:
    times = [round(v, 10) for v in np.linspace(0.1, 0.9, 9)]
    fam = _prop42_family(times)
    k = int(rng.integers(2, 5))
    tau = sorted(rng.choice(times, size=k, replace=False))
    return _check_wds(convex_combine_family(fam, [float(v) for v in tau]))


def _trial_subordinate(rng: np.random.Generator) -> Optional[str]:
    fam = _prop42_family()
    p = float(rng.uniform(0.0, 1.0))
    q = float(rng.uniform(p, 1.0))
    kernel = MixingKernel.make((0.0, 1.0), tuple(fam.times), ((1.0 - p, p), (1.0 - q, q)))
    return _check_wds(subordinate(fam, kernel))


def _trial_translate(rng: np.random.Generator) -> Optional[str]:
    fam = _prop42_family()
    hw = float(rng.choice([0.25, 0.5, 1.0]))
    # cell width 0.01 divides the unit atom gap, so all convolved atoms
    # share one lattice and the discrete check is exact
    f = LogConcaveDensity.triangular(half_width=hw, n=int(round(200 * hw)) + 1)
    out = MeasureFamily.make([(t, random_translate(m, f).measure) for t, m in fam.entries])
    return _check_wds(out)


def _trial_scale(rng: np.random.Generator) -> Optional[str]:
    fam = _prop42_family()
    sigma = float(rng.uniform(0.05, 0.25))
    f = _lognormal_scaling(sigma)
    out = MeasureFamily.make([(t, scale_mix(m, f).measure) for t, m in fam.entries])
    return _check_wds(out)


def criterion_10(n_trials: int = 100) -> CriterionResult:
    started = time.perf_counter()
    trials: list[tuple[str, Callable]] = [
        ("censor", _trial_censor),
        ("convex", _trial_convex),
        ("subordinate", _trial_subordinate),
        ("translate", _trial_translate),
        ("scale", _trial_scale),
    ]
    failures = []
    for idx, (name, fn) in enumerate(trials):
        rng = np.random.default_rng(1000 + idx)
        for i in range(n_trials):
            err = fn(rng)
            if err is not None:
                failures.append(f"{name} trial {i}: {err}")
                break
    ok = not failures
    detail = failures[0] if failures else f"5 transforms x {n_trials}/{n_trials} trials preserve wds"
    return _result(10, "preservation transform sweep", started, ok, detail)


# -- 11: TP2 products and interpolation -------------------------------


def random_tp2_matrix(rng: np.random.Generator, n_rows: int, n_cols: int) -> np.ndarray:
    """exp(a_i * b_j + f_i + g_j) with a, b increasing is TP2."""
    a = np.cumsum(rng.uniform(0.05, 0.5, n_rows))
    b = np.cumsum(rng.uniform(0.05, 0.5, n_cols))
    f = rng.normal(0.0, 0.3, n_rows)
    g = rng.normal(0.0, 0.3, n_cols)
    return np.exp(np.outer(a, b) + f[:, None] + g[None, :])


def criterion_11(n_trials: int = 500) -> CriterionResult:
    started = time.perf_counter()
    rng = np.random.default_rng(311)
    failures = []
    for i in range(n_trials):
        p = int(rng.integers(3, 7))
        A = random_tp2_matrix(rng, int(rng.integers(3, 7)), p)
        B = random_tp2_matrix(rng, p, int(rng.integers(3, 7)))
        C = A @ B
        rep = tp2_check_grid(np.arange(C.shape[0]), np.arange(C.shape[1]), C)
        if not rep.ok:
            failures.append(f"product trial {i}: witness {rep.witness}")
            break
    for i in range(n_trials):
        rows = int(rng.integers(3, 7))
        cols = int(rng.integers(3, 7))
        F = random_tp2_matrix(rng, rows, cols)
        xs = np.cumsum(rng.uniform(0.2, 1.0, cols))
        # refine each gap with random interior nodes; affine interpolation
        # of a strictly positive TP2 tabulation stays TP2
        new_xs = [xs[0]]
        new_cols = [F[:, 0]]
        for j in range(cols - 1):
            for lam in np.sort(rng.uniform(0.0, 1.0, int(rng.integers(1, 4)))):
                new_xs.append(xs[j] + lam * (xs[j + 1] - xs[j]))
                new_cols.append((1.0 - lam) * F[:, j] + lam * F[:, j + 1])
            new_xs.append(xs[j + 1])
            new_cols.append(F[:, j + 1])
        G = np.column_stack(new_cols)
        rep = tp2_check_grid(np.arange(rows), np.array(new_xs), G)
        if not rep.ok:
            failures.append(f"interpolation trial {i}: witness {rep.witness}")
            break
    ok = not failures
    detail = failures[0] if failures else f"{n_trials} product + {n_trials} interpolation checks pass"
    return _result(11, "TP2 product and interpolation", started, ok, detail)


# -- 12: psi route vs TP2 route agreement -----------------------------


def _random_negative_mean_measure(rng: np.random.Generator) -> Measure:
    n = int(rng.integers(2, 6))
    locs = np.sort(rng.normal(0.0, 1.0, n))
    wts = rng.dirichlet(np.ones(n))
    m = Measure.make(atoms=list(zip(locs, wts)))
    return m.translate(-float(rng.uniform(0.1, 1.0)) - m.mean())


def criterion_12(n_pairs: int = 1000) -> CriterionResult:
    started = time.perf_counter()
    rng = np.random.default_rng(1212)
    inconclusive = 0
    holds = 0
    for i in range(n_pairs):
        mode = i % 4
        if mode == 0:
            mu = _random_negative_mean_measure(rng)
            nu = _random_negative_mean_measure(rng)
        elif mode == 1:
            s, t = np.sort(rng.uniform(0.1, 0.9, 2))
            mu = discrete_power_measure(1, float(s))
            nu = discrete_power_measure(1, float(t))
        elif mode == 2:
            s, t = np.sort(rng.uniform(0.2, 2.0, 2))
            mu = two_atom_measure(float(s))
            nu = two_atom_measure(float(t))
        else:
            mu = _random_negative_mean_measure(rng)
            nu = mu.translate(-float(rng.uniform(0.0, 0.5)))
        verdict = compare_pair(Relation.WDS, mu, nu)
        if verdict.inconclusive:
            inconclusive += 1
        if verdict.holds:
            holds += 1
    ok = inconclusive == 0
    detail = f"{n_pairs} pairs, {holds} hold, {n_pairs - holds} fail, {inconclusive} inconclusive"
    return _result(12, "psi vs TP2 route agreement", started, ok, detail)


ALL_CRITERIA: list[Callable[[], CriterionResult]] = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
    criterion_11, criterion_12,
]


def run_all(skip: Sequence[int] = ()) -> list[CriterionResult]:
    results = []
    for i, fn in enumerate(ALL_CRITERIA, start=1):
        if i in skip:
            continue
        results.append(fn())
    return results


def summary_table(results: Sequence[CriterionResult]) -> str:
    lines = [r.line for r in results]
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} criteria pass")
    return "\n".join(lines)

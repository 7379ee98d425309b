"""Command-line surface: order checks, psi tabulation, barrier export,
embedding simulation, transform application, and the example suites.

Exit-code discipline: 0 = success / property holds, 1 = property fails on a
valid run, 2 = usage or input error.  Every command writes a run manifest
(command line, input hashes, seed, version, wall time, output list) so runs
can be reproduced bit-identically; all files are written atomically.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

import click
import numpy as np

from . import __version__
from .acceptance import run_all, summary_table
from .cox_hobson import barrier, export_barrier
from .measures import Measure, MeasureFamily, MeasureError
from .mc_sim import (
    HorizonTooSmallError,
    NotWdsOrderedError,
    PathConfig,
    check_monotone_t,
    embed_family,
    empirical_distance,
)
from .orderings import Relation, compare_family, psi_wds_many, psi_mrl, k_function_many
from .transforms import (
    EXAMPLE_FAMILIES,
    LogConcaveDensity,
    MixingKernel,
    censor,
    convex_combine_family,
    example_family,
    random_translate,
    scale_mix,
    subordinate,
)

EXIT_OK = 0
EXIT_PROPERTY_FAILS = 1
EXIT_INPUT_ERROR = 2


# -- plumbing ---------------------------------------------------------


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: list[str]
    input_hashes: dict = field(default_factory=dict)
    seed: int | None = None
    version: str = __version__
    wall_time: float = 0.0
    outputs: list[str] = field(default_factory=list)

    def write(self, path: str) -> None:
        _atomic_write(path, json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n")


def _start_manifest(inputs: list[str], seed: int | None = None) -> tuple[RunManifest, float]:
    man = RunManifest(command=sys.argv[1:], seed=seed)
    for p in inputs:
        man.input_hashes[p] = _sha256(p)
    return man, time.perf_counter()


def _finish_manifest(man: RunManifest, started: float, outputs: list[str], path: str) -> None:
    man.wall_time = time.perf_counter() - started
    man.outputs = list(outputs)
    man.write(path)


def _load_measure(path: str) -> Measure:
    with open(path) as fh:
        return Measure.from_json(fh.read())


def _load_family(path: str) -> MeasureFamily:
    with open(path) as fh:
        return MeasureFamily.from_json(fh.read())


def _fail_input(msg: str) -> None:
    click.echo(f"input error: {msg}", err=True)
    sys.exit(EXIT_INPUT_ERROR)


class _InputErrors:
    """Map parse/validation errors to exit code 2."""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is None:
            return False
        if isinstance(exc, (MeasureError, json.JSONDecodeError, KeyError,
                            OSError, TypeError, ValueError)):
            _fail_input(str(exc))
        return False


def _parse_grid(spec: str) -> np.ndarray:
    lo_s, hi_s, n_s = spec.split(":")
    lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    if n < 2 or hi <= lo:
        raise ValueError(f"bad grid spec {spec!r}; expected lo:hi:n with lo < hi, n >= 2")
    return np.linspace(lo, hi, n)


# -- command group ----------------------------------------------------


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """Stochastic-order checks, barrier construction, and Brownian embedding."""


@main.group()
def order() -> None:
    """Ordering verdicts for measure families."""


_RELATION_CHOICES = sorted(
    {r.value for r in Relation} | {r.value.replace("_", "-") for r in Relation}
)


@order.command("check")
@click.option("--relation", "-r", required=True, type=click.Choice(_RELATION_CHOICES))
@click.option("--family", "-f", "family_path", required=True, type=click.Path(exists=True))
@click.option("--tol", default=1e-9, show_default=True)
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Write the verdict JSON here as well as to stdout.")
@click.option("--manifest", "manifest_path", default=None, type=click.Path())
def order_check(relation: str, family_path: str, tol: float,
                out_path: str | None, manifest_path: str | None) -> None:
    """Exit 0 iff the relation holds over the family; witness printed otherwise."""
    man, started = _start_manifest([family_path])
    with _InputErrors():
        fam = _load_family(family_path)
        verdict = compare_family(relation.replace("-", "_"), fam, tol=tol)
    payload = json.dumps(verdict.to_dict(), indent=2, sort_keys=True)
    click.echo(payload)
    outputs = []
    if out_path:
        _atomic_write(out_path, payload + "\n")
        outputs.append(out_path)
    _finish_manifest(man, started, outputs,
                     manifest_path or (out_path + ".manifest.json" if out_path
                                       else "order_check.manifest.json"))
    sys.exit(EXIT_OK if verdict.holds else EXIT_PROPERTY_FAILS)


@main.group()
def psi() -> None:
    """Tabulate the barycentre-type functionals."""


@psi.command("eval")
@click.option("--measure", "-m", "measure_path", required=True, type=click.Path(exists=True))
@click.option("--grid", "-g", "grid_spec", required=True,
              help="lo:hi:n equally spaced evaluation points.")
@click.option("--functional", default="wds", show_default=True,
              type=click.Choice(["wds", "mrl", "k"]))
@click.option("--out", "-o", "out_path", required=True, type=click.Path())
@click.option("--manifest", "manifest_path", default=None, type=click.Path())
def psi_eval(measure_path: str, grid_spec: str, functional: str,
             out_path: str, manifest_path: str | None) -> None:
    """CSV with columns x,value,is_infinite."""
    man, started = _start_manifest([measure_path])
    with _InputErrors():
        m = _load_measure(measure_path)
        xs = _parse_grid(grid_spec)
        if functional == "wds":
            vals = psi_wds_many(m, xs)
        elif functional == "mrl":
            vals = np.array([psi_mrl(m, float(x)) for x in xs])
        else:
            vals = k_function_many(m, xs)
    rows = ["x,value,is_infinite"]
    for x, v in zip(xs, vals):
        inf = not math.isfinite(v)
        rows.append(f"{x!r},{'' if inf else repr(float(v))},{int(inf)}")
    _atomic_write(out_path, "\n".join(rows) + "\n")
    _finish_manifest(man, started, [out_path], manifest_path or out_path + ".manifest.json")
    sys.exit(EXIT_OK)


@main.group(name="barrier")
def barrier_group() -> None:
    """Barrier construction for negative-mean targets."""


@barrier_group.command("export")
@click.option("--measure", "-m", "measure_path", required=True, type=click.Path(exists=True))
@click.option("--out", "-o", "out_path", required=True, type=click.Path())
@click.option("--manifest", "manifest_path", default=None, type=click.Path())
def barrier_export(measure_path: str, out_path: str, manifest_path: str | None) -> None:
    """CSV with columns alpha,b,interp (knots plus samples on linear stretches)."""
    man, started = _start_manifest([measure_path])
    with _InputErrors():
        m = _load_measure(measure_path)
        b = barrier(m)
    tmpdir = os.path.dirname(os.path.abspath(out_path))
    os.makedirs(tmpdir, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=tmpdir, prefix=".tmp-", suffix=".csv")
    os.close(fd)
    try:
        export_barrier(b, tmp)
        os.replace(tmp, out_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    _finish_manifest(man, started, [out_path], manifest_path or out_path + ".manifest.json")
    sys.exit(EXIT_OK)


@main.group()
def embed() -> None:
    """Monte Carlo embedding of a family into Brownian motion."""


@embed.command("simulate")
@click.option("--family", "-f", "family_path", required=True, type=click.Path(exists=True))
@click.option("--dt", default=1e-3, show_default=True)
@click.option("--paths", "n_paths", default=10_000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--horizon", default=10_000.0, show_default=True)
@click.option("--allow-non-wds", is_flag=True, default=False)
@click.option("--out", "-o", "out_dir", required=True, type=click.Path())
@click.option("--manifest", "manifest_path", default=None, type=click.Path())
def embed_simulate(family_path: str, dt: float, n_paths: int, seed: int, horizon: float,
                   allow_non_wds: bool, out_dir: str, manifest_path: str | None) -> None:
    """Per-time CSVs (path_id,T,BT,ST,censored) plus a summary JSON."""
    man, started = _start_manifest([family_path], seed=seed)
    with _InputErrors():
        fam = _load_family(family_path)
    cfg = PathConfig(dt=dt, horizon=horizon, n_paths=n_paths, seed=seed)
    try:
        res = embed_family(fam, cfg, allow_non_wds=allow_non_wds)
    except (NotWdsOrderedError, HorizonTooSmallError) as exc:
        click.echo(f"simulation rejected: {exc}", err=True)
        sys.exit(EXIT_PROPERTY_FAILS)
    os.makedirs(out_dir, exist_ok=True)
    outputs = []
    summary: dict = {
        "censor_fraction": res.censor_fraction(),
        "monotone_violations": check_monotone_t(res).n_violations,
        "times": {},
    }
    for i, t in enumerate(res.times):
        path = os.path.join(out_dir, f"time_{i}.csv")
        lines = ["path_id,T,BT,ST,censored"]
        for p in range(res.config.n_paths):
            lines.append(
                f"{p},{res.T[i, p]!r},{res.BT[i, p]!r},{res.ST[i, p]!r},{int(res.censored[i, p])}"
            )
        _atomic_write(path, "\n".join(lines) + "\n")
        outputs.append(path)
        emp = res.empirical_measure(i)
        summary["times"][repr(t)] = {
            "file": os.path.basename(path),
            "censored": int(res.censored[i].sum()),
            "ks_distance": empirical_distance(emp, fam.measures[i], "ks"),
            "w1_distance": empirical_distance(emp, fam.measures[i], "w1"),
        }
    summary_path = os.path.join(out_dir, "summary.json")
    _atomic_write(summary_path, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    outputs.append(summary_path)
    _finish_manifest(man, started, outputs,
                     manifest_path or os.path.join(out_dir, "manifest.json"))
    click.echo(json.dumps({"censor_fraction": summary["censor_fraction"],
                           "monotone_violations": summary["monotone_violations"]}))
    sys.exit(EXIT_OK)


@main.group()
def transform() -> None:
    """Order-preserving transforms of measures and families."""


TRANSFORM_NAMES = ["censor", "convex", "subordinate", "translate", "scale"]


def _apply_transform(name: str, params: dict, payload: dict):
    """Return (result_dict, renormalization) for a measure or family input."""
    is_family = "family" in payload

    def per_measure(fn):
        if is_family:
            fam = MeasureFamily.from_dict(payload)
            out = []
            renorms = []
            for t, m in fam.entries:
                r = fn(m)
                if hasattr(r, "renormalization"):
                    renorms.append(r.renormalization)
                    r = r.measure
                out.append((t, r))
            fam_out = MeasureFamily.make(out)
            return fam_out.to_dict(), (min(renorms) if renorms else 1.0)
        r = fn(Measure.from_dict(payload))
        renorm = getattr(r, "renormalization", 1.0)
        m_out = r.measure if hasattr(r, "measure") else r
        return m_out.to_dict(), renorm

    if name == "censor":
        a, b = float(params["a"]), float(params["b"])
        return per_measure(lambda m: censor(m, a, b))
    if name == "translate":
        f = LogConcaveDensity.triangular(
            half_width=float(params.get("half_width", 1.0)),
            n=int(params.get("n", 201)),
        )
        return per_measure(lambda m: random_translate(m, f))
    if name == "scale":
        f = LogConcaveDensity.make([float(v) for v in params["grid"]],
                                   [float(v) for v in params["log_values"]])
        return per_measure(lambda m: scale_mix(m, f))
    if name == "convex":
        if not is_family:
            raise MeasureError("convex combination needs a family input")
        fam = MeasureFamily.from_dict(payload)
        out = convex_combine_family(fam, [float(v) for v in params["tau"]])
        return out.to_dict(), 1.0
    if name == "subordinate":
        if not is_family:
            raise MeasureError("subordination needs a family input")
        fam = MeasureFamily.from_dict(payload)
        kernel = MixingKernel.make(
            tuple(float(v) for v in params["t_grid"]),
            tuple(float(v) for v in params["lambda_grid"]),
            tuple(tuple(float(w) for w in row) for row in params["weights"]),
        )
        return subordinate(fam, kernel).to_dict(), 1.0
    raise MeasureError(f"unknown transform {name!r}")


@transform.command("apply")
@click.option("--name", "-n", required=True, type=click.Choice(TRANSFORM_NAMES))
@click.option("--params", "-p", "params_json", default="{}", show_default=True,
              help="Transform parameters as inline JSON.")
@click.option("--in", "-i", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "-o", "out_path", required=True, type=click.Path())
@click.option("--manifest", "manifest_path", default=None, type=click.Path())
def transform_apply(name: str, params_json: str, in_path: str, out_path: str,
                    manifest_path: str | None) -> None:
    """Write the transformed measure/family JSON with a provenance block."""
    man, started = _start_manifest([in_path])
    with _InputErrors():
        params = json.loads(params_json)
        with open(in_path) as fh:
            payload = json.load(fh)
        result, renorm = _apply_transform(name, params, payload)
    doc = {
        "result": result,
        "provenance": {"transform": name, "params": params, "renormalization": renorm},
    }
    _atomic_write(out_path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    _finish_manifest(man, started, [out_path], manifest_path or out_path + ".manifest.json")
    sys.exit(EXIT_OK)


@main.group()
def examples() -> None:
    """Built-in example families and the full verification suite."""


_EXAMPLE_EXPECT_WDS = {
    "prop42": True,
    "prop44": True,
    "two_atom": True,
    "translated_counterexample": False,
    "shifted": True,
    "gaussian_peacock": False,
}


def _run_named_example(name: str) -> tuple[bool, str]:
    from .acceptance import criterion_1, criterion_2

    if name == "prop42":
        r = criterion_1()
        return r.passed, r.detail
    if name == "prop44":
        r = criterion_2()
        return r.passed, r.detail
    fam = example_family(name)
    verdict = compare_family(Relation.WDS, fam)
    want = _EXAMPLE_EXPECT_WDS[name]
    ok = verdict.holds == want and not verdict.inconclusive
    return ok, f"wds verdict holds={verdict.holds} (expected {want})"


@examples.command("run")
@click.option("--name", "-n", default=None, type=click.Choice(sorted(EXAMPLE_FAMILIES)))
@click.option("--all", "run_all_flag", is_flag=True, default=False,
              help="Run the full verification suite and write a summary table.")
@click.option("--out", "-o", "out_dir", default="acceptance_out", show_default=True,
              type=click.Path())
@click.option("--manifest", "manifest_path", default=None, type=click.Path())
def examples_run(name: str | None, run_all_flag: bool, out_dir: str,
                 manifest_path: str | None) -> None:
    if name is None and not run_all_flag:
        _fail_input("provide --name or --all")
    man, started = _start_manifest([])
    outputs = []
    if run_all_flag:
        results = run_all()
        table = summary_table(results)
        click.echo(table)
        os.makedirs(out_dir, exist_ok=True)
        summary_path = os.path.join(out_dir, "summary.txt")
        _atomic_write(summary_path, table + "\n")
        json_path = os.path.join(out_dir, "summary.json")
        _atomic_write(json_path, json.dumps(
            [{"number": r.number, "name": r.name, "passed": r.passed,
              "detail": r.detail, "seconds": r.seconds} for r in results],
            indent=2) + "\n")
        outputs += [summary_path, json_path]
        ok = all(r.passed for r in results)
    else:
        ok, detail = _run_named_example(name)
        click.echo(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    _finish_manifest(man, started, outputs,
                     manifest_path or os.path.join(out_dir, "manifest.json")
                     if run_all_flag else (manifest_path or "examples_run.manifest.json"))
    sys.exit(EXIT_OK if ok else EXIT_PROPERTY_FAILS)


if __name__ == "__main__":
    main()

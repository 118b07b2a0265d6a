"""Config-driven experiment runner.

One JSON config file (see :data:`~timearrow._config.DEFAULT_CONFIG`) fully
determines an experiment: grid, dense-tier size, time grid, initial state,
and tolerances.  Every command writes its results atomically (temp file +
rename) into ``--out``: scenario commands emit a CSV (17-significant-digit
scientific notation, one ``tolerance_class`` column) plus a ``.meta.json``
sidecar echoing the config and library version, and ``selftest`` emits a
single JSON report.  Outputs carry no timestamps or machine identifiers, so
reruns with the same config are byte-identical.

Exit codes: 0 success, 1 tolerance violation, 2 config error (reported
field by field) or an off-lattice time under the reject policy.
"""

from __future__ import annotations

import contextlib
import io
import json
import os
import sys
import tempfile
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import __version__
from ._config import ConfigError, load_config
from .evolution import (
    OffLatticeTimeError,
    OffLatticeWarning,
    kernel_witness,
    toeplitz_step,
)
from .hardy import hardy_embed, hardy_part, hardy_project, rational_hardy
from .lambda_transform import build_model, z_evolve, z_matrix
from .lyapunov import apply_omega, lyapunov_curve
from .ordering import (
    assemble_T,
    irreversible_matrix_element,
    projection_rank,
    spectral_measure,
)
from .selftest import run_all
from .spaces import GridSpec, LinOp, Space, make_grid, norm, restrict
from .states import random_guarded_state

_LATTICE_RTOL = 1e-9


def _fmt(x: float) -> str:
    return f"{float(x):.16e}"


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(str(cell) for cell in row) + "\n")
    return buf.getvalue()


def _write_outputs(out_dir, stem, header, rows, cfg, command, diagnostics=None):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _atomic_write(out / f"{stem}.csv", _csv_text(header, rows))
    meta = {"command": command, "config": cfg, "version": __version__}
    if diagnostics is not None:
        meta["diagnostics"] = diagnostics
    _atomic_write(
        out / f"{stem}.meta.json",
        json.dumps(meta, sort_keys=True, indent=2) + "\n",
    )
    return out / f"{stem}.csv"


def _pmap(fn, items, threads: int) -> list:
    if threads == 0:
        threads = os.cpu_count() or 1
    items = list(items)
    if threads == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _load(config_path, seed):
    cfg = load_config(config_path)
    if seed is not None:
        cfg["state"]["seed"] = seed
    return cfg


def _scenario_grid(cfg) -> GridSpec:
    g = cfg["grid"]
    return make_grid(g["n_sigma"], g["sigma_max"], g["k_dim"])


def _dense_grid(cfg) -> GridSpec:
    g = cfg["grid"]
    return make_grid(2 * cfg["dense"]["n_dense"], g["sigma_max"], g["k_dim"])


def _build_state(grid: GridSpec, cfg):
    """HALF_LINE_POS initial state from the config's state section."""
    kind = cfg["state"]["kind"]
    params = cfg["state"]["parameters"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OffLatticeWarning)
        if kind == "witness":
            mu = complex(params["mu"][0], params["mu"][1])
            f = kernel_witness(grid, mu, params["t0"], snap=True)
            return restrict(hardy_embed(f))
        if kind == "rational":
            poles = [(complex(p[0], p[1]), int(p[2])) for p in params["poles"]]
            f = hardy_part(rational_hardy(grid, poles))
            return restrict(hardy_embed(f))
    rng = np.random.default_rng(cfg["state"]["seed"])
    return random_guarded_state(grid, rng, n_terms=params["n_terms"])


def _lattice_times(grid: GridSpec, cfg) -> np.ndarray:
    """Config time grid as lattice indices, snapped or strictly validated."""
    t = cfg["times"]
    requested = np.linspace(0.0, t["t_max"], t["n_steps"])
    ks = np.empty(requested.size, dtype=np.int64)
    for i, ti in enumerate(requested):
        ratio = ti / grid.delta_tau
        k = int(round(ratio))
        if abs(ratio - k) > _LATTICE_RTOL * max(1.0, abs(ratio)) and not t["snap_times"]:
            raise OffLatticeTimeError(
                f"times[{i}] = {ti} is off the dual lattice (delta_tau = "
                f"{grid.delta_tau}) and times.snap_times is false"
            )
        ks[i] = k
    return ks


def _violation(message: str):
    click.echo(f"tolerance violation: {message}", err=True)
    sys.exit(1)


def _common_options(fn):
    fn = click.option(
        "--seed",
        type=click.IntRange(0, 2**64 - 1),
        default=None,
        help="Override state.seed from the config.",
    )(fn)
    fn = click.option(
        "--threads",
        type=click.IntRange(0),
        default=0,
        show_default=True,
        help="Worker threads; 0 picks the machine's CPU count.",
    )(fn)
    fn = click.option(
        "--out",
        "out_dir",
        type=click.Path(file_okay=False),
        default=".",
        show_default=True,
        help="Directory for output files.",
    )(fn)
    fn = click.option(
        "--config",
        "config_path",
        type=click.Path(dir_okay=False),
        default=None,
        help="JSON config file (omit for built-in defaults).",
    )(fn)
    return fn


def _scenario(fn):
    """Wrap a command body with config loading and the exit-code contract."""

    def wrapper(config_path, out_dir, threads, seed, **kwargs):
        try:
            cfg = _load(config_path, seed)
            fn(cfg, out_dir, threads, **kwargs)
        except ConfigError as exc:
            for problem in exc.problems:
                click.echo(f"config error: {problem}", err=True)
            sys.exit(2)
        except OffLatticeTimeError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(2)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
@click.version_option(__version__, prog_name="timearrow")
def main():
    """Experiment runner for the discrete irreversibility model."""


@main.command("selftest")
@_common_options
@_scenario
def selftest_cmd(cfg, out_dir, threads):
    """Run the full acceptance-check battery and write selftest.json."""
    n_dense = cfg["dense"]["n_dense"]
    if n_dense < 512:
        click.echo(
            "note: dense tiers below n_dense = 512 cannot resolve the "
            "narrowest guarded packets; algebraic-tier failures there "
            "measure discretization leakage, not broken algebra"
        )
    results = run_all(
        n_dense=n_dense,
        progress=lambda r: click.echo(r.summary()),
    )
    report = {
        "version": __version__,
        "config": cfg,
        "all_passed": all(r.passed for r in results),
        # no timings in the written report: reruns must be byte-identical
        "results": [
            {
                "criterion": r.criterion,
                "name": r.name,
                "tier": r.tier,
                "passed": r.passed,
                "details": r.details,
            }
            for r in results
        ],
    }
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _atomic_write(
        out / "selftest.json", json.dumps(report, sort_keys=True, indent=2) + "\n"
    )
    click.echo(f"report: {out / 'selftest.json'}")
    if not report["all_passed"]:
        sys.exit(1)


@main.command("lyapunov-curve")
@_common_options
@_scenario
def lyapunov_curve_cmd(cfg, out_dir, threads):
    """Expectation curve of the configured state along its trajectory."""
    grid = _scenario_grid(cfg)
    psi = _build_state(grid, cfg)
    ks = _lattice_times(grid, cfg)
    times = ks * grid.delta_tau
    report = lyapunov_curve(psi, times)
    rows = [
        (_fmt(t), _fmt(e), _fmt(nv), "algebraic")
        for t, e, nv in zip(report.times, report.expectations, report.norms)
    ]
    path = _write_outputs(
        out_dir,
        "lyapunov_curve",
        ("t", "expectation", "norm", "tolerance_class"),
        rows,
        cfg,
        "lyapunov-curve",
        diagnostics={
            "guard_band_leakage": float(report.guard_band_leakage),
            "max_monotonicity_violation": float(report.max_monotonicity_violation),
        },
    )
    click.echo(f"wrote: {path}")
    if report.max_monotonicity_violation > cfg["tolerances"]["algebraic"]:
        _violation(
            f"expectation curve increases by "
            f"{report.max_monotonicity_violation:.3e}"
        )


@main.command("semigroup-norms")
@_common_options
@_scenario
def semigroup_norms_cmd(cfg, out_dir, threads):
    """Norm decay under the compressed semigroup and its transported form."""
    grid = _scenario_grid(cfg)
    dense = _dense_grid(cfg)
    h = apply_omega(_build_state(grid, cfg))
    model = build_model(dense)
    psi = model.lam.apply(_build_state(dense, cfg))
    ks_big = _lattice_times(grid, cfg)
    ks_dense = _lattice_times(dense, cfg)

    def one(pair):
        kb, kd = pair
        tb = kb * grid.delta_tau
        td = kd * dense.delta_tau
        return (
            tb,
            norm(toeplitz_step(h, tb)),
            td,
            norm(z_evolve(model, psi, td)),
        )

    data = _pmap(one, zip(ks_big, ks_dense), threads)
    rows = [
        (_fmt(tb), _fmt(tn), _fmt(td), _fmt(zn), "algebraic")
        for tb, tn, td, zn in data
    ]
    path = _write_outputs(
        out_dir,
        "semigroup_norms",
        ("t_toeplitz", "toeplitz_norm", "t_z", "z_norm", "tolerance_class"),
        rows,
        cfg,
        "semigroup-norms",
    )
    click.echo(f"wrote: {path}")
    tol = cfg["tolerances"]["algebraic"]
    tnorms = np.array([d[1] for d in data])
    znorms = np.array([d[3] for d in data])
    if np.any(np.diff(tnorms) > tol):
        _violation("compressed-semigroup norms increase along the time grid")
    if np.any(np.diff(znorms) > tol):
        _violation("transported-semigroup norms increase along the time grid")


@main.command("projection-family")
@_common_options
@_scenario
def projection_family_cmd(cfg, out_dir, threads):
    """Past-projection family residuals, ranks, and the ordering operator."""
    dense = _dense_grid(cfg)
    model = build_model(dense)
    ks = np.unique(_lattice_times(dense, cfg))
    if ks.size < 2 or ks[0] != 0:
        raise OffLatticeTimeError(
            "times must start at 0 and contain at least two distinct lattice "
            "points after snapping"
        )
    times = ks * dense.delta_tau
    family = spectral_measure(model, times)
    ordering = assemble_T(family)
    spectrum = np.linalg.eigvalsh(ordering.matrix.matrix)
    eye = np.eye(dense.dim(Space.HALF_LINE_POS), dtype=np.complex128)

    def one(i):
        p = family.projections[i].matrix
        z = z_matrix(model, float(times[i]))
        future = z.conj().T @ z
        idem = float(np.linalg.norm(p @ p - p))
        comp = float(np.linalg.norm(p + future - eye))
        if i == 0:
            nest = 0.0
        else:
            q = family.projections[i - 1].matrix
            nest = float(np.linalg.norm(q @ p - q))
        return (
            times[i],
            projection_rank(family.projections[i]),
            idem,
            nest,
            comp,
        )

    data = _pmap(one, range(len(family.projections)), threads)
    rows = [
        (_fmt(t), str(rank), _fmt(idem), _fmt(nest), _fmt(comp), "algebraic")
        for t, rank, idem, nest, comp in data
    ]
    path = _write_outputs(
        out_dir,
        "projection_family",
        (
            "t",
            "rank",
            "idempotency_residual",
            "nesting_residual",
            "complement_residual",
            "tolerance_class",
        ),
        rows,
        cfg,
        "projection-family",
        diagnostics={
            "ordering_spectrum_min": float(spectrum.min()),
            "ordering_spectrum_max": float(spectrum.max()),
            "truncation_time": float(ordering.truncation_time),
        },
    )
    click.echo(f"wrote: {path}")
    tol = cfg["tolerances"]["algebraic"]
    ranks = [d[1] for d in data]
    worst = max(max(d[2], d[3], d[4]) for d in data)
    if worst > tol:
        _violation(f"projection-family residual {worst:.3e} exceeds {tol:g}")
    if any(np.diff(ranks) < 0):
        _violation("projection ranks decrease along the family")


@main.command("matrix-element")
@_common_options
@_scenario
def matrix_element_cmd(cfg, out_dir, threads):
    """Observable matrix elements in the reversible and irreversible pictures."""
    dense = _dense_grid(cfg)
    model = build_model(dense)
    psi = _build_state(dense, cfg)
    ks = _lattice_times(dense, cfg)
    diag = np.repeat(dense.sigma_pos() / dense.sigma_max, dense.k_dim)
    observables = {
        "identity": LinOp(
            dense,
            Space.HALF_LINE_POS,
            Space.HALF_LINE_POS,
            np.eye(diag.size, dtype=np.complex128),
            hermitian=True,
        ),
        "energy": LinOp(
            dense,
            Space.HALF_LINE_POS,
            Space.HALF_LINE_POS,
            np.diag(diag.astype(np.complex128)),
            hermitian=True,
        ),
    }

    def one(item):
        name, k = item
        t = k * dense.delta_tau
        lhs, rhs, diff = irreversible_matrix_element(
            model, psi, psi, observables[name], t
        )
        return name, t, lhs, rhs, diff

    work = [(name, k) for name in observables for k in ks]
    data = _pmap(one, work, threads)
    rows = [
        (
            name,
            _fmt(t),
            _fmt(lhs.real),
            _fmt(lhs.imag),
            _fmt(rhs.real),
            _fmt(rhs.imag),
            _fmt(diff),
            "algebraic",
        )
        for name, t, lhs, rhs, diff in data
    ]
    path = _write_outputs(
        out_dir,
        "matrix_element",
        (
            "observable",
            "t",
            "reversible_re",
            "reversible_im",
            "irreversible_re",
            "irreversible_im",
            "abs_difference",
            "tolerance_class",
        ),
        rows,
        cfg,
        "matrix-element",
    )
    click.echo(f"wrote: {path}")
    tol = cfg["tolerances"]["algebraic"]
    scale = norm(psi) ** 2  # both observables have unit operator norm
    worst = max(d[4] for d in data)
    if worst > tol * scale:
        _violation(
            f"picture mismatch {worst:.3e} exceeds {tol:g} x state scale "
            "(a state with guard-band leakage, e.g. a witness restricted to "
            "the half-line, sets a leakage floor here)"
        )


@main.command("convergence")
@_common_options
@_scenario
def convergence_cmd(cfg, out_dir, threads):
    """Continuum-tier residuals across the standard refinement ladder."""
    ladder = [(1024, 25.0), (2048, 50.0), (4096, 100.0)]
    rows = []
    simple_series = []
    double_series = []
    witness_series = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OffLatticeWarning)
        for n, ell in ladder:
            grid = make_grid(n, ell, 1)
            f1 = rational_hardy(grid, [(-1j, 1)])
            f2 = rational_hardy(grid, [(-1j, 2)])
            simple = norm(_hardy_defect(f1)) / norm(f1)
            double = norm(_hardy_defect(f2)) / norm(f2)
            w = kernel_witness(grid, -1j, 1.0)
            ratio = norm(toeplitz_step(w, 1.0, snap=True)) / norm(w)
            simple_series.append(simple)
            double_series.append(double)
            witness_series.append(ratio)
            rows.append(
                (
                    str(n),
                    _fmt(ell),
                    _fmt(simple),
                    _fmt(double),
                    _fmt(ratio),
                    "continuum",
                )
            )
    path = _write_outputs(
        out_dir,
        "convergence",
        (
            "n_sigma",
            "sigma_max",
            "simple_pole_residual",
            "double_pole_residual",
            "witness_ratio_t1",
            "tolerance_class",
        ),
        rows,
        cfg,
        "convergence",
    )
    click.echo(f"wrote: {path}")
    tol = cfg["tolerances"]["continuum"]
    for label, series in (
        ("simple-pole", simple_series),
        ("double-pole", double_series),
        ("witness-ratio", witness_series),
    ):
        if any(np.diff(series) >= 0):
            _violation(f"{label} residuals do not decrease under refinement")
        if series[-1] > tol:
            _violation(
                f"{label} residual {series[-1]:.3e} exceeds {tol:g} on the "
                "finest grid"
            )


def _hardy_defect(f):
    return hardy_project(f, "plus") - f

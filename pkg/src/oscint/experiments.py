"""Batch experiment runner: config in, CSV/JSON artifacts out.

Six experiment kinds share one JSON config layout (versioned ``schema``
field, group/theta/bandwidth/grid block, kind-specific ``params``).  Runs
are deterministic given config and seed; artifacts are written to a
``.partial`` path and renamed only on success, and the manifest (config
echo, library version, wall time) is written last.

Superlevel-set measures drive the weak-(1,1) sweeps: for each test function
the operator output is scanned over a logarithmic alpha grid anchored at its
sup norm, and the peak of alpha times the superlevel measure is compared to
the input L1 norm.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .czd import build_dyadic_system, decompose, full_depth, verify_properties
from .dual_spectrum import enumerate_dual, spectral_data
from .errors import ConfigError, NumericalFailure, ResolutionError
from .group_domain import Ball, QuadratureGrid, ball_volume, build_grid, points_in_ball
from .group_fourier import (
    FourierCoefficients,
    GridFunction,
    forward_transform,
    inverse_transform,
    plancherel_energy,
)
from .groups import GroupId, SU2, array_to_points, diameter, torus
from .hormander import estimate_seminorm, seminorm_table_to_csv
from .multipliers import (
    MultiplierSymbol,
    bessel_symbol,
    constant_symbol,
    envelope_slope,
    kernel_to_csv,
    oscillating_phase_symbol,
    oscillating_symbol,
    synthesize_kernel,
    verify_decay,
    apply_multiplier,
)

__all__ = [
    "ExperimentConfig",
    "distribution_function",
    "Weak11Row",
    "Weak11Report",
    "weak11_sweep",
    "approximate_identity",
    "random_atoms",
    "run_config",
    "EXPERIMENT_KINDS",
]

EXPERIMENT_KINDS = ("plancherel", "multiplier", "kernel", "seminorm", "czd", "weak11")


def distribution_function(u: GridFunction, alpha_grid) -> list[tuple[float, float]]:
    """Superlevel measures: (alpha, total weight where |u| > alpha).

    ``alpha_grid`` must be sorted ascending; the measure is nonincreasing and
    right-continuous (strict inequality).
    """
    alphas = np.asarray(alpha_grid, dtype=float)
    if alphas.size == 0:
        raise ValueError("alpha grid must be nonempty")
    if np.any(np.diff(alphas) < 0):
        raise ValueError("alpha grid must be sorted ascending")
    mags = np.abs(u.values)
    order = np.argsort(mags, kind="stable")
    sorted_mags = mags[order]
    suffix = np.concatenate([np.cumsum(u.grid.weights[order][::-1])[::-1], [0.0]])
    pos = np.searchsorted(sorted_mags, alphas, side="right")
    return [(float(a), float(suffix[p])) for a, p in zip(alphas, pos)]


def _sup_alpha_level(u: GridFunction, alpha_points: int) -> tuple[float, int]:
    """sup over a log alpha-grid of alpha * |{|u| > alpha}|."""
    top = u.sup_norm()
    if top <= 0.0:
        return 0.0, 0
    grid = np.geomspace(top * 1e-4, top, alpha_points)
    table = distribution_function(u, grid)
    return max(a * m for a, m in table), alpha_points


@dataclass
class Weak11Row:
    id: str
    epsilon: float
    l1_norm: float
    sup_alpha_level: float
    ratio: float
    alpha_grid_size: int
    error: str | None = None


@dataclass
class Weak11Report:
    rows: list[Weak11Row]
    symbol_label: str
    bandwidth: float
    theta: float


def approximate_identity(grid: QuadratureGrid, eps: float) -> GridFunction:
    """f_eps = 1_{B(e, eps)} / |B(e, eps)| sampled on the grid."""
    from .groups import identity

    mask = points_in_ball(grid, Ball(identity(grid.group), eps))
    count = int(np.count_nonzero(mask))
    if count < 2:
        raise ResolutionError(
            f"ball of radius {eps:g} holds {count} grid point(s); refine the grid"
        )
    vals = np.zeros(grid.size, dtype=complex)
    vals[mask] = 1.0 / ball_volume(grid.group, eps)
    return GridFunction(grid, vals)


def random_atoms(
    grid: QuadratureGrid,
    count: int,
    radius_range: tuple[float, float],
    seed: int,
) -> list[tuple[str, float, GridFunction]]:
    """Mean-zero, L1-normalized random functions supported in random balls."""
    rng = np.random.default_rng(seed)
    lo, hi = radius_range
    out = []
    for k in range(count):
        radius = float(rng.uniform(lo, hi))
        center_idx = int(rng.integers(grid.size))
        center = array_to_points(grid.group, grid.xs[center_idx : center_idx + 1])[0]
        mask = points_in_ball(grid, Ball(center, radius))
        if int(np.count_nonzero(mask)) < 2:
            out.append((f"atom{k}", radius, None))
            continue
        vals = np.zeros(grid.size, dtype=complex)
        vals[mask] = rng.normal(size=int(np.count_nonzero(mask)))
        w = grid.weights
        vals[mask] -= np.sum(w[mask] * vals[mask]) / np.sum(w[mask])
        f = GridFunction(grid, vals)
        nrm = f.l1_norm()
        if nrm <= 0:
            out.append((f"atom{k}", radius, None))
            continue
        out.append((f"atom{k}", radius, GridFunction(grid, vals / nrm)))
    return out


def weak11_sweep(
    group: GroupId,
    theta: float,
    family: list[tuple[str, float, GridFunction | None]],
    bandwidth: float,
    symbol: MultiplierSymbol | None = None,
    alpha_points: int = 128,
) -> Weak11Report:
    """Apply the multiplier to each family member and record the weak-type ratio."""
    sym = symbol if symbol is not None else oscillating_symbol(group, theta)
    rows: list[Weak11Row] = []
    for fid, eps, f in family:
        if f is None:
            rows.append(Weak11Row(fid, eps, math.nan, math.nan, math.nan, 0, "under-resolved"))
            continue
        try:
            Tf = apply_multiplier(sym, f, bandwidth)
        except ResolutionError as exc:
            rows.append(Weak11Row(fid, eps, f.l1_norm(), math.nan, math.nan, 0, str(exc)))
            continue
        sup_level, npts = _sup_alpha_level(Tf, alpha_points)
        l1 = f.l1_norm()
        rows.append(Weak11Row(fid, eps, l1, sup_level, sup_level / l1, npts))
    return Weak11Report(rows=rows, symbol_label=sym.label, bandwidth=bandwidth, theta=theta)


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    kind: str
    group: GroupId
    theta: float
    bandwidth: float
    grid_order: int
    seed: int
    params: dict[str, Any] = field(default_factory=dict)

    def echo(self) -> dict:
        g = (
            {"kind": "torus", "n": self.group.dimension}
            if self.group.is_torus
            else {"kind": "su2"}
        )
        return {
            "schema": 1,
            "kind": self.kind,
            "group": g,
            "theta": self.theta,
            "bandwidth": self.bandwidth,
            "grid_order": self.grid_order,
            "seed": self.seed,
            "params": self.params,
        }


def _fail(msg: str) -> None:
    raise ConfigError(msg)


def parse_config(obj: dict) -> ExperimentConfig:
    """Validate a parsed JSON config; raises ConfigError with the field name."""
    if not isinstance(obj, dict):
        _fail("config root must be a JSON object")
    if obj.get("schema") != 1:
        _fail(f"schema: expected 1, got {obj.get('schema')!r}")
    kind = obj.get("kind")
    if kind not in EXPERIMENT_KINDS:
        _fail(f"kind: expected one of {EXPERIMENT_KINDS}, got {kind!r}")
    gobj = obj.get("group")
    if not isinstance(gobj, dict) or gobj.get("kind") not in ("torus", "su2"):
        _fail("group: expected {'kind': 'torus'|'su2', ...}")
    if gobj["kind"] == "torus":
        n = gobj.get("n")
        if not isinstance(n, int) or not 1 <= n <= 3:
            _fail(f"group.n: torus dimension must be an integer in 1..3, got {n!r}")
        group = torus(n)
    else:
        group = SU2
    theta = obj.get("theta", 0.0)
    if not isinstance(theta, (int, float)) or not 0.0 <= float(theta) < 1.0:
        _fail(f"theta: must lie in the range [0, 1), got {theta!r}")
    bandwidth = obj.get("bandwidth", 16.0)
    if not isinstance(bandwidth, (int, float)) or bandwidth < 1:
        _fail(f"bandwidth: must be >= 1, got {bandwidth!r}")
    order = obj.get("grid_order", 16)
    if not isinstance(order, int) or order < 2:
        _fail(f"grid_order: must be an integer >= 2, got {order!r}")
    seed = obj.get("seed")
    if not isinstance(seed, int) or seed < 0:
        _fail(f"seed: required nonnegative integer, got {seed!r}")
    params = obj.get("params", {})
    if not isinstance(params, dict):
        _fail("params: must be an object")
    return ExperimentConfig(
        kind=kind,
        group=group,
        theta=float(theta),
        bandwidth=float(bandwidth),
        grid_order=order,
        seed=seed,
        params=params,
    )


def _symbol_from_name(group: GroupId, theta: float, name: str, params: dict) -> MultiplierSymbol:
    if name == "oscillating":
        return oscillating_symbol(group, theta)
    if name == "phase":
        return oscillating_phase_symbol(group, theta)
    if name == "bessel":
        return bessel_symbol(group, float(params.get("s", group.dimension * theta / 2.0)))
    if name == "identity":
        return bessel_symbol(group, 0.0)
    if name == "zero":
        return constant_symbol(group, 0.0)
    _fail(f"params.symbol: unknown symbol {name!r}")


# ---------------------------------------------------------------------------
# experiment bodies (each returns {filename: text})


def _random_band_limited(grid: QuadratureGrid, bandwidth: float, rng) -> GridFunction:
    entries = {}
    for xi in enumerate_dual(grid.group, bandwidth):
        d = spectral_data(grid.group, xi).dim
        entries[xi] = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return inverse_transform(FourierCoefficients(grid.group, bandwidth, entries), grid)


def _run_plancherel(cfg: ExperimentConfig) -> dict[str, str]:
    grid = build_grid(cfg.group, cfg.grid_order)
    rng = np.random.default_rng(cfg.seed)
    num = int(cfg.params.get("num_functions", 20))
    lines = ["id,roundtrip_rel_err,plancherel_rel_err"]
    for k in range(num):
        f = _random_band_limited(grid, cfg.bandwidth, rng)
        fhat = forward_transform(f, cfg.bandwidth)
        back = inverse_transform(fhat, grid)
        scale = max(f.sup_norm(), 1e-300)
        rt = float(np.max(np.abs(back.values - f.values))) / scale
        l2 = f.l2_norm() ** 2
        pl = abs(plancherel_energy(fhat) - l2) / max(l2, 1e-300)
        lines.append(f"fn{k},{rt!r},{pl!r}")
    return {"plancherel.csv": "\n".join(lines) + "\n"}


def _run_multiplier(cfg: ExperimentConfig) -> dict[str, str]:
    sym = _symbol_from_name(cfg.group, cfg.theta, cfg.params.get("symbol", "oscillating"), cfg.params)
    report = verify_decay(sym, cfg.theta, cfg.bandwidth)
    lines = ["level_bandwidth,decay_constant"]
    for lvl, c in report.levels:
        lines.append(f"{lvl!r},{c!r}")
    meta = json.dumps(
        {"symbol": sym.label, "constant": report.constant, "admissible": report.admissible},
        indent=2,
    )
    return {"multiplier.csv": "\n".join(lines) + "\n", "decay.json": meta + "\n"}


def _run_kernel(cfg: ExperimentConfig) -> dict[str, str]:
    grid = build_grid(cfg.group, cfg.grid_order)
    sym = _symbol_from_name(cfg.group, cfg.theta, cfg.params.get("symbol", "oscillating"), cfg.params)
    reg = cfg.params.get("regularization", "gaussian")
    sigma = cfg.params.get("sigma")
    ks = synthesize_kernel(sym, grid, cfg.bandwidth, regularization=reg, sigma=sigma)
    out = {"kernel.csv": kernel_to_csv(ks)}
    slopes = {}
    for win in cfg.params.get("windows", []):
        slopes[f"[{win[0]:g},{win[1]:g}]"] = envelope_slope(ks, (win[0], win[1]))
    if slopes:
        out["envelope.json"] = json.dumps({"slopes": slopes, "symbol": sym.label}, indent=2) + "\n"
    return out


def _run_seminorm(cfg: ExperimentConfig) -> dict[str, str]:
    grid = build_grid(cfg.group, cfg.grid_order)
    if not cfg.group.is_torus:
        # cost scales with grid size squared; allowed but called out
        import warnings

        warnings.warn("seminorm estimation on SU(2) is expensive", RuntimeWarning)
    sym = _symbol_from_name(cfg.group, cfg.theta, cfg.params.get("symbol", "oscillating"), cfg.params)
    reg = cfg.params.get("regularization", "gaussian")
    sigma = cfg.params.get("sigma")
    ks = synthesize_kernel(sym, grid, cfg.bandwidth, regularization=reg, sigma=sigma)
    rspec = cfg.params.get("r_grid", {"min": 0.03, "max": diameter(cfg.group) / 8.0, "count": 10})
    if isinstance(rspec, dict):
        r_grid = np.geomspace(float(rspec["min"]), float(rspec["max"]), int(rspec["count"]))
    else:
        r_grid = [float(v) for v in rspec]
    est = estimate_seminorm(
        ks.kernel, cfg.theta, r_grid, int(cfg.params.get("y_samples", 8)), seed=cfg.seed
    )
    meta = json.dumps({"value": est.value, "symbol": sym.label, "theta": cfg.theta}, indent=2)
    return {"seminorm.csv": seminorm_table_to_csv(est), "seminorm.json": meta + "\n"}


def _run_czd(cfg: ExperimentConfig) -> dict[str, str]:
    grid = build_grid(cfg.group, cfg.grid_order)
    mode = cfg.params.get("mode", "random")
    depth = cfg.params.get("depth")
    if depth is None:
        depth = full_depth(grid) if cfg.group.is_torus else 16
    system = build_dyadic_system(grid, int(depth))
    rng = np.random.default_rng(cfg.seed)
    if mode == "worked":
        if not (cfg.group.is_torus and cfg.group.dimension == 1):
            _fail("params.mode: 'worked' requires the 1-torus")
        vals = np.where(grid.xs[:, 0] < 1.0 / 8.0, 8.0, 0.0).astype(complex)
        cases = [("worked", GridFunction(grid, vals), [2.0])]
    elif mode == "random":
        num = int(cfg.params.get("num_functions", 5))
        alts = cfg.params.get("altitude_factors", [1.25, 2.0, 4.0])
        cases = []
        for k in range(num):
            f = GridFunction(grid, rng.normal(size=grid.size) + 0j)
            cases.append((f"fn{k}", f, [float(a) * f.l1_norm() for a in alts]))
    else:
        _fail(f"params.mode: expected 'worked' or 'random', got {mode!r}")
    lines = ["id,altitude,num_cells,total_cell_measure,all_properties_pass"]
    reports = {}
    for fid, f, altitudes in cases:
        for alt in altitudes:
            d = decompose(f, alt, system)
            rep = verify_properties(d, f)
            total = sum(bc.cell.measure for bc in d.bad_cells)
            lines.append(f"{fid},{alt!r},{len(d.bad_cells)},{total!r},{rep.all_ok}")
            reports[f"{fid}@{alt!r}"] = json.loads(rep.to_json())
    return {
        "czd.csv": "\n".join(lines) + "\n",
        "czd_properties.json": json.dumps(reports, indent=2) + "\n",
    }


def _run_weak11(cfg: ExperimentConfig) -> dict[str, str]:
    grid = build_grid(cfg.group, cfg.grid_order)
    sym = _symbol_from_name(cfg.group, cfg.theta, cfg.params.get("symbol", "oscillating"), cfg.params)
    family_kind = cfg.params.get("family", "approx_identity")
    family: list[tuple[str, float, GridFunction | None]] = []
    if family_kind == "approx_identity":
        eps_list = cfg.params.get("epsilons")
        if not eps_list:
            _fail("params.epsilons: required for the approx_identity family")
        for eps in eps_list:
            try:
                family.append((f"eps{eps!r}", float(eps), approximate_identity(grid, float(eps))))
            except ResolutionError:
                family.append((f"eps{eps!r}", float(eps), None))
    elif family_kind == "atoms":
        count = int(cfg.params.get("num_atoms", 8))
        lo, hi = cfg.params.get("radius_range", [diameter(cfg.group) / 16, diameter(cfg.group) / 4])
        family = random_atoms(grid, count, (float(lo), float(hi)), cfg.seed)
    else:
        _fail(f"params.family: expected 'approx_identity' or 'atoms', got {family_kind!r}")
    report = weak11_sweep(
        cfg.group,
        cfg.theta,
        family,
        cfg.bandwidth,
        symbol=sym,
        alpha_points=int(cfg.params.get("alpha_points", 128)),
    )
    lines = ["id,epsilon,l1_norm,sup_alpha_level,ratio"]
    for row in report.rows:
        lines.append(
            f"{row.id},{row.epsilon!r},{row.l1_norm!r},{row.sup_alpha_level!r},{row.ratio!r}"
        )
    meta = {
        "symbol": report.symbol_label,
        "alpha_grid_size": report.rows[0].alpha_grid_size if report.rows else 0,
        "row_errors": {r.id: r.error for r in report.rows if r.error},
    }
    return {
        "weak11.csv": "\n".join(lines) + "\n",
        "weak11.json": json.dumps(meta, indent=2) + "\n",
    }


_RUNNERS = {
    "plancherel": _run_plancherel,
    "multiplier": _run_multiplier,
    "kernel": _run_kernel,
    "seminorm": _run_seminorm,
    "czd": _run_czd,
    "weak11": _run_weak11,
}


def run_config(
    config_path: str, out_dir: str, seed_override: int | None = None
) -> list[str]:
    """Execute one experiment config; returns the artifact paths written.

    Artifacts go through a ``.partial`` rename dance so an interrupted run
    never leaves a final-named file behind; the manifest is written last.
    """
    t0 = time.time()
    try:
        with open(config_path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{config_path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    except OSError as exc:
        raise ConfigError(f"{config_path}: {exc}")
    cfg = parse_config(obj)
    if seed_override is not None:
        cfg.seed = int(seed_override)
    os.makedirs(out_dir, exist_ok=True)
    artifacts = _RUNNERS[cfg.kind](cfg)
    for text in artifacts.values():
        if not isinstance(text, str):
            raise NumericalFailure("experiment produced a non-text artifact")
    written = []
    for name, text in artifacts.items():
        final = os.path.join(out_dir, name)
        partial = final + ".partial"
        with open(partial, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(partial, final)
        written.append(final)
    manifest = {
        "config": cfg.echo(),
        "library_version": __version__,
        "wall_time_s": time.time() - t0,
        "outputs": sorted(os.path.basename(p) for p in written),
    }
    mpath = os.path.join(out_dir, "manifest.json")
    with open(mpath + ".partial", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    os.replace(mpath + ".partial", mpath)
    written.append(mpath)
    return written

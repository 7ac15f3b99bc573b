"""Configuration-driven experiment runner.

Reads a TOML config, runs one experiment kind (se-sweep, amp-mc,
dist-compare, privacy-sweep, tradeoff, stability-map), and writes
plot-ready CSV plus a JSON sidecar with the config hash, seed, wall time,
and library version.  Identical config + seed produces byte-identical
output; per-trial seeds derive from (run seed, grid index, trial index)
so trial fan-out is order-independent.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
from joblib import Parallel, delayed
from scipy.special import erfc

from . import __version__
from .amp import AmpOptions, perturbed_errors, run_amp
from .cd import solve_lasso_tilted
from .model import Dataset, Mechanism, ModelParams, generate_dataset, sample_privacy_noise
from .privacy import optimal_noise, privacy_report, tradeoff_curve
from .scalar_kernel import _atom_weight
from .state_evolution import SeOptions, se_fixed_point, gauss_hermite_standard

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

KINDS = ("se-sweep", "amp-mc", "dist-compare", "privacy-sweep", "tradeoff", "stability-map")

DIST_BIN_WIDTH = 1e-2  # histogram step for distribution comparisons

_SQRT2 = math.sqrt(2.0)


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configs."""


class NumericalFailure(RuntimeError):
    """Raised when an experiment cannot produce finite results."""


@dataclass
class ExperimentConfig:
    kind: str
    params: ModelParams
    sweep: list[tuple[str, list[float]]]
    trials: int = 1
    seed: int = 0
    threads: int = 1
    out_dir: Path = Path("results")
    solver: AmpOptions = field(default_factory=AmpOptions)
    se: SeOptions = field(default_factory=SeOptions)
    extra: dict[str, Any] = field(default_factory=dict)
    config_hash: str = ""


def _grid_from_spec(spec) -> list[float]:
    if isinstance(spec, list):
        grid = [float(v) for v in spec]
    elif isinstance(spec, dict):
        try:
            start, stop, num = spec["start"], spec["stop"], int(spec["num"])
        except KeyError as exc:
            raise ConfigError(f"sweep range missing key {exc}") from exc
        if num < 1:
            raise ConfigError("sweep range needs num >= 1")
        if spec.get("log", False):
            if start <= 0:
                raise ConfigError("log grid requires start > 0")
            grid = list(np.geomspace(start, stop, num))
        else:
            grid = list(np.linspace(start, stop, num))
    else:
        raise ConfigError(f"bad sweep grid spec: {spec!r}")
    if not grid:
        raise ConfigError("empty sweep grid")
    if sorted(grid) != grid:
        raise ConfigError("sweep grids must be sorted ascending")
    return grid


_PARAM_KEYS = {"alpha", "rho", "sigma_beta", "sigma_xi", "lam", "sigma_eta", "p"}


def load_config(path: str | Path, overrides: Optional[list[str]] = None) -> ExperimentConfig:
    path = Path(path)
    raw_bytes = path.read_bytes()
    try:
        raw = tomllib.loads(raw_bytes.decode())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    for key, value in _parse_overrides(overrides or []):
        _apply_override(raw, key, value)
    if raw.get("schema_version") != 1:
        raise ConfigError("config must declare schema_version = 1")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")

    pr = raw.get("params", {})
    unknown = set(pr) - _PARAM_KEYS - {"mechanism", "seed"}
    if unknown:
        raise ConfigError(f"unknown params keys: {sorted(unknown)}")
    try:
        params = ModelParams(
            alpha=float(pr.get("alpha", 0.5)),
            rho=float(pr.get("rho", 0.1)),
            sigma_beta=float(pr.get("sigma_beta", 1.0)),
            sigma_xi=float(pr.get("sigma_xi", 0.1)),
            lam=float(pr.get("lam", 1.0)),
            sigma_eta=float(pr.get("sigma_eta", 0.0)),
            mechanism=Mechanism(pr.get("mechanism", "objective")),
            p=int(pr.get("p", 1000)),
            seed=int(raw.get("seed", 0)),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid params: {exc}") from exc

    sweep = []
    for name, spec in raw.get("sweep", {}).items():
        if name not in _PARAM_KEYS:
            raise ConfigError(f"sweep axis {name!r} is not a model parameter")
        sweep.append((name, _grid_from_spec(spec)))

    solver_raw = raw.get("solver", {})
    solver = AmpOptions(
        damping=float(solver_raw.get("damping", 0.5)),
        tol=float(solver_raw.get("tol", 1e-8)),
        max_iter=int(solver_raw.get("max_iter", 5000)),
        blowup_factor=float(solver_raw.get("blowup_factor", 1e3)),
    )
    se_raw = raw.get("se", {})
    se_opts = SeOptions(
        damping=float(se_raw.get("damping", 0.5)),
        tol=float(se_raw.get("tol", 1e-10)),
        max_iter=int(se_raw.get("max_iter", 10_000)),
    )
    extra = {k: raw[k] for k in raw if k.replace("-", "_") == kind.replace("-", "_")}
    extra = extra.get(kind, extra.get(kind.replace("-", "_"), {}))
    trials = int(raw.get("trials", 1))
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    digest = hashlib.sha256(raw_bytes + json.dumps(overrides or []).encode()).hexdigest()
    return ExperimentConfig(
        kind=kind,
        params=params,
        sweep=sweep,
        trials=trials,
        seed=int(raw.get("seed", 0)),
        threads=int(raw.get("threads", 1)),
        out_dir=Path(raw.get("out", "results")),
        solver=solver,
        se=se_opts,
        extra=extra,
        config_hash=digest,
    )


def _parse_overrides(items: list[str]) -> list[tuple[str, Any]]:
    parsed = []
    for item in items:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, _, value = item.partition("=")
        try:
            parsed.append((key, json.loads(value)))
        except json.JSONDecodeError:
            parsed.append((key, value))
    return parsed


def _apply_override(raw: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = raw
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot override through non-table key {key!r}")
    node[keys[-1]] = value


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _write_sidecar(cfg: ExperimentConfig, out: Path, wall_time: float, files: list[str]) -> None:
    sidecar = {
        "kind": cfg.kind,
        "config_hash": cfg.config_hash,
        "seed": cfg.seed,
        "wall_time_s": round(wall_time, 3),
        "version": __version__,
        "files": files,
    }
    (out / "run.json").write_text(json.dumps(sidecar, indent=2) + "\n")


def _grid_points(cfg: ExperimentConfig):
    """Cartesian product over sweep axes; yields (index, {name: value})."""
    if not cfg.sweep:
        raise ConfigError(f"{cfg.kind} requires a non-empty sweep")
    names = [name for name, _ in cfg.sweep]
    for idx, combo in enumerate(itertools.product(*(grid for _, grid in cfg.sweep))):
        yield idx, dict(zip(names, combo))


def _point_params(cfg: ExperimentConfig, values: dict[str, float]) -> ModelParams:
    clean = {k: (int(v) if k == "p" else float(v)) for k, v in values.items()}
    return cfg.params.with_(**clean)


def _trial_seed(run_seed: int, grid_index: int, trial: int) -> int:
    ss = np.random.SeedSequence(entropy=run_seed, spawn_key=(grid_index, trial))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, float("nan")
    return mean, float(np.std(values, ddof=1) / np.sqrt(values.size))


# ---------------------------------------------------------------------------
# experiment kinds


def run_se_sweep(cfg: ExperimentConfig) -> Path:
    rows = []
    names = [name for name, _ in cfg.sweep]
    for _, values in _grid_points(cfg):
        params = _point_params(cfg, values)
        fp = se_fixed_point(params, cfg.se)
        rows.append(
            [params.alpha, params.rho, params.sigma_xi, params.lam, params.sigma_eta]
            + [fp.E_gen, fp.E_train, fp.rho_hat, fp.V, fp.Sigma, fp.stability_margin]
            + [int(fp.stable), int(fp.converged)]
        )
    header = (
        ["alpha", "rho", "sigma_xi", "lam", "sigma_eta"]
        + ["E_gen", "E_train", "rho_hat", "V", "Sigma", "stability_margin"]
        + ["stable", "converged"]
    )
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    path = out / "se_sweep.csv"
    _write_csv(path, header, rows)
    return path


def _amp_trial(params: ModelParams, seed: int, opts: AmpOptions) -> dict:
    d = generate_dataset(params, seed)
    if params.mechanism is Mechanism.OUTPUT:
        fp = run_amp(d, None, params.lam, opts)
        eta = sample_privacy_noise(params, seed + 1)
        E_gen, E_train = perturbed_errors(fp, d, eta)
    else:
        eta = sample_privacy_noise(params, seed + 1)
        fp = run_amp(d, eta, params.lam, opts)
        E_gen, E_train = fp.E_gen_estimate, fp.E_train
    return {
        "converged": fp.converged,
        "rho_hat": fp.rho_hat,
        "E_gen": E_gen,
        "E_train": E_train,
        "ratio": E_gen / E_train if E_train > 0 else float("nan"),
    }


def run_amp_mc(cfg: ExperimentConfig) -> Path:
    rows = []
    metrics = ("rho_hat", "E_gen", "E_train", "ratio")
    for grid_idx, values in _grid_points(cfg):
        params = _point_params(cfg, values)
        seeds = [_trial_seed(cfg.seed, grid_idx, t) for t in range(cfg.trials)]
        if cfg.threads > 1:
            results = Parallel(n_jobs=cfg.threads)(
                delayed(_amp_trial)(params, s, cfg.solver) for s in seeds
            )
        else:
            results = [_amp_trial(params, s, cfg.solver) for s in seeds]
        ok = [r for r in results if r["converged"]]
        fp_se = se_fixed_point(params, cfg.se)
        row = [params.alpha, params.rho, params.sigma_xi, params.lam, params.sigma_eta]
        row.append(len(ok) / len(results))
        for key in metrics:
            if ok:
                mean, stderr = _mean_stderr(np.array([r[key] for r in ok]))
            else:
                mean, stderr = float("nan"), float("nan")
            row.append(mean)
            if cfg.trials > 1:
                row.append(stderr)
        if params.mechanism is Mechanism.OUTPUT:
            row.extend(
                [fp_se.E_gen + params.sigma_eta**2, fp_se.E_train + params.sigma_eta**2]
            )
        else:
            row.extend([fp_se.E_gen, fp_se.E_train])
        row.extend([fp_se.rho_hat, fp_se.V, int(fp_se.stable)])
        rows.append(row)
    header = ["alpha", "rho", "sigma_xi", "lam", "sigma_eta", "converged_fraction"]
    for key in metrics:
        header.append(key)
        if cfg.trials > 1:
            header.append(f"{key}_stderr")
    header += ["se_E_gen", "se_E_train", "se_rho_hat", "se_V", "se_stable"]
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    path = out / "amp_mc.csv"
    _write_csv(path, header, rows)
    return path


def _bin_edges(lo: float, hi: float) -> np.ndarray:
    lo_idx = math.floor(lo / DIST_BIN_WIDTH) - 1
    hi_idx = math.ceil(hi / DIST_BIN_WIDTH) + 1
    return np.arange(lo_idx, hi_idx + 1) * DIST_BIN_WIDTH


def _se_hist_fixed_noise(
    edges: np.ndarray, mu: float, sigma_z: float, lam: float, Sigma: float
) -> tuple[np.ndarray, float]:
    """Bin masses of the pushforward of N(mu, sigma_z^2) through the
    soft threshold; returns (masses, atom at zero)."""
    thr = lam * Sigma
    atom = float(
        0.5 * erfc((mu - thr) / (_SQRT2 * sigma_z)) - 0.5 * erfc((mu + thr) / (_SQRT2 * sigma_z))
    )
    pos = edges[:-1] >= 0.0
    neg = edges[1:] <= 0.0
    # positive-branch edges shift by +thr; negative by -thr
    pos_edges = edges + thr
    neg_edges = edges - thr
    pos_cdf = 0.5 * erfc((mu - pos_edges) / (_SQRT2 * sigma_z))
    neg_cdf = 0.5 * erfc((mu - neg_edges) / (_SQRT2 * sigma_z))
    mass = np.zeros(edges.size - 1)
    mass[pos] = np.diff(pos_cdf)[pos]
    mass[neg] = np.diff(neg_cdf)[neg]
    return mass, max(atom, 0.0)


def _se_hist_fixed_data(
    edges: np.ndarray,
    b0: float,
    sigma_z: float,
    lam: float,
    Sigma: float,
    sigma_eta: float,
    gh_nodes: int = 61,
) -> tuple[np.ndarray, float]:
    """z-averaged bin masses of the closed-form noise-induced density."""
    g, wts = gauss_hermite_standard(gh_nodes)
    w = Sigma * sigma_eta
    thr = lam * Sigma
    mass = np.zeros(edges.size - 1)
    atom = 0.0
    pos = edges[:-1] >= 0.0
    neg = edges[1:] <= 0.0
    for z, wt in zip(g, wts):
        m_hat = b0 + sigma_z * z
        atom += wt * float(_atom_weight(m_hat, Sigma, lam, sigma_eta))
        pos_cdf = 0.5 * erfc((m_hat - thr - edges) / (_SQRT2 * w))
        neg_cdf = 0.5 * erfc((m_hat + thr - edges) / (_SQRT2 * w))
        mass[pos] += wt * np.diff(pos_cdf)[pos]
        mass[neg] += wt * np.diff(neg_cdf)[neg]
    return mass, atom


def _empirical_hist(samples: np.ndarray, edges: np.ndarray) -> tuple[np.ndarray, float]:
    nonzero = samples[samples != 0.0]
    atom = 1.0 - nonzero.size / samples.size
    counts, _ = np.histogram(nonzero, bins=edges)
    return counts / samples.size, atom


def run_dist_compare(cfg: ExperimentConfig) -> Path:
    extra = cfg.extra
    mode = extra.get("mode")
    if mode not in ("fixed-noise", "fixed-data"):
        raise ConfigError("dist-compare needs mode = 'fixed-noise' or 'fixed-data'")
    realizations = int(extra.get("realizations", 1000))
    probes = extra.get("probes")
    if not probes:
        raise ConfigError("dist-compare needs a non-empty probes list")
    params = cfg.params
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    fp = se_fixed_point(params, cfg.se)
    rows = []
    files = []
    for probe_idx, probe in enumerate(probes):
        if mode == "fixed-noise":
            b0, eta0 = float(probe[0]), float(probe[1])
            samples = _collect_fixed_noise(cfg, params, b0, eta0, realizations, probe_idx)
            lo, hi = float(np.min(samples)), float(np.max(samples))
            edges = _bin_edges(min(lo, -0.05), max(hi, 0.05))
            se_mass, se_atom = _se_hist_fixed_noise(
                edges, b0 - eta0 * fp.Sigma, fp.sigma_z, params.lam, fp.Sigma
            )
        else:
            b0 = float(probe if np.isscalar(probe) else probe[0])
            n_datasets = int(extra.get("n_datasets", 10))
            samples = _collect_fixed_data(cfg, params, b0, realizations, n_datasets, probe_idx)
            lo, hi = float(np.min(samples)), float(np.max(samples))
            edges = _bin_edges(min(lo, -0.05), max(hi, 0.05))
            se_mass, se_atom = _se_hist_fixed_data(
                edges, b0, fp.sigma_z, params.lam, fp.Sigma, params.sigma_eta
            )
        amp_mass, amp_atom = _empirical_hist(samples, edges)
        tv = 0.5 * (np.sum(np.abs(amp_mass - se_mass)) + abs(amp_atom - se_atom))
        hist_path = out / f"hist_probe{probe_idx}.csv"
        hist_rows = [["atom", _fmt(amp_atom), _fmt(se_atom)]]
        hist_rows += [
            [_fmt(float(left)), _fmt(float(am)), _fmt(float(sm))]
            for left, am, sm in zip(edges[:-1], amp_mass, se_mass)
        ]
        _write_csv(hist_path, ["bin_left", "amp_mass", "se_mass"], hist_rows)
        files.append(hist_path.name)
        rows.append(
            [probe_idx, b0, tv, amp_atom, se_atom, samples.size, int(samples.size < 100)]
        )
    path = out / "dist_compare.csv"
    _write_csv(
        path,
        ["probe", "beta0", "tv_distance", "amp_atom", "se_atom", "n_samples", "low_sample"],
        rows,
    )
    return path


def _collect_fixed_noise(cfg, params, b0, eta0, realizations, probe_idx) -> np.ndarray:
    """AMP estimates of a probe coordinate over dataset redraws, with the
    probe's signal and noise entries pinned."""

    def one(t: int) -> float:
        seed = _trial_seed(cfg.seed, probe_idx, t)
        d = generate_dataset(params, seed)
        beta0 = d.beta0.copy()
        beta0[0] = b0
        y = d.X @ beta0 + d.xi
        d = Dataset(
            X=d.X, y=y, beta0=beta0, xi=d.xi, sigma_xi=d.sigma_xi, seed=d.seed
        )
        eta = sample_privacy_noise(params, seed + 1).eta
        eta[0] = eta0
        fp = run_amp(d, eta, params.lam, cfg.solver)
        return fp.beta_hat[0] if fp.converged else float("nan")

    if cfg.threads > 1:
        vals = Parallel(n_jobs=cfg.threads)(delayed(one)(t) for t in range(realizations))
    else:
        vals = [one(t) for t in range(realizations)]
    vals = np.array(vals)
    return vals[np.isfinite(vals)]


def _collect_fixed_data(cfg, params, b0, realizations, n_datasets, probe_idx) -> np.ndarray:
    """AMP estimates of a probe coordinate over privacy-noise redraws,
    averaged over a few datasets."""
    per_dataset = max(realizations // max(n_datasets, 1), 1)
    samples = []
    for ds_idx in range(n_datasets):
        seed = _trial_seed(cfg.seed, probe_idx, ds_idx)
        d = generate_dataset(params, seed)
        beta0 = d.beta0.copy()
        beta0[0] = b0
        y = d.X @ beta0 + d.xi
        d = Dataset(X=d.X, y=y, beta0=beta0, xi=d.xi, sigma_xi=d.sigma_xi, seed=d.seed)

        def one(t: int) -> float:
            eta = sample_privacy_noise(params, _trial_seed(cfg.seed, 10_000 + probe_idx, ds_idx * per_dataset + t)).eta
            fp = run_amp(d, eta, params.lam, cfg.solver)
            return fp.beta_hat[0] if fp.converged else float("nan")

        if cfg.threads > 1:
            vals = Parallel(n_jobs=cfg.threads)(delayed(one)(t) for t in range(per_dataset))
        else:
            vals = [one(t) for t in range(per_dataset)]
        samples.extend(vals)
    vals = np.array(samples)
    return vals[np.isfinite(vals)]


def run_stability_map(cfg: ExperimentConfig) -> Path:
    if len(cfg.sweep) != 2:
        raise ConfigError("stability-map requires exactly two sweep axes")
    disagree_tol = float(cfg.extra.get("disagree_tol", 1e-3))
    rows = []
    for grid_idx, values in _grid_points(cfg):
        params = _point_params(cfg, values)
        fp_se = se_fixed_point(params, cfg.se)
        amp_ok = 0
        cd_disagree = 0
        for t in range(cfg.trials):
            seed = _trial_seed(cfg.seed, grid_idx, t)
            d = generate_dataset(params, seed)
            eta = sample_privacy_noise(params, seed + 1)
            fp = run_amp(d, eta, params.lam, cfg.solver)
            amp_ok += int(fp.converged)
            sol_a = solve_lasso_tilted(d, eta, params.lam, tol=1e-10, max_sweeps=20_000)
            sol_b = solve_lasso_tilted(
                d, eta, params.lam, tol=1e-10, max_sweeps=20_000, order_seed=seed
            )
            gap = float(np.max(np.abs(sol_a.beta_hat - sol_b.beta_hat)))
            cd_disagree += int(gap > disagree_tol or not (sol_a.converged and sol_b.converged))
        rows.append(
            [params.alpha, params.rho, params.sigma_xi, params.lam, params.sigma_eta]
            + [fp_se.stability_margin, int(fp_se.stable)]
            + [amp_ok / cfg.trials, int(amp_ok == cfg.trials)]
            + [cd_disagree / cfg.trials, int(cd_disagree > 0)]
        )
    header = (
        ["alpha", "rho", "sigma_xi", "lam", "sigma_eta"]
        + ["se_margin", "se_stable"]
        + ["amp_converged_fraction", "amp_all_converged"]
        + ["cd_disagree_fraction", "cd_any_disagree"]
    )
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    path = out / "stability_map.csv"
    _write_csv(path, header, rows)
    return path


def run_privacy_sweep(cfg: ExperimentConfig) -> Path:
    n_numeric = cfg.extra.get("n_numeric")
    rows = []
    for _, values in _grid_points(cfg):
        params = _point_params(cfg, values)
        report = privacy_report(params, cfg.se, n_numeric=n_numeric)
        rows.append(
            [params.alpha, params.rho, params.sigma_xi, params.lam, params.sigma_eta]
            + [params.mechanism.value, report.E_gen, report.cwonavekl_analytic]
            + [
                report.cwonavekl_numeric if report.cwonavekl_numeric is not None else float("nan"),
                report.R_factor if report.R_factor is not None else float("nan"),
                int(report.se.stable),
                report.clamp_warnings,
            ]
        )
    header = (
        ["alpha", "rho", "sigma_xi", "lam", "sigma_eta", "mechanism"]
        + ["E_gen", "cwonavekl", "cwonavekl_numeric", "R_factor", "stable", "clamp_warnings"]
    )
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    path = out / "privacy_sweep.csv"
    _write_csv(path, header, rows)
    return path


def default_sigma_grid() -> np.ndarray:
    return np.geomspace(1e-3, 10.0, 40)


def run_tradeoff(cfg: ExperimentConfig) -> Path:
    grid_spec = cfg.extra.get("sigma_grid")
    sigma_grid = np.array(_grid_from_spec(grid_spec)) if grid_spec else default_sigma_grid()
    lam_axis = dict(cfg.sweep).get("lam", [cfg.params.lam])
    rows = []
    for lam in lam_axis:
        params = cfg.params.with_(lam=float(lam))
        curve = tradeoff_curve(params, sigma_grid, cfg.se)
        best = optimal_noise(curve)
        n_unstable = sum(1 for pt in curve if not pt.stable)
        for pt in curve:
            rows.append(
                [params.alpha, params.rho, params.sigma_xi, lam, params.mechanism.value]
                + [pt.sigma_eta, pt.E_gen, pt.cwonavekl, pt.distance_to_origin]
                + [int(pt.stable), int(best is not None and pt is best), n_unstable]
            )
    header = (
        ["alpha", "rho", "sigma_xi", "lam", "mechanism"]
        + ["sigma_eta", "E_gen", "cwonavekl", "distance_to_origin"]
        + ["stable", "is_optimal", "n_unstable"]
    )
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    path = out / "tradeoff.csv"
    _write_csv(path, header, rows)
    return path


_RUNNERS = {
    "se-sweep": run_se_sweep,
    "amp-mc": run_amp_mc,
    "dist-compare": run_dist_compare,
    "privacy-sweep": run_privacy_sweep,
    "tradeoff": run_tradeoff,
    "stability-map": run_stability_map,
}


def run_experiment(cfg: ExperimentConfig) -> Path:
    start = time.time()
    runner = _RUNNERS[cfg.kind]
    result = runner(cfg)
    _write_sidecar(cfg, cfg.out_dir, time.time() - start, [result.name])
    return result

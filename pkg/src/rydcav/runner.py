"""Scenario execution and output: CSV time series, summary JSON, sweeps and oracle validation."""
from __future__ import annotations

import copy
import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import basis as b
from .config import ConfigError, Scenario, build_scenario, normalize
from .design import CavityGeometry, cavity_derived, kappa_from_finesse
from .dissipation import make_channels
from .observables import ObservableSeries, compute_series, fit_oscillation
from .oracle import double_excitation_population, oracle_generator, oracle_run, project_to_collective
from .propagate import IntegratorConfig, Trajectory, checkpoint_health, max_norm, run
from .units import to_mhz

CSV_COLUMNS = (["t_us"] + [f"P_{n}" for n in b.NAMES]
               + ["rate_per_us", "eff_cum", "re_mu12", "im_mu12", "ln_g2",
                  "S_total", "S_atoms", "S_photons", "araki_lieb_ok"])


@dataclass
class RunResult:
    scenario: Scenario
    trajectory: Trajectory
    channels: list
    series: ObservableSeries
    summary: dict


def leakage_proxy(populations) -> np.ndarray:
    """P(RR,0) + P(EE,0) + P(ER,0): weight on doubly excited atomic states."""
    return populations[..., b.RR0] + populations[..., b.EE0] + populations[..., b.ER0]


def default_fit_window(scenario: Scenario):
    """After the last Omega pulse has passed (10 widths), to the end of the run."""
    if scenario.fit_window:
        return scenario.fit_window
    om = scenario.schedule.omega
    start = max((p.t0 + 10 * p.tau for p in om), default=scenario.t_span[0])
    return (start, scenario.t_span[1])


def summarize(scenario: Scenario, traj: Trajectory, series: ObservableSeries) -> dict:
    lo, hi = default_fit_window(scenario)
    w = fit_oscillation(series.times, series.populations[:, b.G1], lo, hi)
    health = checkpoint_health(traj)
    pops = series.populations[-1]
    return {
        "name": scenario.name,
        "n_atoms": scenario.params.n_atoms,
        "t_span_us": list(scenario.t_span),
        "efficiency": series.efficiency,
        "fitted_rabi_2pi_mhz": None if math.isnan(w) else to_mhz(w),
        "fit_window_us": [lo, hi],
        "max_leakage_proxy": float(np.max(leakage_proxy(series.populations))),
        "final_populations": {n: float(pops[i]) for i, n in enumerate(b.NAMES)},
        "araki_lieb_ok": bool(np.all(series.araki_lieb_ok)),
        "health": health.as_dict(),
    }


def run_scenario(cfg_or_scenario) -> RunResult:
    sc = cfg_or_scenario if isinstance(cfg_or_scenario, Scenario) else build_scenario(cfg_or_scenario)
    traj = run(sc.params, sc.schedule, sc.integrator, sc.rho0(), sc.t_span)
    channels = make_channels(sc.params)
    series = compute_series(traj, channels, sc.params.n_atoms)
    return RunResult(sc, traj, channels, series, summarize(sc, traj, series))


def _fmt(x) -> str:
    # repr of a Python float is the shortest string that round-trips exactly
    return repr(float(x))


def series_rows(series: ObservableSeries):
    mu = series.dipole_corr
    for i, t in enumerate(series.times):
        yield ([_fmt(t)] + [_fmt(p) for p in series.populations[i]]
               + [_fmt(series.photon_rate[i]), _fmt(series.cumulative_efficiency[i]),
                  _fmt(np.real(mu[i])), _fmt(np.imag(mu[i])), _fmt(series.log_g2[i]),
                  _fmt(series.entropy_total[i]), _fmt(series.entropy_atoms[i]),
                  _fmt(series.entropy_photons[i]), "true" if series.araki_lieb_ok[i] else "false"])


def write_csv(path, series: ObservableSeries):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(series_rows(series))


def read_csv(path) -> dict:
    """Columns of a CSV written by :func:`write_csv` as float arrays (booleans as 0/1)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], rows[1:]
    out = {}
    for j, name in enumerate(head):
        col = [r[j] for r in body]
        if name == "araki_lieb_ok":
            out[name] = np.array([c == "true" for c in col])
        else:
            out[name] = np.array([float(c) for c in col])
    return out


def write_outputs(result: RunResult, out_dir, plot=False) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = result.scenario.name
    paths = {"csv": out / f"{stem}.csv", "summary": out / f"{stem}.summary.json",
             "config": out / f"{stem}.config.json"}
    write_csv(paths["csv"], result.series)
    paths["summary"].write_text(json.dumps(result.summary, indent=2, allow_nan=True))
    paths["config"].write_text(json.dumps(result.scenario.config, indent=2))
    if plot:
        from .plotting import plot_series
        paths["plot"] = out / f"{stem}.png"
        plot_series(result.series, paths["plot"], title=stem)
    return paths


# ---------------------------------------------------------------------------
# sweeps

SWEEP_AXES = ("cooperativity", "L_c", "N")


def _point_configs(sweep_cfg: dict):
    if not isinstance(sweep_cfg, dict):
        raise ConfigError("", "sweep config must be an object")
    for k in sweep_cfg:
        if k not in ("name", "base", "sweep"):
            raise ConfigError(k, "unknown key")
    base = sweep_cfg.get("base")
    if isinstance(base, dict) and set(base) == {"preset"}:
        from .presets import by_name
        try:
            base = by_name(base["preset"])
        except KeyError as exc:
            raise ConfigError("base.preset", str(exc)) from None
    if not isinstance(base, dict):
        raise ConfigError("base", "expected a scenario config or {\"preset\": name}")
    base = normalize(base)
    sw = sweep_cfg.get("sweep")
    if not isinstance(sw, dict):
        raise ConfigError("sweep", "expected an object")
    for k in sw:
        if k not in ("axis", "values", "workers", "geometry", "kappa"):
            raise ConfigError(f"sweep.{k}", "unknown key")
    axis = sw.get("axis")
    if axis not in SWEEP_AXES:
        raise ConfigError("sweep.axis", f"must be one of {list(SWEEP_AXES)}")
    values = sw.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values", "expected a non-empty list")
    sysd = base["system"]
    rows, cfgs = [], []
    for i, v in enumerate(values):
        path = f"sweep.values[{i}]"
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(path, "expected a finite number")
        cfg = copy.deepcopy(base)
        s = cfg["system"]
        length = math.nan
        if axis == "N":
            if int(v) != v or v < 1:
                raise ConfigError(path, "atom number must be a positive integer")
            s["n_atoms"] = int(v)
        elif axis == "cooperativity":
            if v <= 0:
                raise ConfigError(path, "cooperativity must be positive")
            if sysd["gamma_perp_2pi_mhz"] <= 0 or sysd["g_2pi_mhz"] == 0:
                raise ConfigError("base.system", "the cooperativity axis needs g != 0 and gamma_perp > 0")
            # kappa is varied at fixed g: C = g^2 / (2 kappa Gamma_perp)
            s["kappa_2pi_mhz"] = sysd["g_2pi_mhz"] ** 2 / (2.0 * v * sysd["gamma_perp_2pi_mhz"])
        else:
            if v <= 0:
                raise ConfigError(path, "cavity length must be positive (um)")
            geo = dict(sw.get("geometry") or {})
            try:
                cg = CavityGeometry(v * 1e-6, geo.get("radius_mm", 25.0) * 1e-3,
                                    geo.get("wavelength_nm", 780.0) * 1e-9,
                                    geo.get("r1", 0.999985), geo.get("r2", 0.99985))
            except ValueError as exc:
                raise ConfigError(path, str(exc)) from None
            s["g_2pi_mhz"] = to_mhz(cavity_derived(cg).g)
            if sw.get("kappa", "finesse") == "finesse":
                s["kappa_2pi_mhz"] = to_mhz(kappa_from_finesse(cg))
            length = v
        cfg["name"] = f"{sweep_cfg.get('name', base['name'])}-{i:03d}"
        cfgs.append(cfg)
        gp = s["gamma_perp_2pi_mhz"]
        c = s["g_2pi_mhz"] ** 2 / (2 * s["kappa_2pi_mhz"] * gp) if gp > 0 and s["kappa_2pi_mhz"] > 0 else math.nan
        rows.append({"index": i, "axis": axis, "value": float(v), "C": c, "L_c_um": length,
                     "N": s["n_atoms"], "g_2pi_mhz": s["g_2pi_mhz"], "kappa_2pi_mhz": s["kappa_2pi_mhz"]})
    workers = sw.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError("sweep.workers", "must be a positive integer")
    return rows, cfgs, workers


def _sweep_point(cfg):
    res = run_scenario(cfg)
    return res.series.efficiency, res.summary["health"]["ok"]


def run_sweep(sweep_cfg: dict, workers: int | None = None):
    """One row per sweep point, in input order regardless of completion order."""
    rows, cfgs, w = _point_configs(sweep_cfg)
    for c in cfgs:
        build_scenario(c)  # validate every point before any work starts
    w = workers or w
    if w > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=w) as ex:
            results = list(ex.map(_sweep_point, cfgs))
    else:
        results = [_sweep_point(c) for c in cfgs]
    for r, (eff, ok) in zip(rows, results):
        r["efficiency"] = eff
        r["health_ok"] = ok
    return rows


SWEEP_COLUMNS = ["index", "axis", "value", "C", "L_c_um", "N", "g_2pi_mhz", "kappa_2pi_mhz",
                 "efficiency", "health_ok"]


def write_sweep_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([_fmt(r[k]) if isinstance(r[k], float) else str(r[k]).lower()
                        if isinstance(r[k], bool) else str(r[k]) for k in SWEEP_COLUMNS])


# ---------------------------------------------------------------------------
# oracle validation


def validation_config(n: int, t_end=1.2) -> dict:
    """fig2 scenario with kappa as the only loss, where the two models must agree exactly."""
    from .presets import fig2
    cfg = fig2(n)
    cfg["name"] = f"validate-n{n}"
    cfg["system"]["gamma_r_2pi_khz"] = 0.0
    cfg["system"]["gamma_perp_2pi_mhz"] = 0.0
    cfg["time"]["t_end_us"] = t_end
    cfg["fit_window_us"] = [0.56, t_end]
    return cfg


def oracle_integrator(sc: Scenario) -> IntegratorConfig:
    """The scenario's integrator with dt divided by the smallest integer k that satisfies the step
    bound in the larger product space; the stride grows by k so samples land on the same times."""
    ic = sc.integrator
    gen = oracle_generator(sc.params, sc.schedule)
    k = max(1, math.ceil(ic.dt * max_norm(gen, sc.t_span) / ic.max_phase))
    return IntegratorConfig(ic.dt / k, ic.stride * k, ic.method, ic.max_phase)


def validate(n: int, cfg: dict | None = None) -> dict:
    """Paired collective / product-space runs with a comparison report."""
    sc = build_scenario(cfg or validation_config(n))
    if not 1 <= sc.params.n_atoms <= 3:
        raise ConfigError("system.n_atoms", "validation needs 1 <= n_atoms <= 3")
    coll = run(sc.params, sc.schedule, sc.integrator, sc.rho0(), sc.t_span)
    orc = oracle_run(sc.params, sc.schedule, oracle_integrator(sc), sc.t_span)
    proj, leak = project_to_collective(orc.states, sc.params.n_atoms)
    pc = np.real(np.diagonal(coll.states, axis1=1, axis2=2))
    po = np.real(np.diagonal(proj, axis1=1, axis2=2))
    lo, hi = default_fit_window(sc)
    f_c = fit_oscillation(coll.times, pc[:, b.G1], lo, hi)
    f_o = fit_oscillation(orc.times, po[:, b.G1], lo, hi)
    return {
        "n_atoms": sc.params.n_atoms,
        "max_population_deviation": float(np.max(np.abs(pc - po))),
        "max_leakage": float(np.max(leak)),
        "max_double_excitation_oracle": float(np.max(double_excitation_population(orc.states, sc.params.n_atoms))),
        "fitted_rabi_2pi_mhz": {"collective": float(to_mhz(f_c)), "oracle": float(to_mhz(f_o))},
        "collective_health": checkpoint_health(coll).as_dict(),
        "oracle_health": checkpoint_health(orc).as_dict(),
    }

"""JSON scenario configs: validation with field paths, defaults, and conversion to runtime objects.

Frequencies are given in units of 2 pi MHz (``*_2pi_mhz``) or 2 pi kHz (``*_2pi_khz`` and the
``dephasing`` block), times in microseconds.  ``normalize`` returns a config with every default
filled in; it is what gets written next to a run's output and it reproduces the run exactly.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass

import numpy as np

from .drive import ChirpSchedule, PulseSchedule, SechPulse, SingularDenominatorError, solve_pi_amplitude
from .model import ConfigurationError, SystemParams
from .propagate import IntegratorConfig
from .units import khz, mhz
from . import basis as b


class ConfigError(ConfigurationError):
    """Invalid scenario config; ``path`` names the offending field (e.g. ``pulses.omega[0].tau_us``)."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


SYSTEM_DEFAULTS = {
    "n_atoms": 1,
    "g_2pi_mhz": 0.0,
    "kappa_2pi_mhz": 0.0,
    "gamma_r_2pi_khz": 0.0,
    "gamma_perp_2pi_mhz": 0.0,
    "gamma_0_2pi_mhz": 6.0,
    "delta_c_2pi_mhz": 0.0,
    "delta_s_2pi_mhz": 110.0,
    "delta_r_2pi_mhz": 0.0,
    "coupling_mode": "coherent",
    "gamma_p_2pi_mhz": 0.0,
    "lindblad_form": "sum",
    "ladder_convention": "literal",
    "gamma_s_2pi_mhz": 6.0,
}
DEPHASING_DEFAULTS = {"gamma_r_khz": 0.0, "gamma_rr_khz": 0.0}
CHIRP_DEFAULTS = {"shape": "constant", "start_2pi_mhz": 0.0, "end_2pi_mhz": None, "t_c_us": 0.0,
                  "w_us": 1.0, "peak_2pi_mhz": None, "t_c2_us": None}
INTEGRATOR_DEFAULTS = {"dt_us": 1e-4, "stride": 10, "method": "rk4", "max_phase": 0.1}
TIME_DEFAULTS = {"t_start_us": 0.0, "t_end_us": 1.0, "photon_lifetimes": None}
PULSE_KEYS = {"amplitude_2pi_mhz", "area_rad", "t0_us", "tau_us", "stage"}
TOP_KEYS = {"name", "description", "system", "dephasing", "pulses", "chirp", "integrator", "time",
            "initial_state", "fit_window_us"}


def _check_keys(d, allowed, path):
    if not isinstance(d, dict):
        raise ConfigError(path, "expected an object")
    for k in d:
        if k not in allowed:
            raise ConfigError(f"{path}.{k}" if path else k, "unknown key")


def _number(d, key, path, allow_none=False, minimum=None, positive=False, integer=False):
    v = d.get(key)
    p = f"{path}.{key}"
    if v is None:
        if allow_none:
            return None
        raise ConfigError(p, "value required")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(p, f"expected a number, got {type(v).__name__}")
    if not math.isfinite(v):
        raise ConfigError(p, "must be finite")
    if integer and int(v) != v:
        raise ConfigError(p, "expected an integer")
    if positive and v <= 0:
        raise ConfigError(p, "must be positive")
    if minimum is not None and v < minimum:
        raise ConfigError(p, f"must be >= {minimum}")
    return int(v) if integer else float(v)


def _choice(d, key, path, options):
    v = d.get(key)
    if v not in options:
        raise ConfigError(f"{path}.{key}", f"must be one of {list(options)}")
    return v


def _section(cfg, key, defaults):
    raw = cfg.get(key, {})
    _check_keys(raw, set(defaults), key)
    out = dict(defaults)
    out.update(raw)
    return out


def _pulse_list(raw, path):
    if raw is None:
        return []
    items = [raw] if isinstance(raw, dict) else raw
    if not isinstance(items, list):
        raise ConfigError(path, "expected a pulse object or a list of them")
    out = []
    for i, p in enumerate(items):
        pp = f"{path}[{i}]"
        _check_keys(p, PULSE_KEYS, pp)
        has_amp, has_area = "amplitude_2pi_mhz" in p, "area_rad" in p
        if has_amp == has_area:
            raise ConfigError(pp, "give exactly one of amplitude_2pi_mhz or area_rad")
        q = dict(p)
        _number(q, "t0_us", pp)
        _number(q, "tau_us", pp, positive=True)
        if has_amp:
            _number(q, "amplitude_2pi_mhz", pp, minimum=0.0)
        else:
            _number(q, "area_rad", pp, positive=True)
        if "stage" in q and q["stage"] not in (1, 2):
            raise ConfigError(f"{pp}.stage", "must be 1 or 2")
        out.append(q)
    return out


def normalize(cfg: dict) -> dict:
    """Validate ``cfg`` and return a deep copy with all defaults filled in."""
    if not isinstance(cfg, dict):
        raise ConfigError("", "config must be a JSON object")
    _check_keys(cfg, TOP_KEYS, "")
    out = {"name": str(cfg.get("name", "custom"))}
    if "description" in cfg:
        out["description"] = str(cfg["description"])

    sysd = _section(cfg, "system", SYSTEM_DEFAULTS)
    _number(sysd, "n_atoms", "system", integer=True, minimum=1)
    sysd["n_atoms"] = int(sysd["n_atoms"])
    for k in ("g_2pi_mhz", "delta_c_2pi_mhz", "delta_r_2pi_mhz"):
        _number(sysd, k, "system")
    for k in ("kappa_2pi_mhz", "gamma_r_2pi_khz", "gamma_perp_2pi_mhz", "gamma_0_2pi_mhz",
              "gamma_p_2pi_mhz", "gamma_s_2pi_mhz"):
        _number(sysd, k, "system", minimum=0.0)
    if _number(sysd, "delta_s_2pi_mhz", "system") == 0:
        raise ConfigError("system.delta_s_2pi_mhz", "must be non-zero")
    _choice(sysd, "coupling_mode", "system", ("coherent", "purcell"))
    _choice(sysd, "lindblad_form", "system", ("sum", "split"))
    _choice(sysd, "ladder_convention", "system", ("literal", "bosonic"))
    if sysd["coupling_mode"] == "purcell" and sysd["g_2pi_mhz"] != 0:
        raise ConfigError("system.g_2pi_mhz", "purcell mode replaces the coherent coupling; set g to 0")
    out["system"] = sysd

    deph = _section(cfg, "dephasing", DEPHASING_DEFAULTS)
    for k in DEPHASING_DEFAULTS:
        _number(deph, k, "dephasing", minimum=0.0)
    out["dephasing"] = deph

    pulses = cfg.get("pulses", {})
    _check_keys(pulses, {"mode", "style", "s", "p1", "p2", "omega"}, "pulses")
    pn = {"mode": pulses.get("mode", "effective"), "style": pulses.get("style", "simultaneous")}
    _choice(pn, "mode", "pulses", ("effective", "raw"))
    _choice(pn, "style", "pulses", ("simultaneous", "stirap"))
    for k in ("s", "p1", "p2", "omega"):
        pn[k] = _pulse_list(pulses.get(k), f"pulses.{k}")
    if pn["mode"] == "raw":
        if pn["s"]:
            raise ConfigError("pulses.s", "raw mode takes p1/p2 envelopes")
        for k in ("p1", "p2"):
            for i, p in enumerate(pn[k]):
                if "area_rad" in p:
                    raise ConfigError(f"pulses.{k}[{i}].area_rad",
                                      "areas are only supported for effective S pulses; give amplitude_2pi_mhz")
    elif pn["p1"] or pn["p2"]:
        raise ConfigError("pulses.p1", "effective mode takes s pulses; set pulses.mode to raw")
    out["pulses"] = pn

    ch = _section(cfg, "chirp", CHIRP_DEFAULTS)
    _choice(ch, "shape", "chirp", ("constant", "tanh-ramp", "tanh-return"))
    _number(ch, "start_2pi_mhz", "chirp")
    _number(ch, "t_c_us", "chirp")
    _number(ch, "w_us", "chirp", positive=True)
    if ch["shape"] != "constant":
        _number(ch, "end_2pi_mhz", "chirp")
    if ch["shape"] == "tanh-return":
        _number(ch, "peak_2pi_mhz", "chirp")
        if _number(ch, "t_c2_us", "chirp") <= ch["t_c_us"]:
            raise ConfigError("chirp.t_c2_us", "must come after t_c_us")
    out["chirp"] = ch

    integ = _section(cfg, "integrator", INTEGRATOR_DEFAULTS)
    _number(integ, "dt_us", "integrator", positive=True)
    integ["stride"] = _number(integ, "stride", "integrator", integer=True, minimum=1)
    _number(integ, "max_phase", "integrator", positive=True)
    _choice(integ, "method", "integrator", ("rk4",))
    out["integrator"] = integ

    tm = _section(cfg, "time", TIME_DEFAULTS)
    _number(tm, "t_start_us", "time")
    if _number(tm, "t_end_us", "time") <= tm["t_start_us"]:
        raise ConfigError("time.t_end_us", "must be after t_start_us")
    _number(tm, "photon_lifetimes", "time", allow_none=True, positive=True)
    out["time"] = tm

    init = cfg.get("initial_state", "G0")
    if init not in b.NAMES:
        raise ConfigError("initial_state", f"must be one of {list(b.NAMES)}")
    out["initial_state"] = init

    if "fit_window_us" in cfg:
        fw = cfg["fit_window_us"]
        if not (isinstance(fw, list) and len(fw) == 2 and all(isinstance(x, (int, float)) for x in fw)):
            raise ConfigError("fit_window_us", "expected [t_min, t_max]")
        out["fit_window_us"] = [float(fw[0]), float(fw[1])]
    return copy.deepcopy(out)


# ---------------------------------------------------------------------------
# conversion to runtime objects


@dataclass(frozen=True)
class Scenario:
    name: str
    params: SystemParams
    schedule: PulseSchedule
    integrator: IntegratorConfig
    t_span: tuple
    initial_state: str
    fit_window: tuple | None
    config: dict  # normalized source config

    def rho0(self):
        return b.projector(self.initial_state)


def system_params(sysd: dict, deph: dict | None = None) -> SystemParams:
    deph = deph or DEPHASING_DEFAULTS
    # the dephasing block is in kHz of angular frequency (2 pi x kHz), like every other rate
    return SystemParams(
        n_atoms=sysd["n_atoms"],
        g=mhz(sysd["g_2pi_mhz"]),
        kappa=mhz(sysd["kappa_2pi_mhz"]),
        gamma_r=khz(sysd["gamma_r_2pi_khz"]),
        gamma_perp=mhz(sysd["gamma_perp_2pi_mhz"]),
        gamma_0=mhz(sysd["gamma_0_2pi_mhz"]),
        delta_c=mhz(sysd["delta_c_2pi_mhz"]),
        delta_s=mhz(sysd["delta_s_2pi_mhz"]),
        delta_r=mhz(sysd["delta_r_2pi_mhz"]),
        gamma_deph_r=khz(deph["gamma_r_khz"]),
        gamma_deph_rr=khz(deph["gamma_rr_khz"]),
        coupling_mode=sysd["coupling_mode"],
        gamma_p=mhz(sysd["gamma_p_2pi_mhz"]),
        lindblad_form=sysd["lindblad_form"],
        ladder=sysd["ladder_convention"],
        gamma_s=mhz(sysd["gamma_s_2pi_mhz"]),
    )


def _chirp(ch: dict) -> ChirpSchedule:
    def opt(k):
        return None if ch[k] is None else mhz(ch[k])

    if ch["shape"] == "constant":
        return ChirpSchedule(mhz(ch["start_2pi_mhz"]))
    return ChirpSchedule(mhz(ch["start_2pi_mhz"]), opt("end_2pi_mhz"), ch["t_c_us"], ch["w_us"],
                         ch["shape"], opt("peak_2pi_mhz"), ch["t_c2_us"])


def _s_pulse(p, path, params, chirp):
    if "amplitude_2pi_mhz" in p:
        return SechPulse(mhz(p["amplitude_2pi_mhz"]), p["t0_us"], p["tau_us"])
    stage = p.get("stage", 1)
    ratio = float(chirp(p["t0_us"])) / params.delta_s
    try:
        amp = solve_pi_amplitude(p["tau_us"], p["area_rad"], params.n_atoms, stage, ratio)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    return SechPulse(amp, p["t0_us"], p["tau_us"])


def _plain_pulse(p):
    if "amplitude_2pi_mhz" in p:
        return SechPulse(mhz(p["amplitude_2pi_mhz"]), p["t0_us"], p["tau_us"])
    # Omega enters H as Omega/2, so its Rabi area is amplitude * tau * pi
    return SechPulse(p["area_rad"] / (p["tau_us"] * math.pi), p["t0_us"], p["tau_us"])


def t_end_of(cfg: dict, params: SystemParams, schedule: PulseSchedule) -> float:
    """Configured end time, extended to ``photon_lifetimes`` / (2 kappa) after the last pulse."""
    tm = cfg["time"]
    t_end = tm["t_end_us"]
    if tm["photon_lifetimes"] is not None and params.kappa > 0:
        centres = schedule.pulse_centres() or [tm["t_start_us"]]
        t_end = max(t_end, max(centres) + tm["photon_lifetimes"] / (2.0 * params.kappa))
    return t_end


def build_scenario(cfg: dict) -> Scenario:
    cfg = normalize(cfg)
    try:
        params = system_params(cfg["system"], cfg["dephasing"])
        chirp = _chirp(cfg["chirp"])
    except (ValueError, ConfigurationError) as exc:
        raise ConfigError("system", str(exc)) from None
    pn = cfg["pulses"]
    s = tuple(_s_pulse(p, f"pulses.s[{i}]", params, chirp) for i, p in enumerate(pn["s"]))
    p1 = tuple(_plain_pulse(p) for p in pn["p1"])
    p2 = tuple(_plain_pulse(p) for p in pn["p2"])
    om = tuple(_plain_pulse(p) for p in pn["omega"])
    try:
        schedule = PulseSchedule(chirp, pn["mode"], p1, p2, s, om, pn["style"])
    except ValueError as exc:
        raise ConfigError("pulses", str(exc)) from None
    ic = cfg["integrator"]
    integ = IntegratorConfig(ic["dt_us"], ic["stride"], ic["method"], ic["max_phase"])
    t0 = cfg["time"]["t_start_us"]
    t_span = (t0, t_end_of(cfg, params, schedule))
    if params.n_atoms >= 2:
        # fail early rather than mid-run when a chirp crosses Delta = -2 Delta_s
        ts = np.linspace(*t_span, 4001)
        try:
            schedule.rabi_at(ts, params.delta_s, params.n_atoms)
        except SingularDenominatorError as exc:
            raise ConfigError("chirp", str(exc)) from None
    fw = tuple(cfg["fit_window_us"]) if "fit_window_us" in cfg else None
    return Scenario(cfg["name"], params, schedule, integ, t_span, cfg["initial_state"], fw, cfg)

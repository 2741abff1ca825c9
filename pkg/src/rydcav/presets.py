"""Named scenario presets.

Every preset is a plain config dict (see :mod:`rydcav.config`).  The rates are fixed per scenario
family; pulse timings, widths and run lengths are our own choices, listed here:

* single excitation (fig2-fig7): S pi pulse (tau 0.05 us) centred at 0.25 us, then the Omega
  pulse.  fig2-fig4 use a short Omega pi pulse (tau 5 ns at 0.5 us); fig5 and fig7 use a longer
  2 pi x 50 MHz pulse (tau 20 ns at 0.53 us) that leaves the S pulse fully off first.
* two excitations (fig9-fig12): stage-1 S pulse at 30 ns resonant at Delta = -2 pi x 110 MHz,
  chirp to Delta = 0 where R -> RR is resonant, stage-2 S pulse, then chirp to
  Delta = -2 pi x 55 MHz where |RR,0> is degenerate with the emission manifold, with the Omega
  pulse centred on that second ramp.  All stage widths are tau = 5 ns.
"""
from __future__ import annotations

import copy
import math

from .design import CavityGeometry, cavity_derived
from .units import to_mhz

PI = math.pi
G_FIG2 = 14.0  # kappa = 1.4 = 0.1 g
G_STRONG = 50.0
KAPPA = {"weak": 72.6, "strong": 8.0}  # 1.45 g and 0.15 g for g = 2 pi x 50 MHz
GAMMA_PERP = 3.0  # Gamma_0 / 2
FIG3_KAPPA = {"strong": 1.4, "medium": 2.85, "weak": 4.3}
FIG3_DETUNING = {"resonant": 0.0, "detuned": 4.3}

# two-excitation protocol timing
TAU2 = 0.005
T1 = 0.03
T2 = T1 + 8 * TAU2
T3 = T2 + 4 * TAU2

# fig6: long cavity with R_c = 10 cm
FIG6_LENGTH = 2e-3
FIG6_RADIUS = 0.1
FIG6_C = (0.1, 0.2, 0.4, 0.8, 1.3, 2.6, 5.0)


def _system(**kw):
    base = {
        "n_atoms": 1,
        "g_2pi_mhz": G_FIG2,
        "kappa_2pi_mhz": 1.4,
        "gamma_r_2pi_khz": 1.4,
        "gamma_perp_2pi_mhz": 0.0,
        "gamma_0_2pi_mhz": 6.0,
        "delta_c_2pi_mhz": 0.0,
        "delta_s_2pi_mhz": 110.0,
        "delta_r_2pi_mhz": 220.0,
    }
    base.update(kw)
    return base


def _single(name, system, omega, t_end, dt=1e-4, fit_window=None, description=""):
    cfg = {
        "name": name,
        "description": description,
        "system": system,
        "pulses": {"mode": "effective",
                   "s": [{"area_rad": PI, "t0_us": 0.25, "tau_us": 0.05, "stage": 1}],
                   "omega": [omega]},
        "chirp": {"shape": "constant", "start_2pi_mhz": -110.0},
        "integrator": {"dt_us": dt, "stride": 10},
        "time": {"t_start_us": 0.0, "t_end_us": t_end},
        "initial_state": "G0",
    }
    if fit_window:
        cfg["fit_window_us"] = list(fit_window)
    return cfg


FAST_OMEGA = {"area_rad": PI, "t0_us": 0.5, "tau_us": 0.005}
SLOW_OMEGA = {"amplitude_2pi_mhz": 50.0, "t0_us": 0.53, "tau_us": 0.02}


def fig2(n=1):
    return _single(f"fig2-n{n}", _system(n_atoms=n), FAST_OMEGA, 2.0, fit_window=(0.56, 2.0),
                   description="vacuum Rabi oscillation E0 <-> G1, kappa = 0.1 g, no transverse decay")


def fig3(kappa="strong", detuning="resonant", n=1):
    sysd = _system(n_atoms=n, kappa_2pi_mhz=FIG3_KAPPA[kappa], delta_c_2pi_mhz=FIG3_DETUNING[detuning])
    return _single(f"fig3-{kappa}-{detuning}-n{n}", sysd, FAST_OMEGA, 2.0, fit_window=(0.56, 2.0),
                   description="kappa in {0.1, 0.2, 0.3} g and Delta_c in {0, 0.3 g}")


def fig4(n=1):
    return _single(f"fig4-n{n}", _system(n_atoms=n, gamma_perp_2pi_mhz=GAMMA_PERP), FAST_OMEGA, 2.0,
                   fit_window=(0.56, 2.0), description="photon emission rate with Gamma_perp = Gamma_0/2")


def purcell_rate(g_2pi_mhz, kappa_2pi_mhz):
    """Gamma_p (2 pi MHz) matching the adiabatically eliminated cavity: g^2 / (4 kappa).

    With H elements g/2 and amplitude decay kappa, |E> loses population into the cavity at
    g^2 / (2 kappa); a Lindblad rate Gamma_p gives a population rate 2 Gamma_p.
    """
    return g_2pi_mhz**2 / (4.0 * kappa_2pi_mhz)


def fig5(coupling="full", n=1):
    k = KAPPA["weak"]
    if coupling == "purcell":
        sysd = _system(n_atoms=n, g_2pi_mhz=0.0, kappa_2pi_mhz=k, gamma_perp_2pi_mhz=GAMMA_PERP,
                       coupling_mode="purcell", gamma_p_2pi_mhz=purcell_rate(G_STRONG, k))
    elif coupling == "full":
        sysd = _system(n_atoms=n, g_2pi_mhz=G_STRONG, kappa_2pi_mhz=k, gamma_perp_2pi_mhz=GAMMA_PERP)
    else:
        raise KeyError(f"fig5 coupling must be 'purcell' or 'full', not {coupling!r}")
    return _single(f"fig5-{coupling}-n{n}", sysd, SLOW_OMEGA, 1.5,
                   description="Purcell-regime incoherent emission vs the full coherent model")


def fig7(kappa_mode="weak", n=1):
    sysd = _system(n_atoms=n, g_2pi_mhz=G_STRONG, kappa_2pi_mhz=KAPPA[kappa_mode],
                   gamma_perp_2pi_mhz=GAMMA_PERP)
    return _single(f"fig7-{kappa_mode}-n{n}", sysd, SLOW_OMEGA, 1.5,
                   description="weak (kappa = 1.45 g) and strong (kappa = 0.15 g) coupling")


def fig6_geometry():
    return CavityGeometry(FIG6_LENGTH, FIG6_RADIUS)


def fig6(n=1, cooperativity=1.3):
    """One point of the long-cavity cooperativity sweep; kappa = g^2 / (2 C Gamma_perp)."""
    g = to_mhz(cavity_derived(fig6_geometry()).g)
    kappa = g**2 / (2.0 * cooperativity * GAMMA_PERP)
    sysd = _system(n_atoms=n, g_2pi_mhz=g, kappa_2pi_mhz=kappa, gamma_perp_2pi_mhz=GAMMA_PERP,
                   lindblad_form="split")
    cfg = _single(f"fig6-n{n}", sysd, FAST_OMEGA, 1.0, dt=2.5e-4,
                  description="long cavity (L_c = 2 mm, R_c = 10 cm), split loss channels")
    cfg["integrator"]["stride"] = 20
    cfg["time"]["photon_lifetimes"] = 15.0
    return cfg


def _two_excitation(name, n, kappa_mode, gamma_perp=GAMMA_PERP, dephasing_khz=0.0):
    sysd = _system(n_atoms=n, g_2pi_mhz=G_STRONG, kappa_2pi_mhz=KAPPA[kappa_mode],
                   gamma_perp_2pi_mhz=gamma_perp)
    cfg = {
        "name": name,
        "description": "two Rydberg excitations via a detuning chirp, then two-photon emission",
        "system": sysd,
        "dephasing": {"gamma_r_khz": dephasing_khz, "gamma_rr_khz": dephasing_khz},
        "pulses": {"mode": "effective",
                   "s": [{"area_rad": PI, "t0_us": T1, "tau_us": TAU2, "stage": 1},
                         {"area_rad": PI, "t0_us": T2, "tau_us": TAU2, "stage": 2}],
                   "omega": [{"amplitude_2pi_mhz": 100.0, "t0_us": T3, "tau_us": 0.002}]},
        "chirp": {"shape": "tanh-return", "start_2pi_mhz": -110.0, "peak_2pi_mhz": 0.0,
                  "end_2pi_mhz": -55.0, "t_c_us": T1 + 4 * TAU2, "t_c2_us": T2 + 4 * TAU2,
                  "w_us": TAU2 / 2},
        "integrator": {"dt_us": 5e-5, "stride": 10},
        "time": {"t_start_us": 0.0, "t_end_us": T3 + 0.4},
        "initial_state": "G0",
    }
    return cfg


def fig9(kappa_mode="weak", dephasing_khz=0.0):
    suffix = f"-deph{dephasing_khz:g}" if dephasing_khz else ""
    return _two_excitation(f"fig9-{kappa_mode}{suffix}", 2, kappa_mode, dephasing_khz=dephasing_khz)


def fig10(kappa_mode="weak"):
    return _two_excitation(f"fig10-{kappa_mode}", 3, kappa_mode)


def fig11(kappa_mode="weak"):
    return _two_excitation(f"fig11-{kappa_mode}", 2, kappa_mode)


def fig12(kappa_mode="weak", spontaneous=True):
    tag = "" if spontaneous else "-nodecay"
    return _two_excitation(f"fig12-{kappa_mode}{tag}", 2, kappa_mode,
                           gamma_perp=GAMMA_PERP if spontaneous else 0.0)


# ---------------------------------------------------------------------------
# registry

_FACTORIES = {
    "fig2": (fig2, {"n": (1, 2, 3)}),
    "fig3": (fig3, {"kappa": tuple(FIG3_KAPPA), "detuning": tuple(FIG3_DETUNING)}),
    "fig4": (fig4, {"n": (1, 2, 3)}),
    "fig5": (fig5, {"coupling": ("purcell", "full"), "n": (1, 2, 3)}),
    "fig6": (fig6, {}),
    "fig7": (fig7, {"kappa_mode": ("weak", "strong"), "n": (1, 2, 3)}),
    "fig9": (fig9, {"kappa_mode": ("weak", "strong")}),
    "fig10": (fig10, {"kappa_mode": ("weak", "strong")}),
    "fig11": (fig11, {"kappa_mode": ("weak", "strong")}),
    "fig12": (fig12, {"kappa_mode": ("weak", "strong"), "spontaneous": (True, False)}),
}


def preset_families():
    return list(_FACTORIES)


def preset(name: str, **options) -> dict:
    """Config for preset family ``name``; ``options`` select the variant (unknown ones are rejected)."""
    if name not in _FACTORIES:
        raise KeyError(f"unknown preset {name!r}; choose from {preset_families()}")
    fn, axes = _FACTORIES[name]
    kw = {k: v for k, v in options.items() if v is not None}
    allowed = set(axes) | ({"cooperativity", "n"} if name == "fig6" else set())
    if name in ("fig9",):
        allowed.add("dephasing_khz")
    for k, v in kw.items():
        if k not in allowed:
            raise KeyError(f"preset {name} has no option {k!r}")
        if k in axes and v not in axes[k]:
            raise KeyError(f"preset {name}: {k} must be one of {list(axes[k])}")
    return copy.deepcopy(fn(**kw))


def presets():
    """Every concrete preset as (name, config), in a fixed order."""
    out = []
    for fam, (fn, axes) in _FACTORIES.items():
        keys = list(axes)
        combos = [{}]
        for k in keys:
            combos = [dict(c, **{k: v}) for c in combos for v in axes[k]]
        for c in combos:
            cfg = fn(**c)
            out.append((cfg["name"], cfg))
    return out


def by_name(name: str) -> dict:
    """Look up a concrete preset by its full name (e.g. ``fig7-strong-n2``)."""
    for n, cfg in presets():
        if n == name:
            return copy.deepcopy(cfg)
    raise KeyError(f"unknown preset {name!r}")


# ---------------------------------------------------------------------------
# sweeps


def fig6_sweep(n=1):
    return {"name": f"fig6-sweep-n{n}", "base": fig6(n=n),
            "sweep": {"axis": "cooperativity", "values": list(FIG6_C), "workers": 1}}


def n_sweep(values=(1, 2, 3, 4, 5)):
    return {"name": "n-sweep-weak", "base": fig7("weak", 1),
            "sweep": {"axis": "N", "values": list(values), "workers": 1}}


SWEEPS = {"fig6": fig6_sweep, "nsweep": n_sweep}

"""Command-line entry point ``simulate``.

Exit codes: 0 success, 2 invalid configuration, 3 numerical divergence.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .config import ConfigError
from .design import (CavityGeometry, InteractionSpec, blockade_shift, cavity_derived, rate_cooperativity,
                     sweep_length)
from .drive import SingularDenominatorError
from .model import ConfigurationError
from .presets import SWEEPS, preset, preset_families
from .propagate import DivergenceError
from .runner import run_scenario, run_sweep, validate, write_outputs, write_sweep_csv
from .units import GAMMA_0, mhz, to_mhz

EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("", f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"{path} is not valid JSON: {exc}") from None


def _preset_options(args):
    opts = {"n": args.n, "kappa_mode": args.kappa_mode, "coupling": args.coupling,
            "kappa": args.kappa, "detuning": args.detuning}
    if args.no_spontaneous:
        opts["spontaneous"] = False
    if args.dephasing_khz is not None:
        opts["dephasing_khz"] = args.dephasing_khz
    return opts


def cmd_run(args):
    if args.config:
        cfg = _load_json(args.config)
    else:
        try:
            cfg = preset(args.preset, **_preset_options(args))
        except KeyError as exc:
            raise ConfigError("preset", exc.args[0]) from None
    result = run_scenario(cfg)
    paths = write_outputs(result, args.out, plot=args.plot)
    print(json.dumps(result.summary, indent=2))
    print(f"wrote {paths['csv']}", file=sys.stderr)
    return 0


def cmd_sweep(args):
    if args.config:
        cfg = _load_json(args.config)
    elif args.preset in SWEEPS:
        cfg = SWEEPS[args.preset]()
    else:
        raise ConfigError("preset", f"unknown sweep preset {args.preset!r}; choose from {list(SWEEPS)}")
    rows = run_sweep(cfg, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{cfg.get('name', 'sweep')}.csv"
    write_sweep_csv(path, rows)
    for r in rows:
        print(f"{r['axis']}={r['value']:g}  C={r['C']:.4g}  N={r['N']}  efficiency={r['efficiency']:.6f}")
    print(f"wrote {path}", file=sys.stderr)
    return 0


def cmd_design(args):
    cfg = _load_json(args.config)
    geo = cfg.get("geometry")
    if not isinstance(geo, dict):
        raise ConfigError("geometry", "expected an object with length_um and radius_mm")
    try:
        cg = CavityGeometry(float(geo["length_um"]) * 1e-6, float(geo["radius_mm"]) * 1e-3,
                            float(geo.get("wavelength_nm", 780.0)) * 1e-9,
                            float(geo.get("r1", 0.999985)), float(geo.get("r2", 0.99985)),
                            float(geo.get("mu_cm", 2.534e-29)))
    except KeyError as exc:
        raise ConfigError(f"geometry.{exc.args[0]}", "value required") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError("geometry", str(exc)) from None
    gamma_0 = mhz(float(cfg.get("gamma_0_2pi_mhz", to_mhz(GAMMA_0))))
    d = cavity_derived(cg, gamma_0)
    out = d.as_dict()
    gp = cfg.get("gamma_perp_2pi_mhz", to_mhz(gamma_0) / 2)
    out["rate_cooperativity"] = rate_cooperativity(d.g, d.kappa, mhz(gp))
    inter = cfg.get("interaction")
    if inter:
        try:
            # c_p in 2 pi MHz um^p and the distance in um: the shift comes out in 2 pi MHz
            spec = InteractionSpec(float(inter["c_p"]), int(inter["p"]), float(inter["distance_um"]))
        except KeyError as exc:
            raise ConfigError(f"interaction.{exc.args[0]}", "value required") from None
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError("interaction", str(exc)) from None
        out["delta_r_2pi_mhz"] = blockade_shift(spec)
    print(json.dumps(out, indent=2))
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        Path(args.out, "design.json").write_text(json.dumps(out, indent=2))
        lengths = cfg.get("sweep_lengths_um")
        if lengths:
            with open(Path(args.out, "design_sweep.csv"), "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\r\n")
                keys = list(out)[:8]
                w.writerow(["length_um"] + keys)
                rows = sweep_length(cg, [float(x) * 1e-6 for x in lengths], gamma_0)
                for L_um, (_, row) in zip(lengths, rows):
                    vals = row.as_dict()
                    w.writerow([repr(float(L_um))] + [repr(vals[k]) for k in keys])
    return 0


def cmd_validate(args):
    report = validate(args.n)
    text = json.dumps(report, indent=2)
    print(text)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        Path(args.out, f"validate-n{args.n}.json").write_text(text)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="simulate", description="Rydberg superatom cavity simulator")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one scenario")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=preset_families())
    src.add_argument("--config")
    r.add_argument("--out", default="out")
    r.add_argument("--n", type=int)
    r.add_argument("--kappa-mode", choices=("weak", "strong"))
    r.add_argument("--coupling", choices=("purcell", "full"))
    r.add_argument("--kappa", choices=("strong", "medium", "weak"), help="fig3 cavity decay level")
    r.add_argument("--detuning", choices=("resonant", "detuned"), help="fig3 cavity detuning")
    r.add_argument("--no-spontaneous", action="store_true", help="fig12 with Gamma_perp = 0")
    r.add_argument("--dephasing-khz", type=float, help="fig9 Rydberg dephasing (2 pi kHz)")
    r.add_argument("--plot", action="store_true", help="also write a PNG (needs matplotlib)")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run a parameter sweep")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--config")
    src.add_argument("--preset", help=f"one of {list(SWEEPS)}")
    s.add_argument("--out", default="out")
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_sweep)

    d = sub.add_parser("design", help="derive cavity parameters from a geometry")
    d.add_argument("--config", required=True)
    d.add_argument("--out")
    d.set_defaults(func=cmd_design)

    v = sub.add_parser("validate", help="compare the collective model with the product-space oracle")
    v.add_argument("--n", type=int, required=True, choices=(1, 2, 3))
    v.add_argument("--out")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (ConfigurationError, SingularDenominatorError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

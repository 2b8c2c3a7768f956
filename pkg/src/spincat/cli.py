"""Command-line interface: run named scenarios and emit CSV tables plus a
run manifest.  All frequency inputs are plain Hz (converted to angular
frequencies internally); decoherence rates are 1/s."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from ._version import __version__
from .dynamics import IntegrationError
from .observables import husimi_q, save_husimi, save_size_series
from .scenarios import (
    ScenarioConfig,
    coherence_scaling,
    config_from_dict,
    decoherence_sweep,
    givens_baseline,
    multitone_lab_validation,
    oat_free_evolution,
    paper_config,
    ramsey_cat_protocol,
    tact_oat_comparison,
    virtual_phase_cat,
    write_manifest,
)
from .spin import coherent_state, spin_operators
from .dynamics import TimeGrid, evolve_unitary
from .hamiltonian import effective_oat_strength

_TWO_PI = 2 * np.pi


def _load_config(args) -> ScenarioConfig:
    if args.config:
        with open(args.config) as fh:
            cfg = config_from_dict(json.load(fh))
    else:
        cfg = paper_config()
    updates = {}
    if args.frame:
        updates["frame"] = args.frame
    if args.dt is not None:
        updates["dt"] = args.dt
    if args.out:
        updates["output_dir"] = args.out
    if updates:
        from dataclasses import replace

        cfg = replace(cfg, **updates)
    return cfg


def _ensure_out(cfg) -> str | None:
    if cfg.output_dir:
        os.makedirs(cfg.output_dir, exist_ok=True)
        return cfg.output_dir
    return None


def _finish(cfg, scenario, t0, extras=None):
    out = _ensure_out(cfg)
    if out:
        write_manifest(out, scenario, cfg, time.time() - t0, extras)


def _cmd_oat(cfg, args) -> int:
    t0 = time.time()
    series = oat_free_evolution(cfg)
    print(
        f"oat: peak N_eff = {series.peak:.4f} at t = {series.peak_time * 1e6:.3f} us; "
        f"final N_eff = {series.values[-1]:.4f}"
    )
    out = _ensure_out(cfg)
    if out:
        save_size_series(series, os.path.join(out, "oat_neff.csv"))
    _finish(cfg, "oat", t0)
    return 0


def _cmd_ramsey(cfg, args) -> int:
    t0 = time.time()
    series = ramsey_cat_protocol(cfg, phase_rule=args.phase_rule)
    print(
        f"ramsey ({args.phase_rule}): peak N_eff = {series.peak:.4f} "
        f"at T = {series.peak_time * 1e6:.3f} us over {len(series.times)} points"
    )
    out = _ensure_out(cfg)
    if out:
        save_size_series(
            series,
            os.path.join(out, f"ramsey_neff_{args.phase_rule}.csv"),
            header_extra=f"phase_rule: {args.phase_rule}",
        )
    _finish(cfg, "ramsey", t0, {"phase_rule": args.phase_rule})
    return 0


def _cmd_virtual_phase(cfg, args) -> int:
    t0 = time.time()
    result = virtual_phase_cat(cfg)
    print(
        f"virtual-phase: fidelity vs free-evolution cat = {result.fidelity:.9f}; "
        f"phase increments (rad) = {np.round(result.phase_increments, 6).tolist()}"
    )
    out = _ensure_out(cfg)
    if out:
        with open(os.path.join(out, "virtual_phase_report.json"), "w") as fh:
            json.dump(
                {
                    "fidelity": result.fidelity,
                    "phase_increments_rad": result.phase_increments.tolist(),
                    "final_populations": (np.abs(result.final_state) ** 2).tolist(),
                },
                fh,
                indent=2,
            )
        save_husimi(
            husimi_q(result.final_state, cfg.spin),
            os.path.join(out, "virtual_phase_husimi.csv"),
        )
    _finish(cfg, "virtual-phase", t0)
    return 0


def _cmd_givens(cfg, args) -> int:
    t0 = time.time()
    result = givens_baseline(cfg, mode=args.mode)
    print(
        f"givens ({args.mode}): {len(result.schedule.segments)} pulses, "
        f"total {result.total_duration * 1e3:.3f} ms "
        f"(OAT period {result.oat_period * 1e6:.2f} us); "
        f"edge populations = ({result.edge_populations[0]:.6f}, "
        f"{result.edge_populations[1]:.6f}); "
        f"fidelity to |I,-I> = {result.end_fidelity:.6f}"
    )
    out = _ensure_out(cfg)
    if out:
        with open(os.path.join(out, f"givens_{args.mode}_report.json"), "w") as fh:
            json.dump(
                {
                    "mode": result.mode,
                    "n_pulses": len(result.schedule.segments),
                    "total_duration_s": result.total_duration,
                    "oat_period_s": result.oat_period,
                    "edge_populations": list(result.edge_populations),
                    "fidelity_to_bottom": result.end_fidelity,
                },
                fh,
                indent=2,
            )
    _finish(cfg, "givens", t0, {"mode": args.mode})
    return 0


def _cmd_decoherence(cfg, args) -> int:
    t0 = time.time()
    results = decoherence_sweep(cfg, args.gamma_m, args.gamma_e)
    out = _ensure_out(cfg)
    for res in results:
        print(
            f"decoherence Gamma_m={res.gamma_m}/s Gamma_e={res.gamma_e}/s: "
            f"first-peak N_eff = {res.series.peak:.4f}, "
            f"final N_eff = {res.series.values[-1]:.4f}"
        )
        if out:
            name = f"decoherence_gm{res.gamma_m:g}_ge{res.gamma_e:g}.csv"
            save_size_series(
                res.series,
                os.path.join(out, name),
                header_extra=f"gamma_m_per_s: {res.gamma_m}, gamma_e_per_s: {res.gamma_e}",
            )
    _finish(cfg, "decoherence", t0, {"gamma_m": args.gamma_m, "gamma_e": args.gamma_e})
    return 0


def _cmd_coherence_scaling(cfg, args) -> int:
    t0 = time.time()
    rows = coherence_scaling(cfg, args.spins)
    for row in rows:
        print(
            f"coherence-scaling 2I={row.twice_i} (d={row.dimension}): "
            f"|rho_I,-I| = {row.coherence:.6e} (analytic {row.analytic:.6e})"
        )
    out = _ensure_out(cfg)
    if out:
        with open(os.path.join(out, "coherence_vs_dimension.csv"), "w") as fh:
            fh.write("# twice_i,dimension,coherence,analytic\n")
            for row in rows:
                fh.write(f"{row.twice_i},{row.dimension},{row.coherence!r},{row.analytic!r}\n")
    _finish(cfg, "coherence-scaling", t0)
    return 0


def _cmd_tact(cfg, args) -> int:
    t0 = time.time()
    results = tact_oat_comparison(
        cfg,
        eta_list=args.eta,
        b0_list=[b * _TWO_PI for b in args.b0_hz] if args.b0_hz else None,
        include_corner=args.corner,
        with_husimi=bool(cfg.output_dir),
    )
    out = _ensure_out(cfg)
    for res in results:
        label = f"eta{res.eta:g}_b0{res.gamma_b0 / _TWO_PI:g}Hz"
        if res.euler != cfg.quad.euler:
            label += "_corner"
        print(
            f"tact {label}: max N_eff({res.operator_tag}) = {res.neff_max:.4f} "
            f"at t = {res.t_peak * 1e6:.3f} us"
        )
        if out:
            save_size_series(
                res.series,
                os.path.join(out, f"tact_{label}.csv"),
                header_extra=f"eta: {res.eta}, gamma_b0_hz: {res.gamma_b0 / _TWO_PI}",
            )
            if res.husimi is not None:
                save_husimi(res.husimi, os.path.join(out, f"tact_{label}_husimi.csv"))
    _finish(
        cfg, "tact", t0,
        {"eta": args.eta, "b0_hz": args.b0_hz, "corner": args.corner,
         "note": "lab-frame free evolution; N_eff in the frame co-rotating at gamma*B0"},
    )
    return 0


def _cmd_husimi(cfg, args) -> int:
    t0 = time.time()
    spin = cfg.spin
    omega = effective_oat_strength(cfg.quad, spin)
    t = args.time_fraction * np.pi / abs(omega)
    ops = spin_operators(spin)
    h = omega * (ops.Iz @ ops.Iz)
    psi0 = coherent_state(spin, np.pi / 2, 0.0)
    traj = evolve_unitary(h, psi0, TimeGrid(0.0, t, dt=t / 200, output_stride=10 ** 9))
    grid = husimi_q(traj.final_state, spin, n_theta=args.n_theta, n_phi=args.n_phi)
    print(
        f"husimi: OAT state at t = {t * 1e6:.3f} us "
        f"({args.time_fraction} of a revival period); sphere integral = "
        f"{grid.integral():.6f}"
    )
    out = _ensure_out(cfg)
    if out:
        save_husimi(
            grid,
            os.path.join(out, f"husimi_f{args.time_fraction:g}.csv"),
            header_extra=f"oat_time_s: {t}",
        )
    _finish(cfg, "husimi", t0, {"time_fraction": args.time_fraction})
    return 0


def _cmd_lab_check(cfg, args) -> int:
    t0 = time.time()
    result = multitone_lab_validation(cfg, scale=args.scale, dt=args.dt or 1e-9)
    print(
        f"lab-check: scale = {result.scale:g}, {result.n_steps} steps of "
        f"{result.dt * 1e9:.3f} ns; infidelity vs rotating-frame model = "
        f"{result.infidelity_vs_model:.3e}, vs ideal coherent state = "
        f"{result.infidelity_vs_ideal:.3e}"
    )
    _finish(cfg, "lab-check", t0, {"scale": args.scale})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spincat",
        description="Spin-qudit cat-state dynamics scenarios",
    )
    parser.add_argument("--version", action="version", version=f"spincat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file mirroring ScenarioConfig")
        p.add_argument("--out", help="output directory for tables and manifest")
        p.add_argument(
            "--frame", choices=["lab", "rotating", "effective"], help="frame override"
        )
        p.add_argument("--dt", type=float, help="integrator step override (seconds)")

    p = sub.add_parser("oat", help="free-evolution twisting: N_eff(t)")
    common(p)
    p.set_defaults(func=_cmd_oat)

    p = sub.add_parser("ramsey", help="two-pulse protocol: N_eff(T)")
    common(p)
    p.add_argument("--phase-rule", choices=["fixed", "rotating"], default="rotating")
    p.set_defaults(func=_cmd_ramsey)

    p = sub.add_parser("virtual-phase", help="cat by phase modulation only")
    common(p)
    p.set_defaults(func=_cmd_virtual_phase)

    p = sub.add_parser("givens", help="sequential Givens-rotation baseline")
    common(p)
    p.add_argument("--mode", choices=["create", "collapse"], default="collapse")
    p.set_defaults(func=_cmd_givens)

    p = sub.add_parser("decoherence", help="collapse/revivals under dephasing")
    common(p)
    p.add_argument("--gamma-m", type=float, nargs="+", help="magnetic rates (1/s)")
    p.add_argument("--gamma-e", type=float, nargs="+", help="electric rates (1/s)")
    p.set_defaults(func=_cmd_decoherence)

    p = sub.add_parser("coherence-scaling", help="cat coherence vs dimension")
    common(p)
    p.add_argument("--spins", type=int, nargs="+", help="twice-I values, e.g. 1 3 5 7")
    p.set_defaults(func=_cmd_coherence_scaling)

    p = sub.add_parser("tact", help="twisting conversion: eta and B0 sweep")
    common(p)
    p.add_argument("--eta", type=float, nargs="+", help="asymmetry values")
    p.add_argument("--b0-hz", type=float, nargs="+", help="gamma*B0 values in Hz")
    p.add_argument("--corner", action="store_true", help="add the eta=0, mu=pi/2 case")
    p.set_defaults(func=_cmd_tact)

    p = sub.add_parser("husimi", help="Husimi Q table of the OAT state")
    common(p)
    p.add_argument("--time-fraction", type=float, default=0.5,
                   help="evolution time as a fraction of the revival period")
    p.add_argument("--n-theta", type=int, default=181)
    p.add_argument("--n-phi", type=int, default=361)
    p.set_defaults(func=_cmd_husimi)

    p = sub.add_parser("lab-check", help="full-model validation of the multi-tone rotation")
    common(p)
    p.add_argument("--scale", type=float, default=20.0,
                   help="joint scale factor on gamma*B1 and omega_q")
    p.set_defaults(func=_cmd_lab_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        return args.func(cfg, args)
    except (ValueError, IntegrationError, OSError) as exc:
        print(f"spincat: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

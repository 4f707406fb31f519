"""Command-line front end.

Every command writes CSV (or JSON with ``--format json``) to stdout, or into
``--out DIR``. Value lists accept ``a,b,c``, ``lin:start:stop:n`` or
``geom:start:stop:n``.

Exit codes: 0 success, 2 configuration error, 3 physics precondition
violated, 4 unroutable.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import architect, coupling, noise, readout, spin, thermo
from .dynamics import gates, pulses, robust
from .dynamics.evolve import ResolutionError
from .constants import MU_B_HZ_PER_T
from .output import config_hash, csv_text, emit, json_text, meta_block
from .species import BUILTIN_SPECIES, ConfigError, load_config, load_species

EXIT_CONFIG, EXIT_PHYSICS, EXIT_UNROUTABLE = 2, 3, 4
FIGURES = ("fig1a", "fig1b", "fig1c", "fig2", "fig5", "fig6", "fig11d", "fig13")


def parse_values(text: str) -> list[float]:
    text = str(text).strip()
    try:
        if text.startswith(("lin:", "geom:")):
            kind, a, b, n = text.split(":")
            fn = np.linspace if kind == "lin" else np.geomspace
            return [float(x) for x in fn(float(a), float(b), int(n))]
        vals = [float(x) for x in text.replace(" ", ",").split(",") if x]
    except ValueError:
        raise ConfigError(f"cannot parse value list {text!r}") from None
    if not vals:
        raise ConfigError("empty value list")
    return vals


def parse_cell(text: str) -> tuple[int, int]:
    try:
        r, c = text.replace(":", ",").split(",")
        return int(r), int(c)
    except ValueError:
        raise ConfigError(f"cell must look like 'row,col', got {text!r}") from None


class Context:
    def __init__(self, args):
        self.args = args
        raw = None
        self.cfg = {}
        if args.config:
            path = Path(args.config)
            if not path.exists():
                raise ConfigError(f"config file not found: {path}")
            raw = path.read_bytes()
            self.cfg = load_config(path)
            self.species_table = load_species(path)
        else:
            self.species_table = dict(BUILTIN_SPECIES)
        self.hash = config_hash(raw)
        run = self.cfg.get("run", {})
        self.seed = int(args.seed if args.seed is not None else run.get("seed", 0))
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        self.out = args.out if args.out is not None else run.get("out")
        self.format = args.format

    def species(self, key: str | None = None):
        key = key or self.cfg.get("run", {}).get("species", "Si:P")
        if key not in self.species_table:
            raise ConfigError(f"unknown species {key!r}; known: {sorted(self.species_table)}")
        return self.species_table[key]

    def section(self, name: str) -> dict:
        return dict(self.cfg.get(name, {}))

    def echo(self) -> dict:
        skip = {"func", "config", "out", "format", "seed"}
        return {k: v for k, v in sorted(vars(self.args).items()) if k not in skip}

    def render(self, command: str, header, rows, payload=None, extra_meta=None) -> str:
        meta = meta_block(command, self.seed, self.hash, self.echo())
        if extra_meta:
            meta.update(extra_meta)
        if self.format == "json":
            data = payload if payload is not None else [dict(zip(header, r)) for r in rows]
            return json_text(data, meta)
        return csv_text(header, rows, meta)

    def write(self, name: str, text: str):
        ext = "json" if text.lstrip().startswith("{") else "csv"
        emit(text, self.out, f"{name}.{ext}", sys.stdout)


# commands


def cmd_levels(ctx, a):
    sp = ctx.species(a.species)
    rows = spin.levels_table(sp, parse_values(a.B))
    ctx.write("levels", ctx.render("levels", ["B_tesla", "level_index", "freq_hz", "label"], rows))


def _moment_rows(sp, Bs):
    rows = []
    for B in Bs:
        M = spin.moment_matrix(sp, B)
        for i in range(4):
            for j in range(i + 1, 4):
                rows.append((B, i, j, float(M[i, j])))
    return rows


def cmd_moments(ctx, a):
    sp = ctx.species(a.species)
    rows = _moment_rows(sp, parse_values(a.B))
    ctx.write("moments", ctx.render("moments", ["B_tesla", "i", "j", "moment_mu_B"], rows))


def _exchange_rows(sp, r_values_m, B):
    zeeman = MU_B_HZ_PER_T * B
    J = np.atleast_1d(coupling.exchange_J(np.asarray(r_values_m), sp.E_b, sp.a_B))
    return [(float(r * 1e10), float(j), float(zeeman)) for r, j in zip(r_values_m, J)]


def cmd_exchange(ctx, a):
    sp = ctx.species(a.species)
    r = [x * 1e-10 for x in parse_values(a.r_angstrom)]
    rows = _exchange_rows(sp, r, a.B)
    r_match = coupling.spacing_for_exchange(MU_B_HZ_PER_T * a.B, sp.E_b, sp.a_B)
    ctx.write("exchange", ctx.render("exchange", ["r_angstrom", "J_hz", "muB_B_hz"], rows,
                                     extra_meta={"r_angstrom_where_J_equals_muB_B": r_match * 1e10}))


def _nuj_row(sp, A, B, J):
    approx = coupling.nu_J(A, B, J)
    s = sp.replace(A=A / sp.strain_factor)
    exact = coupling.nu_J_exact(coupling.TwoDonorSystem(s, s, B, J))
    rel = abs(approx - exact) / exact if exact > 0 else 0.0
    return (A, B, J, approx, exact, rel)


NUJ_HEADER = ["A_hz", "B_tesla", "J_hz", "nu_J_hz", "nu_J_exact_hz", "rel_error"]


def cmd_nuj(ctx, a):
    sp = ctx.species(a.species)
    As = parse_values(a.A) if a.A else [sp.A_eff]
    rows = [_nuj_row(sp, A, B, J) for A, B, J in
            itertools.product(As, parse_values(a.B), parse_values(a.J))]
    ctx.write("nuj", ctx.render("nuj", NUJ_HEADER, rows))


def _make_pulse(shape, rabi, angle, moment, n):
    if shape == "rectangular":
        return pulses.rectangular(rabi, angle, moment, n=n)
    if shape == "hann":
        return pulses.hann(rabi, angle, moment, n=n)
    if shape == "corpse":
        return pulses.corpse(rabi, angle, moment)
    raise ConfigError(f"unknown pulse shape {shape!r}")


def _pulse_rows(p):
    return [(float(t), float(x), float(ph)) for t, x, ph in zip(p.times, p.amplitudes, p.phases)]


def cmd_pulse(ctx, a):
    sp = ctx.species(a.species)
    if a.gate:
        fn = gates.gate_cnot_en if a.gate == "cnot" else gates.gate_swap_en
        rep = fn(sp, a.B, a.B_rf, frame=a.frame, shape=a.shape if a.shape != "corpse" else "hann")
        meta = meta_block("pulse", ctx.seed, ctx.hash, ctx.echo())
        ctx.write(f"gate_{a.gate}", json_text(rep.to_dict(), meta))
        return
    p = _make_pulse(a.shape, a.rabi_hz, a.angle, a.moment, a.n).with_carrier(a.carrier)
    ctx.write("pulse", ctx.render("pulse", ["t_s", "amp_tesla", "phase_rad"], _pulse_rows(p),
                                  extra_meta={"pulse": p.metadata()}))


def _optimize(rabi, angle, moment, frac, points, seed, restarts):
    fam, x0 = robust.smooth_robust_family(rabi, angle, moment)
    return robust.optimize_pulse(fam, (-frac * rabi, frac * rabi), (angle, 0.0), n_points=points,
                                 seed=seed, restarts=restarts, initial=x0, maxfev=3000)


def cmd_optimize_pulse(ctx, a):
    res = _optimize(a.rabi_hz, a.angle, a.moment, a.window, a.points, ctx.seed, a.restarts)
    rect = pulses.rectangular(a.rabi_hz, a.angle, a.moment)
    summary = {
        "worst_initial": res.worst_initial,
        "worst_final": res.worst_final,
        "worst_rectangular": robust.worst_case(rect, res.detunings, (a.angle, 0.0), a.moment),
        "improved": res.improved,
        "pulse": res.pulse.metadata(),
    }
    ctx.write("optimized_pulse", ctx.render("optimize-pulse", ["t_s", "amp_tesla", "phase_rad"],
                                            _pulse_rows(res.pulse), payload=summary,
                                            extra_meta={"optimizer": summary}))


def cmd_dephase(ctx, a):
    rate = noise.dephasing_rate(a.alpha, a.S_white)
    if not a.trials:
        ctx.write("dephase", ctx.render("dephase", ["alpha_hz_per_v", "S_v2_per_hz", "rate_per_s"],
                                        [(a.alpha, a.S_white, rate)]))
        return
    spec = noise.NoiseSpectrum(a.S_white, a.S_oneoverf, a.f_min, a.f_max)
    res = noise.mc_coherence(noise.VcoModel(a.alpha), spec, a.t_total, a.trials, ctx.seed, a.steps)
    extra = {"eq4_rate": res.eq4_rate, "fitted_rate": res.fitted_rate,
             "gaussian_short_time": res.gaussian_short_time}
    ctx.write("coherence", ctx.render("dephase", ["t_s", "coherence", "stderr"], res.rows(),
                                      extra_meta={"fit": extra}))


def cmd_polarization(ctx, a):
    rows = thermo.polarization_grid(parse_values(a.B), parse_values(a.T))
    ctx.write("polarization", ctx.render("polarization", ["B_tesla", "T_kelvin", "polarization"], rows))


def cmd_fridge(ctx, a):
    cas = thermo.fridge_cascade(a.p_in, a.stages)
    rows = [(0, cas.polarizations[0], 1.0)] + [
        (k + 1, p, y) for k, (p, y) in enumerate(zip(cas.polarizations[1:], cas.yields))]
    extra = {"first_stage_reaching_0.999": cas.first_stage_reaching(0.999)}
    if a.pairs:
        mc = thermo.mc_fridge(a.p_in, a.pairs, ctx.seed)
        extra["monte_carlo"] = {"p_out": mc.p_out, "p_out_stderr": mc.p_out_stderr,
                                "singlet_fraction": mc.singlet_fraction}
    ctx.write("fridge", ctx.render("fridge", ["stage", "polarization", "cumulative_yield"], rows,
                                   extra_meta={"summary": extra}))


def _readout_params(ctx, a):
    sec = ctx.section("readout")
    kw = {k: sec[k] for k in ("t_meas", "t_ST", "t_flip", "donor_kind", "F_singlet", "F_triplet")
          if k in sec}
    for k, v in (("t_meas", a.t_meas), ("t_ST", a.t_st), ("t_flip", a.t_flip), ("donor_kind", a.donor_kind)):
        if v is not None:
            kw[k] = v
    return readout.ReadoutParams(**kw)


def cmd_readout(ctx, a):
    p = _readout_params(ctx, a)
    rep = readout.readout_fidelity(p)
    rows = []
    states = readout.STATE_LABELS if a.state == "all" else (a.state,)
    for k, s in enumerate(states):
        b = readout.simulate_readout_batch(s, p, a.trials, [ctx.seed, k])
        rows.append((s, a.trials, b.singlet_fraction, readout.singlet_probability(s, p)))
    ctx.write("readout", ctx.render(
        "readout", ["state", "trials", "singlet_fraction", "singlet_probability_closed_form"], rows,
        extra_meta={"fidelity": asdict(rep)}))


def cmd_tunnel(ctx, a):
    rows = readout.fn_table(parse_values(a.F), a.phi, a.attempt_rate)
    ctx.write("tunnel", ctx.render("tunnel", ["F_v_per_m", "rate_hz", "mass_label"], rows))


def _grid(ctx, a) -> architect.DeviceGrid:
    path = a.grid or ctx.section("grid").get("path")
    text = Path(path).read_text() if path else architect.FIVE_QUBIT_GRID
    try:
        g = architect.DeviceGrid.from_text(text)
    except architect.GridError as exc:
        raise ConfigError(str(exc)) from None
    try:
        for cell in getattr(a, "defect", None) or []:
            g = g.with_defect(parse_cell(cell))
    except architect.GridError as exc:
        raise ConfigError(str(exc)) from None
    return g


def cmd_route(ctx, a):
    g = _grid(ctx, a)
    occ = frozenset(parse_cell(c) for c in (a.occupied or []))
    path = architect.route_electron(g, parse_cell(a.src), parse_cell(a.dst), occ, a.radius)
    rows = [(k, r, c) for k, (r, c) in enumerate(path)]
    ctx.write("route", ctx.render("route", ["index", "row", "col"], rows))


def cmd_compile(ctx, a):
    g = _grid(ctx, a)
    path = a.circuit or ctx.section("circuit").get("path")
    if path:
        circ = architect.Circuit.from_json(Path(path).read_text())
    else:
        q = sorted(g.qubits())
        circ = architect.Circuit([architect.Op("two_qubit", (q[0], q[2 % len(q)]))]) if len(q) > 2 \
            else architect.Circuit()
    try:
        timing = architect.Timing(**ctx.section("timing"))
        rates = architect.ErrorRates(**ctx.section("error_rates"))
    except TypeError as exc:
        raise ConfigError(f"bad [timing] or [error_rates] entry: {exc}") from None
    sched = architect.compile_circuit(circ, g, timing, a.strategy, a.radius)
    bad = architect.validate_schedule(sched, g)
    metrics = asdict(architect.error_budget(sched, rates))
    meta = meta_block("compile", ctx.seed, ctx.hash, ctx.echo())
    meta["metrics"] = metrics
    meta["violations"] = [asdict(v) for v in bad]
    if ctx.format == "json":
        ctx.write("schedule", json_text(sched.to_dict(), meta))
    else:
        body = sched.to_csv()
        head = "".join(ln for ln in csv_text([], [], meta).splitlines(keepends=True)
                       if ln.startswith("#"))
        ctx.write("schedule", head + body)


# figures


def _fig_rows(ctx, name):
    sp = ctx.species()
    cfg = ctx.section("figures")
    if name == "fig1a":
        Bs = [0.0] + list(np.geomspace(1e-4, 10, 121))
        return [("fig1a", ["B_tesla", "level_index", "freq_hz", "label"], spin.levels_table(sp, Bs), {})]
    if name == "fig1b":
        Bs = [0.0] + list(np.geomspace(1e-4, 10, 121))
        gaps = spin.energy_differences(sp, Bs)
        rows = [(float(B), k, float(g)) for B, row in zip(Bs, gaps) for k, g in enumerate(row)]
        return [("fig1b", ["B_tesla", "gap_index", "gap_hz"], rows, {})]
    if name == "fig1c":
        Bs = [0.0] + list(np.geomspace(1e-4, 10, 121))
        return [("fig1c", ["B_tesla", "i", "j", "moment_mu_B"], _moment_rows(sp, Bs), {})]
    if name == "fig2":
        Bs = np.geomspace(1e-2, 10, 31)
        Ts = np.geomspace(1e-2, 10, 31)
        grid = thermo.polarization_grid(Bs, Ts)
        levels = (0.5, 0.9, 0.99, 0.999, 0.999999)
        cont = [(p, float(T), float(thermo.iso_polarization_field(p, T))) for p in levels for T in Ts]
        return [("fig2", ["B_tesla", "T_kelvin", "polarization"], grid, {}),
                ("fig2_contours", ["polarization", "T_kelvin", "B_tesla"], cont, {})]
    if name == "fig5":
        B = float(cfg.get("fig5_B", 1.0))
        r = np.linspace(20e-10, 250e-10, 116)
        return [("fig5", ["r_angstrom", "J_hz", "muB_B_hz"], _exchange_rows(sp, r, B), {"B_tesla": B})]
    if name == "fig6":
        S = float(cfg.get("fig6_S_white", noise.JOHNSON_50_OHM_S_V))
        alphas = cfg.get("fig6_alphas", [0.5e8, 1e8, 2e8])
        spec = noise.NoiseSpectrum(S_white=S)
        out = []
        for k, al in enumerate(alphas):
            res = noise.mc_coherence(noise.VcoModel(al), spec, 20.0, 1000, ctx.seed + k, 400)
            out.append((f"fig6_alpha{k}", ["t_s", "coherence", "stderr"], res.rows(),
                        {"alpha_hz_per_v": al, "eq4_rate": res.eq4_rate, "fitted_rate": res.fitted_rate}))
        return out
    if name == "fig11d":
        rabi, moment = 1.0, 1.0  # detuning in units of the Rabi frequency
        angle = float(cfg.get("fig11d_angle", np.pi))
        res = _optimize(rabi, angle, moment, 0.05, 11, ctx.seed, 2)
        det = np.linspace(-0.3, 0.3, 61)
        shapes = {"rectangular": pulses.rectangular(rabi, angle, moment),
                  "corpse": pulses.corpse(rabi, angle, moment), "optimized": res.pulse}
        cols = {k: robust.pulse_infidelity(p, det, (angle, 0.0), moment) for k, p in shapes.items()}
        rows = [(float(d), *(float(cols[k][i]) for k in shapes)) for i, d in enumerate(det)]
        return [("fig11d", ["detuning_over_rabi", "rectangular", "corpse", "optimized"], rows,
                 {"target_angle_rad": angle})]
    if name == "fig13":
        F = np.geomspace(5e6, 1e8, 60)
        return [("fig13", ["F_v_per_m", "rate_hz", "mass_label"], readout.fn_table(F), {})]
    raise ConfigError(f"unknown figure {name!r}; choose from {FIGURES}")


def cmd_figure(ctx, a):
    if ctx.out is None:
        ctx.out = "figures"
    for fname, header, rows, extra in _fig_rows(ctx, a.name):
        ctx.write(fname, ctx.render(f"figure {a.name}", header, rows, extra_meta=extra or None))


# sweeps


def _sweep_nuj(ctx, p):
    sp = ctx.species()
    return dict(zip(NUJ_HEADER[3:], _nuj_row(sp, p["A"], p["B"], p["J"])[3:]))


SWEEPS = {
    "nuj": (("A", "B", "J"), _sweep_nuj),
    "exchange": (("r_angstrom",),
                 lambda ctx, p: {"J_hz": coupling.exchange_J(p["r_angstrom"] * 1e-10,
                                                             ctx.species().E_b, ctx.species().a_B)}),
    "dephasing_rate": (("alpha", "S_white"),
                       lambda ctx, p: {"rate_per_s": noise.dephasing_rate(p["alpha"], p["S_white"])}),
    "polarization": (("B", "T"),
                     lambda ctx, p: {"polarization": thermo.equilibrium_polarization(p["B"], p["T"])}),
    "readout_fidelity": (("t_meas", "t_ST", "t_flip"),
                         lambda ctx, p: {"fidelity": readout.readout_fidelity(
                             readout.ReadoutParams(p["t_meas"], p["t_ST"], p["t_flip"])).fidelity}),
    "transition_moment": (("B",),
                          lambda ctx, p: {"moment_01": spin.transition_moment(ctx.species(), p["B"], 0, 1)}),
}


def cmd_sweep(ctx, a):
    if a.target not in SWEEPS:
        raise ConfigError(f"unknown sweep target {a.target!r}; choose from {sorted(SWEEPS)}")
    names, fn = SWEEPS[a.target]
    ranges = {}
    for item in a.param or []:
        if "=" not in item:
            raise ConfigError(f"--param needs name=values, got {item!r}")
        k, v = item.split("=", 1)
        if k not in names:
            raise ConfigError(f"sweep {a.target} takes parameters {names}, not {k!r}")
        ranges[k] = parse_values(v)
    missing = [n for n in names if n not in ranges]
    if missing:
        raise ConfigError(f"sweep {a.target} needs values for {missing}")
    points = list(itertools.product(*(ranges[n] for n in names)))
    rows, header = [], None
    for k, vals in enumerate(points):
        res = fn(ctx, dict(zip(names, vals)))
        header = header or list(names) + list(res)
        rows.append(tuple(vals) + tuple(float(v) for v in res.values()))
        if not a.quiet:
            print(f"[{k + 1}/{len(points)}] {a.target}", file=sys.stderr)
    ctx.write(f"sweep_{a.target}", ctx.render("sweep", header, rows))


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML configuration file")
    common.add_argument("--seed", type=int, help="64-bit random seed (default 0)")
    common.add_argument("--out", help="output directory (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    p = argparse.ArgumentParser(prog="donorqc", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        s = sub.add_parser(name, help=help_, parents=[common])
        s.set_defaults(func=func)
        return s

    s = add("levels", cmd_levels, "single-donor energy levels vs field")
    s.add_argument("--species")
    s.add_argument("--B", default="0,0.001,0.01,0.1,1,2,5,10")
    s = add("moments", cmd_moments, "transition moments between eigenstates")
    s.add_argument("--species")
    s.add_argument("--B", default="0,0.001,0.01,0.1,1,2,5,10")
    s = add("exchange", cmd_exchange, "exchange J(r) between donors")
    s.add_argument("--species")
    s.add_argument("--r-angstrom", default="lin:20:250:47")
    s.add_argument("--B", type=float, default=1.0)
    s = add("nuj", cmd_nuj, "nuclear exchange frequency, perturbative and exact")
    s.add_argument("--species")
    s.add_argument("--A")
    s.add_argument("--B", default="2")
    s.add_argument("--J", default="lin:0:1.2e10:7")
    s = add("pulse", cmd_pulse, "pulse shapes and resonant gates")
    s.add_argument("--species")
    s.add_argument("--shape", choices=("rectangular", "hann", "corpse"), default="hann")
    s.add_argument("--rabi-hz", type=float, default=1e6)
    s.add_argument("--angle", type=float, default=np.pi)
    s.add_argument("--moment", type=float, default=1.0)
    s.add_argument("--n", type=int, default=64)
    s.add_argument("--carrier", type=float, default=0.0)
    s.add_argument("--gate", choices=("cnot", "swap"))
    s.add_argument("--B", type=float, default=2.0)
    s.add_argument("--B-rf", type=float, default=1e-3)
    s.add_argument("--frame", choices=("rwa", "lab"), default="rwa")
    s = add("optimize-pulse", cmd_optimize_pulse, "detuning-robust smooth pulse")
    s.add_argument("--rabi-hz", type=float, default=1e6)
    s.add_argument("--angle", type=float, default=np.pi)
    s.add_argument("--moment", type=float, default=1.0)
    s.add_argument("--window", type=float, default=0.05, help="half-width as a fraction of the Rabi frequency")
    s.add_argument("--points", type=int, default=11)
    s.add_argument("--restarts", type=int, default=2)
    s = add("dephase", cmd_dephase, "voltage-noise dephasing rate or Monte Carlo coherence")
    s.add_argument("--alpha", type=float, default=1e8)
    s.add_argument("--S-white", type=float, default=noise.JOHNSON_50_OHM_S_V)
    s.add_argument("--S-oneoverf", type=float, default=0.0)
    s.add_argument("--f-min", type=float, default=1e-2)
    s.add_argument("--f-max", type=float, default=1e1)
    s.add_argument("--trials", type=int, default=0)
    s.add_argument("--t-total", type=float, default=20.0)
    s.add_argument("--steps", type=int, default=400)
    s = add("polarization", cmd_polarization, "equilibrium electron polarization grid")
    s.add_argument("--B", default="geom:0.01:10:7")
    s.add_argument("--T", default="geom:0.01:10:7")
    s = add("fridge", cmd_fridge, "singlet-rejection refrigerator cascade")
    s.add_argument("--p-in", type=float, default=0.5)
    s.add_argument("--stages", type=int, default=12)
    s.add_argument("--pairs", type=int, default=0)
    s = add("readout", cmd_readout, "spin-to-charge readout model")
    s.add_argument("--state", default="all")
    s.add_argument("--trials", type=int, default=10000)
    s.add_argument("--t-meas", type=float)
    s.add_argument("--t-st", type=float)
    s.add_argument("--t-flip", type=float)
    s.add_argument("--donor-kind", choices=sorted(readout.DEFAULT_THRESHOLDS))
    s = add("tunnel", cmd_tunnel, "Fowler-Nordheim leakage rates")
    s.add_argument("--F", default="geom:5e6:1e8:20")
    s.add_argument("--phi", type=float, default=0.1)
    s.add_argument("--attempt-rate", type=float, default=1e13)
    for name, func, help_ in (("route", cmd_route, "route one electron"),
                              ("compile", cmd_compile, "compile a circuit to a schedule")):
        s = add(name, func, help_)
        s.add_argument("--grid", help="text grid map (default: built-in five-qubit layout)")
        s.add_argument("--defect", action="append", help="mark a gate cell 'row,col' defective")
        s.add_argument("--radius", type=int, default=1)
    sub.choices["route"].add_argument("--src", required=True)
    sub.choices["route"].add_argument("--dst", required=True)
    sub.choices["route"].add_argument("--occupied", action="append")
    sub.choices["compile"].add_argument("--circuit", help="circuit JSON")
    sub.choices["compile"].add_argument("--strategy", choices=architect.STRATEGIES, default="resonant")
    s = add("figure", cmd_figure, "write the data behind a figure")
    s.add_argument("name", choices=FIGURES)
    s = add("sweep", cmd_sweep, "cross-product parameter sweep")
    s.add_argument("target")
    s.add_argument("--param", action="append", help="name=values")
    s.add_argument("--quiet", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ctx = Context(args)
        args.func(ctx, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except architect.UnreachableError as exc:
        print(f"unroutable: {exc}", file=sys.stderr)
        return EXIT_UNROUTABLE
    except (coupling.RegimeError, gates.UnresolvedTransitionError, ResolutionError,
            coupling.StateIdentificationError, ValueError) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    return 0


if __name__ == "__main__":
    sys.exit(main())

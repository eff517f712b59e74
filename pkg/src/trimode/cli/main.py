"""Command-line entry point.

Usage::

    trimode GROUP COMMAND [-c CONFIG] [-s KEY=VALUE ...] [-o OUTPUT] [-f csv|json]

Exit status is 0 on success, 1 when the configuration is rejected and 2
when a computation fails.
"""

import argparse
import math
import sys
import warnings

import numpy as np

from .. import __version__
from ..classical import (ClassicalParams, Direction, ForcingProtocol, fixed_points,
                         integrate, stationary_transmission)
from ..errors import NumericalError, ValidationError
from ..full import FullNetworkParams, full_spectrum
from ..rwa import (NetworkParams, default_grid, interference_frequency, metrics,
                   optimal_design, optimal_Jm, optimize_asymmetric, spectrum,
                   symmetric_network)
from ..sweeps import Axis, SweepSpec, Task, run_sweep
from .config import COMMANDS, RunConfig, parse_config
from .output import render


def _classical(p):
    return ClassicalParams(p["P"], p["Delta"], p["kappa"], p["gamma"], p["direction"])


def _dynamics_run(p, workers):
    params = _classical(p)
    forcing = None
    if p["forcing"]:
        forcing = (ForcingProtocol.default(params, p["force_T"]) if p["force_f"] is None
                   else ForcingProtocol(p["force_f"], p["force_T"]))
    tr = integrate(params, forcing, t_end=p["t_end"], dt_out=p["dt_out"],
                   rtol=p["rtol"], atol=p["atol"])
    y = tr.y
    k2 = 4 * params.kappa ** 2
    nan = np.full(len(tr.t), math.nan)
    fwd = params.direction is Direction.FORWARD
    t21 = k2 * (y[:, 2] ** 2 + y[:, 3] ** 2) if fwd else nan
    t12 = nan if fwd else k2 * (y[:, 0] ** 2 + y[:, 1] ** 2)
    cols = ["t", "re_a1", "im_a1", "re_a2", "im_a2", "X", "V", "T_fwd", "T_bwd_applicable"]
    rows = np.column_stack([tr.t, y, t21, t12]).tolist()
    return cols, rows


def _dynamics_fixed_points(p, workers):
    params = _classical(p)
    cols = ["branch", "X", "re_a1", "im_a1", "re_a2", "im_a2", "T", "stability",
            "max_re_eig", "degenerate"]
    rows = [[fp.branch, fp.X, fp.alpha1.real, fp.alpha1.imag, fp.alpha2.real, fp.alpha2.imag,
             stationary_transmission(fp, params), fp.stability, fp.max_real, fp.degenerate]
            for fp in fixed_points(params)]
    return cols, rows


def _axis(p, name, spacing_key=None, values_key=None):
    if values_key and p.get(values_key) is not None:
        return Axis(name, explicit=p[values_key])
    return Axis(name, p[f"{name}_min"], p[f"{name}_max"],
                p.get(f"{name}_points", p.get("points")), p[spacing_key or f"{name}_spacing"])


def _dynamics_regions(p, workers):
    spec = SweepSpec(Task.REGION_MAP, (_axis(p, "P"), _axis(p, "Delta")),
                     dict(kappa=p["kappa"], gamma=p["gamma"], direction=p["direction"]))
    cells = run_sweep(spec, workers)
    cols = ["P", "Delta", "region", "n_fixed_points", "hopf_crossed", "status"]
    return cols, [[c.P, c.Delta, c.region, c.n_fixed_points, c.hopf_crossed, c.status]
                  for c in cells]


def _dynamics_hopf(p, workers):
    base = dict(kappa=p["kappa"], gamma=p["gamma"], direction=p["direction"])
    if p["P_min"] is not None:
        base.update(P_min=p["P_min"], P_max=p["P_max"])
    rows = run_sweep(SweepSpec(Task.HOPF_TRACE, (Axis("Delta", explicit=p["Delta"]),), base), workers)
    return ["Delta", "P_hopf", "max_re_eig", "status"], [[r.Delta, r.P_hopf, r.max_re_eig, r.status]
                                                         for r in rows]


def network_from(p):
    """Resolve a network, filling ``auto`` couplings from the design rules."""
    kappa = p["kappa"]
    g1 = p["Gamma1"] if p.get("Gamma1") is not None else p["Gamma"]
    g2 = p["Gamma2"] if p.get("Gamma2") is not None else p["Gamma"]
    given = {k: p[k] for k in ("Jm", "J0", "G1", "G2") if p.get(k) is not None}
    if len(given) < 4:
        if g1 == g2:
            jm = given.get("Jm", None)
            jm = optimal_Jm(g1, kappa) if jm is None else jm
            d = optimal_design(g1, kappa, jm)
            auto = dict(Jm=jm, J0=d.J0, G1=d.G, G2=d.G)
        else:
            q = optimize_asymmetric(g1, g2, kappa, p["kappad"] / kappa, p["gamma_fraction"])
            auto = dict(Jm=q.Jm, J0=q.J0, G1=q.G1, G2=q.G2)
        given = dict(auto, **given)
    return NetworkParams.from_effective(g1, g2, kappad1=p["kappad"], gamma_fraction=p["gamma_fraction"],
                                        kappa1=kappa, kappa2=kappa, theta=p["theta"], **given)


def _scatter_spectrum(p, workers):
    params = network_from(p)
    if p["densify"]:
        grid = default_grid(params, p["points"], p["omega_min"], p["omega_max"])
    else:
        grid = np.linspace(p["omega_min"], p["omega_max"], p["points"])
    sp = spectrum(params, grid)
    return ["omega", "T_plus", "T_minus", "contrast"], np.column_stack(
        [sp.omega, sp.Tplus, sp.Tminus, sp.contrast]).tolist()


def _scatter_optimize(p, workers):
    kappa = p["kappa"]
    g1 = p["Gamma1"] if p["Gamma1"] is not None else p["Gamma"]
    g2 = p["Gamma2"] if p["Gamma2"] is not None else p["Gamma"]
    if g1 == g2:
        params, _ = symmetric_network(g1, kappa, kappad=p["kappad"] / kappa,
                                      gamma_fraction=p["gamma_fraction"])
    else:
        params = optimize_asymmetric(g1, g2, kappa, p["kappad"] / kappa, p["gamma_fraction"])
    m = metrics(params)
    cols = ["Gamma1", "Gamma2", "Jm", "G1", "G2", "J0", "theta", "omega_opt", "omega_peak",
            "T_plus", "T_minus", "insertion_loss_dB", "isolation_dB", "bandwidth", "status"]
    return cols, [[params.Gamma1, params.Gamma2, params.Jm, params.G1, params.G2, params.J0,
                   params.theta, interference_frequency(params), m.omega_peak, m.Tplus, m.Tminus,
                   m.insertion_loss_db, m.isolation_db, m.bandwidth, "ok"]]


def _scatter_gamma_sweep(p, workers):
    axis = _axis(p, "Gamma", "spacing", "Gamma_values")
    rows = run_sweep(SweepSpec(Task.GAMMA_SWEEP, (axis,),
                               dict(kappa=p["kappa"], kappad=p["kappad"] / p["kappa"])), workers)
    cols = ["Gamma", "Jm_opt", "bandwidth", "insertion_loss_dB", "isolation_dB", "omega_peak", "status"]
    return cols, [[r.Gamma, r.Jm_opt, r.bandwidth, r.insertion_loss_db, r.isolation_db,
                   r.omega_peak, r.status] for r in rows]


def _scatter_asym_map(p, workers):
    axes = (_axis(p, "Gamma1", "spacing", "Gamma1_values"),
            _axis(p, "Gamma2", "spacing", "Gamma2_values"))
    rows = run_sweep(SweepSpec(Task.ASYM_MAP, axes,
                               dict(kappa=p["kappa"], kappad=p["kappad"] / p["kappa"])), workers)
    cols = ["Gamma1", "Gamma2", "bandwidth", "insertion_loss_dB", "isolation_dB",
            "G1", "G2", "Jm", "J0", "status"]
    return cols, [[r.Gamma1, r.Gamma2, r.bandwidth, r.insertion_loss_db, r.isolation_db,
                   r.G1, r.G2, r.Jm, r.J0, r.status] for r in rows]


def _full_spectrum(p, workers):
    base = network_from(p)
    wm = p["ratio"] * p["kappa"]
    params = FullNetworkParams.from_network(base, wm)
    grid = wm + np.linspace(p["offset_min"], p["offset_max"], p["points"])
    w0 = wm + interference_frequency(base)
    if grid[0] <= w0 <= grid[-1]:
        grid = np.unique(np.append(grid, w0))
    cols = ["omega", "T_fwd", "T_bwd", "S_c1_vac", "S_c2_vac"]
    return cols, np.column_stack(full_spectrum(params, grid)).tolist()


def _full_sideband_sweep(p, workers):
    spec = SweepSpec(Task.SIDEBAND_SWEEP, (Axis("ratio", explicit=p["ratios"]),),
                     dict(Gamma=p["Gamma"], kappa=p["kappa"], kappad=p["kappad"], theta=p["theta"]))
    rows = run_sweep(spec, workers)
    cols = ["ratio", "isolation_dB", "S_vac", "S_c1_vac", "S_c2_vac", "T_fwd", "T_bwd",
            "P2_over_P3", "omega", "status"]
    return cols, [[r.ratio, r.isolation_db, r.S_vac, r.S_c1_vac, r.S_c2_vac, r.T_forward,
                   r.T_backward, r.P2_over_P3, r.omega, r.status] for r in rows]


HANDLERS = {
    "dynamics run": _dynamics_run,
    "dynamics fixed-points": _dynamics_fixed_points,
    "dynamics regions": _dynamics_regions,
    "dynamics hopf": _dynamics_hopf,
    "scatter spectrum": _scatter_spectrum,
    "scatter optimize": _scatter_optimize,
    "scatter gamma-sweep": _scatter_gamma_sweep,
    "scatter asym-map": _scatter_asym_map,
    "full spectrum": _full_spectrum,
    "full sideband-sweep": _full_sideband_sweep,
}
assert set(HANDLERS) == set(COMMANDS)


def execute(config, workers=None):
    """Run a validated config and return the rendered output text."""
    cols, rows = HANDLERS[config.command](config.parameters, workers)
    meta = dict(command=config.command,
                parameters=dict(line.split(" = ", 1) for line in config.to_text().splitlines()
                                if not line.startswith(("command =", "output =", "format ="))))
    return render(cols, rows, config.format, meta)


def run(config, workers=None, stdout=None, stderr=None):
    """Execute ``config``, write its data file and return the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        text = execute(config, workers)
    except ValidationError as exc:
        print(f"error: {config.command}: {exc}", file=stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {config.command}: {exc}", file=stderr)
        return 2
    if config.output_path in (None, "-"):
        stdout.write(text)
    else:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


def _parser():
    ap = argparse.ArgumentParser(prog="trimode", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"trimode {__version__}")
    ap.add_argument("group", choices=sorted({c.split()[0] for c in COMMANDS}))
    ap.add_argument("command")
    ap.add_argument("-c", "--config", help="key = value config file ('-' for stdin)")
    ap.add_argument("-s", "--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override one parameter (repeatable)")
    ap.add_argument("-o", "--output", help="output file (default stdout)")
    ap.add_argument("-f", "--format", choices=("csv", "json"))
    ap.add_argument("-w", "--workers", type=int, help="parallel workers for sweeps")
    ap.add_argument("--show-config", action="store_true",
                    help="print the resolved config, including defaults, and exit")
    return ap


def _short_warning(message, category, filename, lineno, line=None):
    return f"warning: {message}\n"


def main(argv=None):
    args = _parser().parse_args(argv)
    warnings.formatwarning = _short_warning
    command = f"{args.group} {args.command}"
    try:
        text = ""
        if args.config == "-":
            text = sys.stdin.read()
        elif args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        config = parse_config(text, command, args.set, args.output, args.format)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"error: {command}: {exc}", file=sys.stderr)
        return 1
    if args.show_config:
        sys.stdout.write(config.to_text())
        return 0
    if args.workers is not None and args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 1
    return run(config, args.workers)


if __name__ == "__main__":
    sys.exit(main())

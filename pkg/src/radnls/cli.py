"""Batch front door: parse a config, run one experiment, persist artifacts.

    radnls <command> --config <file> [--out <dir>] [--seed <int>] [--threads <int>]

Exit codes: 0 all verdicts pass, 1 verdict failure, 2 configuration error,
3 numerical failure.  The output directory may also come from RADNLS_OUT.
Every run writes a manifest (config echo, versions, wall time, verdicts);
failed runs leave partial artifacts plus a FAILED marker.
"""

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, critical, dynamics, thresholds, uniqueness
from .config import COMMANDS, ExperimentConfig, parse_config
from .elliptic import (
    find_ground_state_shooting,
    minimize_action,
    minimize_energy_constrained,
)
from .errors import ConfigError, RadnlsError
from .field import RadialField, h1_distance, rescale
from .functionals import functionals
from .grid import build_grid
from .profiles import ensure_dir, fmt, save_profile, write_csv, write_summary
from .spectral import ground_eigenpair

PLOT_KINDS = ("virial", "sweep", "profiles")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="radnls", description=__doc__)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            text = fh.read()
        config = parse_config(text, args.command)
    except (OSError, ConfigError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    config.out_dir = args.out or os.environ.get("RADNLS_OUT", ".")
    config.seed = args.seed
    config.threads = max(1, args.threads)
    return run(config)


def run(config: ExperimentConfig) -> int:
    out = ensure_dir(config.out_dir)
    t0 = time.time()
    verdicts = {}
    artifacts = []
    status = 0
    try:
        runner = _RUNNERS[config.command]
        runner(config, out, verdicts, artifacts)
    except ConfigError as exc:
        _fail_marker(out, f"configuration error: {exc}")
        print(f"configuration error: {exc}", file=sys.stderr)
        status = 2
    except (RadnlsError, FloatingPointError) as exc:
        _fail_marker(out, f"{config.command}: {type(exc).__name__}: {exc}")
        print(f"numerical failure in {config.command}: {exc}", file=sys.stderr)
        status = 3
    _write_manifest(out, config, verdicts, artifacts, time.time() - t0, status)
    if status:
        return status
    if not all(verdicts.values()):
        failed = [k for k, ok in verdicts.items() if not ok]
        print(f"verdict failure: {failed}", file=sys.stderr)
        return 1
    return 0


def _fail_marker(out, message):
    with open(os.path.join(out, "FAILED"), "w") as fh:
        fh.write(message + "\n")


def _write_manifest(out, config, verdicts, artifacts, wall, status):
    manifest = {
        "config": config.manifest_dict(),
        "defaults_used": config.defaults_used,
        "versions": {
            "radnls": __version__,
            "numpy": np.__version__,
            "backend": _backend(),
        },
        "wall_time_s": round(wall, 3),
        "verdicts": verdicts,
        "artifacts": artifacts,
        "status": status,
    }
    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _backend():
    from .kernels import backend_name

    return backend_name()


# ----------------------------------------------------------------------
# command runners
# ----------------------------------------------------------------------

def _grid_of(config):
    return build_grid(config.params.d, config.r_max, config.n)


def _run_eig(config, out, verdicts, artifacts):
    p = config.params
    grid = _grid_of(config)
    pair = ground_eigenpair(p, grid)
    path = os.path.join(out, "eigenfunction.profile")
    save_profile(path, pair.phi, p.sigma, p.alpha, tag="eigenfunction")
    artifacts.append(path)
    spath = os.path.join(out, "eig_summary.txt")
    write_summary(
        spath,
        {
            "d": p.d,
            "sigma": p.sigma,
            "coupling": p.coupling,
            "n": grid.n,
            "mu1": pair.mu1,
            "residual": pair.residual,
        },
    )
    artifacts.append(spath)
    verdicts["residual_small"] = pair.residual <= 1e-8
    verdicts["mu1_negative"] = pair.mu1 < 0 or p.coupling == 0


def _run_groundstate(config, out, verdicts, artifacts):
    p = config.params
    grid = _grid_of(config)
    omega = config.knobs["omega"]
    method = config.knobs["method"]
    if method not in ("shooting", "descent", "both"):
        raise ConfigError(f"key 'method': expected shooting|descent|both, got {method!r}")
    results = {}
    if method in ("shooting", "both"):
        results["shooting"] = find_ground_state_shooting(p, omega, grid)
    if method in ("descent", "both"):
        results["descent"] = minimize_action(p, omega, grid)
    rows = {}
    for name, gs in results.items():
        path = os.path.join(out, f"groundstate_{name}.profile")
        save_profile(path, gs.phi, p.sigma, p.alpha, tag=f"groundstate omega={fmt(omega)}")
        artifacts.append(path)
        rows[name] = gs
        verdicts[f"{name}_pohozaev"] = max(abs(r) for r in gs.pohozaev_residuals) <= 1e-6
        verdicts[f"{name}_d_positive"] = gs.action_d > 0
    if len(results) == 2:
        dist = h1_distance(results["shooting"].phi, results["descent"].phi)
        verdicts["cross_agreement"] = dist <= 1e-4
    spath = os.path.join(out, "groundstate_summary.txt")
    rec = {"omega": omega}
    for name, gs in rows.items():
        rec[f"{name}_d_omega"] = gs.action_d
        rec[f"{name}_pohozaev_1"] = gs.pohozaev_residuals[0]
        rec[f"{name}_pohozaev_2"] = gs.pohozaev_residuals[1]
        rec[f"{name}_iterations"] = gs.iterations
        rec[f"{name}_uniqueness_guaranteed"] = gs.uniqueness_guaranteed
    write_summary(spath, rec)
    artifacts.append(spath)


def _run_minimize(config, out, verdicts, artifacts):
    p = config.params
    grid = _grid_of(config)
    res = minimize_energy_constrained(p, config.knobs["a"], grid)
    path = os.path.join(out, "minimizer.profile")
    save_profile(path, res.v, p.sigma, p.alpha, tag=f"minimizer a={fmt(res.a)}")
    artifacts.append(path)
    spath = os.path.join(out, "minimize_summary.txt")
    write_summary(
        spath,
        {
            "kind": "minimize",
            "d": p.d,
            "sigma": p.sigma,
            "alpha": p.alpha,
            "a": res.a,
            "I_a": res.I_a,
            "lagrange_omega": res.lagrange_omega,
            "el_residual": res.el_residual,
            "iterations": res.flow_steps,
        },
    )
    artifacts.append(spath)
    vals = np.real(res.v.values)
    verdicts["mass_exact"] = abs(res.report.mass - res.a) <= 1e-10 * res.a
    verdicts["energy_negative"] = res.I_a < 0
    verdicts["el_residual"] = res.el_residual <= 1e-6
    verdicts["positive_decreasing"] = bool(np.all(vals > 0) and np.all(np.diff(vals) <= 1e-12))


def _run_classify(config, out, verdicts, artifacts):
    p = config.params
    grid = _grid_of(config)
    omega = config.knobs["omega"]
    gs = minimize_action(p, omega, grid)
    fields = thresholds.sample_family(gs, p, omega)

    def one(v):
        mem = thresholds.classify(v, p, omega, gs)
        rep = functionals(v, p, omega)
        bw = thresholds.b_omega_member(v, p, omega, gs)
        return mem, rep, bw

    if config.threads > 1:
        with ThreadPoolExecutor(config.threads) as ex:
            results = list(ex.map(one, fields))
    else:
        results = [one(v) for v in fields]
    rows = []
    agree = True
    for idx, (mem, rep, bw) in enumerate(results):
        kminus = mem.verdict == thresholds.VERDICT_KMINUS
        if not any(mem.boundary.values()):
            agree = agree and (kminus == bw)
        rows.append(
            [
                idx,
                rep.mass,
                rep.kinetic,
                rep.potential_G,
                rep.power_Lp,
                rep.action_S,
                rep.nehari_K,
                rep.virial_Q,
                mem.margins["mass"],
                mem.margins["action"],
                mem.margins["nehari"],
                mem.margins["virial"],
                mem.verdict,
            ]
        )
    path = os.path.join(out, "classify.csv")
    write_csv(
        path,
        [
            "index",
            "mass",
            "kinetic",
            "potential_G",
            "power_Lp",
            "action_S",
            "nehari_K",
            "virial_Q",
            "margin_mass",
            "margin_action",
            "margin_nehari",
            "margin_virial",
            "verdict",
        ],
        rows,
    )
    artifacts.append(path)
    verdicts["b_omega_equivalence"] = agree


def _run_evolve(config, out, verdicts, artifacts):
    p = config.params
    grid = _grid_of(config)
    omega = config.knobs["omega"]
    gs = minimize_action(p, omega, grid)
    u0 = rescale(gs.phi, config.knobs["scale"])
    if config.knobs["amplitude"] != 1.0:
        u0 = RadialField(grid, config.knobs["amplitude"] * u0.values)
    dt = config.knobs["dt"] or 0.5 * grid.h**2
    trace = dynamics.evolve(u0, p, dt, config.knobs["T"], n_records=config.knobs["records"])
    path = os.path.join(out, "trace.csv")
    write_csv(
        path,
        ["t", "mass", "energy", "variance", "virialQ", "gradnorm"],
        [
            [trace.times[i], trace.mass_t[i], trace.energy_t[i], trace.variance_t[i],
             trace.virialQ_t[i], trace.gradnorm_t[i]]
            for i in range(len(trace.times))
        ],
    )
    artifacts.append(path)
    span = trace.times[-1] - trace.times[0]
    drift = abs(trace.mass_t[-1] - trace.mass_t[0]) / trace.mass_t[0] / max(span, 1e-30)
    spath = os.path.join(out, "evolve_summary.txt")
    write_summary(
        spath,
        {
            "verdict": trace.verdict,
            "t_star": trace.t_star if trace.t_star is not None else "none",
            "truncated": trace.truncated,
            "mass_drift_per_time": drift,
            "dt_final": trace.dt_final,
        },
    )
    artifacts.append(spath)
    script = emit_plot_script(path, "virial", os.path.join(out, "plot_virial.py"))
    artifacts.append(script)
    verdicts["mass_conserved"] = drift <= 1e-10 or trace.truncated
    verdicts["verdict_reached"] = trace.verdict in ("global", "blewup")


def _run_critical_sweep(config, out, verdicts, artifacts):
    p = config.params
    if not p.mass_critical:
        raise ConfigError(f"key 'alpha': critical sweep needs alpha = 4/d = {4 / p.d:g}")
    records, fits = critical.run_critical_sweep(
        p, fractions=tuple(config.knobs["fractions"]), n=config.n
    )
    path = os.path.join(out, "sweep.csv")
    write_csv(
        path,
        ["a", "beta_a", "I_a", "G_va", "kinetic_va", "h1_error", "gradnorm"],
        [[r.a, r.beta_a, r.I_a, r.G_va, r.kinetic_va, r.h1_error, r.gradnorm] for r in records],
    )
    artifacts.append(path)
    spath = os.path.join(out, "sweep_summary.txt")
    K = critical.fit_scaling_constant(records, p.sigma)
    write_summary(
        spath,
        {
            "slope": fits["slope"],
            "slope_target": fits["slope_target"],
            "envelope_m": fits["envelope_m"],
            "envelope_M": fits["envelope_M"],
            "limit_value": fits["limit_value"],
            "limit_target": fits["limit_target"],
            "scaling_K": K,
        },
    )
    artifacts.append(spath)
    artifacts.append(emit_plot_script(path, "sweep", os.path.join(out, "plot_sweep.py"),
                                      slope=fits["slope"]))
    verdicts["slope_within_5pct"] = (
        abs(fits["slope"] - fits["slope_target"]) <= 0.05 * abs(fits["slope_target"])
    )
    verdicts["envelope_positive"] = 0 < fits["envelope_m"] <= fits["envelope_M"]
    div = critical.gradient_divergence_check(records, p.sigma)
    verdicts["gradient_divergence"] = div.holds
    ia = [r.I_a / r.a for r in records]
    verdicts["I_over_a_decreasing"] = all(ia[i + 1] < ia[i] for i in range(len(ia) - 1))


def _run_uniqueness(config, out, verdicts, artifacts):
    p = config.params
    report = uniqueness.check_conditions(p, config.knobs["omega"], config.knobs["c"])
    spath = os.path.join(out, "uniqueness_summary.txt")
    rec = {"r1": report.r1 if report.r1 is not None else "none",
           "sign_changes": report.sign_changes}
    for name, (ok, note) in report.conditions.items():
        rec[f"condition_{name}"] = f"{'pass' if ok else 'FAIL'} ({note})"
    write_summary(spath, rec)
    artifacts.append(spath)
    verdicts["all_conditions"] = report.all_pass


def _run_stability(config, out, verdicts, artifacts):
    p = config.params
    grid = _grid_of(config)
    res = dynamics.stability_experiment(
        p,
        config.knobs["a"],
        config.knobs["delta"],
        config.knobs["T"],
        config.knobs["trials"],
        seed=config.seed,
        grid=grid,
    )
    path = os.path.join(out, "stability.csv")
    write_csv(
        path,
        ["trial", "seed", "max_orbit_distance"],
        [[i, config.seed + i, d] for i, d in enumerate(res.trial_max)],
    )
    artifacts.append(path)
    spath = os.path.join(out, "stability_summary.txt")
    write_summary(
        spath,
        {
            "max_distance": res.max_distance,
            "blowup_trials": len(res.blowup_trials),
            "a": config.knobs["a"],
            "delta": config.knobs["delta"],
        },
    )
    artifacts.append(spath)
    verdicts["no_blowup"] = not res.blowup_trials
    verdicts["bounded_orbit"] = res.max_distance < float("inf")


_RUNNERS = {
    "eig": _run_eig,
    "groundstate": _run_groundstate,
    "minimize": _run_minimize,
    "classify": _run_classify,
    "evolve": _run_evolve,
    "critical-sweep": _run_critical_sweep,
    "uniqueness-check": _run_uniqueness,
    "stability": _run_stability,
}


# ----------------------------------------------------------------------
# plot-script emission
# ----------------------------------------------------------------------

def emit_plot_script(table: str, kind: str, out_path: str, slope: float | None = None) -> str:
    """Write a self-contained matplotlib script rendering one known table kind.

    Kinds: 'virial' (V(t) with the 8Q overlay), 'sweep' (log-log I/a against
    beta_a with the fitted line), 'profiles' (rescaled minimizer against the
    limit soliton profile).
    """
    if kind not in PLOT_KINDS:
        raise ConfigError(f"unknown plot kind {kind!r}; expected one of {PLOT_KINDS}")
    if not os.path.exists(table):
        raise ConfigError(f"table {table!r} does not exist")
    table_name = os.path.basename(table)
    if kind == "virial":
        body = f"""
import csv
import matplotlib.pyplot as plt
import numpy as np

with open({table_name!r}) as fh:
    rows = list(csv.DictReader(fh, skipinitialspace=True))
t = np.array([float(r["t"]) for r in rows])
V = np.array([float(r["variance"]) for r in rows])
Q = np.array([float(r["virialQ"]) for r in rows])
dt = t[1] - t[0]
d2V = (V[2:] - 2 * V[1:-1] + V[:-2]) / dt**2
fig, ax = plt.subplots(2, 1, sharex=True)
ax[0].plot(t, V, label="variance V(t)")
ax[0].legend()
ax[1].plot(t[1:-1], d2V, label="d2V/dt2")
ax[1].plot(t, 8 * Q, "--", label="8 Q(u(t))")
ax[1].legend()
ax[1].set_xlabel("t")
fig.savefig("virial.png", dpi=150)
"""
    elif kind == "sweep":
        annot = "" if slope is None else f'ax.set_title("fitted slope = {slope:.4f}")'
        body = f"""
import csv
import matplotlib.pyplot as plt
import numpy as np

with open({table_name!r}) as fh:
    rows = list(csv.DictReader(fh, skipinitialspace=True))
beta = np.array([float(r["beta_a"]) for r in rows])
ia = np.array([float(r["I_a"]) / float(r["a"]) for r in rows])
c = np.polyfit(np.log(beta), np.log(-ia), 1)
fig, ax = plt.subplots()
ax.loglog(beta, -ia, "o", label="-I(a)/a")
ax.loglog(beta, np.exp(np.polyval(c, np.log(beta))), "-",
          label=f"fit slope {{c[0]:.4f}}")
{annot}
ax.set_xlabel("beta_a")
ax.legend()
fig.savefig("sweep.png", dpi=150)
"""
    else:
        body = f"""
import csv
import matplotlib.pyplot as plt
import numpy as np

with open({table_name!r}) as fh:
    rows = list(csv.DictReader(fh, skipinitialspace=True))
r = np.array([float(row["r"]) for row in rows])
w = np.array([float(row["w_a"]) for row in rows])
lim = np.array([float(row["limit"]) for row in rows])
fig, ax = plt.subplots()
ax.plot(r, w, label="rescaled minimizer")
ax.plot(r, lim, "--", label="limit profile")
ax.set_xlabel("r")
ax.legend()
fig.savefig("profiles.png", dpi=150)
"""
    with open(out_path, "w") as fh:
        fh.write("# auto-generated plotting script; run next to " + table_name + "\n")
        fh.write(body.lstrip())
    return out_path


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface.

Subcommands cover the forward map (fluxes to Pauli coefficients), the
inverse map, junction-asymmetry correction of flux tables, schedule
simulation, spectrum traces, and basis/truncation convergence checks.

Exit codes: 0 success, 2 unusable config or input file, 3 numerical
failure (effective model undefined, integrator stall, no oscillation
window, no matching junction branch), 4 finished but not converged.
"""

import argparse
import dataclasses
import json
import pathlib
import sys

import numpy as np

from . import io as fio
from ._version import __version__
from .composite import (
    DEFAULT_TRUNCATION,
    TopologyError,
    check_truncation_convergence,
    resolve_basis,
)
from .config import ConfigError, RunConfig
from .dynamics import (
    StepSizeError,
    WindowError,
    adiabatic_time,
    evolve,
    gap_minima,
    measure_oscillation,
    spectrum_trace,
)
from .elements import DomainParameterError, check_element_convergence
from .inversion import (
    BranchError,
    UnreachableCouplingError,
    correct_table,
    forward_schedule,
    invert_schedule,
)
from .io import FileFormatError
from .pauli import GaugeUndefinedError, SwUndefinedError
from .presets import get_preset, preset_names
from .schedules import ScheduleParameterError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_NOT_CONVERGED = 4

_CONFIG_ERRORS = (
    ConfigError,
    FileFormatError,
    ScheduleParameterError,
    DomainParameterError,
    TopologyError,
)
_NUMERIC_ERRORS = (
    SwUndefinedError,
    GaugeUndefinedError,
    StepSizeError,
    WindowError,
    BranchError,
)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="fluxsched",
        description="Flux-bias against Pauli-coefficient schedule compiler.",
    )
    parser.add_argument("--version", action="version", version=f"fluxsched {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML or JSON config file")
    common.add_argument(
        "--preset",
        metavar="NAME",
        help=f"stock config, one of: {', '.join(preset_names())}",
    )
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--seed", type=int, metavar="N", help="RNG seed")
    common.add_argument("--method", choices=["full", "pairwise", "both"])
    common.add_argument(
        "--asymmetry", type=float, metavar="D", help="junction asymmetry d"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser(
        "forward", parents=[common], help="flux table to Pauli coefficients"
    )
    sub.add_parser(
        "invert", parents=[common], help="Pauli schedule to flux table"
    )
    sub.add_parser(
        "correct-asymmetry",
        parents=[common],
        help="rewrite a flux table for asymmetric junctions",
    )
    sub.add_parser(
        "simulate", parents=[common], help="integrate qubit-model dynamics"
    )
    sub.add_parser("spectrum", parents=[common], help="trace low eigenenergies")
    sub.add_parser(
        "check-convergence",
        parents=[common],
        help="verify basis and truncation cutoffs",
    )
    return parser


def _load_config(args):
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        cfg = RunConfig.load(args.config)
    elif args.preset:
        try:
            raw = get_preset(args.preset)
        except KeyError as err:
            raise ConfigError(str(err)) from None
        cfg = RunConfig(raw, source=f"preset:{args.preset}")
    else:
        raise ConfigError("a config is required: pass --config PATH or --preset NAME")
    cfg.override_task(
        out=args.out, seed=args.seed, method=args.method, asymmetry=args.asymmetry
    )
    return cfg


def _out_dir(cfg):
    out = pathlib.Path(cfg.task("out", "fluxsched-out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _truncations(cfg, topology):
    per_kind = cfg.truncations()
    if per_kind is None:
        return None
    return tuple(
        per_kind.get(e.kind, DEFAULT_TRUNCATION[e.kind]) for e in topology.elements
    )


def _flux_table(cfg, topology):
    path = cfg.task("flux_file")
    if path:
        return fio.read_flux_table(path)
    return cfg.flux_table(topology.n_elements)


# ---------------------------------------------------------------------------
# subcommands


def cmd_forward(cfg, out):
    topology = cfg.topology()
    basis = cfg.basis()
    trunc = _truncations(cfg, topology)
    table = _flux_table(cfg, topology)
    methods = {"full": ["full"], "pairwise": ["pairwise"], "both": ["full", "pairwise"]}[
        cfg.task("method", "full")
    ]
    failures = {}
    for method in methods:
        sched, diag = forward_schedule(
            topology, table, method=method, truncations=trunc, basis=basis
        )
        failures[method] = diag["failures"]
        if sched is not None:
            fio.write_pauli_schedule(out / f"pauli_{method}.csv", sched, cfg.hash())
    fio.write_summary(
        out / "summary.json",
        {"command": "forward", "methods": methods, "failures": failures},
        cfg.hash(),
    )
    bad = [(m, f) for m in methods for f in failures[m]]
    if bad:
        for method, (idx, s, msg) in bad:
            print(
                f"effective model undefined ({method}) at point {idx} (s={s:g}): {msg}",
                file=sys.stderr,
            )
        return EXIT_NUMERIC
    return EXIT_OK


def _result_row(res):
    return {
        "converged": bool(res.converged),
        "cost": float(res.cost),
        "n_evals": int(res.n_evals),
        "active_bounds": list(res.active_bounds),
        "message": res.message,
    }


def cmd_invert(cfg, out):
    topology = cfg.topology()
    basis = cfg.basis()
    trunc = _truncations(cfg, topology)
    target_path = cfg.task("target_file")
    if target_path:
        target = fio.read_pauli_schedule(target_path)
    else:
        target, _, _ = cfg.schedule()
    method = cfg.task("method", "full")
    if method == "both":
        raise ConfigError("invert needs a single method, full or pairwise")
    rng = np.random.default_rng(cfg.task("seed", 0))
    try:
        table, results = invert_schedule(
            target,
            topology,
            method=method,
            cell=cfg.cell(),
            truncations=trunc,
            basis=basis,
            rng=rng,
            tol=cfg.task("tol", 1e-8),
        )
    except UnreachableCouplingError as err:
        fio.write_summary(
            out / "report.json",
            {
                "command": "invert",
                "method": method,
                "error": str(err),
                "achievable_coupling": err.achievable,
            },
            cfg.hash(),
        )
        print(f"coupler under-drive: {err}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    fio.write_flux_table(out / "fluxes.csv", table, cfg.hash())
    rows = [
        dict(s=float(s), **_result_row(res)) for s, res in zip(target.s, results)
    ]
    n_bad = sum(not r["converged"] for r in rows)
    fio.write_summary(
        out / "report.json",
        {
            "command": "invert",
            "method": method,
            "points": rows,
            "n_not_converged": n_bad,
        },
        cfg.hash(),
    )
    d = cfg.task("asymmetry", 0.0)
    if d:
        fio.write_flux_table(out / "fluxes_asym.csv", correct_table(table, d), cfg.hash())
    if n_bad:
        print(f"{n_bad} of {len(rows)} points not converged", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_correct_asymmetry(cfg, out):
    d = cfg.task("asymmetry")
    if not d:
        raise ConfigError("correct-asymmetry needs a nonzero --asymmetry value")
    path = cfg.task("flux_file")
    if path:
        table = fio.read_flux_table(path)
    else:
        table = cfg.flux_table(len(cfg.require("flux")["elements"]))
    corrected = correct_table(table, d)
    fio.write_flux_table(out / "fluxes_corrected.csv", corrected, cfg.hash())
    fio.write_summary(
        out / "summary.json",
        {
            "command": "correct-asymmetry",
            "asymmetry": d,
            "n_points": corrected.n_points,
        },
        cfg.hash(),
    )
    return EXIT_OK


def cmd_simulate(cfg, out):
    schedule, report, params = cfg.schedule()
    study = cfg.task("study", "single")
    summary = {"command": "simulate", "study": study}
    if report:
        summary["schedule_report"] = report

    if study == "single":
        t_a = cfg.task("t_a")
        if t_a is None:
            raise ConfigError("study 'single' needs task.t_a (ns)")
        res = evolve(schedule, t_a)
        fio.write_population_trace(
            out / "populations.csv", [res.t_a], res.populations[None, :], cfg.hash()
        )
        summary.update(
            t_a=res.t_a,
            ground_population=res.ground_population(),
            populations=res.populations,
            norm_error=res.norm_error,
        )
    elif study == "oscillation":
        expected = cfg.task("expected_period", getattr(params, "t_osc", None))
        osc = measure_oscillation(
            schedule,
            expected_period=expected,
            n_periods=cfg.task("n_periods", 6),
            samples_per_period=cfg.task("samples_per_period", 40),
        )
        fio.write_population_trace(
            out / "populations.csv", osc.t_grid, osc.p_g, cfg.hash()
        )
        summary.update(
            t_osc_measured=osc.period,
            t_osc_expected=expected,
            contrast=osc.contrast,
            n_peaks=len(osc.peaks),
        )
    elif study == "adiabatic":
        if not hasattr(params, "lam"):
            raise ConfigError("study 'adiabatic' needs the avoided-crossing family")
        lambdas = cfg.task("lambdas", [params.lam])
        threshold = cfg.task("threshold", 0.98)
        sweeps = cfg.task("sweeps", ["linear"])
        t_ad = {}
        slopes = {}
        for sweep in sweeps:
            times = []
            for lam in lambdas:
                gadget = dataclasses.replace(params, lam=lam, sweep=sweep)
                times.append(adiabatic_time(gadget, threshold)["t_ad"])
            t_ad[sweep] = times
            if len(lambdas) > 1:
                slopes[sweep] = float(
                    np.polyfit(np.log(lambdas), np.log(times), 1)[0]
                )
        summary.update(
            lambdas=list(lambdas), threshold=threshold, t_ad=t_ad, slopes=slopes
        )
    fio.write_summary(out / "summary.json", summary, cfg.hash())
    return EXIT_OK


def cmd_spectrum(cfg, out):
    k = cfg.task("levels", 4)
    raw = cfg.raw
    if "topology" in raw and ("flux" in raw or cfg.task("flux_file")):
        topology = cfg.topology()
        source = (topology, _flux_table(cfg, topology))
        trace = spectrum_trace(
            source, k, truncations=_truncations(cfg, topology), basis=cfg.basis()
        )
    else:
        schedule, _, _ = cfg.schedule()
        trace = spectrum_trace(schedule, k)
    fio.write_spectrum(out / "spectrum.csv", trace["s"], trace["energies"], cfg.hash())
    minima = gap_minima(trace["s"], trace["energies_sorted"])
    fio.write_summary(
        out / "summary.json",
        {
            "command": "spectrum",
            "levels": k,
            "gap_minima": [{"s": s, "gap": g} for s, g in minima],
        },
        cfg.hash(),
    )
    return EXIT_OK


def cmd_check_convergence(cfg, out):
    topology = cfg.topology()
    basis = cfg.basis()
    if not (cfg.task("flux_file") or "flux" in cfg.raw):
        raise ConfigError("check-convergence needs a flux section or flux_file")
    table = _flux_table(cfg, topology)
    idx = sorted({0, table.n_points // 2, table.n_points - 1})
    bias_sets = [table.biases(i) for i in idx]
    element_reports = []
    all_ok = True
    for k, params in enumerate(topology.elements):
        biases = [bs[k] for bs in bias_sets]
        rep = check_element_convergence(
            params, biases, basis=resolve_basis(basis, params.kind)
        )
        all_ok &= rep["converged"]
        element_reports.append(
            {
                "element": k,
                "kind": params.kind,
                "converged": rep["converged"],
                "basis": dataclasses.asdict(rep["basis"]),
                "history": [
                    {"basis": dataclasses.asdict(b), "max_change": c}
                    for b, c in rep["history"]
                ],
            }
        )
    truncation_reports = []
    if topology.n_elements > 1:
        for bs in bias_sets:
            rep = check_truncation_convergence(
                topology, bs, truncations=_truncations(cfg, topology), basis=basis
            )
            all_ok &= rep["converged"]
            truncation_reports.append(
                {
                    "converged": rep["converged"],
                    "truncations": list(rep["truncations"]),
                    "history": [
                        {"truncations": list(t), "max_change": c}
                        for t, c in rep["history"]
                    ],
                }
            )
    payload = {
        "command": "check-convergence",
        "converged": bool(all_ok),
        "elements": element_reports,
        "truncations": truncation_reports,
    }
    with open(out / "convergence.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK if all_ok else EXIT_NOT_CONVERGED


_HANDLERS = {
    "forward": cmd_forward,
    "invert": cmd_invert,
    "correct-asymmetry": cmd_correct_asymmetry,
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "check-convergence": cmd_check_convergence,
}


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        out = _out_dir(cfg)
        return _HANDLERS[args.command](cfg, out)
    except _CONFIG_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except UnreachableCouplingError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

    chi2spectral {f2-baseline,podd-surface,f2-vs-n,gate,validate}
                 [--config PATH] [--out PATH] [--seed U64] [--grid N] [--tol FLOAT]

Reports are JSON with a ``header`` block; gridded data are comma-delimited
with ``# key=value`` metadata lines, one column-header line, then rows.
Exit status: 0 success, 1 numeric failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict

import numpy as np

from . import __version__, bellgate, conversion, poling, series
from .config import config_hash, load_config, resolve
from .errors import Chi2Error, ConfigError
from .spectral import CrystalConfig, DispersionProfile

logger = logging.getLogger("chi2spectral")

TOOL = "chi2spectral"


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _profile(cfg) -> DispersionProfile:
    p = cfg["profile"]
    if p.get("kp_p") is None:
        return DispersionProfile.extended_phase_matched(p["kp_s"], p["kp_i"])
    return DispersionProfile(p["kp_s"], p["kp_i"], p["kp_p"])


def _crystal(cfg, profile: DispersionProfile) -> CrystalConfig:
    L = cfg["crystal"]["L"]
    if L == "special":
        L = conversion.optimal_conditions(profile, cfg["sigma"]).L
    return CrystalConfig(float(L), cfg["sigma"])


def _header(command: str, cfg: dict) -> dict:
    return {"tool": TOOL, "version": __version__, "command": command, "config_hash": config_hash(cfg), "parameters": cfg}


def _fmt(x) -> str:
    return format(float(x), ".12g")


def _flatten(prefix: str, obj) -> list[tuple[str, str]]:
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out += _flatten(f"{prefix}.{k}" if prefix else k, obj[k])
        return out
    if isinstance(obj, list):
        return [(prefix, ";".join(str(v) for v in obj))]
    return [(prefix, "null" if obj is None else str(obj))]


def _data_text(command: str, cfg: dict, summary: dict, columns: list[str], rows) -> str:
    head = _header(command, cfg)
    lines = [f"# tool={head['tool']}", f"# version={head['version']}", f"# command={command}",
             f"# config_hash={head['config_hash']}"]
    lines += [f"# param.{k}={v}" for k, v in _flatten("", cfg)]
    lines += [f"# summary.{k}={v}" for k, v in _flatten("", summary)]
    lines.append(",".join(columns))
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _json_text(command: str, cfg: dict, result: dict) -> str:
    return json.dumps({"header": _header(command, cfg), "result": result}, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not serializable: {type(obj)}")


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _qubit(amps) -> np.ndarray:
    v = np.array([complex(str(a).replace(" ", "")) if isinstance(a, str) else complex(a) for a in amps])
    n = np.linalg.norm(v)
    if n == 0:
        raise ConfigError("qubit amplitudes must not both be zero")
    return v / n


def _nan_to_none(x):
    return None if isinstance(x, float) and math.isnan(x) else x


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_f2_baseline(cfg: dict) -> tuple[str, int]:
    profile = _profile(cfg)
    crystal = _crystal(cfg, profile)
    centered = cfg["frame"] == "centered"
    rep = series.fidelity_f2(profile, crystal, rel_tol=cfg["f2"]["rel_tol"], extent=cfg["f2"]["extent"], centered=centered)
    d_s, d_i = crystal.d_params(profile)
    result = {
        "f2": rep.f2,
        "taylor_norm": rep.taylor_norm,
        "dyson_norm": rep.dyson_norm,
        "overlap_phase": rep.overlap_phase,
        "quadrature_error_estimate": rep.quadrature_error_estimate,
        "nodes": list(rep.nodes),
        "normalization": rep.normalization,
        "L": crystal.L,
        "d_s": d_s,
        "d_i": d_i,
        "frame": cfg["frame"],
    }
    if cfg["f2"]["grid"] and centered:
        result["f2_grid"] = series.fidelity_f2_grid(profile, crystal, count=cfg["f2"]["grid"], extent=cfg["f2"]["extent"])
    return _json_text("f2-baseline", cfg, result), 0


def cmd_podd_surface(cfg: dict) -> tuple[str, int]:
    axis, surf = conversion.podd_surface(cfg["surface"]["grid"], cfg["surface"]["extent"])
    peaks = conversion.surface_maxima(axis, surf)
    summary = {
        "grid": f"{axis.size}x{axis.size}",
        "grid_max": _fmt(surf.max()),
        "diagonal_max": _fmt(np.max(np.diag(surf))),
    }
    for k, (gpt, gval, rpt, rval) in enumerate(peaks, 1):
        summary[f"argmax{k}.grid"] = f"{_fmt(gpt[0])};{_fmt(gpt[1])}"
        summary[f"argmax{k}.grid_value"] = _fmt(gval)
        summary[f"argmax{k}.refined"] = f"{_fmt(rpt[0])};{_fmt(rpt[1])}"
        summary[f"argmax{k}.refined_value"] = _fmt(rval)
    ds, di = np.meshgrid(axis, axis, indexing="ij")
    rows = np.column_stack([ds.ravel(), di.ravel(), surf.ravel()])
    return _data_text("podd-surface", cfg, summary, ["d_s", "d_i", "p_odd"], rows), 0


def cmd_f2_vs_n(cfg: dict) -> tuple[str, int]:
    profile = _profile(cfg)
    pc = cfg["poling"]
    rows = []
    for n in pc["n_list"]:
        rep = poling.f2_of_n_report(n, profile, cfg["sigma"], centered=cfg["frame"] == "centered", flat_sinc=pc["flat_sinc"],
                                    method=pc["method"], rel_tol=cfg["f2"]["rel_tol"], extent=cfg["f2"]["extent"])
        rows.append((n, rep.f2, rep.quadrature_error_estimate))
    ordered = sorted(rows)
    mono = all(b[1] >= a[1] - 1e-9 for a, b in zip(ordered, ordered[1:]))
    summary = {"nondecreasing": str(mono).lower(), "method": pc["method"]}
    return _data_text("f2-vs-n", cfg, summary, ["N", "f2", "quadrature_error"], rows), 0


def cmd_gate(cfg: dict) -> tuple[str, int]:
    g = cfg["gate"]
    seed = cfg["seed"]
    source = "config"
    if g["p_odd"] is not None:
        plist = [g["p_odd"]]
    elif g["p_list"] is not None:
        plist = list(g["p_list"])
    else:
        profile = _profile(cfg)
        crystal = _crystal(cfg, profile)
        plist = [conversion.p_odd(crystal, profile, cfg["crystal"]["rabi_angle"]).p_odd]
        source = "dispersion"
    control, target = _qubit(g["control"]), _qubit(g["target"])
    points = []
    for k, p in enumerate(plist):
        rate, se, wrong = bellgate.bell_monte_carlo(p, g["bell_trials"], seed=(seed + 2 * k) % 2**64)
        bell_expected = bellgate.bell_success_probability(p)
        run = bellgate.teleport_cnot(control, target, p, rng_seed=(seed + 2 * k + 1) % 2**64, trials=g["trials"])
        gate_expected = 0.25 * (1.0 + p) ** 2
        gate_se = math.sqrt(gate_expected * (1.0 - gate_expected) / run.trials)
        points.append({
            "p_odd": p,
            "bell": {"trials": g["bell_trials"], "empirical": rate, "analytic": bell_expected,
                     "standard_error": math.sqrt(bell_expected * (1 - bell_expected) / g["bell_trials"]),
                     "within_3se": abs(rate - bell_expected) <= 3 * max(se, 1e-15), "misclassified": wrong},
            "gate": {"trials": run.trials, "successes": run.successes, "empirical": run.success_rate,
                     "analytic": gate_expected, "standard_error": gate_se,
                     "within_3se": abs(run.success_rate - gate_expected) <= 3 * max(gate_se, 1e-15),
                     "conditional_output_fidelity": _nan_to_none(run.conditional_output_fidelity)},
        })
    result = {"p_odd_source": source, "control": [[z.real, z.imag] for z in control],
              "target": [[z.real, z.imag] for z in target], "points": points}
    return _json_text("gate", cfg, result), 0


def cmd_validate(cfg: dict, inject_gamma: float | None = None) -> tuple[str, int]:
    from .validate import run_validation, suite_passed

    results = run_validation(seed=cfg["seed"], tol=cfg["f2"]["rel_tol"], grid=cfg["validate"]["grid"], inject_gamma=inject_gamma)
    ok = suite_passed(results)
    checks = []
    for r in results:
        d = asdict(r)
        d.pop("seconds")
        d["measured"] = _nan_to_none(d["measured"])
        d["tolerance"] = _nan_to_none(d["tolerance"])
        checks.append(d)
    gating = [r for r in results if not r.advisory]
    result = {
        "passed": ok,
        "checks_total": len(results),
        "checks_gating": len(gating),
        "checks_failed": [r.name for r in gating if not r.passed],
        "advisory_failed": [r.name for r in results if r.advisory and not r.passed],
        "inject_gamma": inject_gamma,
        "checks": checks,
    }
    return _json_text("validate", cfg, result), 0 if ok else 1


COMMANDS = {
    "f2-baseline": cmd_f2_baseline,
    "podd-surface": cmd_podd_surface,
    "f2-vs-n": cmd_f2_vs_n,
    "gate": cmd_gate,
    "validate": cmd_validate,
}


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML or JSON run configuration")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--seed", type=_u64, metavar="U64", help="master random seed")
    common.add_argument("--grid", type=_positive_int, metavar="N",
                        help="grid size: P(odd) surface side, F2 grid-state cross-check, or validation grid")
    common.add_argument("--tol", type=_positive_float, metavar="FLOAT", help="relative tolerance of the F2 quadrature")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(prog=TOOL, description="Taylor vs Dyson fidelity, up-conversion and chi(2) Bell gate numerics")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("f2-baseline", parents=[common], help="second-order Taylor/Dyson fidelity")
    sub.add_parser("podd-surface", parents=[common], help="P(odd) over (d_s, d_i)")
    sub.add_parser("f2-vs-n", parents=[common], help="F2 against the number of poled segments")
    sub.add_parser("gate", parents=[common], help="Bell analyzer and teleported CNOT Monte Carlo")
    val = sub.add_parser("validate", parents=[common], help="oracle and invariant suite")
    val.add_argument("--inject-gamma", type=float, metavar="FLOAT", help="self-test: run with gamma replaced by this value")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve(load_config(args.config), seed=args.seed, grid=args.grid, tol=args.tol, command=args.command)
        if args.command == "validate":
            text, code = cmd_validate(cfg, inject_gamma=args.inject_gamma)
        else:
            text, code = COMMANDS[args.command](cfg)
        _emit(text, args.out)
        return code
    except ConfigError as exc:
        print(f"{TOOL}: config error: {exc}", file=sys.stderr)
        return 2
    except (Chi2Error, ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"{TOOL}: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"{TOOL}: cannot write output: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

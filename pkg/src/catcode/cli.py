"""Command-line experiment runner.

Every command turns its arguments into a :class:`RunConfig`, runs it, and
writes the config alongside the results, so ``catcode --config <file>``
reproduces a run from its own output. Exit codes: 0 success, 2 usage
error, 3 numerical-contract violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import adiabatic, codecheck, config, qec
from .config import RunConfig
from .errors import NumericalContractError
from .hilbert import CatParity, FockSpace, default_dim

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise argparse.ArgumentTypeError("expected a non-empty comma-separated list")
    try:
        return [float(s) for s in items]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fmt(x: float) -> str:
    # 17 significant digits round-trip doubles exactly
    return format(x, ".17g")


def _config_line(cfg: RunConfig) -> str:
    return "# config=" + cfg.to_json() + "\n"


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _as_list(value) -> list[float]:
    if value is None:
        return []
    return list(value) if isinstance(value, (list, tuple)) else [value]


def run_ratios(cfg: RunConfig) -> str:
    alphas, etas = _as_list(cfg.alpha), _as_list(cfg.eta)
    if not alphas or not etas:
        raise UsageError("ratios needs at least one alpha and one eta")
    tol = codecheck.DEFAULT_TOLERANCE if cfg.tolerance is None else cfg.tolerance
    header = ["alpha", "eta", "ratio13_closed", "ratio14_closed",
              "ratio13_exact", "ratio14_exact", "kl_pass"]
    rows = []
    for a in alphas:
        space = FockSpace(cfg.dim) if cfg.dim else codecheck.codecheck_space(a)
        for e in etas:
            report = codecheck.cat_code_report(a, e, kmax=1, tolerance=tol, space=space)
            rows.append([
                a, e,
                codecheck.kl_ratio_no_jump(a, e),
                codecheck.kl_ratio_jump(a, e),
                codecheck.kl_ratio_exact(a, e, 0, space),
                codecheck.kl_ratio_exact(a, e, 1, space),
                report.passed,
            ])
    if cfg.format == "json":
        return json.dumps(
            {"config": cfg.to_dict(), "rows": [dict(zip(header, r)) for r in rows]},
            indent=2, sort_keys=True,
        ) + "\n"
    if cfg.format == "csv":
        buf = io.StringIO()
        buf.write(_config_line(cfg))
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, float) else v for v in r])
        return buf.getvalue()
    lines = [_config_line(cfg).rstrip("\n"), "  ".join(f"{h:>20}" for h in header)]
    for r in rows:
        lines.append("  ".join(f"{(repr(v) if isinstance(v, float) else str(v)):>20}" for v in r))
    lines.append(
        f"# kl_pass: Knill-Laflamme check on normalized code words, k <= 1, tolerance {tol:g}"
    )
    return "\n".join(lines) + "\n"


def _adiabatic_space(cfg: RunConfig, schedule) -> FockSpace:
    if cfg.dim:
        return FockSpace(cfg.dim)
    kappa_max = schedule(cfg.t_final)
    return FockSpace(max(config.ADIABATIC_DIM, default_dim(math.sqrt(kappa_max / cfg.chi))))


def run_adiabatic(cfg: RunConfig) -> tuple[str, str]:
    """Returns (csv text, summary json text)."""
    if not cfg.schedule:
        raise UsageError("adiabatic needs --schedule")
    try:
        schedule = adiabatic.parse_schedule(cfg.schedule)
        parity = CatParity.parse(cfg.parity)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from None
    space = _adiabatic_space(cfg, schedule)
    traj = adiabatic.evolve_schedule(
        space, cfg.chi, schedule, parity, cfg.t_final, cfg.dt, cfg.sample_every
    )
    buf = io.StringIO()
    buf.write(_config_line(cfg))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "kappa", "fidelity", "norm_error", "parity_leakage"])
    for s in traj.samples:
        w.writerow([_fmt(s.t), _fmt(s.kappa), _fmt(s.fidelity), _fmt(s.norm_error),
                    _fmt(s.parity_leakage)])
    summary = {"config": cfg.to_dict(), "dim": space.dim, "samples": len(traj.samples),
               "final_fidelity": traj.final.fidelity}
    try:
        mean, osc = adiabatic.steady_state_fidelity(traj, cfg.tail_fraction)
        summary.update(steady_state_mean=mean, oscillation_amplitude=osc)
    except adiabatic.InsufficientSamplesError as exc:
        summary.update(steady_state_mean=None, oscillation_amplitude=None, note=str(exc))
    return buf.getvalue(), json.dumps(summary, indent=2, sort_keys=True) + "\n"


def _parse_logical(values) -> tuple[complex, complex]:
    if len(values) != 2:
        raise UsageError("logical state needs exactly two amplitudes")
    c0, c1 = (complex(v) if not isinstance(v, (int, float)) else v for v in values)
    norm = math.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
    if norm == 0:
        raise UsageError("logical amplitudes cannot both vanish")
    return c0 / norm, c1 / norm


def _resolve_decay(cfg: RunConfig) -> tuple[float, float]:
    if cfg.gamma is not None and cfg.t is not None:
        return cfg.gamma, cfg.t
    etas = _as_list(cfg.eta)
    if len(etas) == 1 and 0 < etas[0] <= 1:
        return -math.log(etas[0]), 1.0
    raise UsageError("give either --eta or both --gamma and --t")


def run_qec(cfg: RunConfig) -> str:
    alphas = _as_list(cfg.alpha)
    if len(alphas) != 1 or alphas[0] <= 0:
        raise UsageError("qec needs a single positive --alpha")
    if cfg.trials is None or cfg.trials < 1:
        raise UsageError("qec needs --trials >= 1")
    if cfg.gate_mode not in qec.GATE_MODES:
        raise UsageError(f"gate mode must be one of {qec.GATE_MODES}")
    gamma, t = _resolve_decay(cfg)
    c0, c1 = _parse_logical(cfg.logical)
    alpha = alphas[0]
    space = FockSpace(cfg.dim or default_dim(alpha))
    logical = qec.LogicalQubitState(c0, c1, alpha)
    summary = qec.monte_carlo_protection(
        logical, alpha, gamma, t, cfg.trials, cfg.seed or 0, cfg.gate_mode, space,
        cfg.eta_ld, cfg.ion_coefficient,
    )
    out = summary.to_dict()
    out["config"] = cfg.to_dict()
    return json.dumps(out, indent=2, sort_keys=True) + "\n"


def run_reset_budget(cfg: RunConfig) -> str:
    alphas = _as_list(cfg.alpha)
    if len(alphas) != 1 or cfg.gamma is None or cfg.tolerance is None:
        raise UsageError("reset-budget needs --alpha0, --gamma and --tolerance")
    try:
        b = codecheck.reset_budget(alphas[0], cfg.gamma, cfg.tolerance)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = {"config": cfg.to_dict(), "L": b.L, "t_max": b.t_max}
    if not b.usable:
        result["note"] = (
            "alpha0^2 does not exceed L: the code words are already too close "
            "for this tolerance, reset before computing"
        )
    if cfg.format == "json":
        return json.dumps(result, indent=2, sort_keys=True) + "\n"
    lines = [_config_line(cfg).rstrip("\n"), f"L      {b.L!r}", f"t_max  {b.t_max!r}"]
    if "note" in result:
        lines.append("note   " + result["note"])
    return "\n".join(lines) + "\n"


def execute(cfg: RunConfig) -> None:
    if cfg.experiment == "ratios":
        _emit(run_ratios(cfg), cfg.out)
    elif cfg.experiment == "adiabatic":
        table, summary = run_adiabatic(cfg)
        if cfg.out:
            _emit(table, cfg.out)
            _emit(summary, str(Path(cfg.out).with_suffix(".summary.json")))
        else:
            _emit(summary, None)
    elif cfg.experiment == "qec":
        _emit(run_qec(cfg), cfg.out)
    elif cfg.experiment == "reset-budget":
        _emit(run_reset_budget(cfg), cfg.out)
    else:
        raise UsageError(f"unknown experiment {cfg.experiment!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="catcode", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON run config (as echoed in any output)")
    sub = p.add_subparsers(dest="experiment")

    r = sub.add_parser("ratios", help="no-decay / one-decay probability ratios")
    r.add_argument("--alpha", type=_float_list, required=True)
    r.add_argument("--eta", type=_float_list, required=True)
    r.add_argument("--tolerance", type=float)
    r.add_argument("--dim", type=int)
    r.add_argument("--format", choices=["table", "csv", "json"], default="table")
    r.add_argument("--out")

    a = sub.add_parser("adiabatic", help="adiabatic cat preparation")
    a.add_argument("--schedule", required=True,
                   help="linear:rate=<f> | tanh:k0=<f>,lambda=<f>")
    a.add_argument("--chi", type=float, default=config.CHI)
    a.add_argument("--t-final", type=float, default=config.ADIABATIC_T_FINAL)
    a.add_argument("--dt", type=float, default=config.ADIABATIC_DT)
    a.add_argument("--parity", choices=["even", "odd"], default="odd")
    a.add_argument("--dim", type=int)
    a.add_argument("--sample-every", type=int, default=config.SAMPLE_EVERY)
    a.add_argument("--tail-fraction", type=float, default=config.TAIL_FRACTION)
    a.add_argument("--out", help="CSV path; the summary goes next to it as .summary.json")

    q = sub.add_parser("qec", help="Monte Carlo of the bit-flip protection circuit")
    q.add_argument("--alpha", type=float, required=True)
    q.add_argument("--eta", type=float)
    q.add_argument("--gamma", type=float)
    q.add_argument("--t", type=float)
    q.add_argument("--trials", type=int, default=1000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--gate-mode", choices=list(qec.GATE_MODES), default="exact")
    q.add_argument("--eta-ld", type=float, default=config.ETA_LD)
    q.add_argument("--ion-coefficient", type=float, default=config.ION_COEFFICIENT)
    q.add_argument("--logical", default="1,0", help="c0,c1 (complex allowed, e.g. 0.6,0.8j)")
    q.add_argument("--dim", type=int)
    q.add_argument("--out")

    b = sub.add_parser("reset-budget", help="time available before the code must be reset")
    b.add_argument("--alpha0", type=float, required=True)
    b.add_argument("--gamma", type=float, required=True)
    b.add_argument("--tolerance", type=float, required=True)
    b.add_argument("--format", choices=["table", "json"], default="table")
    b.add_argument("--out")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    exp = ns.experiment
    if exp == "ratios":
        return RunConfig(exp, alpha=ns.alpha, eta=ns.eta, tolerance=ns.tolerance,
                         dim=ns.dim, format=ns.format, out=ns.out)
    if exp == "adiabatic":
        return RunConfig(exp, schedule=ns.schedule, chi=ns.chi, t_final=ns.t_final, dt=ns.dt,
                         parity=ns.parity, dim=ns.dim, sample_every=ns.sample_every,
                         tail_fraction=ns.tail_fraction, format="csv", out=ns.out)
    if exp == "qec":
        logical = [s.strip() for s in ns.logical.split(",")]
        return RunConfig(exp, alpha=ns.alpha, eta=ns.eta, gamma=ns.gamma, t=ns.t,
                         trials=ns.trials, seed=ns.seed, gate_mode=ns.gate_mode,
                         eta_ld=ns.eta_ld, ion_coefficient=ns.ion_coefficient,
                         logical=logical, dim=ns.dim, format="json", out=ns.out)
    return RunConfig(exp, alpha=ns.alpha0, gamma=ns.gamma, tolerance=ns.tolerance,
                     format=ns.format, out=ns.out)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if ns.config:
            cfg = RunConfig.from_dict(json.loads(Path(ns.config).read_text(encoding="utf-8")))
        elif ns.experiment:
            cfg = config_from_args(ns)
        else:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        execute(cfg)
    except UsageError as exc:
        print(f"catcode: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, TypeError) as exc:
        print(f"catcode: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalContractError as exc:
        print(f"catcode: numerical contract violated: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())

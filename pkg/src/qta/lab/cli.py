"""Command-line entry point: ``qta <command> [options]``.

Exit status: 0 on success, 1 on usage errors, 2 when an input violates a
numerical contract (non-unitary rule, annihilated state, ...).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from ..complexity import build_k_local, coarse_complexity, reversal_operator, time_evolution
from ..ergodic import eigenphase_report, ergodic_convergence_check
from ..qca import CNOT, AnnihilatedState, LocalRule, build_global_operator, evolve, run_teleportation_qca
from ..qlin import NumericalContractError, RngSeed, StateVector, haar_unitary, is_unitary, random_state
from ..serialize import (
    decode_matrix,
    decode_vector,
    dump_json,
    encode_matrix,
    load_json,
    load_rule_gates,
    trajectory_to_dict,
    write_csv,
    write_trajectory_csv,
)
from ..thermo import AnalysisConfig, equilibration_time, fourier_spectrum, l2_convergence, shannon_entropy
from .fitting import loglog_fit
from .harness import (
    ROW_HEADER,
    SUMMARY_HEADER,
    ExperimentConfig,
    SweepRow,
    ensemble_findings,
    run_sweep,
    summarize,
    summary_rows,
)

log = logging.getLogger("qta")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _emit(obj, out=None):
    if out:
        dump_json(obj, out)
    else:
        sys.stdout.write(json.dumps(obj, indent=2) + "\n")


# rule / initial state ----------------------------------------------------------

def _add_system_args(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--rule", help="JSON file with a list of 4x4 gates")
    src.add_argument("--builtin", choices=["cnot", "haar", "identity"], default="cnot")
    p.add_argument("--n", type=int, default=3, help="number of qubits")
    p.add_argument("--seed", type=int, default=0, help="master seed for random gates/states")
    p.add_argument("--init", default="zero",
                   help="'zero', 'random', a bitstring such as 100, or a JSON vector file")


def _rule(args) -> LocalRule:
    if args.rule:
        return LocalRule(load_rule_gates(args.rule))
    if args.builtin == "cnot":
        return LocalRule([CNOT])
    if args.builtin == "identity":
        return LocalRule([np.eye(4)])
    return LocalRule([haar_unitary(4, RngSeed(args.seed, 0))])


def _initial(args) -> StateVector:
    init = args.init
    if init == "zero":
        return StateVector.basis("0" * args.n)
    if init == "random":
        return random_state(args.n, RngSeed(args.seed, 1))
    if set(init) <= {"0", "1"}:
        if len(init) != args.n:
            raise UsageError(f"bitstring {init!r} does not have {args.n} qubits")
        return StateVector.basis(init)
    path = Path(init)
    if not path.exists():
        raise UsageError(f"unknown initial condition {init!r}")
    return StateVector(decode_vector(load_json(path)))


def _system(args):
    if not 2 <= args.n <= 12:
        raise UsageError("--n must be between 2 and 12")
    g = build_global_operator(_rule(args), args.n)
    return g, _initial(args)


# commands ------------------------------------------------------------------

def cmd_evolve(args):
    g, psi0 = _system(args)
    traj = evolve(psi0, g, args.steps)
    if args.out is None:
        write_trajectory_csv(traj, sys.stdout)
    elif args.out.endswith(".json"):
        dump_json(trajectory_to_dict(traj), args.out)
    else:
        write_trajectory_csv(traj, args.out)
    if args.render:
        from .render import render_amplitude_grid, write_png

        pixels = render_amplitude_grid(traj, args.render, scale=args.scale)
        if args.png:
            write_png(pixels, args.png)
    if args.plot:
        from .plotting import plot_probabilities
        from ..serialize import basis_labels

        plot_probabilities(traj, args.plot, labels=basis_labels(args.n))


def _analysis(args) -> AnalysisConfig:
    return AnalysisConfig(args.epsilon, args.window, args.horizon)


def cmd_equilibrate(args):
    g, psi0 = _system(args)
    cfg = _analysis(args)
    traj = evolve(psi0, g, cfg.horizon + cfg.window)
    rep = equilibration_time(traj, cfg)
    d = rep.to_dict()
    d["entropyBits"] = shannon_entropy(rep.equilibrium_probabilities)
    _emit(d, args.out)
    dist = l2_convergence(traj, cfg.window)
    if args.l2_out:
        write_csv(args.l2_out, ["step", "distance"], enumerate(dist))
    if args.plot:
        from .plotting import plot_l2

        plot_l2(dist, args.plot)


def cmd_spectrum(args):
    g, psi0 = _system(args)
    traj = evolve(psi0, g, args.steps)
    rep = fourier_spectrum(traj, args.threshold)
    if args.out:
        write_csv(args.out, ["bin", "power"], zip(rep.frequencies, rep.power))
    _emit({"samples": len(traj), "dominant": rep.dominant,
           "dominantPower": [float(rep.power[k]) for k in rep.dominant]})
    if args.plot:
        from .plotting import plot_spectrum

        plot_spectrum(rep, args.plot)


def cmd_reverse(args):
    g, psi0 = _system(args)
    traj = evolve(psi0, g, args.steps)
    r = reversal_operator(traj.amplitudes[0], traj.amplitudes[-1])
    c = coarse_complexity(r)
    if args.out:
        dump_json(encode_matrix(r.matrix), args.out)
    _emit({"steps": args.steps, "complexity": c.value, "overlap": c.overlap, "phase": r.phase})


def cmd_entropy(args):
    if args.probs:
        probs = np.asarray(load_json(args.probs), dtype=float)
        _emit({"entropyBits": shannon_entropy(probs)})
        return
    g, psi0 = _system(args)
    cfg = _analysis(args)
    rep = equilibration_time(evolve(psi0, g, cfg.horizon + cfg.window), cfg)
    _emit({"equilibrated": rep.equilibrated, "tEq": rep.t_eq,
           "entropyBits": shannon_entropy(rep.equilibrium_probabilities)})


def cmd_ergodic(args):
    if args.unitary:
        u = decode_matrix(load_json(args.unitary))
        if not is_unitary(u, 1e-8):
            raise NumericalContractError("operator file is not unitary")
    else:
        u = haar_unitary(args.d, RngSeed(args.seed, 0))
    d = u.shape[0]
    if args.state:
        x = decode_vector(load_json(args.state))
        if x.size != d:
            raise UsageError(f"state length {x.size} does not match operator dimension {d}")
    else:
        rng = RngSeed(args.seed, 1).generator()
        x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        x /= np.linalg.norm(x)
    conv = ergodic_convergence_check(u, x, args.cesaro_N, tol=args.tol)
    phases = eigenphase_report(u, args.qmax)
    if args.out:
        write_csv(args.out, ["N", "error", "bound"], conv.rows())
    if args.plot:
        from .plotting import plot_ergodic

        plot_ergodic(conv, args.plot)
    _emit({
        "dimension": d,
        "projectorRank": conv.projector.rank,
        "gap": conv.gap if np.isfinite(conv.gap) else None,
        "constant": conv.constant,
        "finalError": float(conv.error[-1]),
        "finalBound": float(conv.bound[-1]),
        "boundHolds": bool(np.all(conv.error <= conv.bound + 1e-12)),
        "eigenphases": phases.to_dict(),
    })


def cmd_klocal(args):
    try:
        h = build_k_local(args.K, args.k, seed=RngSeed(args.seed, 0))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    u = time_evolution(h, args.t)
    if args.out:
        dump_json(h.to_dict(), args.out)
    if args.unitary_out:
        dump_json(encode_matrix(u), args.unitary_out)
    rep = eigenphase_report(u, args.qmax)
    _emit({
        "K": args.K,
        "k": args.k,
        "t": args.t,
        "terms": len(h.terms),
        "hermiticityDefect": float(np.max(np.abs(h.matrix - h.matrix.conj().T))),
        "unitarityDefect": float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))),
        "eigenphases": rep.to_dict(),
    })


def _experiment_config(args) -> ExperimentConfig:
    d = load_json(args.config) if args.config else {}
    overrides = {
        "nQubits": args.n, "numOperators": args.operators,
        "numInitialConditions": args.ics, "masterSeed": args.seed,
    }
    d.update({k: v for k, v in overrides.items() if v is not None})
    analysis = dict(d.get("analysis", {}))
    for key, v in (("epsilon", args.epsilon), ("window", args.window), ("horizon", args.horizon)):
        if v is not None:
            analysis[key] = v
    if args.horizon is not None:
        d.pop("horizon", None)
    d["analysis"] = analysis
    return ExperimentConfig.from_dict(d)


def _per_operator_fit(summaries, x_attr, x_label):
    pts = [(getattr(s, x_attr), s.mean_t_eq) for s in summaries if s.count > 0]
    xs, ys = zip(*pts) if pts else ((), ())
    return xs, ys, loglog_fit(xs, ys, x_label, "mean tEq")


def cmd_sweep(args):
    cfg = _experiment_config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    log.info("sweep: %d operators x %d initial conditions, n=%d",
             cfg.num_operators, cfg.num_initial_conditions, cfg.n_qubits)
    res = run_sweep(cfg, threads=args.threads)
    dump_json(cfg.to_dict(), out / "config.json")
    res.write_rows(out / "rows.csv")
    by_op = summarize(res.rows, "operator")
    by_ic = summarize(res.rows, "initialCondition")
    write_csv(out / "summary_by_operator.csv", SUMMARY_HEADER, summary_rows(by_op))
    write_csv(out / "summary_by_ic.csv", SUMMARY_HEADER, summary_rows(by_ic))
    write_csv(out / "l2_convergence.csv",
              ["step"] + [f"op{o}" for o in range(cfg.num_operators)],
              ([t, *col] for t, col in enumerate(res.l2_by_operator.T)))
    findings = ensemble_findings(res.rows)
    fits = {}
    for name, attr, label in (("complexity", "mean_complexity", "mean complexity"),
                              ("entropy", "mean_entropy", "mean entropy")):
        try:
            xs, ys, fit = _per_operator_fit(by_op, attr, label)
            fits[name] = fit.to_dict()
            if "figures" in cfg.outputs and not args.no_figures:
                from .plotting import plot_fit

                plot_fit(xs, ys, fit, out / f"fig_fit_teq_vs_{name}.png")
        except ValueError as exc:
            fits[name] = {"error": str(exc)}
    findings["fits"] = fits
    dump_json(findings, out / "findings.json")
    if "figures" in cfg.outputs and not args.no_figures:
        from .plotting import plot_group_stats, plot_l2

        plot_group_stats(by_op, "t_eq", out / "fig_teq_by_operator.png", "operator")
        plot_group_stats(by_ic, "t_eq", out / "fig_teq_by_ic.png", "initial condition")
        plot_group_stats(by_op, "complexity", out / "fig_complexity_by_operator.png", "operator")
        plot_group_stats(by_ic, "complexity", out / "fig_complexity_by_ic.png", "initial condition")
        plot_l2(res.l2_by_operator, out / "fig_l2_convergence.png")
    _emit(findings)


def _read_rows(path) -> list[SweepRow]:
    import csv

    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ROW_HEADER:
            raise UsageError(f"{path} is not a sweep row table")
        for r in reader:
            rows.append(SweepRow(
                int(r["operatorIndex"]), int(r["icIndex"]),
                int(r["tEq"]) if r["tEq"] else None,
                r["censored"] == "1", r["annihilated"] == "1",
                float(r["complexityAtEq"]), float(r["entropyAtEq"]),
            ))
    return rows


def cmd_fit(args):
    rows = _read_rows(args.table)
    by_op = summarize(rows, "operator")
    attr = {"complexity": "mean_complexity", "entropy": "mean_entropy"}[args.x]
    xs, ys, fit = _per_operator_fit(by_op, attr, f"mean {args.x}")
    _emit(fit.to_dict(), args.out)
    if args.plot:
        from .plotting import plot_fit

        plot_fit(xs, ys, fit, args.plot)


def cmd_teleport(args):
    init = args.init or "0" * args.n
    if len(init) != args.n or set(init) - {"0", "1"}:
        raise UsageError("--init must be a bitstring of length --n")
    cells = np.array([[1, 0] if b == "0" else [0, 1] for b in init], dtype=complex)
    run = run_teleportation_qca(cells, args.steps, RngSeed(args.seed, 0))
    rows = ([t, j, g, m1, m2] for t, row in enumerate(run.gate_log) for j, (g, m1, m2) in enumerate(row))
    if args.out:
        write_csv(args.out, ["step", "cell", "gate", "m1", "m2"], rows)
    counts = {f"{a}{b}": 0 for a in (0, 1) for b in (0, 1)}
    for m1, m2 in run.bit_pairs():
        counts[f"{m1}{m2}"] += 1
    _emit({"nQubits": run.n_qubits, "steps": run.steps, "bitPairCounts": counts,
           "minTeleportFidelity": run.min_fidelity})


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qta", description="Quantum tensor automaton simulator and analysis lab")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("evolve", help="evolve a register and export the trajectory")
    _add_system_args(s)
    s.add_argument("--steps", type=int, default=10)
    s.add_argument("--out", help="trajectory file (.csv or .json); CSV to stdout if omitted")
    s.add_argument("--render", help="amplitude image (binary PPM)")
    s.add_argument("--png", help="PNG copy of the rendered image (needs --render)")
    s.add_argument("--scale", type=int, default=1)
    s.add_argument("--plot", help="probability plot (PNG)")
    s.set_defaults(func=cmd_evolve)

    def analysis_args(s):
        d = AnalysisConfig()
        s.add_argument("--epsilon", type=float, default=d.epsilon)
        s.add_argument("--window", type=int, default=d.window)
        s.add_argument("--horizon", type=int, default=d.horizon)

    s = sub.add_parser("equilibrate", help="equilibration time and distribution")
    _add_system_args(s)
    analysis_args(s)
    s.add_argument("--out")
    s.add_argument("--l2-out", help="CSV of step,distance")
    s.add_argument("--plot")
    s.set_defaults(func=cmd_equilibrate)

    s = sub.add_parser("spectrum", help="Fourier power of the probability series")
    _add_system_args(s)
    s.add_argument("--steps", type=int, default=300)
    s.add_argument("--threshold", type=float, default=0.1)
    s.add_argument("--out", help="CSV of bin,power")
    s.add_argument("--plot")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("reverse", help="reversal operator and its coarse complexity")
    _add_system_args(s)
    s.add_argument("--steps", type=int, default=1)
    s.add_argument("--out", help="JSON matrix file for R")
    s.set_defaults(func=cmd_reverse)

    s = sub.add_parser("entropy", help="Shannon entropy of a distribution or equilibrium state")
    _add_system_args(s)
    analysis_args(s)
    s.add_argument("--probs", help="JSON list of probabilities")
    s.set_defaults(func=cmd_entropy)

    s = sub.add_parser("ergodic", help="Cesaro convergence and eigenphase report for a unitary")
    s.add_argument("--unitary", help="JSON matrix file")
    s.add_argument("--d", type=int, default=8, help="dimension of the Haar sample when no file is given")
    s.add_argument("--state", help="JSON vector file")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cesaro-N", dest="cesaro_N", type=int, default=10_000)
    s.add_argument("--qmax", type=int, default=64)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--out", help="CSV of N,error,bound")
    s.add_argument("--plot")
    s.set_defaults(func=cmd_ergodic)

    s = sub.add_parser("klocal", help="random exactly-k-local Hamiltonian and U(t)")
    s.add_argument("--K", type=int, default=3)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--qmax", type=int, default=16)
    s.add_argument("--out", help="Hamiltonian term list (JSON)")
    s.add_argument("--unitary-out", help="U(t) matrix (JSON)")
    s.set_defaults(func=cmd_klocal)

    s = sub.add_parser("sweep", help="operator x initial-condition ensemble")
    s.add_argument("--config", help="JSON ExperimentConfig")
    s.add_argument("--n", type=int)
    s.add_argument("--operators", type=int)
    s.add_argument("--ics", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--window", type=int)
    s.add_argument("--horizon", type=int)
    s.add_argument("--threads", type=int, help="worker processes (default: $QTA_THREADS or 1)")
    s.add_argument("--out-dir", default="sweep_out")
    s.add_argument("--no-figures", action="store_true")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("fit", help="log-log fit of per-operator means from a sweep table")
    s.add_argument("--table", required=True, help="rows.csv from sweep")
    s.add_argument("--x", choices=["complexity", "entropy"], default="complexity")
    s.add_argument("--out")
    s.add_argument("--plot")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("teleport", help="teleportation-driven automaton run")
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--steps", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--init", help="bitstring product state (default all zeros)")
    s.add_argument("--out", help="CSV gate log")
    s.set_defaults(func=cmd_teleport)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"qta: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"qta {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (NumericalContractError, AnnihilatedState) as exc:
        print(f"qta {args.command}: numerical contract violated: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"qta {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

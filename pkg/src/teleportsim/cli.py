"""Command-line front end.

Exit codes: 0 success, 2 configuration or input error, 3 infeasible
feed-forward timing when ``--strict-timing`` is given.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import netsim, protocol, stats, tomography
from .config import ConfigError, ExperimentConfig, load_config
from .protocol import INPUT_LABELS, BsmOutcome, Mode
from .qubit_math import QubitMathError, fidelity_pure
from .report import LabelReport, RunReport, dumps, format_table, matrix_from_json, matrix_to_json

EXIT_OK, EXIT_CONFIG, EXIT_TIMING = 0, 2, 3

_OUTCOME_NAMES = {1: BsmOutcome.PSI_MINUS.value, 2: BsmOutcome.PSI_PLUS.value}


def _label_task(label, cfg: ExperimentConfig, seq: np.random.SeedSequence):
    rng = np.random.default_rng(seq)
    psi = label.state
    target = protocol.target_state(psi)
    n = cfg.run.trials_per_state
    lr = protocol.collect_successes(psi, cfg.noise_params, cfg.mode, n, rng)

    if cfg.run.shots_per_basis:
        counts = tomography.simulate_counts(lr.bob_states.mean(axis=0), cfg.run.shots_per_basis, rng)
    else:
        counts = tomography.sample_event_counts(lr.bob_states, rng)
    rho = tomography.reconstruct_state(counts)
    fid_err = stats.bootstrap_fidelity_error(counts, cfg.run.bootstrap_resamples, rng, target=target)
    direct, direct_err = stats.mean_and_stderr(lr.fidelities)
    codes, freq = np.unique(lr.outcomes, return_counts=True)
    return LabelReport(
        attempts=lr.attempts,
        successes=lr.successes,
        failures=lr.failures,
        outcome_counts={_OUTCOME_NAMES[int(c)]: int(k) for c, k in zip(codes, freq)},
        fidelity_direct=direct,
        fidelity_direct_err=direct_err,
        fidelity=fidelity_pure(target, rho),
        fidelity_err=fid_err,
        counts=counts.to_dict(),
        rho=rho,
    )


def _process_error(counts: dict, resamples: int, rng: np.random.Generator) -> float:
    """Bootstrap spread of the process fidelity under Poisson-resampled counts."""
    base = {k: tomography.CountTable.from_dict(v).as_array() for k, v in counts.items()}
    fids = []
    for _ in range(resamples):
        outputs = {}
        for k, arr in base.items():
            d = rng.poisson(arr)
            empty = d.sum(axis=1) == 0
            d[empty] = arr[empty]
            outputs[k] = tomography.reconstruct_state(tomography.CountTable.from_array(d))
        fids.append(tomography.process_fidelity(tomography.reconstruct_process(outputs)))
    return float(np.std(fids, ddof=1))


def cmd_run(cfg: ExperimentConfig, workers: int = 1) -> RunReport:
    """Full simulated experiment. Deterministic in (config, seed), independent of ``workers``."""
    root = np.random.SeedSequence(cfg.run.seed)
    label_seqs = root.spawn(len(INPUT_LABELS) + 1)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(_label_task, label, cfg, seq) for label, seq in zip(INPUT_LABELS, label_seqs)]
        labels = {label.value: f.result() for label, f in zip(INPUT_LABELS, futures)}

    avg = float(np.mean([lr.fidelity for lr in labels.values()]))
    avg_err = float(np.sqrt(np.sum([lr.fidelity_err**2 for lr in labels.values()])) / len(labels))
    avg_direct = float(np.mean([lr.fidelity_direct for lr in labels.values()]))

    chi = tomography.reconstruct_process({k: lr.rho for k, lr in labels.items()})
    fp = tomography.process_fidelity(chi)
    fp_err = _process_error({k: lr.counts for k, lr in labels.items()}, cfg.run.bootstrap_resamples,
                            np.random.default_rng(label_seqs[-1]))
    hyp = stats.hoeffding_test(min(avg, 1.0), cfg.run.trials_per_state)
    budget = netsim.coincidence_rate_budget(cfg.budget_inputs, cfg.clock_model.rep_rate_hz)
    timing = netsim.feed_forward_feasible(cfg.topology_model)
    return RunReport(
        seed=cfg.run.seed,
        mode=cfg.mode,
        config=cfg.to_dict(),
        labels=labels,
        average_fidelity=avg,
        average_fidelity_err=avg_err,
        average_fidelity_direct=avg_direct,
        chi=chi,
        process_fidelity=fp,
        process_fidelity_err=fp_err,
        process_average_fidelity=tomography.average_fidelity_from_process(fp),
        hoeffding=hyp.to_dict(),
        rate_budget=budget.to_dict(),
        timing=timing.to_dict(),
    )


def cmd_hoeffding(mean_fidelity: float, n: int) -> str:
    return stats.hoeffding_test(mean_fidelity, n).format()


def cmd_rate_budget(cfg: ExperimentConfig) -> netsim.RateBudget:
    return netsim.coincidence_rate_budget(cfg.budget_inputs, cfg.clock_model.rep_rate_hz)


def cmd_timeline(cfg: ExperimentConfig) -> netsim.TimingReport:
    return netsim.feed_forward_feasible(cfg.topology_model)


def cmd_classical_baseline(cfg: ExperimentConfig) -> dict:
    """Measure-and-prepare teleportation: fixed inputs plus Haar-random inputs."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.run.seed))
    n = cfg.run.trials_per_state
    per_label = {}
    for label in INPUT_LABELS:
        fids = [fidelity_pure(label.state, protocol.classical_trial(label.state, rng)) for _ in range(n)]
        per_label[label.value] = stats.mean_and_stderr(fids)
    haar = protocol.classical_fidelities(4 * n, rng)
    mean, err = stats.mean_and_stderr(haar)
    return {
        "trials_per_state": n,
        "per_label": {k: {"fidelity": m, "stderr": e} for k, (m, e) in per_label.items()},
        "haar_average_fidelity": mean,
        "haar_average_stderr": err,
        "classical_limit": stats.CLASSICAL_LIMIT,
    }


# --------------------------------------------------------------------------
# argument parsing

def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default="default",
                   help="TOML config file, or a shipped config name (default, calibrated, ideal, buffers_10km)")
    p.add_argument("--seed", type=int, default=None, help="override run.seed")
    p.add_argument("--workers", type=int, default=1, help="worker threads for trials")
    p.add_argument("--out", default=None, help="write the JSON result here")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="teleportsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="simulate the full experiment")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=None)
    p.add_argument("--trials", type=int, default=None, help="override run.trials_per_state")
    p.add_argument("--strict-timing", action="store_true")

    p = sub.add_parser("tomo-state", parents=[common], help="reconstruct a state from a count table")
    p.add_argument("--counts", required=True, help="JSON count table {Z|X|Y: {plus, minus}}")
    p.add_argument("--target", choices=[l.value for l in INPUT_LABELS], default=None,
                   help="report fidelity to this time-bin state")

    p = sub.add_parser("tomo-process", parents=[common], help="chi matrix from four output states")
    p.add_argument("--states", required=True, help="JSON {T0|T1|D|R: {re, im}} output density matrices")

    p = sub.add_parser("hoeffding", parents=[common], help="classical p-value bound")
    p.add_argument("fidelity", type=float)
    p.add_argument("n", type=int, help="trials per input state")

    sub.add_parser("rate-budget", parents=[common], help="itemized four-fold rate budget")

    p = sub.add_parser("timeline", parents=[common], help="feed-forward timing feasibility")
    p.add_argument("--strict-timing", action="store_true")

    sub.add_parser("classical-baseline", parents=[common], help="measure-and-prepare baseline")
    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["run.seed"] = args.seed
    if getattr(args, "mode", None):
        overrides["mode"] = args.mode
    if getattr(args, "trials", None) is not None:
        overrides["run.trials_per_state"] = args.trials
    if overrides:
        cfg = cfg.replace(**overrides)
    return cfg


def _emit(args, payload: dict, text: str) -> None:
    if args.out:
        Path(args.out).write_text(dumps(payload))
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path!r}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, tomography.TomographyError, QubitMathError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _dispatch(args) -> int:
    from .report import format_run_report

    if args.command == "hoeffding":
        res = stats.hoeffding_test(args.fidelity, args.n)
        _emit(args, res.to_dict(), res.format())
        return EXIT_OK

    if args.command == "tomo-state":
        counts = tomography.CountTable.from_dict(_read_json(args.counts))
        rho = tomography.reconstruct_state(counts)
        payload = {"rho": matrix_to_json(rho)}
        text = np.array2string(rho, precision=4, suppress_small=True)
        if args.target:
            f = fidelity_pure(protocol.InputStateLabel(args.target).state, rho)
            payload["fidelity"] = f
            text += f"\nfidelity to {args.target}: {f:.4f}"
        _emit(args, payload, text)
        return EXIT_OK

    if args.command == "tomo-process":
        raw = _read_json(args.states)
        chi = tomography.reconstruct_process({k: matrix_from_json(v) for k, v in raw.items()})
        fp = tomography.process_fidelity(chi)
        payload = {"chi": matrix_to_json(chi), "process_fidelity": fp,
                   "average_fidelity": tomography.average_fidelity_from_process(fp)}
        text = (np.array2string(chi, precision=4, suppress_small=True)
                + f"\nprocess fidelity (sigma_y ideal): {fp:.4f}"
                + f"\naverage state fidelity: {payload['average_fidelity']:.4f}")
        _emit(args, payload, text)
        return EXIT_OK

    cfg = _load(args)

    if args.command == "run":
        rep = cmd_run(cfg, workers=args.workers)
        if args.out:
            Path(args.out).write_text(rep.to_json())
        sys.stdout.write(format_run_report(rep))
        if args.strict_timing and not rep.timing["feasible"]:
            return EXIT_TIMING
        return EXIT_OK

    if args.command == "rate-budget":
        b = cmd_rate_budget(cfg)
        rows = [[k, f"{v:.4g}"] for k, v in b.factors.items()]
        rows += [["rep rate (Hz)", f"{b.rep_rate_hz:.4g}"],
                 ["four-fold rate (1/s)", f"{b.fourfold_rate_per_second:.4g}"],
                 ["four-fold rate (1/h)", f"{b.fourfold_rate_per_hour:.4g}"]]
        _emit(args, b.to_dict(), format_table(rows, ["factor", "value"]))
        return EXIT_OK

    if args.command == "timeline":
        t = cmd_timeline(cfg)
        rows = [[e.node, e.event, f"{e.time_ns:.1f}"] for e in netsim.event_timeline(cfg.topology_model)]
        text = format_table(rows, ["node", "event", "t (ns)"]) + "\n\n" + format_table(
            [[k, f"{v:.1f}" if isinstance(v, float) else str(v)] for k, v in t.to_dict().items()],
            ["feed-forward", "value"])
        _emit(args, t.to_dict(), text)
        if args.strict_timing and not t.feasible:
            return EXIT_TIMING
        return EXIT_OK

    if args.command == "classical-baseline":
        res = cmd_classical_baseline(cfg)
        rows = [[k, f"{v['fidelity']:.4f} +/- {v['stderr']:.4f}"] for k, v in res["per_label"].items()]
        rows.append(["Haar average", f"{res['haar_average_fidelity']:.4f} +/- {res['haar_average_stderr']:.4f}"])
        _emit(args, res, format_table(rows, ["input", "fidelity"]))
        return EXIT_OK

    raise AssertionError(args.command)  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

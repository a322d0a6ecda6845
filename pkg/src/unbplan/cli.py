"""Command-line entry point."""

from __future__ import annotations

import argparse
import sys

import numpy as np
import yaml

from unbplan import harness, planner
from unbplan.config import ExperimentConfig


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    if args.mc_iters is not None:
        cfg = cfg.replace(mc_iters=args.mc_iters)
    return cfg


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="YAML experiment configuration")
    p.add_argument("--seed", type=int, metavar="U64", help="override the config seed")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout or derived)")
    p.add_argument("--mc-iters", type=int, metavar="N", help="override Monte-Carlo iteration count")
    p.add_argument("--parallel", type=int, default=0, metavar="N",
                   help="worker processes for Monte-Carlo iterations")


def _prepare(cfg: ExperimentConfig) -> harness.IterationData:
    return harness.prepare_iteration(cfg, np.random.SeedSequence(cfg.seed))


def _cmd_simulate(args) -> int:
    from unbplan.traffic import save_log_csv

    cfg = _load_config(args)
    data = _prepare(cfg)
    # round-robin assignment over installed stations for a plain simulation
    bands = [b % cfg.num_bands for b in range(cfg.num_installed)]
    bands += [None] * cfg.num_candidates
    from unbplan.optimizer import AssignmentMatrix

    a = AssignmentMatrix.from_bands(
        bands, cfg.num_installed, cfg.num_candidates, 0, num_bands=cfg.num_bands
    )
    log = harness.evaluate_assignment(data, a)
    prefix = args.out or "simulate"
    save_log_csv(log, f"{prefix}_marginal.csv", f"{prefix}_joint.csv")
    pdp, tdp = harness._pdp_tdp(log)
    print(f"packets {log.packets_decoded}/{log.packets_total} (PDP {pdp:.4f}), "
          f"repetitions {log.reps_decoded}/{log.reps_total} (TDP {tdp:.4f})")
    print(f"wrote {prefix}_marginal.csv and {prefix}_joint.csv")
    return 0


def _cmd_fit(args) -> int:
    from unbplan import fitting

    cfg = _load_config(args)
    data = _prepare(cfg)
    stats = harness.run_training(data, "MOD")
    params = fitting.fit_all_bands(
        stats, data.layout, alpha=cfg.pathloss_exponent, tau=cfg.tau,
        num_bands=cfg.num_bands,
    )
    out = args.out or "model_params.yaml"
    params.save(out)
    print(f"wrote fitted parameters to {out}")
    return 0


def _cmd_plan_training(args) -> int:
    cfg = _load_config(args)
    rng = np.random.default_rng(cfg.seed)
    B, M = cfg.num_installed, cfg.num_bands
    viable = planner.enumerate_viable(
        B, 0, M, floor=B // M, cap=harness.VIABLE_CAP, rng=rng
    )
    sets = [planner.measurable_set(a, viable.location_ids, "MOD")
            for a in viable.assignments]
    target = planner.CoverageTarget.for_mod(sets, M, cfg.train_demand_per_band)
    plan = planner.greedy_cover(target, sets)
    out = args.out or "training_plan.yaml"
    plan.save(out, viable, cfg.train_seconds)
    print(f"{len(plan)} training phases of {cfg.train_seconds / len(plan):.1f} s; wrote {out}")
    return 0


def _run_single_pipeline(args, mode: str) -> int:
    cfg = _load_config(args)
    data = _prepare(cfg)
    stats = harness.run_training(data, mode)
    coeffs = (harness.mod_coefficients(data, stats) if mode == "MOD"
              else harness.meas_coefficients(data, stats))
    from unbplan.optimizer import solve_p3

    res = solve_p3(coeffs, cfg.num_installed, cfg.num_candidates, cfg.num_bands,
                   cfg.num_new, time_limit_s=cfg.solver_time_limit_s)
    log = harness.evaluate_assignment(data, res.assignment)
    pdp, tdp = harness._pdp_tdp(log)
    doc = {
        "objective": float(res.objective),
        "time_limited": bool(res.time_limited),
        "pdp": float(pdp),
        "tdp": float(tdp),
        "bands": [res.assignment.band_of(r) for r in range(res.assignment.X.shape[0])],
    }
    text = yaml.safe_dump(doc, sort_keys=False)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_assign(args) -> int:
    return _run_single_pipeline(args, "MOD")


def _cmd_place(args) -> int:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if cfg.num_new == 0:
        print("warning: num_new is 0; placing no new stations", file=sys.stderr)
    return _run_single_pipeline(args, "MEAS")


def _cmd_experiment(args) -> int:
    cfg = _load_config(args)
    rows = harness.run_experiment(
        args.name, cfg, mc_iters=args.mc_iters, parallel=args.parallel
    )
    out = args.out or f"{args.name}.csv"
    harness.emit_csv(rows, out)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def _cmd_replay_optimal(args) -> int:
    cfg = _load_config(args)
    rows = harness.replay_optimal(
        cfg, criterion=args.criterion, mc_iters=args.mc_iters, parallel=args.parallel
    )
    out = args.out or "replay_optimal.csv"
    harness.emit_csv(rows, out)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="unbplan",
        description="Planning toolkit for multiband ultra-narrowband IoT networks",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="simulate one deployment and write decoding logs")
    _add_common(sp)
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("fit", help="run a training phase and fit model parameters")
    _add_common(sp)
    sp.set_defaults(func=_cmd_fit)

    sp = sub.add_parser("plan-training", help="compute the training-phase schedule")
    _add_common(sp)
    sp.set_defaults(func=_cmd_plan_training)

    sp = sub.add_parser("assign", help="model-based band assignment for installed stations")
    _add_common(sp)
    sp.set_defaults(func=_cmd_assign)

    sp = sub.add_parser("place", help="measurement-based placement and band assignment")
    _add_common(sp)
    sp.set_defaults(func=_cmd_place)

    sp = sub.add_parser("experiment", help="run a named experiment and emit CSV")
    sp.add_argument("name", choices=sorted(harness.EXPERIMENTS))
    _add_common(sp)
    sp.set_defaults(func=_cmd_experiment)

    sp = sub.add_parser("replay-optimal", help="exhaustive replay benchmark")
    sp.add_argument("--criterion", choices=["TDP", "PDP"], default="TDP")
    _add_common(sp)
    sp.set_defaults(func=_cmd_replay_optimal)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line interface: scenario ingestion, simulation runs, CSV emission,
and the verification suite.

Exit statuses: 0 success, 1 failed verification check, 2 usage or schema
error.  All configuration is explicit through flags; output is a pure
function of the scenario document and the flags.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import nullcontext

import numpy as np

from . import belief as bel
from . import engine, model, strategy
from .errors import CovertSigError, ScenarioSchemaError
from .model import Scenario
from .presets import get_preset, preset_names

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

TRAJECTORY_HEADER = "k,u,action,x,y,pi_true_m,pi_hat_m,reaction,fixed_point"
MONTECARLO_HEADER = "k,pi_hat_m,emp_mean_pi_true_m,emp_var"


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def emit_trajectory_csv(t: engine.Trajectory, sink) -> int:
    """Write the per-step trajectory table; returns the byte count written."""
    lines = [TRAJECTORY_HEADER]
    for rec in t.steps:
        lines.append(
            f"{rec.k},{rec.u},{rec.action},{rec.x},{rec.y},"
            f"{_fmt(rec.pi_true)},{_fmt(rec.pi_hat)},{rec.reaction},"
            f"{int(rec.fixed_point)}"
        )
    text = "\n".join(lines) + "\n"
    sink.write(text)
    return len(text.encode())


def emit_montecarlo_csv(summary: engine.MonteCarloSummary, sink) -> int:
    lines = [MONTECARLO_HEADER]
    for k in range(summary.mean_pi_true.size):
        lines.append(
            f"{k},{_fmt(summary.pi_hat[k])},{_fmt(summary.mean_pi_true[k])},"
            f"{_fmt(summary.var_pi_true[k])}"
        )
    text = "\n".join(lines) + "\n"
    sink.write(text)
    return len(text.encode())


def _load_scenario(args) -> Scenario:
    if args.preset is not None:
        s = get_preset(args.preset)
    else:
        with open(args.scenario, encoding="utf-8") as fh:
            s = model.parse_scenario(fh.read())
    overrides = {}
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.tol is not None:
        overrides["merge_tolerance"] = args.tol
    if overrides:
        from dataclasses import replace

        s = replace(s, **overrides)
    return s


def _open_sink(args):
    if args.out is None:
        return nullcontext(sys.stdout)
    return open(args.out, "w", encoding="utf-8", newline="\n")


def cmd_run(args) -> int:
    s = _load_scenario(args)
    traj = engine.run_path(s, s.seed)
    with _open_sink(args) as sink:
        emit_trajectory_csv(traj, sink)
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    s = _load_scenario(args)
    trials = args.trials if args.trials is not None else 20
    summary = engine.run_monte_carlo(s, trials, s.seed)
    with _open_sink(args) as sink:
        emit_montecarlo_csv(summary, sink)
    return EXIT_OK


def cmd_oracle(args) -> int:
    """Replay a short path and cross-check the recursive estimate against
    brute-force enumeration at every prefix."""
    s = _load_scenario(args)
    horizon = s.horizon if args.horizon is not None else min(s.horizon, 6)
    if horizon > bel.ORACLE_HORIZON_BOUND:
        print(
            f"error: oracle horizon {horizon} exceeds the bound of "
            f"{bel.ORACLE_HORIZON_BOUND}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    from dataclasses import replace

    traj = engine.run_path(replace(s, horizon=horizon), s.seed)
    actions = [rec.action for rec in traj.steps]
    inputs = [rec.u for rec in traj.steps]
    lines = ["k,pi_hat_recursive,pi_hat_oracle,abs_diff"]
    for k in range(1, horizon + 1):
        recursive = traj.steps[k - 1].pi_hat
        oracle = bel.oracle_estimated_belief(s, actions[:k], inputs[:k])
        lines.append(f"{k},{_fmt(recursive)},{_fmt(oracle)},{_fmt(abs(recursive - oracle))}")
    with _open_sink(args) as sink:
        sink.write("\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _check_scenario_valid(s: Scenario):
    report = model.validate_scenario(s)
    if report.ok:
        return True, "all standing assumptions hold"
    return False, "; ".join(str(v) for v in report.violations)


def _check_monotonicity(s: Scenario, base_seed: int, n_seeds: int):
    cache: dict = {}
    for i in range(n_seeds):
        traj = engine.run_path(s, base_seed + i, cache)
        audit = engine.monotonicity_audit(traj)
        if not audit.ok:
            v = audit.violations[0]
            return False, f"seed {base_seed + i} step {v.step}: {v.kind}"
    return True, f"{n_seeds} seeds, tolerance 1e-10"


def _check_g_factor(s: Scenario, base_seed: int, draws: int = 10_000):
    rng = np.random.default_rng(base_seed & (2**64 - 1))
    ny = s.observations_alphabet.size
    worst = np.inf
    for _ in range(draws):
        m = rng.dirichlet(np.ones(ny))
        b = rng.dirichlet(np.ones(ny))
        pi = rng.uniform(1e-6, 1.0 - 1e-6)
        g = bel.g_factor(bel.LikelihoodPair(m, b), bel.Belief(pi))
        worst = min(worst, g)
        if g < 1.0 - 1e-12:
            return False, f"growth factor {g!r} below 1"
        g_eq = bel.g_factor(bel.LikelihoodPair(m, m), bel.Belief(pi))
        if abs(g_eq - 1.0) > 1e-14:
            return False, f"identical likelihoods gave factor {g_eq!r}"
    return True, f"{draws} draws, min factor {worst:.12g}"


def _check_oracle_equivalence(s: Scenario, base_seed: int, max_k: int = 6):
    rng = np.random.default_rng(base_seed & (2**64 - 1))
    labels_u = s.inputs_alphabet.labels
    labels_a = s.actions_alphabet.labels
    worst = 0.0
    for k in range(1, max_k + 1):
        inputs = [labels_u[i] for i in rng.integers(0, len(labels_u), size=k)]
        actions = [labels_a[i] for i in rng.integers(0, len(labels_a), size=k)]
        recursive = bel.chained_dist_mean(s, actions, inputs)
        oracle = bel.oracle_estimated_belief(s, actions, inputs)
        diff = abs(recursive - oracle)
        worst = max(worst, diff)
        if diff > 1e-12:
            return False, f"horizon {k}: recursion and enumeration differ by {diff:.3e}"
    return True, f"horizons 1..{max_k}, max difference {worst:.3e}"


def _check_single_crossing(s: Scenario, grid: int = 10_000):
    ab = s.benign_action
    for u in s.inputs_alphabet.labels:
        actions = [
            strategy.solve_stage(pi, u, s).malicious_action
            for pi in np.linspace(1e-6, 1.0 - 1e-6, grid)
        ]
        switches = sum(1 for a0, a1 in zip(actions, actions[1:]) if a0 != a1)
        if switches > 1:
            return False, f"input {u!r}: {switches} threshold crossings"
        if actions[-1] != ab:
            return False, f"input {u!r}: non-benign action persists at high estimates"
    return True, f"grid {grid}, benign above the threshold for every input"


def cmd_verify(args) -> int:
    s = _load_scenario(args)
    n_seeds = args.seeds if args.seeds is not None else 10
    checks = [
        ("scenario_valid", lambda: _check_scenario_valid(s)),
        ("monotonicity_seed_sweep", lambda: _check_monotonicity(s, s.seed, n_seeds)),
        ("g_factor_bound", lambda: _check_g_factor(s, s.seed)),
        ("oracle_equivalence", lambda: _check_oracle_equivalence(s, s.seed)),
        ("threshold_single_crossing", lambda: _check_single_crossing(s)),
    ]
    lines = []
    all_ok = True
    valid = True
    for name, fn in checks:
        if name != "scenario_valid" and not valid:
            # downstream checks need a runnable scenario
            lines.append(f"{name},skipped,scenario invalid")
            continue
        ok, detail = fn()
        if name == "scenario_valid":
            valid = ok
        all_ok = all_ok and ok
        lines.append(f"{name},{'pass' if ok else 'fail'},{detail}")
    with _open_sink(args) as sink:
        sink.write("\n".join(lines) + "\n")
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2 already
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="covertsig", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "run": ("simulate one path and emit its trajectory CSV", cmd_run),
        "montecarlo": ("aggregate trials and emit the summary CSV", cmd_montecarlo),
        "verify": ("run the verification suite against a scenario", cmd_verify),
        "oracle": ("cross-check the recursion against brute-force enumeration", cmd_oracle),
    }
    for name, (help_text, fn) in commands.items():
        p = sub.add_parser(name, help=help_text)
        source = p.add_mutually_exclusive_group(required=True)
        source.add_argument("--scenario", help="path to a scenario JSON document")
        source.add_argument("--preset", choices=preset_names(), help="built-in scenario")
        p.add_argument("--horizon", type=int, help="override the scenario horizon")
        p.add_argument("--trials", type=int, help="number of Monte Carlo trials")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--tol", type=float, help="override the merge tolerance")
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument("--seeds", type=int, help="seed-sweep width for verify")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ScenarioSchemaError as exc:
        for err in exc.errors:
            print(f"schema error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CovertSigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())

"""Repeated-game driver: sample paths, Monte Carlo aggregation, and audits.

Each trial owns its state exclusively and is reproducible from its seed;
trial seeds are derived from the base seed through a splitting sequence so
aggregation is independent of execution order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .belief import (
    Belief,
    BeliefDistribution,
    bayes_update,
    dist_step,
    estimated_belief,
    likelihood_pair,
)
from .errors import InvalidScenarioError
from .model import Scenario, validate_scenario
from .strategy import StagePolicy, receiver_reaction, solve_stage

_SEED_MASK = (1 << 64) - 1


@dataclass
class GameState:
    """Joint defender/attacker state of one running trial."""

    k: int
    true_belief: Belief
    attacker_dist: BeliefDistribution
    rng: np.random.Generator


@dataclass(frozen=True)
class StepRecord:
    """One row of a trajectory; beliefs are the post-step values."""

    k: int
    u: object
    action: object
    x: object
    y: object
    pi_true: float
    pi_hat: float
    reaction: object
    fixed_point: bool


@dataclass
class Trajectory:
    """Time-indexed record of one game path."""

    pi0: float
    benign_action: object
    steps: list[StepRecord] = field(default_factory=list)
    convergence_step: Optional[int] = None

    @property
    def pi_hat_sequence(self) -> list[float]:
        """Estimated-belief path including the initial value."""
        return [self.pi0] + [rec.pi_hat for rec in self.steps]


@dataclass
class MonteCarloSummary:
    n_trials: int
    mean_pi_true: np.ndarray
    var_pi_true: np.ndarray
    pi_hat: np.ndarray  # estimated-belief path of the first trial (per-u-path deterministic)
    convergence_counts: Counter


@dataclass(frozen=True)
class AuditViolation:
    step: int
    kind: str
    detail: str


@dataclass(frozen=True)
class AuditReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def _draw(rng: np.random.Generator, cdf: np.ndarray) -> int:
    return int(np.searchsorted(cdf, rng.random(), side="right"))


def step_game(
    state: GameState,
    s: Scenario,
    policy_cache: Optional[dict] = None,
    _channel_cdf: Optional[np.ndarray] = None,
) -> tuple[GameState, StepRecord]:
    """Advance one step: draw input, solve the stage, play, observe, update.

    The defender updates with the sender's actual stage action as the
    assumed strategy; the attacker advances her belief distribution with
    the same likelihood pair.
    """
    rng = state.rng
    ui = _draw(rng, s.inputs.cdf)
    u = s.inputs_alphabet.labels[ui]

    pi_hat = estimated_belief(state.attacker_dist)
    policy: StagePolicy
    if policy_cache is not None:
        key = (pi_hat, ui)
        policy = policy_cache.get(key)
        if policy is None:
            policy = solve_stage(pi_hat, u, s)
            policy_cache[key] = policy
    else:
        policy = solve_stage(pi_hat, u, s)
    ai = policy.malicious_action
    a = s.actions_alphabet.labels[ai]

    xi = s.system_map.state_at(0, (ui,), ai)
    if _channel_cdf is None:
        _channel_cdf = np.cumsum(s.channel.matrix, axis=1)
    yi = _draw(rng, _channel_cdf[xi])

    lik = likelihood_pair(s, u, a)
    new_true = bayes_update(state.true_belief, yi, lik)
    reaction = receiver_reaction(new_true, u, a, s)
    new_dist = dist_step(state.attacker_dist, lik, s.merge_tolerance)

    record = StepRecord(
        k=state.k,
        u=u,
        action=a,
        x=s.states_alphabet.labels[xi],
        y=s.observations_alphabet.labels[yi],
        pi_true=new_true.malicious_mass,
        pi_hat=estimated_belief(new_dist),
        reaction=reaction,
        fixed_point=policy.fixed_point_found,
    )
    return GameState(state.k + 1, new_true, new_dist, rng), record


def _initial_state(s: Scenario, seed: int) -> GameState:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed & _SEED_MASK)))
    return GameState(
        k=0,
        true_belief=Belief(s.pi0_malicious),
        attacker_dist=BeliefDistribution.singleton(s.pi0_malicious),
        rng=rng,
    )


def run_path(
    s: Scenario,
    seed: int,
    policy_cache: Optional[dict] = None,
) -> Trajectory:
    """Simulate one malicious-sender path over the scenario horizon.

    The convergence step is the earliest step from which every recorded
    action equals the benign action; finite-horizon detection is reported
    as-is, almost-sure limits being unobservable.
    """
    report = validate_scenario(s)
    if not report.ok:
        raise InvalidScenarioError(report.violations)
    if policy_cache is None:
        policy_cache = {}
    state = _initial_state(s, seed)
    traj = Trajectory(
        pi0=s.pi0_malicious,
        benign_action=s.actions_alphabet.labels[s.benign_action],
    )
    channel_cdf = np.cumsum(s.channel.matrix, axis=1)
    for _ in range(s.horizon):
        state, record = step_game(state, s, policy_cache, channel_cdf)
        traj.steps.append(record)
    conv = None
    for rec in reversed(traj.steps):
        if rec.action != traj.benign_action:
            break
        conv = rec.k
    traj.convergence_step = conv
    return traj


def trial_seed(base_seed: int, trial: int) -> int:
    """Derived per-trial seed; splitting keeps parallel streams independent."""
    ss = np.random.SeedSequence(entropy=base_seed & _SEED_MASK, spawn_key=(trial,))
    return int(ss.generate_state(1, np.uint64)[0])


def run_monte_carlo(s: Scenario, n_trials: int, base_seed: int) -> MonteCarloSummary:
    """Aggregate per-step belief statistics over independent trials."""
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    policy_cache: dict = {}
    pi_true = np.empty((n_trials, s.horizon))
    pi_hat_first = None
    counts: Counter = Counter()
    for trial in range(n_trials):
        traj = run_path(s, trial_seed(base_seed, trial), policy_cache)
        pi_true[trial] = [rec.pi_true for rec in traj.steps]
        if pi_hat_first is None:
            pi_hat_first = np.array([rec.pi_hat for rec in traj.steps])
        counts[traj.convergence_step] += 1
    return MonteCarloSummary(
        n_trials=n_trials,
        mean_pi_true=pi_true.mean(axis=0),
        var_pi_true=pi_true.var(axis=0),
        pi_hat=pi_hat_first if pi_hat_first is not None else np.empty(0),
        convergence_counts=counts,
    )


def monotonicity_audit(t: Trajectory, tol: float = 1e-10) -> AuditReport:
    """Check the estimated-belief path against the monotonicity law.

    The path must be non-decreasing; steps playing the benign action must
    leave it unchanged within tolerance and every other step must strictly
    increase it.
    """
    seq = t.pi_hat_sequence
    violations = []
    for rec, before, after in zip(t.steps, seq, seq[1:]):
        delta = after - before
        if delta < -tol:
            violations.append(
                AuditViolation(rec.k, "decrease", f"estimate fell by {-delta:.3e}")
            )
        elif rec.action == t.benign_action:
            if abs(delta) > tol:
                violations.append(
                    AuditViolation(
                        rec.k, "equality-expected",
                        f"benign step moved the estimate by {delta:.3e}",
                    )
                )
        elif delta <= tol:
            violations.append(
                AuditViolation(
                    rec.k, "strict-increase-expected",
                    f"non-benign step changed the estimate by only {delta:.3e}",
                )
            )
    return AuditReport(tuple(violations))


def saturation_monitor(t: Trajectory, threshold: float = 1.0 - 1e-6):
    """Finite-horizon proxy check that the true belief stays away from one.

    The underlying condition constrains whole strategy profiles, so this
    is a diagnostic, not a verdict.  Returns (ok, first violating step).
    """
    if t.pi0 > threshold:
        return False, 0
    for rec in t.steps:
        if rec.pi_true > threshold:
            return False, rec.k
    return True, None

"""Expected utilities and the per-step sender best-response fixed point.

The stage problem is solved lazily at the realized information set: the
sender evaluates each candidate action against the reaction rule a
rational defender would follow if that candidate were the equilibrium
play, and keeps the candidates that are best responses to their own
induced rule.
"""

from __future__ import annotations

from dataclasses import dataclass

from .belief import Belief, _posterior_mass, likelihood_pair
from .errors import ImpossibleObservationError
from .model import BENIGN, MALICIOUS, Scenario

#: a reaction rule maps each observation index to a reaction index
ReactionRule = tuple


@dataclass(frozen=True)
class StagePolicy:
    """Resolved stage decision: the sender's action and her model of the defender."""

    malicious_action: int
    modeled_reactions: ReactionRule
    sender_value: float
    fixed_point_found: bool


def _reaction(posterior_mass: float, u: int, a_mal: int, s: Scenario) -> int:
    """Defender's utility-maximizing reaction at an (index-level) stage.

    The posterior may be degenerate (0 or 1) when a likelihood entry
    vanishes; the argmax is still well defined.  Ties break to the lowest
    reaction index.
    """
    xb = s.system_map.state_at(0, (u,), s.benign_action)
    xm = s.system_map.state_at(0, (u,), a_mal)
    ur = s.utilities.receiver
    pb = 1.0 - posterior_mass
    best_r = 0
    best_eu = -float("inf")
    for r in range(s.reactions_alphabet.size):
        eu = pb * ur[BENIGN, xb, s.benign_action, r] + posterior_mass * ur[MALICIOUS, xm, a_mal, r]
        if eu > best_eu:
            best_eu = eu
            best_r = r
    return best_r


def receiver_reaction(posterior: Belief, u, a_mal, s: Scenario):
    """Reaction label maximizing the defender's expected utility under ``posterior``."""
    ui = s.inputs_alphabet.index(u)
    ai = s.actions_alphabet.index(a_mal)
    r = _reaction(posterior.malicious_mass, ui, ai, s)
    return s.reactions_alphabet.labels[r]


def _modeled_rule(pi_hat: float, u: int, a_candidate: int, s: Scenario) -> ReactionRule:
    lik = likelihood_pair(
        s, s.inputs_alphabet.labels[u], s.actions_alphabet.labels[a_candidate]
    )
    rule = []
    for y in range(s.observations_alphabet.size):
        my = float(lik.m[y])
        by = float(lik.b[y])
        if my + by <= 0.0:
            raise ImpossibleObservationError(
                f"observation index {y} has zero likelihood under both types"
            )
        rule.append(_reaction(_posterior_mass(pi_hat, my, by), u, a_candidate, s))
    return tuple(rule)


def modeled_reaction_rule(pi_hat: float, u, a_candidate, s: Scenario) -> ReactionRule:
    """The sender's model of the defender's observation-to-reaction map.

    For each possible observation, the defender is assumed to update the
    estimated belief by Bayes against the candidate action and react
    optimally to the resulting posterior.  Returns reaction indices, one
    per observation index.
    """
    if not 0.0 < pi_hat < 1.0:
        raise ValueError(f"estimated belief must lie in (0, 1), got {pi_hat!r}")
    ui = s.inputs_alphabet.index(u)
    ai = s.actions_alphabet.index(a_candidate)
    return _modeled_rule(pi_hat, ui, ai, s)


def _sender_eu(a_play: int, rule: ReactionRule, u: int, s: Scenario) -> float:
    x = s.system_map.state_at(0, (u,), a_play)
    row = s.channel.row(x)
    us = s.utilities.sender
    return float(
        sum(row[y] * us[MALICIOUS, x, a_play, rule[y]] for y in range(row.size))
    )


def sender_expected_utility(a_play, rule: ReactionRule, u, s: Scenario) -> float:
    """Malicious sender's expected utility for playing ``a_play`` against ``rule``."""
    ui = s.inputs_alphabet.index(u)
    ai = s.actions_alphabet.index(a_play)
    return _sender_eu(ai, rule, ui, s)


def solve_stage(pi_hat: float, u, s: Scenario) -> StagePolicy:
    """Self-consistent stage decision for the malicious sender.

    A candidate action is a fixed point when it is itself a best response
    to the reaction rule it induces.  Among fixed points the sender picks
    the one with the highest own value (ties to the lowest action index).
    Without a pure fixed point the benign action is returned, flagged.
    """
    ui = s.inputs_alphabet.index(u)
    fixed_points = []
    for a in range(s.actions_alphabet.size):
        rule = _modeled_rule(pi_hat, ui, a, s)
        values = [_sender_eu(ap, rule, ui, s) for ap in range(s.actions_alphabet.size)]
        if values[a] >= max(values):
            fixed_points.append((a, rule, values[a]))
    if not fixed_points:
        ab = s.benign_action
        rule = _modeled_rule(pi_hat, ui, ab, s)
        return StagePolicy(ab, rule, _sender_eu(ab, rule, ui, s), False)
    best = fixed_points[0]
    for candidate in fixed_points[1:]:
        if candidate[2] > best[2]:
            best = candidate
    a, rule, value = best
    return StagePolicy(a, rule, value, True)


def benign_action_policy(s: Scenario) -> int:
    """The benign sender's action at every step, independent of beliefs and inputs."""
    return s.benign_action

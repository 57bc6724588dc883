import numpy as np
import pytest

from covertsig.belief import Belief
from covertsig.strategy import (
    benign_action_policy,
    modeled_reaction_rule,
    receiver_reaction,
    sender_expected_utility,
    solve_stage,
)

THRESHOLD = 0.85  # reaction threshold built into the preset's receiver utilities


def test_receiver_reaction_threshold(preset):
    assert receiver_reaction(Belief(0.5), 0, 1, preset) == 0
    assert receiver_reaction(Belief(0.9), 0, 1, preset) == 1
    # at the exact threshold both reactions tie; lowest index wins
    assert receiver_reaction(Belief(THRESHOLD), 0, 1, preset) == 0
    assert receiver_reaction(Belief(THRESHOLD + 1e-9), 0, 1, preset) == 1


def test_modeled_rule_splits_at_high_estimates(preset):
    # below the threshold region the modeled defender never reacts
    assert modeled_reaction_rule(0.15, 0, 1, preset) == (0, 0)
    # near the threshold only the incriminating observation triggers a reaction
    rule = modeled_reaction_rule(0.84, 0, 1, preset)
    assert rule == (0, 1)


def test_modeled_rule_rejects_degenerate_estimate(preset):
    with pytest.raises(ValueError):
        modeled_reaction_rule(0.0, 0, 1, preset)
    with pytest.raises(ValueError):
        modeled_reaction_rule(1.0, 0, 1, preset)


def test_sender_expected_utility_values(preset):
    # attack against a never-reacting defender: 3.0 regardless of the draw
    assert sender_expected_utility(1, (0, 0), 0, preset) == pytest.approx(3.0)
    # attack against an always-reacting defender is worthless
    assert sender_expected_utility(1, (1, 1), 0, preset) == pytest.approx(0.0)
    # staying put against an always-reacting defender
    assert sender_expected_utility(0, (1, 1), 0, preset) == pytest.approx(1.0)
    # attack when only the incriminating observation triggers a reaction
    assert sender_expected_utility(1, (0, 1), 0, preset) == pytest.approx(1.35)
    # the profitable deviation that destroys the fixed point near the threshold
    assert sender_expected_utility(0, (0, 1), 0, preset) == pytest.approx(1.55)


def test_solve_stage_low_estimate_attacks(preset):
    for u in (0, 1):
        policy = solve_stage(0.15, u, preset)
        assert policy.malicious_action == 1
        assert policy.fixed_point_found
        assert policy.sender_value == pytest.approx(3.0)


def test_solve_stage_high_estimate_goes_benign(preset):
    policy = solve_stage(0.9, 0, preset)
    assert policy.malicious_action == 0
    assert policy.fixed_point_found
    # the estimate sits above the threshold, so the modeled defender reacts
    # no matter what is observed, and benign play yielding 1.0 beats attacking
    assert policy.modeled_reactions == (1, 1)
    assert policy.sender_value == pytest.approx(1.0)


def test_solve_stage_fallback_band(preset):
    # just below the reaction threshold neither action is self-consistent:
    # attacking invites a reaction worth 1.35 while deviating pays 1.55, and
    # staying benign keeps the posterior low enough that attacking pays 3.0
    policy = solve_stage(0.83, 0, preset)
    assert policy.malicious_action == preset.benign_action
    assert not policy.fixed_point_found


def test_stage_action_monotone_in_estimate(preset):
    grid = np.linspace(1e-6, 1 - 1e-6, 2_000)
    for u in (0, 1):
        actions = [solve_stage(p, u, preset).malicious_action for p in grid]
        switches = sum(a != b for a, b in zip(actions, actions[1:]))
        assert switches == 1
        assert actions[0] == 1 and actions[-1] == 0


def test_benign_action_policy(preset):
    assert benign_action_policy(preset) == preset.benign_action

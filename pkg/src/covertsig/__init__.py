"""Repeated signaling-game simulator for attacker-defender dynamics under
covert reactions: belief recursion, estimated-belief tracking, per-step
best-response fixed points, and verification suites for the monotonicity
and asymptotic-security properties."""

from .belief import (
    Belief,
    BeliefDistribution,
    LikelihoodPair,
    bayes_update,
    dist_step,
    estimated_belief,
    g_factor,
    likelihood_pair,
    merge_support,
    oracle_estimated_belief,
)
from .engine import (
    GameState,
    MonteCarloSummary,
    Trajectory,
    monotonicity_audit,
    run_monte_carlo,
    run_path,
    saturation_monitor,
    step_game,
)
from .model import (
    Alphabet,
    Channel,
    InputProcess,
    Scenario,
    SystemMap,
    UtilityTable,
    benign_state,
    check_channel_informativeness,
    check_input_observability,
    parse_scenario,
    scenario_from_dict,
    system_state,
    validate_scenario,
)
from .presets import get_preset, preset_document, preset_names
from .strategy import (
    StagePolicy,
    benign_action_policy,
    modeled_reaction_rule,
    receiver_reaction,
    sender_expected_utility,
    solve_stage,
)

__version__ = "0.1.0"

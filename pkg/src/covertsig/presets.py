"""Built-in scenario documents, compiled in so nothing external is needed."""

from __future__ import annotations

import copy

from .model import Scenario, scenario_from_dict

# Binary attacker-defender scenario: channel fidelity 0.55, reaction
# threshold 0.85 (the receiver utility weight makes the threshold exact),
# initial malicious mass 0.15.
_PI_BAR = 0.85
_ALPHA = (1.0 - _PI_BAR) / _PI_BAR
_LAMBDA = 0.55

_BINARY = {
    "alphabets": {
        "u": [0, 1],
        "x": [0, 1],
        "y": [0, 1],
        "a": [0, 1],
        "r": [0, 1],
    },
    # state = input XOR action; action 1 flips the benign state
    "system_map": [
        [0, 0, 0],
        [0, 1, 1],
        [1, 0, 1],
        [1, 1, 0],
    ],
    "channel": [
        [_LAMBDA, 1.0 - _LAMBDA],
        [1.0 - _LAMBDA, _LAMBDA],
    ],
    "input_pmf": [0.5, 0.5],
    "utility_sender": (
        # benign type: doing nothing strictly dominates
        [["benign", x, 0, r, 1.0] for x in (0, 1) for r in (0, 1)]
        + [["benign", x, 1, r, 0.0] for x in (0, 1) for r in (0, 1)]
        # malicious type: attack pays only while the reaction is mild
        + [["malicious", x, 1, 0, 3.0] for x in (0, 1)]
        + [["malicious", x, 0, 0, 2.0] for x in (0, 1)]
        + [["malicious", x, 0, 1, 1.0] for x in (0, 1)]
        + [["malicious", x, 1, 1, 0.0] for x in (0, 1)]
    ),
    "utility_receiver": (
        [["benign", x, a, 0, 1.0] for x in (0, 1) for a in (0, 1)]
        + [["benign", x, a, 1, 0.0] for x in (0, 1) for a in (0, 1)]
        + [["malicious", x, a, 1, _ALPHA] for x in (0, 1) for a in (0, 1)]
        + [["malicious", x, a, 0, 0.0] for x in (0, 1) for a in (0, 1)]
    ),
    "benign_action": 0,
    "pi0_malicious": 0.15,
    "horizon": 500,
    "merge_tolerance": 1e-9,
    "seed": 0,
}

PRESETS = {"binary": _BINARY}


def preset_names() -> list[str]:
    return sorted(PRESETS)


def preset_document(name: str) -> dict:
    """Deep copy of the named preset's scenario document."""
    return copy.deepcopy(PRESETS[name])


def get_preset(name: str) -> Scenario:
    """Named built-in scenario, built through the regular document parser."""
    return scenario_from_dict(preset_document(name))

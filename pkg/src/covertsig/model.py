"""Finite game description and standing-assumption validation.

The scenario bundles the controlled system (input process, system map,
measurement channel), both players' utility tables, and the simulation
parameters.  Everything is immutable after construction; symbols are
addressed by their alphabet labels at the API surface and by integer
indices internally.

Tie rule used throughout the package: whenever an argmax or a selection is
ambiguous, the candidate with the lowest alphabet index wins.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from .errors import InputDomainError, ScenarioSchemaError

ROW_SUM_TOL = 1e-12
#: minimum per-entry difference for two channel rows to count as distinct
ROW_DISTINCT_TOL = 1e-12

BENIGN = 0
MALICIOUS = 1
TYPE_LABELS = ("benign", "malicious")


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite set of distinct symbols."""

    labels: tuple

    def __post_init__(self):
        if len(self.labels) == 0:
            raise ValueError("alphabet must be non-empty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("alphabet labels must be pairwise distinct")
        object.__setattr__(self, "labels", tuple(self.labels))

    @cached_property
    def _lookup(self) -> dict:
        return {label: i for i, label in enumerate(self.labels)}

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self._lookup[label]
        except KeyError:
            raise InputDomainError(f"unknown symbol {label!r}") from None

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class SystemMap:
    """Deterministic state map (input, action) -> state, as index table.

    The evaluator takes the step index and the input history so that
    history-dependent maps can be slotted in later; the shipped concrete
    form is time-invariant and reads only the latest input.
    """

    table: np.ndarray  # shape (n_u, n_a), entries are state indices

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.intp)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def state_at(self, k: int, input_history: Sequence[int], a: int) -> int:
        """State after action ``a`` given the input history up to step ``k``."""
        return int(self.table[input_history[-1], a])


@dataclass(frozen=True)
class Channel:
    """Memoryless observation channel; ``matrix[x, y]`` is the mass of y given x."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ValueError("channel matrix must be two-dimensional")
        if np.any(m < 0.0) or np.any(m > 1.0):
            raise ValueError("channel entries must lie in [0, 1]")
        sums = m.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]
        if bad.size:
            raise ValueError(f"channel row {bad[0]} sums to {sums[bad[0]]!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def row(self, x: int) -> np.ndarray:
        return self.matrix[x]


@dataclass(frozen=True)
class InputProcess:
    """I.i.d. input distribution over the input alphabet."""

    pmf: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.pmf, dtype=float)
        if np.any(p < 0.0):
            raise ValueError("input pmf entries must be nonnegative")
        if abs(p.sum() - 1.0) > ROW_SUM_TOL:
            raise ValueError(f"input pmf sums to {p.sum()!r}")
        p.setflags(write=False)
        object.__setattr__(self, "pmf", p)

    @cached_property
    def cdf(self) -> np.ndarray:
        return np.cumsum(self.pmf)


@dataclass(frozen=True)
class UtilityTable:
    """Dense per-step utilities indexed by (type, state, action, reaction)."""

    sender: np.ndarray
    receiver: np.ndarray

    def __post_init__(self):
        for name in ("sender", "receiver"):
            t = np.asarray(getattr(self, name), dtype=float)
            if not np.all(np.isfinite(t)):
                raise ValueError(f"{name} utility table contains non-finite values")
            t.setflags(write=False)
            object.__setattr__(self, name, t)


@dataclass(frozen=True, eq=False)
class Scenario:
    """Complete, immutable description of one repeated-game instance.

    Compares and hashes by identity (the payload holds numpy arrays), which
    also lets downstream code memoize per-scenario derived tables.
    """

    inputs_alphabet: Alphabet
    states_alphabet: Alphabet
    observations_alphabet: Alphabet
    actions_alphabet: Alphabet
    reactions_alphabet: Alphabet
    system_map: SystemMap
    channel: Channel
    inputs: InputProcess
    utilities: UtilityTable
    benign_action: int  # action index
    pi0_malicious: float
    horizon: int
    merge_tolerance: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.benign_action < self.actions_alphabet.size:
            raise ValueError("benign_action outside the action alphabet")
        if not 0.0 < self.pi0_malicious < 1.0:
            raise ValueError("pi0_malicious must lie in (0, 1)")
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if self.merge_tolerance < 0.0:
            raise ValueError("merge_tolerance must be nonnegative")


@dataclass(frozen=True)
class Violation:
    assumption: str
    witness: tuple

    def __str__(self) -> str:
        return f"{self.assumption} (witness {self.witness})"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations


def system_state(s: Scenario, u, a) -> Any:
    """State label produced by input symbol ``u`` under action symbol ``a``."""
    ui = s.inputs_alphabet.index(u)
    ai = s.actions_alphabet.index(a)
    return s.states_alphabet.labels[s.system_map.state_at(0, (ui,), ai)]


def benign_state(s: Scenario, u) -> Any:
    """State label under the benign action; identical to the ideal-state simulator."""
    return system_state(s, u, s.actions_alphabet.labels[s.benign_action])


def check_input_observability(s: Scenario):
    """Every non-benign action must move the state away from the benign one.

    Returns ``(True, None)`` or ``(False, (u_label, a_label))`` with the
    first violating pair in index order.
    """
    ab = s.benign_action
    for ui in range(s.inputs_alphabet.size):
        xb = s.system_map.state_at(0, (ui,), ab)
        for ai in range(s.actions_alphabet.size):
            if ai == ab:
                continue
            if s.system_map.state_at(0, (ui,), ai) == xb:
                return False, (
                    s.inputs_alphabet.labels[ui],
                    s.actions_alphabet.labels[ai],
                )
    return True, None


def check_channel_informativeness(s: Scenario):
    """Channel rows reached by benign and non-benign actions must differ.

    The pairwise row-distinctness per (u, a) is exactly the condition the
    strict-monotonicity argument consumes, so it is checked directly
    instead of a mutual-information computation.
    """
    ab = s.benign_action
    for ui in range(s.inputs_alphabet.size):
        xb = s.system_map.state_at(0, (ui,), ab)
        for ai in range(s.actions_alphabet.size):
            if ai == ab:
                continue
            xa = s.system_map.state_at(0, (ui,), ai)
            diff = np.abs(s.channel.row(xa) - s.channel.row(xb))
            if not np.any(diff > ROW_DISTINCT_TOL):
                return False, (
                    s.states_alphabet.labels[xa],
                    s.states_alphabet.labels[xb],
                )
    return True, None


def check_benign_preference(s: Scenario):
    """The benign type must strictly prefer the benign action at every tuple."""
    ab = s.benign_action
    us = s.utilities.sender
    for ui in range(s.inputs_alphabet.size):
        xb = s.system_map.state_at(0, (ui,), ab)
        for ai in range(s.actions_alphabet.size):
            if ai == ab:
                continue
            xa = s.system_map.state_at(0, (ui,), ai)
            for ri in range(s.reactions_alphabet.size):
                for rj in range(s.reactions_alphabet.size):
                    if not us[BENIGN, xb, ab, ri] > us[BENIGN, xa, ai, rj]:
                        return False, (
                            s.inputs_alphabet.labels[ui],
                            s.actions_alphabet.labels[ai],
                            s.reactions_alphabet.labels[ri],
                            s.reactions_alphabet.labels[rj],
                        )
    return True, None


def validate_scenario(s: Scenario) -> ValidationReport:
    """Run all standing-assumption checks; violations are data, not failures."""
    violations = []
    ok, witness = check_input_observability(s)
    if not ok:
        violations.append(Violation("input observability", witness))
    ok, witness = check_channel_informativeness(s)
    if not ok:
        violations.append(Violation("channel informativeness", witness))
    ok, witness = check_benign_preference(s)
    if not ok:
        violations.append(Violation("benign preference", witness))
    return ValidationReport(tuple(violations))


# ---------------------------------------------------------------------------
# Scenario document schema
# ---------------------------------------------------------------------------

_ALPHABET_KEYS = ("u", "x", "y", "a", "r")


def _require(doc: dict, key: str, errors: list):
    if key not in doc:
        errors.append(f"{key}: missing required field")
        return None
    return doc[key]


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a Scenario from a parsed document, collecting all schema errors.

    Raises ScenarioSchemaError listing every violation with its field path.
    Unspecified utility tuples are an error; there are no implicit zeros.
    """
    errors: list[str] = []
    if not isinstance(doc, dict):
        raise ScenarioSchemaError(["document: expected a JSON object"])

    alphabets = {}
    raw_alpha = _require(doc, "alphabets", errors)
    if isinstance(raw_alpha, dict):
        for key in _ALPHABET_KEYS:
            if key not in raw_alpha:
                errors.append(f"alphabets.{key}: missing required field")
                continue
            try:
                alphabets[key] = Alphabet(tuple(raw_alpha[key]))
            except (TypeError, ValueError) as exc:
                errors.append(f"alphabets.{key}: {exc}")
    elif raw_alpha is not None:
        errors.append("alphabets: expected an object with keys u,x,y,a,r")
    if len(alphabets) != len(_ALPHABET_KEYS):
        raise ScenarioSchemaError(errors)

    au, ax, ay, aa, ar = (alphabets[k] for k in _ALPHABET_KEYS)

    # system map: list of [u, a, x] triples, total over U x A
    table = np.full((au.size, aa.size), -1, dtype=np.intp)
    raw_map = _require(doc, "system_map", errors)
    if isinstance(raw_map, list):
        for n, triple in enumerate(raw_map):
            path = f"system_map[{n}]"
            if not isinstance(triple, (list, tuple)) or len(triple) != 3:
                errors.append(f"{path}: expected a [u, a, x] triple")
                continue
            try:
                ui, ai, xi = au.index(triple[0]), aa.index(triple[1]), ax.index(triple[2])
            except InputDomainError as exc:
                errors.append(f"{path}: {exc}")
                continue
            if table[ui, ai] != -1:
                errors.append(f"{path}: duplicate entry for (u={triple[0]!r}, a={triple[1]!r})")
            table[ui, ai] = xi
        missing = np.argwhere(table == -1)
        for ui, ai in missing:
            errors.append(
                f"system_map: no entry for (u={au.labels[ui]!r}, a={aa.labels[ai]!r})"
            )
    elif raw_map is not None:
        errors.append("system_map: expected a list of [u, a, x] triples")

    channel = None
    raw_channel = _require(doc, "channel", errors)
    if raw_channel is not None:
        try:
            mat = np.asarray(raw_channel, dtype=float)
            if mat.shape != (ax.size, ay.size):
                errors.append(
                    f"channel: expected shape {(ax.size, ay.size)}, got {mat.shape}"
                )
            else:
                channel = Channel(mat)
        except (TypeError, ValueError) as exc:
            errors.append(f"channel: {exc}")

    inputs = None
    raw_pmf = _require(doc, "input_pmf", errors)
    if raw_pmf is not None:
        try:
            pmf = np.asarray(raw_pmf, dtype=float)
            if pmf.shape != (au.size,):
                errors.append(f"input_pmf: expected {au.size} entries, got {pmf.shape}")
            else:
                inputs = InputProcess(pmf)
        except (TypeError, ValueError) as exc:
            errors.append(f"input_pmf: {exc}")

    def parse_utility(key: str) -> np.ndarray | None:
        raw = _require(doc, key, errors)
        if raw is None:
            return None
        if not isinstance(raw, list):
            errors.append(f"{key}: expected a list of [theta, x, a, r, value] rows")
            return None
        tab = np.full((2, ax.size, aa.size, ar.size), np.nan)
        for n, row in enumerate(raw):
            path = f"{key}[{n}]"
            if not isinstance(row, (list, tuple)) or len(row) != 5:
                errors.append(f"{path}: expected a [theta, x, a, r, value] row")
                continue
            theta, xs, as_, rs, val = row
            if theta not in TYPE_LABELS:
                errors.append(f"{path}: unknown type {theta!r}")
                continue
            try:
                ti = TYPE_LABELS.index(theta)
                xi, ai, ri = ax.index(xs), aa.index(as_), ar.index(rs)
                value = float(val)
            except (InputDomainError, TypeError, ValueError) as exc:
                errors.append(f"{path}: {exc}")
                continue
            if not np.isnan(tab[ti, xi, ai, ri]):
                errors.append(f"{path}: duplicate utility tuple")
            tab[ti, xi, ai, ri] = value
        for idx in np.argwhere(np.isnan(tab)):
            ti, xi, ai, ri = idx
            errors.append(
                f"{key}: no value for (theta={TYPE_LABELS[ti]}, "
                f"x={ax.labels[xi]!r}, a={aa.labels[ai]!r}, r={ar.labels[ri]!r})"
            )
            return None  # one completeness message per table is enough
        return tab

    sender_tab = parse_utility("utility_sender")
    receiver_tab = parse_utility("utility_receiver")

    benign_idx = None
    raw_benign = _require(doc, "benign_action", errors)
    if raw_benign is not None:
        try:
            benign_idx = aa.index(raw_benign)
        except InputDomainError as exc:
            errors.append(f"benign_action: {exc}")

    pi0 = _require(doc, "pi0_malicious", errors)
    if pi0 is not None and not (isinstance(pi0, (int, float)) and 0.0 < pi0 < 1.0):
        errors.append(f"pi0_malicious: must be a number in (0, 1), got {pi0!r}")
        pi0 = None

    horizon = _require(doc, "horizon", errors)
    if horizon is not None and not (isinstance(horizon, int) and horizon >= 0):
        errors.append(f"horizon: must be a nonnegative integer, got {horizon!r}")
        horizon = None

    tol = doc.get("merge_tolerance", 1e-9)
    if not (isinstance(tol, (int, float)) and tol >= 0.0):
        errors.append(f"merge_tolerance: must be a nonnegative number, got {tol!r}")
        tol = None

    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        errors.append(f"seed: must be an integer, got {seed!r}")
        seed = None

    unknown = set(doc) - {
        "alphabets", "system_map", "channel", "input_pmf",
        "utility_sender", "utility_receiver", "benign_action",
        "pi0_malicious", "horizon", "merge_tolerance", "seed",
    }
    for key in sorted(unknown):
        errors.append(f"{key}: unknown field")

    if errors:
        raise ScenarioSchemaError(errors)

    return Scenario(
        inputs_alphabet=au,
        states_alphabet=ax,
        observations_alphabet=ay,
        actions_alphabet=aa,
        reactions_alphabet=ar,
        system_map=SystemMap(table),
        channel=channel,
        inputs=inputs,
        utilities=UtilityTable(sender_tab, receiver_tab),
        benign_action=benign_idx,
        pi0_malicious=float(pi0),
        horizon=horizon,
        merge_tolerance=float(tol),
        seed=seed,
    )


def parse_scenario(document: str) -> Scenario:
    """Parse a JSON scenario document into a validated-shape Scenario."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ScenarioSchemaError([f"document: invalid JSON ({exc})"]) from exc
    return scenario_from_dict(doc)

"""Belief recursion, attacker-side belief distributions, and growth diagnostics.

The defender's belief over the two sender types is a single scalar (the
malicious mass).  The attacker cannot observe the defender's measurements,
so she carries a weighted support of candidate defender beliefs; its mean
is her point estimate.  All operations here are pure functions on
immutable values.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateLikelihoodError,
    ImpossibleObservationError,
    OracleHorizonError,
)
from .model import Scenario

logger = logging.getLogger(__name__)

PMF_TOL = 1e-12
#: emergency cap on attacker-side support size; beyond it the lowest-weight
#: points are dropped and the rest renormalized (logged)
SUPPORT_CAP = 10_000
ORACLE_HORIZON_BOUND = 8


@dataclass(frozen=True)
class Belief:
    """Probability that the sender is malicious; the benign mass is implicit."""

    malicious_mass: float

    def __post_init__(self):
        if not 0.0 < self.malicious_mass < 1.0:
            raise ValueError(
                f"belief mass must lie strictly in (0, 1), got {self.malicious_mass!r}"
            )


@dataclass(frozen=True)
class LikelihoodPair:
    """Observation likelihoods under the malicious action (m) and benign action (b)."""

    m: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        for name in ("m", "b"):
            p = np.asarray(getattr(self, name), dtype=float)
            if np.any(p < 0.0):
                raise ValueError(f"likelihood {name} has negative entries")
            if abs(p.sum() - 1.0) > PMF_TOL:
                raise ValueError(f"likelihood {name} sums to {p.sum()!r}")
            p.setflags(write=False)
            object.__setattr__(self, name, p)
        if self.m.shape != self.b.shape:
            raise ValueError("likelihood pair shapes differ")

    @cached_property
    def identical(self) -> bool:
        """True when the two laws coincide, i.e. the action is unobservable."""
        return bool(np.array_equal(self.m, self.b))

    @cached_property
    def _m_support(self) -> np.ndarray:
        return np.nonzero(self.m > 0.0)[0]


@dataclass(frozen=True)
class BeliefDistribution:
    """Weighted support of candidate defender beliefs, sorted by mass."""

    masses: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if m.shape != w.shape or m.ndim != 1 or m.size == 0:
            raise ValueError("support must be a non-empty pair of equal-length vectors")
        if np.any(w <= 0.0):
            raise ValueError("support weights must be positive")
        if abs(w.sum() - 1.0) > 1e-10:
            raise ValueError(f"support weights sum to {w.sum()!r}")
        m.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "weights", w)

    @classmethod
    def _unchecked(cls, masses: np.ndarray, weights: np.ndarray) -> "BeliefDistribution":
        # internal fast path: invariants hold by construction in dist_step
        self = object.__new__(cls)
        self.__dict__["masses"] = masses
        self.__dict__["weights"] = weights
        return self

    @classmethod
    def singleton(cls, mass: float) -> "BeliefDistribution":
        Belief(mass)  # range check
        return cls(np.array([mass]), np.array([1.0]))

    @classmethod
    def from_points(cls, points: Sequence[tuple[Belief, float]]) -> "BeliefDistribution":
        masses = np.array([b.malicious_mass for b, _ in points])
        weights = np.array([w for _, w in points], dtype=float)
        order = np.argsort(masses, kind="stable")
        weights = weights / weights.sum()
        return cls(masses[order], weights[order])

    @property
    def support(self) -> list[tuple[Belief, float]]:
        return [(Belief(float(m)), float(w)) for m, w in zip(self.masses, self.weights)]


@lru_cache(maxsize=4096)
def _likelihood_pair(s: Scenario, ui: int, ai: int) -> LikelihoodPair:
    xm = s.system_map.state_at(0, (ui,), ai)
    xb = s.system_map.state_at(0, (ui,), s.benign_action)
    return LikelihoodPair(s.channel.row(xm), s.channel.row(xb))


def likelihood_pair(s: Scenario, u, a) -> LikelihoodPair:
    """Observation laws induced by playing ``a`` versus the benign action at input ``u``."""
    return _likelihood_pair(s, s.inputs_alphabet.index(u), s.actions_alphabet.index(a))


def _posterior_mass(prior_mass: float, my: float, by: float) -> float:
    """Scalar Bayes step; may return 0.0 or 1.0 when a likelihood entry vanishes."""
    return my * prior_mass / (by * (1.0 - prior_mass) + my * prior_mass)


def bayes_update(prior: Belief, y: int, lik: LikelihoodPair) -> Belief:
    """Posterior belief after observing observation index ``y``.

    Raises ImpossibleObservationError when the observation has zero mass
    under both types, which indicates an inconsistent scenario/strategy.
    """
    my = float(lik.m[y])
    by = float(lik.b[y])
    if my + by <= 0.0:
        raise ImpossibleObservationError(
            f"observation index {y} has zero likelihood under both types"
        )
    return Belief(_posterior_mass(prior.malicious_mass, my, by))


def estimated_belief(d: BeliefDistribution) -> float:
    """Mean malicious mass of the support: the attacker's point estimate."""
    return float(d.masses @ d.weights)


def _merge_arrays(masses: np.ndarray, weights: np.ndarray, tol: float):
    """Cluster sorted-by-mass points whose consecutive gaps are <= tol.

    Each cluster collapses to its weight-averaged mass with summed weight,
    which preserves the mean exactly and leaves surviving points more than
    tol apart.
    """
    order = np.argsort(masses, kind="stable")
    masses = masses[order]
    weights = weights[order]
    # cluster boundaries where the gap to the previous point exceeds tol
    starts = np.concatenate(([0], np.nonzero(masses[1:] - masses[:-1] > tol)[0] + 1))
    out_w = np.add.reduceat(weights, starts)
    out_m = np.add.reduceat(masses * weights, starts) / out_w
    return out_m, out_w


def merge_support(points: Sequence[tuple[Belief, float]], tol: float) -> BeliefDistribution:
    """Combine support points closer than ``tol``; normalizes the weights."""
    masses = np.array([b.malicious_mass for b, _ in points])
    weights = np.array([w for _, w in points], dtype=float)
    out_m, out_w = _merge_arrays(masses, weights, tol)
    return BeliefDistribution(out_m, out_w / out_w.sum())


def dist_step(d: BeliefDistribution, lik: LikelihoodPair, tol: float) -> BeliefDistribution:
    """Advance the attacker-side belief distribution by one observation round.

    Every support point branches over the observations weighted by the
    malicious-action likelihood, each branch updates by Bayes, and the
    result is merged and renormalized.  When the played action is
    observationally identical to benign the distribution is unchanged.
    """
    if lik.identical:
        return d
    new_masses = []
    new_weights = []
    for y in lik._m_support:
        my = lik.m[y]
        by = lik.b[y]
        new_masses.append(my * d.masses / (by * (1.0 - d.masses) + my * d.masses))
        new_weights.append(d.weights * my)
    assert new_masses, "malicious likelihood is a pmf; support cannot empty out"
    masses = np.concatenate(new_masses)
    weights = np.concatenate(new_weights)
    out_m, out_w = _merge_arrays(masses, weights, tol)
    if out_m.size > SUPPORT_CAP:
        keep = np.sort(np.argsort(out_w)[-SUPPORT_CAP:])
        logger.warning(
            "belief support hit the %d-point cap; dropping %d lowest-weight points",
            SUPPORT_CAP,
            out_m.size - SUPPORT_CAP,
        )
        out_m = out_m[keep]
        out_w = out_w[keep]
    return BeliefDistribution._unchecked(out_m, out_w / out_w.sum())


def g_factor(lik: LikelihoodPair, prior: Belief) -> float:
    """One-step multiplicative growth of the estimated malicious mass.

    Always >= 1, with equality exactly when the two likelihoods coincide;
    for a single-point distribution at ``prior`` the post-step mean equals
    this factor times the prior mass.
    """
    pm = prior.malicious_mass
    pb = 1.0 - pm
    terms = []
    for my, by in zip(lik.m, lik.b):
        if my == 0.0:
            continue
        den = by * pb + my * pm
        if den <= 0.0:
            raise DegenerateLikelihoodError(
                "zero posterior denominator for an observation with positive "
                "malicious likelihood"
            )
        terms.append(my * my / den)
    return math.fsum(terms)


def chained_dist_mean(s: Scenario, actions: Sequence, inputs: Sequence) -> float:
    """Mean of the attacker-side distribution after a forced (input, action) prefix."""
    d = BeliefDistribution.singleton(s.pi0_malicious)
    for u, a in zip(inputs, actions):
        d = dist_step(d, likelihood_pair(s, u, a), s.merge_tolerance)
    return estimated_belief(d)


def oracle_estimated_belief(
    s: Scenario,
    actions: Sequence,
    inputs: Sequence,
    max_horizon: int = ORACLE_HORIZON_BOUND,
) -> float:
    """Brute-force point estimate by enumerating every observation history.

    Exact reference for the recursive distribution stepping: chains the
    Bayes update along all |Y|^k observation paths and weights each path
    by its probability under the played actions.
    """
    if len(actions) != len(inputs):
        raise ValueError("actions and inputs must have equal length")
    k = len(actions)
    if k > max_horizon:
        raise OracleHorizonError(
            f"horizon {k} exceeds the oracle bound of {max_horizon}"
        )
    pairs = [likelihood_pair(s, u, a) for u, a in zip(inputs, actions)]
    ny = s.observations_alphabet.size
    contributions = []
    for history in product(range(ny), repeat=k):
        mass = s.pi0_malicious
        weight = 1.0
        for lik, y in zip(pairs, history):
            my = float(lik.m[y])
            if my == 0.0:
                weight = 0.0
                break
            weight *= my
            mass = _posterior_mass(mass, my, float(lik.b[y]))
        if weight > 0.0:
            contributions.append(weight * mass)
    return math.fsum(contributions)

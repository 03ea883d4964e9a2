"""Ground-truth checks for the bound computations, by brute force.

This module pins down one explicit probabilistic semantics for a risk model
and computes harm probabilities under it without any algebra, so the closed
forms elsewhere in the package have something independent to be checked
against:

* every trigger fires at most once per reference period, with its
  ``occurrence`` probability, and that single draw is shared by all chains
  on the trigger;
* conditional on its trigger firing, each chain passes its behavior, event
  and harm stages with the chain's three conditional probabilities, each
  stage an independent draw;
* draws for distinct triggers and distinct chains are independent;
* the harm occurs when at least one of its chains passes all stages.

:func:`enumerate_harm_probability` walks the entire joint outcome space of
those Bernoulli draws — exact, but exponential, hence capped.
:func:`simulate_harm_probability` estimates the same quantity by seeded
Monte Carlo for models beyond the cap.  Both consume the same compiled
:class:`HarmExperiment`, so they agree on the semantics by construction
while sharing no arithmetic with the bound implementations.

Reproducibility: simulation draws come from counter-based Philox streams,
one independent stream per fixed-size block of trials.  The estimate for a
given ``(model, harm, trials, seed)`` is bit-identical across runs and does
not depend on how blocks might be distributed over workers, because block
``k`` always uses the stream ``Philox(seed).jumped(k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidModelError, OracleCapacityError
from .risk_model import RiskModel, chains_for_harm, validate_model

#: Exhaustive enumeration refuses experiments with more Bernoulli sources.
MAX_ENUMERATION_SOURCES = 24

#: Trials per Philox block; one jumped stream per block.
SIMULATION_BLOCK = 1 << 16

#: Enumeration walks the outcome space in slices of this many outcomes.
_ENUMERATION_SLICE = 1 << 20

#: Two-sided 95% normal quantile, for simulation confidence intervals.
_Z_95 = 1.959963984540054


@dataclass(frozen=True)
class BernoulliSource:
    """One independent coin in the experiment: a label and its success probability."""

    label: str
    probability: float


@dataclass(frozen=True)
class HarmExperiment:
    """A harm's chain set compiled down to independent Bernoulli draws.

    ``chain_requirements`` holds, per chain, the indices of the four sources
    (trigger, behavior, event, harm stage) that must all succeed for the
    chain to complete.  Chains sharing a trigger share its source index.
    """

    harm: str
    sources: tuple[BernoulliSource, ...]
    chain_requirements: tuple[tuple[int, int, int, int], ...]

    @property
    def n_sources(self) -> int:
        return len(self.sources)

    def probabilities(self) -> np.ndarray:
        return np.array([s.probability for s in self.sources], dtype=np.float64)


@dataclass(frozen=True)
class SimulationResult:
    """A Monte Carlo estimate with its 95% normal-approximation half-width."""

    estimate: float
    ci_halfwidth: float
    trials: int
    seed: int


def _checked_model(model: RiskModel) -> None:
    findings = validate_model(model)
    if findings:
        raise InvalidModelError(findings)


def compile_experiment(model: RiskModel, harm_id: str) -> HarmExperiment:
    """Flatten the chains of a harm into the Bernoulli-source form above."""
    _checked_model(model)
    chains = chains_for_harm(model, harm_id)

    sources: list[BernoulliSource] = []
    trigger_index: dict[str, int] = {}
    for chain in chains:
        if chain.trigger not in trigger_index:
            trigger_index[chain.trigger] = len(sources)
            sources.append(
                BernoulliSource(
                    label=f"occurrence[{chain.trigger}]",
                    probability=model.trigger(chain.trigger).occurrence,
                )
            )

    requirements: list[tuple[int, int, int, int]] = []
    stage_names = ("behavior", "event", "harm")
    for chain in chains:
        stage_indices = []
        for name, probability in zip(stage_names, chain.conditional_factors):
            stage_indices.append(len(sources))
            sources.append(
                BernoulliSource(label=f"{name}[{chain.id}]", probability=probability)
            )
        requirements.append((trigger_index[chain.trigger], *stage_indices))

    return HarmExperiment(
        harm=harm_id,
        sources=tuple(sources),
        chain_requirements=tuple(requirements),
    )


def enumerate_harm_probability(model: RiskModel, harm_id: str) -> float:
    """Exact harm probability by summing over every joint outcome.

    Walks all ``2**n`` assignments of the experiment's ``n`` Bernoulli
    sources, adds up the probability mass of the assignments in which some
    chain completes.  No independence shortcuts, no algebra — this is the
    reference the closed forms are judged against.

    Raises :class:`OracleCapacityError` above
    :data:`MAX_ENUMERATION_SOURCES` sources.
    """
    experiment = compile_experiment(model, harm_id)
    n = experiment.n_sources
    if n > MAX_ENUMERATION_SOURCES:
        raise OracleCapacityError(
            f"enumeration over {n} Bernoulli sources exceeds the limit of "
            f"{MAX_ENUMERATION_SOURCES} (2**{n} outcomes)"
        )

    probabilities = experiment.probabilities()
    total_outcomes = 1 << n
    slice_sums: list[float] = []
    for start in range(0, total_outcomes, _ENUMERATION_SLICE):
        stop = min(start + _ENUMERATION_SLICE, total_outcomes)
        outcomes = np.arange(start, stop, dtype=np.int64)
        bits = [(outcomes >> i) & 1 == 1 for i in range(n)]

        weight = np.ones(stop - start, dtype=np.float64)
        for i in range(n):
            weight *= np.where(bits[i], probabilities[i], 1.0 - probabilities[i])

        fired = np.zeros(stop - start, dtype=bool)
        for t, b, e, h in experiment.chain_requirements:
            fired |= bits[t] & bits[b] & bits[e] & bits[h]

        slice_sums.append(float(weight[fired].sum()))
    return math.fsum(slice_sums)


def _block_generator(seed: int, block_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(block_index))


def simulate_harm_probability(
    model: RiskModel, harm_id: str, trials: int, seed: int
) -> SimulationResult:
    """Estimate the harm probability by Monte Carlo over the same semantics.

    Runs ``trials`` independent periods and counts those in which the harm
    occurred.  Identical inputs give a bit-identical estimate; see the
    module docstring for how the block/stream layout makes the result
    independent of execution order.
    """
    if not isinstance(trials, int) or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    _check_seed(seed)
    experiment = compile_experiment(model, harm_id)
    probabilities = experiment.probabilities()

    hits = 0
    for block_index in range(0, (trials + SIMULATION_BLOCK - 1) // SIMULATION_BLOCK):
        start = block_index * SIMULATION_BLOCK
        size = min(SIMULATION_BLOCK, trials - start)
        generator = _block_generator(seed, block_index)
        draws = generator.random((size, experiment.n_sources))
        success = draws < probabilities  # broadcasts over the trial axis
        fired = np.zeros(size, dtype=bool)
        for t, b, e, h in experiment.chain_requirements:
            fired |= success[:, t] & success[:, b] & success[:, e] & success[:, h]
        hits += int(fired.sum())

    estimate = hits / trials
    ci_halfwidth = _Z_95 * math.sqrt(estimate * (1.0 - estimate) / trials)
    return SimulationResult(
        estimate=estimate, ci_halfwidth=ci_halfwidth, trials=trials, seed=seed
    )


def simulate_poisson_zero_event_fraction(
    rate: float, duration: float, runs: int, seed: int
) -> float:
    """Fraction of simulated exposure windows in which nothing happened.

    Draws ``runs`` Poisson counts with mean ``rate * duration`` and returns
    the share that came out zero.  Used to check exposure targets: observing
    zero events over a validation run of the right duration should happen
    with probability ``exp(-rate * duration)``.
    """
    if not (isinstance(rate, (int, float)) and math.isfinite(rate) and rate >= 0):
        raise ValueError(f"rate must be a finite non-negative number, got {rate!r}")
    if not (isinstance(duration, (int, float)) and math.isfinite(duration) and duration >= 0):
        raise ValueError(f"duration must be a finite non-negative number, got {duration!r}")
    if not isinstance(runs, int) or runs < 1:
        raise ValueError(f"runs must be a positive integer, got {runs!r}")
    _check_seed(seed)

    lam = float(rate) * float(duration)
    zeros = 0
    for block_index in range(0, (runs + SIMULATION_BLOCK - 1) // SIMULATION_BLOCK):
        start = block_index * SIMULATION_BLOCK
        size = min(SIMULATION_BLOCK, runs - start)
        counts = _block_generator(seed, block_index).poisson(lam, size)
        zeros += int((counts == 0).sum())
    return zeros / runs


def _check_seed(seed: int) -> None:
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")

"""Upper bounds on the probability of harm over a set of causal chains.

The central quantity: for a harm H reachable through chains
``(T, B, E, H)``, the probability that H occurs at least once per reference
period is bounded by the sum over chains of

    P(trigger) * P(behavior | trigger) * P(event | behavior, trigger)
              * P(harm | event, behavior, trigger)

This is a union bound: it holds no matter how the chains depend on one
another, which is exactly what makes it usable when the dependence structure
between scenarios is unknown.  The price is conservatism — the bound can
exceed the true probability, and for large sums it can exceed one.  A bound
above one is still a true statement ("the probability is at most 1.3") and
is flagged, never clamped, so downstream consumers see how loose it is.

:func:`exact_union_probability` computes the *exact* probability under an
explicit independence semantics (shared trigger draw per trigger, chain
stages independent otherwise).  It exists to quantify the bound's slack and
to cross-check it: exact ≤ bound always.

Floating point note: contributions are accumulated with a compensated
(Neumaier) summation in model order, so results are deterministic and
accurate to within a few ulps regardless of how many chains a harm has.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InvalidModelError, OracleCapacityError
from .risk_model import Chain, RiskModel, chains_for_harm, validate_model

#: ``exact_union_probability`` refuses models with more chains than this per
#: harm, so that every exact value stays within reach of the brute-force
#: enumeration oracle used to verify it.
MAX_EXACT_CHAINS = 20


def compensated_sum(values: Iterable[float]) -> float:
    """Sum floats with Neumaier's compensated algorithm.

    Deterministic for a given input order and accurate to ~1 ulp even when
    terms vary wildly in magnitude.  Summing a single value returns it
    bit-for-bit unchanged.
    """
    total = 0.0
    compensation = 0.0
    for value in values:
        t = total + value
        if abs(total) >= abs(value):
            compensation += (total - t) + value
        else:
            compensation += (value - t) + total
        total = t
    return total + compensation


def single_tuple_reduction(
    occurrence: float,
    p_behavior_given_trigger: float,
    p_event_given_behavior: float,
    p_harm_given_event: float,
) -> float:
    """The bound contributed by one causal tuple: the plain four-factor product.

    For a harm with exactly one chain the union bound collapses to this
    product; :func:`harm_bound` reproduces it bit-for-bit in that case.
    """
    return occurrence * p_behavior_given_trigger * p_event_given_behavior * p_harm_given_event


def chain_contribution(model: RiskModel, chain: Chain) -> float:
    """One chain's term in the union bound."""
    occurrence = model.trigger(chain.trigger).occurrence
    return single_tuple_reduction(occurrence, *chain.conditional_factors)


def _validated(model: RiskModel) -> None:
    findings = validate_model(model)
    if findings:
        raise InvalidModelError(findings)


@dataclass(frozen=True)
class HarmBound:
    """Union bound on the per-period probability of one harm.

    ``contributions`` maps chain id to that chain's term, in model order;
    ``bound`` is their compensated sum.  ``exceeds_one`` flags a vacuous
    bound; the numeric value is always the raw sum.
    """

    harm: str
    bound: float
    contributions: Mapping[str, float]
    exceeds_one: bool


@dataclass(frozen=True)
class RiskBound:
    """Union bound on one harm occurring *at a given severity level*."""

    harm: str
    level: str
    bound: float
    contributions: Mapping[str, float]
    exceeds_one: bool


def harm_bound(model: RiskModel, harm_id: str) -> HarmBound:
    """Bound the probability that ``harm_id`` occurs at least once per period.

    The model must validate cleanly (:class:`InvalidModelError` otherwise).
    A harm with no chains gets the trivial bound 0.0.
    """
    _validated(model)
    chains = chains_for_harm(model, harm_id)
    contributions = {chain.id: chain_contribution(model, chain) for chain in chains}
    bound = compensated_sum(contributions.values())
    return HarmBound(
        harm=harm_id,
        bound=bound,
        contributions=contributions,
        exceeds_one=bound > 1.0,
    )


def risk_bound(model: RiskModel, harm_id: str, level: str) -> RiskBound:
    """Bound the probability of ``harm_id`` occurring with severity ``level``.

    Each chain's term is its :func:`chain_contribution` times the mass its
    severity distribution puts on ``level`` (zero if the level is absent).
    Summed over all levels of the scale these bounds recover
    :func:`harm_bound` up to rounding.
    """
    _validated(model)
    model.severity_scale.index(level)  # raises UnknownIdError for a foreign level
    chains = chains_for_harm(model, harm_id)
    contributions = {
        chain.id: chain_contribution(model, chain) * chain.severity_dist.get(level, 0.0)
        for chain in chains
    }
    bound = compensated_sum(contributions.values())
    return RiskBound(
        harm=harm_id,
        level=level,
        bound=bound,
        contributions=contributions,
        exceeds_one=bound > 1.0,
    )


def exact_union_probability(model: RiskModel, harm_id: str) -> float:
    """Exact per-period probability of the harm under independence semantics.

    Semantics: each trigger fires once per period with its occurrence
    probability, shared by every chain on that trigger; conditional on its
    trigger firing, each chain independently completes with probability
    ``p_behavior * p_event * p_harm``; distinct triggers are independent.
    The harm occurs when at least one of its chains completes, so

        P = 1 - prod over triggers t of
                (1 - P(t) * (1 - prod over chains c on t of (1 - q_c)))

    with ``q_c`` the chain's downstream product.  This is always <= the
    union bound from :func:`harm_bound`.

    Raises :class:`OracleCapacityError` when the harm has more than
    :data:`MAX_EXACT_CHAINS` chains; results beyond that size could not be
    independently verified by exhaustive enumeration.
    """
    _validated(model)
    chains = chains_for_harm(model, harm_id)
    if len(chains) > MAX_EXACT_CHAINS:
        raise OracleCapacityError(
            f"exact union over {len(chains)} chains exceeds the limit of "
            f"{MAX_EXACT_CHAINS}; use the union bound instead"
        )

    by_trigger: dict[str, list[Chain]] = {}
    for chain in chains:
        by_trigger.setdefault(chain.trigger, []).append(chain)

    p_no_harm = 1.0
    for trigger_id, group in by_trigger.items():
        occurrence = model.trigger(trigger_id).occurrence
        p_no_chain_completes = 1.0
        for chain in group:
            q = (
                chain.p_behavior_given_trigger
                * chain.p_event_given_behavior
                * chain.p_harm_given_event
            )
            p_no_chain_completes *= 1.0 - q
        p_no_harm *= 1.0 - occurrence * (1.0 - p_no_chain_completes)
    return 1.0 - p_no_harm

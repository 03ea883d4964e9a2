"""From acceptance criteria to concrete validation targets.

Three planning stages live here:

1. **Screening** (:func:`screen`): the cheap qualitative gate.  A condition
   whose worst-case severity is claimed to be zero, or which is claimed to
   be controllable in general, can be excluded from quantitative analysis —
   but only with evidence on file.  A zero claim without evidence is not a
   pass; it is rejected.  Everything else needs an acceptance criterion.

2. **Rate back-calculation** (:func:`legacy_tolerable_rate`): the classical
   single-chain calculation that divides an acceptable harm probability by
   the conditional factors between hazardous behavior and harm, yielding the
   tolerable rate of the behavior itself.  Every result carries a caveat:
   the conditional factors are properties of a concrete system in a concrete
   operational domain, so the derived rate
   *requires system-dependent validation or justification* — it is never a
   universal constant.

3. **Exposure targets** (:func:`poisson_validation_target`,
   :func:`plan_targets`): to demonstrate, at confidence ``alpha``, that an
   event's rate is below ``r``, observe ``-ln(1 - alpha) / r`` reference
   periods without the event.  Under a Poisson observation model the chance
   of seeing zero events over that exposure is exactly ``1 - alpha`` when
   the true rate equals ``r``; seeing none is therefore evidence the rate is
   below it.  :func:`plan_targets` splits an acceptance criterion's budget
   across the chains that can produce the harm (proportionally to their
   current bound contributions) and emits one target per chain, plus a
   ledger of every probability the plan consumed, each of which remains a
   validation obligation of its own.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .bounds import chain_contribution
from .errors import (
    DivisionImpossibleError,
    InvalidModelError,
    PeriodMismatchError,
)
from .risk_model import RiskModel, chains_for_harm, validate_model

#: Attached to every back-calculated rate and every ledger entry.  The
#: conditional probabilities these results consume describe one system in
#: one operational domain; reusing the numbers elsewhere without new
#: evidence is unsound.
SYSTEM_DEPENDENCE_CAVEAT = "requires system-dependent validation or justification"

#: Relative tolerance for the zero-event self-check on constructed targets.
_TARGET_CHECK_RTOL = 1e-9


# ---------------------------------------------------------------------------
# screening


class BinaryClass(str, enum.Enum):
    """Screening collapses severity and controllability to one bit each."""

    ZERO = "zero"
    POSITIVE = "positive"


@dataclass(frozen=True)
class ScreeningRecord:
    """One candidate condition with its claimed screening classes.

    ``severity`` is ``zero`` when the condition is claimed unable to cause
    injury at all; ``controllability`` is ``zero`` when the situation is
    claimed controllable in general.  ``evidence`` points at whatever backs
    the claim (a document id, a test reference); ``None`` or blank means no
    evidence was provided.
    """

    id: str
    condition: str
    severity: BinaryClass
    controllability: BinaryClass
    evidence: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id.strip():
            raise ValueError(f"screening record id must be a non-empty string, got {self.id!r}")
        object.__setattr__(self, "severity", BinaryClass(self.severity))
        object.__setattr__(self, "controllability", BinaryClass(self.controllability))

    @property
    def claims_zero(self) -> bool:
        return BinaryClass.ZERO in (self.severity, self.controllability)

    @property
    def has_evidence(self) -> bool:
        return self.evidence is not None and bool(self.evidence.strip())


@dataclass(frozen=True)
class ScreeningResult:
    """The three-way partition produced by :func:`screen`.

    Buckets preserve the input order of the records.
    """

    excluded_with_evidence: tuple[ScreeningRecord, ...]
    requires_acceptance_criterion: tuple[ScreeningRecord, ...]
    rejected_missing_evidence: tuple[ScreeningRecord, ...]


def screen(records: Iterable[ScreeningRecord]) -> ScreeningResult:
    """Partition screening records by claim and evidence.

    * zero severity or zero controllability, with evidence: excluded from
      quantitative analysis;
    * a zero claim without evidence: rejected — the claim does not stand;
    * both classes positive: the condition needs an acceptance criterion and
      quantitative treatment.
    """
    excluded: list[ScreeningRecord] = []
    requires: list[ScreeningRecord] = []
    rejected: list[ScreeningRecord] = []
    for record in records:
        if record.claims_zero:
            (excluded if record.has_evidence else rejected).append(record)
        else:
            requires.append(record)
    return ScreeningResult(
        excluded_with_evidence=tuple(excluded),
        requires_acceptance_criterion=tuple(requires),
        rejected_missing_evidence=tuple(rejected),
    )


# ---------------------------------------------------------------------------
# acceptance criteria


class Rationale(str, enum.Enum):
    """Recognised justification principles for an acceptance threshold."""

    GAMAB = "GAMAB"
    PRB = "PRB"
    ALARP = "ALARP"
    MEM = "MEM"
    OTHER = "other"


@dataclass(frozen=True)
class AcceptanceCriterion:
    """A quantitative ceiling on one harm, per reference period.

    ``threshold`` is the maximum tolerable probability of the harm occurring
    (at severity ``level``, when given) within one reference period.  The
    ``reference_period`` must match the model the criterion is applied to;
    mixing periods silently is the classic way to be wrong by orders of
    magnitude, so it is stated here explicitly and checked at planning time.
    """

    id: str
    harm: str
    threshold: float
    rationale: Rationale
    reference_period: str
    level: str | None = None
    description: str = ""

    def __post_init__(self) -> None:
        for name in ("id", "harm", "reference_period"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value.strip():
                raise ValueError(f"criterion {name} must be a non-empty string, got {value!r}")
        object.__setattr__(self, "rationale", Rationale(self.rationale))
        threshold = self.threshold
        if isinstance(threshold, bool) or not isinstance(threshold, (int, float)):
            raise ValueError(f"threshold must be a number, got {threshold!r}")
        threshold = float(threshold)
        if not (math.isfinite(threshold) and 0.0 < threshold <= 1.0):
            raise ValueError(f"threshold must be a probability in (0, 1], got {threshold!r}")
        object.__setattr__(self, "threshold", threshold)


# ---------------------------------------------------------------------------
# legacy rate back-calculation


@dataclass(frozen=True)
class TolerableRate:
    """A back-calculated rate, welded to its applicability caveat."""

    rate: float
    caveat: str = SYSTEM_DEPENDENCE_CAVEAT


def legacy_tolerable_rate(
    acceptable_harm: float,
    p_exposure: float,
    p_lack_of_control: float,
    p_severity: float,
) -> TolerableRate:
    """Solve ``acceptable_harm = rate * p_exposure * p_lack_of_control * p_severity``.

    The three conditionals are, in order: the probability that the hazardous
    behavior occurs under exposure that can escalate, the probability that
    the resulting event is not controlled, and the probability that the
    uncontrolled event causes harm of the severity under consideration.

    Raises :class:`DivisionImpossibleError` naming the first factor that is
    zero; with a zero conditional the acceptable harm puts no constraint on
    the rate at all, and pretending otherwise would be fabricating a number.
    """
    factors = {
        "p_exposure": p_exposure,
        "p_lack_of_control": p_lack_of_control,
        "p_severity": p_severity,
    }
    for name, value in factors.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"{name} must be a number, got {value!r}")
        if not (0.0 <= float(value) <= 1.0):
            raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        if float(value) == 0.0:
            raise DivisionImpossibleError(name)
    if (
        isinstance(acceptable_harm, bool)
        or not isinstance(acceptable_harm, (int, float))
        or not math.isfinite(float(acceptable_harm))
        or float(acceptable_harm) < 0.0
    ):
        raise ValueError(
            f"acceptable_harm must be a finite non-negative number, got {acceptable_harm!r}"
        )
    rate = float(acceptable_harm) / p_exposure / p_lack_of_control / p_severity
    return TolerableRate(rate=rate)


# ---------------------------------------------------------------------------
# exposure targets


@dataclass(frozen=True)
class ValidationTarget:
    """An exposure to observe, event-free, to support a rate claim.

    ``required_exposure`` is measured in reference periods.  The defining
    property — the probability of observing zero events over the exposure is
    ``1 - confidence`` when the true rate equals ``tolerable_rate`` — is
    re-checked on construction, so an inconsistent target cannot exist.
    """

    tolerable_rate: float
    confidence: float
    required_exposure: float
    criterion: str | None = None
    chain: str | None = None
    caveat: str = SYSTEM_DEPENDENCE_CAVEAT

    def __post_init__(self) -> None:
        if not (math.isfinite(self.tolerable_rate) and self.tolerable_rate > 0.0):
            raise ValueError(
                f"tolerable_rate must be finite and positive, got {self.tolerable_rate!r}"
            )
        if not (0.0 < self.confidence < 1.0):
            raise ValueError(f"confidence must lie in (0, 1), got {self.confidence!r}")
        if not (math.isfinite(self.required_exposure) and self.required_exposure > 0.0):
            raise ValueError(
                f"required_exposure must be finite and positive, got {self.required_exposure!r}"
            )
        residual = 1.0 - self.confidence
        zero_event = math.exp(-self.tolerable_rate * self.required_exposure)
        if abs(zero_event - residual) > _TARGET_CHECK_RTOL * residual:
            raise ValueError(
                "inconsistent target: zero-event probability "
                f"exp(-rate * exposure) = {zero_event!r} does not match "
                f"1 - confidence = {residual!r}"
            )


def poisson_validation_target(
    tolerable_rate: float,
    confidence: float,
    criterion: str | None = None,
    chain: str | None = None,
) -> ValidationTarget:
    """Exposure needed to support ``rate <= tolerable_rate`` at ``confidence``.

    Under Poisson counting, zero observed events over an exposure ``T``
    happen with probability ``exp(-rate * T)``; solving for the exposure at
    which that equals ``1 - confidence`` gives
    ``T = -ln(1 - confidence) / tolerable_rate``.  Longer exposure without
    an event means higher confidence; a lower rate to demonstrate means
    proportionally more exposure.
    """
    if isinstance(tolerable_rate, bool) or not isinstance(tolerable_rate, (int, float)):
        raise ValueError(f"tolerable_rate must be a number, got {tolerable_rate!r}")
    if not (math.isfinite(float(tolerable_rate)) and tolerable_rate > 0.0):
        raise ValueError(f"tolerable_rate must be finite and positive, got {tolerable_rate!r}")
    if isinstance(confidence, bool) or not isinstance(confidence, (int, float)):
        raise ValueError(f"confidence must be a number, got {confidence!r}")
    if not (0.0 < float(confidence) < 1.0):
        raise ValueError(f"confidence must lie strictly between 0 and 1, got {confidence!r}")
    # -log1p(-c) keeps precision for small confidence values where
    # -log(1 - c) would lose digits.
    exposure = -math.log1p(-float(confidence)) / float(tolerable_rate)
    return ValidationTarget(
        tolerable_rate=float(tolerable_rate),
        confidence=float(confidence),
        required_exposure=exposure,
        criterion=criterion,
        chain=chain,
    )


# ---------------------------------------------------------------------------
# planning over a model


@dataclass(frozen=True)
class ValidationObligation:
    """One probability the plan consumed, and therefore relies on.

    Every entry carries the same caveat: the value describes this system in
    this operational domain and must itself be validated or justified.
    """

    quantity: str
    subject: str
    value: float
    note: str = SYSTEM_DEPENDENCE_CAVEAT


@dataclass(frozen=True)
class PlanResult:
    """Targets and the obligation ledger produced by :func:`plan_targets`."""

    targets: tuple[ValidationTarget, ...]
    obligations: tuple[ValidationObligation, ...]


def _chain_downstream(chain, level: str | None) -> tuple[float, str | None]:
    """Product of a chain's conditionals (and severity mass); names a zero factor."""
    names = ("p_behavior_given_trigger", "p_event_given_behavior", "p_harm_given_event")
    product = 1.0
    for name, factor in zip(names, chain.conditional_factors):
        if factor == 0.0:
            return 0.0, name
        product *= factor
    if level is not None:
        mass = chain.severity_dist.get(level, 0.0)
        if mass == 0.0:
            return 0.0, f"severity_dist[{level}]"
        product *= mass
    return product, None


def plan_targets(
    model: RiskModel,
    criteria: Sequence[AcceptanceCriterion],
    confidence: float,
) -> PlanResult:
    """Turn acceptance criteria into per-chain validation targets.

    For each criterion, the threshold is split across the harm's chains in
    proportion to their current bound contributions (equally, when every
    contribution is zero).  Each chain's share is then divided by its
    downstream conditional product to get the tolerable occurrence rate of
    its trigger along that chain, and a Poisson exposure target is derived
    for it.  The allocated shares reproduce the threshold exactly:
    ``sum(rate_c * downstream_c) == threshold`` up to rounding.

    A chain whose contribution is zero while others are positive receives a
    zero share and therefore no target (its own annotations say it cannot
    produce the harm at the considered level).  When a share is positive but
    the chain's downstream product is zero, no finite rate exists and
    :class:`DivisionImpossibleError` names the zero factor.

    The ledger lists every occurrence and conditional probability the
    allocation consumed, once each, in first-use order.
    """
    if isinstance(confidence, bool) or not isinstance(confidence, (int, float)):
        raise ValueError(f"confidence must be a number, got {confidence!r}")
    if not (0.0 < float(confidence) < 1.0):
        raise ValueError(f"confidence must lie strictly between 0 and 1, got {confidence!r}")
    findings = validate_model(model)
    if findings:
        raise InvalidModelError(findings)

    targets: list[ValidationTarget] = []
    obligations: dict[tuple[str, str], ValidationObligation] = {}

    def consume(quantity: str, subject: str, value: float) -> None:
        obligations.setdefault(
            (quantity, subject),
            ValidationObligation(quantity=quantity, subject=subject, value=value),
        )

    for criterion in criteria:
        if criterion.reference_period != model.reference_period:
            raise PeriodMismatchError(criterion.reference_period, model.reference_period)
        if criterion.level is not None:
            model.severity_scale.index(criterion.level)
        chains = chains_for_harm(model, criterion.harm)
        if not chains:
            continue

        contributions = []
        for chain in chains:
            contribution = chain_contribution(model, chain)
            if criterion.level is not None:
                contribution *= chain.severity_dist.get(criterion.level, 0.0)
            contributions.append(contribution)
        total = math.fsum(contributions)

        for chain, contribution in zip(chains, contributions):
            consume("occurrence", chain.trigger, model.trigger(chain.trigger).occurrence)
            for name, factor in zip(
                ("p_behavior_given_trigger", "p_event_given_behavior", "p_harm_given_event"),
                chain.conditional_factors,
            ):
                consume(name, chain.id, factor)
            if criterion.level is not None:
                consume(
                    f"severity_dist[{criterion.level}]",
                    chain.id,
                    chain.severity_dist.get(criterion.level, 0.0),
                )

            if total > 0.0:
                share = criterion.threshold * (contribution / total)
            else:
                share = criterion.threshold / len(chains)
            if share == 0.0:
                continue

            downstream, zero_factor = _chain_downstream(chain, criterion.level)
            if zero_factor is not None:
                raise DivisionImpossibleError(f"{zero_factor} of chain {chain.id!r}")
            targets.append(
                poisson_validation_target(
                    tolerable_rate=share / downstream,
                    confidence=float(confidence),
                    criterion=criterion.id,
                    chain=chain.id,
                )
            )

    return PlanResult(targets=tuple(targets), obligations=tuple(obligations.values()))

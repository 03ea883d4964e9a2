"""Causal risk-chain model for SOTIF-style hazard analysis.

The model describes how a harm can come about as a chain of events::

    trigger  -->  hazardous behavior  -->  hazardous event  -->  harm

A :class:`Trigger` is a condition of the operating environment that occurs
with some rate or probability per reference period.  Conditional on the
trigger, the system may show a hazardous :class:`Behavior` (by omission or
commission).  Conditional on that, a hazardous :class:`Event` may occur,
which combines a :class:`Hazard` with the :class:`Scenario` it lands in.
Conditional on the event, a :class:`Harm` may result, graded on a
:class:`SeverityScale`.

A :class:`Chain` ties one concrete path through those layers together and
carries the probability annotations.  A :class:`RiskModel` is the container
for all of it.  Models are plain immutable data; all computations over them
live in :mod:`sotif_risk.bounds`, :mod:`sotif_risk.planning` and
:mod:`sotif_risk.oracle`.

Structural impossibilities (empty identifiers, an empty severity scale)
fail fast at construction time.  Referential and numeric problems are
reported comprehensively by :func:`validate_model` instead, so a loaded
document can be checked and every defect reported at once.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import UnknownIdError

#: Absolute tolerance for requiring a severity distribution to sum to one.
SEVERITY_NORMALIZATION_TOL = 1e-9


def _require_id(value: str, what: str) -> str:
    if not isinstance(value, str) or not value.strip():
        raise ValueError(f"{what} must be a non-empty string, got {value!r}")
    return value


def _as_float(value: object, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{what} must be a number, got {value!r}")
    return float(value)


class BehaviorMode(str, enum.Enum):
    """Whether a hazardous behavior is something the system did or failed to do."""

    OMISSION = "omission"
    COMMISSION = "commission"


@dataclass(frozen=True)
class Trigger:
    """A triggering condition with its occurrence probability per reference period."""

    id: str
    description: str
    occurrence: float

    def __post_init__(self) -> None:
        _require_id(self.id, "trigger id")
        object.__setattr__(self, "occurrence", _as_float(self.occurrence, "occurrence"))


@dataclass(frozen=True)
class Behavior:
    """A hazardous behavior of the system, by omission or commission."""

    id: str
    description: str
    mode: BehaviorMode

    def __post_init__(self) -> None:
        _require_id(self.id, "behavior id")
        object.__setattr__(self, "mode", BehaviorMode(self.mode))


@dataclass(frozen=True)
class Hazard:
    id: str
    description: str

    def __post_init__(self) -> None:
        _require_id(self.id, "hazard id")


@dataclass(frozen=True)
class Scenario:
    id: str
    description: str

    def __post_init__(self) -> None:
        _require_id(self.id, "scenario id")


@dataclass(frozen=True)
class Event:
    """A hazardous event: a hazard occurring within a concrete scenario."""

    id: str
    description: str
    hazard: str
    scenario: str

    def __post_init__(self) -> None:
        _require_id(self.id, "event id")
        _require_id(self.hazard, "event hazard reference")
        _require_id(self.scenario, "event scenario reference")


@dataclass(frozen=True)
class Harm:
    id: str
    description: str

    def __post_init__(self) -> None:
        _require_id(self.id, "harm id")


@dataclass(frozen=True)
class SeverityScale:
    """Ordered severity levels a harm outcome is graded on."""

    levels: tuple[str, ...]

    def __post_init__(self) -> None:
        levels = tuple(self.levels)
        if not levels:
            raise ValueError("a severity scale needs at least one level")
        for level in levels:
            _require_id(level, "severity level")
        if len(set(levels)) != len(levels):
            raise ValueError(f"severity levels must be unique, got {levels!r}")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def default(cls) -> "SeverityScale":
        """The customary four-level automotive scale S0 (none) through S3."""
        return cls(levels=("S0", "S1", "S2", "S3"))

    def __contains__(self, level: str) -> bool:
        return level in self.levels

    def index(self, level: str) -> int:
        try:
            return self.levels.index(level)
        except ValueError:
            raise UnknownIdError("severity level", level) from None


@dataclass(frozen=True)
class Chain:
    """One causal path from a trigger to a harm, with probability annotations.

    The three conditional probabilities are read as: given everything to the
    left of the arrow happened, how likely is the next step.  The severity
    distribution conditions on the harm having occurred and must sum to one;
    levels omitted from the mapping carry zero mass.
    """

    id: str
    trigger: str
    behavior: str
    event: str
    harm: str
    p_behavior_given_trigger: float
    p_event_given_behavior: float
    p_harm_given_event: float
    severity_dist: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        _require_id(self.id, "chain id")
        for name in ("trigger", "behavior", "event", "harm"):
            _require_id(getattr(self, name), f"chain {name} reference")
        for name in ("p_behavior_given_trigger", "p_event_given_behavior", "p_harm_given_event"):
            object.__setattr__(self, name, _as_float(getattr(self, name), name))
        dist = {
            _require_id(level, "severity level"): _as_float(value, f"severity mass for {level!r}")
            for level, value in dict(self.severity_dist).items()
        }
        object.__setattr__(self, "severity_dist", dist)

    @property
    def conditional_factors(self) -> tuple[float, float, float]:
        """The downstream conditionals in causal order."""
        return (self.p_behavior_given_trigger, self.p_event_given_behavior, self.p_harm_given_event)


@dataclass(frozen=True)
class RiskModel:
    """An immutable container for one analysed system.

    ``reference_period`` states the unit all occurrence probabilities are
    expressed against (for example ``"hour of operation"``).  Probabilities
    on different reference periods must never be combined; consumers that
    mix a model with externally stated rates check this field.
    """

    reference_period: str
    severity_scale: SeverityScale
    triggers: tuple[Trigger, ...]
    behaviors: tuple[Behavior, ...]
    hazards: tuple[Hazard, ...]
    scenarios: tuple[Scenario, ...]
    events: tuple[Event, ...]
    harms: tuple[Harm, ...]
    chains: tuple[Chain, ...]

    def __post_init__(self) -> None:
        _require_id(self.reference_period, "reference period")
        if not isinstance(self.severity_scale, SeverityScale):
            raise ValueError("severity_scale must be a SeverityScale")
        for name in ("triggers", "behaviors", "hazards", "scenarios", "events", "harms", "chains"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    # -- lookups -----------------------------------------------------------
    # Duplicate ids are a validation finding, not a constructor error; the
    # lookup tables below simply keep the last occurrence, which is harmless
    # because every computation validates the model first.

    @cached_property
    def _triggers_by_id(self) -> dict[str, Trigger]:
        return {t.id: t for t in self.triggers}

    @cached_property
    def _behaviors_by_id(self) -> dict[str, Behavior]:
        return {b.id: b for b in self.behaviors}

    @cached_property
    def _hazards_by_id(self) -> dict[str, Hazard]:
        return {h.id: h for h in self.hazards}

    @cached_property
    def _scenarios_by_id(self) -> dict[str, Scenario]:
        return {s.id: s for s in self.scenarios}

    @cached_property
    def _events_by_id(self) -> dict[str, Event]:
        return {e.id: e for e in self.events}

    @cached_property
    def _harms_by_id(self) -> dict[str, Harm]:
        return {h.id: h for h in self.harms}

    @cached_property
    def _chains_by_id(self) -> dict[str, Chain]:
        return {c.id: c for c in self.chains}

    def _get(self, table: Mapping[str, object], kind: str, identifier: str):
        try:
            return table[identifier]
        except KeyError:
            raise UnknownIdError(kind, identifier) from None

    def trigger(self, identifier: str) -> Trigger:
        return self._get(self._triggers_by_id, "trigger", identifier)

    def behavior(self, identifier: str) -> Behavior:
        return self._get(self._behaviors_by_id, "behavior", identifier)

    def hazard(self, identifier: str) -> Hazard:
        return self._get(self._hazards_by_id, "hazard", identifier)

    def scenario(self, identifier: str) -> Scenario:
        return self._get(self._scenarios_by_id, "scenario", identifier)

    def event(self, identifier: str) -> Event:
        return self._get(self._events_by_id, "event", identifier)

    def harm(self, identifier: str) -> Harm:
        return self._get(self._harms_by_id, "harm", identifier)

    def chain(self, identifier: str) -> Chain:
        return self._get(self._chains_by_id, "chain", identifier)


@dataclass(frozen=True, order=True)
class ValidationFinding:
    """One defect found in a model.

    ``kind`` is a stable machine-readable category, ``subject`` the id of the
    element at fault, ``detail`` a human-readable explanation.
    """

    kind: str
    subject: str
    detail: str


def _probability_findings(subject: str, name: str, value: float) -> Iterable[ValidationFinding]:
    # NaN fails both comparisons, so it is reported as out of range too.
    if not (0.0 <= value <= 1.0):
        yield ValidationFinding(
            kind="probability-out-of-range",
            subject=subject,
            detail=f"{name} = {value!r} is outside [0, 1]",
        )


def validate_model(model: RiskModel) -> tuple[ValidationFinding, ...]:
    """Check a model for referential and numeric defects.

    Returns every finding at once, sorted by ``(kind, subject, detail)`` so
    the report is deterministic.  An empty tuple means the model is clean.

    Finding kinds:

    ``duplicate-id``
        The same identifier is used by more than one element.  Identifiers
        share a single namespace across all element kinds, chains included.
    ``missing-reference``
        A chain or event references an id that does not exist, references an
        element of the wrong kind, or a severity distribution uses a level
        that is not on the model's scale.
    ``probability-out-of-range``
        A probability annotation lies outside [0, 1] (or is NaN).
    ``severity-distribution-not-normalized``
        A chain's severity distribution does not sum to one within
        ``SEVERITY_NORMALIZATION_TOL``.
    """
    findings: list[ValidationFinding] = []

    seen: dict[str, str] = {}
    element_groups: tuple[tuple[str, tuple], ...] = (
        ("trigger", model.triggers),
        ("behavior", model.behaviors),
        ("hazard", model.hazards),
        ("scenario", model.scenarios),
        ("event", model.events),
        ("harm", model.harms),
        ("chain", model.chains),
    )
    for kind, elements in element_groups:
        for element in elements:
            previous = seen.get(element.id)
            if previous is not None:
                findings.append(
                    ValidationFinding(
                        kind="duplicate-id",
                        subject=element.id,
                        detail=f"id is used by both a {previous} and a {kind}",
                    )
                )
            else:
                seen[element.id] = kind

    trigger_ids = {t.id for t in model.triggers}
    behavior_ids = {b.id for b in model.behaviors}
    hazard_ids = {h.id for h in model.hazards}
    scenario_ids = {s.id for s in model.scenarios}
    event_ids = {e.id for e in model.events}
    harm_ids = {h.id for h in model.harms}

    for trigger in model.triggers:
        findings.extend(_probability_findings(trigger.id, "occurrence", trigger.occurrence))

    for event in model.events:
        if event.hazard not in hazard_ids:
            findings.append(
                ValidationFinding(
                    kind="missing-reference",
                    subject=event.id,
                    detail=f"hazard {event.hazard!r} is not defined",
                )
            )
        if event.scenario not in scenario_ids:
            findings.append(
                ValidationFinding(
                    kind="missing-reference",
                    subject=event.id,
                    detail=f"scenario {event.scenario!r} is not defined",
                )
            )

    references = (
        ("trigger", trigger_ids),
        ("behavior", behavior_ids),
        ("event", event_ids),
        ("harm", harm_ids),
    )
    for chain in model.chains:
        for field_name, valid_ids in references:
            identifier = getattr(chain, field_name)
            if identifier not in valid_ids:
                findings.append(
                    ValidationFinding(
                        kind="missing-reference",
                        subject=chain.id,
                        detail=f"{field_name} {identifier!r} is not defined",
                    )
                )
        for name, value in zip(
            ("p_behavior_given_trigger", "p_event_given_behavior", "p_harm_given_event"),
            chain.conditional_factors,
        ):
            findings.extend(_probability_findings(chain.id, name, value))
        for level, mass in chain.severity_dist.items():
            if level not in model.severity_scale:
                findings.append(
                    ValidationFinding(
                        kind="missing-reference",
                        subject=chain.id,
                        detail=f"severity level {level!r} is not on the scale",
                    )
                )
            findings.extend(_probability_findings(chain.id, f"severity_dist[{level}]", mass))
        total = math.fsum(chain.severity_dist.values())
        if not math.isfinite(total) or abs(total - 1.0) > SEVERITY_NORMALIZATION_TOL:
            findings.append(
                ValidationFinding(
                    kind="severity-distribution-not-normalized",
                    subject=chain.id,
                    detail=f"severity distribution sums to {total!r}, expected 1.0",
                )
            )

    return tuple(sorted(findings))


def chains_for_harm(model: RiskModel, harm_id: str) -> tuple[Chain, ...]:
    """All chains leading to the given harm, in model order.

    Raises :class:`UnknownIdError` if the harm id is not defined; returns an
    empty tuple for a harm that exists but has no chain leading to it.
    """
    model.harm(harm_id)
    return tuple(chain for chain in model.chains if chain.harm == harm_id)

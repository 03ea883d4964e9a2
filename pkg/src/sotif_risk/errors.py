"""Exception hierarchy shared across the package.

Everything raised on purpose derives from :class:`SotifRiskError`, so callers
(and the command line front end) can distinguish domain failures from bugs.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, types only
    from .risk_model import ValidationFinding


class SotifRiskError(Exception):
    """Base class for all errors raised by this package."""


class UnknownIdError(SotifRiskError, KeyError):
    """An identifier was looked up that the model does not define."""

    def __init__(self, kind: str, identifier: str):
        super().__init__(f"unknown {kind} id: {identifier!r}")
        self.kind = kind
        self.identifier = identifier

    def __str__(self) -> str:  # KeyError would repr() the args tuple
        return self.args[0]


class InvalidModelError(SotifRiskError):
    """A model failed structural validation.

    Carries the full list of findings so callers can report every problem at
    once instead of fixing them one at a time.
    """

    def __init__(self, findings: "tuple[ValidationFinding, ...]"):
        lines = "; ".join(f"{f.kind}: {f.subject}: {f.detail}" for f in findings)
        super().__init__(f"model failed validation ({len(findings)} finding(s)): {lines}")
        self.findings = findings


class DivisionImpossibleError(SotifRiskError):
    """A tolerable-rate back-calculation hit a zero conditional factor.

    The message names the offending factor explicitly so the caller can see
    which conditional made the division undefined.
    """

    def __init__(self, factor_name: str):
        super().__init__(
            f"cannot solve for the tolerable occurrence rate: "
            f"conditional factor {factor_name!r} is zero, so the division is undefined"
        )
        self.factor_name = factor_name


class PeriodMismatchError(SotifRiskError):
    """An acceptance criterion and a model state different reference periods."""

    def __init__(self, criterion_period: str, model_period: str):
        super().__init__(
            f"acceptance criterion is expressed per {criterion_period!r} but the "
            f"model probabilities are per {model_period!r}; rates on different "
            f"reference periods must not be combined"
        )
        self.criterion_period = criterion_period
        self.model_period = model_period


class OracleCapacityError(SotifRiskError):
    """An exact computation was requested beyond its enumerable size limit."""


class DocumentError(SotifRiskError):
    """A serialized document could not be parsed, validated, or interpreted."""

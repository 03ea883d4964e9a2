"""Reading, validating, and canonically writing the two document kinds.

Documents are YAML mappings checked against bundled JSON Schemas before any
object is built.  Two deliberate choices:

* The schemas do **not** range-check probabilities.  A document claiming a
  probability of 1.2 parses fine and then shows up as a model-validation
  finding — the analyst sees a domain-level report naming the element, not
  a schema stack trace.
* Serialization is canonical: fixed key order, floats rendered with 17
  significant digits (enough to round-trip IEEE doubles exactly), sorted
  dependency lists.  Serializing equal in-memory documents yields identical
  bytes, which makes reports diffable and testable.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path
from typing import Any, Mapping

import jsonschema
import yaml

from .errors import DocumentError, InvalidModelError
from .planning import AcceptanceCriterion, ScreeningRecord
from .risk_model import (
    Behavior,
    Chain,
    Event,
    Harm,
    Hazard,
    RiskModel,
    Scenario,
    SeverityScale,
    Trigger,
    validate_model,
)
from .term_registry import Provenance, TermDef, TermRegistry

#: Version written by this build; readers accept any 1.x(.y) version.
SCHEMA_VERSION = "1.0.0"

_SUPPORTED_VERSION = re.compile(r"^1\.\d+(\.\d+)?$")

MODEL_SCHEMA_NAME = "model_document.schema.json"
REGISTRY_SCHEMA_NAME = "registry_document.schema.json"


@dataclass(frozen=True)
class ModelDocument:
    """A risk model plus the criteria and screening records shipped with it."""

    schema_version: str
    model: RiskModel
    criteria: tuple[AcceptanceCriterion, ...]
    screening: tuple[ScreeningRecord, ...]


@dataclass(frozen=True)
class RegistryDocument:
    schema_version: str
    registry: TermRegistry


# ---------------------------------------------------------------------------
# canonical number / text rendering


def format_float(value: float) -> str:
    """Render a float with 17 significant digits (exact double round-trip)."""
    if math.isnan(value):
        return ".nan"
    if math.isinf(value):
        return ".inf" if value > 0 else "-.inf"
    text = format(float(value), ".17g")
    # Keep every token unmistakably a float: integral values get a trailing
    # '.0', and exponent forms get a mantissa dot ('1e-08' -> '1.0e-08') so
    # YAML resolvers accept them without an explicit tag.
    if "e" in text or "E" in text:
        mantissa, _, exponent = text.partition("e" if "e" in text else "E")
        if "." not in mantissa:
            text = f"{mantissa}.0e{exponent}"
    elif "." not in text:
        text += ".0"
    return text


class _CanonicalDumper(yaml.SafeDumper):
    pass


_CanonicalDumper.add_representer(
    float,
    lambda dumper, value: dumper.represent_scalar("tag:yaml.org,2002:float", format_float(value)),
)


def _dump_yaml(data: Mapping[str, Any]) -> str:
    return yaml.dump(
        data,
        Dumper=_CanonicalDumper,
        sort_keys=False,
        default_flow_style=False,
        allow_unicode=True,
        width=88,
    )


def canonical_json(value: Any) -> str:
    """Deterministic JSON with the same float rendering as the YAML side.

    Mappings keep insertion order; byte-identical output for equal input is
    the point, so no locale, hash order, or float-repr variation is allowed
    to leak in.
    """
    pieces: list[str] = []

    def emit(node: Any, indent: int) -> None:
        pad = "  " * indent
        if isinstance(node, dict):
            if not node:
                pieces.append("{}")
                return
            pieces.append("{\n")
            for i, (key, item) in enumerate(node.items()):
                if not isinstance(key, str):
                    raise TypeError(f"JSON object keys must be strings, got {key!r}")
                pieces.append(f"{pad}  {json.dumps(key, ensure_ascii=False)}: ")
                emit(item, indent + 1)
                pieces.append(",\n" if i < len(node) - 1 else "\n")
            pieces.append(pad + "}")
        elif isinstance(node, (list, tuple)):
            if not node:
                pieces.append("[]")
                return
            pieces.append("[\n")
            for i, item in enumerate(node):
                pieces.append(pad + "  ")
                emit(item, indent + 1)
                pieces.append(",\n" if i < len(node) - 1 else "\n")
            pieces.append(pad + "]")
        elif isinstance(node, bool) or node is None:
            pieces.append(json.dumps(node))
        elif isinstance(node, float):
            if math.isnan(node) or math.isinf(node):
                raise ValueError("non-finite floats have no JSON rendering")
            pieces.append(format_float(node))
        elif isinstance(node, (int, str)):
            pieces.append(json.dumps(node, ensure_ascii=False))
        else:
            raise TypeError(f"cannot render {type(node).__name__} canonically")

    emit(value, 0)
    pieces.append("\n")
    return "".join(pieces)


# ---------------------------------------------------------------------------
# schema plumbing


def _load_schema(name: str) -> dict:
    text = (files("sotif_risk") / "schemas" / name).read_text(encoding="utf-8")
    return json.loads(text)


def _check_against_schema(data: Any, schema_name: str) -> None:
    if not isinstance(data, dict):
        raise DocumentError(f"document root must be a mapping, got {type(data).__name__}")
    version = data.get("schema_version")
    if not isinstance(version, str) or not _SUPPORTED_VERSION.match(version):
        raise DocumentError(
            f"unsupported schema_version {version!r}; this build reads versions 1.x"
        )
    validator = jsonschema.Draft202012Validator(_load_schema(schema_name))
    errors = sorted(
        validator.iter_errors(data),
        key=lambda e: ([str(p) for p in e.absolute_path], e.message),
    )
    if errors:
        details = "; ".join(
            f"{'/'.join(str(p) for p in error.absolute_path) or '<root>'}: {error.message}"
            for error in errors[:5]
        )
        more = f" (+{len(errors) - 5} more)" if len(errors) > 5 else ""
        raise DocumentError(f"document does not match {schema_name}: {details}{more}")


def _parse_yaml(text: str) -> Any:
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise DocumentError(f"not valid YAML: {exc}") from exc


# ---------------------------------------------------------------------------
# model documents


def parse_model_document(text: str) -> ModelDocument:
    """Parse and fully validate a model document from YAML text.

    Raises :class:`DocumentError` for malformed input and
    :class:`InvalidModelError` (carrying all findings) for a well-formed
    document describing a defective model — dangling references, layer
    inversions, out-of-range probabilities and the like are all rejected
    here, so a loaded document is always safe to compute with.
    """
    data = _parse_yaml(text)
    _check_against_schema(data, MODEL_SCHEMA_NAME)

    try:
        model = RiskModel(
            reference_period=data["reference_period"],
            severity_scale=SeverityScale(levels=tuple(data["severity_scale"])),
            triggers=tuple(Trigger(**raw) for raw in data["triggers"]),
            behaviors=tuple(Behavior(**raw) for raw in data["behaviors"]),
            hazards=tuple(Hazard(**raw) for raw in data["hazards"]),
            scenarios=tuple(Scenario(**raw) for raw in data["scenarios"]),
            events=tuple(Event(**raw) for raw in data["events"]),
            harms=tuple(Harm(**raw) for raw in data["harms"]),
            chains=tuple(Chain(**raw) for raw in data["chains"]),
        )
        criteria = tuple(
            AcceptanceCriterion(**raw) for raw in data.get("acceptance_criteria", ())
        )
        screening = tuple(ScreeningRecord(**raw) for raw in data.get("screening", ()))
    except (ValueError, TypeError) as exc:
        raise DocumentError(f"document is schema-valid but unusable: {exc}") from exc

    findings = validate_model(model)
    if findings:
        raise InvalidModelError(findings)
    return ModelDocument(
        schema_version=data["schema_version"],
        model=model,
        criteria=criteria,
        screening=screening,
    )


def load_model_document(path: str | Path) -> ModelDocument:
    return parse_model_document(_read_text(path))


def model_document_to_dict(document: ModelDocument) -> dict[str, Any]:
    """The canonical plain-data form of a model document."""
    model = document.model

    def chain_dict(chain: Chain) -> dict[str, Any]:
        severity = {
            level: chain.severity_dist[level]
            for level in model.severity_scale.levels
            if level in chain.severity_dist
        }
        return {
            "id": chain.id,
            "trigger": chain.trigger,
            "behavior": chain.behavior,
            "event": chain.event,
            "harm": chain.harm,
            "p_behavior_given_trigger": chain.p_behavior_given_trigger,
            "p_event_given_behavior": chain.p_event_given_behavior,
            "p_harm_given_event": chain.p_harm_given_event,
            "severity_dist": severity,
        }

    data: dict[str, Any] = {
        "schema_version": document.schema_version,
        "kind": "risk-model",
        "reference_period": model.reference_period,
        "severity_scale": list(model.severity_scale.levels),
        "triggers": [
            {"id": t.id, "description": t.description, "occurrence": t.occurrence}
            for t in model.triggers
        ],
        "behaviors": [
            {"id": b.id, "description": b.description, "mode": b.mode.value}
            for b in model.behaviors
        ],
        "hazards": [{"id": h.id, "description": h.description} for h in model.hazards],
        "scenarios": [{"id": s.id, "description": s.description} for s in model.scenarios],
        "events": [
            {"id": e.id, "description": e.description, "hazard": e.hazard, "scenario": e.scenario}
            for e in model.events
        ],
        "harms": [{"id": h.id, "description": h.description} for h in model.harms],
        "chains": [chain_dict(c) for c in model.chains],
    }
    if document.criteria:
        criteria = []
        for criterion in document.criteria:
            entry: dict[str, Any] = {
                "id": criterion.id,
                "harm": criterion.harm,
                "threshold": criterion.threshold,
                "rationale": criterion.rationale.value,
                "reference_period": criterion.reference_period,
            }
            if criterion.level is not None:
                entry["level"] = criterion.level
            if criterion.description:
                entry["description"] = criterion.description
            criteria.append(entry)
        data["acceptance_criteria"] = criteria
    if document.screening:
        records = []
        for record in document.screening:
            entry = {
                "id": record.id,
                "condition": record.condition,
                "severity": record.severity.value,
                "controllability": record.controllability.value,
            }
            if record.evidence is not None:
                entry["evidence"] = record.evidence
            records.append(entry)
        data["screening"] = records
    return data


def dump_model_document(document: ModelDocument) -> str:
    return _dump_yaml(model_document_to_dict(document))


def save_model_document(document: ModelDocument, path: str | Path) -> None:
    Path(path).write_text(dump_model_document(document), encoding="utf-8")


# ---------------------------------------------------------------------------
# registry documents


def parse_registry_document(text: str) -> RegistryDocument:
    """Parse a term-registry document.

    Lint findings (undefined terms, cycles, …) are *not* load errors; they
    are what the linter exists to report about a successfully loaded
    registry.  Only structural problems — bad YAML, schema violations,
    duplicate terms, definition text on an undefined term — fail the load.
    """
    data = _parse_yaml(text)
    _check_against_schema(data, REGISTRY_SCHEMA_NAME)
    try:
        terms = tuple(
            TermDef(
                term=raw["term"],
                provenance=Provenance(raw["provenance"]),
                depends_on=frozenset(raw.get("depends_on", ())),
                definition_text=raw.get("definition_text"),
            )
            for raw in data["terms"]
        )
        registry = TermRegistry(terms=terms)
    except (ValueError, TypeError) as exc:
        raise DocumentError(f"document is schema-valid but unusable: {exc}") from exc
    return RegistryDocument(schema_version=data["schema_version"], registry=registry)


def load_registry_document(path: str | Path) -> RegistryDocument:
    return parse_registry_document(_read_text(path))


def registry_document_to_dict(document: RegistryDocument) -> dict[str, Any]:
    terms = []
    for term_def in document.registry.terms:
        entry: dict[str, Any] = {
            "term": term_def.term,
            "provenance": term_def.provenance.value,
            "depends_on": sorted(term_def.depends_on),
        }
        if term_def.definition_text is not None:
            entry["definition_text"] = term_def.definition_text
        terms.append(entry)
    return {
        "schema_version": document.schema_version,
        "kind": "term-registry",
        "terms": terms,
    }


def dump_registry_document(document: RegistryDocument) -> str:
    return _dump_yaml(registry_document_to_dict(document))


def save_registry_document(document: RegistryDocument, path: str | Path) -> None:
    Path(path).write_text(dump_registry_document(document), encoding="utf-8")


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc

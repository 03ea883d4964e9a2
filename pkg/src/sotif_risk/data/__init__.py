"""Bundled example corpora.

Three documents ship with the package:

``iso21448_terms.yaml``
    The terminology of the SOTIF standard as published, encoded as a
    dependency graph: every term, where its definition comes from, and which
    other terms that definition relies on.  Linting it reproduces the known
    soundness gaps — load-bearing terms that are never defined.

``iso21448_terms_amended.yaml``
    The same registry after applying :func:`proposed_term_amendments`; lints
    clean and layers with ``harm`` among the primitive terms.  The file is
    exactly ``apply_amendments`` of the base registry (a test pins this), so
    the two corpora cannot drift apart.

``ice_plates.yaml``
    A worked motorway example: ice plates on a truck ahead can stay put or
    come loose, the following automated vehicle can fail to keep distance or
    evade, and several distinct harms can result.  The probability
    annotations are illustrative placeholders chosen to exercise the
    machinery — they are not measurements of any real system.
"""

from __future__ import annotations

from importlib.resources import files

from ..model_io import (
    ModelDocument,
    RegistryDocument,
    parse_model_document,
    parse_registry_document,
)
from ..term_registry import Provenance, TermDef

ISO21448_TERMS = "iso21448_terms.yaml"
AMENDED_TERMS = "iso21448_terms_amended.yaml"
ICE_PLATES = "ice_plates.yaml"

#: Names accepted by the command line's ``bundled:`` input scheme.
BUNDLED = {
    "iso21448_terms": ISO21448_TERMS,
    "iso21448_terms_amended": AMENDED_TERMS,
    "ice_plates": ICE_PLATES,
}


def corpus_text(name: str) -> str:
    """Raw YAML text of a bundled corpus file."""
    if name not in BUNDLED.values():
        known = ", ".join(sorted(BUNDLED.values()))
        raise KeyError(f"no bundled corpus named {name!r}; available: {known}")
    return (files("sotif_risk.data") / name).read_text(encoding="utf-8")


def iso21448_term_registry() -> RegistryDocument:
    return parse_registry_document(corpus_text(ISO21448_TERMS))


def amended_term_registry() -> RegistryDocument:
    return parse_registry_document(corpus_text(AMENDED_TERMS))


def ice_plates_document() -> ModelDocument:
    return parse_model_document(corpus_text(ICE_PLATES))


def proposed_term_amendments() -> tuple[TermDef, ...]:
    """Replacement definitions that ground the causal vocabulary in harm.

    The published registry leaves *hazardous behavior* and *occurrence*
    undefined while other definitions lean on them, and defines *hazard* in
    terms of hazardous behavior.  The amendments below give the missing
    definitions and re-root the cluster so that every causal term bottoms
    out at *harm* without introducing a cycle:

    * *hazard* becomes simply a potential source of harm;
    * *hazardous behavior* is behavior that constitutes a hazard;
    * *occurrence* is the materialization of a triggering condition;
    * *scenario* no longer leans on the (undefined) *situation*;
    * *hazardous event* and *exposure* are restated over defined terms only.
    """
    return (
        TermDef(
            term="hazard",
            provenance=Provenance.DEFINED_IN_26262_ADOPTED,
            depends_on=frozenset({"harm"}),
            definition_text="Potential source of harm.",
        ),
        TermDef(
            term="hazardous behavior",
            provenance=Provenance.DEFINED_IN_21448,
            depends_on=frozenset({"hazard"}),
            definition_text=(
                "Behavior of the system that constitutes a hazard, regardless of its cause."
            ),
        ),
        TermDef(
            term="occurrence",
            provenance=Provenance.DEFINED_IN_21448,
            depends_on=frozenset({"triggering condition"}),
            definition_text=(
                "Materialization of a triggering condition during operation, per reference period."
            ),
        ),
        TermDef(
            term="scenario",
            provenance=Provenance.DEFINED_IN_21448,
            depends_on=frozenset({"scene", "action", "event"}),
            definition_text=(
                "Temporal sequence of scenes connected by actions and events."
            ),
        ),
        TermDef(
            term="hazardous event",
            provenance=Provenance.DEFINED_IN_21448,
            depends_on=frozenset({"event", "hazard", "scenario", "harm"}),
            definition_text=(
                "Event in a scenario in which a hazard can develop into harm."
            ),
        ),
        TermDef(
            term="exposure",
            provenance=Provenance.DEFINED_IN_21448,
            depends_on=frozenset({"scenario", "hazardous event"}),
            definition_text=(
                "Share of operation spent in scenarios in which a hazardous event can occur."
            ),
        ),
    )

from __future__ import annotations

import dataclasses
import math

import pytest

from sotif_risk.errors import UnknownIdError
from sotif_risk.risk_model import (
    Behavior,
    BehaviorMode,
    Chain,
    Event,
    Harm,
    Hazard,
    RiskModel,
    Scenario,
    SeverityScale,
    Trigger,
    chains_for_harm,
    validate_model,
)


def tiny_model(**overrides) -> RiskModel:
    parts = dict(
        reference_period="hour of operation",
        severity_scale=SeverityScale.default(),
        triggers=(Trigger(id="T1", description="t", occurrence=0.1),),
        behaviors=(Behavior(id="B1", description="b", mode=BehaviorMode.OMISSION),),
        hazards=(Hazard(id="Z1", description="z"),),
        scenarios=(Scenario(id="SC1", description="s"),),
        events=(Event(id="E1", description="e", hazard="Z1", scenario="SC1"),),
        harms=(Harm(id="H1", description="h"),),
        chains=(
            Chain(
                id="C1",
                trigger="T1",
                behavior="B1",
                event="E1",
                harm="H1",
                p_behavior_given_trigger=0.5,
                p_event_given_behavior=0.25,
                p_harm_given_event=0.5,
                severity_dist={"S0": 0.5, "S1": 0.25, "S2": 0.125, "S3": 0.125},
            ),
        ),
    )
    parts.update(overrides)
    return RiskModel(**parts)


def test_clean_model_has_no_findings():
    assert validate_model(tiny_model()) == ()


def test_lookups_and_unknown_ids():
    model = tiny_model()
    assert model.trigger("T1").occurrence == 0.1
    assert model.chain("C1").harm == "H1"
    with pytest.raises(UnknownIdError) as exc_info:
        model.harm("H9")
    assert "H9" in str(exc_info.value)


def test_chains_for_harm_model_order():
    extra = Chain(
        id="C0",
        trigger="T1",
        behavior="B1",
        event="E1",
        harm="H1",
        p_behavior_given_trigger=0.1,
        p_event_given_behavior=0.1,
        p_harm_given_event=0.1,
        severity_dist={"S0": 1.0},
    )
    model = tiny_model()
    model = tiny_model(chains=model.chains + (extra,))
    assert [c.id for c in chains_for_harm(model, "H1")] == ["C1", "C0"]
    with pytest.raises(UnknownIdError):
        chains_for_harm(model, "nope")


def test_harm_without_chains_is_empty_not_an_error():
    model = tiny_model(harms=(Harm(id="H1", description="h"), Harm(id="H2", description="h")))
    assert chains_for_harm(model, "H2") == ()


def test_duplicate_ids_share_one_namespace():
    model = tiny_model(harms=(Harm(id="H1", description="h"), Harm(id="C1", description="h")))
    findings = validate_model(model)
    assert [f.kind for f in findings] == ["duplicate-id"]
    assert findings[0].subject == "C1"
    assert "harm" in findings[0].detail and "chain" in findings[0].detail


def test_missing_references_are_reported_per_field():
    bad_chain = Chain(
        id="C2",
        trigger="T9",
        behavior="B1",
        event="E9",
        harm="H1",
        p_behavior_given_trigger=0.5,
        p_event_given_behavior=0.5,
        p_harm_given_event=0.5,
        severity_dist={"S0": 1.0},
    )
    model = tiny_model()
    model = tiny_model(chains=model.chains + (bad_chain,))
    findings = validate_model(model)
    assert {(f.kind, f.subject) for f in findings} == {
        ("missing-reference", "C2"),
    }
    details = sorted(f.detail for f in findings)
    assert any("T9" in d for d in details)
    assert any("E9" in d for d in details)


def test_event_references_checked():
    model = tiny_model(
        events=(Event(id="E1", description="e", hazard="nope", scenario="SC1"),)
    )
    findings = validate_model(model)
    assert len(findings) == 1
    assert findings[0].kind == "missing-reference"
    assert findings[0].subject == "E1"


def test_chain_referencing_wrong_layer_is_a_missing_reference():
    # An id that exists, but names a harm where an event is required: the
    # layers cannot be inverted by reusing ids across kinds.
    model = tiny_model()
    inverted = Chain(
        id="C9",
        trigger="T1",
        behavior="B1",
        event="H1",
        harm="E1",
        p_behavior_given_trigger=0.5,
        p_event_given_behavior=0.5,
        p_harm_given_event=0.5,
        severity_dist={"S0": 1.0},
    )
    model = tiny_model(chains=model.chains + (inverted,))
    findings = validate_model(model)
    kinds_subjects = {(f.kind, f.subject) for f in findings}
    assert kinds_subjects == {("missing-reference", "C9")}
    assert len(findings) == 2  # one for the event slot, one for the harm slot


@pytest.mark.parametrize("value", [1.2, -0.1, float("nan")])
def test_out_of_range_probability(value):
    model = tiny_model(triggers=(Trigger(id="T1", description="t", occurrence=value),))
    findings = validate_model(model)
    assert [f.kind for f in findings] == ["probability-out-of-range"]
    assert findings[0].subject == "T1"


def test_out_of_range_severity_mass_and_normalization():
    model = tiny_model(
        chains=(
            Chain(
                id="C1",
                trigger="T1",
                behavior="B1",
                event="E1",
                harm="H1",
                p_behavior_given_trigger=0.5,
                p_event_given_behavior=0.5,
                p_harm_given_event=0.5,
                severity_dist={"S0": 1.5, "S1": -0.5},
            ),
        )
    )
    findings = validate_model(model)
    # 1.5 and -0.5 are each out of range, but they sum to exactly 1.0, so
    # normalization itself passes: two findings, both range violations.
    assert [f.kind for f in findings] == ["probability-out-of-range"] * 2
    assert all(f.subject == "C1" for f in findings)


def test_unnormalized_severity_distribution():
    model = tiny_model(
        chains=(
            Chain(
                id="C1",
                trigger="T1",
                behavior="B1",
                event="E1",
                harm="H1",
                p_behavior_given_trigger=0.5,
                p_event_given_behavior=0.5,
                p_harm_given_event=0.5,
                severity_dist={"S0": 0.5, "S1": 0.4},
            ),
        )
    )
    findings = validate_model(model)
    assert [f.kind for f in findings] == ["severity-distribution-not-normalized"]
    assert "0.9" in findings[0].detail


def test_severity_level_not_on_scale():
    model = tiny_model(
        chains=(
            Chain(
                id="C1",
                trigger="T1",
                behavior="B1",
                event="E1",
                harm="H1",
                p_behavior_given_trigger=0.5,
                p_event_given_behavior=0.5,
                p_harm_given_event=0.5,
                severity_dist={"S9": 1.0},
            ),
        )
    )
    findings = validate_model(model)
    assert ("missing-reference", "C1") in {(f.kind, f.subject) for f in findings}


def test_findings_sorted_and_deterministic():
    model = tiny_model(
        triggers=(Trigger(id="T1", description="t", occurrence=2.0),),
        harms=(Harm(id="H1", description="h"), Harm(id="T1", description="dup")),
    )
    findings = validate_model(model)
    assert list(findings) == sorted(findings)
    assert validate_model(model) == findings


def test_normalization_tolerance_is_tight():
    # 1e-9 off is accepted, 1e-7 off is not.
    def dist(eps):
        return {"S0": 0.5, "S1": 0.5 + eps}

    def model_with(eps):
        return tiny_model(
            chains=(
                Chain(
                    id="C1",
                    trigger="T1",
                    behavior="B1",
                    event="E1",
                    harm="H1",
                    p_behavior_given_trigger=0.5,
                    p_event_given_behavior=0.5,
                    p_harm_given_event=0.5,
                    severity_dist=dist(eps),
                ),
            )
        )

    assert validate_model(model_with(5e-10)) == ()
    assert [f.kind for f in validate_model(model_with(1e-7))] == [
        "severity-distribution-not-normalized"
    ]


def test_structural_errors_fail_at_construction():
    with pytest.raises(ValueError):
        Trigger(id="", description="t", occurrence=0.5)
    with pytest.raises(ValueError):
        Trigger(id="T1", description="t", occurrence="high")  # type: ignore[arg-type]
    with pytest.raises(ValueError):
        Behavior(id="B1", description="b", mode="sideways")  # type: ignore[arg-type]
    with pytest.raises(ValueError):
        SeverityScale(levels=())
    with pytest.raises(ValueError):
        SeverityScale(levels=("S0", "S0"))
    with pytest.raises(ValueError):
        Chain(
            id="C1",
            trigger="T1",
            behavior="B1",
            event="E1",
            harm="",
            p_behavior_given_trigger=0.5,
            p_event_given_behavior=0.5,
            p_harm_given_event=0.5,
        )


def test_severity_scale_helpers():
    scale = SeverityScale.default()
    assert scale.levels == ("S0", "S1", "S2", "S3")
    assert "S2" in scale
    assert scale.index("S2") == 2
    with pytest.raises(UnknownIdError):
        scale.index("S9")


def test_model_is_immutable():
    model = tiny_model()
    with pytest.raises(dataclasses.FrozenInstanceError):
        model.reference_period = "trip"  # type: ignore[misc]
    with pytest.raises(dataclasses.FrozenInstanceError):
        model.triggers[0].occurrence = 0.9  # type: ignore[misc]


def test_boolean_is_not_a_probability():
    with pytest.raises(ValueError):
        Trigger(id="T1", description="t", occurrence=True)  # type: ignore[arg-type]


def test_nan_severity_total_is_flagged():
    model = tiny_model(
        chains=(
            Chain(
                id="C1",
                trigger="T1",
                behavior="B1",
                event="E1",
                harm="H1",
                p_behavior_given_trigger=0.5,
                p_event_given_behavior=0.5,
                p_harm_given_event=0.5,
                severity_dist={"S0": math.nan, "S1": 1.0},
            ),
        )
    )
    kinds = {f.kind for f in validate_model(model)}
    assert "severity-distribution-not-normalized" in kinds
    assert "probability-out-of-range" in kinds

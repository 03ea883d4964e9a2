"""End-to-end acceptance checks, one test per guarantee the package makes.

Each test here states one user-visible property of the toolkit and verifies
it against an independent path: exhaustive enumeration for the bounds, closed
forms for the Poisson targets, pinned expectations for the bundled corpora.
Run with ``pytest -v tests/test_acceptance.py`` to get one pass/fail line per
guarantee.
"""

from __future__ import annotations

import json
import math
import random
import time

import pytest
from conftest import build_random_model

from sotif_risk.bounds import harm_bound, risk_bound
from sotif_risk.cli import main
from sotif_risk.data import (
    amended_term_registry,
    ice_plates_document,
    iso21448_term_registry,
)
from sotif_risk.oracle import (
    enumerate_harm_probability,
    simulate_poisson_zero_event_fraction,
)
from sotif_risk.planning import (
    legacy_tolerable_rate,
    plan_targets,
    poisson_validation_target,
)
from sotif_risk.term_registry import Provenance, TermDef, apply_amendments, lint

#: Slack for comparing a compensated sum against an fsum-based enumeration.
SUMMATION_SLACK = 1e-12

#: Relative tolerance for closed-form cross-checks.
CLOSED_FORM_RTOL = 1e-12


def test_union_bound_dominates_exhaustive_enumeration_on_random_models():
    """The bound is sound: never below the true probability, however chains
    share triggers or probabilities sit at the endpoints."""
    rng = random.Random(2026)
    started = time.perf_counter()
    checked = 0
    for index in range(1000):
        # mostly small models; every hundredth gets more chains than the
        # trigger pool so heavy sharing is guaranteed
        model = build_random_model(rng, max_chains=6 if index % 100 == 99 else 4)
        exact = enumerate_harm_probability(model, "H1")
        bound = harm_bound(model, "H1").bound
        assert exact <= bound + SUMMATION_SLACK, (
            f"model {index}: enumeration {exact!r} exceeds bound {bound!r}"
        )
        checked += 1
    elapsed = time.perf_counter() - started
    assert checked == 1000
    assert elapsed < 30.0, f"soundness sweep took {elapsed:.1f}s"


def test_severity_risk_bounds_marginalize_to_the_harm_bound():
    """Severity-level bounds are a partition of the harm bound: summed over
    the scale they reproduce it, because each chain's distribution sums to
    one."""
    rng = random.Random(414)
    for _ in range(200):
        model = build_random_model(rng)
        total_bound = harm_bound(model, "H1").bound
        by_level = math.fsum(
            risk_bound(model, "H1", level).bound for level in model.severity_scale.levels
        )
        assert by_level == pytest.approx(total_bound, rel=CLOSED_FORM_RTOL, abs=1e-300)


def test_single_chain_bound_is_bitwise_equal_to_its_product():
    """With one chain there is nothing to accumulate: the bound is exactly
    the occurrence times the three conditionals, to the last bit."""
    from test_bounds import model_from_chains

    rng = random.Random(77)
    for _ in range(1000):
        occurrence = rng.random()
        pb, pe, ph = rng.random(), rng.random(), rng.random()
        model = model_from_chains([("T1", pb, pe, ph)], {"T1": occurrence})
        expected = ((occurrence * pb) * pe) * ph
        assert harm_bound(model, "H1").bound == expected


def test_poisson_exposure_target_matches_hand_value_and_simulation():
    """The derived exposure satisfies its defining equation analytically and
    empirically: simulated Poisson processes at the tolerable rate stay
    event-free for the target duration with probability 1 - confidence."""
    started = time.perf_counter()
    target = poisson_validation_target(tolerable_rate=1e-3, confidence=0.9)
    assert target.required_exposure == pytest.approx(2302.585092994046, rel=CLOSED_FORM_RTOL)
    assert target.required_exposure == pytest.approx(1000 * math.log(10), rel=CLOSED_FORM_RTOL)

    fraction = simulate_poisson_zero_event_fraction(
        rate=1e-3, duration=target.required_exposure, runs=100_000, seed=2026
    )
    assert abs(fraction - 0.100) < 0.010
    assert time.perf_counter() - started < 10.0


def test_legacy_rate_back_calculation_round_trips():
    """Dividing the acceptable harm through the conditionals and multiplying
    back recovers it, across magnitudes."""
    rng = random.Random(5150)
    for _ in range(10_000):
        harm = 10.0 ** rng.uniform(-12, -2)
        exposure = rng.uniform(1e-3, 1.0)
        control = rng.uniform(1e-3, 1.0)
        severity = rng.uniform(1e-3, 1.0)
        rate = legacy_tolerable_rate(harm, exposure, control, severity).rate
        assert rate * exposure * control * severity == pytest.approx(
            harm, rel=CLOSED_FORM_RTOL
        )


def test_bundled_registry_lint_finds_expected_gaps_and_cycles():
    """The shipped vocabulary has exactly three load-bearing undefined terms
    and no cycles; a circular candidate fix is caught; the shipped amendment
    set lints clean and grounds out in harm."""
    base = iso21448_term_registry().registry
    report = lint(base)
    assert report.undefined_terms == ("hazardous behavior", "occurrence", "situation")
    assert report.cycles == ()
    assert not report.dangling_references

    # defining hazardous behavior via triggering condition loops back,
    # because triggering condition already relies on hazardous behavior
    circular_fix = TermDef(
        term="hazardous behavior",
        provenance=Provenance.DEFINED_IN_21448,
        depends_on=frozenset({"hazard", "triggering condition", "functional insufficiency"}),
        definition_text="Behavior in response to a triggering condition that creates a hazard.",
    )
    candidate = apply_amendments(base, [circular_fix])
    candidate_report = lint(candidate)
    assert candidate_report.cycles
    assert any("hazardous behavior" in cycle for cycle in candidate_report.cycles)

    amended_report = lint(amended_term_registry().registry)
    assert amended_report.is_clean
    assert amended_report.layers is not None
    assert "harm" in amended_report.layers[0]


def test_bound_contributions_and_validation_plan_on_bundled_model():
    """On the shipped example: per-chain contributions are the annotated
    products, the bound exceeds every single contribution (both chains
    matter), and the acceptance criterion decomposes into one tolerable-rate
    target per chain plus the full obligation ledger."""
    document = ice_plates_document()
    model = document.model

    result = harm_bound(model, "H1")
    assert set(result.contributions) == {"C1", "C2"}
    assert result.contributions["C1"] == pytest.approx(3e-5, rel=CLOSED_FORM_RTOL)
    assert result.contributions["C2"] == pytest.approx(2.5e-5, rel=CLOSED_FORM_RTOL)
    for contribution in result.contributions.values():
        assert result.bound > contribution

    plan = plan_targets(model, document.criteria, confidence=0.95)
    assert [t.chain for t in plan.targets] == ["C1", "C2"]
    rates = {t.chain: t.tolerable_rate for t in plan.targets}
    assert rates["C1"] == pytest.approx(2e-5, rel=CLOSED_FORM_RTOL)
    assert rates["C2"] == pytest.approx(1e-5, rel=CLOSED_FORM_RTOL)

    # the ledger names exactly the quantities the allocation consumed
    assert [(o.quantity, o.subject) for o in plan.obligations] == [
        ("occurrence", "T1"),
        ("p_behavior_given_trigger", "C1"),
        ("p_event_given_behavior", "C1"),
        ("p_harm_given_event", "C1"),
        ("severity_dist[S2]", "C1"),
        ("occurrence", "T2"),
        ("p_behavior_given_trigger", "C2"),
        ("p_event_given_behavior", "C2"),
        ("p_harm_given_event", "C2"),
        ("severity_dist[S2]", "C2"),
    ]

    # the per-chain rates reassemble the criterion threshold
    downstream = {"C1": 0.5 * 0.02 * 0.3 * 0.1, "C2": 0.4 * 0.05 * 0.25 * 0.08}
    reassembled = math.fsum(rates[c] * downstream[c] for c in rates)
    assert reassembled == pytest.approx(1e-8, rel=CLOSED_FORM_RTOL)


def test_structured_reports_are_byte_identical_across_runs(capsys):
    """The full report — screening, bounds, oracle simulation, targets,
    registry lint — is deterministic down to the byte for a fixed seed."""
    argv = [
        "--format", "structured",
        "report", "bundled:ice_plates",
        "--registry", "bundled:iso21448_terms_amended",
        "--trials", "50000",
        "--seed", "11",
    ]
    first_code = main(list(argv))
    first_out = capsys.readouterr().out
    second_code = main(list(argv))
    second_out = capsys.readouterr().out

    assert first_code == second_code
    assert first_out == second_out
    payload = json.loads(first_out)
    assert payload["harms"]  # and it is a real report, not an error stub
    assert payload["obligations"]

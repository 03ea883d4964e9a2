from __future__ import annotations

import math
import random

import pytest

from sotif_risk.data import ice_plates_document
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
    validate_model,
)

LEVELS = ("S0", "S1", "S2", "S3")


def random_probability(rng: random.Random) -> float:
    # Hit the endpoints now and then; bounds must stay sound there too.
    roll = rng.random()
    if roll < 0.05:
        return 0.0
    if roll < 0.10:
        return 1.0
    return rng.random()


def random_severity_dist(rng: random.Random) -> dict[str, float]:
    weights = [rng.random() + 1e-3 for _ in LEVELS]
    total = math.fsum(weights)
    masses = [w / total for w in weights[:-1]]
    last = 1.0 - math.fsum(masses)
    assert last > 0.0
    return dict(zip(LEVELS, masses + [last]))


def build_random_model(rng: random.Random, max_chains: int = 4) -> RiskModel:
    """A random, valid model whose chains all lead to harm H1.

    Chains pick their trigger at random, so shared and unshared triggers
    both occur.  Small enough that exhaustive enumeration stays cheap.
    """
    n_triggers = rng.randint(1, 3)
    n_chains = rng.randint(1, max_chains)
    model = RiskModel(
        reference_period="hour of operation",
        severity_scale=SeverityScale(levels=LEVELS),
        triggers=tuple(
            Trigger(id=f"T{i}", description="generated", occurrence=random_probability(rng))
            for i in range(1, n_triggers + 1)
        ),
        behaviors=(Behavior(id="B1", description="generated", mode=BehaviorMode.OMISSION),),
        hazards=(Hazard(id="Z1", description="generated"),),
        scenarios=(Scenario(id="SC1", description="generated"),),
        events=(Event(id="E1", description="generated", hazard="Z1", scenario="SC1"),),
        harms=(Harm(id="H1", description="generated"), Harm(id="H2", description="generated")),
        chains=tuple(
            Chain(
                id=f"C{i}",
                trigger=f"T{rng.randint(1, n_triggers)}",
                behavior="B1",
                event="E1",
                harm="H1",
                p_behavior_given_trigger=random_probability(rng),
                p_event_given_behavior=random_probability(rng),
                p_harm_given_event=random_probability(rng),
                severity_dist=random_severity_dist(rng),
            )
            for i in range(1, n_chains + 1)
        ),
    )
    assert not validate_model(model)
    return model


@pytest.fixture(scope="session")
def ice_plates_doc():
    return ice_plates_document()


@pytest.fixture
def ice_plates_model(ice_plates_doc):
    return ice_plates_doc.model

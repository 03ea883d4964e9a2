"""Command line front end.

Every command reads a YAML document (a path, or ``bundled:<name>`` for one
of the shipped corpora), computes, and prints either a human summary or a
canonical JSON payload (``--format structured``, or the
``SOTIF_RISK_FORMAT`` environment variable).  Structured output for the same
inputs and seed is byte-identical across runs.

Exit codes:

* 0 — processed, nothing wrong found;
* 1 — processed, but there are findings or violations (lint findings,
  rejected screening claims, model validation findings, a bound over its
  acceptance threshold, a vacuous bound above one, an impossible
  back-calculation);
* 2 — the input could not be processed at all (unreadable file, schema
  violation, unknown identifier, unsupported capacity, bad flag value).
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Any, Sequence

from . import data as bundled_data
from .bounds import MAX_EXACT_CHAINS, exact_union_probability, harm_bound, risk_bound
from .errors import (
    DivisionImpossibleError,
    DocumentError,
    InvalidModelError,
    OracleCapacityError,
    PeriodMismatchError,
    SotifRiskError,
    UnknownIdError,
)
from .model_io import (
    ModelDocument,
    RegistryDocument,
    canonical_json,
    load_model_document,
    load_registry_document,
    parse_model_document,
    parse_registry_document,
)
from .oracle import (
    MAX_ENUMERATION_SOURCES,
    compile_experiment,
    enumerate_harm_probability,
    simulate_harm_probability,
)
from .planning import plan_targets, screen
from .risk_model import chains_for_harm
from .term_registry import lint

FORMAT_ENV_VAR = "SOTIF_RISK_FORMAT"
_FORMATS = ("human", "structured")

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_INPUT_ERROR = 2


# ---------------------------------------------------------------------------
# input resolution


def _bundled_text(spec: str) -> str | None:
    """YAML text for a ``bundled:<name>`` reference, None for a plain path."""
    if not spec.startswith("bundled:"):
        return None
    name = spec[len("bundled:"):]
    filename = bundled_data.BUNDLED.get(name)
    if filename is None:
        known = ", ".join(sorted(bundled_data.BUNDLED))
        raise DocumentError(f"no bundled document named {name!r} (available: {known})")
    return bundled_data.corpus_text(filename)


def _load_model(spec: str) -> ModelDocument:
    text = _bundled_text(spec)
    return parse_model_document(text) if text is not None else load_model_document(spec)


def _load_registry(spec: str) -> RegistryDocument:
    text = _bundled_text(spec)
    return parse_registry_document(text) if text is not None else load_registry_document(spec)


# ---------------------------------------------------------------------------
# payload builders (shared by both output formats)


def _lint_payload(spec: str) -> tuple[dict[str, Any], int]:
    document = _load_registry(spec)
    report = lint(document.registry)
    payload = {
        "command": "lint-terms",
        "input": spec,
        "clean": report.is_clean,
        "undefined_terms": list(report.undefined_terms),
        "dangling_references": [
            {"term": d.term, "missing": d.missing} for d in report.dangling_references
        ],
        "cycles": [list(cycle) for cycle in report.cycles],
        "cycles_truncated": report.cycles_truncated,
        "layers": None if report.layers is None else [list(layer) for layer in report.layers],
    }
    return payload, EXIT_OK if report.is_clean else EXIT_FINDINGS


def _screening_buckets(document: ModelDocument) -> dict[str, Any]:
    result = screen(document.screening)

    def zero_claims(record) -> list[str]:
        claims = []
        if record.severity.value == "zero":
            claims.append("severity")
        if record.controllability.value == "zero":
            claims.append("controllability")
        return claims

    return {
        "excluded_with_evidence": [
            {"id": r.id, "condition": r.condition, "claims_zero": zero_claims(r),
             "evidence": r.evidence}
            for r in result.excluded_with_evidence
        ],
        "requires_acceptance_criterion": [
            {"id": r.id, "condition": r.condition}
            for r in result.requires_acceptance_criterion
        ],
        "rejected_missing_evidence": [
            {"id": r.id, "condition": r.condition, "claims_zero": zero_claims(r)}
            for r in result.rejected_missing_evidence
        ],
    }


def _screen_payload(spec: str) -> tuple[dict[str, Any], int]:
    document = _load_model(spec)
    buckets = _screening_buckets(document)
    payload = {"command": "screen", "input": spec, **buckets}
    code = EXIT_FINDINGS if buckets["rejected_missing_evidence"] else EXIT_OK
    return payload, code


def _bound_payload(spec: str, harm: str, level: str | None) -> tuple[dict[str, Any], int]:
    document = _load_model(spec)
    model = document.model
    if level is None:
        result = harm_bound(model, harm)
    else:
        result = risk_bound(model, harm, level)
    payload = {
        "command": "bound",
        "input": spec,
        "harm": harm,
        "level": level,
        "reference_period": model.reference_period,
        "bound": result.bound,
        "exceeds_one": result.exceeds_one,
        "contributions": dict(result.contributions),
    }
    return payload, EXIT_FINDINGS if result.exceeds_one else EXIT_OK


def _criterion_entry(model, criterion) -> dict[str, Any]:
    if criterion.level is None:
        bound = harm_bound(model, criterion.harm).bound
    else:
        bound = risk_bound(model, criterion.harm, criterion.level).bound
    return {
        "id": criterion.id,
        "harm": criterion.harm,
        "level": criterion.level,
        "threshold": criterion.threshold,
        "rationale": criterion.rationale.value,
        "bound": bound,
        "bound_exceeds_threshold": bound > criterion.threshold,
    }


def _target_entries(result) -> list[dict[str, Any]]:
    return [
        {
            "criterion": t.criterion,
            "chain": t.chain,
            "tolerable_rate": t.tolerable_rate,
            "confidence": t.confidence,
            "required_exposure": t.required_exposure,
            "caveat": t.caveat,
        }
        for t in result.targets
    ]


def _obligation_entries(result) -> list[dict[str, Any]]:
    return [
        {"quantity": o.quantity, "subject": o.subject, "value": o.value, "note": o.note}
        for o in result.obligations
    ]


def _target_payload(
    spec: str, criterion_id: str | None, confidence: float
) -> tuple[dict[str, Any], int]:
    document = _load_model(spec)
    criteria = document.criteria
    if criterion_id is not None:
        criteria = tuple(c for c in criteria if c.id == criterion_id)
        if not criteria:
            raise DocumentError(f"document defines no acceptance criterion {criterion_id!r}")
    result = plan_targets(document.model, criteria, confidence)
    entries = [_criterion_entry(document.model, c) for c in criteria]
    payload = {
        "command": "target",
        "input": spec,
        "confidence": confidence,
        "criteria": entries,
        "targets": _target_entries(result),
        "obligations": _obligation_entries(result),
    }
    violated = any(e["bound_exceeds_threshold"] for e in entries)
    return payload, EXIT_FINDINGS if violated else EXIT_OK


def _oracle_payload(
    spec: str, harm: str, trials: int | None, seed: int
) -> tuple[dict[str, Any], int]:
    document = _load_model(spec)
    model = document.model
    bound = harm_bound(model, harm).bound
    if trials is None:
        estimate = enumerate_harm_probability(model, harm)
        payload_part: dict[str, Any] = {
            "method": "enumeration",
            "estimate": estimate,
            "sources": compile_experiment(model, harm).n_sources,
        }
        # Exact value must sit below the bound; allow only accumulation ulps.
        consistent = estimate <= bound + 1e-12
    else:
        result = simulate_harm_probability(model, harm, trials=trials, seed=seed)
        estimate = result.estimate
        payload_part = {
            "method": "monte-carlo",
            "estimate": result.estimate,
            "ci_halfwidth": result.ci_halfwidth,
            "trials": result.trials,
            "seed": result.seed,
        }
        # A noisy estimate only contradicts the bound when even the lower
        # confidence limit sits above it.
        consistent = estimate - result.ci_halfwidth <= bound + 1e-12
    payload = {
        "command": "oracle",
        "input": spec,
        "harm": harm,
        **payload_part,
        "union_bound": bound,
        "consistent_with_bound": consistent,
    }
    return payload, EXIT_OK if consistent else EXIT_FINDINGS


def _report_payload(
    spec: str,
    registry_spec: str | None,
    confidence: float,
    seed: int,
    trials: int | None,
) -> tuple[dict[str, Any], int]:
    document = _load_model(spec)
    model = document.model
    violations: list[str] = []

    buckets = _screening_buckets(document)
    for record in buckets["rejected_missing_evidence"]:
        claims = " and ".join(record["claims_zero"])
        violations.append(
            f"screening record {record['id']} claims zero {claims} without evidence"
        )

    harms = []
    for harm in model.harms:
        hb = harm_bound(model, harm.id)
        if hb.exceeds_one:
            violations.append(f"union bound for harm {harm.id} exceeds one ({hb.bound!r})")
        n_chains = len(chains_for_harm(model, harm.id))
        exact = (
            exact_union_probability(model, harm.id) if n_chains <= MAX_EXACT_CHAINS else None
        )
        entry: dict[str, Any] = {
            "harm": harm.id,
            "description": harm.description,
            "bound": hb.bound,
            "exceeds_one": hb.exceeds_one,
            "contributions": dict(hb.contributions),
            "exact_union": exact,
            "risk_bounds": {
                level: risk_bound(model, harm.id, level).bound
                for level in model.severity_scale.levels
            },
        }
        if trials is not None:
            sim = simulate_harm_probability(model, harm.id, trials=trials, seed=seed)
            entry["simulation"] = {
                "estimate": sim.estimate,
                "ci_halfwidth": sim.ci_halfwidth,
                "trials": sim.trials,
                "seed": sim.seed,
            }
        harms.append(entry)

    plan = plan_targets(model, document.criteria, confidence)
    criteria_entries = []
    for criterion in document.criteria:
        entry = _criterion_entry(model, criterion)
        entry["targets"] = [
            t for t in _target_entries(plan) if t["criterion"] == criterion.id
        ]
        if entry["bound_exceeds_threshold"]:
            violations.append(
                f"criterion {criterion.id}: bound {entry['bound']!r} exceeds "
                f"threshold {criterion.threshold!r}"
            )
        criteria_entries.append(entry)

    registry_part = None
    if registry_spec is not None:
        registry_part, registry_code = _lint_payload(registry_spec)
        registry_part.pop("command")
        if registry_code != EXIT_OK:
            violations.append(f"term registry {registry_spec} has lint findings")

    payload = {
        "command": "report",
        "input": spec,
        "schema_version": document.schema_version,
        "reference_period": model.reference_period,
        "confidence": confidence,
        "seed": seed,
        "trials": trials,
        "screening": buckets,
        "harms": harms,
        "criteria": criteria_entries,
        "obligations": _obligation_entries(plan),
        "registry": registry_part,
        "violations": violations,
    }
    return payload, EXIT_FINDINGS if violations else EXIT_OK


# ---------------------------------------------------------------------------
# human rendering


def _fmt(value: float) -> str:
    return format(value, ".6g")


def _render_lint(p: dict[str, Any], out: list[str]) -> None:
    out.append(
        f"{p['input']}: "
        f"{len(p['undefined_terms'])} undefined term(s) relied upon, "
        f"{len(p['dangling_references'])} dangling reference(s), "
        f"{len(p['cycles'])}{'+' if p['cycles_truncated'] else ''} cycle(s)"
    )
    if p["undefined_terms"]:
        out.append("undefined terms other definitions rely on:")
        out.extend(f"  - {term}" for term in p["undefined_terms"])
    if p["dangling_references"]:
        out.append("dangling references:")
        out.extend(
            f"  - {d['term']} -> {d['missing']} (not in registry)"
            for d in p["dangling_references"]
        )
    if p["cycles"]:
        out.append("definition cycles:")
        out.extend("  - " + " -> ".join(cycle + [cycle[0]]) for cycle in p["cycles"])
        if p["cycles_truncated"]:
            out.append("  (list truncated)")
    if p["layers"] is not None:
        out.append("definition layers (each relies only on earlier ones):")
        out.extend(
            f"  {depth}: " + ", ".join(layer) for depth, layer in enumerate(p["layers"])
        )


def _render_screen_buckets(p: dict[str, Any], out: list[str]) -> None:
    out.append(f"excluded with evidence ({len(p['excluded_with_evidence'])}):")
    out.extend(
        f"  - {r['id']}: {r['condition']} [zero {' and '.join(r['claims_zero'])}; "
        f"evidence: {r['evidence']}]"
        for r in p["excluded_with_evidence"]
    )
    out.append(
        f"requires acceptance criterion ({len(p['requires_acceptance_criterion'])}):"
    )
    out.extend(
        f"  - {r['id']}: {r['condition']}" for r in p["requires_acceptance_criterion"]
    )
    out.append(f"rejected, zero claim without evidence ({len(p['rejected_missing_evidence'])}):")
    out.extend(
        f"  - {r['id']}: {r['condition']} [claims zero {' and '.join(r['claims_zero'])}]"
        for r in p["rejected_missing_evidence"]
    )


def _render_screen(p: dict[str, Any], out: list[str]) -> None:
    out.append(f"{p['input']}: screening")
    _render_screen_buckets(p, out)


def _render_bound(p: dict[str, Any], out: list[str]) -> None:
    what = f"harm {p['harm']}" + (f" at severity {p['level']}" if p["level"] else "")
    out.append(
        f"{what}: probability per {p['reference_period']} <= {_fmt(p['bound'])}"
        + ("  [EXCEEDS ONE - vacuous]" if p["exceeds_one"] else "")
    )
    out.append("chain contributions:")
    out.extend(f"  {cid}: {_fmt(v)}" for cid, v in p["contributions"].items())


def _render_targets(targets: list[dict[str, Any]], out: list[str]) -> None:
    for t in targets:
        out.append(
            f"  chain {t['chain']}: tolerable occurrence rate {_fmt(t['tolerable_rate'])} "
            f"per period; observe {_fmt(t['required_exposure'])} periods event-free "
            f"for confidence {_fmt(t['confidence'])}"
        )
        out.append(f"    caveat: {t['caveat']}")


def _render_obligations(obligations: list[dict[str, Any]], out: list[str]) -> None:
    out.append(f"obligation ledger ({len(obligations)} consumed quantities):")
    out.extend(
        f"  - {o['quantity']} of {o['subject']} = {_fmt(o['value'])} ({o['note']})"
        for o in obligations
    )


def _render_target(p: dict[str, Any], out: list[str]) -> None:
    for entry in p["criteria"]:
        level = f" at {entry['level']}" if entry["level"] else ""
        status = "EXCEEDS" if entry["bound_exceeds_threshold"] else "within"
        out.append(
            f"criterion {entry['id']} ({entry['rationale']}): harm {entry['harm']}{level}, "
            f"threshold {_fmt(entry['threshold'])}; current bound {_fmt(entry['bound'])} "
            f"({status} threshold)"
        )
        _render_targets(
            [t for t in p["targets"] if t["criterion"] == entry["id"]], out
        )
    _render_obligations(p["obligations"], out)


def _render_oracle(p: dict[str, Any], out: list[str]) -> None:
    if p["method"] == "enumeration":
        out.append(
            f"harm {p['harm']}: exact probability {_fmt(p['estimate'])} "
            f"(enumeration over {p['sources']} sources)"
        )
        verdict = "exact value within bound" if p["consistent_with_bound"] else "EXACT VALUE ABOVE BOUND"
    else:
        out.append(
            f"harm {p['harm']}: estimated probability {_fmt(p['estimate'])} "
            f"+/- {_fmt(p['ci_halfwidth'])} (95% CI, {p['trials']} trials, seed {p['seed']})"
        )
        verdict = (
            "estimate consistent with bound"
            if p["consistent_with_bound"]
            else "ESTIMATE CONTRADICTS BOUND (even at lower confidence limit)"
        )
    out.append(f"union bound {_fmt(p['union_bound'])}: {verdict}")


def _render_report(p: dict[str, Any], out: list[str]) -> None:
    out.append(
        f"report for {p['input']} (per {p['reference_period']}, "
        f"confidence {_fmt(p['confidence'])})"
    )
    out.append("")
    out.append("screening:")
    _render_screen_buckets(p["screening"], out)
    out.append("")
    out.append("harm bounds:")
    for entry in p["harms"]:
        line = f"  {entry['harm']}: <= {_fmt(entry['bound'])}"
        if entry["exceeds_one"]:
            line += "  [EXCEEDS ONE - vacuous]"
        if entry["exact_union"] is not None:
            line += f"  (exact under independence: {_fmt(entry['exact_union'])})"
        out.append(line)
        for cid, value in entry["contributions"].items():
            out.append(f"      {cid}: {_fmt(value)}")
        levels = ", ".join(f"{lvl}: {_fmt(v)}" for lvl, v in entry["risk_bounds"].items())
        out.append(f"      by severity: {levels}")
        if "simulation" in entry:
            sim = entry["simulation"]
            out.append(
                f"      simulated: {_fmt(sim['estimate'])} +/- {_fmt(sim['ci_halfwidth'])} "
                f"({sim['trials']} trials, seed {sim['seed']})"
            )
    out.append("")
    out.append("acceptance criteria:")
    for entry in p["criteria"]:
        level = f" at {entry['level']}" if entry["level"] else ""
        status = "EXCEEDS" if entry["bound_exceeds_threshold"] else "within"
        out.append(
            f"  {entry['id']} ({entry['rationale']}): harm {entry['harm']}{level} "
            f"<= {_fmt(entry['threshold'])}; bound {_fmt(entry['bound'])} ({status})"
        )
        _render_targets(entry["targets"], out)
    out.append("")
    _render_obligations(p["obligations"], out)
    if p["registry"] is not None:
        out.append("")
        out.append("term registry:")
        _render_lint({**p["registry"], "command": "lint-terms"}, out)
    out.append("")
    if p["violations"]:
        out.append(f"violations ({len(p['violations'])}):")
        out.extend(f"  - {v}" for v in p["violations"])
    else:
        out.append("no violations.")


_RENDERERS = {
    "lint-terms": _render_lint,
    "screen": _render_screen,
    "bound": _render_bound,
    "target": _render_target,
    "oracle": _render_oracle,
    "report": _render_report,
}


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sotif-risk",
        description=(
            "Causal risk-chain analysis: probability-of-harm bounds, screening, "
            "validation targets, and terminology linting. Inputs are YAML documents; "
            "pass a file path or bundled:<name> for a shipped corpus "
            f"({', '.join(sorted(bundled_data.BUNDLED))})."
        ),
    )
    parser.add_argument(
        "--format",
        choices=_FORMATS,
        default=None,
        help=f"output format (default: ${FORMAT_ENV_VAR} or human)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    lint_p = sub.add_parser("lint-terms", help="lint a term registry's definition graph")
    lint_p.add_argument("input", help="registry document (path or bundled:<name>)")

    screen_p = sub.add_parser("screen", help="partition a document's screening records")
    screen_p.add_argument("input", help="model document (path or bundled:<name>)")

    bound_p = sub.add_parser("bound", help="union bound on a harm's probability")
    bound_p.add_argument("input", help="model document (path or bundled:<name>)")
    bound_p.add_argument("--harm", required=True, help="harm id to bound")
    bound_p.add_argument("--level", default=None, help="severity level (bounds that level only)")

    target_p = sub.add_parser("target", help="derive validation targets from acceptance criteria")
    target_p.add_argument("input", help="model document (path or bundled:<name>)")
    target_p.add_argument("--criterion", default=None, help="criterion id (default: all)")
    target_p.add_argument(
        "--alpha", type=float, default=0.95,
        help="confidence for the zero-event demonstration (default 0.95)",
    )

    oracle_p = sub.add_parser(
        "oracle", help="check a bound against exhaustive enumeration or simulation"
    )
    oracle_p.add_argument("input", help="model document (path or bundled:<name>)")
    oracle_p.add_argument("--harm", required=True, help="harm id to evaluate")
    oracle_p.add_argument(
        "--trials", type=int, default=None,
        help=f"Monte Carlo trials (default: exact enumeration, up to "
        f"{MAX_ENUMERATION_SOURCES} sources)",
    )
    oracle_p.add_argument("--seed", type=int, default=0, help="simulation seed (default 0)")

    report_p = sub.add_parser("report", help="full analysis report over a model document")
    report_p.add_argument("input", help="model document (path or bundled:<name>)")
    report_p.add_argument("--registry", default=None, help="also lint this term registry")
    report_p.add_argument(
        "--alpha", type=float, default=0.95,
        help="confidence for validation targets (default 0.95)",
    )
    report_p.add_argument("--seed", type=int, default=0, help="simulation seed (default 0)")
    report_p.add_argument(
        "--trials", type=int, default=None,
        help="add a Monte Carlo estimate per harm (default: none)",
    )
    return parser


def _resolve_format(flag_value: str | None) -> str:
    if flag_value is not None:
        return flag_value
    env_value = os.environ.get(FORMAT_ENV_VAR)
    if env_value is None or env_value == "":
        return "human"
    if env_value not in _FORMATS:
        raise DocumentError(
            f"invalid {FORMAT_ENV_VAR}={env_value!r}; expected one of {', '.join(_FORMATS)}"
        )
    return env_value


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        output_format = _resolve_format(args.format)
        if args.command == "lint-terms":
            payload, code = _lint_payload(args.input)
        elif args.command == "screen":
            payload, code = _screen_payload(args.input)
        elif args.command == "bound":
            payload, code = _bound_payload(args.input, args.harm, args.level)
        elif args.command == "target":
            payload, code = _target_payload(args.input, args.criterion, args.alpha)
        elif args.command == "oracle":
            payload, code = _oracle_payload(args.input, args.harm, args.trials, args.seed)
        else:
            payload, code = _report_payload(
                args.input, args.registry, args.alpha, args.seed, args.trials
            )
    except InvalidModelError as exc:
        print("error: model failed validation:", file=sys.stderr)
        for finding in exc.findings:
            print(f"  - {finding.kind}: {finding.subject}: {finding.detail}", file=sys.stderr)
        return EXIT_FINDINGS
    except (DivisionImpossibleError, PeriodMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    except (DocumentError, UnknownIdError, OracleCapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (ValueError, SotifRiskError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    if output_format == "structured":
        sys.stdout.write(canonical_json(payload))
    else:
        lines: list[str] = []
        _RENDERERS[payload["command"]](payload, lines)
        sys.stdout.write("\n".join(lines) + "\n")
    return code


def main_entry() -> None:  # console-script shim
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())

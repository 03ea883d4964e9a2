"""Terminology registry and definition-graph linter.

Safety standards define their vocabulary in terms of other vocabulary: a
*hazardous event* is defined using *hazard* and *operational situation*, a
*risk* using *harm* and *severity*, and so on.  That web of definitions is a
directed graph, and it can be defective in ways that matter for arguing
safety cases:

* a term everything leans on may itself never be defined,
* a definition may reference a term that does not exist at all,
* definitions may be circular, so none of the terms in the loop is actually
  grounded.

:func:`lint` finds all three defect classes, and — when the graph is acyclic
— computes a layering that shows how the vocabulary builds up from its
primitive terms.  :func:`apply_amendments` produces a repaired registry from
a set of replacement definitions without touching the original.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

#: Cycle reporting stops after this many elementary cycles.  Dense defective
#: graphs can hold combinatorially many cycles; past this point more examples
#: add nothing actionable.
MAX_REPORTED_CYCLES = 64


class Provenance(str, enum.Enum):
    """Where a term's definition comes from, relative to the two standards.

    The interesting middle cases: a term can be defined in the functional
    safety standard and formally adopted by the SOTIF one, or merely used by
    the SOTIF one while only the functional safety standard defines it.
    """

    DEFINED_IN_21448 = "defined-in-21448"
    DEFINED_IN_26262_ADOPTED = "defined-in-26262-adopted"
    DEFINED_IN_26262_NOT_REFERENCED = "defined-in-26262-not-referenced"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class TermDef:
    """One term with its provenance and the terms its definition relies on.

    ``definition_text`` is optional prose; a term with :attr:`Provenance.UNDEFINED`
    has, by definition, no definition text to give.
    """

    term: str
    provenance: Provenance
    depends_on: frozenset[str] = frozenset()
    definition_text: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.term, str) or not self.term.strip():
            raise ValueError(f"term must be a non-empty string, got {self.term!r}")
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        object.__setattr__(self, "depends_on", frozenset(self.depends_on))
        for dep in self.depends_on:
            if not isinstance(dep, str) or not dep.strip():
                raise ValueError(f"dependency of {self.term!r} must be a non-empty string")
        if self.provenance is Provenance.UNDEFINED and self.definition_text is not None:
            raise ValueError(
                f"term {self.term!r} is marked undefined but carries definition text"
            )


@dataclass(frozen=True)
class TermRegistry:
    """An immutable collection of term definitions.

    Terms are unique; constructing a registry with two definitions for the
    same term raises ``ValueError``.
    """

    terms: tuple[TermDef, ...]

    def __post_init__(self) -> None:
        terms = tuple(self.terms)
        object.__setattr__(self, "terms", terms)
        seen: set[str] = set()
        for term_def in terms:
            if term_def.term in seen:
                raise ValueError(f"duplicate definition for term {term_def.term!r}")
            seen.add(term_def.term)

    @cached_property
    def _by_term(self) -> dict[str, TermDef]:
        return {t.term: t for t in self.terms}

    def __contains__(self, term: str) -> bool:
        return term in self._by_term

    def __len__(self) -> int:
        return len(self.terms)

    def get(self, term: str) -> TermDef | None:
        return self._by_term.get(term)

    def __getitem__(self, term: str) -> TermDef:
        return self._by_term[term]


@dataclass(frozen=True)
class DanglingReference:
    """A definition that relies on a term the registry does not contain."""

    term: str
    missing: str


@dataclass(frozen=True)
class LintReport:
    """Everything :func:`lint` has to say about a registry.

    ``undefined_terms``
        Terms with no definition that at least one *other* term relies on.
        An undefined term nothing depends on is inert and not reported.
    ``dangling_references``
        ``(term, missing)`` pairs where a definition names a term absent
        from the registry entirely.
    ``cycles``
        Elementary dependency cycles.  Each cycle is rotated so its
        lexicographically smallest term comes first, and the list is sorted;
        at most :data:`MAX_REPORTED_CYCLES` are reported
        (``cycles_truncated`` says whether the cap was hit).
    ``layers``
        Only present when the graph is acyclic: terms grouped by definition
        depth.  The first layer holds the primitive terms whose definitions
        rely on nothing (inside the registry); each later layer relies only
        on earlier ones.  Terms are sorted within each layer.
    """

    undefined_terms: tuple[str, ...]
    dangling_references: tuple[DanglingReference, ...]
    cycles: tuple[tuple[str, ...], ...]
    cycles_truncated: bool
    layers: tuple[tuple[str, ...], ...] | None

    @property
    def is_clean(self) -> bool:
        return not (self.undefined_terms or self.dangling_references or self.cycles)


def _dependency_graph(registry: TermRegistry) -> dict[str, frozenset[str]]:
    # Edges restricted to terms present in the registry; dangling references
    # are reported separately and cannot take part in cycles or layering.
    return {
        t.term: frozenset(dep for dep in t.depends_on if dep in registry)
        for t in registry.terms
    }


def _elementary_cycles(
    graph: Mapping[str, frozenset[str]], cap: int
) -> tuple[tuple[tuple[str, ...], ...], bool]:
    """Enumerate elementary cycles, each exactly once.

    A cycle is discovered from its lexicographically smallest node only; the
    search never descends to nodes smaller than the start, so no cycle can be
    found twice and the smallest-first rotation falls out for free.
    """
    cycles: list[tuple[str, ...]] = []
    truncated = False
    stack: list[str] = []
    on_stack: set[str] = set()

    def descend(start: str, node: str) -> bool:
        nonlocal truncated
        for nxt in sorted(graph[node]):
            if nxt < start:
                continue
            if nxt == start:
                if len(cycles) >= cap:
                    truncated = True
                    return False
                cycles.append(tuple(stack))
            elif nxt not in on_stack:
                stack.append(nxt)
                on_stack.add(nxt)
                keep_going = descend(start, nxt)
                stack.pop()
                on_stack.remove(nxt)
                if not keep_going:
                    return False
        return True

    for start in sorted(graph):
        stack.append(start)
        on_stack.add(start)
        keep_going = descend(start, start)
        stack.pop()
        on_stack.remove(start)
        if not keep_going:
            break
    return tuple(sorted(cycles)), truncated


def _layers(graph: Mapping[str, frozenset[str]]) -> tuple[tuple[str, ...], ...]:
    remaining = {term: set(deps) for term, deps in graph.items()}
    placed: set[str] = set()
    layers: list[tuple[str, ...]] = []
    while remaining:
        ready = sorted(term for term, deps in remaining.items() if deps <= placed)
        if not ready:  # pragma: no cover - callers only layer acyclic graphs
            raise ValueError("graph is cyclic, no layering exists")
        layers.append(tuple(ready))
        placed.update(ready)
        for term in ready:
            del remaining[term]
    return tuple(layers)


def lint(registry: TermRegistry) -> LintReport:
    """Analyse a registry's definition graph.  See :class:`LintReport`."""
    graph = _dependency_graph(registry)

    relied_upon: set[str] = set()
    for term_def in registry.terms:
        relied_upon.update(dep for dep in term_def.depends_on if dep != term_def.term)
    undefined = tuple(
        sorted(
            t.term
            for t in registry.terms
            if t.provenance is Provenance.UNDEFINED and t.term in relied_upon
        )
    )

    dangling = tuple(
        sorted(
            (
                DanglingReference(term=t.term, missing=dep)
                for t in registry.terms
                for dep in t.depends_on
                if dep not in registry
            ),
            key=lambda d: (d.term, d.missing),
        )
    )

    cycles, truncated = _elementary_cycles(graph, MAX_REPORTED_CYCLES)
    layers = _layers(graph) if not cycles else None

    return LintReport(
        undefined_terms=undefined,
        dangling_references=dangling,
        cycles=cycles,
        cycles_truncated=truncated,
        layers=layers,
    )


def apply_amendments(registry: TermRegistry, amendments: Iterable[TermDef]) -> TermRegistry:
    """Return a new registry with the given definitions replacing or extending it.

    An amendment whose term already exists replaces that definition in place
    (the registry keeps its order); a new term is appended.  The input
    registry is untouched, and applying the same amendments twice gives the
    same result as applying them once.
    """
    replacements: dict[str, TermDef] = {}
    appended: list[TermDef] = []
    for amendment in amendments:
        if not isinstance(amendment, TermDef):
            raise TypeError(f"amendments must be TermDef, got {type(amendment).__name__}")
        if amendment.term in registry or amendment.term in replacements:
            replacements[amendment.term] = amendment
        else:
            replacements[amendment.term] = amendment
            appended.append(amendment)
    # A term amended twice keeps its final definition; if it was new, make
    # sure the appended copy is the final one as well.
    appended = [replacements[t.term] for t in appended]

    new_terms = [replacements.get(t.term, t) for t in registry.terms]
    new_terms.extend(appended)
    return TermRegistry(terms=tuple(new_terms))

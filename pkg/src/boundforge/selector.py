"""Incremental selection of most-filtering bound constraints.

The object constraint is posted once; all candidate bounds are posted once
to record, per feature solution, the backtrack count of the fully filtered
search; then a recursive dichotomic search keeps only the candidates whose
absence lets some backtrack count grow.  The incremental engine posts each
selected bound once for the whole run and re-checks solution transitions
without restarting from the first record.

A reference baseline runs the identical control flow but rebuilds the
model from scratch for every transition-checking trial (re-posting the
object constraint, every already selected bound and the trial subset, and
re-checking from the first record).  Selected lists are equal by
construction; the posting counters expose the incremental savings.

Record semantics: record i stores the backtrack count of the search that
produced solution i (from the lex-greater jump off solution i-1).  The
transition check for a head record posts lex-greater of its own solution
and compares the observed count against the stored count of record i+1;
the final record's successor is the sentinel.  The sentinel itself is
never drained.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

from .bounds import BoundCandidate, post_bound
from .errors import (
    CatalogSoundnessError,
    InfeasibleModelError,
    InternalInvariantError,
    InvalidArgumentError,
)
from .kernel import Model, VarRef, labeling, post_lex_greater
from .objects import (
    make_binseq_model,
    make_partition_model,
    post_binseq,
    post_partition,
)


@dataclass(frozen=True)
class SolutionRecord:
    """One enumerated feature solution; the sentinel has an empty sol."""

    isol: int
    nback: int
    sol: tuple[int, ...]


@dataclass
class Counters:
    """Post/labeling accounting; posts count object and bound postings only."""

    posts: int = 0
    labelings: int = 0
    events: list[tuple[str, str]] = field(default_factory=list)

    def posted(self, tag: str, name: str) -> None:
        self.posts += 1
        self.events.append((tag, name))


@dataclass(frozen=True)
class SelectionReport:
    selected: tuple[str, ...]
    posts: int
    labelings: int
    wall_ms: int

    def to_json(self) -> dict:
        return {
            "selected": list(self.selected),
            "posts": self.posts,
            "labelings": self.labelings,
            "wall_ms": self.wall_ms,
        }


@dataclass(frozen=True)
class ObjectScenario:
    """A combinatorial object kind plus size; builds fresh posted models."""

    object: str  # "partition" | "binseq"
    n: int

    def __post_init__(self):
        if self.object not in ("partition", "binseq"):
            raise InvalidArgumentError(f"unknown object {self.object!r}")
        if self.n < 1:
            raise InvalidArgumentError("scenario needs n >= 1")

    def fresh(self, counters: Counters) -> tuple[Model, list[VarRef], list[VarRef]]:
        if self.object == "partition":
            model, featvars, xs = make_partition_model(self.n)
            handle = post_partition(model, featvars, xs)
        else:
            model, featvars, xs = make_binseq_model(self.n)
            handle = post_binseq(model, featvars, xs)
        counters.posted("ctr", self.object)
        if handle is None:
            raise InfeasibleModelError(f"{self.object} constraint failed at n={self.n}")
        return model, featvars, xs


@dataclass(frozen=True)
class SelectionOutcome:
    """Report plus the artifacts needed by verification harnesses."""

    report: SelectionReport
    selected: tuple[BoundCandidate, ...]
    records: tuple[SolutionRecord, ...]
    counters: Counters


# -- enumeration ---------------------------------------------------------------


def enumerate_all_solutions(
    model: Model,
    featvars: Sequence[VarRef],
    xs: Sequence[VarRef],
    counters: Counters | None = None,
) -> list[SolutionRecord]:
    """Enumerate all feature solutions in ascending lex order.

    Each step posts feature-vars >lex previous-solution, labels, and
    retracts the lex constraint.  The terminal sentinel carries 0
    backtracks when the lex posting itself failed, or the full exhaustion
    count when the last labeling proved no solution remains.
    """
    counters = counters if counters is not None else Counters()
    isol = 0
    records: list[SolutionRecord] = []
    prev: tuple[int, ...] | None = None
    while True:
        mark = model.mark()
        if isol > 0:
            assert prev is not None
            if post_lex_greater(model, featvars, prev) is None:
                records.append(SolutionRecord(isol, 0, ()))
                return records
        res = labeling(model, featvars, xs)
        counters.labelings += 1
        model.retract_to(mark)
        if res.finished:
            records.append(SolutionRecord(isol, res.nback, ()))
            return records
        prev = res.sol[: len(featvars)]
        records.append(SolutionRecord(isol, res.nback, prev))
        isol += 1


def compute_all_solutions(
    model: Model,
    featvars: Sequence[VarRef],
    xs: Sequence[VarRef],
    candidates: Sequence[BoundCandidate],
    n: int,
    counters: Counters | None = None,
) -> list[SolutionRecord]:
    """Post every candidate, enumerate, sort by (nback, isol), retract posts."""
    counters = counters if counters is not None else Counters()
    mark = model.mark()
    for cand in candidates:
        handle = post_bound(model, cand, featvars, n)
        counters.posted("compute", cand.id)
        if handle is None:
            raise CatalogSoundnessError(f"bound {cand.id} failed on the feature box")
    records = enumerate_all_solutions(model, featvars, xs, counters)
    records.sort(key=lambda r: (r.nback, r.isol))
    model.retract_to(mark)
    return records


# -- selection engines ----------------------------------------------------------


class _IncrementalEngine:
    """Posts on one shared model; retraction via trail marks."""

    def __init__(self, model, featvars, xs, n, by_isol, counters):
        self.model = model
        self.featvars = featvars
        self.xs = xs
        self.n = n
        self.by_isol = by_isol
        self.counters = counters

    def post_selected(self, cand: BoundCandidate) -> None:
        handle = post_bound(self.model, cand, self.featvars, self.n)
        self.counters.posted("prev", cand.id)
        if handle is None:
            raise CatalogSoundnessError(f"bound {cand.id} failed when re-posted")

    def mark(self):
        return self.model.mark()

    def post_suffix(self, cands: Sequence[BoundCandidate]) -> None:
        for cand in cands:
            handle = post_bound(self.model, cand, self.featvars, self.n)
            self.counters.posted("suffix", cand.id)
            if handle is None:
                raise CatalogSoundnessError(f"bound {cand.id} failed when re-posted")

    def retract(self, mark) -> None:
        self.model.retract_to(mark)

    def enumerate_step(self, sols: list[SolutionRecord]):
        return _drain(self.model, self.featvars, self.xs, sols, self.by_isol, self.counters)


class _BaselineEngine:
    """Rebuilds the model from scratch for every transition-checking trial."""

    def __init__(self, scenario: ObjectScenario, full_drain, by_isol, counters):
        self.scenario = scenario
        self.full_drain = list(full_drain)
        self.by_isol = by_isol
        self.counters = counters
        self.selected_stack: list[BoundCandidate] = []
        self.trial_stack: list[BoundCandidate] = []

    def post_selected(self, cand: BoundCandidate) -> None:
        self.selected_stack.append(cand)

    def mark(self):
        return len(self.trial_stack)

    def post_suffix(self, cands: Sequence[BoundCandidate]) -> None:
        self.trial_stack.extend(cands)

    def retract(self, mark) -> None:
        del self.trial_stack[mark:]

    def enumerate_step(self, sols: list[SolutionRecord]):
        model, featvars, xs = self.scenario.fresh(self.counters)
        for cand in self.selected_stack + self.trial_stack:
            handle = post_bound(model, cand, featvars, self.scenario.n)
            self.counters.posted("baseline", cand.id)
            if handle is None:
                raise CatalogSoundnessError(f"bound {cand.id} failed when re-posted")
        return _drain(model, featvars, xs, self.full_drain, self.by_isol, self.counters)


def _drain(model, featvars, xs, sols, by_isol, counters):
    """Check successive solution transitions until one needs more backtracks.

    Returns (remaining records, missing_bound).  The head record's own
    solution seeds the lex jump; the expected count is the stored count of
    the record one index later (the sentinel for the last real record).
    """
    i = 0
    while i < len(sols):
        head = sols[i]
        succ = by_isol.get(head.isol + 1)
        if succ is None:
            raise InternalInvariantError(f"no stored record with index {head.isol + 1}")
        mark = model.mark()
        if post_lex_greater(model, featvars, head.sol) is None:
            observed = 0
        else:
            res = labeling(model, featvars, xs)
            counters.labelings += 1
            observed = res.nback
        model.retract_to(mark)
        if observed != succ.nback:
            return list(sols[i:]), True
        i += 1
    return [], False


# -- the recursive selection (shared by both engines) ---------------------------


def split_mid(length: int) -> int:
    """Prefix length of the uneven candidate split (suffix is the shorter side)."""
    if length > 200:
        return length - 100
    if length < 3:
        return (length + 1) // 2
    return (2 * length + 2) // 3


def _select_one(engine, top: bool, sols, bounds):
    if not bounds:
        raise InvalidArgumentError("select_one needs at least one candidate")
    mid = split_mid(len(bounds))
    prefix, suffix = list(bounds[:mid]), list(bounds[mid:])
    mark = engine.mark()
    result = _dicho(engine, sols, len(bounds), prefix, suffix)
    if top:
        engine.retract(mark)
    return result


def _dicho(engine, sols, length, prefix, suffix):
    mark = engine.mark()
    engine.post_suffix(suffix)
    sols2, missing = engine.enumerate_step(sols)
    if missing and length > 1:
        selected, rest = _select_one(engine, False, sols2, prefix)
        return selected, rest + suffix
    engine.retract(mark)
    if length == 1:
        if missing:
            return prefix[0], []
        return None, prefix
    return _select_one(engine, False, sols, suffix)


def _select(engine, sols, bounds, prev):
    if prev is not None:
        engine.post_selected(prev)
    selected, rest = _select_one(engine, True, sols, bounds)
    if selected is not None and rest:
        return [selected] + _select(engine, sols, rest, selected)
    return [] if selected is None else [selected]


# -- entry points ----------------------------------------------------------------


def _validate_candidates(scenario: ObjectScenario, candidates: Sequence[BoundCandidate]):
    for cand in candidates:
        if cand.object != scenario.object:
            raise InvalidArgumentError(
                f"candidate {cand.id} targets {cand.object}, scenario is {scenario.object}"
            )


def run_selection(
    scenario: ObjectScenario, candidates: Sequence[BoundCandidate]
) -> SelectionOutcome:
    """Incremental selection; the full outcome, for verification harnesses."""
    _validate_candidates(scenario, candidates)
    counters = Counters()
    start = time.monotonic()
    model, featvars, xs = scenario.fresh(counters)
    records = compute_all_solutions(model, featvars, xs, candidates, scenario.n, counters)
    selected: list[BoundCandidate] = []
    if candidates:
        drain = [r for r in records if r.sol]
        by_isol = {r.isol: r for r in records}
        engine = _IncrementalEngine(model, featvars, xs, scenario.n, by_isol, counters)
        selected = _select(engine, drain, list(candidates), None)
    report = SelectionReport(
        selected=tuple(c.id for c in selected),
        posts=counters.posts,
        labelings=counters.labelings,
        wall_ms=int((time.monotonic() - start) * 1000),
    )
    return SelectionOutcome(report, tuple(selected), tuple(records), counters)


def run_baseline(
    scenario: ObjectScenario, candidates: Sequence[BoundCandidate]
) -> SelectionOutcome:
    """Baseline selection: identical control flow, full re-posting per trial."""
    _validate_candidates(scenario, candidates)
    counters = Counters()
    start = time.monotonic()
    model, featvars, xs = scenario.fresh(counters)
    records = compute_all_solutions(model, featvars, xs, candidates, scenario.n, counters)
    selected: list[BoundCandidate] = []
    if candidates:
        drain = [r for r in records if r.sol]
        by_isol = {r.isol: r for r in records}
        engine = _BaselineEngine(scenario, drain, by_isol, counters)
        selected = _select(engine, drain, list(candidates), None)
    report = SelectionReport(
        selected=tuple(c.id for c in selected),
        posts=counters.posts,
        labelings=counters.labelings,
        wall_ms=int((time.monotonic() - start) * 1000),
    )
    return SelectionOutcome(report, tuple(selected), tuple(records), counters)


def selection(scenario: ObjectScenario, candidates: Sequence[BoundCandidate]) -> SelectionReport:
    """Run the incremental selection and return its report."""
    return run_selection(scenario, candidates).report


def baseline_selection(
    scenario: ObjectScenario, candidates: Sequence[BoundCandidate]
) -> SelectionReport:
    """Run the baseline selection and return its report."""
    return run_baseline(scenario, candidates).report

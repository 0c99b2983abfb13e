"""Trail-based finite-domain constraint store with deterministic labeling.

The kernel is deliberately small: integer variables with explicit finite
domains, a chronological trail with marks for incremental post/retract,
and a fixed left-to-right, increasing-value labeling search that counts
backtracks.

Backtrack semantics (pinned, because every consumer depends on them):
``nback`` counts the events where a decision assignment fails immediately,
i.e. propagation (including any check that fires on newly fixed variables)
wipes out a domain right after the assignment.  Unwinding a decision
because its subtree was exhausted is not counted.  Proving exhaustion
therefore costs exactly the number of failed value trials in the search.

Propagation strength is fixed and documented per constraint class; it is
part of the observable behaviour (backtrack counts), not an optimization
detail.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import (
    InvalidArgumentError,
    InvalidDomainError,
    InvalidMarkError,
    UnsupportedConstraintError,
)


@dataclass(frozen=True)
class VarRef:
    """Handle to one finite-domain variable of a :class:`Model`."""

    model_id: int
    id: int


@dataclass(frozen=True)
class TrailMark:
    """Position in a model's trail; ``retract_to`` restores this exact state."""

    model_id: int
    trail_len: int
    ncons: int


@dataclass(frozen=True)
class ConstraintHandle:
    """Handle to one posted constraint."""

    id: int
    kind: str
    scope: tuple[int, ...]


@dataclass(frozen=True)
class LabelResult:
    """Outcome of one labeling run.

    ``sol`` holds the values of the labeled variables in labeling order and
    is empty iff ``finished`` is true (no solution remains).
    """

    nback: int
    finished: bool
    sol: tuple[int, ...]


class Constraint:
    """Base class for propagators.

    ``watched`` lists the variable ids whose domain changes re-schedule the
    propagator.  ``propagate`` prunes through the model helpers and returns
    False exactly when it wiped out a domain.
    """

    kind = "constraint"

    def __init__(self, watched: Sequence[int]):
        self.watched = tuple(watched)

    def propagate(self, model: "Model") -> bool:
        raise NotImplementedError


class Model:
    """A single-threaded finite-domain store with one chronological trail."""

    _next_id = 0

    def __init__(self) -> None:
        Model._next_id += 1
        self.model_id = Model._next_id
        self._doms: list[tuple[int, ...]] = []
        self._trail: list[tuple[int, tuple[int, ...]]] = []
        self._constraints: list[Constraint] = []
        self._watchers: list[list[int]] = []
        self._queue: deque[int] = deque()
        self._inq: set[int] = set()

    # -- variables ---------------------------------------------------------

    def new_var(self, lo: int, hi: int) -> VarRef:
        """Create a variable with domain {lo..hi}."""
        if lo > hi:
            raise InvalidDomainError(f"empty initial domain [{lo}, {hi}]")
        return self._new_var_values(tuple(range(lo, hi + 1)))

    def _new_var_values(self, values: tuple[int, ...]) -> VarRef:
        vid = len(self._doms)
        self._doms.append(values)
        self._watchers.append([])
        return VarRef(self.model_id, vid)

    def _check_var(self, v: VarRef) -> int:
        if v.model_id != self.model_id:
            raise InvalidArgumentError("variable belongs to another model")
        return v.id

    def domain(self, v: VarRef) -> tuple[int, ...]:
        return self._doms[self._check_var(v)]

    def dom(self, vid: int) -> tuple[int, ...]:
        return self._doms[vid]

    def is_fixed(self, vid: int) -> bool:
        return len(self._doms[vid]) == 1

    def value(self, vid: int) -> int:
        d = self._doms[vid]
        if len(d) != 1:
            raise InvalidArgumentError("variable is not fixed")
        return d[0]

    def snapshot(self) -> tuple[tuple[int, ...], ...]:
        """Immutable copy of every domain, for restoration checks."""
        return tuple(self._doms)

    # -- trail -------------------------------------------------------------

    def mark(self) -> TrailMark:
        return TrailMark(self.model_id, len(self._trail), len(self._constraints))

    def retract_to(self, mark: TrailMark) -> None:
        """Undo every pruning and constraint posted after ``mark``."""
        if mark.model_id != self.model_id:
            raise InvalidMarkError("mark belongs to another model")
        if mark.trail_len > len(self._trail) or mark.ncons > len(self._constraints):
            raise InvalidMarkError("mark already passed")
        self._queue.clear()
        self._inq.clear()
        while len(self._trail) > mark.trail_len:
            vid, old = self._trail.pop()
            self._doms[vid] = old
        while len(self._constraints) > mark.ncons:
            cid = len(self._constraints) - 1
            con = self._constraints.pop()
            for vid in set(con.watched):
                lst = self._watchers[vid]
                while lst and lst[-1] == cid:
                    lst.pop()

    # -- pruning helpers (used by propagators) ------------------------------

    def _set_dom(self, vid: int, new: tuple[int, ...]) -> bool:
        old = self._doms[vid]
        if new == old:
            return True
        self._trail.append((vid, old))
        self._doms[vid] = new
        if not new:
            return False
        for cid in self._watchers[vid]:
            if cid not in self._inq:
                self._inq.add(cid)
                self._queue.append(cid)
        return True

    def prune_le(self, vid: int, ub: int) -> bool:
        d = self._doms[vid]
        if d and d[-1] <= ub:
            return True
        return self._set_dom(vid, d[: bisect_right(d, ub)])

    def prune_ge(self, vid: int, lb: int) -> bool:
        d = self._doms[vid]
        if d and d[0] >= lb:
            return True
        return self._set_dom(vid, d[bisect_left(d, lb):])

    def remove_value(self, vid: int, val: int) -> bool:
        d = self._doms[vid]
        i = bisect_left(d, val)
        if i >= len(d) or d[i] != val:
            return True
        return self._set_dom(vid, d[:i] + d[i + 1:])

    def fix(self, vid: int, val: int) -> bool:
        d = self._doms[vid]
        if len(d) == 1 and d[0] == val:
            return True
        i = bisect_left(d, val)
        if i >= len(d) or d[i] != val:
            return self._set_dom(vid, ())
        return self._set_dom(vid, (val,))

    # -- posting and propagation --------------------------------------------

    def post_constraint(self, con: Constraint) -> ConstraintHandle | None:
        """Post ``con``; on failure the model is rolled back and None returned."""
        mark = self.mark()
        cid = len(self._constraints)
        self._constraints.append(con)
        for vid in con.watched:
            self._watchers[vid].append(cid)
        if cid not in self._inq:
            self._inq.add(cid)
            self._queue.append(cid)
        if self._drain():
            return ConstraintHandle(cid, con.kind, con.watched)
        self.retract_to(mark)
        return None

    def _drain(self) -> bool:
        while self._queue:
            cid = self._queue.popleft()
            self._inq.discard(cid)
            if cid >= len(self._constraints):
                continue
            if not self._constraints[cid].propagate(self):
                self._queue.clear()
                self._inq.clear()
                return False
        return True

    def assign(self, vid: int, val: int) -> bool:
        """Fix a variable and propagate to fixpoint; False on failure."""
        if not self.fix(vid, val):
            return False
        return self._drain()


# -- concrete constraints ----------------------------------------------------


class EqVars(Constraint):
    """a = b, bounds-consistent hull intersection, eager check when fixed."""

    kind = "eq"

    def __init__(self, a: int, b: int):
        super().__init__((a, b))
        self.a, self.b = a, b

    def propagate(self, model: Model) -> bool:
        da, db = model.dom(self.a), model.dom(self.b)
        lo, hi = max(da[0], db[0]), min(da[-1], db[-1])
        if lo > hi:
            return False
        for vid in (self.a, self.b):
            if not (model.prune_ge(vid, lo) and model.prune_le(vid, hi)):
                return False
        da, db = model.dom(self.a), model.dom(self.b)
        if len(da) == 1 and len(db) == 1 and da[0] != db[0]:
            return False
        return True


class LeConst(Constraint):
    kind = "le_const"

    def __init__(self, a: int, c: int):
        super().__init__((a,))
        self.a, self.c = a, c

    def propagate(self, model: Model) -> bool:
        return model.prune_le(self.a, self.c)


class GeConst(Constraint):
    kind = "ge_const"

    def __init__(self, a: int, c: int):
        super().__init__((a,))
        self.a, self.c = a, c

    def propagate(self, model: Model) -> bool:
        return model.prune_ge(self.a, self.c)


class SumEq(Constraint):
    """sum(xs) = total (variable or constant), bounds-consistent."""

    kind = "sum_eq"

    def __init__(self, xs: Sequence[int], total_var: int | None, total_const: int = 0):
        watched = tuple(xs) + ((total_var,) if total_var is not None else ())
        super().__init__(watched)
        self.xs = tuple(xs)
        self.total_var = total_var
        self.total_const = total_const

    def propagate(self, model: Model) -> bool:
        lo = sum(model.dom(v)[0] for v in self.xs)
        hi = sum(model.dom(v)[-1] for v in self.xs)
        if self.total_var is not None:
            if not (model.prune_ge(self.total_var, lo) and model.prune_le(self.total_var, hi)):
                return False
            tlo, thi = model.dom(self.total_var)[0], model.dom(self.total_var)[-1]
        else:
            tlo = thi = self.total_const
            if not (lo <= thi and hi >= tlo):
                return False
        for v in self.xs:
            d = model.dom(v)
            if not model.prune_ge(v, tlo - (hi - d[-1])):
                return False
            if not model.prune_le(v, thi - (lo - d[0])):
                return False
        return True


class LexGreater(Constraint):
    """vars >lex tuple (constant), domain-complete filtering.

    Values below the tie value are pruned at the first non-fixed position of
    the forced-equal prefix; the tie value itself is dropped when the suffix
    cannot break the tie upward.  Fails exactly when the domain box maximum
    is lexicographically <= the tuple.
    """

    kind = "lex_greater"

    def __init__(self, xs: Sequence[int], tup: Sequence[int]):
        if len(xs) != len(tup):
            raise InvalidArgumentError("lex-greater arity mismatch")
        super().__init__(tuple(xs))
        self.xs = tuple(xs)
        self.tup = tuple(tup)

    def _suffix_can_exceed(self, model: Model, j: int) -> bool:
        for p in range(j, len(self.xs)):
            d = model.dom(self.xs[p])
            if d[-1] > self.tup[p]:
                return True
            if self.tup[p] not in d:
                return False
        return False

    def propagate(self, model: Model) -> bool:
        i = 0
        k = len(self.xs)
        while True:
            if i == k:
                return False
            if not model.prune_ge(self.xs[i], self.tup[i]):
                return False
            d = model.dom(self.xs[i])
            if d[-1] > self.tup[i]:
                break
            i += 1
        d = model.dom(self.xs[i])
        if d[0] == self.tup[i] and not self._suffix_can_exceed(model, i + 1):
            if not model.remove_value(self.xs[i], self.tup[i]):
                return False
        return True


class Check(Constraint):
    """Predicate over a scope, checked only once every scope variable is fixed."""

    kind = "check"

    def __init__(self, xs: Sequence[int], predicate: Callable[[tuple[int, ...]], bool]):
        super().__init__(tuple(xs))
        self.xs = tuple(xs)
        self.predicate = predicate

    def propagate(self, model: Model) -> bool:
        vals = []
        for v in self.xs:
            d = model.dom(v)
            if len(d) != 1:
                return True
            vals.append(d[0])
        return bool(self.predicate(tuple(vals)))


# -- posting API -------------------------------------------------------------


def post(model: Model, spec: tuple) -> ConstraintHandle | None:
    """Post a constraint described by a (kind, args...) tuple.

    Returns the handle, or None when posting failed (the model is then
    unchanged).  Unknown kinds raise :class:`UnsupportedConstraintError`.
    """
    kind = spec[0]
    if kind == "eq":
        return model.post_constraint(EqVars(model._check_var(spec[1]), model._check_var(spec[2])))
    if kind == "le_const":
        return model.post_constraint(LeConst(model._check_var(spec[1]), spec[2]))
    if kind == "ge_const":
        return model.post_constraint(GeConst(model._check_var(spec[1]), spec[2]))
    if kind == "sum_eq":
        xs = [model._check_var(v) for v in spec[1]]
        total = spec[2]
        if isinstance(total, VarRef):
            return model.post_constraint(SumEq(xs, model._check_var(total)))
        return model.post_constraint(SumEq(xs, None, int(total)))
    if kind == "lex_greater":
        return post_lex_greater(model, spec[1], spec[2])
    if kind == "check":
        xs = [model._check_var(v) for v in spec[1]]
        return model.post_constraint(Check(xs, spec[2]))
    raise UnsupportedConstraintError(f"unknown constraint kind {kind!r}")


def post_lex_greater(
    model: Model, xs: Sequence[VarRef], tup: Sequence[int]
) -> ConstraintHandle | None:
    """Post (xs) >lex (tup); fails iff the tuple is the box maximum."""
    if len(xs) != len(tup):
        raise InvalidArgumentError(
            f"lex-greater arity mismatch: {len(xs)} vars vs {len(tup)} values"
        )
    vids = [model._check_var(v) for v in xs]
    return model.post_constraint(LexGreater(vids, tuple(tup)))


# -- search ------------------------------------------------------------------


def labeling(model: Model, featvars: Sequence[VarRef], xs: Sequence[VarRef]) -> LabelResult:
    """Find the lexicographically smallest solution of featvars ++ xs.

    Variables are fixed left to right, scanning each domain by increasing
    value.  Returns the backtrack count together with the solution, or
    ``finished=True`` with the count spent proving that none remains.  The
    model state is restored before returning.
    """
    order = [model._check_var(v) for v in featvars] + [model._check_var(v) for v in xs]
    if not order:
        raise InvalidArgumentError("labeling needs at least one variable")
    base = model.mark()
    nback = 0
    sol: list[int] | None = None

    def dfs(k: int) -> bool:
        nonlocal nback, sol
        if k == len(order):
            sol = [model.dom(v)[0] for v in order]
            return True
        vid = order[k]
        for val in model.dom(vid):
            mk = model.mark()
            if model.assign(vid, val):
                if dfs(k + 1):
                    return True
            else:
                nback += 1
            model.retract_to(mk)
        return False

    found = dfs(0)
    model.retract_to(base)
    if found:
        assert sol is not None
        return LabelResult(nback, False, tuple(sol))
    return LabelResult(nback, True, ())


def solve_all(model: Model, order: Sequence[VarRef]) -> list[tuple[int, ...]]:
    """Exhaustively enumerate every solution over ``order`` (test utility).

    Depth-first in the same order/value discipline as :func:`labeling`;
    the model state is restored before returning.
    """
    vids = [model._check_var(v) for v in order]
    base = model.mark()
    out: list[tuple[int, ...]] = []

    def dfs(k: int) -> None:
        if k == len(vids):
            out.append(tuple(model.dom(v)[0] for v in vids))
            return
        vid = vids[k]
        for val in model.dom(vid):
            mk = model.mark()
            if model.assign(vid, val):
                dfs(k + 1)
            model.retract_to(mk)

    dfs(0)
    model.retract_to(base)
    return out

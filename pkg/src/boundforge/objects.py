"""Ground feature extraction and constraint models for the two objects.

Partition features are taken over a multiset of part sizes; binary-sequence
features are taken over stretches of 1s and the 0-runs strictly between
them.  The constraint models post, on top of the feature/variable boxes:

* the propagated channels (occurrence counts for partitions, the count of
  1s for binary sequences),
* a check-only feasibility test on the fixed prefix of the feature
  variables (it never prunes a domain, it can only fail, so posted bound
  constraints remain the sole source of feature-domain filtering),
* a ground checker that fires once every sequence variable is fixed and
  pins the feature variables to the extracted values.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import InvalidArgumentError, InvalidInputError
from .kernel import Constraint, ConstraintHandle, Model, SumEq, VarRef

PARTITION_FEATURES = ("P", "Mmin", "Mmax", "rangeM", "S")
BINSEQ_FEATURES = ("N1", "G", "Gmin", "Gmax", "rangeG", "GS", "Dmin", "Dmax", "rangeD", "DS")


@dataclass(frozen=True)
class PartitionFeatures:
    """Feature tuple of one partition of n elements into parts."""

    n: int
    P: int
    Mmin: int
    Mmax: int
    rangeM: int
    S: int

    def as_tuple(self) -> tuple[int, ...]:
        return (self.P, self.Mmin, self.Mmax, self.rangeM, self.S)

    def env(self) -> dict[str, int]:
        return {"n": self.n, "P": self.P, "Mmin": self.Mmin, "Mmax": self.Mmax,
                "rangeM": self.rangeM, "S": self.S}


@dataclass(frozen=True)
class BinSeqFeatures:
    """Feature tuple of one 0/1 sequence."""

    n: int
    N1: int
    G: int
    Gmin: int
    Gmax: int
    rangeG: int
    GS: int
    Dmin: int
    Dmax: int
    rangeD: int
    DS: int

    def as_tuple(self) -> tuple[int, ...]:
        return (self.N1, self.G, self.Gmin, self.Gmax, self.rangeG,
                self.GS, self.Dmin, self.Dmax, self.rangeD, self.DS)

    def env(self) -> dict[str, int]:
        out = {"n": self.n}
        for name, val in zip(BINSEQ_FEATURES, self.as_tuple()):
            out[name] = val
        return out


def partition_features(sizes: Sequence[int]) -> PartitionFeatures:
    """Features of a partition given its part sizes (any order)."""
    if not sizes:
        raise InvalidInputError("a partition needs at least one part")
    if any(not isinstance(s, int) or s < 1 for s in sizes):
        raise InvalidInputError(f"part sizes must be positive integers: {list(sizes)!r}")
    n = sum(sizes)
    mmin, mmax = min(sizes), max(sizes)
    return PartitionFeatures(
        n=n, P=len(sizes), Mmin=mmin, Mmax=mmax, rangeM=mmax - mmin,
        S=sum(s * s for s in sizes),
    )


def binseq_features(bits: Sequence[int]) -> BinSeqFeatures:
    """Features of a 0/1 sequence, with all-zero conventions for no stretch."""
    if any(b not in (0, 1) for b in bits):
        raise InvalidInputError(f"sequence must be 0/1: {list(bits)!r}")
    n = len(bits)
    stretches: list[int] = []
    gaps: list[int] = []
    run = 0
    gap = 0
    for b in bits:
        if b == 1:
            if run == 0 and stretches and gap > 0:
                gaps.append(gap)
            gap = 0
            run += 1
        else:
            if run > 0:
                stretches.append(run)
                run = 0
            gap += 1
    if run > 0:
        stretches.append(run)
    g = len(stretches)
    n1 = sum(stretches)
    gmin = min(stretches) if g else 0
    gmax = max(stretches) if g else 0
    dmin = min(gaps) if gaps else 0
    dmax = max(gaps) if gaps else 0
    return BinSeqFeatures(
        n=n, N1=n1, G=g, Gmin=gmin, Gmax=gmax, rangeG=gmax - gmin,
        GS=sum(s * s for s in stretches),
        Dmin=dmin, Dmax=dmax, rangeD=dmax - dmin,
        DS=sum(d * d for d in gaps),
    )


# -- initial feature boxes ----------------------------------------------------


def partition_initial_domains(n: int) -> dict[str, tuple[int, int]]:
    """Smallest feature boxes provable from the definition alone."""
    return {
        "P": (1, n),
        "Mmin": (1, n),
        "Mmax": (1, n),
        "rangeM": (0, n - 1),
        "S": (n, n * n),
    }


def binseq_initial_domains(n: int) -> dict[str, tuple[int, int]]:
    d2 = n - 2 if n >= 2 else 0
    return {
        "N1": (0, n),
        "G": (0, (n + 1) // 2),
        "Gmin": (0, n),
        "Gmax": (0, n),
        "rangeG": (0, max(n - 1, 0)),
        "GS": (0, n * n),
        "Dmin": (0, d2),
        "Dmax": (0, d2),
        "rangeD": (0, d2),
        "DS": (0, d2 * d2),
    }


def make_partition_model(n: int) -> tuple[Model, list[VarRef], list[VarRef]]:
    """Fresh model with partition feature variables and n sequence variables."""
    if n < 1:
        raise InvalidArgumentError("partition model needs n >= 1")
    model = Model()
    boxes = partition_initial_domains(n)
    featvars = [model.new_var(*boxes[name]) for name in PARTITION_FEATURES]
    xs = [model.new_var(1, n) for _ in range(n)]
    return model, featvars, xs


def make_binseq_model(n: int) -> tuple[Model, list[VarRef], list[VarRef]]:
    """Fresh model with binary-sequence feature variables and n 0/1 variables."""
    if n < 1:
        raise InvalidArgumentError("binseq model needs n >= 1")
    model = Model()
    boxes = binseq_initial_domains(n)
    featvars = [model.new_var(*boxes[name]) for name in BINSEQ_FEATURES]
    xs = [model.new_var(0, 1) for _ in range(n)]
    return model, featvars, xs


# -- feasible feature tuples (ground truth used by the check-only tests) ------


def _iter_part_sizes(n: int, cap: int | None = None) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    top = min(cap, n) if cap is not None else n
    for first in range(top, 0, -1):
        for rest in _iter_part_sizes(n - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def partition_tuples(n: int) -> tuple[tuple[int, ...], ...]:
    """All feasible partition feature tuples for this n, lexicographically sorted."""
    tuples = {partition_features(sizes).as_tuple() for sizes in _iter_part_sizes(n)}
    return tuple(sorted(tuples))


@lru_cache(maxsize=None)
def binseq_tuples(n: int) -> tuple[tuple[int, ...], ...]:
    """All feasible binary-sequence feature tuples for this n, sorted."""
    tuples = set()
    for code in range(1 << n):
        bits = [(code >> i) & 1 for i in range(n)]
        tuples.add(binseq_features(bits).as_tuple())
    return tuple(sorted(tuples))


@lru_cache(maxsize=None)
def _prefix_sets(tuples: tuple[tuple[int, ...], ...], width: int) -> tuple[frozenset, ...]:
    sets: list[set] = [set() for _ in range(width + 1)]
    for tup in tuples:
        for k in range(1, width + 1):
            sets[k].add(tup[:k])
    return tuple(frozenset(s) for s in sets)


# -- model-side constraints ----------------------------------------------------


class PrefixFeasible(Constraint):
    """Check-only test of the fixed prefix of the feature variables.

    Fails when no feasible feature tuple extends the currently fixed prefix.
    Never prunes, so it contributes exactly one backtrack per infeasible
    value tried during labeling and leaves all feature-domain filtering to
    posted bound constraints.
    """

    kind = "prefix_feasible"

    def __init__(self, featvars: Sequence[int], prefixes: tuple[frozenset, ...]):
        super().__init__(tuple(featvars))
        self.featvars = tuple(featvars)
        self.prefixes = prefixes

    def propagate(self, model: Model) -> bool:
        vals = []
        for vid in self.featvars:
            d = model.dom(vid)
            if len(d) != 1:
                break
            vals.append(d[0])
        if not vals:
            return True
        return tuple(vals) in self.prefixes[len(vals)]


class GroundChecker(Constraint):
    """When every sequence variable is fixed, pin the feature variables."""

    kind = "ground_checker"

    def __init__(self, featvars: Sequence[int], xs: Sequence[int], extract):
        super().__init__(tuple(xs))
        self.featvars = tuple(featvars)
        self.xs = tuple(xs)
        self.extract = extract

    def propagate(self, model: Model) -> bool:
        vals = []
        for vid in self.xs:
            d = model.dom(vid)
            if len(d) != 1:
                return True
            vals.append(d[0])
        for fvid, fval in zip(self.featvars, self.extract(vals)):
            if not model.fix(fvid, fval):
                return False
        return True


class PrecedenceCaps(Constraint):
    """Value precedence on partition colors: X1=1 and Xi <= max(prefix)+1."""

    kind = "value_precedence"

    def __init__(self, xs: Sequence[int]):
        super().__init__(tuple(xs))
        self.xs = tuple(xs)

    def propagate(self, model: Model) -> bool:
        if not model.prune_le(self.xs[0], 1):
            return False
        running_ub = model.dom(self.xs[0])[-1]
        for vid in self.xs[1:]:
            if not model.prune_le(vid, running_ub + 1):
                return False
            running_ub = max(running_ub, model.dom(vid)[-1])
        return True


class OccurrenceChannel(Constraint):
    """Counting channel between partition colors, occurrence counts, P and S.

    Occurrence bounds come from fixed/possible counts over the colors;
    closures push exhausted or forced values back onto the colors; P is the
    number of used values; S is bracketed by the min/max of the sum of
    squared occurrences subject to the boxes and the total n.  No backward
    pruning from S; the ground checker settles everything at the leaves.
    """

    kind = "occurrence_channel"

    def __init__(self, xs: Sequence[int], occ: Sequence[int], p: int, s: int):
        super().__init__(tuple(xs) + tuple(occ) + (p, s))
        self.xs = tuple(xs)
        self.occ = tuple(occ)
        self.p = p
        self.s = s

    def propagate(self, model: Model) -> bool:
        n = len(self.xs)
        fixed = [0] * (n + 1)
        possible = [0] * (n + 1)
        for vid in self.xs:
            d = model.dom(vid)
            if len(d) == 1:
                fixed[d[0]] += 1
            for v in d:
                possible[v] += 1
        for j, ovid in enumerate(self.occ, start=1):
            if not model.prune_ge(ovid, fixed[j]):
                return False
            if not model.prune_le(ovid, possible[j]):
                return False
        for j, ovid in enumerate(self.occ, start=1):
            od = model.dom(ovid)
            if od[-1] == fixed[j] and possible[j] > fixed[j]:
                for vid in self.xs:
                    if len(model.dom(vid)) > 1 and not model.remove_value(vid, j):
                        return False
            if od[0] == possible[j] and possible[j] > fixed[j]:
                for vid in self.xs:
                    if j in model.dom(vid) and not model.fix(vid, j):
                        return False
        lbs = [model.dom(v)[0] for v in self.occ]
        ubs = [model.dom(v)[-1] for v in self.occ]
        if sum(lbs) > n or sum(ubs) < n:
            return False
        pmin = sum(1 for lb in lbs if lb >= 1)
        pmax = sum(1 for ub in ubs if ub >= 1)
        if not (model.prune_ge(self.p, pmin) and model.prune_le(self.p, pmax)):
            return False
        pd = model.dom(self.p)
        if pd[-1] == pmin:
            for ovid, lb in zip(self.occ, lbs):
                if lb == 0 and not model.prune_le(ovid, 0):
                    return False
        if pd[0] == pmax:
            for ovid, ub in zip(self.occ, ubs):
                if ub >= 1 and not model.prune_ge(ovid, 1):
                    return False
        lbs = [model.dom(v)[0] for v in self.occ]
        ubs = [model.dom(v)[-1] for v in self.occ]
        smin = _min_sum_squares_in_box(lbs, ubs, n)
        smax = _max_sum_squares_in_box(lbs, ubs, n)
        return model.prune_ge(self.s, smin) and model.prune_le(self.s, smax)


def _min_sum_squares_in_box(lbs: list[int], ubs: list[int], total: int) -> int:
    # water-filling: each extra unit goes to the smallest current value
    vals = list(lbs)
    rest = total - sum(vals)
    while rest > 0:
        best = -1
        for i, v in enumerate(vals):
            if v < ubs[i] and (best < 0 or v < vals[best]):
                best = i
        vals[best] += 1
        rest -= 1
    return sum(v * v for v in vals)


def _max_sum_squares_in_box(lbs: list[int], ubs: list[int], total: int) -> int:
    # concentrate: fill coordinates to their caps, widest cap first
    vals = list(lbs)
    rest = total - sum(vals)
    for i in sorted(range(len(vals)), key=lambda i: -ubs[i]):
        take = min(rest, ubs[i] - vals[i])
        vals[i] += take
        rest -= take
    return sum(v * v for v in vals)


# -- posting -------------------------------------------------------------------


def post_partition(
    model: Model, featvars: Sequence[VarRef], xs: Sequence[VarRef]
) -> ConstraintHandle | None:
    """Post the partition object constraint over 5 feature vars and n colors.

    Registers n hidden occurrence variables.  Solutions project onto exactly
    the feasible partition feature tuples; the color witnesses are value
    precedence canonical.
    """
    if len(featvars) != len(PARTITION_FEATURES):
        raise InvalidArgumentError("partition takes 5 feature variables")
    n = len(xs)
    fvids = [model._check_var(v) for v in featvars]
    xvids = [model._check_var(v) for v in xs]
    occ = [model.new_var(0, n) for _ in range(n)]
    ovids = [v.id for v in occ]
    mark = model.mark()
    steps = [
        PrecedenceCaps(xvids),
        SumEq(ovids, None, n),
        OccurrenceChannel(xvids, ovids, fvids[0], fvids[4]),
        PrefixFeasible(fvids, _prefix_sets(partition_tuples(n), len(fvids))),
        GroundChecker(fvids, xvids, _partition_ground),
    ]
    handle = None
    for con in steps:
        handle = model.post_constraint(con)
        if handle is None:
            model.retract_to(mark)
            return None
    return handle


def _partition_ground(vals: list[int]) -> tuple[int, ...]:
    counts: dict[int, int] = {}
    for v in vals:
        counts[v] = counts.get(v, 0) + 1
    return partition_features(list(counts.values())).as_tuple()


def post_binseq(
    model: Model, featvars: Sequence[VarRef], xs: Sequence[VarRef]
) -> ConstraintHandle | None:
    """Post the binary-sequence object constraint over 10 feature vars."""
    if len(featvars) != len(BINSEQ_FEATURES):
        raise InvalidArgumentError("binseq takes 10 feature variables")
    n = len(xs)
    fvids = [model._check_var(v) for v in featvars]
    xvids = [model._check_var(v) for v in xs]
    mark = model.mark()
    steps = [
        SumEq(xvids, fvids[0]),
        PrefixFeasible(fvids, _prefix_sets(binseq_tuples(n), len(fvids))),
        GroundChecker(fvids, xvids, lambda vals: binseq_features(vals).as_tuple()),
    ]
    handle = None
    for con in steps:
        handle = model.post_constraint(con)
        if handle is None:
            model.retract_to(mark)
            return None
    return handle

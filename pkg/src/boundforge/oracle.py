"""Independent brute-force ground truth for the bound catalog.

Everything here enumerates objects exhaustively and evaluates definitions
directly; nothing depends on the constraint kernel, so model behaviour and
catalog formulas can both be audited against it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterator

from .bounds import BoundCandidate, verify_on
from .errors import InvalidArgumentError
from .objects import binseq_features, partition_features


def enum_partitions(n: int) -> list[tuple[int, ...]]:
    """All multisets of positive integers summing to n, non-increasing."""
    if n < 1:
        raise InvalidArgumentError("partitions need n >= 1")
    out: list[tuple[int, ...]] = []

    def rec(rest: int, cap: int, acc: tuple[int, ...]) -> None:
        if rest == 0:
            out.append(acc)
            return
        for first in range(min(cap, rest), 0, -1):
            rec(rest - first, first, acc + (first,))

    rec(n, n, ())
    return out


def enum_binseqs(n: int) -> Iterator[tuple[int, ...]]:
    """All 2**n binary sequences of length n, each exactly once."""
    if n < 0:
        raise InvalidArgumentError("sequences need n >= 0")
    return product((0, 1), repeat=n)


@dataclass
class AuditReport:
    """Exhaustive check of one bound at one size."""

    bound_id: str
    n: int
    instances: int
    violations: list[tuple[tuple[int, ...], int, int]] = field(default_factory=list)
    witnesses: list[tuple[int, ...]] = field(default_factory=list)
    min_slack: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def row(self) -> dict:
        return {
            "bound": self.bound_id,
            "n": self.n,
            "instances": self.instances,
            "violations": len(self.violations),
            "witnesses": len(self.witnesses),
            "min_slack": self.min_slack,
        }

    def to_json(self) -> dict:
        out = self.row()
        out["violation_details"] = [
            {"features": list(f), "lhs": lhs, "rhs": rhs}
            for f, lhs, rhs in self.violations
        ]
        return out


def audit(bound: BoundCandidate, n: int) -> AuditReport:
    """Evaluate a bound on every object of size n; collect violations and
    slack-0 witnesses."""
    report = AuditReport(bound_id=bound.id, n=n, instances=0)
    if bound.object == "partition":
        feature_iter = (partition_features(list(sizes)) for sizes in enum_partitions(n))
    else:
        feature_iter = (binseq_features(list(bits)) for bits in enum_binseqs(n))
    for feats in feature_iter:
        report.instances += 1
        verdict = verify_on(bound, feats)
        if report.min_slack is None or verdict.slack < report.min_slack:
            report.min_slack = verdict.slack
        if not verdict.holds:
            report.violations.append((feats.as_tuple(), verdict.lhs, verdict.rhs))
        elif verdict.slack == 0:
            report.witnesses.append(feats.as_tuple())
    return report


def max_sum_squares(n: int, p: int) -> int:
    """Largest sum of squares of p positive integers summing to n."""
    if not 1 <= p <= n:
        raise InvalidArgumentError(f"need 1 <= P <= n, got P={p}, n={n}")
    top = n - (p - 1)
    return top * top + p - 1


def omax_omin_bounds(n: int, p: int, mmin: int, mmax: int) -> tuple[int, int]:
    """Tight upper bounds on the number of largest-size and smallest-size parts."""
    rng = mmax - mmin
    if rng <= 0:
        raise InvalidArgumentError("bounds need Mmax > Mmin")
    r = n - p * mmin
    if r < 0:
        raise InvalidArgumentError("infeasible features: n < P*Mmin")
    return r // rng, p - (-(-r // rng))

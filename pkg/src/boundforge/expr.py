"""Guarded integer expression trees used by the bound catalog.

Expressions are evaluated over an environment mapping feature names (plus
``n``) to integers.  Division and modulo are Euclidean: the divisor must be
strictly positive, the remainder is non-negative, and a negative numerator
(possible only on infeasible mid-search assignments) floors toward
minus infinity, which is exactly Python's ``//`` / ``%`` for positive
divisors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .errors import CatalogError

Env = Mapping[str, int]


class NoCaseMatched(CatalogError):
    """No guard of a case-split matched the environment.

    Impossible on feasible feature tuples (guards are exhaustive there);
    reachable mid-search on infeasible fixed prefixes, where the caller may
    soundly treat it as a failed subtree.
    """


@dataclass(frozen=True)
class Const:
    value: int

    def eval(self, env: Env) -> int:
        return self.value

    def prefix(self):
        return self.value

    def names(self) -> frozenset[str]:
        return frozenset()


@dataclass(frozen=True)
class Feat:
    name: str

    def eval(self, env: Env) -> int:
        return env[self.name]

    def prefix(self):
        return self.name

    def names(self) -> frozenset[str]:
        return frozenset((self.name,))


@dataclass(frozen=True)
class BinOp:
    op: str  # "+", "-", "*", "div", "mod"
    lhs: "Expr"
    rhs: "Expr"

    def eval(self, env: Env) -> int:
        a, b = self.lhs.eval(env), self.rhs.eval(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if b <= 0:
            raise CatalogError(f"non-positive divisor {b} in {self.op}")
        if self.op == "div":
            return a // b
        if self.op == "mod":
            return a % b
        raise CatalogError(f"unknown operator {self.op!r}")

    def prefix(self):
        return [self.op, self.lhs.prefix(), self.rhs.prefix()]

    def names(self) -> frozenset[str]:
        return self.lhs.names() | self.rhs.names()


@dataclass(frozen=True)
class Square:
    arg: "Expr"

    def eval(self, env: Env) -> int:
        v = self.arg.eval(env)
        return v * v

    def prefix(self):
        return ["sq", self.arg.prefix()]

    def names(self) -> frozenset[str]:
        return self.arg.names()


@dataclass(frozen=True)
class MinMax:
    op: str  # "min" | "max"
    args: tuple["Expr", ...]

    def eval(self, env: Env) -> int:
        vals = [a.eval(env) for a in self.args]
        return min(vals) if self.op == "min" else max(vals)

    def prefix(self):
        return [self.op] + [a.prefix() for a in self.args]

    def names(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for a in self.args:
            out |= a.names()
        return out


@dataclass(frozen=True)
class Cmp:
    op: str  # "==", "!=", "<", "<=", ">", ">="
    lhs: "Expr"
    rhs: "Expr"

    def holds(self, env: Env) -> bool:
        a, b = self.lhs.eval(env), self.rhs.eval(env)
        if self.op == "==":
            return a == b
        if self.op == "!=":
            return a != b
        if self.op == "<":
            return a < b
        if self.op == "<=":
            return a <= b
        if self.op == ">":
            return a > b
        if self.op == ">=":
            return a >= b
        raise CatalogError(f"unknown comparison {self.op!r}")

    def prefix(self):
        return [self.op, self.lhs.prefix(), self.rhs.prefix()]

    def names(self) -> frozenset[str]:
        return self.lhs.names() | self.rhs.names()


@dataclass(frozen=True)
class And:
    parts: tuple[Cmp, ...]

    def holds(self, env: Env) -> bool:
        return all(p.holds(env) for p in self.parts)

    def prefix(self):
        return ["and"] + [p.prefix() for p in self.parts]

    def names(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for p in self.parts:
            out |= p.names()
        return out


Guard = Union[Cmp, And]


@dataclass(frozen=True)
class Iverson:
    cond: Guard

    def eval(self, env: Env) -> int:
        return 1 if self.cond.holds(env) else 0

    def prefix(self):
        return ["iverson", self.cond.prefix()]

    def names(self) -> frozenset[str]:
        return self.cond.names()


@dataclass(frozen=True)
class Cases:
    """First-match case split; guards must be exhaustive on feasible tuples."""

    cases: tuple[tuple[Guard, "Expr"], ...]

    def eval(self, env: Env) -> int:
        for guard, expr in self.cases:
            if guard.holds(env):
                return expr.eval(env)
        raise NoCaseMatched(f"no case matched environment {dict(env)!r}")

    def matching(self, env: Env) -> int:
        """Number of guards that hold (exhaustiveness/exclusivity checks)."""
        return sum(1 for guard, _ in self.cases if guard.holds(env))

    def prefix(self):
        return ["cases"] + [[g.prefix(), e.prefix()] for g, e in self.cases]

    def names(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for g, e in self.cases:
            out |= g.names() | e.names()
        return out


Expr = Union[Const, Feat, BinOp, Square, MinMax, Iverson, Cases]


# -- small builders, so catalog definitions read close to their formulas ------


def feat(name: str) -> Feat:
    return Feat(name)


def const(v: int) -> Const:
    return Const(v)


def _wrap(x) -> Expr:
    return x if not isinstance(x, int) else Const(x)


def add(a, b) -> BinOp:
    return BinOp("+", _wrap(a), _wrap(b))


def sub(a, b) -> BinOp:
    return BinOp("-", _wrap(a), _wrap(b))


def mul(a, b) -> BinOp:
    return BinOp("*", _wrap(a), _wrap(b))


def fdiv(a, b) -> BinOp:
    return BinOp("div", _wrap(a), _wrap(b))


def fmod(a, b) -> BinOp:
    return BinOp("mod", _wrap(a), _wrap(b))


def sq(a) -> Square:
    return Square(_wrap(a))


def emin(*args) -> MinMax:
    return MinMax("min", tuple(_wrap(a) for a in args))


def emax(*args) -> MinMax:
    return MinMax("max", tuple(_wrap(a) for a in args))


def cmp(op: str, a, b) -> Cmp:
    return Cmp(op, _wrap(a), _wrap(b))


def both(*parts: Cmp) -> And:
    return And(tuple(parts))


def iverson(cond: Guard) -> Iverson:
    return Iverson(cond)


def cases(*pairs: tuple[Guard, "Expr | int"]) -> Cases:
    return Cases(tuple((g, _wrap(e)) for g, e in pairs))

"""The bound catalog: shapes, evaluation, posting, exhaustive soundness."""

from __future__ import annotations

import json

import pytest

from boundforge import expr, oracle
from boundforge.bounds import by_id, catalog, catalog_json, decoy, eval_rhs, post_bound, verify_on
from boundforge.errors import CatalogError, InvalidArgumentError
from boundforge.expr import NoCaseMatched
from boundforge.objects import (
    binseq_features,
    make_binseq_model,
    make_partition_model,
    partition_features,
)

CATALOG_IDS = [
    "P-S-UB", "P-RANGE-UB1", "P-RANGE-UB2",
    "B-N1-UB", "B-GMAX-LB", "B-GMAX-UB1", "B-DMIN-UB", "B-DMAX-UB",
    "B-GS-LB1", "B-GS-LB2", "B-GS-LB3", "B-GS-UB1", "B-GS-UB2",
    "B-DS-LB1", "B-DS-LB2", "B-DS-LB3", "B-DS-UB1", "B-DS-UB2",
    "B-GMAX-UB2", "B-GS-UB3",
]


def test_catalog_shape():
    cat = catalog()
    assert len(cat) == 20
    assert [b.id for b in cat] == CATALOG_IDS
    assert by_id("P-S-UB").target == "S"
    assert by_id("P-S-UB").direction == "upper"
    assert by_id("B-DS-LB3").rhs.prefix() == ["sq", "Dmax"]
    with pytest.raises(InvalidArgumentError):
        by_id("NOPE")


def test_target_never_appears_in_its_own_rhs():
    for b in catalog():
        assert b.target not in b.rhs.names()


def _penv(n, p, mmin, mmax, rng):
    return {"n": n, "P": p, "Mmin": mmin, "Mmax": mmax, "rangeM": rng}


def test_sum_squares_upper_bound_examples():
    # leftover 5 over range 3: one middle part of size 3, one full step
    assert eval_rhs(by_id("P-S-UB"), _penv(8, 3, 1, 4, 3)) == 26
    best = max(
        partition_features(list(s)).S
        for s in oracle.enum_partitions(8)
        if len(s) == 3 and min(s) == 1 and max(s) == 4
    )
    assert best == 26
    # equal parts collapse to Mmin^2 * P
    assert eval_rhs(by_id("P-S-UB"), _penv(6, 3, 2, 2, 0)) == 12


def _first_binseq_with(n, pred):
    for bits in oracle.enum_binseqs(n):
        if pred(binseq_features(list(bits))):
            return list(bits)
    return None


def test_binseq_bound_examples_with_exhaustive_attainment():
    f = binseq_features([1, 1, 0, 1, 0, 1])
    assert eval_rhs(by_id("B-N1-UB"), f) == 4 == f.N1
    best = max(
        g.N1 for bits in oracle.enum_binseqs(6)
        for g in [binseq_features(list(bits))] if g.G == 3 and g.Gmax == 2
    )
    assert best == 4

    assert eval_rhs(by_id("B-GMAX-LB"), {"n": 6, "N1": 4}) == 2
    assert binseq_features([1, 1, 0, 1, 0, 1]).Gmax == 2

    assert eval_rhs(by_id("B-DMIN-UB"), {"n": 6, "G": 2, "Gmax": 2}) == 3
    assert binseq_features([1, 1, 0, 0, 0, 1]).Dmin == 3

    assert eval_rhs(by_id("B-DS-UB1"), {"n": 6, "N1": 2}) == 16
    assert binseq_features([1, 0, 0, 0, 0, 1]).DS == 16

    assert eval_rhs(by_id("B-GS-UB1"), {"n": 6, "G": 3, "N1": 4}) == 6
    assert binseq_features([1, 1, 0, 1, 0, 1]).GS == 6

    assert eval_rhs(by_id("B-GMAX-UB2"), {"n": 7, "G": 3, "Dmax": 2, "Dmin": 1}) == 2
    assert binseq_features([1, 0, 1, 0, 0, 1, 1]).Gmax == 2


def test_verify_on_tightness_witnesses():
    f = binseq_features([1, 1, 0, 1, 0, 1])
    v = verify_on(by_id("B-GS-LB2"), f)
    assert (v.holds, v.lhs, v.rhs, v.slack) == (True, 6, 6, 0)

    f = binseq_features([1, 0, 1, 0, 0, 1])
    v = verify_on(by_id("B-DS-LB2"), f)
    assert (v.holds, v.rhs, v.slack) == (True, 5, 0)

    f = binseq_features([1, 0, 1, 0, 0, 1, 1])
    v = verify_on(by_id("B-GS-UB2"), f)
    assert (v.holds, v.rhs, v.slack) == (True, 6, 0)


def test_post_bound_prunes_on_fixed_inputs():
    n = 6
    model, featvars, xs = make_binseq_model(n)
    names = dict(zip(("N1", "G", "Gmin", "Gmax", "rangeG", "GS", "Dmin", "Dmax", "rangeD", "DS"), featvars))
    # DS >= Dmax^2 once Dmax is fixed to 3
    assert model.assign(names["Dmax"].id, 3)
    assert post_bound(model, by_id("B-DS-LB3"), featvars, n) is not None
    assert model.domain(names["DS"]) == tuple(range(9, 17))

    model, featvars, xs = make_binseq_model(6)
    names = dict(zip(("N1", "G", "Gmin", "Gmax", "rangeG", "GS", "Dmin", "Dmax", "rangeD", "DS"), featvars))
    assert model.assign(names["G"].id, 0)
    assert model.assign(names["Gmax"].id, 0)
    assert post_bound(model, by_id("B-N1-UB"), featvars, 6) is not None
    assert model.domain(names["N1"]) == (0,)

    model, featvars, xs = make_partition_model(5)
    names = dict(zip(("P", "Mmin", "Mmax", "rangeM", "S"), featvars))
    assert model.assign(names["P"].id, 2)
    assert model.assign(names["Mmin"].id, 2)
    assert post_bound(model, by_id("P-RANGE-UB1"), featvars, 5) is not None
    assert model.domain(names["rangeM"]) == (0, 1)


def test_unmatched_guard_is_catalog_error_on_eval_and_failure_on_post():
    # G=1 with a positive largest inter-distance occurs in no sequence
    bad = {"n": 7, "G": 1, "Dmax": 2, "Dmin": 0}
    with pytest.raises(NoCaseMatched):
        eval_rhs(by_id("B-GMAX-UB2"), bad)

    model, featvars, xs = make_binseq_model(7)
    assert post_bound(model, by_id("B-GMAX-UB2"), featvars, 7) is not None
    g, dmin, dmax = featvars[1], featvars[6], featvars[7]
    assert model.assign(g.id, 1)
    assert model.assign(dmin.id, 0)
    assert not model.assign(dmax.id, 2)  # infeasible combination fails the subtree


def test_euclidean_division_conventions():
    with pytest.raises(CatalogError):
        expr.fdiv(expr.const(4), expr.const(0)).eval({})
    # negative numerators floor toward -inf with non-negative remainder
    assert expr.fdiv(expr.const(-7), expr.const(3)).eval({}) == -3
    assert expr.fmod(expr.const(-7), expr.const(3)).eval({}) == 2


def test_iverson_is_zero_or_one():
    node = expr.iverson(expr.cmp("==", expr.feat("G"), 0))
    assert node.eval({"G": 0}) == 1
    assert node.eval({"G": 5}) == 0


@pytest.mark.parametrize("n", range(1, 9))
def test_catalog_soundness_small(n):
    for b in catalog("partition"):
        assert oracle.audit(b, n).ok
    for b in catalog("binseq"):
        assert oracle.audit(b, n).ok


def test_guard_exhaustiveness_and_exclusivity():
    def walk(node, env):
        if isinstance(node, expr.Cases):
            assert node.matching(env) == 1
            for _, e in node.cases:
                walk(e, env)
            return
        for attr in ("lhs", "rhs", "arg"):
            child = getattr(node, attr, None)
            if child is not None and hasattr(child, "eval"):
                walk(child, env)
        for child in getattr(node, "args", ()):
            walk(child, env)

    for n in range(1, 9):
        for sizes in oracle.enum_partitions(n):
            env = partition_features(list(sizes)).env()
            for b in catalog("partition"):
                walk(b.rhs, env)
        for bits in oracle.enum_binseqs(n):
            env = binseq_features(list(bits)).env()
            for b in catalog("binseq"):
                walk(b.rhs, env)


def test_observed_tightness_report():
    """Report (never fail) sizes where a bound has no slack-0 witness."""
    missing = []
    for b in catalog():
        top = 9 if b.object == "partition" else 10
        for n in range(3, top + 1):
            if not oracle.audit(b, n).witnesses:
                missing.append((b.id, n))
    print("\nbounds with no tightness witness at some n:", missing or "none")


def test_decoy_is_vacuous_and_validated():
    d = decoy("binseq", "GS", 6)
    assert d.id == "decoy:GS"
    assert eval_rhs(d, {"n": 6}) == 36
    for bits in oracle.enum_binseqs(6):
        assert verify_on(d, binseq_features(list(bits))).holds
    with pytest.raises(InvalidArgumentError):
        decoy("partition", "GS", 6)


def test_catalog_json_is_serializable_and_complete():
    doc = catalog_json()
    assert len(doc) == 20
    text = json.dumps(doc)
    assert '"P-S-UB"' in text
    for entry in doc:
        assert set(entry) == {"id", "object", "target", "direction", "rhs"}

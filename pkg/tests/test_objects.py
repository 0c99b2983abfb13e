"""Feature extractors and the posted object models."""

from __future__ import annotations

import pytest

from boundforge import kernel, objects, oracle
from boundforge.errors import InvalidInputError
from boundforge.objects import (
    BinSeqFeatures,
    PartitionFeatures,
    binseq_features,
    binseq_tuples,
    make_binseq_model,
    make_partition_model,
    partition_features,
    partition_tuples,
    post_binseq,
    post_partition,
)


def test_partition_features_examples():
    assert partition_features([4, 1]) == PartitionFeatures(5, 2, 1, 4, 3, 17)
    # equal parts: S collapses to Mmin^2 * P
    assert partition_features([2, 2, 2]) == PartitionFeatures(6, 3, 2, 2, 0, 12)
    assert partition_features([4, 3, 1]) == PartitionFeatures(8, 3, 1, 4, 3, 26)


def test_partition_features_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        partition_features([])
    with pytest.raises(InvalidInputError):
        partition_features([2, 0])


def test_binseq_features_examples():
    assert binseq_features([0, 0, 0]) == BinSeqFeatures(3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0)
    assert binseq_features([1, 1, 1]) == BinSeqFeatures(3, 3, 1, 3, 3, 0, 9, 0, 0, 0, 0)
    assert binseq_features([1, 1, 0, 1, 0, 1]) == BinSeqFeatures(6, 4, 3, 1, 2, 1, 6, 1, 1, 0, 2)


def test_binseq_features_ignores_outer_zero_runs():
    # leading/trailing 0s are not inter-distances
    f = binseq_features([0, 1, 1, 0, 0, 1, 0])
    assert (f.G, f.Dmin, f.Dmax, f.DS) == (2, 2, 2, 4)


def test_binseq_features_rejects_non_binary():
    with pytest.raises(InvalidInputError):
        binseq_features([0, 2, 1])


def test_feature_extractor_totality():
    for n in range(0, 9):
        for bits in oracle.enum_binseqs(n):
            binseq_features(list(bits))
    for n in range(1, 9):
        for sizes in oracle.enum_partitions(n):
            partition_features(list(sizes))


@pytest.mark.parametrize("n", range(1, 11))
def test_binseq_feature_invariants(n):
    for bits in oracle.enum_binseqs(n):
        f = binseq_features(list(bits))
        assert 0 <= f.N1 <= n
        assert (f.G == 0) == (f.N1 == 0)
        if f.G == 0:
            assert f.Gmin == f.Gmax == f.GS == 0
        if f.G <= 1:
            assert f.Dmin == f.Dmax == f.DS == 0
        assert f.rangeG == f.Gmax - f.Gmin
        assert f.rangeD == f.Dmax - f.Dmin
        # inter-distance count is max(G-1, 0): one per adjacent stretch pair
        zeros_between = sum(1 for b in bits if b == 0)
        assert f.DS >= max(f.G - 1, 0)  # each inter-distance is >= 1
        assert f.DS <= zeros_between * zeros_between if f.G > 1 else f.DS == 0


@pytest.mark.parametrize("n", range(1, 11))
def test_partition_feature_invariants(n):
    for sizes in oracle.enum_partitions(n):
        f = partition_features(list(sizes))
        assert 1 <= f.P <= n
        assert 1 <= f.Mmin <= f.Mmax <= n
        assert f.rangeM == f.Mmax - f.Mmin
        assert f.P * f.Mmin <= n <= f.P * f.Mmax
        assert n <= f.S <= n * n


def _model_tuples(object_name: str, n: int) -> tuple[set, list]:
    if object_name == "partition":
        model, featvars, xs = make_partition_model(n)
        assert post_partition(model, featvars, xs) is not None
    else:
        model, featvars, xs = make_binseq_model(n)
        assert post_binseq(model, featvars, xs) is not None
    sols = kernel.solve_all(model, list(xs) + list(featvars))
    return {s[n:] for s in sols}, sols


def test_post_partition_small_solution_sets():
    assert _model_tuples("partition", 1)[0] == {(1, 1, 1, 0, 1)}
    assert _model_tuples("partition", 2)[0] == {(1, 2, 2, 0, 4), (2, 1, 1, 0, 2)}
    assert _model_tuples("partition", 3)[0] == {
        (1, 3, 3, 0, 9), (2, 1, 2, 1, 5), (3, 1, 1, 0, 3),
    }


def test_post_binseq_small_solution_sets():
    assert _model_tuples("binseq", 1)[0] == {
        (0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
        (1, 1, 1, 1, 0, 1, 0, 0, 0, 0),
    }
    # the two single-one sequences of n=2 share one feature tuple
    assert binseq_features([1, 0]) == binseq_features([0, 1])
    assert len(_model_tuples("binseq", 2)[0]) == 3
    assert len(_model_tuples("binseq", 3)[0]) == 5


@pytest.mark.parametrize("n", range(1, 11))
def test_partition_projection_completeness(n):
    tuples, sols = _model_tuples("partition", n)
    assert tuples == set(partition_tuples(n))
    for s in sols:  # witness soundness
        counts: dict[int, int] = {}
        for v in s[:n]:
            counts[v] = counts.get(v, 0) + 1
        assert partition_features(list(counts.values())).as_tuple() == s[n:]


@pytest.mark.parametrize("n", range(1, 13))
def test_binseq_projection_completeness(n):
    tuples, sols = _model_tuples("binseq", n)
    assert tuples == set(binseq_tuples(n))
    for s in sols:  # witness soundness
        assert binseq_features(list(s[:n])).as_tuple() == s[n:]


def test_initial_domains_match_documented_boxes():
    n = 6
    model, featvars, xs = make_binseq_model(n)
    boxes = objects.binseq_initial_domains(n)
    for name, var in zip(objects.BINSEQ_FEATURES, featvars):
        lo, hi = boxes[name]
        assert model.domain(var) == tuple(range(lo, hi + 1))
    assert all(model.domain(x) == (0, 1) for x in xs)

    model, featvars, xs = make_partition_model(n)
    boxes = objects.partition_initial_domains(n)
    for name, var in zip(objects.PARTITION_FEATURES, featvars):
        lo, hi = boxes[name]
        assert model.domain(var) == tuple(range(lo, hi + 1))
    assert all(model.domain(x) == tuple(range(1, n + 1)) for x in xs)

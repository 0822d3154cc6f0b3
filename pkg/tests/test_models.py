"""Monomial enumeration, schema construction, image streams."""

import random
from fractions import Fraction as F

import pytest

from seqguess.errors import BadModulus, SchemaExhausted
from seqguess.guess import Options
from seqguess.modarith import ModPrime, reduce_scalar
from seqguess.models import (
    CLASS_NAMES,
    Monomial,
    build_images,
    build_schema,
    cauchy_plan,
    check_images,
    naive_product_count,
    partition_stream,
    partitions_lex,
    schema_stream,
)
from seqguess.rings import QQ, QQ_T, QPARAM, RatPoly


def test_partitions_lex_frozen():
    assert partitions_lex(3) == [(), (1,), (1, 1), (2,), (1, 1, 1), (2, 1), (3,)]
    assert len([p for p in partitions_lex(6) if sum(p) == 6]) == 11
    with pytest.raises(ValueError):
        partitions_lex(-1)


def test_partition_stream_prefix():
    stream = partition_stream()
    assert [next(stream) for _ in range(7)] == partitions_lex(3)


def test_class_names():
    assert set(CLASS_NAMES) == {"rat", "prec", "rec", "pade", "alg", "fe", "holo", "ade"}


def _parts(klass, opts, n, q=False):
    gen = schema_stream(klass, opts, q)
    return [(mo.parts, mo.tag, mo.mixed) for _, mo in zip(range(n), gen)]


def test_schema_streams_by_class():
    o = Options()
    assert _parts("rat", o, 2) == [((), "shift", 0), ((1,), "shift", 0)]
    assert _parts("prec", Options(max_shift=2), 4) == [
        ((), "shift", 0), ((1,), "shift", 0), ((2,), "shift", 0), ((3,), "shift", 0)]
    assert _parts("alg", Options(max_power=2), 3) == [
        ((), "mahler", 0), ((1,), "mahler", 0), ((1, 1), "mahler", 0)]
    assert _parts("fe", Options(max_level=2, max_power=2), 6) == [
        ((), "mahler", 0), ((1,), "mahler", 0), ((1, 1), "mahler", 0),
        ((2,), "mahler", 0), ((2, 1), "mahler", 0), ((2, 2), "mahler", 0)]
    assert _parts("holo", Options(max_derivative=2), 4) == [
        ((), "derivative", 0), ((1,), "derivative", 0), ((2,), "derivative", 0), ((3,), "derivative", 0)]
    assert _parts("pade", o, 2, q=True) == [((), "qdilation", 0), ((1,), "qdilation", 0)]


def test_schema_stream_homogeneous_and_mixed():
    assert _parts("prec", Options(max_shift=2, homogeneous=True), 3) == [
        ((1,), "shift", 0), ((2,), "shift", 0), ((3,), "shift", 0)]
    assert _parts("rec", Options(max_shift=1, homogeneous=2, max_power=2), 3) == [
        ((1, 1), "shift", 0), ((2, 1), "shift", 0), ((2, 2), "shift", 0)]
    assert _parts("prec", Options(max_shift=1, max_mixed_degree=1), 4, q=True) == [
        ((), "shift", 0), ((), "shift", 1), ((1,), "shift", 0), ((1,), "shift", 1)]


def test_schema_stream_somos():
    got = _parts("rec", Options(max_shift=2, somos=2), 5)
    assert got == [((2, 2), "shift", 0), ((3, 1), "shift", 0)]
    with pytest.raises(ValueError):
        list(schema_stream("rec", Options(somos=True)))


def test_build_schema_validation():
    with pytest.raises(ValueError):
        build_schema("rat", Options(), 1)
    with pytest.raises(SchemaExhausted):
        build_schema("rat", Options(), 3)  # rat has exactly two monomials
    with pytest.raises(ValueError):
        build_schema("nope", Options(), 2)


def test_points_kind():
    assert build_schema("prec", Options(max_shift=1), 2).points_kind == "integer"
    assert build_schema("prec", Options(max_shift=1), 2, q=True).points_kind == "qpower"
    assert build_schema("prec", Options(max_shift=1, max_mixed_degree=1), 2, q=True).points_kind == "integer"
    assert build_schema("alg", Options(max_power=2), 3).points_kind == "confluent"
    s = build_schema("pade", Options(), 2, q=True)
    assert s.points_kind == "confluent" and s.q


def test_monomial_loss_and_degree():
    assert Monomial((3,), "shift").loss == 2
    assert Monomial((2, 1), "derivative").loss == 1
    assert Monomial((4,), "mahler").loss == 0
    assert Monomial((), "shift").loss == 0
    assert Monomial((2, 2, 1), "shift").degree == 3
    assert build_schema("prec", Options(max_shift=2), 3).loss == 1
    assert build_schema("prec", Options(max_shift=2), 4).loss == 2


def test_cauchy_plan_reuses_sorted_prefixes():
    parts = [(1, 1), (1, 1, 2)]
    plan = cauchy_plan(parts)
    assert plan.product_count == 2  # (1,1) then (1,1)*2
    assert naive_product_count(parts) == 3
    parts = [(2, 2), (2, 2), (3,)]
    assert cauchy_plan(parts).product_count == 1
    assert naive_product_count(parts) == 2


def test_build_images_sequence_frozen():
    schema = build_schema("rat", Options(), 2)
    prob = build_images([F(5), F(5), F(5)], schema, QQ)
    assert prob.sigma == 3
    assert prob.points == [F(0), F(1), F(2)]
    assert prob.streams == [[1, 1, 1], [5, 5, 5]]


def test_build_images_shift_monomials():
    schema = build_schema("rec", Options(max_shift=1, max_power=2), 5)
    parts = [mo.parts for mo in schema.monomials]
    assert parts == [(), (1,), (1, 1), (2,), (2, 1)]  # max_power caps the count
    prob = build_images([F(0), F(1), F(2), F(3)], schema, QQ)
    assert prob.sigma == 3  # loss 1 from the shift
    assert prob.streams[1] == [0, 1, 2]  # f(n)
    assert prob.streams[2] == [0, 1, 4]  # f(n)^2
    assert prob.streams[3] == [1, 2, 3]  # f(n+1)
    assert prob.streams[4] == [0, 2, 6]  # f(n+1) f(n)


def test_build_images_mahler_spread():
    schema = build_schema("fe", Options(max_level=2, max_power=1), 3)
    terms = [F(v) for v in [0, 1, 1, 1, 2, 3, 6, 11, 23]]
    prob = build_images(terms, schema, QQ)
    assert prob.points is None and prob.sigma == 9
    assert prob.streams[1] == terms
    assert prob.streams[2] == [0, 0, 1, 0, 1, 0, 1, 0, 2]  # f(x^2)


def test_build_images_derivative():
    schema = build_schema("holo", Options(max_derivative=1), 3)
    prob = build_images([F(1), F(1), F(1), F(1)], schema, QQ)
    # f' of 1+x+x^2+x^3 at shared order 3
    assert prob.sigma == 3
    assert prob.streams[2] == [1, 2, 3]


def test_build_images_qpower_points():
    schema = build_schema("rat", Options(), 2, q=True)
    terms = [RatPoly.const(1), QPARAM, QPARAM * QPARAM]
    prob = build_images(terms, schema, QQ_T)
    assert prob.points[0] == RatPoly.const(1)
    assert prob.points[1] == QPARAM
    assert prob.points[2] == QPARAM * QPARAM


def test_build_images_commutes_with_reduction():
    rng = random.Random(7)
    fp = ModPrime(10007)
    terms = [F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(8)]
    for klass, opts in [
        ("alg", Options(max_power=2)),
        ("prec", Options(max_shift=1)),
        ("ade", Options(max_derivative=1, max_power=2)),
    ]:
        schema = build_schema(klass, opts, 3)
        exact = build_images(terms, schema, QQ)
        modular = build_images(terms, schema, fp)
        assert modular.sigma == exact.sigma
        for se, sm in zip(exact.streams, modular.streams):
            assert [reduce_scalar(v, fp) for v in se] == list(map(int, sm))
        if exact.points is not None:
            assert [reduce_scalar(v, fp) for v in exact.points] == list(map(int, modular.points))


def test_build_images_q_evaluation_commutes():
    rng = random.Random(8)
    fp = ModPrime(10007)
    tau = 3
    terms = [RatPoly.make([rng.randint(-5, 5) for _ in range(3)]) for _ in range(6)]
    schema = build_schema("rat", Options(), 2, q=True)
    exact = build_images(terms, schema, QQ_T)
    modular = build_images(terms, schema, fp, q_point=tau)
    for se, sm in zip(exact.streams, modular.streams):
        assert [reduce_scalar(v.eval(F(tau)), fp) for v in se] == list(map(int, sm))


def test_to_field_bad_modulus_at_vanishing_denominator():
    fp = ModPrime(10007)
    schema = build_schema("rat", Options(), 2, q=True)
    pole = RatPoly.make([1], [-1, 1])  # 1/(q-1)
    with pytest.raises(BadModulus):
        build_images([pole, pole, pole], schema, fp, q_point=1)


def test_check_images_natural_lengths():
    schema = build_schema("prec", Options(max_shift=1), 3)  # (), (1), (2)
    terms = [F(k) for k in range(5)]
    streams, points = check_images(terms, schema, QQ)
    assert [len(s) for s in streams] == [5, 5, 4]
    assert points == [F(j) for j in range(5)]
    assert streams[2] == [1, 2, 3, 4]  # f(n+1)


def test_check_images_series():
    schema = build_schema("alg", Options(max_power=2), 3)
    terms = [F(1), F(1), F(2), F(5)]
    streams, points = check_images(terms, schema, QQ)
    assert points is None
    assert streams[0] == [1, 0, 0, 0]
    assert streams[1] == terms
    assert streams[2] == [1, 2, 5, 14]  # f^2 truncated

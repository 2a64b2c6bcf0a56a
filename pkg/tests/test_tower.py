"""Tower: bar construction, fat realization, tower terms, degree, delooping."""

import random

import pytest

from chaincalc.complexes import (
    ChainComplex,
    ChainMap,
    betti,
    homology,
    single,
    validate,
    zero_complex,
)
from chaincalc.eta import EtaContext, cofibrant_replace, iterated_suspension
from chaincalc.exact import QQ, ZZ, Matrix
from chaincalc.functors import (
    constant_functor,
    identity_functor,
    structure_fiber,
    tensor_power,
)
from chaincalc.randgen import random_complex, random_context, random_eta_object
from chaincalc.tower import (
    SimplicialChainComplex,
    bar_construction,
    degree_check,
    deloop_degree1,
    deloop_excisive,
    fat_realization,
    tower_term,
)


def based_point(ring=QQ):
    ctx = EtaContext.based(ring)
    return ctx, ctx.zero_aug_object(single(ring, 0))


def pointed_point(ring=QQ):
    ctx = EtaContext.pointed_over(single(ring, 0))
    return ctx, ctx.zero_aug_object(single(ring, 0))


# ---------------------------------------------------------------- bar

def test_bar_single_level():
    ctx, pt = based_point()
    bar = bar_construction(identity_functor(ctx), 1, pt, 0)
    assert bar.truncation == 0
    assert set(bar.levels) == {0}
    # perp_1 of the identity at a based point is the point itself
    assert bar.level(0).ranks == {0: 1}


def test_bar_constant_based_levels_acyclic():
    ctx, pt = based_point()
    c = constant_functor(ctx, single(QQ, 0))
    bar = bar_construction(c, 1, pt, 2)
    for q in range(3):
        lv = bar.level(q)
        for k in range(-6, 2):
            assert homology(lv, k).is_zero()


def test_bar_simplicial_identities_exact():
    # n = 2, F = tensor square, truncation 3: every in-range identity holds
    ctx, pt = based_point()
    bar = bar_construction(tensor_power(ctx, 2), 2, pt, 3)
    assert bar.validate_identities() == []


def test_bar_identities_on_random_pointed_instances():
    rng = random.Random(0)
    for _ in range(3):
        ctx = random_context(rng, QQ, "pointed")
        f = rng.choice([identity_functor(ctx), structure_fiber(ctx)])
        x = random_eta_object(rng, ctx)
        bar = bar_construction(f, 1, x, 2)
        assert bar.validate_identities() == []


# ---------------------------------------------------------------- fat realization

def test_fat_single_level_unchanged():
    ctx, pt = based_point()
    bar = bar_construction(identity_functor(ctx), 1, pt, 0)
    fat = fat_realization(bar)
    assert fat.total == bar.level(0)


def test_fat_constant_simplicial_object_oracle():
    # constant simplicial object with identity faces: the totalization is
    # C tensor (the alternating interval complex); within the truncation
    # window the homology equals that of C
    rng = random.Random(1)
    c = random_complex(rng, QQ)
    n = 3
    levels = {q: c for q in range(n + 1)}
    faces = {}
    degeneracies = {}
    ident = ChainMap.identity(c)
    for q in range(1, n + 1):
        for i in range(q + 1):
            faces[(q, i)] = ident
    for q in range(n):
        for i in range(q + 1):
            degeneracies[(q, i)] = ident
    s = SimplicialChainComplex(n, levels, faces, degeneracies)
    assert s.validate_identities() == []
    fat = fat_realization(s)
    assert validate(fat.total) == []
    for k in range(-4, n - 1):
        assert betti(fat.total, k) == betti(c, k)


def test_fat_d_squared_random_bars():
    rng = random.Random(2)
    for _ in range(4):
        ctx = random_context(rng, QQ, rng.choice(["based", "pointed"]))
        f = rng.choice([identity_functor(ctx), constant_functor(ctx, single(QQ, 0))])
        x = random_eta_object(rng, ctx)
        bar = bar_construction(f, rng.randint(1, 2), x, 2)
        fat = fat_realization(bar)
        assert validate(fat.total) == []


# ---------------------------------------------------------------- tower terms

def test_tower_term_constant_degree0():
    # the bar of a constant functor at a based point is acyclic, so the
    # degree-0 term has the homology of the constant inside the window
    ctx, pt = based_point()
    value = single(QQ, 0)
    c = constant_functor(ctx, value)
    t = tower_term(c, 0, pt, 3)
    assert validate(t.total) == []
    assert validate(t.augmentation) == []
    assert validate(t.structure_map) == []
    for k in range(0, t.truncation - 1):
        assert betti(t.total, k) == betti(value, k)


def test_tower_term_degree1_of_identity_structure():
    # identity is already degree 1: the structure map should be a homology
    # isomorphism in the truncation-valid range
    ctx, pt = based_point()
    t = tower_term(identity_functor(ctx), 1, pt, 3)
    for k in range(0, t.truncation - 1):
        assert betti(t.total, k) == betti(t.value_at_base, k)


def test_tower_term_kills_tensor_square_at_point():
    # the degree-1 term of the tensor square at the based point vanishes in
    # homology within the truncation window
    ctx, pt = based_point()
    t = tower_term(tensor_power(ctx, 2), 1, pt, 4)
    for k in range(-2, t.truncation - 1):
        assert homology(t.total, k).is_zero()


def test_truncation_stability():
    ctx, pt = based_point()
    for f, n in ((identity_functor(ctx), 1), (tensor_power(ctx, 2), 1)):
        t2 = tower_term(f, n, pt, 2)
        t3 = tower_term(f, n, pt, 3)
        for k in range(-2, 2):  # k <= N - 1 with N = 2
            assert betti(t2.total, k) == betti(t3.total, k)


# ---------------------------------------------------------------- degree check

def test_degree_check_identity_is_degree_one():
    rng = random.Random(3)
    ctx, pt = based_point()
    f = identity_functor(ctx)
    tuples = [tuple(ctx.zero_aug_object(random_complex(rng, QQ, max_pieces=1)) for _ in range(2))
              for _ in range(3)]
    rep = degree_check(f, 1, tuples, -4, 4)
    assert rep["failures"] == []


def test_degree_check_tensor_powers():
    ctx, pt = based_point()
    for d in (1, 2, 3):
        f = tensor_power(ctx, d)
        tuples = [tuple(pt for _ in range(d + 1))]
        rep = degree_check(f, d, tuples, -6, 6)
        assert rep["failures"] == []
        if d > 1:
            # not degree d-1: H_0 of the d-th cross effect on points is d!
            from chaincalc.calculus import cross_effect

            cc = cross_effect(f, d, tuple(pt for _ in range(d)))
            fact = 1
            for j in range(2, d + 1):
                fact *= j
            assert betti(cc.fiber, 0) == fact
            rep2 = degree_check(f, d - 1, [tuple(pt for _ in range(d))], -6, 6)
            assert rep2["failures"] != []


def test_degree_check_constant_degree0():
    ctx, pt = based_point()
    c = constant_functor(ctx, single(QQ, 0))
    rep = degree_check(c, 0, [(pt,)], -4, 4)
    assert rep["failures"] == []


# ---------------------------------------------------------------- delooping

def test_deloop_degree1_structure_fiber():
    ctx = EtaContext.pointed_over(single(QQ, 0))
    f = structure_fiber(ctx)
    rng = random.Random(4)
    samples = [
        (random_eta_object(rng, ctx), random_eta_object(rng, ctx)) for _ in range(2)
    ]
    rep = deloop_degree1(f, samples, -4, 4)
    assert rep["failures"] == []
    # both sides have the homology of the looped B
    assert rep["table"][-1] == ["1", "1"]


def test_deloop_degree1_based_trivial():
    ctx, pt = based_point()
    f = structure_fiber(ctx)
    rep = deloop_degree1(f, [(pt, pt)], -3, 3)
    assert rep["failures"] == []
    assert all(v == ["0", "0"] for v in rep["table"].values())


def test_deloop_degree1_rejects_tensor_square():
    ctx = EtaContext.pointed_over(single(QQ, 0))
    f = tensor_power(ctx, 2)
    rng = random.Random(5)
    samples = [(random_eta_object(rng, ctx), random_eta_object(rng, ctx))]
    rep = deloop_degree1(f, samples, -3, 3)
    assert "precondition_failure" in rep


def test_deloop_excisive_structure_fiber():
    ctx = EtaContext.pointed_over(single(QQ, 0))
    f = structure_fiber(ctx)
    rng = random.Random(6)
    x = random_eta_object(rng, ctx)
    for m in (1, 2, 3):
        rep = deloop_excisive(f, x, m, -4, 4)
        assert rep.get("precondition_failure") is None
        assert rep["failures"] == []


def test_deloop_excisive_aug_identity_object():
    ctx = EtaContext.pointed_over(single(QQ, 0))
    f = structure_fiber(ctx)
    x = ctx.b_object()
    rep = deloop_excisive(f, x, 1, -3, 3)
    assert rep["failures"] == []
    assert all(v == [0, 0] for v in rep["table"].values())


def test_deloop_excisive_rejects_tensor_square():
    ctx = EtaContext.pointed_over(single(QQ, 0))
    f = tensor_power(ctx, 2)
    x = ctx.zero_aug_object(single(QQ, 0))
    rep = deloop_excisive(f, x, 1, -3, 3)
    assert "precondition_failure" in rep

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from cayley_machines import groups
from cayley_machines.normal_form import (
    IDENTITY,
    INFINITE,
    NormalForm,
    canonical_split,
    decompose,
    enumerate_torsion,
    expand,
    join_split,
    nf,
    nf_consistency,
    nf_inverse,
    nf_mul,
    nf_power,
    random_form,
    reduce,
    torsion_order,
)
from cayley_machines.tree_action import GroupElem, State, XPow, ceil_half, conj, equal_at_depth, parse_word

Q8 = groups.quaternion()
D8 = groups.dihedral8()
A, B, A2 = Q8.index("a"), Q8.index("b"), Q8.index("a2")

tokens = st.one_of(
    st.builds(State, st.integers(0, 7)),
    st.builds(XPow, st.sampled_from([1, -1])),
    st.builds(GroupElem, st.integers(0, 7)),
)
words = st.lists(tokens, max_size=7).map(tuple)


def forms(G, lo=-3, hi=3):
    return st.builds(
        lambda seed: random_form(G, lo, hi, random.Random(seed)), st.integers(0, 10**9)
    )


def test_ceiling_rule_signs():
    assert [ceil_half(n) for n in (-3, -2, -1, 0, 1, 2, 3)] == [-1, -1, 0, 0, 1, 1, 2]


def test_reduce_examples(q8):
    assert reduce(q8, ()) == IDENTITY
    e = conj(2, A) + (GroupElem(B),)
    assert reduce(q8, e) == nf({0: B, 1: A2, 2: A})
    assert reduce(q8, (State(A),)) == NormalForm(1, ((0, Q8.inv(A)),))


def test_ab_versus_ba(q8):
    ab = nf_mul(q8, nf({0: A}), nf({0: B}))
    ba = nf_mul(q8, nf({0: B}), nf({0: A}))
    assert ab != ba
    assert nf_mul(q8, ba, nf({0: A2})) == ab


def test_normal_form_invariants():
    with pytest.raises(ValueError):
        NormalForm(0, ((1, A), (0, B)))
    with pytest.raises(ValueError):
        NormalForm(0, ((0, 0),))


@pytest.mark.parametrize("G", [Q8, D8], ids=["q8", "d8"])
def test_reduce_is_sound_and_idempotent(G):
    rng = random.Random(11)
    for _ in range(150):
        e = tuple(
            rng.choice([State(rng.randrange(8)), XPow(rng.choice([1, -1])), GroupElem(rng.randrange(8))])
            for _ in range(rng.randint(0, 6))
        )
        p = reduce(G, e)
        levels = [abs(l) for l in p.levels] + [abs(p.x_exp)]
        assert equal_at_depth(G, e, expand(p), max(levels) + 3)
        assert reduce(G, expand(p)) == p


@given(forms(Q8), forms(Q8))
def test_mul_matches_concatenation(p, q):
    assert nf_mul(Q8, p, q) == reduce(Q8, expand(p) + expand(q))


@given(forms(Q8), forms(Q8), forms(Q8))
def test_mul_associative(p, q, r):
    assert nf_mul(Q8, nf_mul(Q8, p, q), r) == nf_mul(Q8, p, nf_mul(Q8, q, r))


@given(forms(Q8))
def test_inverse_round_trip(p):
    assert nf_mul(Q8, p, nf_inverse(Q8, p)) == IDENTITY
    assert nf_mul(Q8, nf_inverse(Q8, p), p) == IDENTITY
    assert nf_mul(Q8, p, IDENTITY) == p


def test_inverse_examples(q8):
    assert nf_inverse(q8, IDENTITY) == IDENTITY
    assert nf_inverse(q8, nf({3: A})) == nf({3: q8.inv(A)})
    p = nf({0: A, 1: B})
    assert nf_mul(q8, p, nf_inverse(q8, p)) == IDENTITY


@given(forms(Q8, 0, 3), st.integers(-4, 6))
def test_power(p, e):
    acc = IDENTITY
    base = p if e >= 0 else nf_inverse(Q8, p)
    for _ in range(abs(e)):
        acc = nf_mul(Q8, acc, base)
    assert nf_power(Q8, p, e) == acc


def test_torsion_orders(q8):
    assert torsion_order(q8, IDENTITY) == 1
    assert torsion_order(q8, nf({0: A})) == 4
    assert torsion_order(q8, nf({}, 1)) is INFINITE
    for p in enumerate_torsion(q8, [0, 1, 2]):
        assert 16 % torsion_order(q8, p) == 0


@pytest.mark.parametrize("n", [-3, -1, 0, 2, 3])
def test_commutators_central_in_n(q8, n):
    for g, h in itertools.product(range(8), repeat=2):
        z = nf({n: q8.commutator(g, h)})
        for m in range(-3, 4):
            for f in range(1, 8):
                y = nf({m: f})
                assert nf_mul(q8, z, y) == nf_mul(q8, y, z)


def test_relation_sides_reduce_equal(q8):
    from cayley_machines.tree_action import commutator_word

    for m, n in itertools.product(range(-2, 3), repeat=2):
        for gj, gi in itertools.product(range(8), repeat=2):
            lhs = reduce(q8, commutator_word(q8, conj(m, gj), conj(n, gi)))
            assert lhs == nf({ceil_half(n + m): q8.commutator(gj, gi)})


def test_split_examples(q8):
    s = canonical_split(q8, IDENTITY)
    assert (s.a_part, s.b_part, s.c_part) == ((), (), ())
    s = canonical_split(q8, nf({0: q8.index("ab")}))
    assert (s.a_part, s.b_part, s.c_part) == (((0, 1),), (0,), ())
    s = canonical_split(q8, nf({1: q8.index("a3")}))
    assert (s.a_part, s.b_part, s.c_part) == (((1, 1),), (), (1,))


@pytest.mark.parametrize("G", [Q8, groups.modular(3), groups.modular(4)], ids=["q8", "m8", "m16"])
def test_split_round_trip(G):
    rng = random.Random(5)
    a = G.index("a")
    half = G.order_of(a) // 2
    for _ in range(200):
        p = random_form(G, -2, 2, rng, x_range=0)
        s = canonical_split(G, p)
        assert join_split(G, s) == p
        assert all(1 <= e < half for _, e in s.a_part)
        assert list(s.b_part) == sorted(set(s.b_part))
    for g in range(G.size):
        s, e, delta = decompose(G, g)
        assert 0 <= s < half


def test_split_rejects_other_groups():
    with pytest.raises(groups.GroupError):
        canonical_split(groups.cyclic(4), IDENTITY)


def test_reduce_refuses_bad_groups():
    perms = list(itertools.permutations(range(3)))
    idx = {p: i for i, p in enumerate(perms)}
    table = [[idx[tuple(p[q[i]] for i in range(3))] for q in perms] for p in perms]
    S3 = groups.from_table([str(p) for p in perms], table)
    with pytest.raises(groups.HypothesisError):
        reduce(S3, ())


def test_consistency_small_sample(q8):
    gens = ["x", "x^-1", "g:a", "g:b"]
    sample = [parse_word(q8, " ".join(w)) for n in range(4) for w in itertools.product(gens, repeat=n)]
    r = nf_consistency(q8, sample, 8)
    assert r["passed"] and r["words"] == 85


def test_json_round_trip(q8):
    p = nf({-2: A, 3: B}, x_exp=-4)
    assert NormalForm.from_json(q8, p.to_json(q8)) == p
    assert p.to_json(q8) == {"x_exp": -4, "factors": [[-2, "a"], [3, "b"]]}

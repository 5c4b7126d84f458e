import itertools

import pytest
from hypothesis import given, strategies as st

from cayley_machines import groups, mealy


def test_cayley_machine_c2_by_hand(c2):
    M = mealy.cayley_machine(c2)
    # state 1 reading 1 stays at 1 and writes 1; state c reading c goes to 1 and writes 1
    assert M.step(0, 0) == (0, 0)
    assert M.step(1, 1) == (0, 0)
    assert M.step(1, 0) == (1, 1)
    # fold of (q o ab) = (q o a)(qa o b) by hand from state c on 1,1,1
    assert mealy.act_word(M, 1, [0, 0, 0]) == [1, 1, 1]
    assert mealy.act_word(M, 1, [1, 1, 1]) == [0, 1, 0]


def test_machine_shapes(q8):
    M = mealy.cayley_machine(q8)
    assert M.transition == q8.table == M.output and M.invertible
    T = mealy.cayley_machine(groups.cyclic(1))
    assert T.states == ("1",) and mealy.act_word(T, 0, [0, 0]) == [0, 0]


def test_reset_automaton(q8):
    A = mealy.reset_automaton(q8)
    assert A.output[0] == tuple(range(8))
    a, b = q8.index("a"), q8.index("b")
    assert q8.names[A.output[a][b]] == "a3b"
    assert all(len(set(col)) == 1 for col in zip(*A.transition))
    w = [b, a, a]
    out = mealy.act_word(A, a, w)
    assert out[0] == q8.mul(q8.inv(a), w[0])


def test_act_word_errors_and_empty(q8):
    M = mealy.cayley_machine(q8)
    assert mealy.act_word(M, 3, []) == []
    with pytest.raises(ValueError):
        mealy.act_word(M, 0, [8])


@pytest.mark.parametrize("name", ["c2", "q8", "d8"])
def test_inverse_of_cayley_is_reset_exhaustively(name):
    G = groups.build_group(name)
    C, A = mealy.cayley_machine(G), mealy.reset_automaton(G)
    Ci = mealy.invert(C)
    for w in itertools.product(range(G.size), repeat=3):
        for g in range(G.size):
            img = mealy.act_word(C, g, w)
            assert mealy.act_word(A, g, img) == list(w)
            assert mealy.act_word(Ci, g, w) == mealy.act_word(A, g, w)


def test_invert_identity_and_non_invertible():
    I = mealy.identity_machine(["0", "1"])
    assert mealy.invert(I) == I
    bad = mealy.MealyMachine(("q",), ("0", "1"), ((0, 0),), ((0, 0),))
    assert not bad.invertible
    with pytest.raises(mealy.NotInvertibleError):
        mealy.invert(bad)


words = st.lists(st.integers(0, 7), max_size=8)


@given(st.integers(0, 7), words, words)
def test_prefix_property_and_length(q, u, v):
    G = groups.quaternion()
    for M in (mealy.cayley_machine(G), mealy.reset_automaton(G)):
        full = mealy.act_word(M, q, u + v)
        assert len(full) == len(u + v)
        assert full[: len(u)] == mealy.act_word(M, q, u)


@given(st.integers(0, 7), st.lists(st.integers(0, 7), max_size=6))
def test_cayley_then_reset_is_identity(q, w):
    G = groups.quaternion()
    C, A = mealy.cayley_machine(G), mealy.reset_automaton(G)
    assert mealy.act_word(A, q, mealy.act_word(C, q, w)) == w


def test_json_round_trip(q8):
    M = mealy.reset_automaton(q8)
    assert mealy.MealyMachine.from_json(M.to_json()) == M


def test_dot_export():
    I = mealy.identity_machine(["0", "1", "2"])
    dot = mealy.export_dot(I)
    assert dot.count(" -> ") == 3 and dot.count("[label=") == 4
    C2 = mealy.export_dot(mealy.cayley_machine(groups.cyclic(2)))
    nodes = [l for l in C2.splitlines() if l.strip().startswith("q") and "->" not in l]
    assert C2.count(" -> ") == 4 and len(nodes) == 2
    G = groups.quaternion()
    dot = mealy.export_dot(mealy.reset_automaton(G))
    edges = [l for l in dot.splitlines() if " -> " in l]
    assert len(edges) == 64
    for line in edges:
        target = int(line.split("-> q")[1].split()[0])
        letter = line.split('label="')[1].split("/")[0]
        assert G.names[target] == letter
    assert dot == mealy.export_dot(mealy.reset_automaton(G))

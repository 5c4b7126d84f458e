import itertools

import numpy as np
import pytest

from cayley_machines import groups
from cayley_machines.groups import GroupError, HypothesisError


def quaternion_units():
    """Q8 as 2x2 complex matrices, independent of the table constructor."""
    one = np.eye(2, dtype=complex)
    i = np.array([[1j, 0], [0, -1j]])
    j = np.array([[0, 1], [-1, 0]], dtype=complex)
    return one, i, j


def test_q8_table_matches_matrix_model(q8):
    one, i, j = quaternion_units()
    mats = {}
    for s in range(4):
        for e in range(2):
            m = np.linalg.matrix_power(i, s) @ np.linalg.matrix_power(j, e)
            name = ("a" if s == 1 else f"a{s}" if s else "") + ("b" if e else "") or "1"
            mats[q8.index(name)] = m
    for x, y in itertools.product(range(8), repeat=2):
        assert np.allclose(mats[x] @ mats[y], mats[q8.mul(x, y)])


def test_q8_named_facts(q8):
    a, b, a2 = q8.index("a"), q8.index("b"), q8.index("a2")
    assert q8.power(a, 4) == 0
    assert q8.mul(a, a) == a2 and q8.mul(b, b) == a2
    assert q8.commutator(a, b) == a2


def test_modular_relation_and_commutator():
    for n in (3, 4, 5):
        G = groups.modular(n)
        a, b = G.index("a"), G.index("b")
        r = 2 ** (n - 2) + 1
        assert G.size == 2**n
        assert G.mul(G.mul(b, a), G.inv(b)) == G.power(a, r)
        assert G.commutator(a, b) == G.power(a, 2 ** (n - 2))
    M8 = groups.modular(3)
    assert M8.names[M8.mul(M8.index("b"), M8.index("a"))] == "a3b"


def test_modular_rejects_small_n():
    with pytest.raises(GroupError):
        groups.modular(2)


def test_trivial_group():
    G = groups.cyclic(1)
    assert G.size == 1 and G.names == ("1",)


@pytest.mark.parametrize(
    "table",
    [
        [[0, 1], [1, 1]],  # no inverse for the second element
        [[1, 0], [0, 1]],  # identity not at index 0
        [[0, 1, 2], [1, 2, 0], [2, 1, 0]],  # not associative / latin
    ],
)
def test_invalid_tables_rejected(table):
    with pytest.raises(GroupError):
        groups.from_table([str(i) for i in range(len(table))], table)


def test_non_associative_latin_square_rejected():
    # a loop of order 5 that is not a group
    t = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(GroupError, match="associativity"):
        groups.from_table(list("01234"), t)


def test_build_group_specs(tmp_path):
    assert groups.build_group({"kind": "named", "name": "q8"}).size == 8
    assert groups.build_group({"kind": "modular", "n": 4}).size == 16
    assert groups.build_group({"kind": "product", "factors": ["c2", "q8"]}).size == 16
    data = groups.quaternion().to_json()
    path = tmp_path / "g.json"
    import json

    path.write_text(json.dumps(data))
    G = groups.build_group(str(path))
    assert G.table == groups.quaternion().table
    with pytest.raises(GroupError):
        groups.build_group("m12")


def test_structural_reports():
    q = groups.structural_report(groups.quaternion())
    assert q["center_names"] == ["1", "a2"] and q["nilpotency_class"] == 2 and q["squares_central"]
    c = groups.structural_report(groups.cyclic(4))
    assert c["nilpotency_class"] == 1 and c["squares_central"] and c["abelian"]
    m = groups.structural_report(groups.modular(4))
    assert m["center_names"] == ["1", "a2", "a4", "a6"] and m["nilpotency_class"] == 2
    for n in (3, 4, 5):
        G = groups.modular(n)
        assert groups.nilpotency_class(G) == 2 and groups.squares_central(G)


def test_non_nilpotent_group_has_no_class():
    # S3 from permutations
    perms = list(itertools.permutations(range(3)))
    idx = {p: i for i, p in enumerate(perms)}
    table = [[idx[tuple(p[q[i]] for i in range(3))] for q in perms] for p in perms]
    G = groups.from_table([str(p) for p in perms], table)
    assert groups.nilpotency_class(G) is None
    with pytest.raises(HypothesisError):
        groups.check_presentation_hypothesis(G)


def test_central_squares_subgroup():
    for G in (groups.quaternion(), groups.dihedral8(), groups.direct_product(groups.cyclic(2), groups.quaternion())):
        assert groups.central_squares_subgroup(G) == frozenset(range(G.size))
    with pytest.raises(HypothesisError):
        groups.central_squares_subgroup(groups.cyclic(4))


def heisenberg_mod4():
    elems = list(itertools.product(range(4), repeat=3))
    pos = {el: i for i, el in enumerate(elems)}

    def mul(x, y):
        return ((x[0] + y[0]) % 4, (x[1] + y[1]) % 4, (x[2] + y[2] + x[0] * y[1]) % 4)

    table = [[pos[mul(x, y)] for y in elems] for x in elems]
    return groups.from_table(["".join(map(str, el)) for el in elems], table, "H4")


def test_central_squares_subgroup_for_group_with_noncentral_square():
    G = heisenberg_mod4()
    assert groups.nilpotency_class(G) == 2
    assert not groups.squares_central(G)
    H = sorted(groups.central_squares_subgroup(G))
    assert len(H) < G.size
    assert groups.generated_subgroup(G, H) == frozenset(H)
    for g in H:
        sq = G.mul(g, g)
        assert all(G.mul(sq, h) == G.mul(h, sq) for h in H)


@pytest.mark.parametrize("name", ["q8", "d8", "m16", "m32"])
def test_commutator_laws_in_class_two(name):
    G = groups.build_group(name)
    z = groups.center(G)
    for g in range(G.size):
        for h in range(G.size):
            c = G.commutator(g, h)
            assert G.mul(c, G.commutator(h, g)) == 0
            assert c in z
    for c in z:
        assert all(G.commutator(c, g) == 0 for g in range(G.size))

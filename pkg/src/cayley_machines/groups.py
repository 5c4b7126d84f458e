"""Finite groups stored as complete multiplication tables.

Elements are dense integer indices; index 0 is always the identity.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Sequence

import numpy as np


class GroupError(ValueError):
    """Raised for invalid tables or unsupported group specifications."""


class HypothesisError(GroupError):
    """A group fails a structural hypothesis an operation depends on."""


@dataclass(frozen=True, eq=False)
class GroupTable:
    names: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    label: str = "G"

    def __post_init__(self):
        _validate(self.names, self.table)

    @property
    def size(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def __repr__(self) -> str:
        return f"GroupTable({self.label}, order={self.size})"

    @cached_property
    def inverse(self) -> tuple[int, ...]:
        return tuple(row.index(0) for row in self.table)

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.array(self.table, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def inverse_array(self) -> np.ndarray:
        arr = np.array(self.inverse, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise GroupError(f"unknown element {name!r} in {self.label}") from None

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inv(self, i: int) -> int:
        return self.inverse[i]

    def product(self, elements: Sequence[int]) -> int:
        out = 0
        for g in elements:
            out = self.table[out][g]
        return out

    def power(self, g: int, e: int) -> int:
        if e < 0:
            g, e = self.inverse[g], -e
        out = 0
        for _ in range(e):
            out = self.table[out][g]
        return out

    def order_of(self, g: int) -> int:
        n, h = 1, g
        while h != 0:
            h = self.table[h][g]
            n += 1
        return n

    def commutator(self, i: int, j: int) -> int:
        """Return ``[g_i, g_j] = g_i^-1 g_j^-1 g_i g_j``.

        The argument order follows the left-inverse convention, so
        ``commutator(i, j)`` is the inverse of ``commutator(j, i)``.
        """
        t, inv = self.table, self.inverse
        return t[t[t[inv[i]][inv[j]]][i]][j]

    def to_json(self) -> dict[str, Any]:
        return {"kind": "table", "names": list(self.names), "table": [list(r) for r in self.table]}


def _validate(names: Sequence[str], table: Sequence[Sequence[int]]) -> None:
    k = len(names)
    if k == 0:
        raise GroupError("a group needs at least one element")
    if len(set(names)) != k:
        raise GroupError("element names must be distinct")
    if len(table) != k or any(len(row) != k for row in table):
        raise GroupError(f"table must be {k}x{k}")
    for row in table:
        for v in row:
            if not (isinstance(v, (int, np.integer)) and 0 <= v < k):
                raise GroupError(f"table entry {v!r} out of range")
    for i in range(k):
        if table[0][i] != i or table[i][0] != i:
            raise GroupError("index 0 must be a two-sided identity")
    for i in range(k):
        right = [j for j in range(k) if table[i][j] == 0]
        if len(right) != 1 or table[right[0]][i] != 0:
            raise GroupError(f"element {names[i]!r} has no unique two-sided inverse")
    t = np.asarray(table, dtype=np.int64)
    lhs = t[t]
    rhs = t[np.arange(k)[:, None, None], t[None, :, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        i, j, l = bad[0]
        raise GroupError(f"associativity fails at ({names[i]}, {names[j]}, {names[l]})")


def from_table(names: Sequence[str], table: Sequence[Sequence[int]], label: str = "G") -> GroupTable:
    return GroupTable(tuple(str(n) for n in names), tuple(tuple(int(v) for v in row) for row in table), label)


def _power_name(sym: str, e: int) -> str:
    if e == 0:
        return ""
    return sym if e == 1 else f"{sym}{e}"


def _metacyclic(order_a: int, r: int, b_square: int, label: str) -> GroupTable:
    """Group of normal words a^s b^e with b a b^-1 = a^r and b^2 = a^b_square."""
    elems = [(s, e) for e in (0, 1) for s in range(order_a)]
    pos = {el: i for i, el in enumerate(elems)}

    def mul(x, y):
        (s, e), (t, f) = x, y
        s2 = s + (r if e else 1) * t
        if e and f:
            return ((s2 + b_square) % order_a, 0)
        return (s2 % order_a, e + f)

    names = [(_power_name("a", s) + ("b" if e else "")) or "1" for s, e in elems]
    table = [[pos[mul(x, y)] for y in elems] for x in elems]
    return from_table(names, table, label)


def quaternion() -> GroupTable:
    """Q8 with a^4 = 1, a^2 = b^2 and b^-1 a b = a^-1."""
    return _metacyclic(4, 3, 2, "Q8")


def dihedral8() -> GroupTable:
    return _metacyclic(4, 3, 0, "D8")


def modular(n: int) -> GroupTable:
    """The modular group M_{2^n}: a^(2^(n-1)) = b^2 = 1, b a b^-1 = a^(2^(n-2)+1)."""
    if n < 3:
        raise GroupError(f"modular group needs n >= 3, got {n}")
    return _metacyclic(2 ** (n - 1), 2 ** (n - 2) + 1, 0, f"M{2 ** n}")


def cyclic(m: int) -> GroupTable:
    if m < 1:
        raise GroupError("cyclic group order must be positive")
    names = ["1"] + [_power_name("c", s) for s in range(1, m)]
    table = [[(i + j) % m for j in range(m)] for i in range(m)]
    return from_table(names, table, f"C{m}")


def direct_product(*factors: GroupTable) -> GroupTable:
    if not factors:
        return cyclic(1)
    elems = list(itertools.product(*(range(f.size) for f in factors)))
    pos = {el: i for i, el in enumerate(elems)}
    names = ["(" + ",".join(f.names[i] for f, i in zip(factors, el)) + ")" for el in elems]
    table = [
        [pos[tuple(f.table[a][b] for f, a, b in zip(factors, x, y))] for y in elems]
        for x in elems
    ]
    return from_table(names, table, "x".join(f.label for f in factors))


_NAMED = {"q8": quaternion, "d8": dihedral8}


def build_group(source: Any) -> GroupTable:
    """Build a group from a JSON-style source, a short name, or a path to a JSON file.

    Short names: ``q8``, ``d8``, ``cN`` (cyclic), ``mN`` (modular of order N).
    """
    if isinstance(source, GroupTable):
        return source
    if isinstance(source, str):
        key = source.strip().lower()
        if key in _NAMED:
            return _NAMED[key]()
        if key[:1] == "c" and key[1:].isdigit():
            return cyclic(int(key[1:]))
        if key[:1] == "m" and key[1:].isdigit():
            order = int(key[1:])
            n = order.bit_length() - 1
            if order != 2 ** n:
                raise GroupError(f"modular group order must be a power of 2, got {order}")
            return modular(n)
        path = Path(source)
        if path.suffix == ".json" and path.exists():
            return build_group(json.loads(path.read_text()))
        raise GroupError(f"unknown group source {source!r}")
    if not isinstance(source, dict) or "kind" not in source:
        raise GroupError(f"malformed group source {source!r}")
    kind = source["kind"]
    if kind == "named":
        return build_group(str(source["name"]))
    if kind == "modular":
        return modular(int(source["n"]))
    if kind == "cyclic":
        return cyclic(int(source["m"]))
    if kind == "product":
        return direct_product(*(build_group(f) for f in source["factors"]))
    if kind == "table":
        return from_table(source["names"], source["table"], source.get("label", "G"))
    raise GroupError(f"unknown group kind {kind!r}")


def center(G: GroupTable) -> frozenset[int]:
    t = G.table
    return frozenset(z for z in range(G.size) if all(t[z][g] == t[g][z] for g in range(G.size)))


def upper_central_series(G: GroupTable) -> list[frozenset[int]]:
    """Z_0 = 1 < Z_1 < ... until the series stabilizes."""
    series = [frozenset({0})]
    while True:
        prev = series[-1]
        nxt = frozenset(
            g for g in range(G.size) if all(G.commutator(g, h) in prev for h in range(G.size))
        )
        if nxt == prev:
            return series
        series.append(nxt)


def nilpotency_class(G: GroupTable) -> int | None:
    series = upper_central_series(G)
    if len(series[-1]) != G.size:
        return None
    return len(series) - 1


def squares_central(G: GroupTable, subset: Sequence[int] | None = None) -> bool:
    elems = range(G.size) if subset is None else subset
    t = G.table
    for g in elems:
        sq = t[g][g]
        if any(t[sq][h] != t[h][sq] for h in elems):
            return False
    return True


def is_abelian(G: GroupTable) -> bool:
    t = G.table
    return all(t[i][j] == t[j][i] for i in range(G.size) for j in range(i))


def structural_report(G: GroupTable) -> dict[str, Any]:
    z = center(G)
    return {
        "order": G.size,
        "center": sorted(z),
        "center_names": [G.names[i] for i in sorted(z)],
        "nilpotency_class": nilpotency_class(G),
        "squares_central": squares_central(G),
        "abelian": is_abelian(G),
    }


def check_presentation_hypothesis(G: GroupTable) -> None:
    """Raise unless G has nilpotency class at most 2 and every square is central."""
    cls = nilpotency_class(G)
    if cls is None or cls > 2:
        raise HypothesisError(f"{G.label} is not nilpotent of class <= 2 (class={cls})")
    if not squares_central(G):
        raise HypothesisError(f"{G.label} has a non-central square")


def generated_subgroup(G: GroupTable, gens: Sequence[int]) -> frozenset[int]:
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                p = G.table[h][g]
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
        frontier = nxt
    return frozenset(seen)


def derived_elements(G: GroupTable) -> frozenset[int]:
    """The commutator subgroup [G, G]."""
    comms = {G.commutator(g, h) for g in range(G.size) for h in range(G.size)}
    return generated_subgroup(G, sorted(comms))


def central_squares_subgroup(G: GroupTable) -> frozenset[int]:
    """A subgroup in which every square is central.

    Returns the whole group when it already qualifies; otherwise builds
    <g, h> with g non-central, g^2 central, and h not commuting with g
    while h^2 does.
    """
    if nilpotency_class(G) != 2:
        raise HypothesisError(f"{G.label} is not nilpotent of class 2")
    if squares_central(G):
        return frozenset(range(G.size))
    t = G.table
    z = center(G)
    for g in range(G.size):
        if g in z or t[g][g] not in z:
            continue
        for h in range(G.size):
            if t[g][h] == t[h][g]:
                continue
            hh = t[h][h]
            if t[hh][g] != t[g][hh]:
                continue
            H = generated_subgroup(G, [g, h])
            if squares_central(G, sorted(H)):
                return H
    raise HypothesisError(f"no subgroup with central squares found in {G.label}")

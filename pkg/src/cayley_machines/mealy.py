"""Mealy automata over finite alphabets, and the two machines built from a group.

A machine stores its transition and output functions as dense index tables:
``transition[q][a]`` is the next state and ``output[q][a]`` the emitted
letter when state ``q`` reads letter ``a``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .groups import GroupTable


class NotInvertibleError(ValueError):
    pass


@dataclass(frozen=True)
class MealyMachine:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    transition: tuple[tuple[int, ...], ...]
    output: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        nq, na = len(self.states), len(self.alphabet)
        for name, tab, bound in (("transition", self.transition, nq), ("output", self.output, na)):
            if len(tab) != nq or any(len(row) != na for row in tab):
                raise ValueError(f"{name} table must be {nq}x{na}")
            if any(not 0 <= v < bound for row in tab for v in row):
                raise ValueError(f"{name} table has an out-of-range entry")

    @property
    def invertible(self) -> bool:
        n = len(self.alphabet)
        return all(sorted(row) == list(range(n)) for row in self.output)

    def step(self, q: int, a: int) -> tuple[int, int]:
        return self.transition[q][a], self.output[q][a]

    def to_json(self) -> dict[str, Any]:
        return {
            "states": list(self.states),
            "alphabet": list(self.alphabet),
            "transition": [list(r) for r in self.transition],
            "output": [list(r) for r in self.output],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "MealyMachine":
        return cls(
            tuple(data["states"]),
            tuple(data["alphabet"]),
            tuple(tuple(r) for r in data["transition"]),
            tuple(tuple(r) for r in data["output"]),
        )


def cayley_machine(G: GroupTable) -> MealyMachine:
    """States and letters are G; state g0 reading g moves to g0*g and writes g0*g."""
    t = G.table
    return MealyMachine(G.names, G.names, t, t)


def reset_automaton(G: GroupTable) -> MealyMachine:
    """State g0 reading g moves to g and writes g0^-1 * g."""
    t, inv = G.table, G.inverse
    k = G.size
    transition = tuple(tuple(range(k)) for _ in range(k))
    output = tuple(tuple(t[inv[g0]][g] for g in range(k)) for g0 in range(k))
    return MealyMachine(G.names, G.names, transition, output)


def act_word(M: MealyMachine, q: int, word: Iterable[int]) -> list[int]:
    """Image of ``word`` under the initial automaton at state ``q``."""
    n = len(M.alphabet)
    trans, out = M.transition, M.output
    result = []
    for a in word:
        if not 0 <= a < n:
            raise ValueError(f"letter {a!r} not in alphabet of size {n}")
        result.append(out[q][a])
        q = trans[q][a]
    return result


def invert(M: MealyMachine) -> MealyMachine:
    """The inverse machine: its state q undoes state q of ``M``.

    Reading letter b at q, the inverse writes a = lambda_q^-1(b) and moves to
    delta(q, a), so it tracks the same state sequence as ``M``.
    """
    if not M.invertible:
        raise NotInvertibleError("output function is not a permutation at every state")
    n = len(M.alphabet)
    transition, output = [], []
    for q in range(len(M.states)):
        pre = [0] * n
        for a, b in enumerate(M.output[q]):
            pre[b] = a
        output.append(tuple(pre))
        transition.append(tuple(M.transition[q][pre[b]] for b in range(n)))
    return MealyMachine(M.states, M.alphabet, tuple(transition), tuple(output))


def identity_machine(alphabet: Sequence[str]) -> MealyMachine:
    n = len(alphabet)
    return MealyMachine(("id",), tuple(alphabet), (tuple([0] * n),), (tuple(range(n)),))


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', r"\"") + '"'


def export_dot(M: MealyMachine, name: str = "machine") -> str:
    """Graphviz description: one node per state, one ``in/out`` edge per (state, letter)."""
    lines = [f"digraph {_dot_quote(name)} {{", "  rankdir=LR;"]
    for i, s in enumerate(M.states):
        lines.append(f"  q{i} [label={_dot_quote(s)}];")
    for q in range(len(M.states)):
        for a in range(len(M.alphabet)):
            label = f"{M.alphabet[a]}/{M.alphabet[M.output[q][a]]}"
            lines.append(f"  q{q} -> q{M.transition[q][a]} [label={_dot_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"

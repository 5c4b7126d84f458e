"""Normal forms for the automata group of a class-2 group with central squares.

A :class:`NormalForm` stands for

    (x^{n_1} f_1 x^{-n_1}) (x^{n_2} f_2 x^{-n_2}) ... (x^{n_r} f_r x^{-n_r}) x^{x_exp}

with n_1 < n_2 < ... < n_r and every f_i nontrivial.  Products compose as
functions, so ``x^{x_exp}`` is applied to a word before the conjugates.

Reduction moves every x to the right, then sorts the conjugates by level
with adjacent swaps

    (n, g)(m, h) = (m, h) (c, [h, g^-1]) (n, g),   c = ceil((n+m)/2),  n > m,

collecting the central corrections (c, [h, g^-1]) separately.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .groups import GroupError, GroupTable, check_presentation_hypothesis, derived_elements
from .tree_action import (
    ElementWord,
    GroupElem,
    State,
    Token,
    XPow,
    ceil_half,
    conj,
    equal_at_depth,
    xpow,
)


class Infinite:
    def __repr__(self):
        return "Infinite"


INFINITE = Infinite()


@dataclass(frozen=True)
class NormalForm:
    x_exp: int = 0
    factors: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        levels = [lvl for lvl, _ in self.factors]
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError(f"levels must be strictly increasing: {levels}")
        if any(g == 0 for _, g in self.factors):
            raise ValueError("factors must be nontrivial")

    @property
    def is_torsion(self) -> bool:
        return self.x_exp == 0

    @property
    def is_identity(self) -> bool:
        return self.x_exp == 0 and not self.factors

    @property
    def levels(self) -> list[int]:
        return [lvl for lvl, _ in self.factors]

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def to_json(self, G: GroupTable) -> dict:
        return {"x_exp": self.x_exp, "factors": [[lvl, G.names[g]] for lvl, g in self.factors]}

    @classmethod
    def from_json(cls, G: GroupTable, data: dict) -> "NormalForm":
        return cls(int(data["x_exp"]), tuple((int(l), G.index(n)) for l, n in data["factors"]))


IDENTITY = NormalForm()


def nf(factors: dict[int, int] | Iterable[tuple[int, int]] = (), x_exp: int = 0) -> NormalForm:
    items = factors.items() if isinstance(factors, dict) else factors
    return NormalForm(x_exp, tuple(sorted((l, g) for l, g in items if g != 0)))


class Rewriter:
    """Sorts level-tagged factors using the exchange rule; one per group."""

    def __init__(self, G: GroupTable):
        check_presentation_hypothesis(G)
        self.G = G

    def sort(self, factors: Sequence[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
        G = self.G
        t, inv = G.table, G.inverse
        items = [f for f in factors if f[1] != 0]
        corrections: dict[int, int] = {}
        # bubble sort by level; each swap emits a central correction
        n = len(items)
        for end in range(n - 1, 0, -1):
            swapped = False
            for i in range(end):
                (lg, g), (lh, h) = items[i], items[i + 1]
                if lg > lh:
                    items[i], items[i + 1] = items[i + 1], items[i]
                    z = G.commutator(h, inv[g])
                    if z:
                        c = ceil_half(lg + lh)
                        corrections[c] = t[corrections.get(c, 0)][z]
                    swapped = True
            if not swapped:
                break
        merged: dict[int, int] = {}
        for lvl, g in items:
            merged[lvl] = t[merged.get(lvl, 0)][g]
        for lvl, z in corrections.items():
            merged[lvl] = t[merged.get(lvl, 0)][z]
        return tuple(sorted((l, g) for l, g in merged.items() if g != 0))

    def from_tokens(self, e: Sequence[Token]) -> NormalForm:
        inv = self.G.inverse
        running = 0
        raw: list[tuple[int, int]] = []
        for tok in e:
            if isinstance(tok, XPow):
                running += tok.e
            elif isinstance(tok, GroupElem):
                raw.append((running, tok.g))
            elif isinstance(tok, State):
                raw.append((running, inv[tok.g]))
                running += 1
            else:
                raise TypeError(f"not a token: {tok!r}")
        return NormalForm(running, self.sort(raw))

    def mul(self, p: NormalForm, q: NormalForm) -> NormalForm:
        shifted = [(l + p.x_exp, g) for l, g in q.factors]
        return NormalForm(p.x_exp + q.x_exp, self.sort(list(p.factors) + shifted))

    def inverse(self, p: NormalForm) -> NormalForm:
        inv = self.G.inverse
        # (P x^e)^-1 = x^-e P^-1 = (x^-e P^-1 x^e) x^-e
        raw = [(l - p.x_exp, inv[g]) for l, g in reversed(p.factors)]
        return NormalForm(-p.x_exp, self.sort(raw))

    def power(self, p: NormalForm, e: int) -> NormalForm:
        if e < 0:
            p, e = self.inverse(p), -e
        out, base = IDENTITY, p
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out


_REWRITERS: dict[int, tuple[GroupTable, Rewriter]] = {}


def rewriter(G: GroupTable) -> Rewriter:
    hit = _REWRITERS.get(id(G))
    if hit is None or hit[0] is not G:
        hit = (G, Rewriter(G))
        _REWRITERS[id(G)] = hit
    return hit[1]


def reduce(G: GroupTable, e: Sequence[Token]) -> NormalForm:
    return rewriter(G).from_tokens(e)


def nf_mul(G: GroupTable, p: NormalForm, q: NormalForm) -> NormalForm:
    return rewriter(G).mul(p, q)


def nf_inverse(G: GroupTable, p: NormalForm) -> NormalForm:
    return rewriter(G).inverse(p)


def nf_power(G: GroupTable, p: NormalForm, e: int) -> NormalForm:
    return rewriter(G).power(p, e)


def expand(p: NormalForm) -> ElementWord:
    """An element word representing ``p``."""
    out: tuple = ()
    for lvl, g in p.factors:
        out += conj(lvl, g)
    return out + xpow(p.x_exp)


def torsion_order(G: GroupTable, p: NormalForm) -> Union[int, Infinite]:
    if p.x_exp != 0:
        return INFINITE
    rw = rewriter(G)
    acc = p
    for m in range(1, 2 * G.size + 1):
        if acc.is_identity:
            return m
        acc = rw.mul(acc, p)
    raise AssertionError(f"torsion element of order exceeding {2 * G.size}: {p}")


# ------------------------------------------------------------ canonical split

@dataclass(frozen=True)
class SplitForm:
    """a-part (level, exponent), b-part levels, commutator-part levels, in that product order."""

    a_part: tuple[tuple[int, int], ...]
    b_part: tuple[int, ...]
    c_part: tuple[int, ...]

    def to_json(self) -> dict:
        return {"a": [list(x) for x in self.a_part], "b": list(self.b_part), "commutator": list(self.c_part)}


def _ab_basis(G: GroupTable) -> tuple[int, int, int, int]:
    """Return (a, b, c, reduced a-order) for a two-generator metacyclic group named a^s b^e."""
    try:
        a, b = G.index("a"), G.index("b")
    except GroupError:
        raise GroupError(f"canonical split needs a group with generators named a, b; got {G.label}") from None
    c = G.commutator(a, b)
    order_a = G.order_of(a)
    order_c = G.order_of(c)
    if c == 0 or G.power(a, order_a // order_c) != c or order_c != 2:
        raise GroupError(f"canonical split supports Q8 and modular groups only; got {G.label}")
    if len({G.power(a, s) for s in range(order_a)} | {G.mul(G.power(a, s), b) for s in range(order_a)}) != G.size:
        raise GroupError(f"{G.label} is not covered by words a^s b^e")
    return a, b, c, order_a // 2


def decompose(G: GroupTable, g: int) -> tuple[int, int, int]:
    """Unique (s, e, delta) with g = a^s b^e c^delta, 0 <= s < ord(a)/2, where c = [a, b]."""
    a, b, c, half = _ab_basis(G)
    for delta in (0, 1):
        for e in (0, 1):
            for s in range(half):
                w = G.product([G.power(a, s)] + ([b] if e else []) + ([c] if delta else []))
                if w == g:
                    return s, e, delta
    raise GroupError(f"cannot decompose {G.names[g]}")


def canonical_split(G: GroupTable, p: NormalForm) -> SplitForm:
    if p.x_exp != 0:
        raise ValueError("canonical split applies to torsion elements only")
    a, b, c, _ = _ab_basis(G)
    rw = rewriter(G)
    a_part, b_part = [], []
    for lvl, g in p.factors:
        s, e, _ = decompose(G, g)
        if s:
            a_part.append((lvl, s))
        if e:
            b_part.append(lvl)
    ab = rw.mul(
        NormalForm(0, rw.sort([(l, G.power(a, s)) for l, s in a_part])),
        NormalForm(0, rw.sort([(l, b) for l in b_part])),
    )
    rest = rw.mul(rw.inverse(ab), p)
    if any(g != c for _, g in rest.factors):
        raise AssertionError(f"remainder is not a product of commutator conjugates: {rest}")
    return SplitForm(tuple(a_part), tuple(b_part), tuple(rest.levels))


def join_split(G: GroupTable, split: SplitForm) -> NormalForm:
    a, b, c, _ = _ab_basis(G)
    rw = rewriter(G)
    out = IDENTITY
    for lvl, s in split.a_part:
        out = rw.mul(out, nf({lvl: G.power(a, s)}))
    for lvl in split.b_part:
        out = rw.mul(out, nf({lvl: b}))
    for lvl in split.c_part:
        out = rw.mul(out, nf({lvl: c}))
    return out


# --------------------------------------------------------------- enumeration

def enumerate_torsion(G: GroupTable, levels: Sequence[int]) -> Iterable[NormalForm]:
    """Every torsion normal form supported on ``levels`` (|G|^len(levels) of them)."""
    import itertools

    levels = sorted(levels)
    for combo in itertools.product(range(G.size), repeat=len(levels)):
        yield NormalForm(0, tuple((l, g) for l, g in zip(levels, combo) if g))


def random_torsion(G: GroupTable, lo: int, hi: int, rng: random.Random) -> NormalForm:
    return NormalForm(0, tuple((l, g) for l in range(lo, hi + 1) if (g := rng.randrange(G.size))))


def random_form(G: GroupTable, lo: int, hi: int, rng: random.Random, x_range: int = 3) -> NormalForm:
    p = random_torsion(G, lo, hi, rng)
    return NormalForm(rng.randint(-x_range, x_range), p.factors)


# ---------------------------------------------------------- consistency check

def nf_consistency(G: GroupTable, sample: Iterable[ElementWord], d: int) -> dict:
    """Cross-check reduction against the tree action.

    Each word must act like the expansion of its normal form on words of
    length ``d``; words with different normal forms must act differently.
    """
    forms: dict[NormalForm, ElementWord] = {}
    unsound, collisions, count = [], [], 0
    for e in sample:
        count += 1
        p = reduce(G, e)
        if not equal_at_depth(G, e, expand(p), d):
            unsound.append(e)
        forms.setdefault(p, expand(p))
    items = list(forms.items())
    for i in range(len(items)):
        for j in range(i):
            if equal_at_depth(G, items[i][1], items[j][1], d):
                collisions.append((items[i][0], items[j][0]))
    return {
        "words": count,
        "distinct_forms": len(forms),
        "unsound": len(unsound),
        "collisions": len(collisions),
        "passed": not unsound and not collisions,
    }


def is_central_in_n(G: GroupTable, g: int) -> bool:
    return g in derived_elements(G)

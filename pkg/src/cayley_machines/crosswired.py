"""Bounded checks of the four subgroup conditions that make the automata group
a cross-wired lamplighter, with L = <x^n G x^-n : n >= 0> and
L' = <x^n G x^-n : n <= -1> inside the torsion subgroup N.

Finitary questions (index of xLx^-1 in L) run on truncated permutations of
the tree.  Questions involving L' use normal forms, because elements of L'
move letters at every depth and cannot be truncated soundly.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .groups import GroupTable, check_presentation_hypothesis
from .normal_form import (
    IDENTITY,
    NormalForm,
    enumerate_torsion,
    expand,
    nf,
    nf_inverse,
    nf_mul,
    random_torsion,
    reduce,
)
from .tree_action import ExceedsBound, all_words, conj, depth, evaluate_batch, xpow

DEFAULT_CAP = 10**6


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class FinitarySubgroup:
    d: int
    levels: tuple[int, ...]
    elements: frozenset[bytes]

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, perm) -> bool:
        return _key(perm) in self.elements


def _key(perm: np.ndarray) -> bytes:
    return np.ascontiguousarray(perm, dtype=np.int32).tobytes()


def _encode(words: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros(words.shape[0], dtype=np.int64)
    for i in range(words.shape[1]):
        out = out * k + words[:, i]
    return out


def truncated_perm(G: GroupTable, e, d: int) -> np.ndarray:
    """Action of ``e`` on the k^d words of length d, as an index permutation."""
    words = all_words(G.size, d)
    return _encode(evaluate_batch(G, e, words), G.size).astype(np.int32)


def conjugate_perms(G: GroupTable, levels: Sequence[int], d: int) -> list[np.ndarray]:
    return [truncated_perm(G, conj(l, g), d) for l in levels for g in range(1, G.size)]


def closure(G: GroupTable, levels: Sequence[int], d: int, cap: int = DEFAULT_CAP) -> FinitarySubgroup:
    """Breadth-first closure of the conjugates x^l g x^-l, l in ``levels``, acting on depth d."""
    levels = tuple(sorted(set(levels)))
    if any(l < 0 for l in levels):
        raise ValueError("closure needs nonnegative levels")
    if levels and max(levels) >= d:
        raise ValueError(f"level {max(levels)} is not visible at truncation depth {d}")
    gens = conjugate_perms(G, levels, d)
    ident = np.arange(G.size**d, dtype=np.int32)
    seen = {_key(ident)}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for s in gens:
                q = s[p]
                key = _key(q)
                if key not in seen:
                    seen.add(key)
                    if len(seen) > cap:
                        raise BudgetExceeded(f"closure exceeds {cap} elements")
                    nxt.append(q)
        frontier = nxt
    return FinitarySubgroup(d, levels, frozenset(seen))


def index_check(G: GroupTable, d: int, cap: int = DEFAULT_CAP) -> dict:
    """Index of xLx^-1 in L, both cut to levels <= d and acting on depth d+1.

    The elements of G (level 0) are tested as coset representatives: they
    must land in pairwise distinct cosets, and their number must equal the index.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    big = closure(G, range(0, d + 1), d + 1, cap)
    small = closure(G, range(1, d + 1), d + 1, cap)
    if len(big) % len(small):
        raise AssertionError("subgroup order does not divide group order")
    index = len(big) // len(small)
    reps = [truncated_perm(G, conj(0, g), d + 1) for g in range(G.size)]
    inv = [np.argsort(r).astype(np.int32) for r in reps]
    distinct = all(
        _key(inv[i][reps[j]]) not in small.elements
        for i in range(G.size)
        for j in range(G.size)
        if i != j
    )
    return {
        "d": d,
        "order_L": len(big),
        "order_xLx^-1": len(small),
        "index": index,
        "coset_reps": list(G.names),
        "reps_distinct": distinct,
        "passed": index == G.size and distinct,
    }


def _levels_in(p: NormalForm, lo: int, hi: int) -> bool:
    return all(lo <= l <= hi for l in p.levels)


def _random_product(G: GroupTable, levels: Sequence[int], length: int, rng: random.Random) -> NormalForm:
    out = IDENTITY
    for _ in range(length):
        if G.size == 1:
            break
        out = nf_mul(G, out, nf({rng.choice(levels): rng.randrange(1, G.size)}))
    return out


def intersection_trivial(
    G: GroupTable, level_bound: int, depth_bound: int = 8, samples: int = 200, seed: int = 0
) -> dict:
    """L and L' meet trivially within the level window.

    Random products of generators of L (resp. L') must reduce to forms with
    levels in [0, level_bound] (resp. [-level_bound, -1]); since normal forms
    are unique the two nontrivial sets are then disjoint.  The depth
    dichotomy is checked on every form in the window: L-side forms have
    finite depth, L'-side forms exceed ``depth_bound``.
    """
    check_presentation_hypothesis(G)
    rng = random.Random(seed)
    pos = list(range(0, level_bound + 1))
    neg = list(range(-level_bound, 0))
    closed = True
    for _ in range(samples):
        closed &= _levels_in(_random_product(G, pos, 6, rng), 0, level_bound)
        if neg:
            closed &= _levels_in(_random_product(G, neg, 6, rng), -level_bound, -1)
    L = {p for p in enumerate_torsion(G, pos) if not p.is_identity}
    Lp = {p for p in enumerate_torsion(G, neg) if not p.is_identity}
    common = L & Lp
    finite = all(not isinstance(depth(G, expand(p), level_bound + 2), ExceedsBound) for p in L)
    infinite = all(isinstance(depth(G, expand(p), depth_bound), ExceedsBound) for p in Lp)
    return {
        "level_bound": level_bound,
        "depth_bound": depth_bound,
        "L_forms": len(L),
        "L'_forms": len(Lp),
        "products_closed": closed,
        "common": len(common),
        "L_finite_depth": finite,
        "L'_exceeds_bound": infinite,
        "passed": closed and not common and finite and infinite,
    }


def split_ll(G: GroupTable, p: NormalForm, max_rounds: int = 8) -> tuple[NormalForm, NormalForm]:
    """Write a torsion form as l * l' with l in L (levels >= 0) and l' in L' (levels <= -1)."""
    if not p.is_torsion:
        raise ValueError("only torsion elements lie in N")
    left, rest = IDENTITY, p
    for _ in range(max_rounds):
        upper = NormalForm(0, tuple(f for f in rest.factors if f[0] >= 0))
        if upper.is_identity:
            return left, rest
        left = nf_mul(G, left, upper)
        rest = nf_mul(G, nf_inverse(G, upper), rest)
    raise AssertionError(f"split did not settle for {p}")


def double_coset_trivial(G: GroupTable, level_bound: int, samples: int, seed: int = 0,
                         exhaustive_levels: int | None = None) -> dict:
    """Every torsion form splits as L * L'; exhaustive on a small window, sampled on a wider one."""
    check_presentation_hypothesis(G)
    rng = random.Random(seed)
    forms: list[NormalForm] = []
    if exhaustive_levels is not None:
        forms.extend(enumerate_torsion(G, range(-exhaustive_levels, exhaustive_levels + 1)))
    forms.extend(random_torsion(G, -level_bound, level_bound, rng) for _ in range(samples))
    bad = []
    for p in forms:
        l, lp = split_ll(G, p)
        ok = l.is_torsion and lp.is_torsion and nf_mul(G, l, lp) == p
        ok = ok and all(v >= 0 for v in l.levels) and all(v <= -1 for v in lp.levels)
        if not ok:
            bad.append(p.to_json(G))
    return {
        "level_bound": level_bound,
        "exhaustive_levels": exhaustive_levels,
        "samples": samples,
        "seed": seed,
        "forms": len(forms),
        "failures": bad[:10],
        "passed": not bad,
    }


def increasing_union_check(G: GroupTable, level_bound: int) -> dict:
    """Each conjugate x^l g x^-l lies in x^-k L x^k and in x^k L' x^-k for small k."""
    check_presentation_hypothesis(G)
    bad = []
    for l in range(-level_bound, level_bound + 1):
        kL, kLp = max(0, -l), max(0, l + 1)
        if max(kL, kLp) > 2 * level_bound + 1:
            bad.append(l)
            continue
        for g in range(1, G.size):
            target = nf({l: g})
            # x^-k (x^{l+k} g x^-(l+k)) x^k with l + k >= 0
            in_L = reduce(G, xpow(-kL) + conj(l + kL, g) + xpow(kL)) == target and l + kL >= 0
            in_Lp = reduce(G, xpow(kLp) + conj(l - kLp, g) + xpow(-kLp)) == target and l - kLp <= -1
            if not (in_L and in_Lp):
                bad.append([l, G.names[g]])
    # generating levels of x^-k L x^k are [-k, oo): nested as k grows, likewise for L'
    nested = all(-(k + 1) <= -k and k <= k + 1 for k in range(2 * level_bound + 1))
    return {"level_bound": level_bound, "failures": bad, "nested": nested, "passed": not bad and nested}


def certificate(G: GroupTable, index_depths: Sequence[int] = (2, 3), exhaustive_levels: int = 2,
                level_bound: int = 3, samples: int = 1000, seed: int = 0) -> dict:
    """JSON certificate for the four conditions, each with status, bound and evidence."""
    idx = [index_check(G, d) for d in index_depths]
    stable = len({r["index"] for r in idx}) == 1
    inter = intersection_trivial(G, exhaustive_levels, seed=seed)
    dc = double_coset_trivial(G, level_bound, samples, seed, exhaustive_levels=exhaustive_levels)
    union = increasing_union_check(G, level_bound)

    def status(ok: bool) -> str:
        return "pass" if ok else "fail"

    conds = {
        "finite_index": {
            "status": status(all(r["passed"] for r in idx) and stable),
            "bound": {"depths": list(index_depths)},
            "evidence": idx,
        },
        "increasing_unions": {"status": status(union["passed"]), "bound": {"levels": level_bound}, "evidence": union},
        "finite_intersection": {
            "status": status(inter["passed"]), "bound": {"levels": exhaustive_levels}, "evidence": inter,
        },
        "trivial_double_coset": {"status": status(dc["passed"]), "bound": {"levels": level_bound}, "evidence": dc},
    }
    return {
        "group": G.label,
        "conditions": conds,
        "passed": all(c["status"] == "pass" for c in conds.values()),
        "note": "bounded check only; nothing beyond the stated bounds is certified",
    }

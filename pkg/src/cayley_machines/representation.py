"""Faithful matrix representations of the index-two subgroup <G, xGx^-1, x^2>
for G = Q8 and G = M_{2^n}, with entries in GF(2)[t, t^-1].

Each representation is fixed by closed-form matrices for the conjugates
x^l a x^-l and x^l b x^-l at every level l, plus the diagonal image of x^2.
A general group element at level l is sent through its word a^s b^e.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence, Union

from .groups import GroupError, GroupTable, modular, quaternion
from .laurent import (
    ONE,
    LaurentMatrix,
    LaurentPoly,
    commutator,
    commutator_entry,
    inverse,
    t_pow,
)
from .normal_form import (
    NormalForm,
    canonical_split,
    enumerate_torsion,
    nf,
    nf_mul,
    random_torsion,
    reduce,
)
from .tree_action import commutator_word, conj


class ParityError(ValueError):
    """The element has odd x-exponent, so it lies outside the represented subgroup."""


Cells = dict[tuple[int, int], LaurentPoly]


def _cells(m: int, cells: Iterable[tuple[int, int, LaurentPoly]]) -> LaurentMatrix:
    out: Cells = {(i, i): ONE for i in range(1, m + 1)}
    for i, j, p in cells:
        out[(i, j)] = out.get((i, j), LaurentPoly()) + p
    return LaurentMatrix.from_dict(m, out)


def _floor_half(l: int) -> tuple[int, int]:
    """(k, parity) with l = 2k + parity."""
    return l // 2, l % 2


# --------------------------------------------------------------------- Q8

def _q8_conj(gen: str, level: int) -> LaurentMatrix:
    n, odd = _floor_half(level)
    t = t_pow
    if gen == "a2":
        return _cells(6, [(1, 6, t(-level + 1))])
    if not odd and gen == "a":
        return _cells(6, [(1, 2, t(-n + 1)), (2, 6, t(-n))])
    if not odd and gen == "b":
        return _cells(6, [(1, 3, t(-n + 1)), (2, 6, t(-n)), (3, 6, t(-n))])
    if gen == "a":
        return _cells(6, [
            (1, 2, t(-n)), (1, 4, t(-n)), (2, 6, t(-n - 1)),
            (4, 6, t(-n - 1) + t(-n)), (5, 6, t(-n)),
        ])
    if gen == "b":
        return _cells(6, [
            (1, 3, t(-n)), (1, 5, t(-n)), (2, 6, t(-n - 1)), (3, 6, t(-n - 1)),
            (4, 6, t(-n - 1)), (5, 6, t(-n - 1) + t(-n)),
        ])
    raise KeyError(gen)


def _q8_x2() -> LaurentMatrix:
    d = [ONE, t_pow(1), t_pow(1), t_pow(1), t_pow(1), t_pow(2)]
    return LaurentMatrix.from_dict(6, {(i + 1, i + 1): p for i, p in enumerate(d)})


# ---------------------------------------------------------------- M_{2^n}

def _modular_conj(n: int, gen: str, level: int) -> LaurentMatrix:
    h = 2 ** (n - 1)  # 2^{n-1}
    q = 2 ** (n - 2)
    e = 2 ** (n - 3)
    top = h + 2
    k, odd = _floor_half(level)
    t = t_pow
    if gen == "c":  # the commutator [a, b]
        return _cells(top, [(1, top, t(-e * level))])
    if not odd and gen == "a":
        cells = [(1, 2, t(-k))]
        cells += [(2 * m, 2 * m + 2, t(-k)) for m in range(1, q - 1)]
        cells += [(h - 2, top, t(-k)), (1, h, t(-e * k))]
        return _cells(top, cells)
    if not odd and gen == "b":
        return _cells(top, [(h, top, t(-e * k)), (h + 1, top, t(-e * k))])
    if gen == "a":
        cells = [(2 * m - 1, 2 * m + 1, t(-1 - k)) for m in range(1, e + 1)]
        cells += [(2 * m - 1, 2 * m + 1, t(-k)) for m in range(e + 1, q)]
        cells += [(h - 1, top, t(-k)), (1, h + 1, t(-e * (k + 1)))]
        return _cells(top, cells)
    if gen == "b":
        return _cells(top, [(h, top, t(-e * (k + 1))), (h + 1, top, t(-e * k))])
    raise KeyError(gen)


def _modular_x2(n: int) -> LaurentMatrix:
    h, q, e = 2 ** (n - 1), 2 ** (n - 2), 2 ** (n - 3)
    diag: Cells = {(1, 1): ONE}
    for m in range(1, q):
        diag[(2 * m, 2 * m)] = t_pow(m)
        diag[(2 * m + 1, 2 * m + 1)] = t_pow(m)
    diag[(h, h)] = t_pow(e)
    diag[(h + 1, h + 1)] = t_pow(e)
    diag[(h + 2, h + 2)] = t_pow(q)
    return LaurentMatrix.from_dict(h + 2, diag)


def modular_power_display(n: int, j: int) -> LaurentMatrix:
    """The displayed closed form for alpha(a)^(2^j), valid for 1 <= j <= n-3."""
    h, q = 2 ** (n - 1), 2 ** (n - 2)
    top = h + 2
    step = 2 ** (j + 1)
    cells = [(1, step, ONE)]
    cells += [(2 * m, 2 * m + step, ONE) for m in range(1, q - 2 ** j)]
    cells += [(h - step, top, ONE)]
    return _cells(top, cells)


def modular_power_expected(n: int, j: int) -> LaurentMatrix:
    """alpha(a)^(2^j) as displayed: general formula, then the two terminal cases."""
    top = 2 ** (n - 1) + 2
    if j == n - 1:
        return LaurentMatrix.identity(top)
    if j == n - 2:
        return _cells(top, [(1, top, ONE)])
    if 1 <= j <= n - 3:
        return modular_power_display(n, j)
    raise ValueError(f"no displayed power formula for j={j}, n={n}")


# ------------------------------------------------------------ the rep type

@dataclass(frozen=True, eq=False)
class Representation:
    label: str
    G: GroupTable
    dim: int
    x2: LaurentMatrix
    _conj: Callable[[str, int], LaurentMatrix]
    central_gen: str  # name used by _conj for the commutator [a, b]

    @property
    def a(self) -> int:
        return self.G.index("a")

    @property
    def b(self) -> int:
        return self.G.index("b")

    def conjugate_gen(self, gen: str, level: int) -> LaurentMatrix:
        """Closed-form image of x^level g x^-level for a named generator g."""
        return _conj_cached(self, gen, level)

    def word_of(self, g: int) -> tuple[int, int]:
        """(s, e) with g = a^s b^e."""
        return _word_of(self.G, g)

    def conjugate(self, g: int, level: int) -> LaurentMatrix:
        """Image of x^level g x^-level for any element g."""
        return _elem_cached(self, g, level)

    def of_nf(self, p: NormalForm) -> LaurentMatrix:
        if p.x_exp % 2:
            raise ParityError(f"x-exponent {p.x_exp} is odd")
        out = LaurentMatrix.identity(self.dim)
        for lvl, g in p.factors:
            out = out * self.conjugate(g, lvl)
        return out * self.x2 ** (p.x_exp // 2)

    def __repr__(self) -> str:
        return f"Representation({self.label}, dim={self.dim})"


@lru_cache(maxsize=None)
def _word_of(G: GroupTable, g: int) -> tuple[int, int]:
    a, b = G.index("a"), G.index("b")
    for e in (0, 1):
        for s in range(G.order_of(a)):
            w = G.mul(G.power(a, s), b) if e else G.power(a, s)
            if w == g:
                return s, e
    raise GroupError(f"{G.names[g]} is not of the form a^s b^e")


@lru_cache(maxsize=None)
def _conj_cached(rep: Representation, gen: str, level: int) -> LaurentMatrix:
    return rep._conj(gen, level)


@lru_cache(maxsize=None)
def _elem_cached(rep: Representation, g: int, level: int) -> LaurentMatrix:
    s, e = rep.word_of(g)
    out = rep.conjugate_gen("a", level) ** s
    if e:
        out = out * rep.conjugate_gen("b", level)
    return out


@lru_cache(maxsize=None)
def q8_representation() -> Representation:
    return Representation("Q8", quaternion(), 6, _q8_x2(), _q8_conj, "a2")


@lru_cache(maxsize=None)
def modular_representation(n: int) -> Representation:
    if n < 3:
        raise GroupError(f"modular group needs n >= 3, got {n}")
    G = modular(n)
    return Representation(
        G.label, G, 2 ** (n - 1) + 2, _modular_x2(n), lambda gen, l: _modular_conj(n, gen, l), "c"
    )


def representation_for(kind: Union[str, GroupTable]) -> Representation:
    """Representation for ``"q8"``, ``"mN"``, or a group built from either."""
    label = kind.label if isinstance(kind, GroupTable) else str(kind)
    key = label.strip().lower()
    if key == "q8":
        return q8_representation()
    if key[:1] == "m" and key[1:].isdigit():
        order = int(key[1:])
        n = order.bit_length() - 1
        if 2 ** n == order:
            return modular_representation(n)
    raise GroupError(f"no matrix representation for {label!r}; supported: q8, mN")


# ------------------------------------------------------------- descriptors

_CONJ_RE = re.compile(r"^x(\^(-?\d+))?\s*(\w+)\s*x\^(-?\d+)$")


def alpha(rep: Representation, item: Union[str, tuple[str, int]]) -> LaurentMatrix:
    """Image of a generator descriptor.

    Accepts ``"a"``, ``"b"``, ``"xax^-1"``, ``"x^2"``, ``"x^-2"``, ``"x^3 b x^-3"``
    or a pair ``(element_name, level)``.  Odd powers of x raise ParityError.
    """
    if isinstance(item, tuple):
        name, level = item
        return rep.conjugate(rep.G.index(name), int(level))
    s = item.replace(" ", "")
    m = re.fullmatch(r"x(\^(-?\d+))?", s)
    if m:
        e = int(m.group(2)) if m.group(2) else 1
        if e % 2:
            raise ParityError(f"{item!r} has odd x-exponent")
        return rep.x2 ** (e // 2)
    m = _CONJ_RE.match(s)
    if m:
        lvl = int(m.group(2)) if m.group(2) else 1
        if int(m.group(4)) != -lvl:
            raise ParityError(f"{item!r} is not a conjugate x^l g x^-l")
        return rep.conjugate(rep.G.index(m.group(3)), lvl)
    return rep.conjugate(rep.G.index(s), 0)


def alpha_q8(item) -> LaurentMatrix:
    return alpha(q8_representation(), item)


def alpha_modular(n: int, item) -> LaurentMatrix:
    return alpha(modular_representation(n), item)


def rep_of_nf(kind, p: NormalForm) -> LaurentMatrix:
    rep = kind if isinstance(kind, Representation) else representation_for(kind)
    return rep.of_nf(p)


# ------------------------------------------------------------ verification

def conjugation_mismatches(rep: Representation, max_shift: int) -> list[dict]:
    """Compare closed forms at every level against conjugation by powers of alpha(x^2).

    Base matrices are the level-0 and level-1 closed forms; closed forms are
    authoritative, so any disagreement is returned rather than corrected.
    """
    bad = []
    gens = ["a", "b", rep.central_gen]
    for gen in gens:
        for base in (0, 1):
            M = rep.conjugate_gen(gen, base)
            for k in range(-max_shift, max_shift + 1):
                D = rep.x2 ** k
                conj_m = D * M * inverse(D)
                if conj_m != rep.conjugate_gen(gen, base + 2 * k):
                    bad.append({"generator": gen, "level": base + 2 * k})
    return bad


def relation_failures(rep: Representation, level_bound: int, limit: int = 20) -> tuple[int, list]:
    """Check alpha(p) alpha(q) = alpha(p q) for every pair of single conjugates.

    This covers every commutation and exchange relation of the presentation,
    since the product is reduced by the rewriting system before mapping.
    """
    G = rep.G
    levels = range(-level_bound, level_bound + 1)
    singles = [nf({l: g}) for l in levels for g in range(1, G.size)]
    count, failures = 0, []
    for p in singles:
        mp = rep.of_nf(p)
        for q in singles:
            count += 1
            if mp * rep.of_nf(q) != rep.of_nf(nf_mul(G, p, q)):
                if len(failures) < limit:
                    failures.append([p.to_json(G), q.to_json(G)])
    return count, failures


def commutator_relation_failures(rep: Representation, level_bound: int) -> tuple[int, list]:
    """[alpha(x^i a x^-i), alpha(x^j b x^-j)] against alpha of the reduced commutator word."""
    G = rep.G
    a, b = rep.a, rep.b
    count, failures = 0, []
    for i in range(-level_bound, level_bound + 1):
        for j in range(-level_bound, level_bound + 1):
            count += 1
            lhs = commutator(rep.conjugate(a, i), rep.conjugate(b, j))
            rhs = rep.of_nf(reduce(G, commutator_word(G, conj(i, a), conj(j, b))))
            if lhs != rhs:
                failures.append([i, j])
    return count, failures


def matrix_order(M: LaurentMatrix, cap: int = 256) -> int | None:
    acc, I = M, LaurentMatrix.identity(M.dim)
    for m in range(1, cap + 1):
        if acc == I:
            return m
        acc = acc * M
    return None


def _kernel_witness_q8(rep: Representation, p: NormalForm, M: LaurentMatrix) -> bool:
    """Replay the entry cascade that rules p out of the kernel."""
    split = canonical_split(rep.G, p)
    a_levels = [l for l, _ in split.a_part]
    if any(l % 2 for l in a_levels):
        return not M[1, 4].is_zero
    if a_levels:
        return not M[1, 2].is_zero
    if any(l % 2 for l in split.b_part):
        return not M[1, 5].is_zero
    if split.b_part:
        return not M[1, 3].is_zero
    if split.c_part:
        return not M[1, 6].is_zero
    return True


def _kernel_witness_modular(rep: Representation, p: NormalForm, M: LaurentMatrix) -> bool:
    n = (rep.dim - 2).bit_length()  # dim = 2^{n-1} + 2
    h, top = 2 ** (n - 1), rep.dim
    split = canonical_split(rep.G, p)
    if split.a_part:
        cells = [(1, 2), (1, 3)] + [(1, 2 ** m) for m in range(2, n - 1)] + [(1, 2 ** m + 1) for m in range(2, n - 1)]
        return any(not M[c].is_zero for c in cells)
    if split.b_part:
        return not (M[h, top].is_zero and M[h + 1, top].is_zero)
    if split.c_part:
        return not M[1, top].is_zero
    return True


def faithfulness(
    rep: Representation, forms: Iterable[NormalForm], check_distinct: bool = True
) -> dict:
    """Kernel and injectivity check over the given torsion forms."""
    seen: dict[LaurentMatrix, NormalForm] = {}
    kernel_hits, collisions, cascade_failures, count = [], [], [], 0
    witness = _kernel_witness_q8 if rep.label == "Q8" else _kernel_witness_modular
    for p in forms:
        count += 1
        M = rep.of_nf(p)
        if not p.is_identity:
            if M.is_identity():
                kernel_hits.append(p.to_json(rep.G))
            if not witness(rep, p, M):
                cascade_failures.append(p.to_json(rep.G))
        if check_distinct:
            prev = seen.setdefault(M, p)
            if prev != p:
                collisions.append([prev.to_json(rep.G), p.to_json(rep.G)])
    return {
        "forms": count,
        "kernel_hits": len(kernel_hits),
        "collisions": len(collisions) if check_distinct else None,
        "cascade_failures": len(cascade_failures),
        "examples": (kernel_hits + collisions + cascade_failures)[:10],
        "passed": not kernel_hits and not collisions and not cascade_failures,
    }


def modular_identities(n: int, bound: int) -> dict:
    """Order, power-formula and conjugate-commutator checks for M_{2^n}."""
    rep = modular_representation(n)
    A, B = alpha_modular(n, "a"), alpha_modular(n, "b")
    Ax, Bx = alpha_modular(n, "xax^-1"), alpha_modular(n, "xbx^-1")
    q = 2 ** (n - 2)
    top = rep.dim
    checks: dict[str, bool] = {
        "order_a": matrix_order(A) == 2 ** (n - 1),
        "order_xax": matrix_order(Ax) == 2 ** (n - 1),
        "b_square": (B * B).is_identity() and (Bx * Bx).is_identity(),
        "commutator_ab": commutator(A, B) == A ** q == _cells(top, [(1, top, ONE)]),
        "commutator_xab": commutator(Ax, Bx) == Ax ** q
        == _cells(top, [(1, top, t_pow(-(2 ** (n - 3))))]),
        "commutator_entry_ab": commutator_entry(A, B) == ONE,
    }
    powers = {}
    for j in range(1, n):
        powers[j] = A ** (2 ** j) == modular_power_expected(n, j)
    checks["power_formulas"] = all(powers.values())
    e = 2 ** (n - 3)
    ident_fail = []
    for k in range(-bound, bound + 1):
        for l in range(-bound, bound + 1):
            cases = [
                (2 * k, 2 * l, k + l),
                (2 * k + 1, 2 * l, k + l + 1),
                (2 * k, 2 * l + 1, k + l + 1),
                (2 * k + 1, 2 * l + 1, k + l + 1),
            ]
            for la, lb, c in cases:
                lhs = commutator(rep.conjugate_gen("a", la), rep.conjugate_gen("b", lb))
                expected = _cells(top, [(1, top, t_pow(-e * c))])
                if lhs != expected or lhs != rep.conjugate_gen("c", c):
                    ident_fail.append([la, lb])
    checks["conjugate_commutators"] = not ident_fail
    return {
        "n": n,
        "checks": checks,
        "power_formulas": {str(j): ok for j, ok in powers.items()},
        "conjugate_commutator_failures": ident_fail[:10],
        "passed": all(checks.values()),
    }


def verify_representation(
    kind, level_bound: int = 3, window: Sequence[int] = (-1, 0, 1),
    samples: int = 0, sample_levels: int = 2, seed: int = 0, shift: int = 4,
) -> dict:
    """Relations, closed forms, orders and faithfulness for one representation.

    Faithfulness is exhaustive over torsion forms supported on ``window``;
    when ``samples`` is positive an extra random sweep over levels
    [-sample_levels, sample_levels] checks only the kernel.
    """
    rep = kind if isinstance(kind, Representation) else representation_for(kind)
    rel_count, rel_fail = relation_failures(rep, level_bound)
    com_count, com_fail = commutator_relation_failures(rep, level_bound)
    mism = conjugation_mismatches(rep, shift)
    exhaustive = faithfulness(rep, enumerate_torsion(rep.G, window))
    report = {
        "group": rep.label,
        "dim": rep.dim,
        "relations": {"instances": rel_count, "failures": rel_fail, "passed": not rel_fail},
        "commutators": {"instances": com_count, "failures": com_fail, "passed": not com_fail},
        "closed_forms": {"shift": shift, "mismatches": mism, "passed": not mism},
        "faithfulness": {"window": list(window), **exhaustive},
    }
    if samples:
        rng = random.Random(seed)
        forms = (random_torsion(rep.G, -sample_levels, sample_levels, rng) for _ in range(samples))
        report["sampled_faithfulness"] = {
            "seed": seed, "levels": sample_levels, **faithfulness(rep, forms, check_distinct=False)
        }
    if rep.label != "Q8":
        n = (rep.dim - 2).bit_length()
        report["identities"] = modular_identities(n, level_bound)
    else:
        A, B = alpha_q8("a"), alpha_q8("b")
        report["identities"] = {
            "checks": {
                "order_a": matrix_order(A) == 4,
                "a_square_eq_b_square": A * A == B * B,
                "b_inverse_a_b": inverse(B) * A * B == inverse(A),
                "order_xax": matrix_order(alpha_q8("xax^-1")) == 4,
            }
        }
        report["identities"]["passed"] = all(report["identities"]["checks"].values())
    report["passed"] = all(
        v["passed"] for k, v in report.items() if isinstance(v, dict) and "passed" in v
    )
    return report

"""Laurent polynomials over GF(2) and square matrices with such entries.

A polynomial is a pair (min_exp, bits): bit i of ``bits`` is the coefficient
of t^(min_exp + i).  Canonical form keeps bit 0 set, so equal polynomials
have equal representations; zero is (0, 0).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


def _clmul(a: int, b: int) -> int:
    if a < b:
        a, b = b, a
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


@dataclass(frozen=True)
class LaurentPoly:
    min_exp: int = 0
    bits: int = 0

    def __post_init__(self):
        if self.bits < 0:
            raise ValueError("bits must be nonnegative")
        if self.bits == 0 and self.min_exp != 0:
            raise ValueError("zero polynomial must have min_exp 0")
        if self.bits and not self.bits & 1:
            raise ValueError("non-canonical polynomial; use LaurentPoly.make")

    @classmethod
    def make(cls, min_exp: int, bits: int) -> "LaurentPoly":
        if bits == 0:
            return ZERO
        shift = (bits & -bits).bit_length() - 1
        return cls(min_exp + shift, bits >> shift)

    @classmethod
    def monomial(cls, e: int) -> "LaurentPoly":
        return cls(e, 1)

    @classmethod
    def from_exponents(cls, exps: Iterable[int]) -> "LaurentPoly":
        out = ZERO
        for e in exps:
            out = out + cls.monomial(e)
        return out

    @property
    def is_zero(self) -> bool:
        return self.bits == 0

    @property
    def is_one(self) -> bool:
        return self.min_exp == 0 and self.bits == 1

    @property
    def is_monomial(self) -> bool:
        return self.bits == 1

    @property
    def max_exp(self) -> int:
        return self.min_exp + self.bits.bit_length() - 1

    def exponents(self) -> list[int]:
        out, b, e = [], self.bits, self.min_exp
        while b:
            if b & 1:
                out.append(e)
            b >>= 1
            e += 1
        return out

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not other.bits:
            return self
        if not self.bits:
            return other
        lo = min(self.min_exp, other.min_exp)
        bits = (self.bits << (self.min_exp - lo)) ^ (other.bits << (other.min_exp - lo))
        return LaurentPoly.make(lo, bits)

    __sub__ = __add__

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not self.bits or not other.bits:
            return ZERO
        return LaurentPoly.make(self.min_exp + other.min_exp, _clmul(self.bits, other.bits))

    def __pow__(self, e: int) -> "LaurentPoly":
        if e < 0:
            if not self.is_monomial:
                raise ZeroDivisionError(f"{self} is not a unit")
            return LaurentPoly(-self.min_exp * -e, 1) if e else ONE
        out, base = ONE, self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __str__(self) -> str:
        if not self.bits:
            return "0"
        terms = []
        for e in self.exponents():
            terms.append("1" if e == 0 else "t" if e == 1 else f"t^{e}")
        return "+".join(terms)

    def to_json(self) -> dict:
        return {"min_exp": self.min_exp, "bits": format(self.bits, "b")[::-1] if self.bits else ""}

    @classmethod
    def from_json(cls, data: dict) -> "LaurentPoly":
        s = data["bits"]
        return cls.make(int(data["min_exp"]), int(s[::-1], 2) if s else 0)


ZERO = LaurentPoly(0, 0)
ONE = LaurentPoly(0, 1)
T = LaurentPoly(1, 1)


def t_pow(e: int) -> LaurentPoly:
    return LaurentPoly(e, 1)


class DimensionError(ValueError):
    pass


class NotUnitriangularError(ValueError):
    pass


class HypothesisViolation(ValueError):
    pass


@dataclass(frozen=True)
class LaurentMatrix:
    entries: tuple[tuple[LaurentPoly, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> LaurentPoly:
        """1-based (row, column) access."""
        i, j = ij
        return self.entries[i - 1][j - 1]

    @classmethod
    def identity(cls, m: int) -> "LaurentMatrix":
        return cls(tuple(tuple(ONE if i == j else ZERO for j in range(m)) for i in range(m)))

    @classmethod
    def from_dict(cls, m: int, cells: dict[tuple[int, int], LaurentPoly]) -> "LaurentMatrix":
        """Matrix with the given 1-based cells and zeros elsewhere."""
        rows = [[ZERO] * m for _ in range(m)]
        for (i, j), p in cells.items():
            rows[i - 1][j - 1] = rows[i - 1][j - 1] + p
        return cls(tuple(tuple(r) for r in rows))

    def __add__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        _same_dim(self, other)
        return LaurentMatrix(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        )

    def __mul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        return mat_mul(self, other)

    def __pow__(self, e: int) -> "LaurentMatrix":
        base = self if e >= 0 else inverse(self)
        e = abs(e)
        out = LaurentMatrix.identity(self.dim)
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def is_identity(self) -> bool:
        return self == LaurentMatrix.identity(self.dim)

    def is_upper_unitriangular(self) -> bool:
        m = self.dim
        return all(
            (self.entries[i][j].is_one if i == j else self.entries[i][j].is_zero)
            for i in range(m)
            for j in range(i + 1)
        )

    def nonzero_cells(self) -> list[tuple[int, int]]:
        return [
            (i + 1, j + 1)
            for i, row in enumerate(self.entries)
            for j, p in enumerate(row)
            if not p.is_zero
        ]

    def to_json(self) -> list[list[dict]]:
        return [[p.to_json() for p in row] for row in self.entries]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[dict]]) -> "LaurentMatrix":
        return cls(tuple(tuple(LaurentPoly.from_json(c) for c in row) for row in data))

    def pretty(self) -> str:
        cells = [[str(p) for p in row] for row in self.entries]
        width = max(len(c) for row in cells for c in row)
        return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells)


def E(m: int, i: int, j: int, coeff: LaurentPoly = ONE) -> LaurentMatrix:
    """The m x m matrix unit with ``coeff`` at 1-based (i, j)."""
    return LaurentMatrix.from_dict(m, {(i, j): coeff})


def _same_dim(A: LaurentMatrix, B: LaurentMatrix) -> None:
    if A.dim != B.dim:
        raise DimensionError(f"dimension mismatch: {A.dim} vs {B.dim}")


def mat_mul(A: LaurentMatrix, B: LaurentMatrix) -> LaurentMatrix:
    _same_dim(A, B)
    # row-sparse product: the matrices in use have few nonzero entries
    m = A.dim
    b_rows = [[(j, q) for j, q in enumerate(row) if q.bits] for row in B.entries]
    out = []
    for row in A.entries:
        acc = [ZERO] * m
        for k, p in enumerate(row):
            if p.bits:
                for j, q in b_rows[k]:
                    acc[j] = acc[j] + p * q
        out.append(tuple(acc))
    return LaurentMatrix(tuple(out))


def unitriangular_inverse(A: LaurentMatrix) -> LaurentMatrix:
    """Inverse of an upper unitriangular matrix.

    Over GF(2) the entries satisfy inv[i][j] = sum_{k=i+1..j} A[i][k] inv[k][j].
    """
    if not A.is_upper_unitriangular():
        raise NotUnitriangularError("matrix is not upper unitriangular")
    m = A.dim
    a = A.entries
    inv = [[ONE if i == j else ZERO for j in range(m)] for i in range(m)]
    for j in range(m):
        for i in range(j - 1, -1, -1):
            acc = ZERO
            for k in range(i + 1, j + 1):
                if a[i][k].bits and inv[k][j].bits:
                    acc = acc + a[i][k] * inv[k][j]
            inv[i][j] = acc
    return LaurentMatrix(tuple(tuple(r) for r in inv))


def diagonal_part(A: LaurentMatrix) -> list[LaurentPoly]:
    return [A.entries[i][i] for i in range(A.dim)]


def inverse(A: LaurentMatrix) -> LaurentMatrix:
    """Inverse of an upper triangular matrix whose diagonal entries are monomials.

    Writes A = D U with D diagonal and U unitriangular, so A^-1 = U^-1 D^-1.
    """
    m = A.dim
    diag = diagonal_part(A)
    if not all(p.is_monomial for p in diag):
        raise NotUnitriangularError("diagonal entries must be monomials")
    if any(A.entries[i][j].bits for i in range(m) for j in range(i)):
        raise NotUnitriangularError("matrix is not upper triangular")
    dinv = [p ** -1 for p in diag]
    U = LaurentMatrix(tuple(tuple(dinv[i] * A.entries[i][j] for j in range(m)) for i in range(m)))
    Uinv = unitriangular_inverse(U)
    return LaurentMatrix(
        tuple(tuple(Uinv.entries[i][j] * dinv[j] for j in range(m)) for i in range(m))
    )


def commutator(g: LaurentMatrix, h: LaurentMatrix) -> LaurentMatrix:
    """[g, h] = g^-1 h^-1 g h."""
    return inverse(g) * inverse(h) * g * h


def commutator_entry(g: LaurentMatrix, h: LaurentMatrix) -> LaurentPoly:
    """Corner entry (1, m) of [g, h] from the closed formula.

    Requires unitriangular g, h whose commutator vanishes on every
    superdiagonal strictly inside the corner; the closed formula is checked
    against the directly computed commutator before returning.
    """
    _same_dim(g, h)
    m = g.dim
    if not (g.is_upper_unitriangular() and h.is_upper_unitriangular()):
        raise NotUnitriangularError("commutator_entry needs unitriangular matrices")
    direct = commutator(g, h)
    for i in range(m):
        for j in range(i + 1, m):
            if j - i < m - 1 and direct.entries[i][j].bits:
                raise HypothesisViolation(f"commutator entry ({i + 1}, {j + 1}) is nonzero")
    formula = ZERO
    for k in range(2, m):
        formula = formula + g[1, k] * h[k, m] + h[1, k] * g[k, m]
    if formula != direct[1, m]:
        raise AssertionError("closed formula disagrees with the direct commutator")
    return formula


def closed_commutator_entry(g: LaurentMatrix, h: LaurentMatrix) -> LaurentPoly:
    """The closed formula alone, without the hypothesis check."""
    m = g.dim
    out = ZERO
    for k in range(2, m):
        out = out + g[1, k] * h[k, m] + h[1, k] * g[k, m]
    return out

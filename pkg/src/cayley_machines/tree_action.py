"""Elements of the automata group acting on the rooted |G|-ary tree.

An element is written as a word of tokens acting on finite words over G.
Tokens compose as functions: the rightmost token acts first.

* ``State(g)``     -- the reset-automaton state A(G)_g, equal to g^-1 x
* ``XPow(e)``      -- x^e, where x = A(G)_1
* ``GroupElem(g)`` -- the embedded copy of g, equal to x A(G)_g^-1; it
  left-multiplies the first letter and leaves the rest alone

Exact bounded questions (depth, equality on the first d levels) are answered
through sections rather than by enumerating |G|^d words.  Internally an
element is a freely reduced word over {x, x^-1} and the nontrivial elements
of G; the section of such a word at a letter is again such a word, so the
set of sections met on one level stays small.
"""
from __future__ import annotations

import re
import weakref
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .groups import GroupTable, check_presentation_hypothesis
from .mealy import act_word, reset_automaton


@dataclass(frozen=True)
class State:
    g: int


@dataclass(frozen=True)
class XPow:
    e: int


@dataclass(frozen=True)
class GroupElem:
    g: int


Token = Union[State, XPow, GroupElem]
ElementWord = tuple  # tuple[Token, ...]


class ExceedsBound:
    """Sentinel returned by :func:`depth` when the element moves letters past the bound."""

    def __repr__(self):
        return "ExceedsBound"

    def __bool__(self):
        return False


EXCEEDS_BOUND = ExceedsBound()


# ---------------------------------------------------------------- word helpers

def xpow(n: int) -> ElementWord:
    if n == 0:
        return ()
    step = XPow(1 if n > 0 else -1)
    return (step,) * abs(n)


def conj(level: int, g: int) -> ElementWord:
    """x^level g x^-level."""
    return xpow(level) + (GroupElem(g),) + xpow(-level)


def word_inverse(G: GroupTable, e: Sequence[Token]) -> ElementWord:
    out = []
    for tok in reversed(e):
        if isinstance(tok, State):
            out += [XPow(-1), GroupElem(tok.g)]
        elif isinstance(tok, XPow):
            out.append(XPow(-tok.e))
        else:
            out.append(GroupElem(G.inv(tok.g)))
    return tuple(out)


def commutator_word(G: GroupTable, u: Sequence[Token], v: Sequence[Token]) -> ElementWord:
    """[u, v] = u^-1 v^-1 u v."""
    return word_inverse(G, u) + word_inverse(G, v) + tuple(u) + tuple(v)


def x_exponent(e: Iterable[Token]) -> int:
    """Image under the homomorphism to Z sending x to 1 (A(G)_g = g^-1 x counts +1)."""
    total = 0
    for tok in e:
        if isinstance(tok, XPow):
            total += tok.e
        elif isinstance(tok, State):
            total += 1
    return total


_TOKEN_RE = re.compile(r"^x(?:\^(-?\d+))?$")


def parse_word(G: GroupTable, text: str) -> ElementWord:
    """Parse ``x``, ``x^-1``, ``x^n``, ``s:<name>``, ``g:<name>`` separated by whitespace."""
    tokens: list[Token] = []
    for raw in text.split():
        m = _TOKEN_RE.match(raw)
        if m:
            n = int(m.group(1)) if m.group(1) is not None else 1
            tokens.extend(xpow(n))
        elif raw.startswith("s:"):
            tokens.append(State(G.index(raw[2:])))
        elif raw.startswith("g:"):
            tokens.append(GroupElem(G.index(raw[2:])))
        else:
            raise ValueError(f"cannot parse token {raw!r}")
    return tuple(tokens)


def format_word(G: GroupTable, e: Sequence[Token]) -> str:
    parts = []
    for tok in e:
        if isinstance(tok, XPow):
            parts.append("x" if tok.e == 1 else f"x^{tok.e}")
        elif isinstance(tok, State):
            parts.append(f"s:{G.names[tok.g]}")
        else:
            parts.append(f"g:{G.names[tok.g]}")
    return " ".join(parts)


# ------------------------------------------------------------ direct evaluation

def _apply_x(G: GroupTable, w: list[int], e: int) -> list[int]:
    t, inv = G.table, G.inverse
    for _ in range(abs(e)):
        if e > 0:
            w = [w[0]] + [t[inv[w[i - 1]]][w[i]] for i in range(1, len(w))] if w else w
        else:
            out, acc = [], 0
            for f in w:
                acc = t[acc][f]
                out.append(acc)
            w = out
    return w


def evaluate(G: GroupTable, e: Sequence[Token], w: Sequence[int]) -> list[int]:
    """Image of the finite word ``w`` under the element ``e`` (rightmost token first)."""
    A = reset_automaton(G) if any(isinstance(tok, State) for tok in e) else None
    out = list(w)
    for tok in reversed(e):
        if isinstance(tok, State):
            out = act_word(A, tok.g, out)
        elif isinstance(tok, XPow):
            out = _apply_x(G, out, tok.e)
        elif out:
            out[0] = G.mul(tok.g, out[0])
    return out


def all_words(k: int, d: int) -> np.ndarray:
    """All k^d words of length d as rows, in lexicographic order (first letter major)."""
    if d == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((k,) * d, dtype=np.int64).reshape(d, -1)
    return grids.T.copy()


def evaluate_batch(G: GroupTable, e: Sequence[Token], words: np.ndarray) -> np.ndarray:
    """Vectorized :func:`evaluate` over the rows of ``words``."""
    t, inv = G.array, G.inverse_array
    out = np.array(words, dtype=np.int64, copy=True)
    if out.shape[1] == 0:
        return out
    for tok in reversed(e):
        if isinstance(tok, GroupElem):
            out[:, 0] = t[tok.g, out[:, 0]]
        elif isinstance(tok, State):
            prev = np.full(out.shape[0], tok.g, dtype=np.int64)
            for i in range(out.shape[1]):
                cur = out[:, i].copy()
                out[:, i] = t[inv[prev], cur]
                prev = cur
        else:
            for _ in range(abs(tok.e)):
                if tok.e > 0:
                    new = out.copy()
                    new[:, 1:] = t[inv[out[:, :-1]], out[:, 1:]]
                    out = new
                else:
                    for i in range(1, out.shape[1]):
                        out[:, i] = t[out[:, i - 1], out[:, i]]
    return out


# ------------------------------------------------------------- section engine

X, XI = -1, -2  # internal tokens for x and x^-1; g >= 1 stands for the embedded group element


class SectionEngine:
    """Sections and root permutations of reduced internal words for one group."""

    def __init__(self, G: GroupTable):
        self.G = G
        self._section_cache: dict[tuple, tuple] = {}

    def lower(self, e: Sequence[Token]) -> tuple[int, ...]:
        toks: list[int] = []
        inv = self.G.inverse
        for tok in e:
            if isinstance(tok, State):
                if inv[tok.g]:
                    toks.append(inv[tok.g])
                toks.append(X)
            elif isinstance(tok, XPow):
                toks.extend([X if tok.e > 0 else XI] * abs(tok.e))
            elif tok.g:
                toks.append(tok.g)
        return self.reduce(toks)

    def lift(self, u: Sequence[int]) -> ElementWord:
        return tuple(XPow(1) if c == X else XPow(-1) if c == XI else GroupElem(c) for c in u)

    def reduce(self, toks: Iterable[int]) -> tuple[int, ...]:
        t = self.G.table
        stack: list[int] = []
        for c in toks:
            while True:
                if not stack:
                    stack.append(c)
                    break
                top = stack[-1]
                if top < 0 and c < 0:
                    if top != c:
                        stack.pop()
                    else:
                        stack.append(c)
                    break
                if top >= 0 and c >= 0:
                    stack.pop()
                    c = t[top][c]
                    if c == 0:
                        break
                    continue
                stack.append(c)
                break
        return tuple(stack)

    def root_label(self, u: Sequence[int]) -> int:
        """The word acts at the root by left multiplication with this element."""
        out = 0
        t = self.G.table
        for c in u:
            if c > 0:
                out = t[out][c]
        return out

    def section(self, u: tuple[int, ...], y: int) -> tuple[int, tuple[int, ...]]:
        """Return (image letter, section word) of ``u`` at the letter ``y``."""
        key = (u, y)
        hit = self._section_cache.get(key)
        if hit is not None:
            return hit
        t, inv = self.G.table, self.G.inverse
        parts: list[tuple[int, ...]] = []
        for c in reversed(u):
            if c == X:
                parts.append((inv[y], X) if inv[y] else (X,))
            elif c == XI:
                parts.append((XI, y) if y else (XI,))
            else:
                y = t[c][y]
        toks = [c for part in reversed(parts) for c in part]
        res = (y, self.reduce(toks))
        if len(self._section_cache) > 2_000_000:
            self._section_cache.clear()
        self._section_cache[key] = res
        return res

    def trivial_to_depth(self, u: tuple[int, ...], d: int) -> bool:
        """True iff ``u`` fixes every word of length ``d``."""
        seen = {u}
        frontier = [u]
        k = self.G.size
        for _ in range(d):
            nxt = []
            for w in frontier:
                if not w:
                    continue
                if self.root_label(w) != 0:
                    return False
                for y in range(k):
                    _, s = self.section(w, y)
                    if s and s not in seen:
                        seen.add(s)
                        nxt.append(s)
            frontier = nxt
            if not frontier:
                return True
        return True

    def exact_depth(self, u: tuple[int, ...], cap: int = 1_000_000) -> Union[int, None]:
        """Depth of ``u``, or None when it moves letters at unbounded depth.

        The sections of a word keep its x-skeleton, so only finitely many
        reduced words are reachable.  The depth is one more than the longest
        path to a word with nontrivial root action; a cycle on such a path
        makes it infinite.
        """
        k = self.G.size
        children: dict[tuple, set] = {}
        stack = [u] if u else []
        while stack:
            w = stack.pop()
            if w in children:
                continue
            kids = set()
            for y in range(k):
                s = self.section(w, y)[1]
                if s:
                    kids.add(s)
                    if s not in children:
                        stack.append(s)
            children[w] = kids
            if len(children) > cap:
                raise RuntimeError(f"more than {cap} distinct sections")
        parents: dict[tuple, list] = {w: [] for w in children}
        for w, kids in children.items():
            for s in kids:
                parents[s].append(w)
        live = {w for w in children if self.root_label(w)}
        frontier = list(live)
        while frontier:
            w = frontier.pop()
            for p in parents[w]:
                if p not in live:
                    live.add(p)
                    frontier.append(p)
        if u not in live:
            return 0
        # longest path inside the live subgraph; Kahn's order detects cycles
        indeg = {w: 0 for w in live}
        for w in live:
            for s in children[w]:
                if s in live:
                    indeg[s] += 1
        order = [w for w in live if indeg[w] == 0]
        i = 0
        while i < len(order):
            for s in children[order[i]]:
                if s in live:
                    indeg[s] -= 1
                    if indeg[s] == 0:
                        order.append(s)
            i += 1
        if len(order) != len(live):
            return None
        longest: dict[tuple, int] = {}
        for w in reversed(order):
            best = 0 if self.root_label(w) else -1
            for s in children[w]:
                if s in live:
                    best = max(best, longest[s] + 1)
            longest[w] = best
        return longest[u] + 1


_ENGINES: "weakref.WeakKeyDictionary[GroupTable, SectionEngine]" = weakref.WeakKeyDictionary()


def engine(G: GroupTable) -> SectionEngine:
    eng = _ENGINES.get(G)
    if eng is None:
        eng = _ENGINES[G] = SectionEngine(G)
    return eng


# ------------------------------------------------------------------ operations

def wreath_coordinates(G: GroupTable, e: Sequence[Token]) -> tuple[list[int], list[ElementWord]]:
    """Root permutation (as an image list over G) and the section at each letter."""
    eng = engine(G)
    u = eng.lower(e)
    perm, sections = [], []
    for y in range(G.size):
        img, s = eng.section(u, y)
        perm.append(img)
        sections.append(eng.lift(s))
    return perm, sections


def depth(G: GroupTable, e: Sequence[Token], bound: int) -> Union[int, ExceedsBound]:
    """Least n such that ``e`` changes only the first n letters of every word.

    Returns EXCEEDS_BOUND when that n is larger than ``bound`` or does not exist.
    """
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    eng = engine(G)
    n = eng.exact_depth(eng.lower(e))
    return EXCEEDS_BOUND if n is None or n > bound else n


def equal_at_depth(G: GroupTable, e1: Sequence[Token], e2: Sequence[Token], d: int) -> bool:
    """Same x-exponent and same action on every word of length ``d``."""
    if d < 1:
        raise ValueError("d must be at least 1")
    if x_exponent(e1) != x_exponent(e2):
        return False
    eng = engine(G)
    u = eng.lower(tuple(word_inverse(G, e2)) + tuple(e1))
    return eng.trivial_to_depth(u, d)


def ceil_half(n: int) -> int:
    return (n + 1) // 2


def verify_presentation(G: GroupTable, level_bound: int, d: int, max_failures: int = 50) -> dict:
    """Check every defining commutator relation with levels in [-level_bound, level_bound]."""
    check_presentation_hypothesis(G)
    k = G.size
    levels = range(-level_bound, level_bound + 1)
    checked, failures, failed = 0, [], 0
    for m in levels:
        for n in levels:
            c = ceil_half(n + m)
            for gj in range(k):
                for gi in range(k):
                    lhs = commutator_word(G, conj(m, gj), conj(n, gi))
                    rhs = conj(c, G.commutator(gj, gi))
                    checked += 1
                    if not equal_at_depth(G, lhs, rhs, d):
                        failed += 1
                        if len(failures) < max_failures:
                            failures.append({"m": m, "n": n, "g_j": G.names[gj], "g_i": G.names[gi]})
    return {
        "group": G.label,
        "level_bound": level_bound,
        "depth": d,
        "instances": checked,
        "failures": failed,
        "failure_examples": failures,
        "passed": failed == 0,
    }


def verify_exchange_rules(G: GroupTable, max_level: int, d: int) -> dict:
    """Check the two ways of moving h in G past x^n g x^-n, and commutator centrality.

    For 0 <= n <= max_level and c = ceil(n/2):
        x^n g x^-n h = h (x^c [h, g^-1] x^-c) x^n g x^-n
        h x^n g x^-n = x^n g x^-n (x^c [g, h^-1] x^-c) h
    and x^l [g, h] x^-l commutes with x^m f x^-m for 0 <= l, m <= max_level.
    """
    check_presentation_hypothesis(G)
    k, inv = G.size, G.inverse
    counts = {"left": 0, "right": 0, "central": 0}
    failures: list[dict] = []
    for n in range(max_level + 1):
        c = ceil_half(n)
        for g in range(k):
            for h in range(k):
                H = (GroupElem(h),) if h else ()
                left = (conj(n, g) + H, H + conj(c, G.commutator(h, inv[g])) + conj(n, g))
                right = (H + conj(n, g), conj(n, g) + conj(c, G.commutator(g, inv[h])) + H)
                for name, (lhs, rhs) in (("left", left), ("right", right)):
                    counts[name] += 1
                    if not equal_at_depth(G, lhs, rhs, d):
                        failures.append({"rule": name, "n": n, "g": G.names[g], "h": G.names[h]})
    comms = sorted({G.commutator(g, h) for g in range(k) for h in range(k)} - {0})
    for l in range(max_level + 1):
        for m in range(max_level + 1):
            for z in comms:
                for f in range(1, k):
                    counts["central"] += 1
                    u, v = conj(l, z), conj(m, f)
                    if not equal_at_depth(G, u + v, v + u, d):
                        failures.append({"rule": "central", "l": l, "m": m, "z": G.names[z], "f": G.names[f]})
    return {"group": G.label, "max_level": max_level, "depth": d, "instances": counts,
            "failures": failures[:20], "passed": not failures}


def gamma_word(G: GroupTable, g: int, h: int, n: int) -> ElementWord:
    """(x^n h x^-n) g (x^n h^-1 x^-n)."""
    return conj(n, h) + (GroupElem(g),) + conj(n, G.inv(h))


def conjugate_depth_probe(G: GroupTable, g: int, h: int, n: int, bound: int) -> Union[int, ExceedsBound]:
    if n < 0:
        raise ValueError("n must be nonnegative")
    if G.mul(g, h) == G.mul(h, g):
        raise ValueError("g and h must not commute")
    return depth(G, gamma_word(G, g, h, n), bound)


def expected_probe_depth(n: int) -> int:
    return ceil_half(n) + 1


def positive_state_words(k: int, max_len: int) -> list[tuple[int, ...]]:
    import itertools

    out = []
    for length in range(1, max_len + 1):
        out.extend(itertools.product(range(k), repeat=length))
    return out


def free_semigroup_check(G: GroupTable, word_len: int, d: int) -> bool:
    """All positive words of length <= word_len in the states A(G)_g act distinctly on length-d words."""
    if word_len < 1:
        raise ValueError("word_len must be at least 1")
    if G.size == 1:
        # the one-letter tree admits a single action; the statement is vacuous
        return True
    return not free_semigroup_collisions(G, word_len, d)


def free_semigroup_collisions(G: GroupTable, word_len: int, d: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    words = all_words(G.size, d)
    seen: dict[bytes, tuple[int, ...]] = {}
    collisions = []
    for sw in positive_state_words(G.size, word_len):
        img = evaluate_batch(G, tuple(State(g) for g in sw), words)
        key = img.tobytes()
        if key in seen:
            collisions.append((seen[key], sw))
        else:
            seen[key] = sw
    return collisions


def is_prefix_compatible(images: np.ndarray, words: np.ndarray) -> bool:
    """Check that equal prefixes in ``words`` map to equal prefixes in ``images``."""
    n, d = words.shape
    for p in range(1, d):
        pre = {}
        for w, img in zip(map(bytes, words[:, :p].astype(np.uint8)), map(bytes, images[:, :p].astype(np.uint8))):
            if pre.setdefault(w, img) != img:
                return False
    return True

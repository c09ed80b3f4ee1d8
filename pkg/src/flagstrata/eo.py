"""Final sequences, final Weyl elements, and the numerics of EO strata.

A final sequence of length g is psi: {0..2g} -> N with psi(0) = 0,
psi(2g) = g, psi(i) <= psi(i+1) <= psi(i)+1 and
psi(i) < psi(i+1)  iff  psi(2g-i) = psi(2g-i-1).
It is serialized in the short form (psi(1), ..., psi(g)).

Final elements are the signed permutations w with w(1) < ... < w(g); the two
index the same strata via w -> psi_w with psi_w(i) = i - #{a <= g : w(a) <= i}.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .weyl import SignedPerm

_FINAL_NAMES = {
    2: {(): "id", (2,): "s_2", (1, 2): "s_12", (2, 1, 2): "s_212"},
    3: {
        (): "id",
        (3,): "s_3",
        (2, 3): "s_23",
        (3, 2, 3): "s_323",
        (1, 2, 3): "s_123",
        (3, 1, 2, 3): "s_3123",
        (2, 3, 1, 2, 3): "s_23123",
        (3, 2, 3, 1, 2, 3): "s_323123",
    },
}


@dataclass(frozen=True)
class FinalSequence:
    psi: tuple[int, ...]  # values psi(0), ..., psi(2g)

    def __post_init__(self):
        psi = self.psi
        if len(psi) % 2 != 1 or len(psi) < 3:
            raise ValueError("psi must list psi(0..2g)")
        g = self.g
        if psi[0] != 0 or psi[2 * g] != g:
            raise ValueError("psi(0) = 0 and psi(2g) = g required")
        for i in range(2 * g):
            if not psi[i] <= psi[i + 1] <= psi[i] + 1:
                raise ValueError(f"psi must climb by 0 or 1 at {i}")
            if (psi[i] < psi[i + 1]) != (psi[2 * g - i] == psi[2 * g - i - 1]):
                raise ValueError(f"duality condition fails at {i}")

    @property
    def g(self) -> int:
        return (len(self.psi) - 1) // 2

    @property
    def short(self) -> tuple[int, ...]:
        return self.psi[1 : self.g + 1]

    @staticmethod
    def from_short(short) -> "FinalSequence":
        short = tuple(short)
        g = len(short)
        full = [0] + list(short) + [0] * g
        for i in range(g):
            full[2 * g - i] = full[i] + g - i
        return FinalSequence(tuple(full))

    def __str__(self) -> str:
        return "(" + ",".join(str(v) for v in self.short) + ")"


@dataclass(frozen=True)
class FinalElement:
    w: SignedPerm

    def __post_init__(self):
        img = self.w.images
        g = self.g
        if any(img[i] >= img[i + 1] for i in range(g - 1)):
            raise ValueError("final element needs w(1) < ... < w(g)")

    @property
    def g(self) -> int:
        return self.w.g

    def __call__(self, i: int) -> int:
        return self.w(i)

    @property
    def name(self) -> str:
        word = _final_word(self)
        names = _FINAL_NAMES.get(self.g)
        if names is not None and word in names:
            return names[word]
        return "id" if not word else "s_" + "".join(str(i) for i in word)


def final_elements(g: int) -> list[FinalElement]:
    """All 2^g final elements, ordered by their final sequence (by dimension last)."""
    out = []
    for mask in range(2**g):
        chosen = sorted((i + 1) if not (mask >> i) & 1 else (2 * g - i) for i in range(g))
        images = chosen + [2 * g + 1 - chosen[g - 1 - j] for j in range(g)]
        out.append(FinalElement(SignedPerm(tuple(images))))
    out.sort(key=lambda w: seq_from_elem(w).short)
    return out


def seq_from_elem(w: FinalElement) -> FinalSequence:
    g = w.g
    firsts = set(w.w.images[:g])
    psi = tuple(i - sum(1 for a in firsts if a <= i) for i in range(2 * g + 1))
    return FinalSequence(psi)


def elem_from_seq(psi: FinalSequence) -> FinalElement:
    g = psi.g
    flats = [i for i in range(1, 2 * g + 1) if psi.psi[i] == psi.psi[i - 1]]
    jumps = [i for i in range(1, 2 * g + 1) if psi.psi[i] == psi.psi[i - 1] + 1]
    images = flats + [jumps[b - 1] for b in range(1, g + 1)]
    return FinalElement(SignedPerm(tuple(images)))


def jump_positions(w: FinalElement) -> list[int]:
    """The positions m_1 < ... < m_g where the final sequence of w climbs."""
    psi = seq_from_elem(w).psi
    return [i for i in range(1, 2 * w.g + 1) if psi[i] == psi[i - 1] + 1]


def eo_dim(w: FinalElement) -> int:
    return sum(seq_from_elem(w).short)


def eo_p_rank(w: FinalElement) -> int:
    g = w.g
    by_fix = sum(1 for i in range(1, g + 1) if w(i) == g + i)
    by_first = w(1) - 1
    if by_fix != by_first:
        raise AssertionError(f"p-rank formulas disagree on {w}")
    return by_fix


def eo_a_number(w: FinalElement) -> int:
    return w.g - seq_from_elem(w).psi[w.g]


def eo_in_ss(w: FinalElement) -> bool:
    g = w.g
    return all(w(i) == i for i in range(1, g - g // 2 + 1))


def closure_leq(psi_a: FinalSequence, psi_b: FinalSequence) -> bool:
    if psi_a.g != psi_b.g:
        raise ValueError("sequences of different g are incomparable")
    return all(a <= b for a, b in zip(psi_a.short, psi_b.short))


def _final_word(w: FinalElement) -> tuple[int, ...]:
    """A reduced word for w in s_1..s_g, picked to match the tables for g <= 3."""
    g = w.g
    names = _FINAL_NAMES.get(g)
    if names is not None:
        for word in names:
            if _word_to_perm(g, word) == w.w:
                return word
    return _finite_words(g)[w.w.images]


def _gen_perm(g: int, i: int) -> SignedPerm:
    images = list(range(1, 2 * g + 1))
    if i == g:
        images[g - 1], images[g] = images[g], images[g - 1]
    else:
        images[i - 1], images[i] = images[i], images[i - 1]
        j = 2 * g - i
        images[j - 1], images[j] = images[j], images[j - 1]
    return SignedPerm(tuple(images))


def _word_to_perm(g: int, word) -> SignedPerm:
    cur = SignedPerm(tuple(range(1, 2 * g + 1)))
    for i in word:
        cur = cur.mul(_gen_perm(g, i))
    return cur


_WORD_CACHE: dict[int, dict[tuple[int, ...], tuple[int, ...]]] = {}


def _finite_words(g: int) -> dict[tuple[int, ...], tuple[int, ...]]:
    """Lexicographically smallest reduced word for every element of W, by BFS."""
    cached = _WORD_CACHE.get(g)
    if cached is not None:
        return cached
    gens = [_gen_perm(g, i) for i in range(1, g + 1)]
    ident = tuple(range(1, 2 * g + 1))
    words = {ident: ()}
    frontier = [ident]
    while frontier:
        nxt = []
        for images in sorted(frontier, key=lambda im: words[im]):
            cur = SignedPerm(images)
            for i, s in enumerate(gens, start=1):
                new = cur.mul(s).images
                if new not in words:
                    words[new] = words[images] + (i,)
                    nxt.append(new)
        frontier = nxt
    _WORD_CACHE[g] = words
    return words


def finite_length(w: SignedPerm) -> int:
    """Coxeter length of w in the finite Weyl group W = <s_1..s_g>."""
    return len(_finite_words(w.g)[w.images])


def table_rows(g: int) -> list[dict]:
    rows = []
    for w in final_elements(g):
        rows.append(
            {
                "ES": str(seq_from_elem(w)),
                "W_final": w.name,
                "dim": eo_dim(w),
                "p_rank": eo_p_rank(w),
                "a_number": eo_a_number(w),
                "in_S_g": eo_in_ss(w),
            }
        )
    rows.sort(key=lambda r: (r["dim"], r["ES"]))
    return rows


def emit_csv(g: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["ES", "W_final", "dim", "p-rank", "a-number", "in_S_g"])
    for r in table_rows(g):
        writer.writerow(
            [r["ES"], r["W_final"], r["dim"], r["p_rank"], r["a_number"], "yes" if r["in_S_g"] else "no"]
        )
    return buf.getvalue()

"""F/V-stable full symplectic flags: enumeration, KR typing, verification.

A stable flag over the stratum of a final element w is a full symplectic
flag (W_i) in GF(q)^{2g} with F_w(W_i), V_w(W_i) inside W_i; checking steps
0..g suffices, the rest being forced by W_{2g-i} = W_i^perp.  Enumeration
extends isotropic flags one line at a time: the new line must be stable
under the maps induced on W^perp/W, which for nilpotent quotients means it
lies in the common kernel and in general adds semilinear eigenlines (an
F_p-linear solve per Frobenius-twist class).

KR typing follows the defining conditions directly: the coweight records
where im V_w jumps along the flag, the signed permutation records where
V_w(W_i) grows, and the remaining values are forced by omega(2g+1-i) =
2g+1-omega(i).  verify_kr_basis rebuilds an adapted basis greedily and is
deliberately independent of kr_type.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import ffalg, weyl
from .eo import FinalElement, eo_p_rank, final_elements, seq_from_elem
from .ffalg import FieldCtx, SemilinearMap, Subspace
from .weyl import AdmissibleElement, AffineElement, Coweight, SignedPerm


class KRInconsistency(RuntimeError):
    """Raised when a flag does not produce a well-formed KR type."""


@functools.lru_cache(maxsize=None)
def stratum_maps(ctx: FieldCtx, w: FinalElement) -> tuple[SemilinearMap, SemilinearMap, np.ndarray]:
    F, V = ffalg.standard_fv(ctx, w)
    return F, V, ffalg.standard_gram(ctx, w.g)


@dataclass(frozen=True)
class SymplecticFlag:
    """Full chain W_0 < ... < W_2g with W_g isotropic and W_{2g-i} = W_i^perp."""

    ctx: FieldCtx
    steps: tuple[Subspace, ...]

    @property
    def g(self) -> int:
        return (len(self.steps) - 1) // 2

    def key(self) -> bytes:
        return b"|".join(s.key() for s in self.steps[1 : self.g + 1])

    def __hash__(self) -> int:
        return hash(self.key())

    def __eq__(self, other) -> bool:
        return isinstance(other, SymplecticFlag) and self.key() == other.key()

    @staticmethod
    def from_isotropic(ctx: FieldCtx, gram: np.ndarray, isotropic: list[Subspace]) -> "SymplecticFlag":
        """Extend W_1 < ... < W_g (W_g Lagrangian) to the full symplectic flag."""
        g = len(isotropic)
        steps = [Subspace.zero(ctx, 2 * g)] + list(isotropic)
        for i in range(g - 1, -1, -1):
            steps.append(ffalg.perp(steps[i], gram))
        return SymplecticFlag(ctx, tuple(steps))


@dataclass(frozen=True)
class StableFlag:
    flag: SymplecticFlag
    w: FinalElement

    @property
    def ctx(self) -> FieldCtx:
        return self.flag.ctx

    @property
    def g(self) -> int:
        return self.w.g

    @property
    def steps(self) -> tuple[Subspace, ...]:
        return self.flag.steps

    def key(self) -> bytes:
        return self.flag.key()

    def is_stable(self) -> bool:
        F, V, _ = stratum_maps(self.ctx, self.w)
        return all(
            W.contains_space(F.apply_space(W)) and W.contains_space(V.apply_space(W))
            for W in self.steps
        )


# -- quotient machinery ---------------------------------------------------------

class _Quotient:
    """Coordinates on P/W for nested subspaces W <= P, via RREF pivots."""

    def __init__(self, ctx: FieldCtx, P: Subspace, W: Subspace):
        self.ctx = ctx
        self.P, self.W = P, W
        _, piv = ffalg.rref(ctx, P.basis)
        self.pivP = list(piv)
        theta = W.basis[:, self.pivP] if W.dim else ffalg.zeros(ctx, 0, len(self.pivP))
        self.thetaR, thetaPiv = ffalg.rref(ctx, theta)
        self.freeT = [l for l in range(len(self.pivP)) if l not in thetaPiv]
        self.thetaPiv = list(thetaPiv)
        self.dim = len(self.freeT)

    def coords(self, v: np.ndarray) -> np.ndarray:
        """Quotient coordinates of v in P (reduce mod W, read free positions)."""
        c = v[self.pivP].copy()
        ctx = self.ctx
        for row_i, pcol in enumerate(self.thetaPiv):
            if c[pcol]:
                c = ctx.asub(c, ctx.amul(c[pcol], self.thetaR[row_i]))
        return c[self.freeT].copy()

    def lift(self, y: np.ndarray) -> np.ndarray:
        ctx = self.ctx
        v = np.zeros(self.P.n, dtype=ctx.dtype)
        for coeff, l in zip(y, self.freeT):
            v = ctx.aadd(v, ctx.amul(np.array(coeff, dtype=ctx.dtype), self.P.basis[l]))
        return v

    def induced(self, phi: SemilinearMap) -> SemilinearMap:
        cols = []
        for j in range(self.dim):
            y = np.zeros(self.dim, dtype=self.ctx.dtype)
            y[j] = 1
            cols.append(self.coords(phi.apply_vec(self.lift(y))))
        m = np.stack(cols, axis=1) if cols else ffalg.zeros(self.ctx, 0, 0)
        return SemilinearMap(self.ctx, m, phi.twist)


def _line_stable(phi: SemilinearMap, v: np.ndarray) -> bool:
    ctx = phi.ctx
    u = phi.apply_vec(v)
    if not np.any(u):
        return True
    i = int(np.argmax(v != 0))
    if not v[i]:
        return False
    c = ctx.div(int(u[i]), int(v[i]))
    return bool(np.all(u == ctx.amul(np.array(c, dtype=ctx.dtype), v)))


def _line_key(ctx: FieldCtx, v: np.ndarray) -> bytes:
    i = int(np.argmax(v != 0))
    return ctx.amul(np.array(ctx.inv(int(v[i])), dtype=ctx.dtype), v).tobytes()


def _fp_mul_matrix(ctx: FieldCtx, a: int) -> np.ndarray:
    """The k x k matrix of multiplication by a on GF(p^k) over GF(p)."""
    p, k = ctx.p, ctx.k
    cols = []
    for l in range(k):
        prod = ctx.mul(a, p**l)
        cols.append([(prod // p**m) % p for m in range(k)])
    return np.array(cols, dtype=np.uint16).T


def _eigenline_reps(ctx: FieldCtx, phi: SemilinearMap) -> list[np.ndarray]:
    """Representatives of lines with phi(v) = c v, c != 0.

    Scaling v by t moves c by sigma(t)/t, so c only matters modulo the
    image of t -> t^(p-1); one Frobenius-twist class per power of the
    generator gamma^0..gamma^(p-2), each solved as an F_p-linear system.
    """
    d = phi.n
    if d == 0:
        return []
    p, k = ctx.p, ctx.k
    ctx_p = ffalg.field(p, 1)
    frob_mat = np.array(
        [[(ctx.frob(p**l, phi.twist) // p**m) % p for l in range(k)] for m in range(k)],
        dtype=np.uint16,
    )
    reps = []
    for j in range(p - 1):
        c = 1 if j == 0 else int(ctx.EXP[j])
        cinv = ctx.inv(c)
        # big = blockdiag(Mul(cinv)) . blocks(Mul(A_ij)) . blockdiag(frob)
        big = np.zeros((d * k, d * k), dtype=np.uint16)
        mul_cinv = _fp_mul_matrix(ctx, cinv)
        for bi in range(d):
            for bj in range(d):
                a = int(phi.matrix[bi, bj])
                if a:
                    blk = (mul_cinv @ _fp_mul_matrix(ctx, a) @ frob_mat) % p
                    big[bi * k : bi * k + k, bj * k : bj * k + k] = blk
        big = (big + (p - 1) * np.eye(d * k, dtype=np.uint16)) % p  # psi - id
        null = ffalg.null_space(ctx_p, big.astype(ctx_p.dtype))
        if null.shape[0] == 0:
            continue
        # projective reps over F_p of the fixed space
        nb = null.shape[0]
        for lead in range(nb):
            for code in range(p ** (nb - lead - 1)):
                coeffs = [0] * lead + [1]
                cc = code
                for _ in range(nb - lead - 1):
                    coeffs.append(cc % p)
                    cc //= p
                digits = np.zeros(d * k, dtype=np.int64)
                for cf, row in zip(coeffs, null):
                    digits = (digits + cf * row.astype(np.int64)) % p
                v = np.zeros(d, dtype=ctx.dtype)
                for bi in range(d):
                    code_v = 0
                    for m in range(k - 1, -1, -1):
                        code_v = code_v * p + int(digits[bi * k + m])
                    v[bi] = code_v
                reps.append(v)
    return reps


def stable_lines(ctx: FieldCtx, FQ: SemilinearMap, VQ: SemilinearMap) -> list[np.ndarray]:
    """Canonical representatives of the lines stable under both induced maps."""
    cands: dict[bytes, np.ndarray] = {}
    K = FQ.kernel().intersect(VQ.kernel())
    for v in K.projective_reps():
        cands.setdefault(_line_key(ctx, v), v)
    for phi in (FQ, VQ):
        for v in _eigenline_reps(ctx, phi):
            cands.setdefault(_line_key(ctx, v), v)
    out = [
        v
        for key, v in sorted(cands.items())
        if _line_stable(FQ, v) and _line_stable(VQ, v)
    ]
    return out


def enumerate_stable(w: FinalElement, ctx: FieldCtx, engine: str = "auto") -> Iterator[StableFlag]:
    """All GF(q)-points of the stable-flag variety of w, each exactly once."""
    if engine not in ("auto", "scalar", "batched"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine == "batched" or (engine == "auto" and eo_p_rank(w) == 0):
        from . import _batch

        yield from _batch.iter_stable_flags(ctx, w)
        return
    g = w.g
    F, V, G = stratum_maps(ctx, w)

    def rec(subs: list[Subspace]) -> Iterator[StableFlag]:
        if len(subs) == g:
            yield StableFlag(SymplecticFlag.from_isotropic(ctx, G, subs), w)
            return
        W = subs[-1] if subs else Subspace.zero(ctx, 2 * g)
        P = ffalg.perp(W, G)
        quo = _Quotient(ctx, P, W)
        FQ, VQ = quo.induced(F), quo.induced(V)
        for y in stable_lines(ctx, FQ, VQ):
            v = quo.lift(y)
            Wi = Subspace.from_vectors(ctx, 2 * g, np.concatenate([W.basis, v.reshape(1, -1)]))
            yield from rec(subs + [Wi])

    yield from rec([])


# -- KR typing -------------------------------------------------------------------

def kr_type(f: StableFlag) -> AdmissibleElement:
    """The unique t^lambda omega in W_a tau attached to the flag.

    lambda(i) = 0 exactly where im V_w meets W_i in one more dimension than
    W_{i-1}; where V_w(W_{i-1}) < V_w(W_i) strictly, omega(i) is the least j
    with V_w(W_i) inside V_w(W_{i-1}) + W_j; the rest is forced by
    omega(2g+1-i) = 2g+1-omega(i).
    """
    ctx, g = f.ctx, f.g
    n = 2 * g
    _, V, _ = stratum_maps(ctx, f.w)
    VW = [V.apply_space(W) for W in f.steps]
    imV = VW[n]
    inter = [imV.intersect(W).dim for W in f.steps]
    lam = tuple(0 if inter[i] > inter[i - 1] else 1 for i in range(1, n + 1))
    omega: list[int | None] = [None] * n
    for i in range(1, n + 1):
        if VW[i].dim > VW[i - 1].dim:
            for j in range(1, n + 1):
                if VW[i - 1].sum(f.steps[j]).contains_space(VW[i]):
                    omega[i - 1] = j
                    break
            else:
                raise KRInconsistency("no step contains the V-jump")
    for i in range(1, n + 1):
        if omega[i - 1] is None:
            mirror = omega[n - i]
            if mirror is None:
                raise KRInconsistency("both i and 2g+1-i are V-jumps")
            omega[i - 1] = n + 1 - mirror
    try:
        x = AffineElement(Coweight(lam), SignedPerm(tuple(omega)))
    except ValueError as exc:
        raise KRInconsistency(str(exc)) from exc
    return weyl.make_admissible(x)


def _flag_basis(f: SymplecticFlag) -> np.ndarray:
    """Columns c_1..c_2g with W_i spanned by the first i (new RREF pivot rows)."""
    ctx = f.ctx
    cols = []
    prev_piv: set[int] = set()
    for i in range(1, 2 * f.g + 1):
        _, piv = ffalg.rref(ctx, f.steps[i].basis)
        new = set(piv) - prev_piv
        if len(new) != 1:
            raise ValueError("flag steps do not nest by one dimension")
        pcol = new.pop()
        row = list(piv).index(pcol)
        cols.append(f.steps[i].basis[row])
        prev_piv = set(piv)
    return np.stack(cols, axis=1)


def verify_kr_basis(f: StableFlag, x: AdmissibleElement | AffineElement) -> bool:
    """Greedily build a KR basis for (f, x); True iff all four conditions close.

    Independent of kr_type: works in flag coordinates and back-substitutes
    each new V-image until its level is unoccupied, then insists the level
    equals omega(i) and that the occupied levels are exactly the zeros of
    lambda.
    """
    el = x.element if isinstance(x, AdmissibleElement) else x
    ctx, g = f.ctx, f.g
    n = 2 * g
    lam, omega = el.lam.entries, el.omega
    if any(v not in (0, 1) for v in lam) or sum(1 for v in lam if v == 0) != g:
        return False
    _, V, _ = stratum_maps(ctx, f.w)
    C = _flag_basis(f.flag)
    Cinv = _matrix_inverse(ctx, C)

    def coords(v: np.ndarray) -> np.ndarray:
        return ffalg.mat_vec(ctx, Cinv, v)

    placed: dict[int, np.ndarray] = {}
    VW_dim = 0
    for i in range(1, n + 1):
        y = coords(V.apply_vec(C[:, i - 1]))
        # reduce modulo the previously placed epsilons
        while np.any(y):
            lev = int(np.max(np.nonzero(y)[0])) + 1
            e = placed.get(lev)
            if e is None:
                break
            y = ctx.asub(y, ctx.amul(ctx.div(int(y[lev - 1]), int(e[lev - 1])), e))
        if not np.any(y):
            continue  # V(W_i) = V(W_{i-1}): no jump at i
        lev = int(np.max(np.nonzero(y)[0])) + 1
        if lev != omega(i):
            return False
        placed[lev] = y
        VW_dim += 1
    if VW_dim != g:
        return False
    return set(placed) == {i + 1 for i in range(n) if lam[i] == 0}


def _matrix_inverse(ctx: FieldCtx, M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    aug = np.concatenate([M, ffalg.identity(ctx, n)], axis=1)
    R, piv = ffalg.rref(ctx, aug)
    if piv[:n] != tuple(range(n)):
        raise ValueError("singular matrix")
    return R[:, n:].copy()


# -- shuffle decomposition -------------------------------------------------------

@dataclass(frozen=True)
class ShuffleLabel:
    """Component label of a flag over a positive-p-rank stratum."""

    J: frozenset[int]
    etale: tuple[bytes, ...]
    multiplicative: tuple[bytes, ...]
    local_flag: SymplecticFlag

    def key(self) -> tuple:
        return (tuple(sorted(self.J)), self.etale, self.multiplicative)


def shuffle_decompose(f: StableFlag) -> ShuffleLabel:
    """Split a flag into etale/multiplicative/local-local parts.

    Requires the base stratum to have p-rank k >= 1; each W_i (i <= g) must
    decompose along U^{e,u} + U^{i,m} + U^{i,u}, which the naturality of the
    three-part splitting guarantees for stable flags.
    """
    ctx, g = f.ctx, f.g
    k = eo_p_rank(f.w)
    if k < 1:
        raise ValueError("shuffle decomposition needs positive p-rank")
    n = 2 * g

    def coord_space(idxs) -> Subspace:
        basis = ffalg.zeros(ctx, len(idxs), n)
        for r, i in enumerate(idxs):
            basis[r, i - 1] = 1
        return Subspace.from_vectors(ctx, n, basis)

    Ueu = coord_space(range(1, k + 1))
    Uim = coord_space(range(g + 1, g + k + 1))
    U = Ueu.sum(Uim)
    local_idx = list(range(k + 1, g + 1)) + list(range(g + k + 1, 2 * g + 1))
    Uiu = coord_space(local_idx)

    et, mu, loc = [], [], []
    for j in range(g + 1):
        W = f.steps[j]
        e = W.intersect(Ueu)
        m = W.intersect(Uim)
        l = W.intersect(Uiu)
        if e.dim + m.dim + l.dim != W.dim:
            raise ValueError("flag fails to split along the three-part decomposition")
        et.append(e)
        mu.append(m)
        loc.append(l)
    J = frozenset(j for j in range(1, g + 1) if et[j].dim + mu[j].dim > et[j - 1].dim + mu[j - 1].dim)
    if len(J) != k:
        raise ValueError("unexpected number of etale/multiplicative jumps")

    # local-local part in standard coordinates of GF(q)^{2(g-k)}
    cols = [i - 1 for i in local_idx]
    small = []
    for j in range(1, g + 1):
        if loc[j].dim > loc[j - 1].dim:
            small.append(Subspace.from_vectors(ctx, 2 * (g - k), loc[j].basis[:, cols]))
    gram_small = ffalg.standard_gram(ctx, g - k)
    local_flag = SymplecticFlag.from_isotropic(ctx, gram_small, small)

    etale_keys = tuple(sorted({s.key() for s in et[1:]}))
    mult_keys = tuple(sorted({s.key() for s in mu[1:]}))
    return ShuffleLabel(J, etale_keys, mult_keys, local_flag)


def shuffle_local_element(w: FinalElement) -> FinalElement:
    """The final element w-tilde of the local-local factor (p-rank drops to 0)."""
    g, k = w.g, eo_p_rank(w)
    short = seq_from_elem(w).short
    from .eo import FinalSequence, elem_from_seq

    return elem_from_seq(FinalSequence.from_short(tuple(short[k + i] - k for i in range(g - k))))


def flag_to_json(f: StableFlag, kr_name: str | None = None) -> dict:
    steps = [f.steps[i].basis.astype(int).tolist() for i in range(1, f.g + 1)]
    d = {"w": f.w.name, "steps": steps}
    if kr_name is not None:
        d["kr"] = kr_name
    return d

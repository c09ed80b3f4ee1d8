"""Mod-p Dieudonne modules: axioms, canonical filtration, EO type, normal forms.

A module is a 2g-dimensional space over GF(p^k) with a sigma-linear F, a
sigma^{-1}-linear V and a nondegenerate alternating pairing subject to
im V = ker F, im F = ker V and <Fx, y> = <x, Vy>^p.  The canonical filtration
is the closure of {0, D} under F and perp; its dimension/image profile
(rho, v) determines the final sequence of the module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ffalg
from .eo import FinalElement, FinalSequence, seq_from_elem
from .ffalg import FieldCtx, SemilinearMap, Subspace


@dataclass(frozen=True)
class DieudonneModule:
    g: int
    ctx: FieldCtx
    F: SemilinearMap
    V: SemilinearMap
    gram: np.ndarray

    def __post_init__(self):
        n = 2 * self.g
        if self.F.matrix.shape != (n, n) or self.V.matrix.shape != (n, n):
            raise ValueError("F and V must be 2g x 2g")
        if self.F.twist != 1 or self.V.twist != -1:
            raise ValueError("F must twist by +1 and V by -1")


def standard_module(ctx: FieldCtx, w: FinalElement) -> DieudonneModule:
    F, V = ffalg.standard_fv(ctx, w)
    return DieudonneModule(w.g, ctx, F, V, ffalg.standard_gram(ctx, w.g))


def axiom_failures(D: DieudonneModule) -> list[str]:
    """Which of the three defining axioms fail (empty list = valid module)."""
    fails = []
    if not ffalg.is_nondegenerate_alternating(D.ctx, D.gram):
        fails.append("pairing is not nondegenerate alternating")
    if D.F.image() != D.V.kernel():
        fails.append("im F != ker V")
    if D.V.image() != D.F.kernel():
        fails.append("im V != ker F")
    if not ffalg.adjoint_check(D.F, D.V, D.gram):
        fails.append("<Fx,y> != <x,Vy>^p")
    return fails


def validate(D: DieudonneModule) -> bool:
    return not axiom_failures(D)


def conjugate(D: DieudonneModule, M: np.ndarray) -> DieudonneModule:
    """Transport D along the symplectic change of basis v -> M v."""
    ctx = D.ctx
    if not ffalg.is_symplectic(ctx, M, D.gram):
        raise ValueError("M does not preserve the pairing")
    Minv = _inverse(ctx, M)
    newF = ffalg.mat_mul(ctx, M, ffalg.mat_mul(ctx, D.F.matrix, ctx.afrob(Minv, 1)))
    newV = ffalg.mat_mul(ctx, M, ffalg.mat_mul(ctx, D.V.matrix, ctx.afrob(Minv, -1)))
    return DieudonneModule(D.g, ctx, SemilinearMap(ctx, newF, 1), SemilinearMap(ctx, newV, -1), D.gram)


def _inverse(ctx: FieldCtx, M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    aug = np.concatenate([M, ffalg.identity(ctx, n)], axis=1)
    R, piv = ffalg.rref(ctx, aug)
    if piv[:n] != tuple(range(n)):
        raise ValueError("matrix not invertible")
    return R[:, n:].copy()


@dataclass(frozen=True)
class CanonicalFiltration:
    chain: tuple[Subspace, ...]  # 0 = W_0 < ... < W_2r = D
    rho: tuple[int, ...]
    v: tuple[int, ...]  # F(W_j) = W_{v(j)}

    @property
    def r(self) -> int:
        return (len(self.chain) - 1) // 2


def canonical_filtration(D: DieudonneModule) -> CanonicalFiltration:
    """Close {0, D} under W -> F(W) and W -> W^perp and read off (rho, v).

    The closure is finite: every new subspace is an F-image or a perp of an
    existing one, and there are at most 2^{2g} candidate dimensions; in
    practice the loop stabilizes after a few sweeps.
    """
    ctx, n = D.ctx, 2 * D.g
    spaces: dict[bytes, Subspace] = {}
    for W in (Subspace.zero(ctx, n), Subspace.full(ctx, n)):
        spaces[W.key()] = W
    while True:
        new = []
        for W in spaces.values():
            for img in (D.F.apply_space(W), ffalg.perp(W, D.gram)):
                if img.key() not in spaces:
                    new.append(img)
        if not new:
            break
        for W in new:
            spaces[W.key()] = W
    chain = sorted(spaces.values(), key=lambda W: W.dim)
    for a, b in zip(chain, chain[1:]):
        if a.dim == b.dim or not b.contains_space(a):
            raise ValueError("canonical subspaces do not form a chain; invalid module")
    m = len(chain)
    if m % 2 != 1:
        raise ValueError("chain has even length; invalid module")
    r = (m - 1) // 2
    index = {W.key(): j for j, W in enumerate(chain)}
    for j, W in enumerate(chain):
        if index[ffalg.perp(W, D.gram).key()] != 2 * r - j:
            raise ValueError("perp does not reverse the chain; invalid module")
    v = []
    for W in chain:
        img = D.F.apply_space(W)
        j = index.get(img.key())
        if j is None:
            raise ValueError("F image escapes the chain; invalid module")
        v.append(j)
    if set(v) != set(range(r + 1)):
        raise ValueError("v is not surjective onto 0..r; invalid module")
    return CanonicalFiltration(tuple(chain), tuple(W.dim for W in chain), tuple(v))


def eo_type(D: DieudonneModule) -> FinalSequence:
    """The final sequence of D, via the psi-recursion on (rho, v)."""
    filt = canonical_filtration(D)
    g, rho, v = D.g, filt.rho, filt.v
    psi = [0] * (2 * g + 1)
    for i in range(2 * filt.r):
        lo, hi = rho[i], rho[i + 1]
        if v[i + 1] == v[i]:
            for j in range(lo + 1, hi + 1):
                psi[j] = psi[lo]
        elif v[i + 1] > v[i]:
            for j in range(lo + 1, hi + 1):
                psi[j] = psi[lo] + (j - lo)
        else:
            raise AssertionError("v decreased along the chain")
    return FinalSequence(tuple(psi))


def dim_im_v2(D: DieudonneModule) -> int:
    return D.V.compose(D.V).image().dim


def a_number(D: DieudonneModule) -> int:
    """g - dim im V^2; cross-checked against g - psi(g) of the EO type."""
    a = D.g - dim_im_v2(D)
    if a != D.g - eo_type(D).psi[D.g]:
        raise AssertionError("a-number formulas disagree")
    return a


def p_rank_mod(D: DieudonneModule) -> int:
    """Dimension of the summand where F is bijective (stabilized image of F)."""
    return D.F.stable_image().dim


# -- Harashita supersingular normal forms --------------------------------------

@dataclass(frozen=True)
class HarashitaForm:
    """Data (eps, T) of the mod-p supersingular normal form.

    eps in GF(p^2)^x with eps^sigma = -eps; T strictly lower triangular with
    T wbar symmetric, wbar the antidiagonal.  The module it generates has
    a-number g - rank(T).
    """

    g: int
    ctx: FieldCtx
    eps: int
    T: np.ndarray

    def __post_init__(self):
        ctx, g = self.ctx, self.g
        if ctx.k % 2 != 0 and ctx.p != 2:
            raise ValueError("field must contain GF(p^2)")
        if self.eps == 0 or ctx.frob(self.eps) != ctx.neg(self.eps):
            raise ValueError("eps must satisfy eps^sigma = -eps, eps != 0")
        if not ctx.in_subfield(self.eps, 1 if ctx.k % 2 else 2):
            raise ValueError("eps must lie in GF(p^2)")
        if self.T.shape != (g, g):
            raise ValueError("T must be g x g")
        if any(self.T[i, j] for i in range(g) for j in range(g) if j >= i):
            raise ValueError("T must be strictly lower triangular")
        Tw = self.T[:, ::-1]
        if not np.array_equal(Tw, Tw.T):
            raise ValueError("T wbar must be symmetric")


def default_eps(ctx: FieldCtx) -> int:
    """The first code in GF(p^2) with eps^sigma = -eps (eps = 1 when p = 2)."""
    sub = 2 if ctx.k % 2 == 0 else 1
    for a in range(1, ctx.q):
        if ctx.in_subfield(a, min(sub, ctx.k)) and ctx.frob(a) == ctx.neg(a):
            return a
    raise ValueError("no suitable eps in this field")


def harashita_module(h: HarashitaForm) -> DieudonneModule:
    """F = [[T, 0], [eps*wbar, 0]], V = [[0, 0], [eps*wbar, wbar T^{sigma^-1} wbar]]."""
    ctx, g = h.ctx, h.g
    n = 2 * g
    wbar = ffalg.zeros(ctx, g, g)
    for i in range(g):
        wbar[i, g - 1 - i] = 1
    eps_w = ctx.amul(np.array(h.eps, dtype=ctx.dtype), wbar)
    AF = ffalg.zeros(ctx, n, n)
    AF[:g, :g] = h.T
    AF[g:, :g] = eps_w
    AV = ffalg.zeros(ctx, n, n)
    AV[g:, :g] = eps_w
    AV[g:, g:] = ffalg.mat_mul(ctx, wbar, ffalg.mat_mul(ctx, ctx.afrob(h.T, -1), wbar))
    D = DieudonneModule(
        g, ctx, SemilinearMap(ctx, AF, 1), SemilinearMap(ctx, AV, -1), ffalg.standard_gram(ctx, g)
    )
    fails = axiom_failures(D)
    if fails:
        raise ValueError(f"harashita data produced an invalid module: {fails}")
    return D


def harashita_forms(ctx: FieldCtx, g: int):
    """All HarashitaForm over ctx with the default eps (small fields only)."""
    eps = default_eps(ctx)
    free: list[tuple[int, int]] = []
    seenpos = set()
    for i in range(g):
        for j in range(i):
            mirror = (g - 1 - j, g - 1 - i)
            if (i, j) in seenpos or mirror in seenpos:
                continue
            seenpos.add((i, j))
            free.append((i, j))
    import itertools

    for vals in itertools.product(range(ctx.q), repeat=len(free)):
        T = ffalg.zeros(ctx, g, g)
        for (i, j), val in zip(free, vals):
            T[i, j] = val
            mi, mj = g - 1 - j, g - 1 - i
            if (mi, mj) != (i, j):
                T[mi, mj] = val
        yield HarashitaForm(g, ctx, eps, T)

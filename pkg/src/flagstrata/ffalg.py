"""Exact arithmetic in GF(p^k) plus the small linear algebra the enumerator needs.

Field elements are integer codes in [0, q): the polynomial sum(c_i t^i) is
packed as sum(c_i p^i), so GF(p) occupies the codes 0..p-1 in every extension.
All arithmetic is table driven (q <= a few thousand), which keeps scalar code
exact and lets the batched enumeration engine in _batch.py run the same
operations as numpy gathers.

Matrices are numpy arrays of codes; vectors are 1-d arrays.  Maps act on
column vectors, subspaces store row-span bases in canonical reduced row
echelon form so equal subspaces compare equal bytewise.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field

import numpy as np

from .eo import FinalElement, jump_positions

# Fixed moduli (coefficient lists, low degree first, monic) for the (p, k)
# the package exercises.  These are the Conway polynomials, so t is always a
# generator and the tables are reproducible across runs and machines.
FIXED_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 1): (3, 1),
    (5, 2): (2, 4, 1),
    (7, 1): (4, 1),
    (7, 2): (3, 6, 1),
}


def _poly_mul_mod(a: tuple[int, ...], b: tuple[int, ...], mod: tuple[int, ...], p: int) -> tuple[int, ...]:
    k = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                prod[i + j] = (prod[i + j] + ca * cb) % p
    for deg in range(len(prod) - 1, k - 1, -1):
        c = prod[deg]
        if c:
            prod[deg] = 0
            for j in range(k + 1):
                prod[deg - k + j] = (prod[deg - k + j] - c * mod[j]) % p
    out = prod[:k] + [0] * (k - len(prod[:k]))
    return tuple(out)


def _digits(code: int, p: int, k: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        out.append(code % p)
        code //= p
    return tuple(out)


def _code(digits, p: int) -> int:
    out = 0
    for d in reversed(tuple(digits)):
        out = out * p + int(d)
    return out


def _is_irreducible(mod: tuple[int, ...], p: int) -> bool:
    # t^(p^i) != t for i < k and t^(p^k) == t, checked by repeated powering.
    k = len(mod) - 1
    t = tuple([0, 1] + [0] * (k - 2)) if k >= 2 else (0,)
    if k == 1:
        return True
    cur = t
    for i in range(1, k + 1):
        nxt = cur
        for _ in range(1):
            # cur^p by square-and-multiply on the exponent p
            acc = (1,) + (0,) * (k - 1)
            base = cur
            e = p
            while e:
                if e & 1:
                    acc = _poly_mul_mod(acc, base, mod, p)
                base = _poly_mul_mod(base, base, mod, p)
                e >>= 1
            nxt = acc
        cur = nxt
        if i < k and cur == t:
            return False
    return cur == t


def _find_modulus(p: int, k: int) -> tuple[int, ...]:
    if (p, k) in FIXED_MODULI:
        return FIXED_MODULI[(p, k)]
    if k == 1:
        return (1, 1)
    for code in range(p**k):
        mod = _digits(code, p, k) + (1,)
        if _is_irreducible(mod, p):
            return mod
    raise ValueError(f"no irreducible polynomial of degree {k} over GF({p})")


class FieldCtx:
    """Arithmetic context for GF(p^k) with precomputed operation tables."""

    def __init__(self, p: int, k: int, modulus: tuple[int, ...] | None = None):
        if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ValueError(f"p={p} is not prime")
        if k < 1:
            raise ValueError("k must be positive")
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = tuple(modulus) if modulus is not None else _find_modulus(p, k)
        if len(self.modulus) != k + 1 or self.modulus[k] != 1:
            raise ValueError("modulus must be monic of degree k")
        self.dtype = np.uint8 if self.q <= 256 else np.uint16
        self._build_tables()

    def _build_tables(self) -> None:
        p, k, q = self.p, self.k, self.q
        # multiplication of codes via polynomial arithmetic mod modulus
        mul_code = {}

        def mul_raw(a: int, b: int) -> int:
            key = (a, b) if a <= b else (b, a)
            got = mul_code.get(key)
            if got is None:
                got = _code(_poly_mul_mod(_digits(a, p, k), _digits(b, p, k), self.modulus, p), p)
                mul_code[key] = got
            return got

        # find a generator (t itself for Conway moduli) and build exp/log
        exp = None
        for gen in range(2, q) if q > 2 else [1]:
            seen = [0] * q
            cur, powers = 1, []
            ok = True
            for _ in range(q - 1):
                if seen[cur]:
                    ok = False
                    break
                seen[cur] = 1
                powers.append(cur)
                cur = mul_raw(cur, gen)
            if ok and cur == 1:
                exp = powers
                break
        if exp is None:
            raise RuntimeError("no generator found")
        self.EXP = np.array(exp + exp, dtype=self.dtype)  # doubled: no mod needed for a+b
        log = np.zeros(q, dtype=np.int64)
        for i, v in enumerate(exp):
            log[v] = i
        self.LOG = log

        lg = log[1:]
        mul = np.zeros((q, q), dtype=self.dtype)
        mul[1:, 1:] = self.EXP[lg[:, None] + lg[None, :]]
        self.MUL = mul

        dig = np.zeros((q, k), dtype=np.int64)
        c = np.arange(q)
        for i in range(k):
            dig[:, i] = c % p
            c = c // p
        weights = p ** np.arange(k)
        add = ((dig[:, None, :] + dig[None, :, :]) % p) @ weights
        self.ADD = add.astype(self.dtype)
        self.NEG = (((-dig) % p) @ weights).astype(self.dtype)

        inv = np.zeros(q, dtype=self.dtype)
        inv[1:] = self.EXP[(q - 1) - lg]
        self.INV = inv

        frob = np.zeros(q, dtype=self.dtype)
        frob[1:] = self.EXP[(lg * p) % (q - 1)]
        self.FRB = frob
        frbi = np.zeros(q, dtype=self.dtype)
        frbi[self.FRB] = np.arange(q, dtype=self.dtype)
        self.FRBI = frbi

    # -- scalar ops ---------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        return int(self.ADD[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.ADD[a, self.NEG[b]])

    def neg(self, a: int) -> int:
        return int(self.NEG[a])

    def mul(self, a: int, b: int) -> int:
        return int(self.MUL[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return int(self.INV[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def frob(self, a: int, e: int = 1) -> int:
        """sigma^e(a) where sigma is x -> x^p; e may be negative."""
        e %= self.k
        v = int(a)
        for _ in range(e):
            v = int(self.FRB[v])
        return v

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e > 0 else 1
        lg = int(self.LOG[a])
        return int(self.EXP[(lg * e) % (self.q - 1)])

    def elements(self) -> range:
        return range(self.q)

    def in_subfield(self, a: int, deg: int) -> bool:
        """Whether a lies in the subfield GF(p^deg); requires deg | k."""
        if self.k % deg != 0:
            raise ValueError(f"GF({self.p}^{deg}) is not a subfield of GF({self.p}^{self.k})")
        return self.frob(a, deg) == int(a)

    # -- array ops (shared with the batched engine) --------------------------
    def aadd(self, A, B):
        if self.p == 2:
            return np.bitwise_xor(A, B)
        return self.ADD[A, B]

    def asub(self, A, B):
        if self.p == 2:
            return np.bitwise_xor(A, B)
        return self.ADD[A, self.NEG[B]]

    def amul(self, A, B):
        return self.MUL[A, B]

    def afrob(self, A, e: int = 1):
        e %= self.k
        out = A
        for _ in range(e):
            out = self.FRB[out]
        return out

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.k})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldCtx)
            and (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))


@functools.lru_cache(maxsize=None)
def field(p: int, k: int) -> FieldCtx:
    return FieldCtx(p, k)


# -- matrices over a FieldCtx -------------------------------------------------

def zeros(ctx: FieldCtx, r: int, c: int) -> np.ndarray:
    return np.zeros((r, c), dtype=ctx.dtype)


def identity(ctx: FieldCtx, n: int) -> np.ndarray:
    m = zeros(ctx, n, n)
    np.fill_diagonal(m, 1)
    return m


def mat(ctx: FieldCtx, rows) -> np.ndarray:
    """Build a matrix from integer entries, mapping small negatives via -1 -> p-1."""
    a = np.array(rows, dtype=np.int64)
    a = np.where(a < 0, np.int64(ctx.NEG[-a]), a)
    return a.astype(ctx.dtype)


def mat_mul(ctx: FieldCtx, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    r, m = A.shape
    m2, c = B.shape
    assert m == m2
    out = zeros(ctx, r, c)
    for l in range(m):
        out = ctx.aadd(out, ctx.amul(A[:, l][:, None], B[l, :][None, :]))
    return out


def mat_vec(ctx: FieldCtx, A: np.ndarray, v: np.ndarray) -> np.ndarray:
    return mat_mul(ctx, A, v.reshape(-1, 1))[:, 0]


def rref(ctx: FieldCtx, A: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns; rows of zeros are dropped."""
    R = A.astype(ctx.dtype).copy()
    r, c = R.shape
    pivots = []
    row = 0
    for col in range(c):
        piv = None
        for i in range(row, r):
            if R[i, col]:
                piv = i
                break
        if piv is None:
            continue
        if piv != row:
            R[[row, piv]] = R[[piv, row]]
        R[row] = ctx.amul(R[row], ctx.INV[R[row, col]])
        for i in range(r):
            if i != row and R[i, col]:
                R[i] = ctx.asub(R[i], ctx.amul(R[i, col], R[row]))
        pivots.append(col)
        row += 1
        if row == r:
            break
    return R[:row].copy(), tuple(pivots)


def rank(ctx: FieldCtx, A: np.ndarray) -> int:
    return rref(ctx, A)[0].shape[0]


def null_space(ctx: FieldCtx, A: np.ndarray) -> np.ndarray:
    """Rows spanning {x : A x = 0}, in canonical reduced echelon form."""
    R, piv = rref(ctx, A)
    c = A.shape[1]
    free = [j for j in range(c) if j not in piv]
    basis = zeros(ctx, len(free), c)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row_i, pcol in enumerate(piv):
            basis[i, pcol] = ctx.neg(int(R[row_i, f]))
    return rref(ctx, basis)[0] if len(free) else basis


def solve_particular(ctx: FieldCtx, A: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """One solution x of A x = b, or None if inconsistent."""
    r, c = A.shape
    aug = np.concatenate([A, b.reshape(-1, 1)], axis=1)
    R, piv = rref(ctx, aug)
    if c in piv:
        return None
    x = np.zeros(c, dtype=ctx.dtype)
    for row_i, pcol in enumerate(piv):
        x[pcol] = R[row_i, c]
    return x


@dataclass(frozen=True)
class Subspace:
    """Row-span of a canonical reduced-echelon basis inside ctx^n."""

    ctx: FieldCtx
    n: int
    basis: np.ndarray = dc_field(compare=False)

    @staticmethod
    def from_vectors(ctx: FieldCtx, n: int, vectors) -> "Subspace":
        arr = np.array(vectors, dtype=ctx.dtype).reshape(-1, n)
        return Subspace(ctx, n, rref(ctx, arr)[0])

    @staticmethod
    def zero(ctx: FieldCtx, n: int) -> "Subspace":
        return Subspace(ctx, n, zeros(ctx, 0, n))

    @staticmethod
    def full(ctx: FieldCtx, n: int) -> "Subspace":
        return Subspace(ctx, n, identity(ctx, n))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def key(self) -> bytes:
        return self.basis.tobytes()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.n == other.n
            and self.basis.shape == other.basis.shape
            and bool(np.all(self.basis == other.basis))
        )

    def __hash__(self) -> int:
        return hash((self.n, self.key()))

    def contains(self, v: np.ndarray) -> bool:
        if not np.any(v):
            return True
        stacked = np.concatenate([self.basis, v.reshape(1, -1)], axis=0)
        return rank(self.ctx, stacked) == self.dim

    def contains_space(self, other: "Subspace") -> bool:
        if other.dim == 0:
            return True
        stacked = np.concatenate([self.basis, other.basis], axis=0)
        return rank(self.ctx, stacked) == self.dim

    def sum(self, other: "Subspace") -> "Subspace":
        stacked = np.concatenate([self.basis, other.basis], axis=0)
        return Subspace.from_vectors(self.ctx, self.n, stacked)

    def intersect(self, other: "Subspace") -> "Subspace":
        # dim(A&B) via the check matrices: x in A&B iff [Z_A; Z_B] x = 0
        Z = np.concatenate([self.check_matrix(), other.check_matrix()], axis=0)
        return Subspace(self.ctx, self.n, null_space(self.ctx, Z))

    def check_matrix(self) -> np.ndarray:
        """Rows Z with: x in self iff Z x = 0."""
        return null_space(self.ctx, self.basis)

    def vectors(self):
        """All vectors of the subspace (small fields only)."""
        ctx, d = self.ctx, self.dim
        for code in range(ctx.q**d):
            coeffs = []
            c = code
            for _ in range(d):
                coeffs.append(c % ctx.q)
                c //= ctx.q
            v = np.zeros(self.n, dtype=ctx.dtype)
            for coeff, row in zip(coeffs, self.basis):
                v = ctx.aadd(v, ctx.amul(np.array(coeff, dtype=ctx.dtype), row))
            yield v

    def projective_reps(self):
        """One representative per line of the subspace (first nonzero coeff 1)."""
        ctx, d = self.ctx, self.dim
        for j in range(d):
            tail = d - 1 - j
            for code in range(ctx.q**tail):
                coeffs = [0] * j + [1]
                c = code
                for _ in range(tail):
                    coeffs.append(c % ctx.q)
                    c //= ctx.q
                v = np.zeros(self.n, dtype=ctx.dtype)
                for coeff, row in zip(coeffs, self.basis):
                    v = ctx.aadd(v, ctx.amul(np.array(coeff, dtype=ctx.dtype), row))
                yield v


@dataclass(frozen=True)
class SemilinearMap:
    """v -> A sigma^e(v) with sigma the p-power Frobenius, e in {+1, -1, 0}."""

    ctx: FieldCtx
    matrix: np.ndarray
    twist: int

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def apply_vec(self, v: np.ndarray) -> np.ndarray:
        return mat_vec(self.ctx, self.matrix, self.ctx.afrob(v, self.twist))

    def apply_space(self, W: Subspace) -> Subspace:
        if W.dim == 0:
            return Subspace.zero(self.ctx, self.n)
        imgs = mat_mul(self.ctx, self.matrix, self.ctx.afrob(W.basis, self.twist).T).T
        return Subspace.from_vectors(self.ctx, self.n, imgs)

    def image(self) -> Subspace:
        return Subspace.from_vectors(self.ctx, self.n, self.matrix.T)

    def kernel(self) -> Subspace:
        # A sigma^e(v) = 0  iff  v in sigma^{-e}(null A); Frobenius of an
        # echelon basis is still echelon, so the result stays canonical.
        nb = null_space(self.ctx, self.matrix)
        return Subspace(self.ctx, self.n, self.ctx.afrob(nb, -self.twist))

    def preimage(self, W: Subspace) -> Subspace:
        Z = W.check_matrix()
        pre = null_space(self.ctx, mat_mul(self.ctx, Z, self.matrix))
        return Subspace(self.ctx, self.n, self.ctx.afrob(pre, -self.twist))

    def compose(self, other: "SemilinearMap") -> "SemilinearMap":
        # (self . other)(v) = A sigma^e(B) sigma^{e+f}(v)
        m = mat_mul(self.ctx, self.matrix, self.ctx.afrob(other.matrix, self.twist))
        return SemilinearMap(self.ctx, m, self.twist + other.twist)

    def stable_image(self) -> Subspace:
        """Intersection of the images of all iterates (the bijective summand)."""
        cur = Subspace.full(self.ctx, self.n)
        while True:
            nxt = self.apply_space(cur)
            if nxt.dim == cur.dim:
                return nxt
            cur = nxt


def apply(phi: SemilinearMap, W: Subspace) -> Subspace:
    return phi.apply_space(W)


def image(phi: SemilinearMap) -> Subspace:
    return phi.image()


def kernel(phi: SemilinearMap) -> Subspace:
    return phi.kernel()


# -- symplectic structure ------------------------------------------------------

def standard_gram(ctx: FieldCtx, g: int) -> np.ndarray:
    """Gram matrix of <e_i, e_{g+j}> = delta_ij, <e_i,e_j> = <e_{g+i},e_{g+j}> = 0."""
    G = zeros(ctx, 2 * g, 2 * g)
    one = ctx.dtype(1)
    for i in range(g):
        G[i, g + i] = one
        G[g + i, i] = ctx.NEG[1]
    return G


def pair(ctx: FieldCtx, G: np.ndarray, x: np.ndarray, y: np.ndarray) -> int:
    return int(mat_mul(ctx, x.reshape(1, -1), mat_mul(ctx, G, y.reshape(-1, 1)))[0, 0])


def is_nondegenerate_alternating(ctx: FieldCtx, G: np.ndarray) -> bool:
    n = G.shape[0]
    if np.any(np.diagonal(G)):
        return False
    if not np.all(G.T == ctx.NEG[G]):
        return False
    return rank(ctx, G) == n


def perp(W: Subspace, G: np.ndarray) -> Subspace:
    """Orthogonal complement w.r.t. the alternating form with Gram matrix G."""
    ctx = W.ctx
    if not is_nondegenerate_alternating(ctx, G):
        raise ValueError("form must be nondegenerate alternating")
    if W.dim == 0:
        return Subspace.full(ctx, W.n)
    return Subspace(ctx, W.n, null_space(ctx, mat_mul(ctx, W.basis, G)))


def is_symplectic(ctx: FieldCtx, M: np.ndarray, G: np.ndarray) -> bool:
    return bool(np.all(mat_mul(ctx, M.T, mat_mul(ctx, G, M)) == G))


def random_symplectic(ctx: FieldCtx, g: int, rng) -> np.ndarray:
    """A uniform-ish random M with M^t G M = G, built from a random symplectic basis."""
    n = 2 * g
    G = standard_gram(ctx, g)

    def rand_vec(space: Subspace) -> np.ndarray:
        while True:
            coeffs = [rng.randrange(ctx.q) for _ in range(space.dim)]
            v = np.zeros(n, dtype=ctx.dtype)
            for cf, row in zip(coeffs, space.basis):
                v = ctx.aadd(v, ctx.amul(np.array(cf, dtype=ctx.dtype), row))
            if np.any(v):
                return v

    vs, us = [], []
    space = Subspace.full(ctx, n)
    for _ in range(g):
        v = rand_vec(space)
        while True:
            u = rand_vec(space)
            c = pair(ctx, G, v, u)
            if c != 0:
                break
        u = mat_vec(ctx, np.diag(np.full(n, ctx.INV[c], dtype=ctx.dtype)), u)
        vs.append(v)
        us.append(u)
        rows = np.array([mat_vec(ctx, G, v), mat_vec(ctx, G, u)])
        cond = np.concatenate([space.check_matrix(), rows], axis=0)
        space = Subspace(ctx, n, null_space(ctx, cond))
    M = np.stack(vs + us, axis=1)
    assert is_symplectic(ctx, M, G)
    return M


# -- the standard semilinear pair attached to a final element -----------------

def standard_fv(ctx: FieldCtx, w: FinalElement) -> tuple[SemilinearMap, SemilinearMap]:
    """The pullback pair (F_w, V_w) on ctx^{2g} in the standard basis.

    With m_1 < ... < m_g the jump positions of the final sequence of w and
    n_i = 2g+1-m_i: F_w kills e_{g+1}..e_{2g} and sends e_i to e_j (i = m_j)
    or e_{g+j} (i = n_j); V_w sends e_i to -e_{g+n_i} when n_i <= g and
    e_{g+i} to e_{g+m_i} when m_i <= g, all other basis vectors to 0.
    """
    g = w.g
    n2 = 2 * g
    ms = jump_positions(w)
    ns = [n2 + 1 - m for m in ms]
    AF = zeros(ctx, n2, n2)
    AV = zeros(ctx, n2, n2)
    one = ctx.dtype(1)
    for i in range(1, g + 1):
        if i in ms:
            j = ms.index(i) + 1
            AF[j - 1, i - 1] = one
        else:
            j = ns.index(i) + 1
            AF[g + j - 1, i - 1] = one
    for i in range(1, g + 1):
        m_i, n_i = ms[i - 1], ns[i - 1]
        if n_i <= g:
            AV[g + n_i - 1, i - 1] = ctx.NEG[1]
        if m_i <= g:
            AV[g + m_i - 1, g + i - 1] = one
    return SemilinearMap(ctx, AF, +1), SemilinearMap(ctx, AV, -1)


def adjoint_check(F: SemilinearMap, V: SemilinearMap, G: np.ndarray) -> bool:
    """Whether <F x, y> = <x, V y>^p holds (checked on all basis pairs)."""
    ctx = F.ctx
    if F.twist != 1 or V.twist != -1:
        raise ValueError("adjoint check expects twists +1 and -1")
    lhs = mat_mul(ctx, F.matrix.T, G)
    rhs = ctx.afrob(mat_mul(ctx, G, V.matrix), 1)
    return bool(np.all(lhs == rhs))

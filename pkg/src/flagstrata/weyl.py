"""Extended affine Weyl group of GSp_2g.

Elements are written t^lambda * omega with omega a signed permutation of
{1..2g} (omega(i) + omega(2g+1-i) = 2g+1) and lambda a coweight, i.e. an
integer vector with lambda_1 + lambda_2g = ... = lambda_g + lambda_{g+1}.
The simple affine generators are s_1..s_g in the finite Weyl group together
with s_0 = (1,2g) t^{(1,0,...,0,-1)}, and tau is the length-zero element
whose finite part swaps the two blocks.

Lengths come from a lazily grown breadth-first search over <s_0..s_g>, which
doubles as the source of lexicographically smallest reduced words; Bruhat
order uses the standard descent recursion on top of that.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

_LENGTH_SAFETY_RADIUS = 200


@dataclass(frozen=True)
class SignedPerm:
    images: tuple[int, ...]  # images[i] = pi(i+1)

    def __post_init__(self):
        n = len(self.images)
        if n % 2 != 0:
            raise ValueError("signed permutations act on 2g points")
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError("not a permutation of 1..2g")
        for i in range(1, n + 1):
            if self(i) + self(n + 1 - i) != n + 1:
                raise ValueError("w(i) + w(2g+1-i) = 2g+1 violated")

    @property
    def g(self) -> int:
        return len(self.images) // 2

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def mul(self, other: "SignedPerm") -> "SignedPerm":
        """(self . other)(i) = self(other(i))."""
        return SignedPerm(tuple(self(other(i)) for i in range(1, len(self.images) + 1)))

    def inv(self) -> "SignedPerm":
        n = len(self.images)
        images = [0] * n
        for i in range(1, n + 1):
            images[self(i) - 1] = i
        return SignedPerm(tuple(images))

    def is_identity(self) -> bool:
        return all(self(i) == i for i in range(1, len(self.images) + 1))

    def fixed_points(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, len(self.images) + 1) if self(i) == i)

    def act(self, lam: "Coweight") -> "Coweight":
        """omega . lambda, so that omega t^lambda omega^{-1} = t^{omega.lambda}."""
        w_inv = self.inv()
        return Coweight(tuple(lam.entries[w_inv(i) - 1] for i in range(1, len(self.images) + 1)))

    def cycles(self) -> str:
        n = len(self.images)
        seen, parts = set(), []
        for start in range(1, n + 1):
            if start in seen or self(start) == start:
                seen.add(start)
                continue
            cyc, cur = [], start
            while cur not in seen:
                seen.add(cur)
                cyc.append(cur)
                cur = self(cur)
            parts.append("(" + "".join(str(c) for c in cyc) + ")")
        return "".join(parts) if parts else "()"


@dataclass(frozen=True)
class Coweight:
    entries: tuple[int, ...]

    def __post_init__(self):
        n = len(self.entries)
        if n % 2 != 0:
            raise ValueError("coweights have 2g entries")
        c = self.entries[0] + self.entries[-1]
        for i in range(n // 2):
            if self.entries[i] + self.entries[n - 1 - i] != c:
                raise ValueError("a_i + a_{2g+1-i} must be constant")

    @property
    def similitude(self) -> int:
        return self.entries[0] + self.entries[-1]

    def add(self, other: "Coweight") -> "Coweight":
        return Coweight(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def neg(self) -> "Coweight":
        return Coweight(tuple(-a for a in self.entries))

    def is_zero(self) -> bool:
        return not any(self.entries)


@dataclass(frozen=True)
class AffineElement:
    """t^lam * omega in the extended affine Weyl group."""

    lam: Coweight
    omega: SignedPerm

    def __post_init__(self):
        if len(self.lam.entries) != len(self.omega.images):
            raise ValueError("lambda and omega sizes differ")

    @property
    def g(self) -> int:
        return self.omega.g

    def compose(self, other: "AffineElement") -> "AffineElement":
        if self.g != other.g:
            raise ValueError("cannot compose elements of different g")
        return AffineElement(self.lam.add(self.omega.act(other.lam)), self.omega.mul(other.omega))

    def invert(self) -> "AffineElement":
        w_inv = self.omega.inv()
        return AffineElement(w_inv.act(self.lam.neg()), w_inv)

    def is_identity(self) -> bool:
        return self.lam.is_zero() and self.omega.is_identity()

    def as_dict(self, name: str | None = None) -> dict:
        d = {"lambda": list(self.lam.entries), "omega": list(self.omega.images)}
        if name is not None:
            d["name"] = name
        return d

    def to_json(self, name: str | None = None) -> str:
        return json.dumps(self.as_dict(name), sort_keys=True, separators=(",", ":"))


def identity(g: int) -> AffineElement:
    return AffineElement(Coweight((0,) * (2 * g)), SignedPerm(tuple(range(1, 2 * g + 1))))


def compose(x: AffineElement, y: AffineElement) -> AffineElement:
    return x.compose(y)


def invert(x: AffineElement) -> AffineElement:
    return x.invert()


def generators(g: int) -> tuple[list[AffineElement], AffineElement]:
    """The simple affine generators [s_0, s_1, ..., s_g] and tau."""
    if g < 1:
        raise ValueError("g must be positive")
    n = 2 * g
    gens = [None] * (g + 1)
    for i in range(1, g + 1):
        images = list(range(1, n + 1))
        if i == g:
            images[g - 1], images[g] = images[g], images[g - 1]
        else:
            images[i - 1], images[i] = images[i], images[i - 1]
            j = n - i
            images[j - 1], images[j] = images[j], images[j - 1]
        gens[i] = AffineElement(Coweight((0,) * n), SignedPerm(tuple(images)))
    # s_0 = (1,2g) t^{(1,0,..,0,-1)}, rewritten translation-first
    omega0 = SignedPerm(tuple([n] + list(range(2, n)) + [1]))
    mu0 = Coweight(tuple([1] + [0] * (n - 2) + [-1]))
    gens[0] = AffineElement(omega0.act(mu0), omega0)
    omega_tau = SignedPerm(tuple(list(range(g + 1, n + 1)) + list(range(1, g + 1))))
    mu_tau = Coweight(tuple([1] * g + [0] * g))
    tau = AffineElement(omega_tau.act(mu_tau), omega_tau)
    return gens, tau


def tau_element(g: int) -> AffineElement:
    return generators(g)[1]


def word_to_element(g: int, word) -> AffineElement:
    """s_{i_1 ... i_n} as an element of W_a (indices 0..g)."""
    gens, _ = generators(g)
    x = identity(g)
    for i in word:
        x = x.compose(gens[i])
    return x


# Reduced words used by the tables; adm_rank0 attaches these names after
# matching them against its own fixed-point-free enumeration.
ADM0_WORDS: dict[int, tuple[tuple[int, ...], ...]] = {
    1: ((),),
    2: ((), (1,), (2,), (0,), (2, 0)),
    3: (
        (),
        (0,), (1,), (2,), (3,),
        (1, 0), (2, 0), (3, 0), (0, 1), (2, 1), (3, 1), (1, 2), (3, 2), (2, 3),
        (0, 1, 0), (3, 1, 0), (1, 2, 0), (3, 2, 0), (2, 3, 0), (2, 0, 1),
        (3, 0, 1), (1, 2, 1), (2, 3, 1), (3, 1, 2), (3, 2, 3),
        (3, 0, 1, 0), (3, 1, 2, 0), (3, 2, 3, 0), (2, 3, 0, 1),
    ),
}


def word_name(word) -> str:
    word = tuple(word)
    return "tau" if not word else "s_" + "".join(str(i) for i in word) + ".tau"


class _Cayley:
    """Lazily grown BFS ball of <s_0..s_g> with lex-smallest reduced words."""

    def __init__(self, g: int):
        self.g = g
        self.gens = generators(g)[0]
        ident = identity(g)
        self.words: dict[AffineElement, tuple[int, ...]] = {ident: ()}
        self.frontier: list[AffineElement] = [ident]
        self.radius = 0

    def ensure_radius(self, r: int) -> None:
        while self.radius < r and self.frontier:
            nxt = []
            for x in sorted(self.frontier, key=lambda e: self.words[e]):
                for i, s in enumerate(self.gens):
                    y = x.compose(s)
                    if y not in self.words:
                        self.words[y] = self.words[x] + (i,)
                        nxt.append(y)
            self.frontier = nxt
            self.radius += 1

    def length_of(self, x: AffineElement) -> int:
        while x not in self.words:
            if self.radius > _LENGTH_SAFETY_RADIUS or not self.frontier:
                raise ValueError("element out of reach; not in W_a?")
            self.ensure_radius(self.radius + 1)
        return len(self.words[x])


_CAYLEY: dict[int, _Cayley] = {}


def _cayley(g: int) -> _Cayley:
    if g not in _CAYLEY:
        _CAYLEY[g] = _Cayley(g)
    return _CAYLEY[g]


def _wa_part(x: AffineElement) -> AffineElement:
    """x itself for x in W_a, x tau^{-1} for x in W_a tau; error otherwise."""
    c = x.lam.similitude
    if c == 0:
        return x
    if c == 1:
        return x.compose(tau_element(x.g).invert())
    raise ValueError("element lies in neither W_a nor W_a tau")


def length(x: AffineElement) -> int:
    """Coxeter length; for x = w_a tau this is l(w_a), so l(tau) = 0."""
    return _cayley(x.g).length_of(_wa_part(x))


def lex_min_word(x: AffineElement) -> tuple[int, ...]:
    """Lexicographically smallest reduced word of the W_a part of x."""
    y = _wa_part(x)
    cay = _cayley(x.g)
    cay.length_of(y)
    return cay.words[y]


_BRUHAT_MEMO: dict[tuple[AffineElement, AffineElement], bool] = {}


def bruhat_leq(x: AffineElement, y: AffineElement) -> bool:
    """Bruhat order, applied to the W_a parts of elements of W_a or W_a tau."""
    if x.g != y.g:
        raise ValueError("cannot compare different g")
    return _bruhat_wa(_wa_part(x), _wa_part(y))


def _bruhat_wa(x: AffineElement, y: AffineElement) -> bool:
    if x == y:
        return True
    key = (x, y)
    got = _BRUHAT_MEMO.get(key)
    if got is not None:
        return got
    lx, ly = length(x), length(y)
    if lx >= ly:
        res = False
    else:
        gens = generators(x.g)[0]
        res = None
        for s in gens:
            sy = s.compose(y)
            if length(sy) < ly:
                sx = s.compose(x)
                if length(sx) < lx:
                    res = _bruhat_wa(sx, sy)
                else:
                    res = _bruhat_wa(x, sy)
                break
        assert res is not None  # y != id has a left descent
    _BRUHAT_MEMO[key] = res
    return res


@dataclass(frozen=True)
class AdmissibleElement:
    element: AffineElement
    name: str
    length: int
    p_rank: int

    @property
    def lam(self) -> Coweight:
        return self.element.lam

    @property
    def omega(self) -> SignedPerm:
        return self.element.omega

    def as_dict(self) -> dict:
        return self.element.as_dict(self.name)


def lambda_of_omega(omega: SignedPerm) -> Coweight:
    """The inverse of the p-rank-0 bijection: lambda(i) = 0 iff omega^{-1}(i) > i."""
    w_inv = omega.inv()
    n = len(omega.images)
    return Coweight(tuple(0 if w_inv(i) > i else 1 for i in range(1, n + 1)))


def _all_signed_perms(g: int):
    n = 2 * g
    for perm in itertools.permutations(range(1, g + 1)):
        for signs in itertools.product((0, 1), repeat=g):
            images = [0] * n
            for i in range(1, g + 1):
                target = perm[i - 1] if signs[i - 1] == 0 else n + 1 - perm[i - 1]
                images[i - 1] = target
                images[n - i] = n + 1 - target
            yield SignedPerm(tuple(images))


def _adm0_names(g: int) -> dict[AffineElement, str]:
    names = {}
    for word in ADM0_WORDS.get(g, ()):
        x = word_to_element(g, word).compose(tau_element(g))
        names[x] = word_name(word)
    return names


def name_of(x: AffineElement) -> str:
    """Table name of an element of W_a tau (paper words where fixed, else lex-min)."""
    named = _adm0_names(x.g)
    if x in named:
        return named[x]
    return word_name(lex_min_word(x))


def adm_rank0(g: int) -> list[AdmissibleElement]:
    """The p-rank-0 admissible set: fixed-point-free omega with lambda(omega)."""
    named = _adm0_names(g)
    out = []
    for omega in _all_signed_perms(g):
        if omega.fixed_points():
            continue
        x = AffineElement(lambda_of_omega(omega), omega)
        name = named.get(x) or word_name(lex_min_word(x))
        out.append(AdmissibleElement(x, name, length(x), 0))
    out.sort(key=lambda a: (a.length, a.name))
    return out


def make_admissible(x: AffineElement) -> AdmissibleElement:
    return AdmissibleElement(x, name_of(x), length(x), p_rank_adm(x))


def p_rank_adm(x: AffineElement | AdmissibleElement) -> int:
    fixed = x.omega.fixed_points()
    if len(fixed) % 2 != 0:
        raise ValueError("odd fixed-point count: not a signed permutation?")
    return len(fixed) // 2


def n_set(x: AffineElement | AdmissibleElement) -> frozenset[int]:
    """N_x = {i : omega^2(i) < omega(i) < i}."""
    omega = x.omega
    n = len(omega.images)
    return frozenset(i for i in range(1, n + 1) if omega(omega(i)) < omega(i) < i)

"""Polynomial symplectic spinors and the symplectic Clifford multiplication.

Spinors are polynomials in ``x^1..x^l`` with Gaussian-rational coefficients,
stored sparsely by exponent tuple.  ``e_k`` (k < l) acts as ``i x^k`` and
``e_{k+l}`` as ``d/dx^k``.  The derived metaplectic action of sp(V, omega)
is the quadratic Clifford element

    m(A) = (i/2) sum_{a,b} (A omega^{-1})^{ab} e_a e_b

which is the unique Lie-algebra lift with ``[m(A), v.] = (Av).``.
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Sequence, Tuple

from .scalars import I, ONE, ZERO, Scalar, as_scalar
from .symplectic import SymplecticSpace, space

Monomial = Tuple[int, ...]
Terms = Dict[Monomial, Scalar]

__all__ = [
    "PolySpinor",
    "SpElement",
    "monomials",
    "clifford_terms",
    "cliff_apply",
    "clifford_mul",
    "meta_action",
    "parity_split",
    "random_spinor",
    "random_sp",
]


@lru_cache(maxsize=None)
def monomials(l: int, degree: int) -> Tuple[Monomial, ...]:
    """Exponent tuples of total degree ``degree``, x^1-heavy first."""
    out = []
    for combo in combinations_with_replacement(range(l), degree):
        e = [0] * l
        for k in combo:
            e[k] += 1
        out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def monomials_upto(l: int, cap: int) -> Tuple[Monomial, ...]:
    """Graded lexicographic list of exponents with ``|alpha| <= cap``."""
    return tuple(m for d in range(cap + 1) for m in monomials(l, d))


def clifford_terms(k: int, alpha: Monomial, l: int):
    """``e_k . x^alpha`` as a list of ``(coefficient, exponent)``."""
    if k < l:
        beta = list(alpha)
        beta[k] += 1
        return ((I, tuple(beta)),)
    j = k - l
    a = alpha[j]
    if a == 0:
        return ()
    beta = list(alpha)
    beta[j] -= 1
    return ((Scalar(a), tuple(beta)),)


def _acc(out: dict, key, x: Scalar):
    y = out.get(key)
    if y is None:
        out[key] = x
    else:
        y = y + x
        if y:
            out[key] = y
        else:
            del out[key]


def cliff_apply(k: int, terms: Terms, l: int) -> Terms:
    """Raw ``e_k`` action on a term dictionary."""
    out: Terms = {}
    for alpha, c in terms.items():
        for f, beta in clifford_terms(k, alpha, l):
            _acc(out, beta, f * c)
    return out


class PolySpinor:
    """Truncated polynomial spinor with a declared degree cap."""

    __slots__ = ("l", "terms", "cap")

    def __init__(self, l: int, terms=None, cap: int | None = None):
        self.l = l
        clean: Terms = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(alpha)
            if len(alpha) != l or min(alpha, default=0) < 0:
                raise ValueError(f"bad exponent {alpha} for l={l}")
            c = as_scalar(c)
            if c:
                clean[alpha] = c
        self.terms = clean
        top = self.degree()
        self.cap = top if cap is None else cap
        if top > self.cap:
            raise ValueError(f"term of degree {top} exceeds cap {self.cap}")

    @classmethod
    def monomial(cls, alpha: Sequence[int], coeff=1, cap: int | None = None) -> "PolySpinor":
        return cls(len(alpha), {tuple(alpha): coeff}, cap)

    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def parity(self):
        """0 or 1 if all terms share a degree parity, else ``None``."""
        ps = {sum(a) % 2 for a in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def __add__(self, other: "PolySpinor") -> "PolySpinor":
        out = dict(self.terms)
        for a, c in other.terms.items():
            _acc(out, a, c)
        return PolySpinor(self.l, out, max(self.cap, other.cap))

    def __neg__(self):
        return PolySpinor(self.l, {a: -c for a, c in self.terms.items()}, self.cap)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        c = as_scalar(c)
        return PolySpinor(self.l, {a: c * x for a, x in self.terms.items()}, self.cap)

    def __eq__(self, other):
        if not isinstance(other, PolySpinor):
            return NotImplemented
        return self.l == other.l and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "PolySpinor(0)"
        parts = []
        for a in sorted(self.terms, key=lambda a: (sum(a), [-x for x in a])):
            mono = "*".join(f"x{k + 1}^{e}" if e > 1 else f"x{k + 1}" for k, e in enumerate(a) if e)
            parts.append(f"({self.terms[a].pretty()}){'*' + mono if mono else ''}")
        return "PolySpinor(" + " + ".join(parts) + ")"


def _vector_coeffs(v, dim: int) -> List[Tuple[int, Scalar]]:
    if isinstance(v, int):
        if not 0 <= v < dim:
            raise IndexError(f"basis index {v} outside 0..{dim - 1}")
        return [(v, ONE)]
    if len(v) != dim:
        raise ValueError("vector has wrong dimension")
    return [(k, as_scalar(c)) for k, c in enumerate(v) if c]


def clifford_mul(v, s: PolySpinor) -> PolySpinor:
    """``v . s`` for a basis index or coordinate vector ``v``; cap grows by 1."""
    out: Terms = {}
    for k, c in _vector_coeffs(v, 2 * s.l):
        for beta, x in cliff_apply(k, s.terms, s.l).items():
            _acc(out, beta, c * x)
    return PolySpinor(s.l, out, s.cap + 1)


class SpElement:
    """An element of sp(V, omega) as a 2l x 2l Scalar matrix (A[row][col])."""

    __slots__ = ("space", "A", "quad")

    def __init__(self, A, sp_space: SymplecticSpace | None = None):
        n = len(A)
        self.space = sp_space or space(n // 2)
        if n != self.space.dim or any(len(row) != n for row in A):
            raise ValueError("matrix has wrong shape")
        self.A = tuple(tuple(as_scalar(x) for x in row) for row in A)
        if not self.space.is_sp(self.A):
            raise ValueError("matrix is not in sp(V, omega)")
        # (i/2) (A omega^{-1}); omega^{-1} as a matrix is -omega for the standard basis
        w = self.space.omega_matrix
        half_i = I / 2
        quad = {}
        for a in range(n):
            for b in range(n):
                s = ZERO
                for c in range(n):
                    if self.A[a][c] and w[c][b]:
                        s = s - self.A[a][c] * w[c][b]
                if s:
                    quad[(a, b)] = half_i * s
        self.quad = quad

    @classmethod
    def from_symmetric(cls, S, sp_space: SymplecticSpace) -> "SpElement":
        """``A = omega^{-1} S`` for symmetric ``S``; every sp element has this form."""
        n = sp_space.dim
        w = sp_space.omega_matrix
        A = [[sum((-w[a][c] * as_scalar(S[c][b]) for c in range(n)), ZERO) for b in range(n)] for a in range(n)]
        return cls(A, sp_space)

    def apply_vector(self, v: Sequence) -> List[Scalar]:
        n = self.space.dim
        return [sum((self.A[r][c] * as_scalar(v[c]) for c in range(n) if v[c]), ZERO) for r in range(n)]

    def bracket(self, other: "SpElement") -> "SpElement":
        n = self.space.dim
        A, B = self.A, other.A
        C = [[sum((A[r][k] * B[k][c] - B[r][k] * A[k][c] for k in range(n)), ZERO) for c in range(n)]
             for r in range(n)]
        return SpElement(C, self.space)

    def __add__(self, other):
        n = self.space.dim
        return SpElement([[self.A[r][c] + other.A[r][c] for c in range(n)] for r in range(n)], self.space)

    def scale(self, c):
        return SpElement([[as_scalar(c) * x for x in row] for row in self.A], self.space)

    def is_zero(self) -> bool:
        return not any(x for row in self.A for x in row)


def meta_terms(el: SpElement, terms: Terms, l: int) -> Terms:
    """Raw ``m(A)`` on a term dictionary."""
    out: Terms = {}
    for (a, b), q in el.quad.items():
        t = cliff_apply(a, cliff_apply(b, terms, l), l)
        for beta, x in t.items():
            _acc(out, beta, q * x)
    return out


def meta_action(el: SpElement, s: PolySpinor) -> PolySpinor:
    """Derived metaplectic action ``m(A) s``; Clifford order 2."""
    if el.space.l != s.l:
        raise ValueError("dimension mismatch")
    return PolySpinor(s.l, meta_terms(el, s.terms, s.l), s.cap + 2)


def parity_split(s: PolySpinor) -> Tuple[PolySpinor, PolySpinor]:
    """``(even part, odd part)`` by total degree."""
    even = {a: c for a, c in s.terms.items() if sum(a) % 2 == 0}
    odd = {a: c for a, c in s.terms.items() if sum(a) % 2 == 1}
    return PolySpinor(s.l, even, s.cap), PolySpinor(s.l, odd, s.cap)


def random_gaussian(rng: random.Random, bound: int = 3) -> Scalar:
    return Scalar(rng.randint(-bound, bound), rng.randint(-bound, bound))


def random_spinor(l: int, cap: int, rng: random.Random, n_terms: int = 6, parity=None) -> PolySpinor:
    pool = [m for m in monomials_upto(l, cap) if parity is None or sum(m) % 2 == parity]
    terms: Terms = {}
    for m in rng.sample(pool, min(n_terms, len(pool))):
        c = random_gaussian(rng)
        if c:
            terms[m] = c
    return PolySpinor(l, terms, cap)


def random_symmetric(n: int, rng: random.Random, bound: int = 3) -> List[List[Scalar]]:
    S = [[ZERO] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            S[a][b] = S[b][a] = Scalar(rng.randint(-bound, bound))
    return S


def random_sp(sp_space: SymplecticSpace, rng: random.Random, bound: int = 3) -> SpElement:
    """Random real sp element with small integer entries."""
    return SpElement.from_symmetric(random_symmetric(sp_space.dim, rng, bound), sp_space)


def clifford_commutator_defect(v: int, w: int, alpha: Monomial, l: int) -> Terms:
    """``v.w.s - w.v.s + i omega(v,w) s`` on ``s = x^alpha`` (zero when the Clifford relation holds)."""
    sp = space(l)
    s = {alpha: ONE}
    lhs = cliff_apply(v, cliff_apply(w, s, l), l)
    rhs = cliff_apply(w, cliff_apply(v, s, l), l)
    out = dict(lhs)
    for k, x in rhs.items():
        _acc(out, k, -x)
    om = sp.omega(v, w)
    if om:
        _acc(out, alpha, I * om)
    return out


def iter_basis_pairs(l: int) -> Iterable[Tuple[int, int]]:
    n = 2 * l
    return ((v, w) for v in range(n) for w in range(n))

"""Spinor-valued exterior forms and the operators X, Y, Sigma, Theta, rho'.

A basis element of ``Lambda^r V* (x) S`` is a key ``(I, alpha)``: ``I`` a
strictly increasing tuple of form indices (``eps^{I_0} ^ eps^{I_1} ^ ...``)
and ``alpha`` a spinor exponent.  Operators act on the sparse term dictionary
directly and never truncate; :meth:`GradedOperator.matrix` assembles exact
block matrices between ``(form degree, cap, parity)`` bases.
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import combinations
from typing import Callable, Dict, List, Optional, Tuple

from .fock import SpElement, _acc, clifford_terms, meta_terms, monomials_upto, random_gaussian
from .linalg import SparseMatrix
from .scalars import I, ONE, ZERO, Scalar, as_scalar
from .symplectic import SymplecticSpace, Tensor, space

Key = Tuple[Tuple[int, ...], Tuple[int, ...]]
FormTerms = Dict[Key, Scalar]

__all__ = [
    "SpinorForm",
    "RicciLikeTensor",
    "GradedOperator",
    "form_basis",
    "op_X",
    "op_Y",
    "op_Sigma",
    "op_Theta",
    "rho_prime",
    "omega_wedge",
    "omega_contract",
    "quadratic_curvature_operator",
    "random_form",
    "weight",
    "commutator",
    "anticommutator",
]


def wedge_index(j: int, I_: Tuple[int, ...]):
    """``eps^j ^ eps^I`` as ``(sign, J)`` or ``None``."""
    if j in I_:
        return None
    p = 0
    for x in I_:
        if x < j:
            p += 1
        else:
            break
    return (-1 if p % 2 else 1), I_[:p] + (j,) + I_[p:]


def contract_index(i: int, I_: Tuple[int, ...]):
    """``iota_{e_i} eps^I`` as ``(sign, J)`` or ``None``."""
    for p, x in enumerate(I_):
        if x == i:
            return (-1 if p % 2 else 1), I_[:p] + I_[p + 1:]
    return None


def _sort_sign(seq: List[int]):
    if len(set(seq)) != len(seq):
        return None
    s = list(seq)
    sign = 1
    for a in range(len(s)):
        for b in range(len(s) - 1 - a):
            if s[b] > s[b + 1]:
                s[b], s[b + 1] = s[b + 1], s[b]
                sign = -sign
    return sign, tuple(s)


def weight(key: Key, l: int) -> Tuple[int, ...]:
    """Torus weight preserved by X, Y and every sp-equivariant map.

    ``mu_k = alpha_k - [k in I] + [k + l in I]``; its sum is the block level.
    """
    I_, alpha = key
    mu = list(alpha)
    for k in I_:
        if k < l:
            mu[k] -= 1
        else:
            mu[k - l] += 1
    return tuple(mu)


class SpinorForm:
    """Element of ``Lambda^r V* (x) S_{<= cap}`` (homogeneous in r)."""

    __slots__ = ("l", "r", "terms", "cap")

    def __init__(self, l: int, r: int, terms=None, cap: Optional[int] = None):
        self.l, self.r = l, r
        clean: FormTerms = {}
        n = 2 * l
        for (I_, alpha), c in (terms or {}).items():
            I_, alpha = tuple(I_), tuple(alpha)
            if len(I_) != r or any(a >= b for a, b in zip(I_, I_[1:])) or any(not 0 <= k < n for k in I_):
                raise ValueError(f"form index {I_} is not a strictly increasing {r}-tuple")
            if len(alpha) != l or min(alpha, default=0) < 0:
                raise ValueError(f"bad exponent {alpha}")
            c = as_scalar(c)
            if c:
                clean[(I_, alpha)] = c
        self.terms = clean
        top = self.degree()
        self.cap = top if cap is None else cap
        if top > self.cap:
            raise ValueError(f"term of degree {top} exceeds cap {self.cap}")

    @classmethod
    def _wrap(cls, l, r, terms, cap):
        f = object.__new__(cls)
        f.l, f.r, f.terms, f.cap = l, r, terms, cap
        return f

    def degree(self) -> int:
        return max((sum(a) for _, a in self.terms), default=0)

    def __add__(self, other: "SpinorForm") -> "SpinorForm":
        if not other.terms:
            return self
        if self.terms and self.r != other.r:
            raise ValueError("form degrees differ")
        out = dict(self.terms)
        for k, c in other.terms.items():
            _acc(out, k, c)
        r = self.r if self.terms else other.r
        return SpinorForm._wrap(self.l, r, out, max(self.cap, other.cap))

    def __neg__(self):
        return SpinorForm._wrap(self.l, self.r, {k: -c for k, c in self.terms.items()}, self.cap)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        c = as_scalar(c)
        if not c:
            return SpinorForm._wrap(self.l, self.r, {}, self.cap)
        return SpinorForm._wrap(self.l, self.r, {k: c * x for k, x in self.terms.items()}, self.cap)

    def __eq__(self, other):
        if not isinstance(other, SpinorForm):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return self.l == other.l and self.r == other.r and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def blocks(self) -> Dict[Tuple[int, ...], "SpinorForm"]:
        """Split by torus weight."""
        out: Dict[Tuple[int, ...], FormTerms] = {}
        for k, c in self.terms.items():
            out.setdefault(weight(k, self.l), {})[k] = c
        return {mu: SpinorForm._wrap(self.l, self.r, t, self.cap) for mu, t in out.items()}

    def __repr__(self):
        if not self.terms:
            return "SpinorForm(0)"
        parts = []
        for (I_, a), c in sorted(self.terms.items()):
            eps = "^".join(f"e{k + 1}" for k in I_) or "1"
            mono = "*".join(f"x{k + 1}^{e}" for k, e in enumerate(a) if e) or "1"
            parts.append(f"({c.pretty()}) {eps}(x){mono}")
        return f"SpinorForm(r={self.r}: " + " + ".join(parts) + ")"


class RicciLikeTensor:
    """Symmetric ``sigma_{ij}`` with its raised variants cached."""

    __slots__ = ("space", "sigma", "mixed", "upper")

    def __init__(self, sigma, sp_space: Optional[SymplecticSpace] = None):
        n = len(sigma)
        self.space = sp_space or space(n // 2)
        self.sigma = tuple(tuple(as_scalar(x) for x in row) for row in sigma)
        if any(self.sigma[i][j] != self.sigma[j][i] for i in range(n) for j in range(n)):
            raise ValueError("sigma must be symmetric")
        T = {(i, j): x for i, row in enumerate(self.sigma) for j, x in enumerate(row) if x}
        up1 = self.space.raise_index(T, 0)            # sigma^i_j
        self.mixed = up1
        self.upper = self.space.raise_index(up1, 1)   # sigma^{ij}

    @classmethod
    def zero(cls, l: int) -> "RicciLikeTensor":
        return cls([[ZERO] * (2 * l) for _ in range(2 * l)], space(l))

    @classmethod
    def random(cls, l: int, rng: random.Random, bound: int = 3) -> "RicciLikeTensor":
        from .fock import random_symmetric
        return cls(random_symmetric(2 * l, rng, bound), space(l))

    def as_tensor(self) -> Tensor:
        return {(i, j): x for i, row in enumerate(self.sigma) for j, x in enumerate(row) if x}

    def is_zero(self) -> bool:
        return not any(x for row in self.sigma for x in row)

    def __add__(self, other):
        n = len(self.sigma)
        return RicciLikeTensor([[self.sigma[i][j] + other.sigma[i][j] for j in range(n)] for i in range(n)],
                               self.space)

    def scale(self, c):
        return RicciLikeTensor([[as_scalar(c) * x for x in row] for row in self.sigma], self.space)


# --- raw operator kernels ----------------------------------------------------

def _X_raw(terms: FormTerms, l: int) -> FormTerms:
    out: FormTerms = {}
    for (I_, alpha), c in terms.items():
        for k in range(2 * l):
            w = wedge_index(k, I_)
            if w is None:
                continue
            sg, J = w
            for f, beta in clifford_terms(k, alpha, l):
                _acc(out, (J, beta), f * c if sg > 0 else -(f * c))
    return out


def _Y_raw(terms: FormTerms, l: int) -> FormTerms:
    sp = space(l)
    winv = sp.omega_inv_matrix
    out: FormTerms = {}
    for (I_, alpha), c in terms.items():
        for i in I_:
            j = sp.partner[i]
            om = winv[i][j]
            sg, J = contract_index(i, I_)
            for f, beta in clifford_terms(j, alpha, l):
                x = om * f * c
                _acc(out, (J, beta), x if sg > 0 else -x)
    return out


def _Sigma_raw(terms: FormTerms, l: int, sigma: RicciLikeTensor) -> FormTerms:
    out: FormTerms = {}
    for (I_, alpha), c in terms.items():
        for (i, j), s in sigma.mixed.items():
            w = wedge_index(j, I_)
            if w is None:
                continue
            sg, J = w
            for f, beta in clifford_terms(i, alpha, l):
                x = s * f * c
                _acc(out, (J, beta), x if sg > 0 else -x)
    return out


def _Theta_raw(terms: FormTerms, l: int, sigma: RicciLikeTensor) -> FormTerms:
    out: FormTerms = {}
    for (I_, alpha), c in terms.items():
        for (i, j), s in sigma.upper.items():
            for f1, b1 in clifford_terms(j, alpha, l):
                for f2, b2 in clifford_terms(i, b1, l):
                    _acc(out, (I_, b2), s * f1 * f2 * c)
    return out


def _rho_raw(terms: FormTerms, l: int, el: SpElement) -> FormTerms:
    n = 2 * l
    A = el.A
    out: FormTerms = {}
    # dual action on forms as a derivation: A . eps^i = -sum_j A[i][j] eps^j
    for (I_, alpha), c in terms.items():
        for p, ip in enumerate(I_):
            for j in range(n):
                a = A[ip][j]
                if not a:
                    continue
                seq = list(I_)
                seq[p] = j
                ss = _sort_sign(seq)
                if ss is None:
                    continue
                sg, J = ss
                x = -a * c
                _acc(out, (J, alpha), x if sg > 0 else -x)
    # spinor part, grouped by form index
    by_form: Dict[Tuple[int, ...], Dict] = {}
    for (I_, alpha), c in terms.items():
        by_form.setdefault(I_, {})[alpha] = c
    for I_, sterms in by_form.items():
        for beta, x in meta_terms(el, sterms, l).items():
            _acc(out, (I_, beta), x)
    return out


def _omega_wedge_raw(terms: FormTerms, l: int) -> FormTerms:
    """``-(i/2) omega_{ij} eps^i ^ eps^j ^ alpha (x) s`` (closed form of X^2)."""
    sp = space(l)
    w = sp.omega_matrix
    coef = -I / 2
    out: FormTerms = {}
    for (I_, alpha), c in terms.items():
        for i in range(2 * l):
            j = sp.partner[i]
            w1 = wedge_index(j, I_)
            if w1 is None:
                continue
            w2 = wedge_index(i, w1[1])
            if w2 is None:
                continue
            x = coef * w[i][j] * c
            _acc(out, (w2[1], alpha), x if w1[0] * w2[0] > 0 else -x)
    return out


def _omega_contract_raw(terms: FormTerms, l: int) -> FormTerms:
    """``(i/2) omega^{ij} alpha(e_i, e_j, ...) (x) s`` (closed form of Y^2).

    ``alpha(e_i, e_j, ...) = iota_{e_j} iota_{e_i} alpha``: e_i is inserted first.
    """
    sp = space(l)
    winv = sp.omega_inv_matrix
    coef = I / 2
    out: FormTerms = {}
    for (I_, alpha), c in terms.items():
        for i in range(2 * l):
            j = sp.partner[i]
            c1 = contract_index(i, I_)
            if c1 is None:
                continue
            c2 = contract_index(j, c1[1])
            if c2 is None:
                continue
            x = coef * winv[i][j] * c
            _acc(out, (c2[1], alpha), x if c1[0] * c2[0] > 0 else -x)
    return out


def quadratic_curvature_raw(terms: FormTerms, l: int, coeffs: Dict[Tuple[int, int, int, int], Scalar]) -> FormTerms:
    """``sum C^{ij}_{kl} eps^k ^ eps^l ^ alpha (x) e_i e_j s`` for coefficients ``C``."""
    out: FormTerms = {}
    for (I_, alpha), c in terms.items():
        for (i, j, k, m), q in coeffs.items():
            w1 = wedge_index(m, I_)
            if w1 is None:
                continue
            w2 = wedge_index(k, w1[1])
            if w2 is None:
                continue
            sg = w1[0] * w2[0]
            J = w2[1]
            for f1, b1 in clifford_terms(j, alpha, l):
                for f2, b2 in clifford_terms(i, b1, l):
                    x = q * f1 * f2 * c
                    _acc(out, (J, b2), x if sg > 0 else -x)
    return out


# --- graded operators --------------------------------------------------------

@lru_cache(maxsize=None)
def form_basis(l: int, r: int, cap: int, parity: Optional[int] = None) -> Tuple[Key, ...]:
    """Ordered basis of ``Lambda^r (x) S_{<= cap}`` (optionally one parity)."""
    monos = [m for m in monomials_upto(l, cap) if parity is None or sum(m) % 2 == parity]
    return tuple((I_, m) for I_ in combinations(range(2 * l), r) for m in monos)


@lru_cache(maxsize=None)
def _basis_index(l: int, r: int, cap: int, parity: Optional[int]) -> Dict[Key, int]:
    return {k: n for n, k in enumerate(form_basis(l, r, cap, parity))}


class GradedOperator:
    """Exact linear map ``Lambda^r (x) S_{<=N} -> Lambda^{r+shift} (x) S_{<=N+order}``."""

    def __init__(self, name: str, l: int, shift: int, order: int, fn: Callable[[FormTerms], FormTerms]):
        self.name = name
        self.l = l
        self.shift = shift
        self.order = order
        self._fn = fn

    def apply(self, psi: SpinorForm) -> SpinorForm:
        if psi.l != self.l:
            raise ValueError("dimension mismatch")
        r = psi.r + self.shift
        out = self._fn(psi.terms)
        if not 0 <= r <= 2 * self.l:
            r = max(0, min(r, 2 * self.l))
            if out:
                raise ValueError(f"{self.name} produced terms outside the exterior algebra")
        return SpinorForm._wrap(self.l, r, out, psi.cap + self.order)

    __call__ = apply

    def __matmul__(self, other: "GradedOperator") -> "GradedOperator":
        f, g = self._fn, other._fn
        return GradedOperator(f"{self.name}*{other.name}", self.l, self.shift + other.shift,
                              self.order + other.order, lambda t: f(g(t)))

    def __add__(self, other: "GradedOperator") -> "GradedOperator":
        if self.shift != other.shift:
            raise ValueError("form-degree shifts differ")
        f, g = self._fn, other._fn

        def fn(t):
            out = dict(f(t))
            for k, x in g(t).items():
                _acc(out, k, x)
            return out
        return GradedOperator(f"({self.name}+{other.name})", self.l, self.shift,
                              max(self.order, other.order), fn)

    def scale(self, c) -> "GradedOperator":
        c = as_scalar(c)
        f = self._fn
        return GradedOperator(f"{c.pretty()}*{self.name}", self.l, self.shift, self.order,
                              lambda t: {k: c * x for k, x in f(t).items()} if c else {})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def matrix(self, r: int, cap: int, parity: Optional[int] = None,
               codomain_cap: Optional[int] = None) -> SparseMatrix:
        """Exact block matrix on ``Lambda^r (x) S_{<=cap}`` (one parity if given)."""
        l = self.l
        dom = form_basis(l, r, cap, parity)
        ccap = cap + self.order if codomain_cap is None else codomain_cap
        cpar = None if parity is None else (parity + self.order) % 2
        r2 = r + self.shift
        if not 0 <= r2 <= 2 * l:
            return SparseMatrix(0, len(dom))
        cod = _basis_index(l, r2, ccap, cpar)
        ent = {}
        for col, key in enumerate(dom):
            for k, x in self._fn({key: ONE}).items():
                row = cod.get(k)
                if row is None:
                    raise ValueError(f"{self.name}: image term {k} outside codomain cap {ccap}/parity {cpar}")
                ent[(row, col)] = x
        return SparseMatrix(len(cod), len(dom), ent)

    def __repr__(self):
        return f"GradedOperator({self.name}, shift={self.shift:+d}, order={self.order})"


def commutator(P: GradedOperator, Q: GradedOperator) -> GradedOperator:
    """``[P, Q] = PQ - QP``."""
    return P @ Q - Q @ P


def anticommutator(P: GradedOperator, Q: GradedOperator) -> GradedOperator:
    """``{P, Q} = PQ + QP``."""
    return P @ Q + Q @ P


def op_X(l: int) -> GradedOperator:
    return GradedOperator("X", l, +1, 1, lambda t: _X_raw(t, l))


def op_Y(l: int) -> GradedOperator:
    return GradedOperator("Y", l, -1, 1, lambda t: _Y_raw(t, l))


def op_Sigma(sigma: RicciLikeTensor) -> GradedOperator:
    l = sigma.space.l
    return GradedOperator("Sigma", l, +1, 1, lambda t: _Sigma_raw(t, l, sigma))


def op_Theta(sigma: RicciLikeTensor) -> GradedOperator:
    l = sigma.space.l
    return GradedOperator("Theta", l, 0, 2, lambda t: _Theta_raw(t, l, sigma))


def rho_prime(el: SpElement) -> GradedOperator:
    """Infinitesimal action of sp on ``Lambda V* (x) S``: dual action plus m(A)."""
    l = el.space.l
    return GradedOperator("rho'", l, 0, 2, lambda t: _rho_raw(t, l, el))


def omega_wedge(l: int) -> GradedOperator:
    """Closed form of X^2 (form degree +2, no Clifford factor)."""
    return GradedOperator("X2cf", l, +2, 0, lambda t: _omega_wedge_raw(t, l))


def omega_contract(l: int) -> GradedOperator:
    """Closed form of Y^2 (form degree -2, no Clifford factor)."""
    return GradedOperator("Y2cf", l, -2, 0, lambda t: _omega_contract_raw(t, l))


def quadratic_curvature_operator(name: str, l: int, coeffs) -> GradedOperator:
    coeffs = {k: v for k, v in coeffs.items() if v}
    return GradedOperator(name, l, +2, 2, lambda t: quadratic_curvature_raw(t, l, coeffs))


def random_form(l: int, r: int, cap: int, rng: random.Random, n_terms: int = 6,
                parity: Optional[int] = None) -> SpinorForm:
    """Seeded random element of ``Lambda^r (x) S_{<=cap}`` with small Gaussian-integer entries."""
    pool = form_basis(l, r, cap, parity)
    terms: FormTerms = {}
    for key in rng.sample(pool, min(n_terms, len(pool))):
        c = random_gaussian(rng)
        if c:
            terms[key] = c
    return SpinorForm(l, r, terms, cap)


def sp_action_on_sigma(el: SpElement, sigma: RicciLikeTensor) -> RicciLikeTensor:
    """Tensor action ``(A.sigma)_{ij} = -sigma(Ae_i, e_j) - sigma(e_i, Ae_j)``."""
    n = el.space.dim
    A, s = el.A, sigma.sigma
    out = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = ZERO
            for m in range(n):
                if A[m][i] and s[m][j]:
                    acc = acc - A[m][i] * s[m][j]
                if A[m][j] and s[i][m]:
                    acc = acc - A[m][j] * s[i][m]
            out[i][j] = acc
    return RicciLikeTensor(out, el.space)

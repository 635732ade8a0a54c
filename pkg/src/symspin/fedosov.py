"""Polynomial Fedosov geometry on R^{2l} with the standard symplectic form.

Base coordinates are ``y^0 .. y^{2l-1}``; the connection is
``nabla_{e_a} e_b = Gamma^k_{ab} e_k`` with polynomial symbols.  Sections of
``Lambda^r T* (x) S`` are sparse maps ``(base exponent, I, alpha) -> Scalar``.
The spinor covariant derivative is ``d/dy^a + m(Gamma_a)`` with
``(Gamma_a)^k_b = Gamma^k_{ab}`` and ``m`` the quadratic Clifford lift.
"""

from __future__ import annotations

import json
import random
from itertools import product
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .curvature import CurvatureTensor, curvature_operator, ricci_from_curvature, weyl_split
from .decomposition import IsotypicDecomposition
from .fock import _acc, clifford_terms
from .forms import FormTerms, RicciLikeTensor, SpinorForm, _Y_raw, quadratic_curvature_raw, wedge_index
from .scalars import I, ONE, ZERO, Scalar, as_scalar
from .symplectic import SymplecticSpace, space

Exp = Tuple[int, ...]
Poly = Dict[Exp, Scalar]
FieldKey = Tuple[Exp, Tuple[int, ...], Tuple[int, ...]]

__all__ = [
    "ConnectionError_",
    "FedosovConnection",
    "FormField",
    "load_connection",
    "connection_from_symmetric",
    "connection_curvature",
    "ricci_field",
    "spinor_covariant_derivative",
    "exterior_spinor_derivative",
    "curvature_field_operator",
    "spinor_curvature_operator",
    "twistor_operator",
    "symplectic_dirac",
    "brute_force_curvature",
]


class ConnectionError_(ValueError):
    """Invalid connection data; ``triple`` is the offending 1-based ``(k, a, b)``."""

    def __init__(self, message: str, triple: Optional[Tuple[int, int, int]] = None):
        super().__init__(message)
        self.triple = triple


# --- polynomials in the base coordinates ---------------------------------------

def p_add(p: Poly, q: Poly, c=ONE) -> Poly:
    out = dict(p)
    for e, x in q.items():
        _acc(out, e, c * x)
    return out


def p_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for e1, x in p.items():
        for e2, y in q.items():
            _acc(out, tuple(a + b for a, b in zip(e1, e2)), x * y)
    return out


def p_diff(p: Poly, a: int) -> Poly:
    out: Poly = {}
    for e, x in p.items():
        if e[a]:
            f = list(e)
            f[a] -= 1
            _acc(out, tuple(f), e[a] * x)
    return out


def p_eval(p: Poly, point: Sequence) -> Scalar:
    acc = ZERO
    for e, x in p.items():
        t = x
        for v, k in zip(point, e):
            if k:
                t = t * as_scalar(v) ** k
        acc = acc + t
    return acc


def p_degree(p: Poly) -> int:
    return max((sum(e) for e in p), default=-1)


def random_poly(n: int, degree: int, rng: random.Random, n_terms: int = 3, bound: int = 2) -> Poly:
    monos = [e for e in product(range(degree + 1), repeat=n) if sum(e) <= degree]
    monos.sort(key=lambda e: (sum(e), e))
    out: Poly = {}
    for e in rng.sample(monos, min(n_terms, len(monos))):
        c = rng.randint(-bound, bound)
        if c:
            out[e] = Scalar(c)
    return out


# --- the connection ---------------------------------------------------------------

class FedosovConnection:
    """Torsion-free symplectic connection with polynomial Christoffel symbols.

    ``gamma[(k, a, b)]`` is ``Gamma^k_{ab}`` (0-based, stored for both
    orders of ``a, b``).  Construction validates torsion-freeness and the
    full symmetry of ``omega_{mc} Gamma^m_{ab}``.
    """

    def __init__(self, l: int, gamma: Dict[Tuple[int, int, int], Poly], name: str = "connection"):
        self.l = l
        self.name = name
        self.space: SymplecticSpace = space(l)
        n = self.space.dim
        clean: Dict[Tuple[int, int, int], Poly] = {}
        for (k, a, b), p in gamma.items():
            if not all(0 <= x < n for x in (k, a, b)):
                raise ConnectionError_(f"index ({k + 1}, {a + 1}, {b + 1}) outside 1..{n}", (k + 1, a + 1, b + 1))
            p = {tuple(e): as_scalar(x) for e, x in p.items() if as_scalar(x)}
            for e in p:
                if len(e) != n or min(e) < 0:
                    raise ConnectionError_(f"bad exponent {list(e)} in ({k + 1}, {a + 1}, {b + 1})",
                                           (k + 1, a + 1, b + 1))
            if p:
                clean[(k, a, b)] = p
        self.gamma = clean
        self._validate()
        self.degree = max((p_degree(p) for p in clean.values()), default=0)
        self.quad = [self._quad(a) for a in range(n)]

    def G(self, k: int, a: int, b: int) -> Poly:
        return self.gamma.get((k, a, b), {})

    def _validate(self):
        n, w = self.space.dim, self.space.omega_matrix
        for (k, a, b), p in self.gamma.items():
            if self.G(k, b, a) != p:
                raise ConnectionError_(f"torsion: Gamma^{k + 1}_{{{a + 1}{b + 1}}} != Gamma^{k + 1}_{{{b + 1}{a + 1}}}",
                                       (k + 1, a + 1, b + 1))
        # L_{c,ab} = omega_{mc} Gamma^m_{ab}; need L_{c,ab} = L_{b,ac}
        def L(c, a, b):
            out: Poly = {}
            for m in range(n):
                if w[m][c]:
                    out = p_add(out, self.G(m, a, b), w[m][c])
            return out
        for a, b, c in product(range(n), repeat=3):
            if L(c, a, b) != L(b, a, c):
                k = self.space.partner[c]
                raise ConnectionError_(
                    f"omega-compatibility fails: omega_(m,{c + 1}) Gamma^m_({a + 1}{b + 1}) is not symmetric "
                    f"under {c + 1}<->{b + 1}; offending symbol (k, a, b) = ({k + 1}, {a + 1}, {b + 1})",
                    (k + 1, a + 1, b + 1))

    def _quad(self, a: int) -> Dict[Tuple[int, int], Poly]:
        """Coefficient polynomials of ``m(Gamma_a) = sum Q^{pq} e_p e_q``."""
        n, w = self.space.dim, self.space.omega_matrix
        half_i = I / 2
        out = {}
        for p, q in product(range(n), repeat=2):
            acc: Poly = {}
            for c in range(n):
                if w[c][q]:
                    acc = p_add(acc, self.G(p, a, c), -half_i * w[c][q])
            if acc:
                out[(p, q)] = acc
        return out

    def matrix_monomials(self, a: int) -> Dict[Exp, List[List[Scalar]]]:
        """``Gamma_a`` split by base monomial as exact matrices."""
        n = self.space.dim
        out: Dict[Exp, List[List[Scalar]]] = {}
        for k, b in product(range(n), repeat=2):
            for e, x in self.G(k, a, b).items():
                out.setdefault(e, [[ZERO] * n for _ in range(n)])[k][b] = x
        return out

    def gamma_in_sp(self) -> bool:
        return all(self.space.is_sp(M) for a in range(self.space.dim) for M in self.matrix_monomials(a).values())

    def is_flat_symbols(self) -> bool:
        return not self.gamma

    def to_config(self) -> dict:
        """1-based config with one entry per unordered pair ``a <= b``."""
        entries = []
        for (k, a, b) in sorted(self.gamma):
            if a > b:
                continue
            p = self.gamma[(k, a, b)]
            monos = []
            for e in sorted(p):
                x = p[e]
                if x.imag:
                    raise ValueError("config format holds real coefficients only")
                monos.append({"exps": list(e), "num": x.real.numerator, "den": x.real.denominator})
            entries.append({"k": k + 1, "a": a + 1, "b": b + 1, "monomials": monos})
        return {"l": self.l, "D": self.degree, "name": self.name, "gamma": entries}


def load_connection(source: Union[str, Path, dict]) -> FedosovConnection:
    """Read a connection config (path or parsed dict); indices are 1-based.

    Entries are completed symmetrically in ``(a, b)``; conflicting explicit
    entries are rejected with the offending triple.
    """
    if isinstance(source, (str, Path)):
        data = json.loads(Path(source).read_text())
        default_name = Path(source).stem
    else:
        data = source
        default_name = "connection"
    try:
        l = int(data["l"])
        entries = data.get("gamma", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConnectionError_(f"malformed connection config: {exc}") from exc
    if l < 1:
        raise ConnectionError_("l must be positive")
    n = 2 * l
    D = data.get("D")
    gamma: Dict[Tuple[int, int, int], Poly] = {}
    explicit = {}
    for ent in entries:
        k, a, b = int(ent["k"]), int(ent["a"]), int(ent["b"])
        triple = (k, a, b)
        if not all(1 <= x <= n for x in triple):
            raise ConnectionError_(f"index {triple} outside 1..{n}", triple)
        p: Poly = {}
        for mono in ent.get("monomials", []):
            e = tuple(int(x) for x in mono["exps"])
            if len(e) != n or min(e) < 0:
                raise ConnectionError_(f"bad exponent {list(e)} in {triple}", triple)
            if D is not None and sum(e) > int(D):
                raise ConnectionError_(f"monomial {list(e)} in {triple} exceeds D={D}", triple)
            _acc(p, e, Scalar(mono["num"]) / int(mono.get("den", 1)))
        key = (k - 1, a - 1, b - 1)
        for kk in (key, (k - 1, b - 1, a - 1)):
            if kk in explicit and explicit[kk] != p:
                raise ConnectionError_(f"conflicting entries for Gamma^{k}_({a}{b}): not symmetric in (a, b)", triple)
        explicit[key] = p
        if a != b:
            explicit.setdefault((k - 1, b - 1, a - 1), p)
        if p:
            gamma[key] = p
            gamma[(k - 1, b - 1, a - 1)] = p
    return FedosovConnection(l, gamma, str(data.get("name", default_name)))


def connection_from_symmetric(l: int, L: Dict[Tuple[int, int, int], Poly], name: str = "connection") -> FedosovConnection:
    """``Gamma^m_{ab} = omega^{mc} L_{cab}`` from a totally symmetric ``L``.

    Only one ordering of each index triple needs to be supplied.
    """
    sp = space(l)
    n = sp.dim
    full: Dict[Tuple[int, int, int], Poly] = {}
    for idx, p in L.items():
        key = tuple(sorted(idx))
        if key in full and full[key] != p:
            raise ValueError(f"conflicting values for L{key}")
        full[key] = p
    gamma: Dict[Tuple[int, int, int], Poly] = {}
    for m, a, b in product(range(n), repeat=3):
        acc: Poly = {}
        for c in range(n):
            w = sp.omega_inv_matrix[m][c]
            if w:
                acc = p_add(acc, full.get(tuple(sorted((c, a, b))), {}), w)
        if acc:
            gamma[(m, a, b)] = acc
    return FedosovConnection(l, gamma, name)


# --- curvature --------------------------------------------------------------------

def curvature_mixed(conn: FedosovConnection) -> Dict[Tuple[int, int, int, int], Poly]:
    """``R^k_{bcd}``: the ``e_k`` component of ``R(e_c, e_d) e_b``."""
    n = conn.space.dim
    G = conn.G
    out = {}
    for k, b, c, d in product(range(n), repeat=4):
        acc = p_add(p_diff(G(k, d, b), c), p_diff(G(k, c, b), d), -ONE)
        for m in range(n):
            acc = p_add(acc, p_mul(G(k, c, m), G(m, d, b)))
            acc = p_add(acc, p_mul(G(k, d, m), G(m, c, b)), -ONE)
        if acc:
            out[(k, b, c, d)] = acc
    return out


def connection_curvature(conn: FedosovConnection) -> Dict[Exp, CurvatureTensor]:
    """Lowered curvature ``R_{ijkl} = omega(R(e_k, e_l) e_j, e_i)`` split by base monomial."""
    n, w = conn.space.dim, conn.space.omega_matrix
    by_mono: Dict[Exp, Dict[Tuple[int, int, int, int], Scalar]] = {}
    for (m, j, k, l_), p in curvature_mixed(conn).items():
        for i in range(n):
            if not w[m][i]:
                continue
            for e, x in p.items():
                t = by_mono.setdefault(e, {})
                key = (i, j, k, l_)
                t[key] = t.get(key, ZERO) + w[m][i] * x
    return {e: CurvatureTensor(t, conn.space) for e, t in sorted(by_mono.items())}


def curvature_at(conn: FedosovConnection, point: Sequence) -> CurvatureTensor:
    """Lowered curvature evaluated at a point of the base."""
    acc: Dict[Tuple[int, int, int, int], Scalar] = {}
    n = conn.space.dim
    for e, R in connection_curvature(conn).items():
        f = p_eval({e: ONE}, point) if any(e) else ONE
        for idx, x in R.R.items():
            acc[idx] = acc.get(idx, ZERO) + f * x
    del n
    return CurvatureTensor(acc, conn.space)


def ricci_field(conn: FedosovConnection) -> Dict[Exp, RicciLikeTensor]:
    """Ricci tensor split by base monomial; symmetry is enforced per monomial."""
    return {e: ricci_from_curvature(R) for e, R in connection_curvature(conn).items()}


# --- brute-force curvature oracle ---------------------------------------------------

VectorField = List[Poly]


def covariant_derivative(conn: FedosovConnection, X: VectorField, Y: VectorField) -> VectorField:
    """``nabla_X Y`` for polynomial vector fields."""
    n = conn.space.dim
    out: VectorField = [dict() for _ in range(n)]
    for k in range(n):
        acc: Poly = {}
        for a in range(n):
            if not X[a]:
                continue
            acc = p_add(acc, p_mul(X[a], p_diff(Y[k], a)))
            for b in range(n):
                if Y[b]:
                    acc = p_add(acc, p_mul(X[a], p_mul(conn.G(k, a, b), Y[b])))
        out[k] = acc
    return out


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    n = len(X)
    out = []
    for k in range(n):
        acc: Poly = {}
        for a in range(n):
            acc = p_add(acc, p_mul(X[a], p_diff(Y[k], a)))
            acc = p_add(acc, p_mul(Y[a], p_diff(X[k], a)), -ONE)
        out.append(acc)
    return out


def brute_force_curvature(conn: FedosovConnection, X: VectorField, Y: VectorField, Z: VectorField) -> VectorField:
    """``nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``."""
    a = covariant_derivative(conn, X, covariant_derivative(conn, Y, Z))
    b = covariant_derivative(conn, Y, covariant_derivative(conn, X, Z))
    c = covariant_derivative(conn, lie_bracket(X, Y), Z)
    return [p_add(p_add(a[k], b[k], -ONE), c[k], -ONE) for k in range(len(X))]


def coordinate_field(n: int, k: int) -> VectorField:
    return [({(0,) * n: ONE} if a == k else {}) for a in range(n)]


# --- sections -----------------------------------------------------------------------

class FormField:
    """Polynomial section of ``Lambda^r T* (x) S``."""

    __slots__ = ("l", "r", "terms")

    def __init__(self, l: int, r: int, terms: Optional[Dict[FieldKey, Scalar]] = None):
        self.l, self.r = l, r
        clean = {}
        for (beta, I_, alpha), c in (terms or {}).items():
            c = as_scalar(c)
            if len(I_) != r:
                raise ValueError("form degree mismatch")
            if c:
                clean[(tuple(beta), tuple(I_), tuple(alpha))] = c
        self.terms = clean

    @classmethod
    def _wrap(cls, l, r, terms):
        f = object.__new__(cls)
        f.l, f.r, f.terms = l, r, terms
        return f

    @classmethod
    def from_fiber(cls, poly: Poly, psi: SpinorForm) -> "FormField":
        """``poly(y) * psi`` for a constant fiber element ``psi``."""
        out: Dict[FieldKey, Scalar] = {}
        for e, x in poly.items():
            for (I_, alpha), c in psi.terms.items():
                _acc(out, (e, I_, alpha), x * c)
        return cls._wrap(psi.l, psi.r, out)

    def __add__(self, other: "FormField") -> "FormField":
        if not other.terms:
            return self
        if self.terms and other.r != self.r:
            raise ValueError("form degrees differ")
        out = dict(self.terms)
        for k, c in other.terms.items():
            _acc(out, k, c)
        return FormField._wrap(self.l, self.r if self.terms else other.r, out)

    def __neg__(self):
        return FormField._wrap(self.l, self.r, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FormField":
        c = as_scalar(c)
        return FormField._wrap(self.l, self.r, {k: c * x for k, x in self.terms.items()} if c else {})

    def times_poly(self, p: Poly) -> "FormField":
        out: Dict[FieldKey, Scalar] = {}
        for (beta, I_, alpha), c in self.terms.items():
            for e, x in p.items():
                _acc(out, (tuple(u + v for u, v in zip(beta, e)), I_, alpha), c * x)
        return FormField._wrap(self.l, self.r, out)

    def __eq__(self, other):
        if not isinstance(other, FormField):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return self.r == other.r and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def fibers(self) -> Dict[Exp, SpinorForm]:
        """Fiber coefficient of each base monomial."""
        out: Dict[Exp, FormTerms] = {}
        for (beta, I_, alpha), c in self.terms.items():
            out.setdefault(beta, {})[(I_, alpha)] = c
        return {b: SpinorForm._wrap(self.l, self.r, t, max(sum(a) for _, a in t)) for b, t in sorted(out.items())}

    def map_fibers(self, fn, r: int) -> "FormField":
        """Apply a constant-coefficient fiber map monomial by monomial."""
        out: Dict[FieldKey, Scalar] = {}
        for beta, fib in self.fibers().items():
            for (I_, alpha), c in fn(fib).terms.items():
                _acc(out, (beta, I_, alpha), c)
        return FormField._wrap(self.l, r, out)

    def at(self, point: Sequence) -> SpinorForm:
        """Evaluate the base polynomial coefficients at a point."""
        out: FormTerms = {}
        for beta, fib in self.fibers().items():
            f = p_eval({beta: ONE}, point)
            for k, c in fib.terms.items():
                _acc(out, k, f * c)
        return SpinorForm._wrap(self.l, self.r, out, max((sum(a) for _, a in out), default=0))

    def __repr__(self):
        return f"FormField(l={self.l}, r={self.r}, {len(self.terms)} terms)"


def random_field(l: int, r: int, base_degree: int, fiber_cap: int, rng: random.Random, n_terms: int = 5) -> FormField:
    from .forms import random_form
    acc = FormField(l, r)
    for _ in range(n_terms):
        p = random_poly(2 * l, base_degree, rng, n_terms=1)
        acc = acc + FormField.from_fiber(p, random_form(l, r, fiber_cap, rng, n_terms=2))
    return acc


# --- derivatives --------------------------------------------------------------------

def exterior_spinor_derivative(conn: FedosovConnection, psi: FormField) -> FormField:
    """``d^{nabla S} = sum_a eps^a ^ (d/dy^a + m(Gamma_a))``."""
    l = conn.l
    n = 2 * l
    if psi.l != l:
        raise ValueError("dimension mismatch")
    if psi.r >= n and psi.terms:
        return FormField(l, n)
    out: Dict[FieldKey, Scalar] = {}
    for (beta, I_, alpha), c in psi.terms.items():
        for a in range(n):
            w = wedge_index(a, I_)
            if w is None:
                continue
            sg, J = w
            cs = c if sg > 0 else -c
            if beta[a]:
                nb = list(beta)
                nb[a] -= 1
                _acc(out, (tuple(nb), J, alpha), beta[a] * cs)
            for (p, q), Q in conn.quad[a].items():
                for f1, b1 in clifford_terms(q, alpha, l):
                    for f2, b2 in clifford_terms(p, b1, l):
                        x = f1 * f2 * cs
                        for e, qc in Q.items():
                            _acc(out, (tuple(u + v for u, v in zip(beta, e)), J, b2), qc * x)
    return FormField._wrap(l, psi.r + 1, out)


def spinor_covariant_derivative(conn: FedosovConnection, phi: FormField) -> FormField:
    """``nabla^S phi`` as the 1-form ``sum_a eps^a (x) nabla^S_a phi``."""
    if phi.r != 0:
        raise ValueError("spinor fields have form degree 0")
    return exterior_spinor_derivative(conn, phi)


def _apply_tensor_field(R_by_mono: Dict[Exp, CurvatureTensor], psi: FormField, coeff: Scalar) -> FormField:
    l = psi.l
    out: Dict[FieldKey, Scalar] = {}
    for e, R in R_by_mono.items():
        coeffs = {idx: coeff * x for idx, x in R.raised_pair().items() if x}
        if not coeffs:
            continue
        for beta, fib in psi.fibers().items():
            nb = tuple(u + v for u, v in zip(beta, e))
            for (I_, alpha), c in quadratic_curvature_raw(fib.terms, l, coeffs).items():
                _acc(out, (nb, I_, alpha), c)
    return FormField._wrap(l, psi.r + 2, out)


def spinor_curvature_operator(conn: FedosovConnection, psi: FormField, coeff=None) -> FormField:
    """``coeff * R^{ij}_{kl}(y) eps^k ^ eps^l ^ (.) (x) e_i e_j .`` (full index sum, default ``coeff = i/2``)."""
    c = I / 2 if coeff is None else as_scalar(coeff)
    return _apply_tensor_field(connection_curvature(conn), psi, c)


def curvature_field_operator(conn: FedosovConnection, psi: FormField) -> FormField:
    """Fiberwise :func:`curvature_operator` built from ``(sigma, W)`` of the connection.

    Each base monomial of the curvature is split as ``W = R - s~`` with its
    own Ricci part; the operator is linear in both.
    """
    l = conn.l
    out = FormField(l, psi.r + 2)
    for e, R in connection_curvature(conn).items():
        sigma = ricci_from_curvature(R)
        W = weyl_split(R, sigma)
        op = curvature_operator(sigma, W)
        out = out + psi.map_fibers(op, psi.r + 2).times_poly({e: ONE})
    return out


def weyl_is_zero(conn: FedosovConnection) -> bool:
    return all(weyl_split(R, ricci_from_curvature(R)).is_zero() for R in connection_curvature(conn).values())


# --- twistor and Dirac operators --------------------------------------------------------

def project_field(decomp: IsotypicDecomposition, j: int, psi: FormField) -> FormField:
    """Fiberwise ``p^{r j}``; the projections have constant coefficients."""
    return psi.map_fibers(lambda f: decomp.project(j, f), psi.r)


def twistor_operator(decomp: IsotypicDecomposition, conn: FedosovConnection, i: int, psi: FormField,
                     check_input: bool = True) -> FormField:
    """``T_i psi = p^{i+1, m_{i+1}} d^{nabla S} psi`` on sections of E^{i, m_i}."""
    xi = decomp.xi
    if psi.r != i:
        raise ValueError(f"expected form degree {i}, got {psi.r}")
    if check_input and project_field(decomp, xi.m(i), psi) != psi:
        raise ValueError(f"section is not E^({i},{xi.m(i)})-valued")
    return project_field(decomp, xi.m(i + 1), exterior_spinor_derivative(conn, psi))


def symplectic_dirac(conn: FedosovConnection, phi: FormField) -> FormField:
    """``Y nabla^S phi``."""
    l = conn.l
    return spinor_covariant_derivative(conn, phi).map_fibers(
        lambda f: SpinorForm._wrap(l, 0, _Y_raw(f.terms, l), f.cap + 1), 0)


def section_of(decomp: IsotypicDecomposition, i: int, j: int, rng: random.Random, base_degree: int = 2,
               n_terms: int = 3, shift: int = 1, level_shift: int = 3) -> FormField:
    """Random polynomial section with values in E^{ij} drawn from safe operator-band blocks."""
    basis = [SpinorForm._wrap(decomp.l, i, t, decomp.N)
             for blk in decomp.operator_band(i, shift=shift, level_shift=level_shift)
             for t in blk.components.get(j, ())]
    acc = FormField(decomp.l, i)
    if not basis:
        return acc
    for v in rng.sample(basis, min(n_terms, len(basis))):
        p = random_poly(2 * decomp.l, base_degree, rng, n_terms=2)
        acc = acc + FormField.from_fiber(p, v)
    return acc

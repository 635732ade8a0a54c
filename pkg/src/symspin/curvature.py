"""Extended Ricci tensor, Weyl split and the curvature operator on spinor forms.

Curvature tensors are stored fully lowered, ``R_{ijkl} = omega(R(e_k, e_l) e_j, e_i)``,
as sparse dictionaries over 0-based index quadruples.
"""

from __future__ import annotations

from itertools import product
from typing import Dict, Iterable, List, Optional, Tuple

from .decomposition import IsotypicDecomposition
from .forms import (GradedOperator, RicciLikeTensor, SpinorForm, op_Sigma, op_Theta, op_X,
                    quadratic_curvature_operator)
from .results import FAIL, FINDING, PASS, CheckResult, form_to_json
from .scalars import I, ZERO, Scalar, as_scalar
from .symplectic import SymplecticSpace, Tensor, space

Quad = Tuple[int, int, int, int]

__all__ = [
    "CurvatureTensor",
    "ExtendedRicci",
    "extended_ricci",
    "weyl_split",
    "ricci_from_curvature",
    "curvature_operator",
    "ricci_type_closed_form",
    "trace_recovery_constant",
    "verify_complex",
    "probe_middle_gap",
]


class CurvatureTensor:
    """Lowered rank-4 tensor ``R_{ijkl}`` on ``V`` with exact entries."""

    __slots__ = ("space", "R")

    def __init__(self, entries: Dict[Quad, object], sp_space: SymplecticSpace):
        self.space = sp_space
        n = sp_space.dim
        clean: Dict[Quad, Scalar] = {}
        for idx, x in entries.items():
            if len(idx) != 4 or any(not 0 <= k < n for k in idx):
                raise IndexError(f"bad index {idx}")
            x = as_scalar(x)
            if x:
                clean[tuple(idx)] = x
        self.R = clean

    @classmethod
    def zero(cls, l: int) -> "CurvatureTensor":
        return cls({}, space(l))

    def __getitem__(self, idx: Quad) -> Scalar:
        return self.R.get(tuple(idx), ZERO)

    def __add__(self, other: "CurvatureTensor") -> "CurvatureTensor":
        out = dict(self.R)
        for k, x in other.R.items():
            out[k] = out.get(k, ZERO) + x
        return CurvatureTensor(out, self.space)

    def scale(self, c) -> "CurvatureTensor":
        c = as_scalar(c)
        return CurvatureTensor({k: c * x for k, x in self.R.items()}, self.space)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, CurvatureTensor):
            return NotImplemented
        return self.space.l == other.space.l and self.R == other.R

    def is_zero(self) -> bool:
        return not self.R

    def antisymmetric_last_pair(self) -> bool:
        return all(self[(i, j, l_, k)] == -x for (i, j, k, l_), x in self.R.items())

    def symmetric_first_pair(self) -> bool:
        return all(self[(j, i, k, l_)] == x for (i, j, k, l_), x in self.R.items())

    def raised_pair(self) -> Tensor:
        """``R^{ij}_{kl}``: both leading slots raised with omega."""
        sp = self.space
        return sp.raise_index(sp.raise_index(self.R, 0), 1)

    def mixed(self) -> Tensor:
        """``R^m_{jkl}``, the components of ``R(e_k, e_l) e_j`` along ``e_m``."""
        return self.space.raise_index(self.R, 0)


class ExtendedRicci:
    """A symmetric ``sigma`` together with its rank-4 extension."""

    __slots__ = ("sigma", "tilde")

    def __init__(self, sigma: RicciLikeTensor, tilde: CurvatureTensor):
        self.sigma = sigma
        self.tilde = tilde


def extended_ricci(sigma: RicciLikeTensor) -> ExtendedRicci:
    """``2(l+1) s~_{ijkl} = w_il s_jk - w_ik s_jl + w_jl s_ik - w_jk s_il + 2 s_ij w_kl``."""
    if not isinstance(sigma, RicciLikeTensor):
        sigma = RicciLikeTensor(sigma)
    sp = sigma.space
    n, l = sp.dim, sp.l
    w, s = sp.omega_matrix, sigma.sigma
    norm = Scalar(1) / (2 * (l + 1))
    out: Dict[Quad, Scalar] = {}
    for i, j, k, m in product(range(n), repeat=4):
        x = (w[i][m] * s[j][k] - w[i][k] * s[j][m] + w[j][m] * s[i][k] - w[j][k] * s[i][m]
             + 2 * s[i][j] * w[k][m])
        if x:
            out[(i, j, k, m)] = norm * x
    return ExtendedRicci(sigma, CurvatureTensor(out, sp))


def weyl_split(R: CurvatureTensor, sigma: RicciLikeTensor) -> CurvatureTensor:
    """``W = R - s~``."""
    if R.space.l != sigma.space.l:
        raise ValueError("dimension mismatch")
    return R - extended_ricci(sigma).tilde


def ricci_from_curvature(R: CurvatureTensor) -> RicciLikeTensor:
    """``sigma(X, Y) = Tr(V -> R(V, X) Y)``, i.e. ``sigma_ij = R^k_{jki}``.

    Raises ``ValueError`` if the trace is not symmetric.
    """
    n = R.space.dim
    mixed = R.mixed()
    out = [[ZERO] * n for _ in range(n)]
    for (k, j, kk, i), x in mixed.items():
        if k == kk:
            out[i][j] = out[i][j] + x
    return RicciLikeTensor(out, R.space)


def trace_recovery_constant(l: int) -> Scalar:
    """The constant ``c`` with ``ricci_from_curvature(s~) = c * sigma``.

    Read off from a unit sigma and verified on the full unit basis.
    """
    sp = space(l)
    n = sp.dim
    c = None
    for a in range(n):
        for b in range(a, n):
            s = [[ZERO] * n for _ in range(n)]
            s[a][b] = s[b][a] = Scalar(1)
            got = ricci_from_curvature(extended_ricci(RicciLikeTensor(s, sp)).tilde).sigma
            ratio = got[a][b]
            if c is None:
                c = ratio
            if ratio != c or any(got[i][j] != c * s[i][j] for i in range(n) for j in range(n)):
                raise ArithmeticError("trace of the extension is not proportional to sigma")
    return c


def curvature_operator(sigma: RicciLikeTensor, W: Optional[CurvatureTensor] = None) -> GradedOperator:
    """``psi -> (i/2) R^{ij}_{kl} eps^k ^ eps^l ^ (.) (x) e_i e_j .`` with ``R = W + s~``.

    Full summation over ``i, j, k, l``; form degree +2, Clifford order 2.
    """
    R = extended_ricci(sigma).tilde
    if W is not None:
        if not W.antisymmetric_last_pair():
            raise ValueError("W must be antisymmetric in its last two slots")
        R = R + W
    return tensor_operator(R, "R")


def tensor_operator(R: CurvatureTensor, name: str = "R", coeff=None) -> GradedOperator:
    """``coeff * R^{ij}_{kl} eps^k ^ eps^l ^ (.) (x) e_i e_j .`` (default ``coeff = i/2``)."""
    c = I / 2 if coeff is None else as_scalar(coeff)
    coeffs = {idx: c * x for idx, x in R.raised_pair().items()}
    return quadratic_curvature_operator(name, R.space.l, coeffs)


def ricci_type_closed_form(sigma: RicciLikeTensor, sign: int = 1) -> GradedOperator:
    """``(i/(l+1)) (i X^2 Theta + sign * X Sigma)``.

    ``sign = +1`` is the form that agrees with :func:`curvature_operator` at
    ``W = 0``; ``sign = -1`` is kept so the other sign can be tested.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    l = sigma.space.l
    X = op_X(l)
    first = (X @ X @ op_Theta(sigma)).scale(I)
    second = (X @ op_Sigma(sigma)).scale(sign)
    return (first + second).scale(I / (l + 1))


# --- the complex ----------------------------------------------------------------

def complex_degrees(l: int) -> List[int]:
    """Form degrees ``i`` where ``T_{i+1} T_i`` is expected to vanish."""
    return list(range(0, l - 1)) + list(range(l, 2 * l - 1))


def _edge_vectors(decomp: IsotypicDecomposition, i: int) -> List[SpinorForm]:
    xi = decomp.xi
    m = xi.m(i)
    # W = 0 curvature changes the level by at most 2 (it is built from Sigma and Theta)
    return [SpinorForm._wrap(decomp.l, i, t, decomp.N)
            for blk in decomp.operator_band(i, shift=2, level_shift=2)
            for t in blk.components.get(m, ())]


def _edge_check(decomp: IsotypicDecomposition, sigma: RicciLikeTensor, i: int,
                vectors: Optional[Iterable[SpinorForm]] = None):
    xi = decomp.xi
    target = xi.m(i + 2)
    Rop = curvature_operator(sigma)
    if vectors is None:
        vectors = _edge_vectors(decomp, i)
    checked, nonzero, witness = 0, 0, None
    for psi in vectors:
        checked += 1
        comp = decomp.project(target, Rop(psi))
        if not comp.is_zero():
            nonzero += 1
            if witness is None:
                witness = {"psi": form_to_json(psi), "component": form_to_json(comp)}
    return checked, nonzero, witness


def verify_complex(decomp: IsotypicDecomposition, sigma: RicciLikeTensor,
                   degrees: Optional[Iterable[int]] = None) -> List[CheckResult]:
    """``p^{i+2, m_{i+2}} R psi = 0`` for ``psi`` in E^{i, m_i}, one record per ``i``."""
    l = decomp.l
    out = []
    for i in (complex_degrees(l) if degrees is None else degrees):
        checked, nonzero, witness = _edge_check(decomp, sigma, i)
        name = f"edge-curvature-vanishing(i={i})"
        anchor = "curvature of a W = 0 connection kills the edge projection p^{i+2,m_{i+2}} on E^{i,m_i}"
        status = FAIL if nonzero else PASS
        out.append(CheckResult(name, anchor, status, witness=witness,
                               dims={"checked": checked, "nonzero": nonzero},
                               details={"sigma_zero": sigma.is_zero()}))
    return out


def probe_middle_gap(decomp: IsotypicDecomposition, sigma: RicciLikeTensor) -> CheckResult:
    """The same projection at ``i = l - 1``, where no vanishing is expected."""
    l = decomp.l
    i = l - 1
    checked, nonzero, witness = _edge_check(decomp, sigma, i)
    return CheckResult(
        f"middle-gap-probe(i={i})",
        "the composite of the two middle twistor operators need not vanish",
        FINDING, witness=witness,
        dims={"checked": checked, "nonzero": nonzero},
        details={"outcome": "nonzero" if nonzero else "zero", "sigma_zero": sigma.is_zero()})

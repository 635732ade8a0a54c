"""Independent reference implementation built on sympy.

Spinor forms are dicts ``{I: sympy polynomial expression}`` with ``I`` a
sorted tuple of 0-based form indices.  Exterior signs come from explicit
permutation parity, Clifford multiplication from sympy differentiation.
Nothing here imports the package under test except for conversion helpers.
"""

import sympy as sp

from symspin.forms import SpinorForm
from symspin.scalars import Scalar


def symbols(l):
    return sp.symbols(f"x1:{l + 1}")


def omega(l, i, j):
    if i < l and j == i + l:
        return 1
    if i >= l and j == i - l:
        return -1
    return 0


def perm_sign(seq):
    """Sign of the permutation sorting ``seq`` (0 if there is a repeat)."""
    if len(set(seq)) != len(seq):
        return 0
    inv = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return -1 if inv % 2 else 1


def clifford(l, k, f):
    x = symbols(l)
    if k < l:
        return sp.expand(sp.I * x[k] * f)
    return sp.expand(sp.diff(f, x[k - l]))


def _add(out, I_, f):
    f = sp.expand(out.get(I_, 0) + f)
    if f == 0:
        out.pop(I_, None)
    else:
        out[I_] = f


def wedge(k, form):
    out = {}
    for I_, f in form.items():
        s = perm_sign((k,) + I_)
        if s:
            _add(out, tuple(sorted((k,) + I_)), s * f)
    return out


def contract(k, form):
    out = {}
    for I_, f in form.items():
        if k in I_:
            p = I_.index(k)
            _add(out, I_[:p] + I_[p + 1:], (-1) ** p * f)
    return out


def spin(l, k, form):
    return {I_: g for I_, f in form.items() for g in [clifford(l, k, f)] if g != 0}


def add(*forms):
    out = {}
    for fm in forms:
        for I_, f in fm.items():
            _add(out, I_, f)
    return out


def scale(c, form):
    return {I_: sp.expand(c * f) for I_, f in form.items() if sp.expand(c * f) != 0}


def X(l, form):
    return add(*[wedge(k, spin(l, k, form)) for k in range(2 * l)])


def Y(l, form):
    # omega^{ij} iota_{e_i} (x) e_j with omega^{ij} = omega_{ij} in this basis
    return add(*[scale(omega(l, i, j), contract(i, spin(l, j, form)))
                 for i in range(2 * l) for j in range(2 * l) if omega(l, i, j)])


def raise_first(l, s):
    n = 2 * l
    return [[sum(omega(l, i, c) * s[c][j] for c in range(n)) for j in range(n)] for i in range(n)]


def raise_both(l, s):
    n = 2 * l
    m = raise_first(l, s)
    return [[sum(omega(l, j, d) * m[i][d] for d in range(n)) for j in range(n)] for i in range(n)]


def Sigma(l, s, form):
    m = raise_first(l, s)
    n = 2 * l
    return add(*[scale(m[i][j], wedge(j, spin(l, i, form))) for i in range(n) for j in range(n) if m[i][j]])


def Theta(l, s, form):
    u = raise_both(l, s)
    n = 2 * l
    return add(*[scale(u[i][j], spin(l, i, spin(l, j, form))) for i in range(n) for j in range(n) if u[i][j]])


def from_form(psi: SpinorForm):
    """Convert a package form into an oracle form."""
    x = symbols(psi.l)
    out = {}
    for (I_, alpha), c in psi.terms.items():
        coeff = sp.Rational(c.real.numerator, c.real.denominator) + sp.I * sp.Rational(
            c.imag.numerator, c.imag.denominator)
        mono = sp.Mul(*[x[k] ** e for k, e in enumerate(alpha)])
        _add(out, I_, coeff * mono)
    return out


def to_form(l, r, form, cap):
    """Convert an oracle form back into a package form."""
    x = symbols(l)
    terms = {}
    for I_, f in form.items():
        poly = sp.Poly(f, *x)
        for alpha, c in poly.terms():
            re, im = sp.re(c), sp.im(c)
            terms[(I_, tuple(alpha))] = Scalar(sp_fraction(re), sp_fraction(im))
    return SpinorForm(l, r, terms, cap)


def sp_fraction(q):
    from fractions import Fraction
    q = sp.Rational(q)
    return Fraction(int(q.p), int(q.q))


def sigma_to_sympy(sigma):
    return [[sp.Rational(x.real.numerator, x.real.denominator) + sp.I * sp.Rational(x.imag.numerator,
                                                                                    x.imag.denominator)
             for x in row] for row in sigma.sigma]

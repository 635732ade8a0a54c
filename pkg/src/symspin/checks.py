"""Verification suites returning :class:`CheckResult` records.

Each function is deterministic given its ``random.Random``; the CLI and the
acceptance tests call the same code.
"""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence

from . import curvature as cv
from .decomposition import (InjectivityFailure, IsotypicDecomposition, SpanningFailure, _chain,
                            block_keys, verify_neighbour_containment)
from .fedosov import (FedosovConnection, FormField, brute_force_curvature, connection_curvature,
                      coordinate_field, curvature_at, curvature_field_operator, curvature_mixed,
                      exterior_spinor_derivative, spinor_curvature_operator, project_field, random_field, section_of,
                      spinor_covariant_derivative, symplectic_dirac, twistor_operator, weyl_is_zero)
from .fock import clifford_commutator_defect, monomials_upto, random_sp
from .forms import (GradedOperator, RicciLikeTensor, anticommutator, commutator, form_basis, omega_contract,
                    omega_wedge, op_Sigma, op_Theta, op_X, op_Y, random_form, rho_prime, sp_action_on_sigma)
from .linalg import SparseMatrix, rank
from .results import FAIL, PASS, VACUOUS, CheckResult, form_to_json
from .scalars import I, ONE, Scalar
from .symplectic import space

__all__ = [
    "clifford_suite",
    "closed_form_suite",
    "sigma_relations_suite",
    "sigma_relations_block_suite",
    "equivariance_suite",
    "decomposition_suite",
    "injectivity_suite",
    "neighbour_suite",
    "closed_curvature_suite",
    "closed_curvature_suite_signed",
    "complex_suite",
    "geometry_suite",
    "sigma_samples",
]


def sigma_samples(l: int, rng: random.Random, count: int, source: str = "random",
                  fixed: Optional[RicciLikeTensor] = None) -> List[RicciLikeTensor]:
    """``count`` sigma values: zero, seeded random (never all zero), or a fixed one."""
    if source == "zero":
        return [RicciLikeTensor.zero(l)]
    if source == "file":
        return [fixed]
    out = []
    while len(out) < count:
        s = RicciLikeTensor.random(l, rng)
        if not s.is_zero():
            out.append(s)
    return out


def _compare_on(lhs: GradedOperator, rhs: GradedOperator, inputs) -> Optional[dict]:
    for psi in inputs:
        a, b = lhs(psi), rhs(psi)
        if a != b:
            return {"psi": form_to_json(psi), "lhs": form_to_json(a), "rhs": form_to_json(b)}
    return None


# --- Clifford relation --------------------------------------------------------------

def clifford_suite(l: int, N: int) -> List[CheckResult]:
    """``v.w.s - w.v.s = -i omega(v, w) s`` on all basis pairs and monomials of degree ``<= N - 2``."""
    n = 2 * l
    count = 0
    for alpha in monomials_upto(l, N - 2):
        for v in range(n):
            for w in range(n):
                count += 1
                d = clifford_commutator_defect(v, w, alpha, l)
                if d:
                    return [CheckResult("clifford-commutator", "v.w - w.v = -i omega(v,w) on spinors", FAIL,
                                        witness={"v": v + 1, "w": w + 1, "x": list(alpha),
                                                 "defect": {str(list(k)): str(c) for k, c in d.items()}})]
    return [CheckResult("clifford-commutator", "v.w - w.v = -i omega(v,w) on spinors", PASS,
                        dims={"checked": count, "max_degree": N - 2})]


# --- closed forms of X^2 and Y^2 ------------------------------------------------------------

def _matrix_identity(lhs: GradedOperator, rhs: GradedOperator, l: int, cap: int, codomain_cap: int):
    blocks = 0
    for r in range(2 * l + 1):
        for parity in (0, 1):
            A = lhs.matrix(r, cap, parity, codomain_cap)
            B = rhs.matrix(r, cap, parity, codomain_cap)
            blocks += 1
            if A != B:
                diff = A - B
                (row, col), x = sorted(diff.entries.items())[0]
                key = form_basis(l, r, cap, parity)[col]
                return blocks, {"form_degree": r, "parity": parity, "column": [[k + 1 for k in key[0]], list(key[1])],
                                "difference": str(x)}
    return blocks, None


def closed_form_suite(l: int, N: int) -> List[CheckResult]:
    """X^2 and Y^2 against their closed forms as block matrices on ``S_{<= N-2}``."""
    X, Y = op_X(l), op_Y(l)
    out = []
    for name, lhs, rhs, anchor in (
            ("X-squared-closed-form", X @ X, omega_wedge(l), "X^2 = -(i/2) omega_ij eps^i ^ eps^j ^ (.)"),
            ("Y-squared-closed-form", Y @ Y, omega_contract(l), "Y^2 = (i/2) omega^ij (.)(e_i, e_j, ...)")):
        blocks, wit = _matrix_identity(lhs, rhs, l, N - 2, N)
        out.append(CheckResult(name, anchor, FAIL if wit else PASS, witness=wit,
                               dims={"blocks": blocks, "cap": N - 2}))
    return out


# --- commutation relations with sigma ---------------------------------------------------

def _sigma_relation_ops(l: int, sigma: RicciLikeTensor):
    X, Y = op_X(l), op_Y(l)
    S, T = op_Sigma(sigma), op_Theta(sigma)
    Y2 = Y @ Y
    sy = anticommutator(S, Y)
    return (
        ("anticommutator-Sigma-X", "{Sigma, X} = 0", anticommutator(S, X), None, 2),
        ("Sigma-Y-Y2-commutator", "[{Sigma, Y}, Y^2] = 0", commutator(sy, Y2), None, 4),
        ("X-Theta-commutator", "[X, Theta] = 2i Sigma", commutator(X, T), S.scale(2 * I), 3),
        ("Theta-Y2-commutator", "[Theta, Y^2] = 0", commutator(T, Y2), None, 4),
    )


def _with_zeros(ops):
    return [(n, a, lhs, lhs.scale(0) if rhs is None else rhs, o) for n, a, lhs, rhs, o in ops]


def sigma_relations_suite(l: int, N: int, rng: random.Random, sigmas: Sequence[RicciLikeTensor],
                 n_vectors: int = 30) -> List[CheckResult]:
    """The four sigma relations on seeded random guard-band vectors for each sigma."""
    names = None
    failures: Dict[str, dict] = {}
    counts: Dict[str, int] = {}
    for sigma in sigmas:
        ops = _with_zeros(_sigma_relation_ops(l, sigma))
        names = [(o[0], o[1]) for o in ops]
        for name, anchor, lhs, rhs, order in ops:
            inputs = [random_form(l, rng.randrange(2 * l + 1), N - order, rng) for _ in range(n_vectors)]
            counts[name] = counts.get(name, 0) + len(inputs)
            if name not in failures:
                wit = _compare_on(lhs, rhs, inputs)
                if wit:
                    failures[name] = wit
    return [CheckResult(name, anchor, FAIL if name in failures else PASS, witness=failures.get(name),
                        dims={"vectors": counts[name], "sigmas": len(sigmas)}) for name, anchor in names]


def sigma_relations_block_suite(l: int, N: int, sigma: RicciLikeTensor) -> List[CheckResult]:
    """The same relations as full block-matrix identities on ``S_{<= N - order}``."""
    out = []
    for name, anchor, lhs, rhs, order in _with_zeros(_sigma_relation_ops(l, sigma)):
        blocks, wit = _matrix_identity(lhs, rhs, l, N - order, N)
        out.append(CheckResult(name + "-blocks", anchor, FAIL if wit else PASS, witness=wit,
                               dims={"blocks": blocks, "cap": N - order}))
    return out


def equivariance_suite(l: int, N: int, rng: random.Random, n_elements: int = 10,
                       n_vectors: int = 5) -> List[CheckResult]:
    """``[rho'(A), X] = [rho'(A), Y] = 0`` and ``[rho'(A), Sigma^s] = Sigma^{A.s}``."""
    X, Y = op_X(l), op_Y(l)
    sp = space(l)
    wit = {"X": None, "Y": None, "Sigma": None}
    total = 0
    for _ in range(n_elements):
        A = random_sp(sp, rng)
        rho = rho_prime(A)
        sigma = RicciLikeTensor.random(l, rng)
        inputs = [random_form(l, rng.randrange(2 * l + 1), N - 3, rng) for _ in range(n_vectors)]
        total += len(inputs)
        cx, cy = commutator(rho, X), commutator(rho, Y)
        for key, lhs, rhs in (("X", cx, cx.scale(0)), ("Y", cy, cy.scale(0)),
                              ("Sigma", commutator(rho, op_Sigma(sigma)), op_Sigma(sp_action_on_sigma(A, sigma)))):
            if wit[key] is None:
                wit[key] = _compare_on(lhs, rhs, inputs)
    anchors = {"X": "X is sp-equivariant: [rho'(A), X] = 0", "Y": "Y is sp-equivariant: [rho'(A), Y] = 0",
               "Sigma": "[rho'(A), Sigma^s] = Sigma^(A.s)"}
    return [CheckResult(f"equivariance-{k}", anchors[k], FAIL if wit[k] else PASS, witness=wit[k],
                        dims={"elements": n_elements, "vectors": total}) for k in ("X", "Y", "Sigma")]


# --- decomposition ---------------------------------------------------------------------

def decomposition_suite(decomp: IsotypicDecomposition) -> List[CheckResult]:
    """Direct-sum rank accounting on every guard-band (form degree, parity, level) block."""
    out = []
    for i in range(2 * decomp.l + 1):
        try:
            rows = decomp.rank_accounting(i)
        except SpanningFailure as exc:
            out.append(CheckResult(f"direct-sum(i={i})", "Lambda^i (x) S = sum_j E^{ij}, multiplicity free", FAIL,
                                   witness={"error": str(exc)}))
            continue
        bad = [r for r in rows if not r["ok"]]
        dims = {"blocks": sum(r["blocks"] for r in rows), "dim": sum(r["dim"] for r in rows),
                "components": {str(j): sum(r["components"][j] for r in rows) for j in decomp.xi.slots(i)}}
        out.append(CheckResult(f"direct-sum(i={i})", "Lambda^i (x) S = sum_j E^{ij}, multiplicity free",
                               FAIL if bad else PASS, witness=_jsonable_row(bad[0]) if bad else None, dims=dims))
    return out


def _jsonable_row(row: dict) -> dict:
    out = dict(row)
    out["components"] = {str(k): v for k, v in row["components"].items()}
    return out


def injectivity_suite(decomp: IsotypicDecomposition) -> List[CheckResult]:
    """X along every chain and Y on every component off the diagonal have full column rank."""
    from .forms import _Y_raw
    l = decomp.l
    xi = decomp.xi
    x_cols = y_cols = 0
    x_wit = y_wit = None
    for i in range(2 * l + 1):
        for blk in decomp.guard_blocks(i):
            for j in xi.slots(i):
                try:
                    vecs = _chain(l, i, j, blk.mu)
                except InjectivityFailure as exc:
                    x_wit = x_wit or {"error": str(exc)}
                    continue
                x_cols += len(vecs) if i > j else 0
                if (i, j) in xi.plus and vecs:
                    index = {k: n for n, k in enumerate(block_keys(l, i - 1, blk.mu))}
                    cols = [{index[k]: c for k, c in _Y_raw(t, l).items()} for t in vecs]
                    r = rank(SparseMatrix.from_columns(cols, len(index)))
                    y_cols += len(vecs)
                    if r != len(vecs) and y_wit is None:
                        y_wit = {"i": i, "j": j, "weight": list(blk.mu), "rank": r, "columns": len(vecs)}
    return [
        CheckResult("X-injective-on-chains", "X: E^{ij} -> E^{i+1,j} is injective whenever (i+1, j) is an index pair",
                    FAIL if x_wit else PASS, witness=x_wit, dims={"columns": x_cols}),
        CheckResult("Y-injective-off-diagonal", "Y is injective on E^{ij} for (i,j) off the diagonal",
                    FAIL if y_wit else PASS, witness=y_wit, dims={"columns": y_cols}),
    ]


def neighbour_suite(decomp: IsotypicDecomposition, sigmas: Sequence[RicciLikeTensor]) -> List[CheckResult]:
    """Neighbour containment for Sigma and Theta on every index pair; one record per pair."""
    out = []
    for i, j in decomp.xi.pairs:
        results = [verify_neighbour_containment(decomp, i, j, s) for s in sigmas]
        fail = next((r for r in results if r.status == FAIL), None)
        if fail:
            out.append(fail)
            continue
        status = VACUOUS if all(r.status == VACUOUS for r in results) else PASS
        first = results[0]
        out.append(CheckResult(first.name, first.anchor, status,
                               dims={"checked": sum(r.dims.get("checked", 0) for r in results),
                                     "sigmas": len(sigmas)},
                               details={k: v for k, v in first.details.items() if k != "sigma_zero"}))
    return out


# --- curvature on Ricci-type data ---------------------------------------------------------

def closed_curvature_suite_signed(l: int, N: int, sigmas: Sequence[RicciLikeTensor], sign: int) -> List[CheckResult]:
    """The curvature operator at ``W = 0`` against ``(i/(l+1))(i X^2 Theta + sign X Sigma)`` as block matrices."""
    cap = N - 2
    label = "minus" if sign < 0 else "plus"
    wit = None
    blocks = 0
    for s_idx, sigma in enumerate(sigmas):
        b, w = _matrix_identity(cv.curvature_operator(sigma), cv.ricci_type_closed_form(sigma, sign), l, cap, N)
        blocks += b
        if w:
            w["sigma_sample"] = s_idx
            w["sigma"] = [[str(x) for x in row] for row in sigma.sigma]
            wit = w
            break
    return [CheckResult(
        f"ricci-type-curvature-closed-form({label})",
        f"(i/2) s~^ij_kl eps^k^eps^l (x) e_ij = (i/(l+1))(i X^2 Theta {'-' if sign < 0 else '+'} X Sigma)",
        FAIL if wit else PASS, witness=wit, dims={"blocks": blocks, "sigmas": len(sigmas), "cap": cap})]


def closed_curvature_suite(l: int, N: int, sigmas: Sequence[RicciLikeTensor]) -> List[CheckResult]:
    """Both signs of the closed form: the minus sign as usually written and the plus sign."""
    return (closed_curvature_suite_signed(l, N, sigmas, -1) + closed_curvature_suite_signed(l, N, sigmas, +1))


def complex_suite(decomp: IsotypicDecomposition, sigmas: Sequence[RicciLikeTensor]) -> List[CheckResult]:
    """Edge vanishing at the complex degrees plus the middle-gap probe, per sigma sample."""
    out = []
    for s_idx, sigma in enumerate(sigmas):
        for rec in cv.verify_complex(decomp, sigma):
            rec.name += f"[sigma {s_idx}]"
            out.append(rec)
        probe = cv.probe_middle_gap(decomp, sigma)
        probe.name += f"[sigma {s_idx}]"
        probe.details["sigma"] = [[str(x) for x in row] for row in sigma.sigma]
        out.append(probe)
    return out


# --- geometry ------------------------------------------------------------------------------

def _field_witness(a: FormField, b: FormField) -> dict:
    diff = a - b
    items = sorted(diff.terms.items())[:4]
    return {"difference_terms": [{"y": list(k[0]), "eps": [x + 1 for x in k[1]], "x": list(k[2]), "c": str(c)}
                                 for k, c in items], "nonzero_terms": len(diff.terms)}


def geometry_suite(conn: FedosovConnection, decomp: IsotypicDecomposition, rng: random.Random,
                   n_fields: int = 10, n_sections: int = 5, n_points: int = 10) -> List[CheckResult]:
    """Curvature, Ricci symmetry, the spinor curvature identities, neighbour containment of d and twistor checks."""
    l = conn.l
    n = 2 * l
    out: List[CheckResult] = []
    R_by_mono = connection_curvature(conn)

    # curvature against nabla nabla - nabla nabla - nabla_[,] on coordinate and random fields
    mixed = curvature_mixed(conn)
    wit = None
    for b in range(n):
        for c in range(n):
            for d in range(n):
                bf = brute_force_curvature(conn, coordinate_field(n, c), coordinate_field(n, d), coordinate_field(n, b))
                for k in range(n):
                    if bf[k] != mixed.get((k, b, c, d), {}) and wit is None:
                        wit = {"k": k + 1, "b": b + 1, "c": c + 1, "d": d + 1}
    out.append(CheckResult("curvature-brute-force", "R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z",
                           FAIL if wit else PASS, witness=wit, dims={"triples": n ** 3}))

    # Ricci symmetry, polynomially and at sample points
    wit = None
    try:
        for e, R in R_by_mono.items():
            cv.ricci_from_curvature(R)
        pts = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n_points)]
        for p in pts:
            cv.ricci_from_curvature(curvature_at(conn, p))
    except ValueError as exc:
        wit = {"error": str(exc)}
    out.append(CheckResult("ricci-symmetric", "the symplectic Ricci tensor of a Fedosov connection is symmetric",
                           FAIL if wit else PASS, witness=wit,
                           dims={"monomials": len(R_by_mono), "points": n_points}))
    sym = all(R.symmetric_first_pair() and R.antisymmetric_last_pair() for R in R_by_mono.values())
    out.append(CheckResult("curvature-symmetries", "R_ijkl symmetric in (i,j), antisymmetric in (k,l)",
                           PASS if sym else FAIL, witness=None if sym else {"connection": conn.name},
                           dims={"monomials": len(R_by_mono)}))

    # spinor curvature: stated (i/2) and the half of it
    fields = [random_field(l, 0, 1, 3, rng) for _ in range(n_fields)]
    lhs = [exterior_spinor_derivative(conn, spinor_covariant_derivative(conn, phi)) for phi in fields]
    for coeff, label in ((I / 2, "stated"), (I / 4, "halved")):
        wit = None
        for phi, a in zip(fields, lhs):
            b = spinor_curvature_operator(conn, phi, coeff)
            if a != b:
                wit = _field_witness(a, b)
                break
        out.append(CheckResult(
            f"spinor-curvature({label})",
            f"d^nabla nabla^S phi = ({'i/2' if label == 'stated' else 'i/4'}) R^ij_kl eps^k^eps^l (x) e_i e_j phi",
            FAIL if wit else PASS, witness=wit, dims={"fields": n_fields}))

    # d d against the fiberwise curvature operator after the Weyl split
    forms = [random_field(l, r, 1, 3, rng) for r in range(1, n - 1) for _ in range(2)]
    for factor, label in ((ONE, "stated"), (Scalar(1) / 2, "halved")):
        wit = None
        for psi in forms:
            a = exterior_spinor_derivative(conn, exterior_spinor_derivative(conn, psi))
            b = curvature_field_operator(conn, psi).scale(factor)
            if a != b:
                wit = _field_witness(a, b)
                break
        out.append(CheckResult(
            f"curvature-bridge({label})",
            f"d^nablaS d^nablaS = {'' if label == 'stated' else '(1/2) '}curvature operator of (sigma, W)",
            FAIL if wit else PASS, witness=wit, dims={"forms": len(forms)}))

    # neighbour containment for d^nablaS
    xi = decomp.xi
    wit, checked = None, 0
    for i, j in xi.pairs:
        if i >= n:
            continue
        forb = [k for k in xi.slots(i + 1) if abs(k - j) > 1]
        if not forb:
            continue
        for _ in range(n_sections):
            psi = section_of(decomp, i, j, rng)
            dpsi = exterior_spinor_derivative(conn, psi)
            for k in forb:
                checked += 1
                comp = project_field(decomp, k, dpsi)
                if not comp.is_zero() and wit is None:
                    wit = {"i": i, "j": j, "slot": k, **_field_witness(comp, FormField(l, i + 1))}
    out.append(CheckResult("exterior-derivative-neighbours",
                           "d^nablaS maps sections of E^{ij} into E^{i+1,j-1} + E^{i+1,j} + E^{i+1,j+1}",
                           (FAIL if wit else PASS) if checked else VACUOUS, witness=wit,
                           dims={"projections": checked, "sections_per_pair": n_sections}))

    # twistor complexes, meaningful for W = 0 (here: flat) data
    flat_weyl = weyl_is_zero(conn)
    for i in cv.complex_degrees(l):
        name = f"twistor-composite(i={i})"
        anchor = "T_{i+1} T_i = 0 when W = 0"
        if not flat_weyl:
            out.append(CheckResult(name, anchor, VACUOUS, details={"reason": "W != 0 for this connection"}))
            continue
        wit = None
        for _ in range(n_sections):
            psi = section_of(decomp, i, xi.m(i), rng, shift=2, level_shift=6)
            tt = twistor_operator(decomp, conn, i + 1, twistor_operator(decomp, conn, i, psi))
            if not tt.is_zero():
                wit = _field_witness(tt, FormField(l, i + 2))
                break
        out.append(CheckResult(name, anchor, FAIL if wit else PASS, witness=wit, dims={"sections": n_sections}))

    # composite across the middle: T_{l+1} (T_l T_{l-1}) = 0
    name, anchor = "twistor-middle-composite", "T_{l+1} (T_l T_{l-1}) = 0 when W = 0"
    if not flat_weyl:
        out.append(CheckResult(name, anchor, VACUOUS, details={"reason": "W != 0 for this connection"}))
    else:
        wit = None
        nonzero_middle = 0
        for _ in range(n_sections):
            psi = section_of(decomp, l - 1, l - 1, rng, shift=3, level_shift=9)
            mid = twistor_operator(decomp, conn, l, twistor_operator(decomp, conn, l - 1, psi))
            nonzero_middle += not mid.is_zero()
            last = twistor_operator(decomp, conn, l + 1, mid)
            if not last.is_zero():
                wit = _field_witness(last, FormField(l, l + 2))
                break
        out.append(CheckResult(name, anchor, FAIL if wit else PASS, witness=wit,
                               dims={"sections": n_sections, "nonzero_middle": nonzero_middle}))

    # Dirac operator: Y nabla^S agrees with Y (nabla^S - T_0)
    wit = None
    values = []
    for k in range(3):
        phi = section_of(decomp, 0, 0, rng, base_degree=1, n_terms=2)
        a = symplectic_dirac(conn, phi)
        grad = spinor_covariant_derivative(conn, phi)
        rest = grad - twistor_operator(decomp, conn, 0, phi)
        from .forms import _Y_raw
        from .forms import SpinorForm
        b = rest.map_fibers(lambda f: SpinorForm._wrap(l, 0, _Y_raw(f.terms, l), f.cap + 1), 0)
        if a != b and wit is None:
            wit = _field_witness(a, b)
        values.append(len(a.terms))
    out.append(CheckResult("dirac-from-twistor", "Y nabla^S = Y (nabla^S - T_0) (symplectic Dirac operator)",
                           FAIL if wit else PASS, witness=wit, dims={"fields": 3, "output_terms": values}))
    return out

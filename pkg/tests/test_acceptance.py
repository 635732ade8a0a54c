"""Acceptance criteria, one PASS/FAIL line each (printed in the pytest terminal summary).

Two identities are checked exactly as they are usually written and fail; they
are marked ``xfail(strict=True)`` so the failure is reported, not hidden, and
each has a companion test asserting the form that does hold.  See the README
section "Acceptance suite" for the analysis.
"""

import json
import random
import time

import pytest

from conftest import ACCEPTANCE_LINES
from symspin import checks
from symspin import curvature as cv
from symspin.cli import main
from symspin.decomposition import XiIndex, build_component
from symspin.fedosov import (connection_curvature, curvature_at, curvature_field_operator,
                             exterior_spinor_derivative, spinor_curvature_operator, load_connection, project_field,
                             random_field, section_of, spinor_covariant_derivative)
from symspin.results import FAIL, FINDING, PASS, VACUOUS
from symspin.scalars import I, Scalar

SIZES = [(2, 10), (3, 8)]
N_SIGMA = 5
CONNECTIONS = ["flat_l2", "constant_l2", "linear_l2"]


def record(tag, title, ok, detail=""):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  [{tag}] {title}" + (f": {detail}" if detail else ""))
    return ok


def sigmas(l, seed=100):
    return checks.sigma_samples(l, random.Random(seed + l), N_SIGMA)


def summary(records):
    return ", ".join(f"{r.name}={r.status}" for r in records if r.status != PASS) or "all PASS"


@pytest.fixture(scope="module")
def decomps(decomp2, decomp3):
    return {2: decomp2, 3: decomp3}


@pytest.fixture(scope="module")
def connections(data_dir):
    return {name: load_connection(data_dir / "connections" / f"{name}.json") for name in CONNECTIONS}


def test_01_clifford_commutator():
    t = time.perf_counter()
    recs = [r for l, N in SIZES for r in checks.clifford_suite(l, N)]
    dt = time.perf_counter() - t
    ok = all(r.status == PASS for r in recs) and dt < 10
    record("01", "v.w.s - w.v.s + i omega(v,w) s = 0 on all basis pairs, degree <= N-2, l=2,3", ok,
           f"{sum(r.dims['checked'] for r in recs)} cases in {dt:.1f}s")
    assert ok


def test_02_squares_closed_forms():
    recs = [r for l, N in SIZES for r in checks.closed_form_suite(l, N)]
    ok = all(r.status == PASS for r in recs)
    record("02", "X^2 and Y^2 equal their closed forms on every guard-band block, l=2,3", ok,
           f"{sum(r.dims['blocks'] for r in recs)} blocks")
    assert ok


def test_03_sigma_commutation_relations():
    t = time.perf_counter()
    recs = []
    for l, N in SIZES:
        recs += checks.sigma_relations_suite(l, N, random.Random(7 + l), sigmas(l), n_vectors=30)
    recs += [r for s in sigmas(2) for r in checks.sigma_relations_block_suite(2, 10, s)]
    dt = time.perf_counter() - t
    ok = all(r.status == PASS for r in recs) and dt < 120
    record("03", "four sigma relations on 30 vectors x 5 sigma per l, and as block matrices at l=2, N=10", ok,
           f"{summary(recs)} in {dt:.1f}s")
    assert ok


def test_04_equivariance():
    recs = [r for l, N in SIZES for r in checks.equivariance_suite(l, N, random.Random(l), n_elements=10)]
    ok = all(r.status == PASS for r in recs)
    record("04", "[rho'(A), X] = [rho'(A), Y] = 0 for 10 random A, l=2,3", ok, summary(recs))
    assert ok


def test_05_direct_sum_and_triangle(decomps):
    recs = [r for l in (2, 3) for r in checks.decomposition_suite(decomps[l])]
    xi = XiIndex(3)
    tri = len(xi.pairs) == 16 and xi.column_sizes() == (1, 2, 3, 4, 3, 2, 1)
    ok = tri and all(r.status == PASS for r in recs)
    record("05", "direct-sum rank accounting on every guard-band block (l=2,3, B=3); l=3 triangle 1,2,3,4,3,2,1",
           ok, summary(recs))
    assert ok


def test_06_injectivity(decomps):
    recs = [r for l in (2, 3) for r in checks.injectivity_suite(decomps[l])]
    built = 0
    for l, N in SIZES:
        for i, j in XiIndex(l).pairs:
            build_component(l, i, j, N, 3)   # raises on a rank drop in the guard band
            built += 1
    ok = all(r.status == PASS for r in recs)
    record("06", "X along build_component chains and Y off the diagonal have full column rank", ok,
           f"{built} components built; {summary(recs)}")
    assert ok


def test_07_neighbour_containment(decomps):
    recs = [r for l in (2, 3) for r in checks.neighbour_suite(decomps[l], sigmas(l))]
    ok = all(r.status in (PASS, VACUOUS) for r in recs)
    checked = sum(1 for r in recs if r.status == PASS)
    ok = ok and checked > 0
    record("07", "Sigma and Theta images have no forbidden components, 5 sigma, l=2,3", ok,
           f"{checked} pairs with forbidden slots checked; {summary(recs)}")
    assert ok


@pytest.mark.xfail(strict=True, reason="the minus-sign closed form is off by the sign of X Sigma; see README")
def test_08_ricci_type_closed_form_as_stated():
    recs = []
    for l, N in SIZES:
        recs += [r for r in checks.closed_curvature_suite_signed(l, N, sigmas(l), -1)]
    ok = all(r.status == PASS for r in recs)
    wit = next((r.witness for r in recs if r.status == FAIL), None)
    record("08", "(i/2) s~-contraction = (i/(l+1))(i X^2 Theta - X Sigma), 5 sigma, l=2,3", ok,
           "counterexample " + json.dumps({k: wit[k] for k in ("form_degree", "parity", "difference")}) if wit else "")
    assert ok


def test_08_companion_plus_sign():
    recs = []
    for l, N in SIZES:
        recs += checks.closed_curvature_suite_signed(l, N, sigmas(l), +1)
    ok = all(r.status == PASS for r in recs)
    record("08+", "companion: (i/2) s~-contraction = (i/(l+1))(i X^2 Theta + X Sigma), 5 sigma, l=2,3", ok,
           f"{sum(r.dims['blocks'] for r in recs)} blocks")
    assert ok


def test_09_edge_vanishing(decomps):
    t = time.perf_counter()
    recs = [r for l in (2, 3) for s in sigmas(l) for r in cv.verify_complex(decomps[l], s)]
    dt = time.perf_counter() - t
    degrees = sorted({r.name for r in recs})
    ok = all(r.status == PASS for r in recs) and dt < 600
    ok = ok and all(r.dims["checked"] > 0 for r in recs)
    record("09", "p^{i+2,m_{i+2}} R|E^{i,m_i} = 0 at i in {0..l-2} u {l..2l-2}, 5 sigma, l=2,3", ok,
           f"{len(recs)} records over {len(degrees)} degrees in {dt:.1f}s")
    assert ok


def test_10_middle_gap_probe(decomps):
    recs = [cv.probe_middle_gap(decomps[l], s) for l in (2, 3) for s in sigmas(l)]
    ok = all(r.status == FINDING for r in recs)
    outcomes = [r.details["outcome"] for r in recs]
    record("10", "middle-gap projection computed and reported as FINDING, 5 sigma, l=2,3", ok,
           f"outcomes {outcomes}")
    assert ok


# --- geometry -------------------------------------------------------------------------

def test_11a_ricci_symmetric(connections):
    rng = random.Random(1)
    ok, points = True, 0
    for conn in connections.values():
        try:
            for R in connection_curvature(conn).values():
                cv.ricci_from_curvature(R)
            for _ in range(10):
                cv.ricci_from_curvature(curvature_at(conn, [rng.randint(-3, 3) for _ in range(4)]))
                points += 1
        except ValueError:
            ok = False
    record("11a", "Ricci tensor of the flat, constant and linear connections is symmetric", ok,
           f"polynomial check plus {points} sample points")
    assert ok


def _spinor_identity(conns, coeff, n_fields=10):
    rng = random.Random(11)
    bad = []
    for name, conn in conns.items():
        for _ in range(n_fields):
            phi = random_field(2, 0, 1, 3, rng)
            lhs = exterior_spinor_derivative(conn, spinor_covariant_derivative(conn, phi))
            if lhs != spinor_curvature_operator(conn, phi, coeff):
                bad.append(name)
                break
    return bad


@pytest.mark.xfail(strict=True, reason="the stated (i/2) is twice the derived coefficient; see README")
def test_11b_spinor_curvature_as_stated(connections):
    bad = _spinor_identity(connections, I / 2)
    ok = not bad
    record("11b", "d nabla^S phi = (i/2) R^ij_kl eps^k^eps^l (x) e_i e_j phi on 10 fields per connection", ok,
           f"fails for {bad}" if bad else "")
    assert ok


def test_11b_companion_quarter(connections):
    bad = _spinor_identity(connections, I / 4)
    ok = not bad
    record("11b+", "companion: the same identity with coefficient i/4 on 10 fields per connection", ok)
    assert ok


def _bridge(conns, factor):
    rng = random.Random(12)
    bad = []
    for name, conn in conns.items():
        for r in range(0, 3):
            for _ in range(2):
                psi = random_field(2, r, 1, 3, rng)
                dd = exterior_spinor_derivative(conn, exterior_spinor_derivative(conn, psi))
                if dd != curvature_field_operator(conn, psi).scale(factor):
                    bad.append(name)
                    break
            if bad and bad[-1] == name:
                break
    return bad


@pytest.mark.xfail(strict=True, reason="d d equals half of the (i/2)-normalised curvature operator; see README")
def test_11c_bridge_as_stated(connections):
    bad = _bridge(connections, Scalar(1))
    ok = not bad
    record("11c", "d^nablaS d^nablaS = curvature operator of (sigma, W) after the Weyl split", ok,
           f"fails for {bad}" if bad else "")
    assert ok


def test_11c_companion_half(connections):
    bad = _bridge(connections, Scalar(1) / 2)
    ok = not bad
    record("11c+", "companion: d^nablaS d^nablaS = (1/2) curvature operator of (sigma, W)", ok)
    assert ok


def test_11d_exterior_derivative_neighbours(connections, decomp2):
    rng = random.Random(13)
    xi = decomp2.xi
    checked, bad = 0, []
    for name, conn in connections.items():
        for i, j in xi.pairs:
            if i >= 4:
                continue
            forb = [k for k in xi.slots(i + 1) if abs(k - j) > 1]
            if not forb:
                continue
            for _ in range(5):
                psi = section_of(decomp2, i, j, rng)
                assert not psi.is_zero()
                dpsi = exterior_spinor_derivative(conn, psi)
                for k in forb:
                    checked += 1
                    if not project_field(decomp2, k, dpsi).is_zero():
                        bad.append((name, i, j, k))
    ok = not bad and checked > 0
    record("11d", "d^nablaS sections of E^{ij} have no forbidden components, 5 sections per pair, 3 connections",
           ok, f"{checked} projections")
    assert ok


def test_12_determinism(tmp_path, monkeypatch):
    paths = []
    for n, threads in enumerate(("1", "3")):
        monkeypatch.setenv("SSL_THREADS", threads)
        for cmd in (["verify", "--suite", "all"], ["complex", "--suite", "edges"]):
            out = tmp_path / f"{cmd[0]}-{n}.json"
            main(cmd + ["--l", "2", "--seed", "5", "--out", str(out)])
            paths.append(out)
    ok = paths[0].read_bytes() == paths[2].read_bytes() and paths[1].read_bytes() == paths[3].read_bytes()
    record("12", "identical config and seed give byte-identical JSON reports (1 and 3 threads)", ok)
    assert ok

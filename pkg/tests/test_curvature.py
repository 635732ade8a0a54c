import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from symspin import curvature as cv
from symspin.fedosov import connection_curvature, load_connection
from symspin.forms import RicciLikeTensor, SpinorForm, random_form
from symspin.results import FINDING, PASS
from symspin.scalars import I, Scalar
from symspin.symplectic import space

seeds = st.integers(0, 10**6)


def bianchi_defect(R, n):
    """First Bianchi identity in the last three slots."""
    return [(i, j, k, m) for i, j, k, m in product(range(n), repeat=4)
            if R[(i, j, k, m)] + R[(i, k, m, j)] + R[(i, m, j, k)] != 0]


@settings(max_examples=10, deadline=None)
@given(seeds, st.sampled_from([2, 3]))
def test_extension_has_curvature_symmetries(seed, l):
    sigma = RicciLikeTensor.random(l, random.Random(seed))
    R = cv.extended_ricci(sigma).tilde
    assert R.symmetric_first_pair()
    assert R.antisymmetric_last_pair()
    assert bianchi_defect(R, 2 * l) == []


@pytest.mark.parametrize("l", [2, 3])
def test_trace_recovery_constant_is_one(l):
    assert cv.trace_recovery_constant(l) == 1


def test_trace_by_explicit_sum():
    """sigma_ij = sum_k omega^{kc} R_{c j k i}, written out by hand."""
    l = 2
    n = 2 * l
    sp = space(l)
    sigma = RicciLikeTensor.random(l, random.Random(5))
    R = cv.extended_ricci(sigma).tilde
    for i in range(n):
        for j in range(n):
            s = sum((sp.omega_inv(k, c) * R[(c, j, k, i)] for k in range(n) for c in range(n)), Scalar(0))
            assert s == sigma.sigma[i][j]


def test_weyl_split_of_pure_extension_vanishes():
    sigma = RicciLikeTensor.random(3, random.Random(1))
    assert cv.weyl_split(cv.extended_ricci(sigma).tilde, sigma).is_zero()


def test_weyl_part_of_connection_is_trace_free(data_dir):
    conn = load_connection(data_dir / "connections" / "constant_l2.json")
    (R,) = connection_curvature(conn).values()
    sigma = cv.ricci_from_curvature(R)
    W = cv.weyl_split(R, sigma)
    assert not W.is_zero()
    assert cv.ricci_from_curvature(W).is_zero()
    assert bianchi_defect(R, 4) == []


def test_ricci_rejects_asymmetric_trace():
    sp = space(2)
    R = cv.CurvatureTensor({(0, 1, 0, 2): 1, (0, 1, 2, 0): -1}, sp)
    with pytest.raises(ValueError):
        cv.ricci_from_curvature(R)


def test_curvature_operator_rejects_bad_W():
    sigma = RicciLikeTensor.zero(2)
    W = cv.CurvatureTensor({(0, 0, 0, 1): 1}, space(2))
    with pytest.raises(ValueError):
        cv.curvature_operator(sigma, W)


@pytest.mark.parametrize("l", [2, 3])
def test_closed_form_signs(l):
    rng = random.Random(17 + l)
    sigma = RicciLikeTensor.random(l, rng)
    lhs = cv.curvature_operator(sigma)
    plus = cv.ricci_type_closed_form(sigma, +1)
    minus = cv.ricci_type_closed_form(sigma, -1)
    forms = [random_form(l, rng.randrange(2 * l - 1), 3, rng) for _ in range(10)]
    assert all(lhs(f) == plus(f) for f in forms)
    assert any(lhs(f) != minus(f) for f in forms)


def test_closed_form_sign_argument():
    with pytest.raises(ValueError):
        cv.ricci_type_closed_form(RicciLikeTensor.zero(2), 0)


def test_complex_degrees():
    assert cv.complex_degrees(2) == [0, 2]
    assert cv.complex_degrees(3) == [0, 1, 3, 4]


def test_verify_complex_l2(decomp2):
    for seed in range(3):
        sigma = RicciLikeTensor.random(2, random.Random(seed))
        recs = cv.verify_complex(decomp2, sigma)
        assert [r.status for r in recs] == [PASS, PASS]
        assert all(r.dims["checked"] > 0 for r in recs)


def test_zero_sigma_is_trivially_fine(decomp2):
    recs = cv.verify_complex(decomp2, RicciLikeTensor.zero(2))
    assert all(r.status == PASS and r.dims["nonzero"] == 0 for r in recs)
    probe = cv.probe_middle_gap(decomp2, RicciLikeTensor.zero(2))
    assert probe.status == FINDING and probe.details["outcome"] == "zero"


def test_middle_gap_nonzero_for_random_sigma(decomp2):
    probe = cv.probe_middle_gap(decomp2, RicciLikeTensor.random(2, random.Random(3)))
    assert probe.status == FINDING
    assert probe.details["outcome"] == "nonzero"
    assert probe.witness is not None


def test_nonzero_weyl_breaks_edge_vanishing(decomp2, data_dir):
    """Negative control: the constant-symbol connection has W != 0 and its curvature reaches the edge."""
    conn = load_connection(data_dir / "connections" / "constant_l2.json")
    (R,) = connection_curvature(conn).values()
    op = cv.tensor_operator(R)
    D = decomp2
    for i in cv.complex_degrees(2):
        vecs = [SpinorForm._wrap(2, i, t, D.N) for b in D.operator_band(i, shift=2, level_shift=4)
                for t in b.components.get(D.xi.m(i), ())]
        assert any(not D.project(D.xi.m(i + 2), op(v)).is_zero() for v in vecs)


def test_tensor_operator_coefficient():
    sigma = RicciLikeTensor.random(2, random.Random(2))
    R = cv.extended_ricci(sigma).tilde
    psi = random_form(2, 1, 3, random.Random(4))
    assert cv.tensor_operator(R, coeff=I / 4)(psi) == Scalar(1, 0) / 2 * cv.curvature_operator(sigma)(psi)

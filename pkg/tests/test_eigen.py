import csv
import io
import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cirmax.eigen import (
    eigen_I,
    eigen_terms,
    find_zeros,
    mprime_asymp,
    net_k0_contribution,
    summand_asymp,
    wronskian_residual,
    zero_asymp_large_x,
)
from cirmax.inversion import bromwich_I
from cirmax.kummer import kummer_m_da
from cirmax.params import DimensionlessArgs

# mpmath.findroot on hyp1f1(-s, b, x) at 60 digits, frozen
ZEROS_REF = {
    (1.0, 30.0): ["2.710223871342285233362967e-12", "1.000000002109322379198674",
                  "2.000000349723568283568154", "3.000021418505441328375229"],
    (2.5, 10.0): ["0.00775343404205376335205808", "1.129110570393231038843496",
                  "2.605612345616990475646776", "4.56410102050517595513422"],
    (0.5, 5.0): ["0.007651916847722511664873097", "1.248848563077754024538272",
                 "3.248163406153695403087431", "6.211469306998193669882928"],
}


@pytest.mark.parametrize("bx", sorted(ZEROS_REF))
def test_zeros_match_reference(bx):
    zt = find_zeros(*bx, 4)
    for got, ref in zip(zt.zeros, ZEROS_REF[bx]):
        assert abs(mpmath.mpf(got) / mpmath.mpf(ref) - 1) < 1e-20


def test_first_zero_leading_form():
    s0 = float(find_zeros(1.0, 30.0, 1).zeros[0])
    lead = 30.0 * math.exp(-30.0)
    assert 0 < s0 and abs(s0 / lead - 1) < 0.2


def test_small_x_zeros_follow_bessel_zeros():
    # M(-s,b,x) ~ Gamma(b) (x(s+b/2))^((1-b)/2) e^(x/2) J_(b-1)(2 sqrt(x(s+b/2)))
    b, x = 1.0, 0.01
    zt = find_zeros(b, x, 3)
    for k, s in enumerate(zt.zeros):
        j = float(mpmath.besseljzero(b - 1, k + 1))
        assert float(s) == pytest.approx(j * j / (4 * x) - b / 2, rel=1e-3)


def test_zero_table_csv():
    zt = find_zeros(1.0, 10.0, 3)
    rows = list(csv.DictReader(io.StringIO(zt.to_csv())))
    assert [r["k"] for r in rows] == ["0", "1", "2"]
    assert float(rows[1]["s_k"]) == pytest.approx(float(zt.zeros[1]), rel=1e-15)
    assert all(float(r["residual"]) < 1e-10 for r in rows)


def test_eigen_matches_bromwich():
    d = DimensionlessArgs(1.0, 1.0, 10.0, 1.0)
    assert eigen_I(d) == pytest.approx(bromwich_I(d), rel=1e-6)


def test_y_zero_numerator_is_one():
    d = DimensionlessArgs(1.0, 1.5, 8.0, 0.0)
    for t in eigen_terms(d, 3):
        assert t.numerator == 1
        assert t.term + t.summand == 0


def test_return_terms():
    d = DimensionlessArgs(0.5, 2.0, 12.0, 0.3)
    val, terms = eigen_I(d, return_terms=True)
    assert val == pytest.approx(1 + math.fsum(float(t.term) for t in terms), rel=1e-12)


@pytest.mark.parametrize("x", [20.0, 30.0, 40.0])
def test_first_zero_correction(x):
    s0 = float(find_zeros(1.0, x, 1).zeros[0])
    assert s0 / zero_asymp_large_x(0, 1.0, x) == pytest.approx(1.0, abs=0.08)


def test_first_zero_correction_improves():
    errs = [abs(float(find_zeros(1.0, x, 1).zeros[0]) / zero_asymp_large_x(0, 1.0, x) - 1) for x in (20, 30, 40)]
    assert errs[0] > errs[1] > errs[2]


@pytest.mark.parametrize("k,tol", [(0, 0.10), (1, 0.25)])
def test_mprime_asymptotic(k, tol):
    s = float(find_zeros(1.0, 40.0, k + 1).zeros[k])
    exact = kummer_m_da(-s, 1.0, 40.0).real
    assert abs(mprime_asymp(k, 1.0, 40.0) / exact - 1) < tol


def test_summand_k0_is_one():
    assert summand_asymp(0, DimensionlessArgs(1.0, 1.0, 30.0, 1.0)) == 1.0


@pytest.mark.parametrize("x", [25.0, 35.0, 45.0])
def test_summand_asymptotic_k1_y0(x):
    d = DimensionlessArgs(1.0, 1.0, x, 0.0)
    t1 = eigen_terms(d, 2)[1]
    assert float(t1.summand) / summand_asymp(1, d) == pytest.approx(1.0, abs=0.25)


def test_net_k0_corrected_form():
    for x in (30.0, 40.0):
        d = DimensionlessArgs(1.0, 1.0, x, 1.0)
        t0 = eigen_terms(d, 1)[0]
        direct = float(1 - t0.summand)  # in working precision; the difference is ~1e-12
        assert net_k0_contribution(d) / direct == pytest.approx(1.0, abs=0.2)


def test_net_k0_bad_form():
    with pytest.raises(ValueError):
        net_k0_contribution(DimensionlessArgs(1.0, 1.0, 30.0, 1.0), form="other")


@pytest.mark.parametrize("a,b,x,tol", [(1 + 1j, 1.0, 2.0, 1e-8), (2 + 3j, 0.5, 5.0, 1e-7)])
def test_wronskian_identity(a, b, x, tol):
    assert wronskian_residual(a, b, x) < tol


def test_wronskian_needs_complex_a():
    with pytest.raises(ValueError):
        wronskian_residual(1.0, 1.0, 1.0)


@settings(max_examples=15, deadline=None)
@given(b=st.floats(0.3, 4.0), x=st.floats(0.5, 30.0))
def test_zeros_simple_and_increasing(b, x):
    zt = find_zeros(b, x, 4)
    zs = [float(z) for z in zt.zeros]
    assert all(z > 0 for z in zs)
    assert all(z1 > z0 for z0, z1 in zip(zs, zs[1:]))
    assert max(float(r) for r in zt.residuals) < 1e-10
    # simple zeros: the a-derivative is nonzero and alternates in sign
    ders = [kummer_m_da(-z, b, x, tol=1e-10).real for z in zs]
    assert all(d1 * d0 < 0 for d0, d1 in zip(ders, ders[1:]))


@settings(max_examples=15, deadline=None)
@given(a=st.complex_numbers(max_magnitude=6).filter(lambda z: abs(z.imag) > 0.05),
       b=st.floats(0.3, 3.0), x=st.floats(0.2, 8.0))
def test_wronskian_random(a, b, x):
    assert wronskian_residual(a, b, x) < 1e-7


@settings(max_examples=10, deadline=None)
@given(lam=st.floats(0.3, 3.0), b=st.floats(0.4, 3.0), x=st.floats(3.0, 20.0), frac=st.floats(0.0, 0.3))
def test_eigen_is_probability(lam, b, x, frac):
    v = eigen_I(DimensionlessArgs(lam, b, x, frac * x))
    assert 0.0 <= v <= 1.0

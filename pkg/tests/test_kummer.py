import cmath
import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cirmax.kummer import (
    LogComplex,
    digamma_diff,
    harmonic,
    kummer_asymp_prop_a,
    kummer_bessel_regime,
    kummer_log_batch,
    kummer_m,
    kummer_m_da,
    kummer_m_log,
    kummer_m_mp,
    pfq_2f2,
)

# 60-digit mpmath.hyp1f1 values, frozen
M_REF = [
    ((2, 3, 1), 2.0, 0.0),
    ((0.5, 1.5, 10), 1168.2304635794389296, 0.0),
    ((-2.5, 1, 7), 4.464045886170198903, 0.0),
    ((-10.3, 2.5, 30), -2571.5274413513333767, 0.0),
    ((1 + 3j, 1, 20), -1181019727.3066207239, 7896484865.9890529726),
    ((-0.4 + 2j, 0.5, 5), 74.528484123437622735, -412.15872857796639222),
    ((1e-18, 1, 45), 1.794391603570445433, 0.0),
    ((-0.05, 1, 30), -15144612651.69499379, 0.0),
    ((3, 1, 100), 1.3980897254585720467e47, 0.0),
]

# mpmath.diff of hyp1f1 in a, frozen
DA_REF = [
    ((-2.5, 1, 7), 17.263503523813358644, 0.0),
    ((1 + 3j, 1, 20), 6533439364.8585673786, 16740581608.658525068),
    ((0.7, 2, 3), 6.3804186638146668969, 0.0),
]


@pytest.mark.parametrize("args,re,im", M_REF)
def test_kummer_m_matches_reference(args, re, im):
    got = kummer_m(*args)
    ref = complex(re, im)
    assert abs(got - ref) <= 1e-12 * abs(ref)


def test_closed_form_2_3_1():
    # M(2,3,x) = 2(e^x(x-1)+1)/x^2
    x = 1.0
    assert kummer_m(2, 3, x).real == pytest.approx(2 * (math.exp(x) * (x - 1) + 1) / x**2, rel=1e-15)


def test_large_complex_a_against_200_digits():
    mpmath.mp.dps = 200
    try:
        ref = mpmath.log(mpmath.hyp1f1(mpmath.mpc(100, 50), 1, 200))
    finally:
        mpmath.mp.dps = 15
    got = kummer_m_log(complex(100, 50), 1, 200)
    assert abs(got.log_magnitude - float(ref.real)) < 1e-8
    assert abs(cmath.exp(1j * (got.phase - float(ref.imag))) - 1) < 1e-8


def test_huge_value_stays_in_log_space():
    lc = kummer_m_log(500, 1, 700)
    assert math.isfinite(lc.log_magnitude) and lc.log_magnitude > 709
    with pytest.raises(OverflowError):
        lc.to_complex()


@pytest.mark.parametrize("args,re,im", DA_REF)
def test_kummer_m_da_matches_reference(args, re, im):
    got = kummer_m_da(*args)
    ref = complex(re, im)
    assert abs(got - ref) <= 1e-10 * abs(ref)


def test_da_at_a_zero_is_exponential_integral_series():
    ref = math.fsum(1.0 / (r * math.factorial(r)) for r in range(1, 40))
    assert kummer_m_da(0, 1, 1).real == pytest.approx(ref, rel=1e-13)
    assert ref == pytest.approx(1.3179, abs=1e-4)


def test_da_finite_difference():
    h = 1e-6
    fd = (float(mpmath.hyp1f1(1 + h, 1, 1)) - float(mpmath.hyp1f1(1 - h, 1, 1))) / (2 * h)
    assert kummer_m_da(1, 1, 1).real == pytest.approx(fd, rel=1e-8)


def test_mp_path_agrees_with_float_path():
    v = kummer_m_mp(-3.7, 1.5, 12, bits=200)
    assert complex(v) == pytest.approx(kummer_m(-3.7, 1.5, 12), rel=1e-13)


def test_batch_matches_scalar():
    a = [0.5 + 1j, 2.0, -1.5 + 0.3j]
    out = kummer_log_batch(a, 1.0, 8.0)
    for ai, lv in zip(a, out):
        assert complex(lv) == pytest.approx(cmath.log(kummer_m(ai, 1.0, 8.0)), abs=1e-11)


def test_digamma_diff_and_harmonic_are_exact():
    from fractions import Fraction

    assert harmonic(4) == Fraction(25, 12)
    assert harmonic(3, 2) == Fraction(49, 36)
    # psi(a+r) - psi(a) = sum 1/(a+j)
    assert digamma_diff(Fraction(1, 2), 3) == Fraction(2) + Fraction(2, 3) + Fraction(2, 5)
    with pytest.raises(ZeroDivisionError):
        digamma_diff(-2, 5)


def test_pfq_2f2_small_and_growth():
    ref = math.fsum(math.factorial(n) ** 2 / (math.factorial(n + 1) ** 2 * math.factorial(n)) for n in range(50))
    assert pfq_2f2(1, 0, 1) == pytest.approx(ref, rel=1e-14)
    # large-x growth Gamma(b+k+1)(k+1)! e^x x^(-2k-b-1)
    b, k, x = 2, 1, 100
    lead = math.lgamma(b + k + 1) + math.log(math.factorial(k + 1)) + x - (2 * k + b + 1) * math.log(x)
    assert abs(math.expm1(pfq_2f2(b, k, x, log=True) - lead)) < 0.1


@pytest.mark.parametrize("u,b,x,tol", [(1, 1, 100, 0.05), (2, 0.5, 200, 0.025)])
def test_large_a_asymptotic(u, b, x, tol):
    approx = kummer_asymp_prop_a(u, b, x)
    ref = kummer_m_log(u * x, b, x)
    assert abs(math.expm1(approx.log_magnitude - ref.log_magnitude)) < tol


def test_large_a_error_shrinks_with_x():
    errs = []
    for x in (50, 100, 200):
        approx = kummer_asymp_prop_a(1.0, 1.0, x)
        errs.append(abs(approx.log_magnitude - kummer_m_log(x, 1.0, x).log_magnitude))
    assert errs[0] > errs[1] > errs[2]


def test_bessel_regime_forms():
    lc, mode = kummer_bessel_regime(1e4, 1, 1, mode="exponential")
    assert mode == "exponential"
    assert abs(math.expm1(lc.log_magnitude - kummer_m_log(1e4, 1, 1).log_magnitude)) < 0.03
    lc, mode = kummer_bessel_regime(400, 2, 0.5, mode="bessel")
    assert mode == "bessel"
    assert abs(math.expm1(lc.log_magnitude - kummer_m_log(400, 2, 0.5).log_magnitude)) < 0.02


def test_logcomplex_arithmetic():
    z1, z2 = 3 - 4j, -0.5 + 2j
    a, b = LogComplex.from_complex(z1), LogComplex.from_complex(z2)
    assert (a * b).to_complex() == pytest.approx(z1 * z2, rel=1e-15)
    assert (a / b).to_complex() == pytest.approx(z1 / z2, rel=1e-15)
    assert a.conjugate().to_complex() == pytest.approx(z1.conjugate(), rel=1e-15)


def test_invalid_b():
    with pytest.raises(ValueError):
        kummer_m(1, -2, 1)


# --- properties -----------------------------------------------------------

# dyadic grid so that a +- 1 is exact in floating point
_grid = st.integers(-640, 640).map(lambda k: k / 64)
finite_a = st.builds(complex, _grid, _grid)
pos_b = st.floats(0.2, 5)
pos_x = st.floats(0.0, 25)


@settings(max_examples=40, deadline=None)
@given(a=finite_a, b=pos_b, x=pos_x)
def test_contiguous_relation(a, b, x):
    # (b-a)M(a-1) + (2a-b+x)M(a) - aM(a+1) = 0
    m0, mm, mp_ = kummer_m(a, b, x), kummer_m(a - 1, b, x), kummer_m(a + 1, b, x)
    terms = [(b - a) * mm, (2 * a - b + x) * m0, -a * mp_]
    scale = max(abs(t) for t in terms) or 1.0
    assert abs(sum(terms)) <= 1e-10 * scale


@settings(max_examples=40, deadline=None)
@given(a=finite_a, b=pos_b, x=pos_x)
def test_conjugate_symmetry(a, b, x):
    v = kummer_m(a, b, x)
    w = kummer_m(a.conjugate(), b, x)
    assert abs(v.conjugate() - w) <= 1e-12 * max(abs(v), 1e-300)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-8, 8), b=pos_b, x=st.floats(0.1, 20))
def test_log_form_consistent(a, b, x):
    lc = kummer_m_log(a, b, x)
    v = kummer_m(a, b, x)
    if v != 0:
        assert lc.log_magnitude == pytest.approx(math.log(abs(v)), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(a=st.floats(-6, 6), b=pos_b, x=st.floats(0.1, 15))
def test_da_matches_central_difference(a, b, x):
    h = 1e-5
    fd = (kummer_m(a + h, b, x) - kummer_m(a - h, b, x)) / (2 * h)
    d = kummer_m_da(a, b, x)
    assert abs(d - fd) <= 1e-6 * max(abs(d), abs(kummer_m(a, b, x)), 1.0)

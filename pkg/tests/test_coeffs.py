import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frkt.coeffs import STIELTJES, a_coeff, a_coeffs, b_taylor, euler_B, szeta_series
from frkt.errors import DomainError, RangeError, SingularFactorError
from frkt.primes import primes_up_to
from frkt.specfun import EULER_GAMMA


def test_B_at_one_is_one():
    for P in (1000, 10**5):
        b = euler_B(1, 1, P)
        assert abs(b.value - 1) < 1e-12
        assert abs(b.corrected - 1) < 1e-12


def test_B2_closed_form():
    b = euler_B(2, 1, 10**5)
    assert abs(b.value - 6 / math.pi**2) < 1e-6
    p = primes_up_to(10**5).astype(float)
    assert abs(b.value - np.prod(1 - p**-2.0)) < 1e-13
    # the tail correction recovers most of the missing factor
    assert abs(b.corrected - 6 / math.pi**2) < 0.1 * abs(b.value - 6 / math.pi**2)


@pytest.mark.parametrize("z", [2, 1.5, 0.5 + 0.5j, -0.7, 3 - 1j])
@pytest.mark.parametrize("s", [1, 1.2 + 0.3j, 0.8])
def test_tail_bound_honest(z, s):
    a = euler_B(z, s, 10**5)
    b = euler_B(z, s, 2 * 10**5)
    assert abs(b.value - a.value) < a.tail_bound


def test_K_prefactor_at_r_one():
    assert euler_B(1.0, 1.0).value == 1


def test_B_errors():
    with pytest.raises(SingularFactorError):
        euler_B(-1, 1, 1000)  # factor 1 - 1/(2 - 1) vanishes at p = 2
    with pytest.raises(DomainError):
        euler_B(1.5, 0.4)
    with pytest.raises(DomainError):
        euler_B(1.5, 1, 100)


def test_stieltjes_data():
    mp.mp.dps = 30
    for n, g in enumerate(STIELTJES, start=1):
        assert abs(g - float(mp.stieltjes(n))) <= 1e-18 + 1e-15 * abs(g)


def test_szeta_series():
    c = szeta_series(6)
    assert c[0] == 1
    assert abs(c[1] - 0.5772157) < 1e-7
    mp.mp.dps = 30
    ref = mp.taylor(lambda s: s * mp.zeta(s + 1) if s != 0 else mp.mpf(1), 0, 6)
    for j in range(7):
        assert abs(c[j] - complex(ref[j])) < 1e-15
    with pytest.raises(RangeError):
        szeta_series(11)


def test_series_log_exp_round_trip():
    c = szeta_series(8)
    assert c.log().exp().allclose(c, 1e-12)


@settings(max_examples=30, deadline=None)
@given(
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
)
def test_series_power_law(z, w):
    c = szeta_series(8)
    lhs = c ** (z + w)
    scale = max(1.0, float(np.max(np.abs(lhs.coefficients))))
    assert lhs.allclose((c**z) * (c**w), 1e-12 * scale)


def test_a0_values():
    assert abs(a_coeffs(1, 0)[0] - 1) < 1e-9
    assert abs(a_coeffs(1.5, 0)[0] - euler_B(1.5, 1).corrected) < 1e-6


def test_a1_finite_difference_z1():
    # z = 1: B = 1, so a(s) = s zeta(s+1) / (1+s)
    mp.mp.dps = 30
    h = mp.mpf("1e-6")

    def f(s):
        return s * mp.zeta(s + 1) / (1 + s)

    fd = (f(h) - f(-h)) / (2 * h)
    a = a_coeffs(1, 3)
    assert abs(a[1] - complex(fd)) < 1e-6
    assert abs(a[1] - (EULER_GAMMA - 1)) < 1e-9


def test_a_coeffs_z2_closed_form():
    # B_2(s) = 1 / zeta(2s), so a(s) = (s zeta(s+1))^2 / (zeta(2s+2) (1+s))
    mp.mp.dps = 30

    def f(s):
        sz = s * mp.zeta(s + 1) if s != 0 else mp.mpf(1)
        return sz**2 / (mp.zeta(2 * s + 2) * (1 + s))

    ref = [complex(c) for c in mp.taylor(f, 0, 5)]
    a = a_coeffs(2, 5)
    for j in range(4):
        assert abs(a[j] - ref[j]) < 1e-5 * abs(ref[j])
    # the remaining error comes from the prime tail and shrinks with P
    b = a_coeffs(2, 5, P=10**6)
    for j in range(6):
        assert abs(b[j] - ref[j]) < 0.1 * abs(a[j] - ref[j])


def test_cauchy_stability():
    for z in (1.5, 0.3 + 0.8j, -0.6):
        a = a_coeffs(z, 6, M=64)
        b = a_coeffs(z, 6, M=128)
        for j in range(7):
            assert abs(a[j] - b[j]) <= 1e-8


def test_b_taylor_constant_term():
    b = b_taylor(1.5, 2)
    assert abs(b[0] - euler_B(1.5, 1).corrected) < 1e-12


def test_a_coeff_negative_index():
    a = a_coeffs(1.5, 2)
    assert a_coeff(a, -1) == 0
    assert a_coeff(a, 1) == a[1]


def test_a_coeffs_domain():
    with pytest.raises(DomainError):
        a_coeffs(0, 2)
    with pytest.raises(DomainError):
        a_coeffs(1.5, 9)

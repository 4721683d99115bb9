import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frkt import arith
from frkt.arith import Mode, build_table, friable_stats
from frkt.errors import ConfigError, DomainError, ResourceError
from frkt.primes import primes_up_to
from frkt.specfun import normal_cdf


def factor(n):
    out, p = [], 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def test_primes():
    assert primes_up_to(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert primes_up_to(1).size == 0
    assert primes_up_to(10**6).size == 78498


def test_sieve_records_against_trial_division():
    omega, lpf = arith.sieve_records(3000, block=257)
    for n in range(1, 3001):
        f = factor(n)
        assert omega[n] == len(set(f))
        assert lpf[n] == (max(f) if f else 1)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=2, max_value=10**6), st.integers(min_value=1, max_value=5000))
def test_sieve_block_random_windows(lo, width):
    om, lp = arith.sieve_block(lo, lo + width)
    for i in (0, width // 2, width - 1):
        f = factor(lo + i)
        assert om[i] == len(set(f)) and lp[i] == max(f)


def test_psi_100_5():
    t = build_table(100, 5)
    st_ = friable_stats(t)
    assert st_.psi == 34
    assert st_.counts.tolist()[:4] == [1, 12, 18, 3]
    assert friable_stats(t, z=1).psi_f == 34
    assert friable_stats(t, z=-1).psi_f == 4
    assert friable_stats(t, k=2).psi_k == 18


def test_psi_x_x():
    assert build_table(10**4, 10**4).psi() == 10**4


def test_modes_agree():
    a = build_table(10**4, 30)
    b = build_table(10**4, 30, Mode.SMOOTH_ENUM)
    assert np.array_equal(a.friable, b.friable)
    assert np.array_equal(a.friable_omega, b.friable_omega)
    assert a.is_friable(2**13) and b.is_friable(2**13)
    assert not a.is_friable(31) and not b.is_friable(31)


@pytest.mark.parametrize("x, y", [(10**4, 50), (10**6, 10**3)])
def test_first_moment_identity(x, y):
    tab = build_table(x, y)
    s = friable_stats(tab)
    lhs = int(np.dot(np.arange(s.counts.size), s.counts))
    rhs = sum(tab.psi(x // p) for p in primes_up_to(y).tolist())
    assert lhs == rhs


def test_counts_sum_and_moments():
    tab = build_table(10**5, 100)
    s = friable_stats(tab)
    assert s.counts.sum() == s.psi
    _, om = tab.restrict(10**5)
    assert s.mean == pytest.approx(om.mean(), rel=1e-14)
    assert s.var == pytest.approx(om.var(), rel=1e-12)


def test_monotone_in_x_and_y():
    ys = [3, 10, 50, 300]
    tabs = [build_table(5000, y) for y in ys]
    for t in tabs:
        vals = [t.psi(x) for x in range(1, 5001, 97)]
        assert vals == sorted(vals)
    for x in (100, 1000, 5000):
        vals = [t.psi(x) for t in tabs]
        assert vals == sorted(vals)


def test_twisted_exact_for_integers():
    tab = build_table(10**5, 100, Mode.SMOOTH_ENUM)
    s = friable_stats(tab, z=3)
    _, om = tab.restrict(10**5)
    assert s.psi_f == sum(3 ** int(k) for k in om)


def test_partial_sum_M():
    for z in (1, 2, 0.3 + 1j):
        assert arith.partial_sum_M(None, 1, z) == 1
    assert arith.partial_sum_M(None, 10, 1) == 10
    assert arith.partial_sum_M(None, 10, 2) == 23
    tab = build_table(100, 100)
    assert arith.partial_sum_M(tab, 50, 2) == arith.partial_sum_M(None, 50, 2)
    M = arith.cumulative_M(10, 2)
    assert M[10] == 23 and M[0] == 0


def test_kolmogorov_uses_both_limits():
    tab = build_table(10**4, 50)
    s = friable_stats(tab)
    mu, sigma = s.mean, math.sqrt(s.var)
    d = s.kolmogorov(mu, sigma, normal_cdf)
    F = s.cdf(mu, sigma)
    grid = np.linspace(-6, 6, 20001)
    brute = max(abs(F(v) - normal_cdf(v)) for v in grid)
    assert brute <= d + 1e-12
    assert d - brute < 1e-3


def test_cache_round_trip(tmp_path):
    path = tmp_path / "c.bin"
    arith.write_cache(path, 5000)
    raw = path.read_bytes()
    assert raw[:5] == b"FRKT1"
    assert int.from_bytes(raw[5:13], "little") == 5000
    t = arith.read_cache(path, 30)
    ref = build_table(5000, 30)
    assert np.array_equal(t.friable, ref.friable)
    path.write_bytes(b"XXXXX" + raw[5:])
    with pytest.raises(ConfigError):
        arith.read_cache(path, 30)


def test_determinism_across_block_sizes():
    a = arith.sieve_records(20000, block=1000)
    b = arith.sieve_records(20000, block=7919)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_errors():
    with pytest.raises(DomainError):
        build_table(0, 5)
    with pytest.raises(DomainError):
        build_table(10, 1)
    with pytest.raises(ResourceError):
        build_table(10**6, 10, budget=10**6)
    tab = build_table(100, 5)
    with pytest.raises(DomainError):
        tab.psi(101)
    with pytest.raises(DomainError):
        friable_stats(tab, k=-1)

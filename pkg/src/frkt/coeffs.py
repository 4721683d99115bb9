"""Euler products and the coefficients a_j(f_z) for f_z(n) = z^omega(n).

The Dirichlet series of f_z is F(s) = zeta(s)^z B_z(s) with

    B_z(s) = prod_p (1 - p^-s)^z (1 + z / (p^s - 1)),

and a_j(f_z) are the Taylor coefficients of s^z F(s+1) / (s+1) at s = 0.
"""
import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RangeError, SingularFactorError
from .primes import primes_up_to
from .series import SeriesPoly
from .specfun import EULER_GAMMA, eval_J

# gamma_1 .. gamma_10, Laurent coefficients of zeta at 1
STIELTJES = (
    -0.07281584548367672486,
    -0.009690363192872318485,
    0.002053834420303345866,
    0.002325370065467300057,
    0.0007933238173010627018,
    -0.0002387693454301996099,
    -0.0005272895670577510461,
    -0.0003521233538030395096,
    -0.00003439477441808804818,
    0.0002053328149090647947,
)

MIN_PRIME_CUTOFF = 1000
CAUCHY_RADIUS = 0.25


@dataclass(frozen=True)
class EulerProductValue:
    z: complex
    s: complex
    prime_cutoff: int
    value: complex
    tail_bound: float
    corrected: complex


def _log_factor_coeff(z, k):
    # log of one factor = sum_k c_k q^k with q = p^-s, c_1 = 0
    w = 1 - z
    return (w - w**k) / k


def euler_B(z, s=1.0, P=100_000, terms=12):
    """Truncated product of B_z(s) over p <= P.

    ``tail_bound`` bounds |B_z(s) - value|: the omitted log-factors satisfy
    |log factor| <= C |p^-s|^2 with C from the power series in q = p^-s, and
    sum_{p>P} p^{-2 sigma} <= P^{1-2 sigma} / (2 sigma - 1).  ``corrected``
    multiplies in the prime-number-theorem estimate of the omitted factors,
    sum_k c_k E1((k s - 1) log P).
    """
    z, s = complex(z), complex(s)
    sigma = s.real
    if not sigma > 0.5:
        raise DomainError("euler_B needs Re s > 1/2")
    if P < MIN_PRIME_CUTOFF:
        raise DomainError(f"prime cutoff must be >= {MIN_PRIME_CUTOFF}")
    p = primes_up_to(P).astype(float)
    q = np.exp(-s * np.log(p))
    # (1 - q)^z (1 + z q / (1 - q)) = (1 - q)^(z-1) (1 + (z-1) q), exactly 1 at z = 1
    second = 1 + (z - 1) * q
    if np.any(np.abs(second) < 1e-300):
        bad = int(p[np.argmin(np.abs(second))])
        raise SingularFactorError(f"Euler factor vanishes at p = {bad}")
    logs = (z - 1) * np.log1p(-q) + np.log(second)
    log_value = complex(np.sum(logs))
    value = cmath.exp(log_value)

    qP = P ** (-sigma)
    w = abs(1 - z)
    if w * qP >= 1:
        raise RangeError("tail series does not converge at this cutoff")
    C = sum((w + w**k) / k * qP ** (k - 2) for k in range(2, 200))
    log_tail = C * P ** (1 - 2 * sigma) / (2 * sigma - 1)
    tail_bound = abs(value) * math.expm1(log_tail)

    L = math.log(P)
    est = 0j
    for k in range(2, terms + 1):
        c = _log_factor_coeff(z, k)
        if c != 0:
            est += c * eval_J((k * s - 1) * L)
    corrected = cmath.exp(log_value + est)
    return EulerProductValue(z, s, int(P), value, tail_bound, corrected)


def szeta_series(J):
    """Coefficients of s zeta(s+1) = 1 + gamma s + sum_{n>=1} (-1)^n gamma_n s^{n+1} / n!."""
    if J < 0:
        raise DomainError("J must be >= 0")
    if J > len(STIELTJES):
        raise RangeError(f"order {J} exceeds the Stieltjes table (max {len(STIELTJES)})")
    c = np.zeros(J + 1, dtype=complex)
    c[0] = 1
    if J >= 1:
        c[1] = EULER_GAMMA
    for n in range(1, J):
        c[n + 1] = (-1) ** n * STIELTJES[n - 1] / math.factorial(n)
    return SeriesPoly(c)


def b_taylor(z, J, M=64, radius=CAUCHY_RADIUS, P=100_000):
    """Taylor coefficients of s -> B_z(s+1) at 0 by the trapezoid rule on |s| = radius."""
    theta = 2 * np.pi * np.arange(M) / M
    nodes = radius * np.exp(1j * theta)
    vals = np.array([euler_B(z, 1 + sn, P).corrected for sn in nodes])
    c = np.fft.fft(vals) / M
    k = np.arange(J + 1)
    return SeriesPoly(c[: J + 1] / radius**k)


def a_coeffs(z, J, M=64, P=100_000):
    """a_0 .. a_J of f_z from (s zeta(s+1))^z B_z(s+1) / (1+s)."""
    z = complex(z)
    if z == 0:
        raise DomainError("z must be non-zero")
    if not 0 <= J <= 8:
        raise DomainError("J must lie in 0..8")
    main = szeta_series(J) ** z
    b = b_taylor(z, J, M=M, P=P)
    one_plus_s = SeriesPoly(np.array([1, 1] + [0] * (J - 1), dtype=complex)[: J + 1])
    if J == 0:
        one_plus_s = SeriesPoly([1])
    return main * b / one_plus_s


def a_coeff(coeffs, j):
    """a_j with the convention a_j = 0 for j < 0."""
    return coeffs[j]

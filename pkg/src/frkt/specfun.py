"""Special functions: I, J (= E1), the Laplace transform of Dickman's rho,
the saddle-point roots xi and zeta_0, zeta and friable zeta, Gamma and Phi.

All routines work in double precision and are pure functions.
"""
import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError, PoleError, RangeError
from .primes import primes_up_to

EULER_GAMMA = float(np.euler_gamma)

SERIES_RADIUS = 20.0
NEWTON_TOL = 1e-12
HOMOTOPY_STEP = math.pi / 32

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class ZParams:
    """The complex parameter z with the integer/fractional split z = m_z - theta_z."""

    z: complex
    eps_z: int
    m: int
    m_z: int
    theta: float
    theta_z: complex

    @classmethod
    def from_z(cls, z):
        z = complex(z)
        if z == 0:
            raise DomainError("z must be non-zero")
        eps = 1 if z.real > 0 else -1
        m_z = math.ceil(z.real)
        m = eps * m_z
        theta = m_z - z.real
        theta_z = complex(theta, -z.imag)
        return cls(z, eps, m, m_z, theta, theta_z)

    @property
    def is_integer(self):
        return self.z.imag == 0 and self.z.real == round(self.z.real)


# ---------------------------------------------------------------- I and J


def expm1c(w):
    """exp(w) - 1 without cancellation, for complex scalars or arrays."""
    return 2.0 * np.exp(w / 2) * np.sinh(w / 2)


def _I_series(w):
    total = 0j
    term = 1 + 0j
    for n in range(1, 400):
        term *= w / n
        inc = term / n
        total += inc
        if abs(inc) <= 1e-17 * max(abs(total), 1e-300) and n > abs(w):
            break
    return total


def _I_quad(w):
    panels = max(2, math.ceil(abs(w) / 2))
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    wt = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return complex(np.sum(wt * expm1c(t * w) / t))


def eval_I(w, series_radius=SERIES_RADIUS):
    """I(w) = int_0^w (e^v - 1) dv / v.

    The power series is used where it is free of cancellation (|w| small, or
    |w| <= series_radius with w close to the positive real axis); otherwise a
    composite Gauss-Legendre rule along the segment [0, w].
    """
    w = complex(w)
    if w.real > 700:
        raise RangeError(f"I(w) overflows for Re w = {w.real}")
    if w == 0:
        return 0j
    aw = abs(w)
    if aw <= 2.0 or (aw <= series_radius and aw - w.real <= 7.0):
        return _I_series(w)
    return _I_quad(w)


def eval_J(s):
    """J(s) = int_0^oo e^{-s-t}/(s+t) dt = E1(s), for Re s > 0."""
    s = complex(s)
    if not s.real > 0:
        raise DomainError(f"J(s) needs Re s > 0, got {s}")
    return complex(special.exp1(s))


def rho_hat(s):
    """Laplace transform of Dickman's function, exp(gamma + I(-s))."""
    return cmath.exp(EULER_GAMMA + eval_I(-complex(s)))


def rho_hat_pow(s, z):
    """rho_hat(s)^z on the branch exp(z (gamma + I(-s))), entire in s."""
    return cmath.exp(complex(z) * (EULER_GAMMA + eval_I(-complex(s))))


# ----------------------------------------------------------- saddle points


@dataclass(frozen=True)
class SaddleResult:
    argument: complex
    root: complex
    residual: float
    derivative: complex


def _E(x):
    # E(x) = (e^x - 1)/x, entire with E(0) = 1; E'(x) = (e^x - E(x))/x
    if abs(x) < 1e-3:
        e = 1 + x / 2 + x * x / 6 + x**3 / 24 + x**4 / 120 + x**5 / 720
        de = 0.5 + x / 3 + x * x / 8 + x**3 / 30 + x**4 / 144
        return e, de
    if isinstance(x, complex):
        e = complex(expm1c(x)) / x
        return e, (cmath.exp(x) - e) / x
    e = math.expm1(x) / x
    return e, (math.exp(x) - e) / x


def _residual(root, w):
    # |e^r - 1 - w r| scaled by max(1, |e^r|): absolute below 1, relative above
    er = cmath.exp(root)
    return abs(complex(expm1c(root)) - w * root) / max(1.0, abs(er))


def solve_xi(u, tol=NEWTON_TOL, max_iter=200):
    """Real root xi(u) of e^xi = 1 + u xi (xi(1) = 0) and its derivative xi'(u).

    Newton's method on E(xi) = u with E(x) = (e^x - 1)/x, which removes the
    trivial root x = 0; E is increasing and convex, so Newton started to the
    right of the root converges monotonically.
    """
    u = float(u)
    if not u > 0:
        raise DomainError(f"xi(u) needs u > 0, got {u}")
    if u == 1.0:
        return 0.0, 2.0
    x = 2.0 * math.log(u) + 2.0 if u > 1 else 0.0
    for _ in range(max_iter):
        e, de = _E(x)
        step = (e - u) / de
        x -= step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    res = _residual(x, u)
    if res > tol:
        raise ConvergenceError("xi(u) Newton iteration failed", last=x, residual=res)
    return x, 1.0 / _E(x)[1]


def _newton_complex(w, z0, max_iter, tol):
    z = z0
    for _ in range(max_iter):
        e, de = _E(z)
        if de == 0:
            break
        step = (e - w) / de
        z -= step
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            break
    return z, _residual(z, w) <= tol


def solve_zeta0(w, tol=NEWTON_TOL, max_iter=100, step=HOMOTOPY_STEP):
    """Root zeta_0(w) of e^zeta = 1 + w zeta continued from the real root xi(|w|).

    The argument of w is swept from 0 in steps of at most ``step`` with a
    Newton correction at each stage.  For Im w < 0 the conjugate of the
    upper-half-plane root is returned, so zeta_0 is real on the positive axis
    and zeta_0(conj w) = conj zeta_0(w).
    """
    w = complex(w)
    if w == 0:
        raise DomainError("zeta_0 needs w != 0")
    r, phi = abs(w), cmath.phase(w)
    if abs(phi) >= math.pi:
        raise DomainError("zeta_0 needs |arg w| < pi")
    flip = phi < 0
    phi = abs(phi)
    z = complex(solve_xi(r, tol=tol)[0])
    n = max(1, math.ceil(phi / step)) if phi > 0 else 0
    for k in range(1, n + 1):
        target = cmath.rect(r, phi * k / n)
        z, ok = _newton_complex(target, z, max_iter, tol)
        if not ok:
            raise ConvergenceError(
                f"zeta_0 Newton failed at arg {phi * k / n:.4f}", last=z, residual=_residual(z, target)
            )
    wp = cmath.rect(r, phi) if n else complex(r)
    res = _residual(z, wp)
    if res > tol:
        raise ConvergenceError("zeta_0 residual above tolerance", last=z, residual=res)
    deriv = 1.0 / _E(z)[1]
    if flip:
        z, deriv = z.conjugate(), deriv.conjugate()
    return SaddleResult(argument=w, root=z, residual=res, derivative=deriv)


def zeta0(w):
    return solve_zeta0(w).root


# ---------------------------------------------------------------------- zeta

_BERNOULLI_2K = [1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510]


def zeta(s, terms=10_000, order=8):
    """Riemann zeta by Euler-Maclaurin summation (terms direct, order corrections)."""
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    n = np.arange(1, terms, dtype=float)
    head = complex(np.sum(np.exp(-s * np.log(n))))
    N = float(terms)
    tail = N ** (1 - s) / (s - 1) + 0.5 * N ** (-s)
    rising = s  # s (s+1) ... (s + 2k - 2)
    fact = 2.0
    for k in range(1, order + 1):
        tail += _BERNOULLI_2K[k - 1] / fact * rising * N ** (-s - 2 * k + 1)
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        fact *= (2 * k + 1) * (2 * k + 2)
    return head + tail


def zeta_y(s, y):
    """Friable zeta: the finite Euler product over primes p <= y, Re s > 0."""
    s = complex(s)
    if not s.real > 0:
        raise DomainError("zeta(s, y) needs Re s > 0")
    if s.real * math.log(2) > 700:
        raise RangeError("p^-s underflows")
    p = primes_up_to(math.floor(y)).astype(float)
    return complex(np.prod(1.0 / (1.0 - np.exp(-s * np.log(p)))))


def zeta_values(s, y=None):
    """zeta(s, y) when y is given, else zeta(s)."""
    return zeta(s) if y is None else zeta_y(s, y)


# --------------------------------------------------------------------- Gamma


def _is_pole(s):
    return s.imag == 0 and s.real <= 0 and s.real == round(s.real)


def gamma_complex(s):
    s = complex(s)
    if _is_pole(s):
        raise PoleError(f"Gamma has a pole at {s.real:g}")
    return complex(special.gamma(s))


def rgamma(s):
    """1/Gamma(s), zero at the poles of Gamma."""
    return complex(special.rgamma(complex(s)))


def normal_cdf(v):
    """Standard normal distribution function."""
    return 0.5 * math.erfc(-v / math.sqrt(2.0))

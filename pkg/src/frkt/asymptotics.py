"""Predictions for Psi(x, y; f_z) and for the distribution of omega(n) over
friable integers, assembled from specfun, dde, coeffs and arith."""
import cmath
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import optimize

from . import arith
from .coeffs import a_coeffs, euler_B
from .dde import Kind, Psi, big_R, jump, solve_system
from .errors import DomainError, RangeError
from .primes import primes_up_to
from .specfun import (
    EULER_GAMMA,
    ZParams,
    eval_I,
    normal_cdf,
    rgamma,
    solve_xi,
    solve_zeta0,
    zeta,
    zeta_y,
)

DEFAULT_BETA = 0.3
DEFAULT_DELTA = 0.2
R_BRACKET = (0.25, 4.0)
LOCAL_RANGE = (0.05, 1.0, 4.0)  # c1, c2, c3 of the tilted-law range
LARGE_DEV_C = 0.01

_GX, _GW = np.polynomial.legendre.leggauss(40)


class ValidityWarning(UserWarning):
    """(x, y) outside the range where the expansions are asserted."""


class LocalMode(Enum):
    GAUSS = "GAUSS"
    TILTED = "TILTED"


# ------------------------------------------------------------------ ranges


def log_ratio(x, y):
    if not (x >= y >= 2):
        raise DomainError("need x >= y >= 2")
    return math.log(x) / math.log(y)


def in_G(x, y, beta=DEFAULT_BETA):
    """exp((log x)^(1-beta)) <= y <= x, x >= 3."""
    return x >= 3 and math.log(y) >= math.log(x) ** (1 - beta) and y <= x


def e_y(y, beta=DEFAULT_BETA):
    return math.log(math.log(y)) ** (1 / beta) / math.log(y)


def in_V(u, J, y, beta=DEFAULT_BETA):
    """u >= 1 and |u - j| >= e_y for every integer 1 <= j <= min(u, J+1)."""
    if u < 1:
        return False
    ey = e_y(y, beta)
    top = min(math.floor(u), J + 1)
    return all(abs(u - j) >= ey for j in range(1, top + 1))


@lru_cache(maxsize=64)
def _table(kind, z, v_max):
    return solve_system(kind, ZParams.from_z(z), v_max)


@lru_cache(maxsize=64)
def _psi(z, v_max):
    return Psi(ZParams.from_z(z), v_max)


def _vmax(u):
    return float(math.ceil(u) + 1)


# ------------------------------------------------------------ Lambda_f


def _K(tab, t, L, z):
    """K(t) = -z int_1^t g(w-1) e^{(w-t) L} / w dw for an array of t >= 1."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape, dtype=complex)
    top = int(math.ceil(t.max())) if t.size else 1
    for k in range(1, top):
        a = np.full(t.shape, float(k))
        b = np.minimum(t, k + 1.0)
        live = b > a
        if not np.any(live):
            continue
        a, b, tt = a[live], b[live], t[live]
        half = 0.5 * (b - a)
        w = 0.5 * (a + b)[:, None] + half[:, None] * _GX[None, :]
        g = tab(np.clip(w.ravel() - 1, 0, None)).reshape(w.shape)
        vals = g * np.exp((w - tt[:, None]) * L) / w
        out[live] += half * (vals @ _GW)
    return -z * out


def lambda_f(x, y, z, omega=None):
    """Lambda_f(x, y) = x lambda_{y,f}(u) for f = f_z.

    Integrating the Stieltjes integral by parts against g_z' = -z g_z(v-1)/v
    gives lambda = M(x)/x + sum_{n <= x/y} f(n) K(u - log n / log y) / n,
    a finite sum with a smooth kernel.
    """
    z = complex(z)
    u = log_ratio(x, y)
    L = math.log(y)
    tab = _table(Kind.G, z, _vmax(u))
    X = int(math.floor(x))
    if omega is None:
        omega, _ = arith.sieve_records(X)
    f = z ** omega[1 : X + 1].astype(float)
    lam = complex(np.sum(f)) / x
    N = int(math.floor(x / y))
    if N >= 1:
        n = np.arange(1, N + 1, dtype=float)
        t = u - np.log(n) / L
        keep = t >= 1
        lam += complex(np.sum(f[:N][keep] * _K(tab, t[keep], L, z) / n[keep]))
    return x * lam


def lambda_f_direct(x, y, z):
    """Jump-plus-drift evaluation of Lambda_f, piece by piece in n (small x only).

    sum_{n <= x} g_z(u - v_n) f(n)/n - log y int_0^u g_z(u - v) M(y^v) y^-v dv.
    """
    z = complex(z)
    u = log_ratio(x, y)
    L = math.log(y)
    tab = _table(Kind.G, z, _vmax(u))
    X = int(math.floor(x))
    M = arith.cumulative_M(X, z)
    n = np.arange(1, X + 1, dtype=float)
    jumps = complex(np.sum(tab(u - np.log(n) / L) * (M[1:] - M[:-1]) / n))
    drift = 0j
    for k in range(1, X + 1):
        a = math.log(k) / L
        b = min(math.log(k + 1) / L, u)
        if b <= a:
            continue
        cut = sorted({a, b, *[u - j for j in range(0, int(u) + 1) if a < u - j < b]})
        for lo, hi in zip(cut[:-1], cut[1:]):
            half = 0.5 * (hi - lo)
            v = 0.5 * (lo + hi) + half * _GX
            drift += M[k] * half * complex(np.sum(_GW * tab(u - v) * np.exp(-L * v)))
    return x * (jumps - L * drift)


# ------------------------------------------------------ main expansion


@dataclass(frozen=True)
class Expansion:
    z: ZParams
    J: int
    terms: tuple  # (j, a_j, psi_z^(j)(u))
    main: complex
    error_envelope: float
    correction: complex = 0j
    in_range: bool = True
    in_V: bool = True
    truncated: bool = False

    @property
    def total(self):
        return self.main + self.correction


def main_expansion(x, y, z, J, beta=DEFAULT_BETA, delta=DEFAULT_DELTA):
    """x (log y)^{z-1} sum_j a_j psi_z^(j)(u) / (log y)^j with the range checks.

    Outside V_{J_z}(y): integer z gets x U_J added, other z keep only the
    terms j < l + m_z (l < u <= l + 1).
    """
    zp = ZParams.from_z(z)
    z = zp.z
    if J < 0:
        raise DomainError("J must be >= 0")
    u = log_ratio(x, y)
    L = math.log(y)
    ok = in_G(x, y, beta)
    if not ok:
        warnings.warn(f"(x, y) = ({x}, {y}) outside G_beta", ValidityWarning, stacklevel=2)
    Jz = J + 1 - zp.m_z
    inV = in_V(u, Jz, y, beta)
    ell = math.ceil(u) - 1
    top = J
    truncated = False
    if not inV and not zp.is_integer:
        top = min(J, ell + zp.m_z - 1)
        truncated = True
    a = a_coeffs(z, J)
    psi = _psi(z, _vmax(u))
    terms = []
    total = 0j
    # l < u <= l + 1: at an integer u the derivatives are left limits
    side = "left" if u == round(u) else "right"
    for j in range(0, top + 1):
        d = psi.derivative(j, u, side=side)
        terms.append((j, a[j], d))
        total += a[j] * d / L**j
    main = x * L ** (z - 1) * total
    env = abs(x * big_R(zp, u) * math.log(2 * u) ** (J + 1) / L ** (J + 2 - z.real))
    corr = 0j
    if not inV and zp.is_integer:
        corr = x * correction_terms(x, y, z, J, coeffs=a)
    return Expansion(zp, J, tuple(terms), main, env, corr, ok, inV, truncated)


def leading_term(x, y, z):
    """a_0(f_z) x psi_z(u) (log y)^{z-1}."""
    zp = ZParams.from_z(z)
    u = log_ratio(x, y)
    a0 = euler_B(zp.z, 1.0).corrected
    return a0 * x * _psi(zp.z, _vmax(u))(u) * math.log(y) ** (zp.z - 1)


# ------------------------------------------------- correction terms U_J


def nu_moments(z, y, K, coeffs=None):
    """int_0^oo v^k dnu_{y,f}(v) = (-1)^k k! a_{k+m_z-1} / (log y)^{k+theta_z}, k <= K."""
    zp = ZParams.from_z(z)
    L = math.log(y)
    a = coeffs if coeffs is not None else a_coeffs(zp.z, K + zp.m_z - 1)
    return [(-1) ** k * math.factorial(k) * a[k + zp.m_z - 1] / L ** (k + zp.theta_z) for k in range(K + 1)]


def _poly_density_coeffs(zp, L, a):
    # dnu = dmu - sum_{1<=i<m_z} c_i v^{i-1} dv
    m = zp.m_z
    return {i: L ** (zp.z - 1) * a[m - 1 - i] / (math.factorial(i - 1) * L ** (m - 1 - i)) for i in range(1, m)}


def W(j, t, y, z, coeffs=None):
    """W_j(t, y; f_z) = int_t^oo (v - t)^j dnu_{y,f}(v) for integer z >= 1.

    Written as the full moment (exact, from the a_k) minus the part on
    [0, t), which only involves n <= y^t.
    """
    zp = ZParams.from_z(z)
    if not zp.is_integer or zp.z.real < 1:
        raise DomainError("W_j is implemented for z in N*")
    if t < 0:
        raise DomainError("t must be >= 0")
    L = math.log(y)
    a = coeffs if coeffs is not None and len(coeffs) > j + zp.m_z - 1 else a_coeffs(zp.z, j + zp.m_z - 1)
    mom = nu_moments(zp.z, y, j, a)
    full = sum(math.comb(j, k) * (-t) ** (j - k) * mom[k] for k in range(j + 1))

    # part on [0, t): A(v) = M(y^v; f) y^-v, nu = dA - poly dv
    N = int(math.floor(math.exp(t * L) * (1 + 1e-15)))
    head = 0j
    if N >= 1:
        M = arith.cumulative_M(N, zp.z)
        if j == 0:
            vt = math.exp(t * L)
            Nm = N - 1 if abs(vt - round(vt)) < 1e-9 * vt and round(vt) == N else N
            head += M[Nm] / vt  # A(t-)
        else:
            for k in range(1, N + 1):
                lo = math.log(k) / L
                hi = min(math.log(k + 1) / L, t)
                if hi <= lo:
                    continue
                half = 0.5 * (hi - lo)
                v = 0.5 * (lo + hi) + half * _GX
                head += -j * M[k] * half * np.sum(_GW * (v - t) ** (j - 1) * np.exp(-L * v))
    for i, c in _poly_density_coeffs(zp, L, a).items():
        # int_0^t (v - t)^j v^{i-1} dv = (-1)^j t^{i+j} (i-1)! j! / (i+j)!
        head -= c * (-1) ** j * t ** (i + j) * math.factorial(i - 1) * math.factorial(j) / math.factorial(i + j)
    return complex(full - head)


def correction_terms(x, y, z, J, coeffs=None):
    """U_J = sum_{l <= j <= J_z} (-1)^{j+1} delta_{z,l,j} / j! W_j(u - l) (l < u <= l+1)."""
    zp = ZParams.from_z(z)
    if not zp.is_integer:
        raise DomainError("U_J is defined for integer z only")
    if zp.z.real < 1:
        raise DomainError("U_J is implemented for z in N* (W_j needs the a_j moments)")
    u = log_ratio(x, y)
    ell = math.ceil(u) - 1
    Jz = J + 1 - zp.m_z
    a = coeffs if coeffs is not None and len(coeffs) > J else a_coeffs(zp.z, J)
    tab = _psi(zp.z, _vmax(u)).table
    m = zp.m
    total = 0j
    for j in range(max(ell, 0), Jz + 1):
        if ell < 1 or ell > j + 1 - m:
            continue  # delta vanishes outside 1 <= h <= j + 1 - m
        d = jump(tab, ell, j)
        total += (-1) ** (j + 1) * d / math.factorial(j) * W(j, u - ell, y, zp.z, a)
    return total


# --------------------------------------------------------- density Z


def _lower_incomplete(a, th):
    # int_0^a e^w w^{th-1} dw = sum_k a^{k+th} / (k! (k + th))
    total, term = 0j, complex(a) ** th
    for k in range(400):
        inc = term / (k + th)
        total += inc
        if k > a and abs(inc) < 1e-17 * abs(total):
            break
        term *= a / (k + 1)
    return total


def z_density(v, y, z):
    """Z_{y,f}(v), the density of dmu_{y,f} for Re z not an integer."""
    zp = ZParams.from_z(z)
    if zp.z.real == round(zp.z.real):
        raise DomainError("z_density needs Re z not an integer")
    L = math.log(y)
    V = v * L
    X = math.exp(V)
    if abs(X - round(X)) < 1e-12 * X:
        raise DomainError("y^v is an integer: density undefined there")
    N = int(math.floor(X))
    th = zp.theta_z
    omega, _ = arith.sieve_records(max(N, 1))
    n = np.arange(1, N + 1, dtype=float)
    f = zp.z ** omega[1 : N + 1].astype(float)
    d = V - np.log(n)
    inner = np.array([_lower_incomplete(dd, th) for dd in d])
    # derivative of e^-V sum f(n) int_0^{V - log n} e^w w^(th-1) dw / Gamma(th);
    # differentiating e^-V gives the minus sign on the first sum
    ze = (np.sum(f / (n * d ** (1 - th))) - math.exp(-V) * np.sum(f * inner)) * rgamma(th)
    return complex(L ** (1 - th) * ze)


# ------------------------------------------------------- omega statistics


@dataclass(frozen=True)
class MomentSet:
    r: float
    u: float
    y: float
    mu_r: float
    sigma_r2: float
    L: float
    K_r: float


def _mu_sigma(u, y, r):
    xi, dxi = solve_xi(u / r)
    Ixi = eval_I(xi).real
    L = math.log(math.log(y)) + Ixi
    mu = r * L
    sigma2 = mu - u * u * dxi / r
    return mu, sigma2, L, Ixi, xi


def sigma2_closed(u, y, r):
    """mu_r - u^2 xi / (r + u (xi - 1)), the closed form of mu_r - u^2 xi'(u/r) / r."""
    mu, _, _, _, xi = _mu_sigma(u, y, r)
    den = r + u * (xi - 1)
    if abs(den) < 1e-8 * r:
        return mu - 2 * u * u / r  # u = r: xi = 0, xi' = 2
    return mu - u * u * xi / den


def moments(x, y, r, with_K=True):
    if not R_BRACKET[0] <= r <= R_BRACKET[1]:
        raise DomainError(f"r must lie in {R_BRACKET}")
    u = log_ratio(x, y)
    mu, s2, L, Ixi, _ = _mu_sigma(u, y, r)
    K = math.nan
    if with_K:
        K = K_r(u, r, mu, s2, Ixi)
    return MomentSet(float(r), u, float(y), mu, s2, L, K)


def K_r(u, r, mu, s2, Ixi):
    if s2 <= 0 or mu <= 0:
        raise RangeError(f"K_r needs mu_r, sigma_r^2 > 0 (got {mu:.6g}, {s2:.6g})")
    pref = euler_B(r, 1.0).corrected.real
    rho_r = _table(Kind.RHO, complex(r), _vmax(u))(u).real
    rho_1 = _table(Kind.RHO, 1 + 0j, _vmax(u))(u).real
    return pref * rho_r * math.exp((1 - r) * Ixi) * math.sqrt(mu) / (rho_1 * math.sqrt(s2))


def solve_r_for_k(x, y, k, bracket=R_BRACKET):
    """r with mu_r(x, y) = k, by bisection.

    d mu_r / dr = sigma_r^2 / r, so mu_r increases only while sigma_r^2 > 0;
    the upper end of the bracket is pulled back to the first zero of sigma_r^2.
    """
    u = log_ratio(x, y)

    def g(r):
        return _mu_sigma(u, y, r)[0] - k

    def s2(r):
        return _mu_sigma(u, y, r)[1]

    lo, hi = bracket
    if s2(lo) <= 0:
        raise RangeError(f"sigma_r^2 <= 0 already at r = {lo}")
    if s2(hi) <= 0:
        hi = optimize.brentq(s2, lo, hi, xtol=1e-14, rtol=1e-14)
    glo, ghi = g(lo), g(hi)
    if glo > 0 or ghi < 0:
        raise RangeError(f"mu_r = {k} has no root in {bracket}: mu = {glo + k:.6g} .. {ghi + k:.6g}")
    return optimize.brentq(g, lo, hi, xtol=1e-14, rtol=1e-14)


def predict_ek(x, y, v):
    return normal_cdf(v)


def local_range_ok(x, y, k, consts=LOCAL_RANGE):
    c1, c2, c3 = consts
    u = log_ratio(x, y)
    mu, s2, _, _, xi = _mu_sigma(u, y, 1.0)
    I1 = eval_I(solve_xi(u)[0]).real
    return c1 * s2 - c2 * u / math.log(2 * u) ** 2 <= k - I1 <= c3 * s2


def predict_local(x, y, k, mode=LocalMode.GAUSS, consts=LOCAL_RANGE):
    mode = LocalMode(mode)
    if k < 0:
        raise DomainError("k must be >= 0")
    u = log_ratio(x, y)
    if mode is LocalMode.GAUSS:
        mu, s2, *_ = _mu_sigma(u, y, 1.0)
        return math.exp(-0.5 * (mu - k) ** 2 / s2) / math.sqrt(2 * math.pi * s2)
    if not local_range_ok(x, y, k, consts):
        raise RangeError(f"k = {k} outside the tilted-law range")
    r = solve_r_for_k(x, y, k)
    ms = moments(x, y, r)
    return ms.K_r * math.exp(-ms.L + k * math.log(ms.L) - math.lgamma(k + 1))


def large_dev(x, y, v, c=LARGE_DEV_C):
    u = log_ratio(x, y)
    _, s2, *_ = _mu_sigma(u, y, 1.0)
    sigma = math.sqrt(s2)
    return math.exp(-v * v / 3) + math.exp(-c * s2 / math.log(sigma) ** 4)


# ------------------------------------------------------------- saddles


def alpha_z(x, y, z):
    """1 - Re zeta_0(u/z) / log y."""
    u = log_ratio(x, y)
    return 1 - solve_zeta0(u / complex(z)).root.real / math.log(y)


def alpha_r(x, y, r, bracket=(1e-6, 2.0)):
    """Root alpha of sum_{p <= y} r log p / (p^alpha - 1) = log x."""
    p = primes_up_to(int(y)).astype(float)
    lp = np.log(p)
    target = math.log(x)

    def g(a):
        return r * float(np.sum(lp / np.expm1(a * lp))) - target

    lo, hi = bracket
    if g(lo) < 0 or g(hi) > 0:
        raise RangeError(f"saddle not bracketed in {bracket}")
    return optimize.brentq(g, lo, hi, xtol=1e-15, rtol=1e-15)


def saddle_residual(x, y, r, a):
    p = primes_up_to(int(y)).astype(float)
    lp = np.log(p)
    return abs(r * float(np.sum(lp / np.expm1(a * lp))) - math.log(x))


def char_fn_diag(x, y, r, t):
    """(H_r(t), i t mu_r - t^2 sigma_r^2 / 2) with
    H_r(t) = r (e^{it} - 1) log log y + F_r(0) - F_r(t), F_r(t) = u w_t - r e^{it} I(w_t)."""
    if abs(t) > math.pi:
        raise DomainError("|t| must be <= pi")
    u = log_ratio(x, y)

    def F(tt):
        w = solve_zeta0(u * cmath.exp(-1j * tt) / r).root
        return u * w - r * cmath.exp(1j * tt) * eval_I(w)

    H = r * (cmath.exp(1j * t) - 1) * math.log(math.log(y)) + F(0) - F(t)
    mu, s2, *_ = _mu_sigma(u, y, r)
    return H, 1j * t * mu - 0.5 * t * t * s2


# ------------------------------------------------ friable zeta function


def friable_zeta_ratio(s, y, z):
    """zeta(s, y)^z / ({(s-1) zeta(s)}^z (log y)^z rho_hat((s-1) log y)^z) - 1 for real s > 1."""
    z = complex(z)
    s = float(s)
    lhs = z * cmath.log(zeta_y(s, y))
    sy = (s - 1) * math.log(y)
    rhs = z * (math.log((s - 1) * zeta(s).real) + math.log(math.log(y)) + EULER_GAMMA + eval_I(-sy))
    return cmath.exp(lhs - rhs) - 1

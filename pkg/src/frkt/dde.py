"""Method-of-steps solvers for the delay equations

    v f'(v) + a f(v) + z f(v-1) = 0     (v > 1)

with a = 0 (g_z), a = 1 - z (rho_z) and a = theta_z (phi_z), together with
derivative recursions, jump tables, asymptotic forms and the Taylor data c_j.

Each unit interval [h, h+1] is stored in local coordinate t = v - h as a list
of Chebyshev panels.  When the initial exponent is not a non-negative integer
the solution behaves like t^(alpha_0 + h) at the left end of segment h, so the
panels there are graded geometrically towards t = 0.
"""
import cmath
import csv
import math
from enum import Enum

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy import integrate

from .errors import DomainError, RangeError, SmoothnessError, SolverError
from .series import SeriesPoly
from .specfun import EULER_GAMMA, ZParams, eval_I, rgamma, solve_zeta0

CHEB_DEGREE = 32
GRADING_RATIO = 0.25
GRADING_DIGITS = 16
MAX_GRADED_PANELS = 4000
INVERSION_SWITCH = 1e-9


class Kind(Enum):
    G = "G"
    RHO = "RHO"
    PHI = "PHI"


def _cheb_tools(n):
    # Lobatto nodes x_j = cos(pi j / n), descending; Trefethen's differentiation matrix
    j = np.arange(n + 1)
    x = np.cos(np.pi * j / n)
    c = np.where((j == 0) | (j == n), 2.0, 1.0) * (-1.0) ** j
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1 / c) / (dx + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    # values at the nodes -> Chebyshev coefficients (DCT-I)
    w = np.ones(n + 1)
    w[0] = w[-1] = 0.5
    T = np.cos(np.pi * np.outer(j, j) / n) * w[None, :] * (2.0 / n)
    T[0] *= 0.5
    T[-1] *= 0.5
    return x, D, T


_TOOLS = {}


def _tools(n):
    if n not in _TOOLS:
        _TOOLS[n] = _cheb_tools(n)
    return _TOOLS[n]


def _falling(alpha, j):
    out = 1 + 0j
    for i in range(j):
        out *= alpha - i
    return out


def _region(t, side):
    """0: zero region, 1: initial data, 2: delay equation."""
    if t > 1 or (t == 1 and side == "right"):
        return 2
    if t > 0 or (t == 0 and side == "right"):
        return 1
    return 0


class SolutionTable:
    """Dense piecewise representation of g_z, rho_z or phi_z on [0, v_max]."""

    def __init__(self, kind, zp, v_max, degree=CHEB_DEGREE):
        self.kind = Kind(kind)
        self.zp = zp
        self.v_max = float(v_max)
        self.degree = degree
        z = zp.z
        if self.kind is Kind.G:
            self.a_coef, self.alpha0, self.scale = 0j, 0j, 1 + 0j
        elif self.kind is Kind.RHO:
            self.a_coef, self.alpha0, self.scale = 1 - z, z - 1, rgamma(z)
        else:
            th = zp.theta_z
            self.a_coef, self.alpha0, self.scale = th, -th, rgamma(1 - th)
        # segments[h-1] = (edges, coeffs) for [h, h+1] in local coordinates
        self.segments = []
        self.jumps = []

    # ------------------------------------------------------------ structure
    @property
    def z(self):
        return self.zp.z

    @property
    def smooth_start(self):
        a = self.alpha0
        return a.imag == 0 and a.real >= 0 and a.real == round(a.real)

    def _edges(self, h):
        if self.smooth_start:
            return np.array([0.0, 1.0])
        ex = (self.alpha0 + h).real
        k = math.ceil(GRADING_DIGITS / (ex * -math.log10(GRADING_RATIO)))
        k = min(max(k, 1), MAX_GRADED_PANELS)
        return np.concatenate([[0.0], GRADING_RATIO ** np.arange(k, -1, -1.0)])

    # ------------------------------------------------------------ evaluation
    def initial(self, t, j=0):
        """j-th derivative of the initial data at t in (0, 1]."""
        t = np.asarray(t, dtype=float)
        coef = self.scale * _falling(self.alpha0, j)
        if coef == 0:
            return np.zeros(t.shape, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            return coef * np.power(t.astype(complex), self.alpha0 - j)

    def _initial_at_zero(self, j):
        coef = self.scale * _falling(self.alpha0, j)
        if coef == 0:
            return 0j
        e = self.alpha0 - j
        if e == 0:
            return coef
        if e.real > 0:
            return 0j
        raise SmoothnessError(f"derivative of order {j} of {self.kind.value} is unbounded at 0+")

    def _segment_eval(self, h, t, deriv=0):
        edges, coeffs = self.segments[h - 1]
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape, dtype=complex)
        idx = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, len(coeffs) - 1)
        for p in np.unique(idx):
            sel = idx == p
            a, b = edges[p], edges[p + 1]
            c = coeffs[p]
            x = (2 * t[sel] - a - b) / (b - a)
            if deriv:
                c = C.chebder(c, deriv) * (2 / (b - a)) ** deriv
            out[sel] = C.chebval(x, c)
        return out

    def local(self, h, t):
        """Value at v = h + t given in local coordinates (h >= 0, 0 <= t <= 1)."""
        t = np.asarray(t, dtype=float)
        if h < 0:
            return np.zeros(t.shape, dtype=complex)
        if h == 0:
            return self.initial(t)
        return self._segment_eval(h, t)

    def __call__(self, v, side="right"):
        """f(v); at integers ``side`` selects the one-sided limit."""
        scalar = np.ndim(v) == 0
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if np.any(v > self.v_max * (1 + 1e-14)):
            raise RangeError(f"v beyond table end {self.v_max}")
        h = np.floor(v).astype(int)
        t = v - h
        if side == "left":
            at_int = (t == 0) & (h >= 1)
            h = np.where(at_int, h - 1, h)
            t = np.where(at_int, 1.0, t)
        h = np.minimum(h, max(len(self.segments), 0))
        t = v - h
        out = np.zeros(v.shape, dtype=complex)
        for hh in np.unique(h):
            sel = h == hh
            if hh < 0:
                continue
            if hh == 0:
                tt = t[sel]
                val = self.initial(tt)
                zero = tt == 0
                if np.any(zero):
                    val[zero] = self._initial_at_zero(0) if side == "right" else 0
                out[sel] = val
            else:
                out[sel] = self._segment_eval(hh, t[sel])
        return out[0] if scalar else out

    def derivative(self, j, v, side="right"):
        """j-th derivative at v from the differentiated delay equation

            v f^(i+1)(v) = -(a + i) f^(i)(v) - z f^(i)(v-1),

        seeded with table values f(v-k), k <= j, and the closed-form initial
        data on (0, 1].
        """
        v = float(v)
        if v > self.v_max * (1 + 1e-14):
            raise RangeError(f"v beyond table end {self.v_max}")
        if j < 0:
            raise DomainError("derivative order must be >= 0")
        pts = [v - k for k in range(j + 1)]
        vals = []
        for t in pts:
            r = _region(t, side)
            if r == 0:
                vals.append(0j)
            elif r == 1:
                vals.append(self._initial_at_zero(0) if t == 0 else complex(self.initial(t)))
            else:
                vals.append(complex(self(t, side=side)))
        z, a = self.z, self.a_coef
        for i in range(1, j + 1):
            new = []
            for k in range(j - i + 1):
                t = v - k
                r = _region(t, side)
                if r == 2:
                    new.append(-((a + i - 1) * vals[k] + z * vals[k + 1]) / t)
                elif r == 1:
                    new.append(self._initial_at_zero(i) if t == 0 else complex(self.initial(t, i)))
                else:
                    new.append(0j)
            vals = new
        return vals[0]

    def residual(self, v):
        """|v f'(v) + a f(v) + z f(v-1)| using the panel polynomials."""
        v = np.atleast_1d(np.asarray(v, dtype=float))
        out = np.empty(v.shape)
        for i, vv in enumerate(v):
            h = int(math.floor(vv))
            t = vv - h
            d = self._segment_eval(h, np.array([t]), deriv=1)[0]
            f = self._segment_eval(h, np.array([t]))[0]
            hist = self.local(h - 1, np.array([t]))[0]
            out[i] = abs(vv * d + self.a_coef * f + self.z * hist)
        return out

    # ------------------------------------------------------------ quadrature
    def nodes(self, lo, hi, n=40):
        """Gauss-Legendre nodes/weights on [lo, hi] split at the panel edges.

        The closed-form first segment is excluded: lo must be >= 1.
        """
        if lo < 1:
            raise DomainError("nodes() covers v >= 1; integrate [0, 1] in closed form")
        gx, gw = np.polynomial.legendre.leggauss(n)
        vs, ws = [], []
        for h in range(int(math.floor(lo)), int(math.ceil(hi))):
            edges = self.segments[h - 1][0] + h
            cuts = np.unique(np.clip(np.concatenate([edges, [lo, hi]]), max(lo, h), min(hi, h + 1)))
            for a, b in zip(cuts[:-1], cuts[1:]):
                if b <= a:
                    continue
                vs.append(0.5 * (a + b) + 0.5 * (b - a) * gx)
                ws.append(0.5 * (b - a) * gw)
        if not vs:
            return np.zeros(0), np.zeros(0)
        return np.concatenate(vs), np.concatenate(ws)

    def laplace(self, s, V=40.0, n=40):
        """(int_0^V f(v) e^{-sv} dv, tail bound for int_V^oo)."""
        s = complex(s)
        if V > self.v_max:
            raise RangeError("Laplace truncation point beyond table")
        # int_0^1 t^alpha e^{-st} dt = sum (-s)^k / (k! (alpha + k + 1))
        head, term = 0j, 1 + 0j
        for k in range(200):
            inc = term / (self.alpha0 + k + 1)
            head += inc
            if k > abs(s) and abs(inc) < 1e-18:
                break
            term *= -s / (k + 1)
        head *= self.scale
        v, w = self.nodes(1.0, V, n)
        body = complex(np.sum(w * self(v) * np.exp(-s * v)))
        fv = max(abs(self(V)), abs(self(V - 1)))
        tail = 2 * fv * math.exp(-s.real * V) / s.real
        return head + body, tail

    # ------------------------------------------------------------ export
    def to_csv(self, fh, step=0.01, start=None):
        w = csv.writer(fh)
        w.writerow(["v", "re", "im"])
        lo = step if start is None else start
        grid = np.arange(lo, self.v_max + step / 2, step)
        vals = self(grid)
        for v, f in zip(grid, vals):
            w.writerow([f"{v:.10g}", repr(float(f.real)), repr(float(f.imag))])


def solve_system(kind, zp, v_max, degree=CHEB_DEGREE):
    """Solve one of the three delay systems on [0, v_max] by the method of steps."""
    if not isinstance(zp, ZParams):
        zp = ZParams.from_z(zp)
    kind = Kind(kind)
    if v_max < 1:
        raise DomainError("v_max must be >= 1")
    if kind is Kind.RHO and not zp.z.real > 0:
        raise DomainError("rho_z needs Re z > 0")
    if kind is Kind.PHI and zp.theta_z != 0 and (1 - zp.theta_z).imag == 0 and (1 - zp.theta_z).real <= 0:
        raise DomainError("Gamma pole in phi_z initial data")
    tab = SolutionTable(kind, zp, v_max, degree)
    x, D, T = _tools(degree)
    z, a = zp.z, tab.a_coef
    left = tab.scale  # f(1)
    n = degree
    for h in range(1, int(math.ceil(v_max))):
        edges = tab._edges(h)
        coeffs = np.empty((len(edges) - 1, n + 1), dtype=complex)
        for p in range(len(edges) - 1):
            ta, tb = edges[p], edges[p + 1]
            half = 0.5 * (tb - ta)
            t = ta + half * (x + 1)  # descending, t[n] = ta
            hist = np.zeros(n + 1, dtype=complex)
            hist[:n] = tab.local(h - 1, t[:n])
            A = (h + t)[:, None] * D + half * a * np.eye(n + 1)
            rhs = -half * z * hist
            A[n] = 0
            A[n, n] = 1
            rhs[n] = left
            try:
                vals = np.linalg.solve(A, rhs)
            except np.linalg.LinAlgError as exc:
                raise SolverError(f"collocation failed on [{h + ta}, {h + tb}]", location=h + ta) from exc
            if not np.all(np.isfinite(vals)):
                raise SolverError(f"non-finite solution on [{h + ta}, {h + tb}]", location=h + ta)
            coeffs[p] = T @ vals
            left = vals[0]
        tab.segments.append((edges, coeffs))
    return tab


# -------------------------------------------------------------------- jumps


def jump(tab, h, j):
    """delta = f^(j)(h) - f^(j)(h - 0)."""
    return tab.derivative(j, h, side="right") - tab.derivative(j, h, side="left")


def jump_table(tab, J):
    """All jumps delta_{z,h,j}, j <= J, over the ranges where they are defined:
    1 <= h <= j + 1 - m for z = m >= 1, and 1 <= h <= j for z in Z^- (phi_z)."""
    zp = tab.zp
    if not zp.is_integer:
        raise DomainError("jumps are defined for integer z only")
    m = zp.m
    if J < m:
        raise DomainError(f"J must be >= m = {m}")
    out = []
    for j in range(J + 1):
        hi = j + 1 - m if zp.z.real > 0 else j
        for h in range(1, hi + 1):
            if h > tab.v_max:
                raise RangeError("table too short for jump table")
            out.append((h, j, jump(tab, h, j)))
    tab.jumps = out
    return out


def jumps_to_csv(rows, fh):
    w = csv.writer(fh)
    w.writerow(["h", "j", "re", "im"])
    for h, j, d in rows:
        w.writerow([h, j, repr(float(d.real)), repr(float(d.imag))])


# ----------------------------------------------------------- asymptotics


def rho_asym(zp, v):
    """Main term of the saddle-point asymptotic formula for rho_z(v)."""
    if not isinstance(zp, ZParams):
        zp = ZParams.from_z(zp)
    z = zp.z
    if not z.real > 0:
        raise DomainError("rho_asym needs Re z > 0")
    if v < 3 + abs(z):
        raise RangeError(f"asymptotic form needs v >= 3 + |z| = {3 + abs(z)}")
    w = solve_zeta0(v / z).root
    num = cmath.exp(EULER_GAMMA * z - v * w + z * eval_I(w))
    return num / cmath.sqrt(2 * math.pi * v * (1 - 1 / w))


def big_R(zp, v):
    """R_z(v) = v^{-1/2} exp(-Re int_{|z|}^v zeta_0(t/z) dt)."""
    if not isinstance(zp, ZParams):
        zp = ZParams.from_z(zp)
    z = zp.z
    if v < 1:
        raise RangeError("R_z(v) needs v >= 1")
    r = abs(z)
    pts = [p for p in (1.0, 2.0, 5.0) if r < p < v]
    val, _ = integrate.quad(lambda t: solve_zeta0(t / z).root.real, r, v, points=pts or None, limit=200, epsabs=1e-11, epsrel=1e-11)
    return math.exp(-val) / math.sqrt(v)


# ----------------------------------------------------------- Taylor data


def taylor_c(zp, J):
    """Taylor coefficients c_0..c_J of rho_hat(s)^z = exp(z (gamma + I(-s))) at 0."""
    if not isinstance(zp, ZParams):
        zp = ZParams.from_z(zp)
    if J < 0:
        raise DomainError("J must be >= 0")
    c = np.zeros(J + 1, dtype=complex)
    c[0] = EULER_GAMMA
    fact = 1.0
    for n in range(1, J + 1):
        fact *= n
        c[n] = (-1) ** n / (n * fact)
    return (SeriesPoly(c) * zp.z).exp()


def g_expansion(zp, v, J):
    """Partial sum sum_{j<=J} c_j / (v^{z+j} Gamma(1-z-j)) approximating g_z(v)."""
    if not isinstance(zp, ZParams):
        zp = ZParams.from_z(zp)
    c = taylor_c(zp, J)
    z = zp.z
    return sum(c[j] * rgamma(1 - z - j) * complex(v) ** (-z - j) for j in range(J + 1))


# ----------------------------------------------------------- psi dispatch


class Psi:
    """psi_z = rho_z (Re z > 0) or phi_z^{(m+1)} (Re z <= 0), with derivatives."""

    def __init__(self, zp, v_max):
        if not isinstance(zp, ZParams):
            zp = ZParams.from_z(zp)
        self.zp = zp
        if zp.z.real > 0:
            self.table = solve_system(Kind.RHO, zp, v_max)
            self.offset = 0
        else:
            self.table = solve_system(Kind.PHI, zp, v_max)
            self.offset = zp.m + 1

    def __call__(self, v, side="right"):
        val = self.derivative(0, v, side)
        zp = self.zp
        # the table's absolute error is ~1e-16 / v; once that is no longer
        # small relative to rho_z(v), switch to the saddle-point inversion
        if self.offset == 0 and abs(val) * v < INVERSION_SWITCH and v >= 3 + abs(zp.z):
            return rho_inverse(zp, v)
        return val

    def derivative(self, j, v, side="right"):
        k = j + self.offset
        if k == 0:
            return complex(self.table(v, side=side))
        return self.table.derivative(k, v, side)


def psi_dispatch(zp, v_max=40.0):
    return Psi(zp, v_max)


def rho_inverse(zp, v, width=4 * math.pi):
    """rho_z(v) for large v by Laplace inversion through the saddle point.

    rho_hat(s)^z e^{vs} is entire, so the inversion line may be moved to
    Re s = -Re zeta_0(v/z).  Along it the integrand has a Gaussian peak of
    height ~ e^v times its slowly decaying far field, and the line is cut to
    |Im s - Im s_0| <= width.  The relative cut error falls quickly with v
    (about 3e-8 at v = 10, 1e-12 at v = 20 for z = 1).  Forward integration of
    the delay equation cannot reach these v: its absolute error floor is near
    1e-16 while rho_z(v) keeps decaying.
    """
    if not isinstance(zp, ZParams):
        zp = ZParams.from_z(zp)
    z = zp.z
    if not z.real > 0:
        raise DomainError("rho_inverse needs Re z > 0")
    if v < 3 + abs(z):
        raise RangeError(f"saddle inversion needs v >= 3 + |z| = {3 + abs(z)}")
    s0 = -solve_zeta0(v / z).root

    def phase(s):
        return z * (EULER_GAMMA + eval_I(-s)) + v * s

    p0 = phase(s0)

    def part(tau, k):
        val = cmath.exp(phase(complex(s0.real, tau)) - p0)
        return val.real if k == 0 else val.imag

    lo, hi = s0.imag - width, s0.imag + width
    opts = dict(points=[s0.imag], limit=400, epsabs=1e-15, epsrel=1e-13)
    re, _ = integrate.quad(part, lo, hi, args=(0,), **opts)
    im, _ = integrate.quad(part, lo, hi, args=(1,), **opts)
    return cmath.exp(p0) * complex(re, im) / (2 * math.pi)

"""The acceptance suite: eleven numerical checks, each returning a Check record.

Shared by the ``report`` CLI command and tests/test_acceptance.py.
"""
import cmath
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from . import arith
from .asymptotics import (
    LocalMode,
    leading_term,
    friable_zeta_ratio,
    lambda_f,
    large_dev,
    moments,
    predict_local,
)
from .coeffs import euler_B
from .dde import Kind, solve_system
from .primes import primes_up_to
from .specfun import (
    EULER_GAMMA,
    ZParams,
    eval_J,
    normal_cdf,
    rho_hat_pow,
    solve_xi,
    solve_zeta0,
)


@dataclass
class Check:
    id: int
    name: str
    passed: bool
    seconds: float
    time_limit: float
    values: dict = field(default_factory=dict)

    @property
    def in_time(self):
        return self.seconds <= self.time_limit

    def line(self):
        tag = "PASS" if self.passed and self.in_time else "FAIL"
        return f"[{tag}] {self.id:2d} {self.name} ({self.seconds:.2f}s / {self.time_limit:g}s)"

    def as_dict(self):
        d = asdict(self)
        d["in_time"] = self.in_time
        return d


def _timed(fn):
    t0 = time.perf_counter()
    passed, values = fn()
    return passed, values, time.perf_counter() - t0


def _clean(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    return v


def run_check(cid):
    name, limit, fn = CHECKS[cid]
    passed, values, secs = _timed(fn)
    return Check(cid, name, bool(passed), secs, limit, _clean(values))


# ------------------------------------------------------------------ 1


def dickman_values():
    tab = solve_system(Kind.RHO, 1, 3)
    r2, r3 = tab(2.0).real, tab(3.0).real
    # on [2, 3]: rho(v) = rho(2) - int_2^v (1 - log(t-1)) / t dt
    oracle3 = 1 - math.log(2) - integrate.quad(lambda t: (1 - math.log(t - 1)) / t, 2, 3, epsabs=1e-14)[0]
    e2 = abs(r2 - (1 - math.log(2)))
    e3 = abs(r3 - oracle3)
    golden = abs(r3 - 0.04860839)
    return e2 <= 1e-10 and e3 <= 1e-8 and golden <= 1e-8, {
        "rho2": r2,
        "rho3": r3,
        "oracle_rho3": oracle3,
        "err2": e2,
        "err3": e3,
        "err3_golden": golden,
    }


# ------------------------------------------------------------------ 2


def convolution_power():
    rho = solve_system(Kind.RHO, 1, 4)
    rho2 = solve_system(Kind.RHO, 2, 4)
    worst = 0.0
    for v in np.linspace(0.05, 4.0, 80):
        pts = sorted({p for p in (1.0, 2.0, 3.0, v - 1, v - 2, v - 3) if 0 < p < v})
        val, _ = integrate.quad(
            lambda t: rho(t).real * rho(v - t).real, 0, v, points=pts or None, limit=200, epsabs=1e-13, epsrel=1e-12
        )
        worst = max(worst, abs(rho2(v).real - val))
    return worst <= 1e-6, {"sup_error": worst}


# ------------------------------------------------------------------ 3


def laplace_identities():
    rows = []
    ok = True
    for z in (0.7, 1, 1.6 + 0.5j, -0.8):
        zp = ZParams.from_z(z)
        g = solve_system(Kind.G, zp, 40)
        phi = solve_system(Kind.PHI, zp, 40)
        for s in (1, 2, 1 + 1j):
            s = complex(s)
            val, tail = g.laplace(s)
            exact = s ** (zp.z - 1) * rho_hat_pow(s, zp.z)
            eg = abs(val - exact)
            val, tail2 = phi.laplace(s)
            exact = s ** (zp.theta_z - 1) * cmath.exp(-zp.z * eval_J(s))
            ep = abs(val - exact)
            ok &= eg <= 1e-6 + tail and ep <= 1e-6 + tail2
            rows.append({"z": zp.z, "s": s, "err_g": eg, "tail_g": tail, "err_phi": ep, "tail_phi": tail2})
    return ok, {"rows": rows, "max_err": max(max(r["err_g"], r["err_phi"]) for r in rows)}


# ------------------------------------------------------------------ 4


def saddle_solvers():
    worst_xi = 0.0
    prev = -math.inf
    increasing = True
    for u in np.geomspace(1.0001, 1e6, 400):
        xi, _ = solve_xi(u)
        worst_xi = max(worst_xi, abs(math.expm1(xi) - u * xi) / max(1.0, math.exp(xi)))
        increasing &= xi > prev
        prev = xi
    z = cmath.exp(1j * math.pi / 4)
    t = math.pi / 4
    errs, worst_zeta = [], 0.0
    for v in (50, 100, 200):
        xz = solve_xi(v / abs(z))[0]
        approx = xz + t * t / (2 * xz * xz) - 1j * xz * t / (xz - 1)
        r = solve_zeta0(v / z)
        worst_zeta = max(worst_zeta, r.residual)
        errs.append(abs(r.root - approx))
    r = solve_zeta0(100 * cmath.exp(-1j * math.pi / 4))
    worst_zeta = max(worst_zeta, r.residual)
    monotone = errs[0] > errs[1] > errs[2]
    ok = worst_xi <= 1e-12 and worst_zeta <= 1e-12 and monotone and increasing
    return ok, {"xi_residual": worst_xi, "zeta0_residual": worst_zeta, "expansion_errors": errs}


# ------------------------------------------------------------------ 5


def sieve_exactness():
    t = arith.build_table(100, 5)
    st = arith.friable_stats(t)
    psi_ok = st.psi == 34 and list(st.counts[:4]) == [1, 12, 18, 3]
    full = arith.build_table(10**4, 10**4).psi() == 10**4
    x, y = 10**6, 10**3
    tab = arith.build_table(x, y)
    s = arith.friable_stats(tab)
    lhs = int(np.dot(np.arange(s.counts.size), s.counts))
    rhs = sum(tab.psi(x // p) for p in primes_up_to(y).tolist())
    t0 = time.perf_counter()
    big = arith.build_table(10**7, 10**3).psi()
    t_big = time.perf_counter() - t0
    ok = psi_ok and full and lhs == rhs and t_big < 30
    return ok, {"psi_100_5": st.psi, "psi_k": st.counts[:4].tolist(), "omega_sum": lhs, "prime_sum": rhs,
                "psi_1e7_1e3": big, "seconds_1e7": t_big}


# ------------------------------------------------------------------ 6


def euler_products():
    b1 = euler_B(1, 1, 10**5)
    b2 = euler_B(2, 1, 10**5)
    honest = True
    for z in (2, 1.5, 0.5 + 0.5j, -0.7):
        a = euler_B(z, 1, 10**5)
        b = euler_B(z, 1, 2 * 10**5)
        honest &= abs(b.value - a.value) < a.tail_bound
    ok = abs(b1.value - 1) <= 1e-9 and abs(b2.value - 6 / math.pi**2) <= 1e-6 and honest
    return ok, {"B1": b1.value, "B2": b2.value, "B2_error": abs(b2.value - 6 / math.pi**2), "tail_honest": honest}


# ------------------------------------------------------------------ 7


def leading_term_z2():
    x = 10**7
    devs = []
    for y in (200, 500, 2000):
        tab = arith.build_table(x, y, arith.Mode.SMOOTH_ENUM)
        exact = arith.friable_stats(tab, z=2).psi_f.real
        devs.append(abs(exact / leading_term(x, y, 2).real - 1))
    ok = devs[0] > devs[1] > devs[2] and devs[2] <= 0.5
    return ok, {"deviations": devs}


# ------------------------------------------------------------------ 8


def lambda_beats_main():
    x = 10**6
    y = math.exp(math.log(x) ** 0.7)
    omega, lpf = arith.sieve_records(x)
    exact = int(np.count_nonzero(lpf[1:] <= y))
    lam = lambda_f(x, y, 1, omega=omega).real
    main = leading_term(x, y, 1).real
    ok = abs(exact - lam) <= abs(exact - main)
    return ok, {"y": y, "psi": exact, "lambda": lam, "main": main}


# ------------------------------------------------------------------ 9


def omega_statistics():
    x, y = 10**7, 10**3
    tab = arith.build_table(x, y, arith.Mode.SMOOTH_ENUM)
    st = arith.friable_stats(tab)
    ms = moments(x, y, 1.0, with_K=False)
    mu, sigma = ms.mu_r, math.sqrt(ms.sigma_r2)
    ks_dist = st.kolmogorov(mu, sigma, normal_cdf)
    ks_ok = ks_dist <= 0.25

    def ratio_ok(pred, k):
        ex = st.counts[k] / st.psi if k < st.counts.size else 0.0
        return ex > 0 and 0.5 <= pred / ex <= 2, pred / ex if ex else math.inf

    gauss = {}
    g_ok = True
    for k in (math.floor(mu) - 1, math.floor(mu), math.floor(mu) + 1):
        good, rat = ratio_ok(predict_local(x, y, k, LocalMode.GAUSS), k)
        gauss[k] = rat
        g_ok &= good
    tilted = {}
    t_ok = True
    for r in (0.8, 1.0, 1.3):
        k = round(moments(x, y, r, with_K=False).mu_r)
        good, rat = ratio_ok(predict_local(x, y, k, LocalMode.TILTED), k)
        tilted[r] = (k, rat)
        t_ok &= good
    ks = np.arange(st.counts.size)
    tails = {}
    ld_ok = True
    for v in (1.0, 1.5, 2.0):
        freq = st.counts[np.abs(ks - mu) > v * sigma].sum() / st.psi
        bound = large_dev(x, y, v, c=0.01)
        tails[v] = (freq, bound)
        ld_ok &= freq <= bound
    ok = ks_ok and g_ok and t_ok and ld_ok
    return ok, {
        "mu": mu,
        "sigma": sigma,
        "kolmogorov": ks_dist,
        "kolmogorov_ok": ks_ok,
        "largest_atom": float(st.counts.max() / st.psi),
        "gauss_ratios": {str(k): v for k, v in gauss.items()},
        "gauss_ok": g_ok,
        "tilted": {str(k): v for k, v in tilted.items()},
        "tilted_ok": t_ok,
        "tails": {str(k): v for k, v in tails.items()},
        "tails_ok": ld_ok,
    }


# ------------------------------------------------------------------ 10


def friable_zeta_factorization():
    errs = {str(z): abs(friable_zeta_ratio(1.1, 1e4, z)) for z in (1, 1.3 + 0.4j)}
    return max(errs.values()) <= 0.05, {"relative_errors": errs}


# ------------------------------------------------------------------ 11


def phi_limit():
    zp = ZParams.from_z(-0.8)
    tab = solve_system(Kind.PHI, zp, 21)
    val = tab.derivative(zp.m, 20.0)
    err = abs(val - cmath.exp(EULER_GAMMA * zp.z))
    return err <= 1e-3, {"value": val, "target": cmath.exp(EULER_GAMMA * zp.z), "error": err}


CHECKS = {
    1: ("Dickman values", 1.0, dickman_values),
    2: ("convolution power", 10.0, convolution_power),
    3: ("Laplace identities", 30.0, laplace_identities),
    4: ("saddle solvers", 5.0, saddle_solvers),
    5: ("sieve exactness", 30.0, sieve_exactness),
    6: ("Euler products", 10.0, euler_products),
    7: ("friable sum of 2^omega, main term", 120.0, leading_term_z2),
    8: ("Lambda_f beats the main term", 60.0, lambda_beats_main),
    9: ("omega statistics envelopes", 180.0, omega_statistics),
    10: ("friable zeta factorization", 10.0, friable_zeta_factorization),
    11: ("phi_z limit", 5.0, phi_limit),
}


TOLERANCES = {
    1: {"rho2": 1e-10, "rho3": 1e-8},
    2: {"sup_error": 1e-6},
    3: {"abs_error": "1e-6 + tail"},
    4: {"xi_residual": 1e-12, "zeta0_residual": 1e-12, "expansion_errors": "decreasing"},
    5: {"counts": "exact"},
    6: {"B1": 1e-9, "B2": 1e-6, "tail_bound": "covers P-doubling"},
    7: {"deviation": "decreasing, <= 0.5 at y = 2000"},
    8: {"lambda_vs_main": "|psi - lambda| <= |psi - main|"},
    9: {"kolmogorov": 0.25, "local_ratio": [0.5, 2.0], "large_dev_c": 0.01},
    10: {"relative_error": 0.05},
    11: {"error": 1e-3},
}


def run_all(ids=None):
    return [run_check(i) for i in (ids or sorted(CHECKS))]

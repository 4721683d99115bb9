"""frkt <module> <op> [--flags]: CSV/JSON front end for the library."""
import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import acceptance, arith, asymptotics, coeffs, dde, specfun
from .errors import ConfigError, FrktError

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


@dataclass
class Config:
    newton_tol: float = 1e-12
    quad_tol: float = 1e-10
    cheb_degree: int = 32
    euler_P: int = 100_000
    cauchy_M: int = 64
    beta: float = 0.3
    delta: float = 0.2
    constants: dict = field(default_factory=lambda: {"c_28": asymptotics.LARGE_DEV_C, "c0_14": 1.0})

    def validate(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "constants":
                if not isinstance(v, dict) or not all(
                    isinstance(c, (int, float)) and math.isfinite(c) for c in v.values()
                ):
                    raise ConfigError("constants must map names to finite numbers", field="constants")
                continue
            want = int if f.type in (int, "int") else float
            if isinstance(v, bool) or not isinstance(v, (int, float)) or (want is int and not isinstance(v, int)):
                raise ConfigError(f"{f.name} must be {want.__name__}", field=f.name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{f.name} must be positive", field=f.name)
        if not self.beta + self.delta < 0.6:
            raise ConfigError("beta + delta must be < 3/5", field="beta")
        if self.euler_P < coeffs.MIN_PRIME_CUTOFF:
            raise ConfigError(f"euler_P must be >= {coeffs.MIN_PRIME_CUTOFF}", field="euler_P")
        return self

    @classmethod
    def load(cls, path=None, overrides=None):
        data = {}
        if path:
            try:
                with open(path) as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config: {exc}", field="config") from None
            if not isinstance(data, dict):
                raise ConfigError("config must be a JSON object", field="config")
        known = {f.name for f in fields(cls)}
        for k in data:
            if k not in known:
                raise ConfigError(f"unknown config field {k!r}", field=k)
        cfg = cls()
        for k, v in data.items():
            if k == "constants" and isinstance(v, dict):
                cfg.constants = {**cfg.constants, **v}
            else:
                setattr(cfg, k, v)
        for k, v in (overrides or {}).items():
            if v is not None:
                setattr(cfg, k, v)
        return cfg.validate()


# ------------------------------------------------------------- formatting


def parse_complex(text):
    """'a+bi' (also 'a', 'bi', 'i', 'a-bi') -> complex."""
    s = text.strip().replace(" ", "").replace("I", "i")
    if s.endswith("i"):
        s = s[:-1] + "j"
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def fmt(v):
    v = float(v) + 0.0  # no "-0"
    if not math.isfinite(v):
        raise FrktError(f"non-finite value {v}")
    return format(v, ".17g")


def fmt_c(v):
    v = complex(v)
    sign = "-" if math.copysign(1.0, v.imag) < 0 else "+"
    return f"{fmt(v.real)}{sign}{fmt(abs(v.imag))}i"


class Table:
    def __init__(self, header):
        self.buf = io.StringIO()
        self.w = csv.writer(self.buf, lineterminator="\n")
        self.w.writerow(header)

    def row(self, *cells):
        self.w.writerow([c if isinstance(c, str) else fmt(c) for c in cells])

    def text(self):
        return self.buf.getvalue()


def reim(v):
    v = complex(v)
    return v.real, v.imag


# -------------------------------------------------------------- specfun


def cmd_specfun(a, cfg):
    if a.op == "xi":
        xi, dxi = specfun.solve_xi(a.u, tol=cfg.newton_tol)
        t = Table(["u", "xi", "dxi"])
        t.row(a.u, xi, dxi)
    elif a.op == "zeta0":
        r = specfun.solve_zeta0(a.w, tol=cfg.newton_tol)
        t = Table(["w_re", "w_im", "re", "im", "residual"])
        t.row(*reim(a.w), *reim(r.root), r.residual)
    elif a.op == "I":
        t = Table(["w_re", "w_im", "re", "im"])
        t.row(*reim(a.w), *reim(specfun.eval_I(a.w)))
    elif a.op == "J":
        t = Table(["s_re", "s_im", "re", "im"])
        t.row(*reim(a.w), *reim(specfun.eval_J(a.w)))
    elif a.op == "rho-hat":
        t = Table(["s_re", "s_im", "re", "im"])
        t.row(*reim(a.w), *reim(specfun.rho_hat_pow(a.w, a.z)))
    else:  # zeta
        t = Table(["s_re", "s_im", "re", "im"])
        val = specfun.zeta_y(a.w, a.y) if a.y else specfun.zeta(a.w)
        t.row(*reim(a.w), *reim(val))
    return t.text()


# ------------------------------------------------------------------ dde


def cmd_dde(a, cfg):
    zp = specfun.ZParams.from_z(a.z)
    if a.op == "solve":
        tab = dde.solve_system(dde.Kind(a.kind), zp, a.vmax, degree=cfg.cheb_degree)
        grid = np.arange(a.step, tab.v_max + a.step / 2, a.step)
        t = Table(["v", "re", "im"])
        for v, f in zip(grid, tab(grid)):
            t.row(v, *reim(f))
        return t.text()
    if a.op == "jumps":
        kind = dde.Kind.RHO if zp.z.real > 0 else dde.Kind.PHI
        tab = dde.solve_system(kind, zp, a.J + 2, degree=cfg.cheb_degree)
        t = Table(["h", "j", "re", "im"])
        for h, j, d in dde.jump_table(tab, a.J):
            t.row(str(h), str(j), *reim(d))
        return t.text()
    # psi: psi_z^(j)(v)
    v = a.v
    t = Table(["v", "j", "re", "im"])
    if a.j == 0 and zp.z.real > 0 and v >= 12:
        t.row(v, "0", *reim(dde.rho_inverse(zp, v)))
        return t.text()
    psi = dde.Psi(zp, math.ceil(v) + 1)
    side = "left" if v == round(v) else "right"
    t.row(v, str(a.j), *reim(psi.derivative(a.j, v, side=side)))
    return t.text()


# --------------------------------------------------------------- coeffs


def cmd_coeffs(a, cfg):
    if a.op == "a":
        c = coeffs.a_coeffs(a.z, a.J, M=cfg.cauchy_M, P=cfg.euler_P)
        t = Table(["j", "re", "im"])
        for j in range(a.J + 1):
            t.row(str(j), *reim(c[j]))
        return t.text()
    b = coeffs.euler_B(a.z, a.s, cfg.euler_P)
    t = Table(["z_re", "z_im", "s_re", "s_im", "P", "re", "im", "tail_bound", "corrected_re", "corrected_im"])
    t.row(*reim(b.z), *reim(b.s), str(b.prime_cutoff), *reim(b.value), b.tail_bound, *reim(b.corrected))
    return t.text()


# ---------------------------------------------------------------- sieve


def _table_for(x, y, cache=None):
    if cache:
        tab = arith.read_cache(cache, y)
        if tab.x_max < x:
            raise arith.DomainError(f"cache covers x <= {tab.x_max}")
        return tab
    try:
        return arith.build_table(x, y)
    except arith.ResourceError:
        return arith.build_table(x, y, arith.Mode.SMOOTH_ENUM)


def cmd_sieve(a, cfg):
    if a.op == "cache":
        arith.write_cache(a.out_cache, int(a.x))
        return ""
    x = int(math.floor(a.x))
    tab = _table_for(x, a.y, a.cache)
    st = arith.friable_stats(tab, z=a.z, x=x)
    if a.op == "psi":
        if a.z is None:
            return f"{st.psi}\n"
        t = Table(["x", "y", "re", "im"])
        t.row(str(x), a.y, *reim(st.psi_f))
        return t.text()
    t = Table(["k", "count"])
    for k, c in enumerate(st.counts.tolist()):
        t.row(str(k), str(c))
    return t.text()


# -------------------------------------------------------------- compare


def _compare_point(args):
    x, y, z, J, half, cfg = args
    X = int(math.floor(x))
    xe = X + 0.5 if half else float(x)
    omega, lpf = arith.sieve_records(X)
    zc = complex(z)
    fr = (lpf[1:] <= y)
    exact = arith._twisted(np.bincount(omega[1:][fr], minlength=1), zc)
    lam = asymptotics.lambda_f(xe, y, zc, omega=omega)
    e0 = asymptotics.main_expansion(xe, y, zc, 0, beta=cfg.beta, delta=cfg.delta)
    eJ = asymptotics.main_expansion(xe, y, zc, J, beta=cfg.beta, delta=cfg.delta)
    u = asymptotics.log_ratio(xe, y)
    return x, xe, y, u, exact, lam, e0.total, eJ.total, eJ.error_envelope


def cmd_compare(a, cfg):
    import warnings

    pts = [(x, y, a.z, a.J, not a.no_half, cfg) for x in a.x for y in a.y]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", asymptotics.ValidityWarning)
        if a.workers > 1:
            with ProcessPoolExecutor(a.workers) as ex:
                rows = list(ex.map(_compare_point, pts))
        else:
            rows = [_compare_point(p) for p in pts]
    cplx = complex(a.z).imag != 0
    head = ["x", "y", "u", "exact", "lambda", "mainJ0", "mainJ", "envelope", "x_eval"]
    if cplx:
        head += ["exact_im", "lambda_im", "mainJ0_im", "mainJ_im"]
    t = Table(head)
    for x, xe, y, u, ex, lam, m0, mJ, env in rows:
        cells = [x, y, u, ex.real, lam.real, m0.real, mJ.real, env, xe]
        if cplx:
            cells += [ex.imag, lam.imag, m0.imag, mJ.imag]
        t.row(*cells)
    return t.text()


# ---------------------------------------------------------------- omega


def cmd_omega(a, cfg):
    x, y = int(a.x), a.y
    tab = _table_for(x, y, a.cache)
    st = arith.friable_stats(tab)
    consts = (cfg.constants.get("c1_local", asymptotics.LOCAL_RANGE[0]),
              cfg.constants.get("c2_local", asymptotics.LOCAL_RANGE[1]),
              cfg.constants.get("c3_local", asymptotics.LOCAL_RANGE[2]))
    t = Table(["k", "count", "gauss", "tilted", "in_range_2_6"])
    for k, c in enumerate(st.counts.tolist()):
        gauss = asymptotics.predict_local(x, y, k, asymptotics.LocalMode.GAUSS) * st.psi
        ok = asymptotics.local_range_ok(x, y, k, consts)
        tilted = ""
        try:
            r = asymptotics.solve_r_for_k(x, y, k)
            ms = asymptotics.moments(x, y, r)
            tilted = fmt(ms.K_r * math.exp(-ms.L + k * math.log(ms.L) - math.lgamma(k + 1)) * st.psi)
        except FrktError:
            pass  # no r in the bracket: the tilted law is undefined at this k
        t.row(str(k), str(c), gauss, tilted, "1" if ok else "0")
    return t.text()


# --------------------------------------------------------------- report


def cmd_report(a, cfg):
    checks = acceptance.run_all(a.only)
    out = {
        "inputs": {"config": asdict(cfg), "checks": [c.id for c in checks]},
        "outputs": {str(c.id): c.values for c in checks},
        "tolerances": {str(i): acceptance.TOLERANCES[i] for i in sorted(acceptance.TOLERANCES)},
        "checks": [
            {"id": c.id, "name": c.name, "passed": c.passed, "in_time": c.in_time,
             "seconds": round(c.seconds, 3), "time_limit": c.time_limit}
            for c in checks
        ],
        "all_passed": all(c.passed and c.in_time for c in checks),
    }
    return json.dumps(out, indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------- parser


def build_parser():
    p = argparse.ArgumentParser(
        prog="frkt",
        description="Friable-integer asymptotics: special functions, delay equations, coefficients, sieve oracle.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = common.add_argument_group("configuration (flags override --config)")
    g.add_argument("--config", help="JSON config file")
    g.add_argument("--out", help="write output here instead of stdout")
    defaults = Config()
    for f in fields(Config):
        if f.name == "constants":
            continue
        g.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name, type=f.type if callable(f.type) else float,
                       help=f"default {getattr(defaults, f.name)}")
    g.add_argument("--constant", action="append", metavar="NAME=VALUE", help="override a named constant")

    mods = p.add_subparsers(dest="module", required=True)

    def sub(parent, name, help_):
        return parent.add_parser(name, parents=[common], help=help_,
                                 formatter_class=argparse.ArgumentDefaultsHelpFormatter)

    m = mods.add_parser("specfun", help="saddle points, I, J, rho_hat, zeta").add_subparsers(dest="op", required=True)
    s = sub(m, "xi", "real root of e^xi = 1 + u xi and xi'(u)")
    s.add_argument("--u", type=float, required=True)
    s = sub(m, "zeta0", "complex root zeta_0(w)")
    s.add_argument("--w", type=parse_complex, required=True)
    for name, h in (("I", "I(w) = int_0^w (e^t - 1)/t dt"), ("J", "J(s) = int_0^inf e^{-s-t}/(s+t) dt")):
        s = sub(m, name, h)
        s.add_argument("--w", "--s", dest="w", type=parse_complex, required=True)
    s = sub(m, "rho-hat", "rho_hat(s)^z on the branch continuous from s > 0")
    s.add_argument("--s", dest="w", type=parse_complex, required=True)
    s.add_argument("--z", type=parse_complex, default=1 + 0j)
    s = sub(m, "zeta", "zeta(s), or the partial Euler product to y")
    s.add_argument("--s", dest="w", type=parse_complex, required=True)
    s.add_argument("--y", type=float, default=None)

    m = mods.add_parser("dde", help="delay-equation solutions g_z, rho_z, phi_z").add_subparsers(dest="op", required=True)
    s = sub(m, "solve", "tabulate a solution on a grid")
    s.add_argument("--kind", choices=[k.value for k in dde.Kind], default="RHO")
    s.add_argument("--z", type=parse_complex, default=1 + 0j)
    s.add_argument("--vmax", type=float, default=10.0)
    s.add_argument("--step", type=float, default=0.01)
    s = sub(m, "jumps", "derivative jumps at integers (integer z)")
    s.add_argument("--z", type=parse_complex, required=True)
    s.add_argument("--J", type=int, default=4)
    s = sub(m, "psi", "psi_z^(j)(v)")
    s.add_argument("--z", type=parse_complex, default=1 + 0j)
    s.add_argument("--v", type=float, required=True)
    s.add_argument("--j", type=int, default=0)

    m = mods.add_parser("coeffs", help="Euler products and a_j(f_z)").add_subparsers(dest="op", required=True)
    s = sub(m, "a", "a_0 .. a_J")
    s.add_argument("--z", type=parse_complex, required=True)
    s.add_argument("--J", type=int, default=0)
    s = sub(m, "B", "truncated Euler product B_z(s)")
    s.add_argument("--z", type=parse_complex, required=True)
    s.add_argument("--s", type=parse_complex, default=1 + 0j)

    m = mods.add_parser("sieve", help="exact friable counts").add_subparsers(dest="op", required=True)
    for name, h in (("psi", "Psi(x, y), or Psi(x, y; z^omega) with --z"), ("hist", "omega histogram (k, count)")):
        s = sub(m, name, h)
        s.add_argument("--x", type=float, required=True)
        s.add_argument("--y", type=float, required=True)
        s.add_argument("--cache", help="read a sieve cache file")
        if name == "psi":
            s.add_argument("--z", type=parse_complex, default=None)
        else:
            s.set_defaults(z=None)
    s = sub(m, "cache", "write a binary sieve cache")
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--path", dest="out_cache", required=True)

    s = sub(mods, "compare", "exact vs Lambda_f vs main expansions over an (x, y) grid")
    s.add_argument("--x", type=float, nargs="+", required=True)
    s.add_argument("--y", type=float, nargs="+", required=True)
    s.add_argument("--z", type=parse_complex, default=1 + 0j)
    s.add_argument("--J", type=int, default=2)
    s.add_argument("--no-half", action="store_true", help="evaluate analytic columns at x, not floor(x) + 1/2")
    s.add_argument("--workers", type=int, default=1)

    s = sub(mods, "omega", "omega(n) law on S(x, y): exact counts and predictions")
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--y", type=float, required=True)
    s.add_argument("--cache")

    s = sub(mods, "report", "run the acceptance checks, JSON summary")
    s.add_argument("--only", type=int, nargs="+", choices=sorted(acceptance.CHECKS))
    return p


HANDLERS = {
    "specfun": cmd_specfun,
    "dde": cmd_dde,
    "coeffs": cmd_coeffs,
    "sieve": cmd_sieve,
    "compare": cmd_compare,
    "omega": cmd_omega,
    "report": cmd_report,
}


def _constants(items):
    out = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        try:
            out[name] = float(val)
        except ValueError:
            raise ConfigError(f"bad constant {item!r}", field=name or "constant") from None
        if not sep:
            raise ConfigError(f"bad constant {item!r}", field=name)
    return out


def run(argv=None):
    parser = build_parser()
    a = parser.parse_args(argv)
    for name in ("config", "out", "constant", "only"):
        if not hasattr(a, name):
            setattr(a, name, None)
    try:
        over = {f.name: getattr(a, f.name, None) for f in fields(Config) if f.name != "constants"}
        cfg = Config.load(a.config, over)
        cfg.constants.update(_constants(a.constant))
        text = HANDLERS[a.module](a, cfg)
    except ConfigError as exc:
        print(f"frkt: config error ({exc.field}): {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FrktError, OSError) as exc:
        print(f"frkt: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main():
    sys.exit(run())

"""Exact friable-integer oracle: sieve tables, counts and omega statistics."""
import math
import struct
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError, DomainError, ResourceError
from .primes import primes_up_to

BLOCK = 1 << 22
MEMORY_BUDGET = 1 << 30  # bytes for a full sieve table
CACHE_MAGIC = b"FRKT1"
RECORD = np.dtype([("omega", "u1"), ("lpf", "<u4")])


class Mode(Enum):
    SPF_SIEVE = "SPF_SIEVE"
    SMOOTH_ENUM = "SMOOTH_ENUM"


def sieve_block(lo, hi):
    """omega(n) and the largest prime factor of n for lo <= n < hi (lo >= 1).

    Primes up to sqrt(hi) are divided out of a copy of the block; whatever is
    left above 1 is a single prime factor larger than sqrt(hi).
    """
    n = np.arange(lo, hi, dtype=np.int64)
    rem = n.copy()
    omega = np.zeros(hi - lo, dtype=np.uint8)
    lpf = np.ones(hi - lo, dtype=np.int64)
    for p in primes_up_to(math.isqrt(hi - 1)).tolist():
        start = (-lo) % p
        omega[start::p] += 1
        lpf[start::p] = p
        pk = p
        while pk < hi:
            rem[(-lo) % pk :: pk] //= p
            pk *= p
    big = rem > 1
    omega[big] += 1
    lpf[big] = rem[big]
    return omega, lpf


def sieve_records(x_max, block=BLOCK):
    """omega and largest prime factor for 0 <= n <= x_max (n = 0 gets 0, 0)."""
    omega = np.zeros(x_max + 1, dtype=np.uint8)
    lpf = np.zeros(x_max + 1, dtype=np.uint32)
    for lo in range(1, x_max + 1, block):
        hi = min(lo + block, x_max + 1)
        om, lp = sieve_block(lo, hi)
        omega[lo:hi] = om
        lpf[lo:hi] = lp
    return omega, lpf


def smooth_numbers(x, y):
    """Sorted y-friable integers <= x with their omega values.

    Built by multiplying in the primes from the largest down: after prime p
    the list holds every friable n <= x whose prime factors are all >= p.
    """
    vals = np.array([1], dtype=np.int64)
    om = np.array([0], dtype=np.uint8)
    for p in primes_up_to(min(y, x))[::-1].tolist():
        out_v, out_o = [vals], [om]
        cur_v, cur_o = vals, om + 1
        while True:
            keep = cur_v <= x // p
            cur_v, cur_o = cur_v[keep] * p, cur_o[keep]
            if cur_v.size == 0:
                break
            out_v.append(cur_v)
            out_o.append(cur_o)
        vals = np.concatenate(out_v)
        om = np.concatenate(out_o)
    order = np.argsort(vals, kind="stable")
    return vals[order], om[order]


@dataclass
class FriableTable:
    """Friable integers n <= x_max at threshold y with omega(n).

    In SPF_SIEVE mode ``omega`` and ``lpf`` cover every n <= x_max (index n);
    in SMOOTH_ENUM mode ``values`` lists the friable n in increasing order and
    ``omega`` their omega values.
    """

    y: float
    x_max: int
    mode: Mode
    omega: np.ndarray
    lpf: np.ndarray = None
    values: np.ndarray = None
    _friable_omega: np.ndarray = field(default=None, repr=False)
    _friable_n: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.mode is Mode.SPF_SIEVE:
            n = np.arange(self.x_max + 1)
            mask = (self.lpf <= self.y) & (n >= 1)
            self._friable_n = n[mask]
            self._friable_omega = self.omega[mask]
        else:
            self._friable_n = self.values
            self._friable_omega = self.omega

    @property
    def friable(self):
        """Sorted array of the y-friable n <= x_max."""
        return self._friable_n

    @property
    def friable_omega(self):
        return self._friable_omega

    def is_friable(self, n):
        if self.mode is Mode.SPF_SIEVE:
            return bool(1 <= n <= self.x_max and self.lpf[n] <= self.y)
        i = np.searchsorted(self.values, n)
        return bool(i < self.values.size and self.values[i] == n)

    def psi(self, x=None):
        """Psi(x, y) for x <= x_max."""
        x = self.x_max if x is None else x
        if x > self.x_max:
            raise DomainError(f"x = {x} exceeds table size {self.x_max}")
        return int(np.searchsorted(self._friable_n, math.floor(x), side="right"))

    def restrict(self, x):
        """(n, omega) of the friable n <= x."""
        k = self.psi(x)
        return self._friable_n[:k], self._friable_omega[:k]


def build_table(x, y, mode=Mode.SPF_SIEVE, budget=MEMORY_BUDGET):
    x = int(x)
    mode = Mode(mode)
    if x < 1:
        raise DomainError("x must be >= 1")
    if y < 2:
        raise DomainError("y must be >= 2")
    if mode is Mode.SPF_SIEVE:
        need = (x + 1) * (1 + 4 + 8 + 1)
        if need > budget:
            raise ResourceError(f"sieve to {x} needs ~{need >> 20} MiB; use SMOOTH_ENUM")
        omega, lpf = sieve_records(x)
        return FriableTable(float(y), x, mode, omega, lpf=lpf)
    vals, om = smooth_numbers(x, int(math.floor(y)))
    return FriableTable(float(y), x, mode, om, values=vals)


@dataclass(frozen=True)
class FriableStats:
    psi: int
    psi_f: complex
    psi_k: int
    mean: float
    var: float
    counts: np.ndarray  # counts[k] = #{n in S(x, y): omega(n) = k}

    def cdf(self, mu, sigma):
        """Empirical distribution function of (omega - mu) / sigma."""
        ks = np.arange(self.counts.size)
        cum = np.cumsum(self.counts) / self.psi

        def F(v):
            idx = np.searchsorted((ks - mu) / sigma, v, side="right") - 1
            return 0.0 if idx < 0 else float(cum[idx])

        return F

    def kolmogorov(self, mu, sigma, cdf):
        """sup_v |F_emp(v) - cdf(v)|, attained at the atoms (both one-sided limits)."""
        cum = np.cumsum(self.counts) / self.psi
        prev = np.concatenate([[0.0], cum[:-1]])
        d = 0.0
        for k in range(self.counts.size):
            if self.counts[k] == 0:
                continue
            g = cdf((k - mu) / sigma)
            d = max(d, abs(cum[k] - g), abs(prev[k] - g))
        return d


def friable_stats(tab, z=None, k=None, x=None):
    if k is not None and k < 0:
        raise DomainError("k must be >= 0")
    if z is not None and abs(complex(z)) > 8:
        raise DomainError("|z| must be <= 8")
    _, om = tab.restrict(tab.x_max if x is None else x)
    counts = np.bincount(om, minlength=1).astype(np.int64)
    psi = int(counts.sum())
    psi_f = _twisted(counts, 1 if z is None else z)
    psi_k = int(counts[k]) if k is not None and k < counts.size else 0
    ks = np.arange(counts.size)
    mean = float(np.dot(ks, counts) / psi)
    var = float(np.dot((ks - mean) ** 2, counts) / psi)
    return FriableStats(psi, psi_f, psi_k, mean, var, counts)


def _twisted(counts, z):
    # sum_k counts[k] z^k, exact for integer z
    z = complex(z)
    if z.imag == 0 and z.real == round(z.real):
        zi = int(z.real)
        return complex(sum(int(c) * zi**k for k, c in enumerate(counts)))
    return complex(sum(int(c) * z**k for k, c in enumerate(counts)))


def omega_counts(x):
    """counts[k] = #{n <= x : omega(n) = k}."""
    omega, _ = sieve_records(int(math.floor(x)))
    return np.bincount(omega[1:], minlength=1).astype(np.int64)


def partial_sum_M(tab, x, z):
    """M(x; f_z) = sum_{n <= x} z^omega(n)."""
    if x < 1:
        raise DomainError("x must be >= 1")
    n = int(math.floor(x))
    if tab is not None and tab.mode is Mode.SPF_SIEVE and tab.x_max >= n:
        counts = np.bincount(tab.omega[1 : n + 1], minlength=1)
    else:
        counts = omega_counts(n)
    return _twisted(counts, z)


def cumulative_M(x, z, omega=None):
    """Array M(n; f_z) for n = 0..floor(x) (M(0) = 0)."""
    n = int(math.floor(x))
    if omega is None:
        omega, _ = sieve_records(n)
    f = complex(z) ** omega[1 : n + 1].astype(float)
    return np.concatenate([[0j], np.cumsum(f)])


# ------------------------------------------------------------------- cache


def write_cache(path, x_max):
    """Write omega and largest prime factor for 0 <= n <= x_max."""
    omega, lpf = sieve_records(int(x_max))
    rec = np.empty(x_max + 1, dtype=RECORD)
    rec["omega"], rec["lpf"] = omega, lpf
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<Q", int(x_max)))
        fh.write(rec.tobytes())


def read_cache(path, y):
    """FriableTable at threshold y from a cache file."""
    with open(path, "rb") as fh:
        if fh.read(len(CACHE_MAGIC)) != CACHE_MAGIC:
            raise ConfigError("not a frkt sieve cache", field="cache")
        (x_max,) = struct.unpack("<Q", fh.read(8))
        rec = np.frombuffer(fh.read(), dtype=RECORD)
    if rec.size != x_max + 1:
        raise ConfigError("truncated sieve cache", field="cache")
    return FriableTable(float(y), int(x_max), Mode.SPF_SIEVE, rec["omega"].copy(), lpf=rec["lpf"].copy())

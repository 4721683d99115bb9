import numpy as np

_cache = {"limit": 1, "primes": np.zeros(0, dtype=np.int64)}


def primes_up_to(n):
    """Sorted int64 array of the primes <= n (Eratosthenes, cached)."""
    n = int(n)
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    if n <= _cache["limit"]:
        p = _cache["primes"]
        return p[: np.searchsorted(p, n, side="right")]
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, int(n**0.5) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    primes = np.flatnonzero(sieve).astype(np.int64)
    _cache["limit"], _cache["primes"] = n, primes
    return primes

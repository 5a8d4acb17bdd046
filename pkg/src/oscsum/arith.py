"""Exact integer and rational primitives.

All functions here are pure. Factorization uses a smallest-prime-factor
table that is built once, grown on demand up to ``SIEVE_LIMIT`` and then
only read, so concurrent readers are safe.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

import numpy as np

from .errors import NonInvertible

Rational = Fraction
"""Exact rational numbers in lowest terms with a positive denominator."""

gcd = math.gcd

SIEVE_LIMIT = 10**7

_spf_lock = threading.Lock()
_spf_table = np.zeros(0, dtype=np.int32)


def spf_table(limit: int) -> np.ndarray:
    """Return the smallest-prime-factor table covering ``0..limit``.

    Entry ``n`` holds the least prime dividing ``n`` for ``n >= 2``; entries
    0 and 1 are 0 and 1. The returned array may be longer than requested.
    """
    global _spf_table
    if limit < len(_spf_table):
        return _spf_table
    if limit > SIEVE_LIMIT:
        raise ValueError(f"sieve limit {SIEVE_LIMIT} exceeded: {limit}")
    with _spf_lock:
        if limit < len(_spf_table):
            return _spf_table
        size = min(SIEVE_LIMIT, max(limit, 2 * len(_spf_table), 1 << 16)) + 1
        spf = np.zeros(size, dtype=np.int32)
        spf[1] = 1
        for p in range(2, math.isqrt(size - 1) + 1):
            if spf[p] == 0:
                block = spf[p * p :: p]
                block[block == 0] = p
        rest = np.flatnonzero(spf == 0)
        spf[rest[rest >= 2]] = rest[rest >= 2]
        spf.setflags(write=False)
        _spf_table = spf
        return spf


def primes_up_to(n: int) -> np.ndarray:
    """All primes ``p <= n`` as an int64 array."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    spf = spf_table(n)[: n + 1]
    idx = np.arange(n + 1)
    return idx[(spf == idx) & (idx >= 2)].astype(np.int64)


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer as ``{p: e}``."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out: dict[int, int] = {}
    if n <= SIEVE_LIMIT:
        spf = spf_table(n)
        while n > 1:
            p = int(spf[n])
            while n % p == 0:
                n //= p
                out[p] = out.get(p, 0) + 1
        return out
    p = 2
    while p * p <= n:
        while n % p == 0:
            n //= p
            out[p] = out.get(p, 0) + 1
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mobius(n: int) -> int:
    """Möbius function of ``n >= 1``."""
    fac = factorize(n)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def divisors(n: int) -> list[int]:
    """Sorted positive divisors of ``n >= 1``."""
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    """Euler's totient of ``n >= 1``."""
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def mod_inverse(a: int, q: int) -> int:
    """Inverse of ``a`` modulo ``q`` as a residue in ``[0, q)``.

    For ``q == 1`` the only residue is 0, which is returned.

    Raises:
        NonInvertible: if ``gcd(a, q) != 1``.
    """
    if q < 1:
        raise ValueError("modulus must be positive")
    if q == 1:
        return 0
    if math.gcd(a, q) != 1:
        raise NonInvertible(f"{a} is not invertible modulo {q}")
    return pow(a, -1, q)


def ramanujan_sum(m: int, q: int) -> int:
    """Ramanujan sum ``c_q(m)``, the sum of ``e(am/q)`` over reduced residues.

    Computed as the sum of ``d * mobius(q // d)`` over ``d | gcd(|m|, q)``,
    with ``gcd(0, q) = q`` so that ``c_q(0)`` is Euler's totient.
    """
    if q < 1:
        raise ValueError("modulus must be positive")
    g = math.gcd(abs(m), q)
    return sum(d * mobius(q // d) for d in divisors(g))


def divisor_count_table(n: int) -> np.ndarray:
    """Number of divisors ``d(k)`` for ``k = 0..n`` (entry 0 is 0)."""
    counts = np.zeros(n + 1, dtype=np.int64)
    for d in range(1, math.isqrt(n) + 1):
        counts[d * d :: d] += 2
        counts[d * d] -= 1
    return counts


def coprime_residues(q: int) -> list[int]:
    """Reduced residues modulo ``q``; for ``q == 1`` this is ``[0]``."""
    if q == 1:
        return [0]
    return [a for a in range(1, q) if math.gcd(a, q) == 1]

"""Multi-modular power-series arithmetic used to build exact coefficients.

Series are held as residues modulo primes just below ``2**30``. Products
are computed with floating-point FFTs on 15-bit balanced limbs, where
every partial convolution stays far below the 53-bit mantissa, and the
signed integers are recovered with Garner's mixed-radix reconstruction.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
import scipy.fft

LIMB_BITS = 15
LIMB = 1 << LIMB_BITS
PRIME_BITS = 30


@lru_cache(maxsize=None)
def moduli(count: int) -> tuple[int, ...]:
    """The ``count`` largest primes below ``2**30``, in decreasing order."""
    out = []
    n = (1 << PRIME_BITS) - 1
    while len(out) < count:
        if _is_prime(n):
            out.append(n)
        n -= 2
    return tuple(out)


def _is_prime(n: int) -> bool:
    if n < 2 or n % 2 == 0:
        return n == 2
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def powers_mod(k: int, n: int, p: int) -> np.ndarray:
    """``j**k mod p`` for ``j = 0..n``."""
    base = np.arange(n + 1, dtype=np.int64) % p
    out = None
    while k:
        if k & 1:
            out = base.copy() if out is None else out * base % p
        k >>= 1
        if k:
            base = base * base % p
    return np.ones(n + 1, dtype=np.int64) if out is None else out


def sigma_mod(k: int, n: int, p: int) -> np.ndarray:
    """Divisor power sums ``sigma_k(j) mod p`` for ``j = 0..n`` (entry 0 is 0).

    Each divisor pair ``(d, j/d)`` with ``d <= sqrt(j)`` is added once, so
    the accumulated values stay below ``2**31`` times the divisor count.
    """
    pw = powers_mod(k, n, p)
    acc = np.zeros(n + 1, dtype=np.int64)
    for d in range(1, math.isqrt(n) + 1):
        top = n // d
        acc[d * d :: d] += pw[d] + pw[d : top + 1]
        acc[d * d] -= pw[d]
    return acc % p


def _limbs(x: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Split residues into balanced limbs ``x = hi * 2**15 + lo``."""
    bal = np.where(x > p // 2, x - p, x)
    hi = np.rint(bal / LIMB)
    lo = bal - hi * LIMB
    return hi.astype(np.float64), lo.astype(np.float64)


def _round_mod(values: np.ndarray, p: int) -> np.ndarray:
    rounded = np.rint(values)
    err = np.max(np.abs(values - rounded)) if values.size else 0.0
    if err > 0.25:
        raise ArithmeticError(f"FFT rounding error {err:.3f} too large for exact product")
    return rounded.astype(np.int64) % p


class SeriesSpectra:
    """Forward FFTs of the two limbs of a residue series, cached per prime."""

    def __init__(self, series: np.ndarray, p: int, size: int):
        hi, lo = _limbs(series, p)
        self.hi = scipy.fft.rfft(hi, size)
        self.lo = scipy.fft.rfft(lo, size)


def mul_low(a: SeriesSpectra, b: SeriesSpectra, p: int, size: int, length: int) -> np.ndarray:
    """First ``length`` coefficients of the product of two series modulo ``p``."""
    hh = _round_mod(scipy.fft.irfft(a.hi * b.hi, size)[:length], p)
    mid = _round_mod(scipy.fft.irfft(a.hi * b.lo + a.lo * b.hi, size)[:length], p)
    ll = _round_mod(scipy.fft.irfft(a.lo * b.lo, size)[:length], p)
    return (hh * (LIMB * LIMB % p) % p + mid * LIMB % p + ll) % p


def fft_size(length: int) -> int:
    """Transform length that avoids wrap-around for a truncated product."""
    return scipy.fft.next_fast_len(2 * length - 1, real=True)


def crt_to_float(residues: list[np.ndarray], primes: tuple[int, ...]) -> np.ndarray:
    """Signed integers from residues, returned as correctly scaled floats.

    The integers must satisfy ``|x| < (M - M/p_last) / 2`` where ``M`` is the
    product of the primes; the top mixed-radix digit then decides the sign
    and negative values are rebuilt from complemented digits, so no
    cancellation occurs in floating point.
    """
    r = len(primes)
    digits: list[np.ndarray] = []
    for i, p in enumerate(primes):
        t = residues[i] % p
        for j in range(i):
            inv = pow(primes[j], -1, p)
            t = (t - digits[j]) % p * inv % p
        digits.append(t)
    top = primes[-1]
    negative = digits[-1] > top // 2
    scale = [1.0] * r
    for i in range(1, r):
        scale[i] = scale[i - 1] * float(primes[i - 1])
    pos = np.zeros(len(residues[0]))
    neg = np.ones(len(residues[0]))
    for i in reversed(range(r)):
        pos += digits[i] * scale[i]
        neg += (primes[i] - 1 - digits[i]) * scale[i]
    return np.where(negative, -neg, pos)


def primes_for_bound(log2_bound: float) -> tuple[int, ...]:
    """Enough moduli to represent integers of absolute value below ``2**log2_bound``."""
    need = log2_bound + 2.0
    count = max(1, math.ceil(need / (PRIME_BITS - 0.01)))
    while sum(math.log2(p) for p in moduli(count)) < need:
        count += 1
    return moduli(count)

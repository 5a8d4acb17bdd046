"""Hecke eigenvalues of level-one cusp forms and their Dirichlet-series relatives.

For each supported weight ``k`` the cusp space is one-dimensional, so the
normalized eigenform is a rescaling of ``E_a * E_b - E_k`` with
``a + b = k``. Its integer coefficients are computed exactly modulo a set
of word-size primes (see :mod:`oscsum._modular`) and normalized as
``lambda(n) = a(n) / n**((k - 1) / 2)``.
"""

from __future__ import annotations

import logging
import math
import os
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import _modular
from .arith import divisor_count_table, primes_up_to
from .errors import RangeExceeded, UnsupportedWeight

log = logging.getLogger(__name__)

SUPPORTED_WEIGHTS = (12, 16, 18, 20, 22, 26)

# Eisenstein factors whose product spans M_k together with E_k.
_EISENSTEIN_SPLIT = {12: (6, 6), 16: (8, 8), 18: (4, 14), 20: (10, 10), 22: (8, 14), 26: (12, 14)}

# Moduli are sized for this many coefficients whatever the request, so a
# table's values do not depend on its length (up to this length).
_DESIGN_LENGTH = 4 * 10**6
_DESIGN_MAX_DIVISORS = 360  # max d(n) for n <= 4e6, attained at 3603600

CACHE_VERSION = "v1"
CACHE_ENV = "OSCSUM_CACHE_DIR"


@dataclass(frozen=True)
class FourierTable:
    """Normalized Hecke eigenvalues of one eigenform.

    Attributes:
        weight: Weight of the form.
        values: ``values[n]`` is ``lambda(n)`` for ``1 <= n <= N``;
            ``values[0]`` is an unused 0.
        normalization: Always ``"arithmetic"``.
    """

    weight: int
    values: np.ndarray
    normalization: str = "arithmetic"

    @property
    def N(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n):
        return self.values[n]

    def truncate(self, n: int) -> "FourierTable":
        """The same table restricted to indices ``<= n``."""
        self.require(n)
        return FourierTable(self.weight, self.values[: n + 1])

    def require(self, n: float) -> None:
        """Raise :class:`RangeExceeded` unless the table reaches ``n``."""
        if n > self.N:
            raise RangeExceeded(f"weight {self.weight} table has N={self.N}, needs {n}")

    def raw_coefficients(self) -> np.ndarray:
        """Unnormalized ``a(n)`` as floats (exact integers while below 2**53)."""
        n = np.arange(self.N + 1, dtype=np.float64)
        return self.values * n ** ((self.weight - 1) / 2)


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number ``B_n`` with ``B_1 = -1/2``."""
    b = [Fraction(1)]
    for m in range(1, n + 1):
        b.append(-sum(math.comb(m + 1, j) * b[j] for j in range(m)) / (m + 1))
    return b[n]


def eisenstein_factor(k: int) -> Fraction:
    """``c_k`` in ``E_k = 1 + c_k * sum sigma_{k-1}(n) q**n``, namely ``-2k/B_k``."""
    return Fraction(-2 * k) / bernoulli(k)


def _check_weight(weight: int) -> None:
    if weight not in SUPPORTED_WEIGHTS:
        raise UnsupportedWeight(f"weight {weight} is not one of {SUPPORTED_WEIGHTS}")


def _coefficient_bits(weight: int, N: int) -> float:
    """log2 of a bound for ``|a(n)|``, ``n <= max(N, _DESIGN_LENGTH)``, from Deligne's bound."""
    if N <= _DESIGN_LENGTH:
        max_divisors, top = _DESIGN_MAX_DIVISORS, _DESIGN_LENGTH
    else:
        max_divisors, top = int(divisor_count_table(N).max()), N
    return math.log2(max_divisors) + (weight - 1) / 2 * math.log2(top)


def _eisenstein_mod(k: int, n: int, p: int) -> np.ndarray:
    """``den(c_k) * E_k`` modulo ``p`` to order ``n``."""
    c = eisenstein_factor(k)
    series = _modular.sigma_mod(k - 1, n, p) * (c.numerator % p) % p
    series[0] = c.denominator % p
    return series


def build_eigenform(weight: int, N: int) -> FourierTable:
    """Compute the normalized eigenform of ``weight`` up to index ``N``.

    Raises:
        UnsupportedWeight: for weights outside :data:`SUPPORTED_WEIGHTS`.
    """
    _check_weight(weight)
    if N < 1:
        raise ValueError("N must be positive")
    a, b = _EISENSTEIN_SPLIT[weight]
    ca, cb, ck = (eisenstein_factor(j) for j in (a, b, weight))
    # F = den_a den_b den_k (E_a E_b - E_k) has integer coefficients and
    # F[n] = F[1] * a(n).
    first = ca.denominator * cb.denominator * ck.denominator * (ca + cb - ck)
    assert first.denominator == 1 and first != 0
    first = int(first)

    length = N + 1
    size = _modular.fft_size(length)
    primes = _modular.primes_for_bound(_coefficient_bits(weight, N))
    residues = []
    for p in primes:
        if first % p == 0:
            raise ArithmeticError(f"modulus {p} divides the leading coefficient")
        ea = _eisenstein_mod(a, N, p)
        spec_a = _modular.SeriesSpectra(ea, p, size)
        spec_b = spec_a if b == a else _modular.SeriesSpectra(_eisenstein_mod(b, N, p), p, size)
        prod = _modular.mul_low(spec_a, spec_b, p, size, length)
        ek = _eisenstein_mod(weight, N, p)
        f = (prod * (ck.denominator % p) - ek * (ca.denominator * cb.denominator % p)) % p
        residues.append(f * pow(first, -1, p) % p)
    coeff = _modular.crt_to_float(residues, primes)
    n = np.arange(length, dtype=np.float64)
    values = np.zeros(length)
    values[1:] = coeff[1:] / n[1:] ** ((weight - 1) / 2)
    values.setflags(write=False)
    return FourierTable(weight, values)


def q_expansion_reference(weight: int, N: int) -> list[int]:
    """Exact ``a(0..N)`` from the classical product formulas, in pure Python.

    Builds ``Delta = q * prod (1 - q**n)**24`` and multiplies by powers of
    ``E_4`` and ``E_6``. Quadratic cost; intended as a slow cross-check for
    ``N`` up to a few thousand.
    """
    _check_weight(weight)
    e4 = [1] + [240 * _sigma_exact(3, n) for n in range(1, N + 1)]
    e6 = [1] + [-504 * _sigma_exact(5, n) for n in range(1, N + 1)]
    euler = [0] * (N + 1)
    j = 0
    while True:
        placed = False
        for sign_j in (j, -j) if j else (0,):
            e = sign_j * (3 * sign_j - 1) // 2
            if e <= N:
                euler[e] = -1 if j % 2 else 1
                placed = True
        if not placed:
            break
        j += 1
    eta8 = _mul_trunc(euler, euler, N)
    eta8 = _mul_trunc(eta8, eta8, N)
    eta8 = _mul_trunc(eta8, eta8, N)
    eta24 = _mul_trunc(_mul_trunc(eta8, eta8, N), eta8, N)
    delta = [0] + eta24[:N]
    factors = {12: [], 16: [e4], 18: [e6], 20: [e4, e4], 22: [e4, e6], 26: [e4, e4, e6]}
    series = delta
    for fac in factors[weight]:
        series = _mul_trunc(series, fac, N)
    return series


def _sigma_exact(k: int, n: int) -> int:
    return sum(d**k + (n // d) ** k * (d * d != n) for d in range(1, math.isqrt(n) + 1) if n % d == 0)


def _mul_trunc(x: list[int], y: list[int], N: int) -> list[int]:
    out = [0] * (N + 1)
    for i, xi in enumerate(x):
        if xi:
            for j in range(N + 1 - i):
                out[i + j] += xi * y[j]
    return out


@dataclass(frozen=True)
class HeckeReport:
    """Largest defects found by :func:`verify_hecke`."""

    max_multiplicativity_defect: float
    max_hecke_defect: float
    max_deligne_excess: float
    tol: float
    pairs_checked: int

    @property
    def passed(self) -> bool:
        return max(self.max_multiplicativity_defect, self.max_hecke_defect, self.max_deligne_excess) <= self.tol


def _relative(diff: np.ndarray, *scales: np.ndarray) -> np.ndarray:
    scale = np.maximum.reduce([np.abs(s) for s in scales])
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(scale > 0, np.abs(diff) / np.where(scale > 0, scale, 1.0), np.abs(diff))
    return rel


def verify_hecke(table: FourierTable, tol: float = 1e-10) -> HeckeReport:
    """Check multiplicativity, the prime Hecke relation and Deligne's bound.

    Multiplicativity is checked for every coprime pair ``m * n <= N`` and
    the Hecke relation for every prime power ``p**(k+1) <= N``; both as
    relative defects. The Deligne excess is ``max(|lambda(n)| - d(n), 0)``.
    """
    lam = np.asarray(table.values)
    N = table.N
    mult = 0.0
    pairs = 0
    for m in range(2, math.isqrt(N) + 1):
        n = np.arange(m + 1, N // m + 1)
        n = n[np.gcd(n, m) == 1]
        if n.size:
            pairs += n.size
            lhs = lam[m * n]
            rhs = lam[m] * lam[n]
            mult = max(mult, float(np.max(_relative(lhs - rhs, lhs, rhs))))
    hecke = 0.0
    ps = primes_up_to(math.isqrt(N)) if N >= 4 else np.zeros(0, dtype=np.int64)
    k = 1
    while ps.size:
        ps = ps[ps ** (k + 1) <= N]
        if not ps.size:
            break
        lhs = lam[ps] * lam[ps**k]
        up, down = lam[ps ** (k + 1)], lam[ps ** (k - 1)]
        hecke = max(hecke, float(np.max(_relative(lhs - up - down, lhs, up, down))))
        k += 1
    deligne = 0.0
    if N >= 1:
        d = divisor_count_table(N)
        deligne = float(max(0.0, np.max(np.abs(lam[1:]) - d[1:])))
    return HeckeReport(mult, hecke, deligne, tol, pairs)


def rankin_selberg_partial(table: FourierTable, X: float) -> float:
    """``sum_{n <= X} lambda(n)**2``.

    Raises:
        RangeExceeded: if ``X`` exceeds the table length.
    """
    table.require(X)
    top = int(math.floor(X))
    return float(np.sum(np.square(table.values[1 : top + 1])))


def divisor_sum(u: np.ndarray) -> np.ndarray:
    """``c(n) = sum_{d | n} u(d)`` for ``n = 1..len(u)-1`` (entry 0 untouched).

    Divisor pairs ``(d, n/d)`` with ``d <= sqrt(n)`` are added in a fixed
    order, so the result does not depend on any execution detail.
    """
    N = len(u) - 1
    c = np.zeros_like(u)
    for d in range(1, math.isqrt(N) + 1):
        top = N // d
        c[d * d :: d] += u[d] + u[d : top + 1]
        c[d * d] -= u[d]
    return c


def convolve_gl5(f: FourierTable, g: FourierTable, N: int) -> np.ndarray:
    """Coefficients of ``zeta(s) zeta(2s) sum lambda_f(n) lambda_g(n) n**-s`` up to ``N``.

    Entry ``n`` equals the sum of ``lambda_f(r) lambda_g(r)`` over all
    factorizations ``n = l * m**2 * r``.

    Raises:
        RangeExceeded: if either table is shorter than ``N``.
    """
    f.require(N)
    g.require(N)
    if f.weight == g.weight:
        warnings.warn("convolving a form with itself; the two forms are not orthogonal", stacklevel=2)
    b = np.zeros(N + 1)
    b[1:] = f.values[1 : N + 1] * g.values[1 : N + 1]
    u = b.copy()
    for m in range(2, math.isqrt(N) + 1):
        sq = m * m
        u[sq::sq] += b[1 : N // sq + 1]
    return divisor_sum(u)


# ---------------------------------------------------------------- cache


def cache_dir() -> Path:
    """Coefficient cache directory (``$OSCSUM_CACHE_DIR`` or ``~/.cache/oscsum``)."""
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "oscsum"


def cache_header(weight: int, N: int) -> str:
    return f"# oscsum-coeffs {CACHE_VERSION} weight={weight} N={N} normalization=arithmetic"


def write_table_csv(table: FourierTable, path: Path) -> None:
    """Write ``n,lambda(n)`` rows with 17 significant digits (atomic rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + f".tmp{os.getpid()}")
    with open(tmp, "w") as fh:
        fh.write(cache_header(table.weight, table.N) + "\n")
        vals = table.values
        chunk = 1 << 16
        for start in range(1, table.N + 1, chunk):
            stop = min(start + chunk, table.N + 1)
            fh.write("".join(f"{n},{vals[n]:.17g}\n" for n in range(start, stop)))
    os.replace(tmp, path)


def _parse_header(line: str) -> dict[str, str]:
    parts = line.strip().split()
    if len(parts) < 3 or parts[:2] != ["#", "oscsum-coeffs"]:
        return {}
    fields = {"version": parts[2]}
    for item in parts[3:]:
        key, _, value = item.partition("=")
        fields[key] = value
    return fields


def read_table_csv(path: Path) -> FourierTable:
    """Load a table written by :func:`write_table_csv`; values round-trip exactly."""
    import pandas as pd

    with open(path) as fh:
        header = _parse_header(fh.readline())
    if header.get("version") != CACHE_VERSION or "weight" not in header:
        raise ValueError(f"{path}: not an oscsum coefficient file")
    weight, N = int(header["weight"]), int(header["N"])
    frame = pd.read_csv(path, comment="#", header=None, names=["n", "value"], float_precision="round_trip")
    idx = frame["n"].to_numpy()
    if len(idx) != N or (N and (idx[0] != 1 or idx[-1] != N)):
        raise ValueError(f"{path}: expected rows 1..{N}")
    values = np.zeros(N + 1)
    values[1:] = frame["value"].to_numpy(dtype=np.float64)
    values.setflags(write=False)
    return FourierTable(weight, values)


def load_eigenform(weight: int, N: int, directory: Path | None = None, use_cache: bool = True) -> FourierTable:
    """Return the weight-``weight`` table to length ``N``, via the CSV cache.

    A cached table with the right version and weight and at least ``N``
    entries is truncated and reused; anything else is rebuilt and
    rewritten. Values never depend on the table length, so both paths
    agree bit for bit.
    """
    _check_weight(weight)
    if not use_cache:
        return build_eigenform(weight, N)
    path = Path(directory or cache_dir()) / f"coeffs_w{weight}.csv"
    if path.exists():
        try:
            with open(path) as fh:
                header = _parse_header(fh.readline())
            if (
                header.get("version") == CACHE_VERSION
                and int(header.get("weight", -1)) == weight
                and int(header.get("N", -1)) >= N
            ):
                return read_table_csv(path).truncate(N)
            log.info("coefficient cache %s does not cover N=%d; rebuilding", path, N)
        except (OSError, ValueError) as exc:
            log.info("coefficient cache %s unreadable (%s); rebuilding", path, exc)
    table = build_eigenform(weight, N)
    try:
        write_table_csv(table, path)
    except OSError as exc:
        log.warning("could not write coefficient cache %s: %s", path, exc)
    return table

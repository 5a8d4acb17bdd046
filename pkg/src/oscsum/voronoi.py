"""Voronoi summation for level-one holomorphic forms and its Bessel transform.

The transform is ``Phi_h(x) = 2 pi i**kappa int h(y) J_{kappa-1}(4 pi sqrt(xy)) dy``.
For ``gcd(a, q) = 1``::

    sum_n lambda(n) e(an/q) h(n/X) = (X/q) sum_n lambda(n) e(-abar n/q) Phi_h(n X / q**2)

For ``q = 1`` the only residue class is ``a = 0`` with ``abar = 0``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import gcd, mod_inverse
from .errors import TruncationWarning
from .forms import FourierTable
from .parallel import ordered_map
from .quad import SmoothWindow, bessel_j, oscillatory_integral


def e(x) -> np.ndarray:
    """``exp(2 pi i x)`` with the argument reduced modulo 1 first."""
    x = np.asarray(x, dtype=np.float64)
    return np.exp(2j * np.pi * (x - np.round(x)))


def e_rational(num, q: int) -> np.ndarray:
    """``e(num / q)`` for integer ``num``, reduced exactly modulo ``q``."""
    r = np.mod(np.asarray(num, dtype=np.int64), q)
    return np.exp(2j * np.pi * r / q)


@dataclass(frozen=True)
class VoronoiInstance:
    """Data of one Voronoi identity: form, modulus ``q``, residue ``a``, length ``X``, weight ``h``."""

    form: FourierTable
    q: int
    a: int
    X: float
    h: SmoothWindow

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ValueError("q must be positive")
        if self.q > 1 and gcd(self.a, self.q) != 1:
            raise ValueError(f"a = {self.a} is not coprime to q = {self.q}")
        if self.h.support[0] <= 0:
            raise ValueError("h must be supported in (0, inf)")

    @property
    def a_bar(self) -> int:
        return 0 if self.q == 1 else mod_inverse(self.a, self.q)


# ---------------------------------------------------------------- transform


def phi_h_exact(x: float, h: SmoothWindow, kappa: int, tol: float = 1e-9) -> complex:
    """``Phi_h(x)`` by oscillatory quadrature of the Bessel kernel."""
    return _phi_cached(float(x), h, int(kappa), float(tol))


@lru_cache(maxsize=1 << 18)
def _phi_cached(x: float, h: SmoothWindow, kappa: int, tol: float) -> complex:
    if kappa < 12 or kappa % 2:
        raise ValueError("kappa must be even and at least 12")
    if x <= 0:
        raise ValueError("x must be positive")
    order = kappa - 1
    scale = 4 * math.pi * math.sqrt(x)
    # Absolute tolerance on the integral, before the 2 pi factor.
    integral = oscillatory_integral(
        lambda y: h(y) * bessel_j(order, scale * np.sqrt(y)),
        None,
        h.support,
        tol / (2 * math.pi),
        frequency=lambda y: np.sqrt(x / y),
        base_h=h.resolution,
        breakpoints=h.plateau,
    )
    return 2 * math.pi * (1j**kappa) * integral


def phi_h_many(xs, h: SmoothWindow, kappa: int, tol: float = 1e-9) -> np.ndarray:
    """``Phi_h`` at each point of ``xs``, evaluated independently and in order."""
    xs = [float(x) for x in np.atleast_1d(xs)]
    return np.array(ordered_map(lambda x: phi_h_exact(x, h, kappa, tol), xs), dtype=np.complex128)


@dataclass(frozen=True)
class ExpansionCoefficient:
    """Exact data of ``c_j`` or ``d_j``: ``unit * i**power * hankel / (4 pi)**j``.

    ``unit`` is ``(1+i)/2`` for ``c_j`` and ``(1-i)/2`` for ``d_j``; ``hankel``
    is the rational Hankel coefficient of order ``kappa - 1``.
    """

    j: int
    unit: complex
    i_power: int
    hankel: Fraction

    @property
    def value(self) -> complex:
        return self.unit * (1j ** (self.i_power % 4)) * float(self.hankel) / (4 * math.pi) ** self.j


def hankel_coefficient(order: int, j: int) -> Fraction:
    """``prod_{m=1..j} (4 order**2 - (2m-1)**2) / (j! 8**j)`` exactly."""
    mu = 4 * order * order
    num = 1
    for m in range(1, j + 1):
        num *= mu - (2 * m - 1) ** 2
    return Fraction(num, math.factorial(j) * 8**j)


def expansion_coefficients(kappa: int, J: int) -> tuple[list[ExpansionCoefficient], list[ExpansionCoefficient]]:
    """The constants ``c_j`` and ``d_j`` for ``j <= J``.

    They come from the large-argument expansion
    ``J_nu(z) ~ sqrt(2/(pi z)) Re[exp(i chi) sum_j i**j a_j(nu) z**-j]`` with
    ``chi = z - nu pi/2 - pi/4`` and ``z = 4 pi sqrt(xy)``. The factor
    ``i**kappa exp(-i chi_0)`` collapses to ``exp(i pi/4)`` for even kappa,
    so ``c_0 = (1+i)/2`` and ``d_0 = (1-i)/2``.
    """
    if kappa % 2:
        raise ValueError("kappa must be even")
    cs, ds = [], []
    for j in range(J + 1):
        a = hankel_coefficient(kappa - 1, j)
        cs.append(ExpansionCoefficient(j, (1 + 1j) / 2, j, a))
        ds.append(ExpansionCoefficient(j, (1 - 1j) / 2, -j, a))
    return cs, ds


def phi_h_asymptotic(x: float, h: SmoothWindow, kappa: int, J: int, tol: float = 1e-12) -> complex:
    """Truncated asymptotic expansion of ``Phi_h(x)`` through the ``j = J`` terms."""
    if x < 1:
        raise ValueError("expansion needs x >= 1")
    cs, ds = expansion_coefficients(kappa, J)
    cvals = np.array([c.value for c in cs])
    dvals = np.array([d.value for d in ds])
    powers = np.arange(J + 1)

    def amp(coeffs):
        def f(y):
            xy = x * y
            series = sum(coeffs[j] * xy ** (-0.5 * j) for j in powers)
            return h(y) * y**-0.25 * series

        return f

    def freq(y):
        return np.sqrt(x / y)

    plus = oscillatory_integral(
        amp(cvals), lambda y: 4 * math.pi * np.sqrt(x * y), h.support, tol,
        dphase=lambda y: 2 * math.pi * freq(y), base_h=h.resolution, breakpoints=h.plateau,
    )
    minus = oscillatory_integral(
        amp(dvals), lambda y: -4 * math.pi * np.sqrt(x * y), h.support, tol,
        dphase=lambda y: -2 * math.pi * freq(y), base_h=h.resolution, breakpoints=h.plateau,
    )
    return x**-0.25 * (plus + minus)


# ---------------------------------------------------------------- identity


@dataclass(frozen=True)
class VoronoiResult:
    lhs: complex
    rhs: complex
    defect: float
    dual_terms: int
    tail_estimate: float


def voronoi_lhs(inst: VoronoiInstance) -> complex:
    """``sum_n lambda(n) e(an/q) h(n/X)`` over the support of ``h``."""
    lo, hi = inst.h.support
    n = np.arange(max(1, math.ceil(lo * inst.X)), math.floor(hi * inst.X) + 1)
    inst.form.require(n[-1] if n.size else 0)
    terms = inst.form.values[n] * e_rational(inst.a * n, inst.q) * inst.h(n / inst.X)
    return complex(np.sum(terms))


def _dual_terms(inst: VoronoiInstance, n: np.ndarray, tol: float) -> np.ndarray:
    kappa = inst.form.weight
    xs = (n * inst.X) / (inst.q * inst.q)
    phis = phi_h_many(xs, inst.h, kappa, tol)
    return (inst.X / inst.q) * inst.form.values[n] * e_rational(-inst.a_bar * n, inst.q) * phis


def dual_cutoff(inst: VoronoiInstance) -> int:
    """Dual length where the phase ``2 sqrt(xy)`` oscillates 8x faster than ``h`` varies."""
    y_top = inst.h.support[1]
    x_cut = 64.0 * inst.h.delta**2 * y_top
    return max(1, math.ceil(x_cut * inst.q * inst.q / inst.X))


def voronoi_check(
    inst: VoronoiInstance,
    dual_truncation: int | None = None,
    tail_tol: float = 1e-9,
    tol: float = 1e-9,
    block_width: float = 64.0,
) -> VoronoiResult:
    """Both sides of the Voronoi identity and their difference.

    With ``dual_truncation=None`` the dual sum starts at :func:`dual_cutoff`
    and is extended block by block until two consecutive blocks contribute
    less than ``tail_tol`` in absolute value; the last block sum is the
    reported tail estimate. A block covers ``block_width`` units of the
    dual variable ``x = nX/q**2``. A fixed truncation is used as given and its
    trailing block is checked against ``tail_tol``.

    Warns:
        TruncationWarning: if the tail estimate exceeds ``tail_tol``.
    """
    lhs = voronoi_lhs(inst)
    block = max(8, math.ceil(block_width * inst.q * inst.q / inst.X))
    if dual_truncation is not None:
        inst.form.require(dual_truncation)
        n = np.arange(1, dual_truncation + 1)
        terms = _dual_terms(inst, n, tol)
        tail = float(np.sum(np.abs(terms[-block:])))
        rhs = complex(np.sum(terms))
        cut = dual_truncation
    else:
        cut = min(dual_cutoff(inst), inst.form.N)
        terms = [_dual_terms(inst, np.arange(1, cut + 1), tol)]
        quiet = 0
        tail = math.inf
        while quiet < 2:
            if cut + block > inst.form.N:
                break
            new = _dual_terms(inst, np.arange(cut + 1, cut + block + 1), tol)
            terms.append(new)
            cut += block
            tail = float(np.sum(np.abs(new)))
            quiet = quiet + 1 if tail < tail_tol else 0
        rhs = complex(np.sum(np.concatenate(terms)))
    if tail > tail_tol:
        warnings.warn(f"Voronoi dual tail estimate {tail:.2e} exceeds {tail_tol:.0e}", TruncationWarning, stacklevel=2)
    return VoronoiResult(lhs, rhs, abs(lhs - rhs), cut, tail)


# ---------------------------------------------------------------- resonance


@dataclass(frozen=True)
class ResonanceResult:
    """Resonance sum with two candidate main terms.

    ``main_term`` uses ``V_hat(0) = (1/2) i**kappa (1 - i) int V(x) x**-1/4 dx``;
    ``main_term_expansion`` uses the constant ``c_0 = (1 + i)/2`` of the
    Bessel expansion in place of ``(1/2) i**kappa (1 - i)``.
    """

    sum: complex
    main_term: complex
    residual: float
    main_term_expansion: complex
    residual_expansion: float


def v_moment(V: SmoothWindow) -> float:
    """``int V(x) x**-1/4 dx``."""
    return oscillatory_integral(lambda x: V(x) * x**-0.25, None, V.support, 1e-14,
                                base_h=V.resolution, breakpoints=V.plateau).real


def resonance_sum(form: FourierTable, q: int, X: float, V: SmoothWindow) -> ResonanceResult:
    """``sum_n lambda(n) e(-2 sqrt(qn)) V(n/X)`` against its predicted main term.

    Raises:
        RangeExceeded: if the table is shorter than ``3X``.
    """
    form.require(3 * X)
    lo, hi = V.support
    n = np.arange(max(1, math.ceil(lo * X)), math.floor(hi * X) + 1)
    total = complex(np.sum(form.values[n] * e(-2 * np.sqrt(q * n)) * V(n / X)))
    moment = v_moment(V)
    kappa = form.weight
    scale = form.values[q] / q**0.25 * X**0.75 * moment
    main = scale * 0.5 * (1j**kappa) * (1 - 1j)
    main_exp = scale * (1 + 1j) / 2
    return ResonanceResult(total, main, abs(total - main), main_exp, abs(total - main_exp))

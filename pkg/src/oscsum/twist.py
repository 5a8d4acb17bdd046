"""Twisted Rankin-Selberg sums, their harnesses, and the degree-five gamma factor.

The central object is ``S(X, t) = sum_n lambda_f(n) lambda_g(n) e(t phi(n/X)) V(n/X)``
for two level-one eigenforms ``f``, ``g`` and a phase ``phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NotConverged, RegimeViolated, StationaryOutsideSupport
from .forms import FourierTable, convolve_gl5
from .parallel import blocked_sum, ordered_map
from .quad import PhaseSpec, SmoothWindow, log_gamma, make_window, oscillatory_integral, plateau_window

BLOCK = 1 << 16


def _e_reduced(x: np.ndarray) -> np.ndarray:
    return np.exp(2j * np.pi * (x - np.round(x)))


def max_sharpness(t: float) -> float:
    """``t**1/2 / log t`` (infinite for ``t <= e``)."""
    return math.inf if t <= math.e else math.sqrt(t) / math.log(t)


def sharpness_cap(t: float) -> float:
    """Admissible window sharpness: ``max(4, t**1/2 / log t)``.

    A window on ``[1, 2]`` needs sharpness at least 4, so the cap never
    drops below that.
    """
    return max(4.0, max_sharpness(t))


@dataclass(frozen=True)
class TwistSpec:
    """Phase, frequency ``t``, length ``X`` and window of one twisted sum.

    ``t = 0`` is allowed as a degenerate test case.
    """

    phase: PhaseSpec
    t: float
    X: float
    window: SmoothWindow

    def __post_init__(self) -> None:
        if self.X <= 0:
            raise ValueError("X must be positive")
        if self.window.support[0] <= 0:
            raise ValueError("window must be supported in (0, inf)")
        limit = sharpness_cap(abs(self.t))
        if self.window.delta > limit * (1 + 1e-12):
            raise ValueError(f"window sharpness {self.window.delta:.4g} exceeds the cap {limit:.4g}")

    @property
    def in_regime(self) -> bool:
        """Whether ``t**(8/5) < X < t**(12/5)``."""
        return abs(self.t) ** 1.6 < self.X < abs(self.t) ** 2.4


def default_window(t: float) -> SmoothWindow:
    """The window ``make_window(1, 2, 4)``, admissible for every ``t``."""
    return make_window(1.0, 2.0, 4.0)


def _index_range(window: SmoothWindow, X: float) -> tuple[int, int]:
    lo, hi = window.support
    return max(1, math.ceil(lo * X)), math.floor(hi * X)


def eval_twist_sum(f: FourierTable, g: FourierTable, spec: TwistSpec) -> complex:
    """``sum_n lambda_f(n) lambda_g(n) e(t phi(n/X)) V(n/X)`` by blocked direct summation.

    Raises:
        RangeExceeded: if either table is shorter than ``3X``.
    """
    first, last = _index_range(spec.window, spec.X)
    f.require(max(3 * spec.X, last))
    g.require(max(3 * spec.X, last))
    if last < first:
        return 0j

    def block(start: int, stop: int) -> np.ndarray:
        n = np.arange(first + start, first + stop)
        x = n / spec.X
        return f.values[n] * g.values[n] * spec.window(x) * _e_reduced(spec.t * spec.phase(x))

    return complex(blocked_sum(block, last - first + 1, BLOCK))


@dataclass(frozen=True)
class SharpResult:
    sharp: complex
    smoothed: complex
    edge_bound: float
    delta: float


def sharp_proxy_window(t: float) -> SmoothWindow:
    """Window on ``[1, 2]`` flat on ``[1 + 1/D, 2 - 1/D]`` with ``D = max(4, t**1/2 / log t)``."""
    D = min(sharpness_cap(t), 1e6)
    return make_window(1.0, 2.0, D)


def eval_sharp_sum(f: FourierTable, g: FourierTable, phase: PhaseSpec, t: float, X: float) -> SharpResult:
    """``sum_{X < n <= 2X} lambda_f(n) lambda_g(n) e(t phi(n/X))`` with its smoothed proxy.

    ``edge_bound`` is the sum of ``|lambda_f lambda_g|`` over the two bands
    of width ``X/D`` at the ends, which bounds ``|sharp - smoothed|``.
    """
    if X < 1:
        return SharpResult(0j, 0j, 0.0, 0.0)
    f.require(3 * X)
    g.require(3 * X)
    n = np.arange(math.floor(X) + 1, math.floor(2 * X) + 1)
    if n.size == 0:
        return SharpResult(0j, 0j, 0.0, 0.0)
    x = n / X
    lam = f.values[n] * g.values[n]
    twist = _e_reduced(t * phase(x))
    sharp = complex(np.sum(lam * twist))
    V = sharp_proxy_window(t)
    smoothed = complex(np.sum(lam * twist * V(x)))
    width = 1.0 / V.delta
    edges = (x <= 1 + width) | (x >= 2 - width)
    return SharpResult(sharp, smoothed, float(np.sum(np.abs(lam[edges]))), V.delta)


# ---------------------------------------------------------------- harness

HARNESS_EXPONENTS = tuple(np.linspace(1.7, 2.25, 5))
HARNESS_TS = (64.0, 128.0, 256.0, 512.0)


def harness_window(alternate: bool = False) -> SmoothWindow:
    """Admissible window for every harness ``t >= 64`` (sharpness below ``64**1/2 / log 64``)."""
    if alternate:
        return plateau_window((1.75, 2.25), (1.0, 3.0))
    return plateau_window((1.6, 2.4), (1.0, 3.0))


def harness_grid(ts: Sequence[float] = HARNESS_TS, exponents: Sequence[float] = HARNESS_EXPONENTS) -> list[tuple[float, float]]:
    """``(t, X = t**theta)`` pairs with ``8/5 < theta < 12/5``."""
    return [(float(t), float(t) ** float(th)) for t in ts for th in exponents]


@dataclass(frozen=True)
class HarnessPoint:
    t: float
    X: float
    S: complex
    c_star: float
    c_star_log: float
    in_regime: bool


@dataclass(frozen=True)
class HarnessReport:
    """Per-point ``C* = |S| / (t**2/5 X**3/4)`` with trend summaries.

    ``c_star_log`` additionally divides by ``log(X)**2``. ``growth_exponent``
    is the least-squares slope of ``log P90(t)`` against the log of the
    median ``X`` at each ``t``, where ``P90(t)`` is the 90th percentile of
    ``C*`` over that ``t``'s ``X`` points.
    """

    points: list[HarnessPoint]
    skipped: list[tuple[float, float]]
    max_c_star: float
    p90: dict[float, float]
    growth_exponent: float

    @property
    def growth_per_doubling(self) -> float:
        return 2.0**self.growth_exponent


def theorem1_harness(
    f: FourierTable,
    g: FourierTable,
    phase: PhaseSpec,
    grid: Sequence[tuple[float, float]] | None = None,
    window: SmoothWindow | None = None,
) -> HarnessReport:
    """Evaluate ``S(X, t)`` over ``grid`` and normalize by ``t**2/5 X**3/4``.

    Points outside ``t**8/5 < X < t**12/5`` are skipped and listed.
    """
    grid = list(grid if grid is not None else harness_grid())
    window = window or harness_window()
    inside = [(t, X) for t, X in grid if t**1.6 < X < t**2.4]
    skipped = [(t, X) for t, X in grid if not t**1.6 < X < t**2.4]

    def point(tX: tuple[float, float]) -> HarnessPoint:
        t, X = tX
        S = eval_twist_sum(f, g, TwistSpec(phase, t, X, window))
        c = abs(S) / (t**0.4 * X**0.75)
        return HarnessPoint(t, X, S, c, c / math.log(X) ** 2, True)

    points = ordered_map(point, inside)
    if not points:
        raise RegimeViolated("no grid point lies inside t^(8/5) < X < t^(12/5)")
    ts = sorted({p.t for p in points})
    p90 = {t: float(np.percentile([p.c_star for p in points if p.t == t], 90)) for t in ts}
    growth = 0.0
    if len(ts) > 1:
        xm = [math.log(float(np.median([p.X for p in points if p.t == t]))) for t in ts]
        ym = [math.log(p90[t]) for t in ts]
        growth = float(np.polyfit(xm, ym, 1)[0])
    return HarnessReport(points, skipped, max(p.c_star for p in points), p90, growth)


# ---------------------------------------------------------------- Dirichlet polynomials


def dirichlet_polynomial(f: FourierTable, g: FourierTable, N: float, t: float, window: SmoothWindow | None = None) -> complex:
    """``sum_n lambda_f(n) lambda_g(n) n**-it V(n/N)``.

    This is ``S(N, t)`` for the phase ``-log(x) / (2 pi)`` times ``N**-it``.

    Raises:
        RangeExceeded: if either table is shorter than ``3N``.
    """
    window = window or make_window(1.0, 2.0, 4.0)
    f.require(3 * N)
    g.require(3 * N)
    first, last = _index_range(window, N)
    if last < first:
        return 0j
    cycles = t / (2 * math.pi)

    def block(start: int, stop: int) -> np.ndarray:
        n = np.arange(first + start, first + stop)
        return f.values[n] * g.values[n] * window(n / N) * _e_reduced(-cycles * np.log(n))

    return complex(blocked_sum(block, last - first + 1, BLOCK))


@dataclass(frozen=True)
class DirichletSupReport:
    t: float
    Ns: np.ndarray
    ratios: np.ndarray
    sup: float
    normalized: float


def dirichlet_sup(f: FourierTable, g: FourierTable, t: float, window: SmoothWindow | None = None) -> DirichletSupReport:
    """``sup`` over dyadic ``N = 2**j <= t**2`` of ``|D(N, t)| / sqrt(N)``.

    ``normalized`` divides the supremum by ``t**0.9 log(t)**2``.
    """
    Ns = 2.0 ** np.arange(0, math.floor(math.log2(t * t)) + 1)
    ratios = np.array(ordered_map(lambda N: abs(dirichlet_polynomial(f, g, float(N), t, window)) / math.sqrt(N), Ns))
    sup = float(np.max(ratios))
    return DirichletSupReport(t, Ns, ratios, sup, sup / (t**0.9 * math.log(t) ** 2))


# ---------------------------------------------------------------- gamma factor


@dataclass(frozen=True)
class GammaFactor:
    """Archimedean factor of ``L(s, f x g)`` times ``zeta(2s)``, weights ``k >= kappa >= 12``."""

    k: int
    kappa: int

    def __post_init__(self) -> None:
        if not self.k >= self.kappa >= 12:
            raise ValueError("need k >= kappa >= 12")
        if (self.k - self.kappa) % 2:
            raise ValueError("k and kappa must have the same parity")

    @property
    def shifts(self) -> tuple[int, int, int, int, int]:
        h, s = (self.k - self.kappa) // 2, (self.k + self.kappa) // 2
        return (0, h, h + 1, s - 1, s)

    @property
    def omega(self) -> complex:
        """``e((4k - 5)/8)``, the constant phase of the Stirling approximation."""
        return complex(np.exp(2j * math.pi * ((4 * self.k - 5) % 8) / 8))


def gamma_factor(s: complex, gf: GammaFactor) -> complex:
    """``pi**(-5(s - 1/2)) prod_j Gamma((s + k_j)/2) / Gamma((1 - s + k_j)/2)``.

    Evaluated through log-Gamma to avoid overflow.

    Raises:
        Pole: if a Gamma argument is a non-positive integer.
    """
    s = complex(s)
    total = -5 * (s - 0.5) * math.log(math.pi)
    for kj in gf.shifts:
        total += log_gamma((s + kj) / 2) - log_gamma((1 - s + kj) / 2)
    return complex(np.exp(total))


def stirling_approximation(sigma: float, t: float, gf: GammaFactor) -> complex:
    """``(t/2pi)**(5(sigma - 1/2)) (t/(2 pi e))**(5it) omega_k``, the large-``t`` form of ``gamma(sigma + it)``."""
    mod = (t / (2 * math.pi)) ** (5 * (sigma - 0.5))
    arg = 5 * t * math.log(t / (2 * math.pi * math.e))
    return mod * complex(np.exp(1j * arg)) * gf.omega


# ---------------------------------------------------------------- L(1, f x g)

L_SCHEDULES = (1e4, 4e4, 1.6e5)
ZETA2 = math.pi**2 / 6
# Horizons in units of the largest T: exp(-10) already sits below the targets used.
MIN_HORIZON = 10
FULL_HORIZON = 25


@dataclass(frozen=True)
class LValueReport:
    value: float
    exponential: tuple[float, ...]
    gaussian: tuple[float, ...]
    exponential_limit: float
    gaussian_limit: float
    agreement: float
    stability: float


def _smoothed_l1(lam: np.ndarray, T: float, kind: str) -> float:
    n = np.arange(1, len(lam))
    x = n / T
    weight = np.exp(-x) if kind == "exponential" else np.exp(-x * x)
    return ZETA2 * float(blocked_sum(lambda a, b: lam[1 + a : 1 + b] * weight[a:b] / n[a:b], len(n), BLOCK))


def _richardson(values: Sequence[float], orders: Sequence[int]) -> float:
    """Eliminate ``T**-p`` terms for ``p`` in ``orders``; schedule ratio 4."""
    vals = list(values)
    for p in orders:
        r = 4.0**p
        vals = [(r * vals[i + 1] - vals[i]) / (r - 1) for i in range(len(vals) - 1)]
    return vals[-1]


def l_value_rankin(
    f: FourierTable,
    g: FourierTable,
    target: float = 1e-4,
    schedule: Sequence[float] = L_SCHEDULES,
) -> LValueReport:
    """``L(1, f x g) = zeta(2) sum lambda_f(n) lambda_g(n) / n``, certified by two mollifiers.

    Exponential smoothing ``exp(-n/T)`` has corrections in powers of
    ``1/T`` and the Gaussian ``exp(-(n/T)**2)`` in powers of ``1/T**2``.
    Each schedule is extrapolated by Richardson steps over ``schedule``
    (consecutive ratio 4); the returned value is the Gaussian limit. Sums
    run to ``25 max(schedule)`` or the table length, whichever is smaller.

    Raises:
        ValueError: if ``f`` and ``g`` have the same weight (pole at ``s = 1``).
        NotConverged: if the two limits differ by more than ``target`` or
            the last Richardson step moves either limit by more than ``target``.
    """
    if f.weight == g.weight:
        raise ValueError("L(s, f x f) has a pole at s = 1; use distinct forms")
    top = min(f.N, g.N)
    lam = np.zeros(top + 1)
    lam[1:] = f.values[1 : top + 1] * g.values[1 : top + 1]
    if top < MIN_HORIZON * max(schedule):
        raise NotConverged(f"tables reach {top}, smoothing needs {MIN_HORIZON * max(schedule):.0f}")
    lam = lam[: int(min(top, FULL_HORIZON * max(schedule))) + 1]
    expo = tuple(_smoothed_l1(lam, T, "exponential") for T in schedule)
    gauss = tuple(_smoothed_l1(lam, T, "gaussian") for T in schedule)
    e_lim = _richardson(expo, [1, 2])
    g_lim = _richardson(gauss, [2, 4])
    stability = max(abs(e_lim - _richardson(expo[1:], [1])), abs(g_lim - _richardson(gauss[1:], [2])))
    agreement = abs(e_lim - g_lim)
    if agreement > target or stability > target:
        raise NotConverged(f"mollifier agreement {agreement:.2e}, stability {stability:.2e} vs target {target:.0e}")
    return LValueReport(g_lim, expo, gauss, e_lim, g_lim, agreement, stability)


# ---------------------------------------------------------------- GL(5) partial sums


@dataclass(frozen=True)
class GL5Report:
    """``E(X) = |A(X) - L(1) X|`` on a grid, with ``A(X)`` the partial sum of the degree-five coefficients."""

    Xs: np.ndarray
    A: np.ndarray
    E: np.ndarray
    ratios: np.ndarray
    fitted_exponent: float
    l_value: float


def gl5_partial_sums(f: FourierTable, g: FourierTable, Xs: Sequence[float]) -> np.ndarray:
    top = int(math.floor(max(Xs)))
    coeffs = convolve_gl5(f, g, top)
    cum = np.cumsum(coeffs)
    return np.array([cum[int(math.floor(X))] if X >= 1 else 0.0 for X in Xs])


def gl5_hyperbola_partial_sum(f: FourierTable, g: FourierTable, X: float) -> float:
    """``sum_r lambda_f(r) lambda_g(r) #{(l, m): l m**2 <= X/r}`` (independent reference)."""
    top = int(math.floor(X))
    f.require(top)
    g.require(top)
    total = 0.0
    for r in range(1, top + 1):
        y = top // r
        count = sum(y // (m * m) for m in range(1, math.isqrt(y) + 1))
        total += f.values[r] * g.values[r] * count
    return total


def gl5_partial_sum_check(
    f: FourierTable,
    g: FourierTable,
    Xs: Sequence[float],
    l_value: float | None = None,
) -> GL5Report:
    """``E(X)/X**2/3`` over ``Xs`` and the fitted exponent of ``E``."""
    Xs = np.asarray(Xs, dtype=np.float64)
    L = l_value if l_value is not None else l_value_rankin(f, g).value
    A = gl5_partial_sums(f, g, Xs)
    E = np.abs(A - L * Xs)
    ratios = E / Xs ** (2 / 3)
    slope = float(np.polyfit(np.log(Xs), np.log(E), 1)[0]) if len(Xs) > 1 else math.nan
    return GL5Report(Xs, A, E, ratios, slope, L)


# ---------------------------------------------------------------- xi integral


@dataclass(frozen=True)
class XiReport:
    xi0: float
    integral: complex
    leading: complex
    defect: float
    inside: bool


def xi_stationary_check(
    n: int,
    X: float,
    T: float,
    window: SmoothWindow | None = None,
    allow_outside: bool = False,
    tol: float = 1e-12,
) -> XiReport:
    """``int V2(xi) exp(i h(xi)) dxi`` with ``h = T xi log(nX (T xi/(2 pi e))**-5)`` against stationary phase.

    The stationary point is ``xi0 = 2 pi (nX)**1/5 / T`` with ``h(xi0) = 5 T xi0``
    and ``h''(xi0) = -5T/xi0``, so the leading term is
    ``V2(xi0) e(5 (nX)**1/5) exp(-i pi/4) sqrt(2 pi xi0 / (5T))``.
    ``defect`` is relative to the leading term, or absolute when ``xi0``
    lies outside the support.

    Raises:
        StationaryOutsideSupport: if ``xi0`` is outside ``supp V2`` and
            ``allow_outside`` is false.
    """
    V = window or make_window(0.5, 1.5, 4.0)
    nX = n * X
    xi0 = 2 * math.pi * nX**0.2 / T
    lo, hi = V.support
    inside = lo < xi0 < hi
    if not inside and not allow_outside:
        raise StationaryOutsideSupport(f"xi0 = {xi0:.4g} is outside [{lo}, {hi}]")
    log_nX = math.log(nX)
    shift = 2 * math.pi * math.e / T

    def h(xi):
        return T * xi * (log_nX - 5 * np.log(xi / shift))

    def dh(xi):
        return T * (log_nX - 5 * np.log(xi / shift) - 5)

    value = oscillatory_integral(V, h, V.support, tol, dphase=dh, base_h=V.resolution, breakpoints=V.plateau)
    if not inside:
        return XiReport(xi0, value, 0j, abs(value), False)
    cycles = 5 * nX**0.2
    lead = float(V(np.array([xi0]))[0]) * math.sqrt(2 * math.pi * xi0 / (5 * T))
    lead_c = lead * complex(np.exp(1j * (2 * math.pi * (cycles - round(cycles)) - math.pi / 4)))
    return XiReport(xi0, value, lead_c, abs(value - lead_c) / abs(lead_c), True)

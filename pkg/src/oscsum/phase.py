"""Stationary phase: generic estimates and the concrete integrals of the twist analysis.

Phases in the generic checks are in radians, ``I = int w(y) exp(i rho(y)) dy``.
The concrete integrals use ``e(x) = exp(2 pi i x)`` with phases in cycles.

In the squared variable ``y -> y**2`` the off-diagonal integral reads::

    Ifrak = 2 int y Vt(y**2) e(rho(y)) dy,   rho(y) = t phi(y**2) + (B - D) y

with ``Vt(y) = V(y) y**-1/4``, ``B = 2 sqrt(nX)/q`` and ``D = 2 sqrt(mX)/q``.
Writing ``d/dy phi(y**2) = c y**-b``, the stationary point is
``y* = (ct/(D - B))**(1/b)`` and ``y0 = (ct/D)**(1/b)`` is its value at ``B = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import (
    HypothesisViolated,
    MultipleStationaryPoints,
    NoStationaryPoint,
    RegimeViolated,
)
from .parallel import ordered_map
from .quad import PhaseSpec, SmoothWindow, make_window, oscillatory_integral, plateau_window

ArrayFn = Callable[[np.ndarray], np.ndarray]
SAMPLES = 4097


def _grid(interval: tuple[float, float], samples: int = SAMPLES) -> np.ndarray:
    return np.linspace(interval[0], interval[1], samples)


def _integrate(w: SmoothWindow, phase: ArrayFn, dphase: ArrayFn, tol: float) -> complex:
    return oscillatory_integral(w, phase, w.support, tol, dphase=dphase,
                                base_h=w.resolution, breakpoints=w.plateau)


# ---------------------------------------------------------------- generic estimates


@dataclass(frozen=True)
class DecayParams:
    """Scales of the non-stationary estimate: ``rho^(i) << Y/Q**i``, ``w^(j) << Z/U**j``, ``|rho'| >= R``."""

    Q: float
    U: float
    Y: float
    Z: float
    R: float


@dataclass(frozen=True)
class DecayReport:
    integral: complex
    bracket: float
    bound: float
    ratio: float
    min_derivative: float

    @property
    def passed(self) -> bool:
        return self.ratio <= 1.0


def nonstationary_decay_check(
    w: SmoothWindow,
    phase: ArrayFn,
    dphase: ArrayFn,
    params: DecayParams,
    A: int,
    constant: float = 1.0,
    tol: float = 1e-13,
) -> DecayReport:
    """Compare ``|I|`` with ``constant * (b-a) Z (Y/(RQ)**2 + 1/(RQ) + 1/(RU))**A``.

    Raises:
        HypothesisViolated: if ``R <= 0`` or ``|rho'| < R`` somewhere on the support.
    """
    if params.R <= 0:
        raise HypothesisViolated("non-stationary estimate needs R > 0")
    y = _grid(w.support)
    slope = float(np.min(np.abs(dphase(y))))
    if slope < params.R * (1 - 1e-12):
        raise HypothesisViolated(f"|rho'| reaches {slope:.3g} < R = {params.R:.3g}")
    P = params
    bracket = P.Y / (P.R * P.Q) ** 2 + 1 / (P.R * P.Q) + 1 / (P.R * P.U)
    a, b = w.support
    bound = constant * (b - a) * P.Z * bracket**A
    value = _integrate(w, phase, dphase, tol)
    return DecayReport(value, bracket, bound, abs(value) / bound, slope)


def find_stationary_point(dphase: ArrayFn, interval: tuple[float, float], xtol: float = 1e-13) -> float:
    """The unique sign change of ``dphase`` in ``interval``, refined by bisection.

    Raises:
        NoStationaryPoint: if ``dphase`` keeps one sign.
        MultipleStationaryPoints: if it changes sign more than once.
    """
    y = _grid(interval)
    d = np.asarray(dphase(y))
    sign = np.sign(d)
    zeros = np.flatnonzero(sign == 0)
    changes = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    count = len(changes) + len(zeros)
    if count == 0:
        raise NoStationaryPoint("phase derivative has no sign change")
    if count > 1:
        raise MultipleStationaryPoints(f"{count} sign changes of the phase derivative")
    if zeros.size:
        return float(y[zeros[0]])
    lo, hi = float(y[changes[0]]), float(y[changes[0] + 1])
    f_lo = float(dphase(np.array([lo]))[0])
    while hi - lo > xtol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        f_mid = float(dphase(np.array([mid]))[0])
        if f_mid == 0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class StationaryResult:
    I_quad: complex
    I_lead: complex
    ratio_defect: float
    y0: float


def stationary_leading_term(
    w: ArrayFn | SmoothWindow,
    phase: ArrayFn,
    dphase: ArrayFn,
    d2phase: ArrayFn,
    interval: tuple[float, float] | None = None,
    tol: float = 1e-13,
    base_h: float | None = None,
) -> StationaryResult:
    """Quadrature against ``exp(i rho(y0) + sgn(rho'') i pi/4) sqrt(2 pi/|rho''(y0)|) w(y0)``.

    ``w`` may be any vectorized amplitude when ``interval`` is given.
    """
    if isinstance(w, SmoothWindow):
        interval = interval or w.support
        base_h = base_h or w.resolution
        breaks = w.plateau
    else:
        if interval is None:
            raise ValueError("interval is required for a plain amplitude")
        breaks = ()
    y0 = find_stationary_point(dphase, interval)
    quad = oscillatory_integral(w, phase, interval, tol, dphase=dphase, base_h=base_h, breakpoints=breaks)
    rho2 = float(d2phase(np.array([y0]))[0])
    amp = float(np.asarray(w(np.array([y0])))[0])
    lead = np.exp(1j * (float(phase(np.array([y0]))[0]) + math.copysign(math.pi / 4, rho2)))
    lead *= math.sqrt(2 * math.pi / abs(rho2)) * amp
    return StationaryResult(quad, complex(lead), abs(quad - lead) / abs(lead), y0)


@dataclass(frozen=True)
class SecondDerivativeReport:
    integral: complex
    V0: float
    bound: float
    ratio: float

    @property
    def passed(self) -> bool:
        return abs(self.integral) <= self.bound


def variation_plus_max(w: ArrayFn, interval: tuple[float, float], samples: int = 20001) -> float:
    """Total variation of ``w`` on ``interval`` plus its maximum modulus, on a fine grid."""
    vals = np.asarray(w(_grid(interval, samples)), dtype=np.float64)
    return float(np.sum(np.abs(np.diff(vals))) + np.max(np.abs(vals)))


def second_derivative_bound_check(
    w: ArrayFn | SmoothWindow,
    phase: ArrayFn,
    dphase: ArrayFn,
    d2phase: ArrayFn,
    lam0: float,
    constant: float = 8.0,
    tol: float = 1e-13,
    interval: tuple[float, float] | None = None,
) -> SecondDerivativeReport:
    """Check ``|I| <= constant * V0 / sqrt(lam0)`` when ``rho'' >= lam0``.

    ``ratio`` is ``|I| sqrt(lam0) / V0``, the measured constant. ``w`` may
    be any vectorized amplitude when ``interval`` is given.

    Raises:
        HypothesisViolated: if ``lam0 <= 0`` or sampled ``rho''`` drops below ``lam0``.
    """
    if lam0 <= 0:
        raise HypothesisViolated("lam0 must be positive")
    if isinstance(w, SmoothWindow):
        interval = interval or w.support
    elif interval is None:
        raise ValueError("interval is required for a plain amplitude")
    low = float(np.min(d2phase(_grid(interval))))
    if low < lam0 * (1 - 1e-12):
        raise HypothesisViolated(f"rho'' reaches {low:.3g} < lam0 = {lam0:.3g}")
    if isinstance(w, SmoothWindow):
        value = _integrate(w, phase, dphase, tol)
    else:
        value = oscillatory_integral(w, phase, interval, tol, dphase=dphase)
    V0 = variation_plus_max(w, interval)
    ratio = abs(value) * math.sqrt(lam0) / V0 if V0 > 0 else 0.0
    return SecondDerivativeReport(value, V0, constant * V0 / math.sqrt(lam0), ratio)


# ---------------------------------------------------------------- concrete integrals


def _default_V() -> SmoothWindow:
    return make_window(1.0, 2.0, 4.0)


def _default_omega() -> SmoothWindow:
    return plateau_window((1.0, 2.0), (2.0 / 3.0, 3.0))


@dataclass(frozen=True)
class PhaseContext:
    """Parameters of the integrals ``Phi``, ``Psi``, ``K``, ``Ifrak`` and ``H``.

    ``B`` and ``D`` are derived from ``(q, n, m, X)`` on access. ``M``,
    ``n1``, ``n2`` and ``omega`` feed the correlation integral ``H``;
    ``Xi`` is the size of ``zeta`` and ``W_tilde`` its window in ``K``.
    """

    q: int
    Q: float
    zeta: float
    t: float
    X: float
    m: float
    n: float
    phase: PhaseSpec
    V: SmoothWindow = field(default_factory=_default_V)
    U: SmoothWindow = field(default_factory=_default_V)
    n1: float = 1.0
    n2: float = 1.0
    M: float = 1.0
    Xi: float = 1.0
    omega: SmoothWindow = field(default_factory=_default_omega)
    W_tilde: SmoothWindow = field(default_factory=lambda: make_window(0.5, 2.5, 2.0))

    @property
    def B(self) -> float:
        return 2.0 * math.sqrt(self.n * self.X) / self.q

    @property
    def D(self) -> float:
        return 2.0 * math.sqrt(self.m * self.X) / self.q

    @property
    def c(self) -> float:
        return self.phase.c

    @property
    def b(self) -> float:
        return self.phase.b

    @property
    def y0(self) -> float:
        return (self.c * self.t / self.D) ** (1.0 / self.b)

    @property
    def y_star(self) -> float:
        return (self.c * self.t / (self.D - self.B)) ** (1.0 / self.b)

    def with_(self, **changes) -> "PhaseContext":
        return replace(self, **changes)

    def rho(self, y) -> np.ndarray:
        """Phase of ``Ifrak`` in the squared variable, in cycles."""
        y = np.asarray(y, dtype=np.float64)
        return self.t * self.phase(y * y) + (self.B - self.D) * y

    def rho_derivative(self, y, order: int = 1) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        c, b, t = self.c, self.b, self.t
        if order == 1:
            return c * t * y**-b + self.B - self.D
        coeff = c * t * math.prod(-b - j for j in range(order - 1))
        return coeff * y ** (-b - order + 1)


def _tilde(V: SmoothWindow) -> ArrayFn:
    return lambda y: V(y) * np.asarray(y, dtype=np.float64) ** -0.25


def eval_paper_integrals(ctx: PhaseContext, which: str, sign: int = -1, tol: float = 1e-10, y: float = 1.5) -> complex:
    """Direct quadrature of ``Phi``, ``Psi``, ``K`` or ``Ifrak``.

    ``sign`` selects the ``-2 sqrt(mXy)/q`` (default) or ``+`` branch of
    ``Phi``; ``y`` is the outer variable of ``K``. In ``K`` the factor
    ``g(q, zeta)`` is replaced by its leading value 1 and the inert
    window at ``nQ**2/(X zeta**2)`` by ``U``.
    """
    two_pi = 2 * math.pi
    q, Q, X, t, zeta = ctx.q, ctx.Q, ctx.X, ctx.t, ctx.zeta
    if which == "Phi":
        V = ctx.V
        lin = zeta * X / (q * Q)
        root = sign * 2 * math.sqrt(ctx.m * X) / q
        return oscillatory_integral(
            _tilde(V),
            lambda u: two_pi * (t * ctx.phase(u) + lin * u + root * np.sqrt(u)),
            V.support, tol,
            dphase=lambda u: two_pi * (t * ctx.phase.derivative(u) + lin + root / (2 * np.sqrt(u))),
            base_h=V.resolution, breakpoints=V.plateau,
        )
    if which == "Psi":
        U = ctx.U
        lin = -zeta * X / (q * Q)
        root = 2 * math.sqrt(ctx.n * X) / q
        return oscillatory_integral(
            _tilde(U),
            lambda u: two_pi * (lin * u + root * np.sqrt(u)),
            U.support, tol,
            dphase=lambda u: two_pi * (lin + root / (2 * np.sqrt(u))),
            base_h=U.resolution, breakpoints=U.plateau,
        )
    if which == "K":
        Wt, U = ctx.W_tilde, ctx.U
        Xi = ctx.Xi
        a = X * y / (q * Q)
        b = ctx.n * Q / q

        def amp(z):
            return Wt(z / Xi) * U(ctx.n * Q**2 / (X * z * z))

        return oscillatory_integral(
            amp, lambda z: two_pi * (a * z + b / z), (Wt.support[0] * Xi, Wt.support[1] * Xi), tol,
            dphase=lambda z: two_pi * (a - b / (z * z)),
            base_h=Xi * Wt.resolution / 4,
        )
    if which == "Ifrak":
        V = ctx.V
        diff = ctx.B - ctx.D
        return oscillatory_integral(
            _tilde(V),
            lambda u: two_pi * (t * ctx.phase(u) + diff * np.sqrt(u)),
            V.support, tol,
            dphase=lambda u: two_pi * (t * ctx.phase.derivative(u) + diff / (2 * np.sqrt(u))),
            base_h=V.resolution, breakpoints=V.plateau,
        )
    raise ValueError(f"unknown integral {which!r}; choose Phi, Psi, K or Ifrak")


def psi_envelope(ctx: PhaseContext) -> float:
    """Stationary-phase size ``q**1/2 (nX)**-1/4`` of ``Psi``."""
    return math.sqrt(ctx.q) / (ctx.n * ctx.X) ** 0.25


# ---------------------------------------------------------------- stationary point and its series


def binomial(alpha: float, j: int) -> float:
    """Generalized binomial coefficient ``alpha (alpha-1) ... (alpha-j+1) / j!``."""
    return math.prod(alpha - i for i in range(j)) / math.factorial(j)


@dataclass(frozen=True)
class StationaryPointSeries:
    y_star_exact: float
    y_star_series: float
    defect: float


def stationary_point_series(ctx: PhaseContext, K1: int) -> StationaryPointSeries:
    """Root of ``rho'`` by bisection against ``y0 (1 + sum_{j<=K1} C(-1/b, j) (-B/D)**j)``."""
    if not ctx.B < ctx.D:
        raise RegimeViolated("need B < D")
    ys = ctx.y_star
    if ctx.B == 0:
        return StationaryPointSeries(ctx.y0, ctx.y0, 0.0)
    exact = find_stationary_point(lambda y: ctx.rho_derivative(y), (0.25 * ys, 4.0 * ys), xtol=1e-15)
    s = -ctx.B / ctx.D
    series = ctx.y0 * (1.0 + sum(binomial(-1.0 / ctx.b, j) * s**j for j in range(1, K1 + 1)))
    return StationaryPointSeries(exact, series, abs(exact - series))


def phase_series_coefficient(c: float, b: float, j: int, y0: float) -> float:
    """Coefficient ``g_j(y0)`` in ``rho(y*) - rho0 = B sum_{j>=0} g_j(y0) (B/t)**j``.

    From ``d rho(y*)/dB = y*`` one gets
    ``g_j = y0**(1 + j b) (-1)**j C(-1/b, j) / ((j + 1) c**j)``; in particular
    ``g_0 = y0`` and ``g_1 = y0**(1+b) / (2 b c)``.
    """
    return y0 ** (1 + j * b) * (-1) ** j * binomial(-1.0 / b, j) / ((j + 1) * c**j)


def printed_quadratic_coefficient(c: float, b: float, y0: float) -> float:
    """The alternative quadratic coefficient ``y0**2 / (2 c b**2)``; equal to ``g_1`` only at ``b = 1``."""
    return y0**2 / (2 * c * b * b)


def phase_shift_exact(ctx: PhaseContext) -> float:
    """``rho(y*) - (t phi(y0**2) - D y0)`` in closed form, free of cancellation."""
    s = ctx.B / ctx.D
    scale = ctx.y0 * ctx.D
    if ctx.b == 1.0:
        return -scale * math.log1p(-s)
    gamma = 1.0 - 1.0 / ctx.b
    return -scale * math.expm1(gamma * math.log1p(-s)) / gamma


def phase_shift_series(ctx: PhaseContext, K2: int) -> float:
    """``B sum_{j<=K2} g_j (B/t)**j``; ``K2 = 1`` keeps the linear and quadratic terms."""
    r = ctx.B / ctx.t
    return ctx.B * sum(phase_series_coefficient(ctx.c, ctx.b, j, ctx.y0) * r**j for j in range(K2 + 1))


# ---------------------------------------------------------------- Ifrak* and H

REGIME = (0.25, 4.0)


def _check_regime(ctx: PhaseContext, D: np.ndarray) -> None:
    ratio = np.asarray(D) / ctx.t
    if np.any(ratio < REGIME[0]) or np.any(ratio > REGIME[1]):
        raise RegimeViolated(f"D/t ranges over [{ratio.min():.3g}, {ratio.max():.3g}], outside {list(REGIME)}")
    if ctx.c <= 0:
        raise NoStationaryPoint("c <= 0: the phase has no stationary point")


def _shift(ctx: PhaseContext, m: np.ndarray, n: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(shift, y*, D)`` where ``shift = rho(y*) - (t phi(y0**2) - D y0)``, vectorized over ``m``."""
    m = np.asarray(m, dtype=np.float64)
    D = 2.0 * np.sqrt(m * ctx.X) / ctx.q
    B = 2.0 * math.sqrt(n * ctx.X) / ctx.q
    _check_regime(ctx, D)
    if np.any(B >= D):
        raise RegimeViolated("need B < D")
    c, b, t = ctx.c, ctx.b, ctx.t
    y0 = (c * t / D) ** (1.0 / b)
    s = B / D
    if b == 1.0:
        shift = -y0 * D * np.log1p(-s)
    else:
        gamma = 1.0 - 1.0 / b
        shift = -y0 * D * np.expm1(gamma * np.log1p(-s)) / gamma
    ys = (c * t / (D - B)) ** (1.0 / b)
    return shift, ys, D


def _i_star(ctx: PhaseContext, m: np.ndarray, n: float) -> np.ndarray:
    """Vectorized ``Ifrak*`` over ``m`` at fixed ``n``."""
    shift, ys, _ = _shift(ctx, m, n)
    rho2 = -ctx.c * ctx.b * ctx.t * ys ** (-ctx.b - 1.0)
    amp = 2.0 * np.sqrt(ys) * ctx.V(ys * ys)
    frac = shift - np.round(shift)
    return amp / np.sqrt(np.abs(rho2)) * np.exp(1j * (2 * math.pi * frac + np.sign(rho2) * math.pi / 4))


def eval_I_star(ctx: PhaseContext, m: float | None = None, n: float | None = None) -> complex:
    """``Ifrak*`` from the stationary-phase value at the exact ``y*``.

    ``e(t phi(y0**2) - D y0) * Ifrak*`` is the leading stationary-phase
    approximation of ``Ifrak``.

    Raises:
        RegimeViolated: if ``D/t`` is outside ``[1/4, 4]`` or ``B >= D``.
        NoStationaryPoint: if ``c <= 0``.
    """
    m = ctx.m if m is None else m
    n = ctx.n if n is None else n
    return complex(_i_star(ctx, np.array([m]), n)[0])


def i_frak_leading(ctx: PhaseContext) -> complex:
    """``e(t phi(y0**2) - D y0) * Ifrak*``."""
    base = ctx.t * ctx.phase(ctx.y0**2) - ctx.D * ctx.y0
    frac = float(base - np.round(base))
    return complex(np.exp(2j * math.pi * frac) * eval_I_star(ctx))


def h_critical_scale(ctx: PhaseContext) -> float:
    """``X**(1+eps) Xi/(qQ)`` with ``X**eps`` realized as ``log(X)**2``."""
    return ctx.X * math.log(ctx.X) ** 2 * ctx.Xi / (ctx.q * ctx.Q)


def eval_H(x: float, ctx: PhaseContext, tol: float = 1e-12) -> complex:
    """``int omega(xi) Ifrak*(M xi, n1) conj(Ifrak*(M xi, n2)) e(-x xi) dxi``."""
    om = ctx.omega
    lo, hi = om.support
    _check_regime(ctx, 2.0 * np.sqrt(ctx.M * np.array([lo, hi]) * ctx.X) / ctx.q)

    def amp(xi):
        m = ctx.M * np.asarray(xi)
        return om(xi) * _i_star(ctx, m, ctx.n1) * np.conj(_i_star(ctx, m, ctx.n2))

    def freq(xi):
        # Oscillation of the product, from the difference of the two phase shifts.
        h = 1e-6
        m_hi, m_lo = ctx.M * (xi + h), ctx.M * (xi - h)
        diff_hi = _shift(ctx, m_hi, ctx.n1)[0] - _shift(ctx, m_hi, ctx.n2)[0]
        diff_lo = _shift(ctx, m_lo, ctx.n1)[0] - _shift(ctx, m_lo, ctx.n2)[0]
        return np.abs(diff_hi - diff_lo) / (2 * h)

    return oscillatory_integral(
        amp,
        (lambda xi: -2 * math.pi * x * xi) if x else None,
        (lo, hi), tol,
        dphase=(lambda xi: np.full_like(xi, -2 * math.pi * x)) if x else None,
        frequency=freq,
        base_h=min(om.resolution, ctx.V.resolution) / 4,
        breakpoints=om.plateau,
    )


def eval_H_many(xs, ctx: PhaseContext, tol: float = 1e-12) -> np.ndarray:
    return np.array(ordered_map(lambda x: eval_H(float(x), ctx, tol), list(xs)), dtype=np.complex128)

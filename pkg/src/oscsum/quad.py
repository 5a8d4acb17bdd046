"""Smooth windows, special functions and oscillatory quadrature.

The quadrature engine integrates ``amplitude(y) * exp(i * phase(y))`` on
panels no wider than a quarter of the local oscillation period, with a
16-point Gauss-Legendre rule per panel and a coarse/fine panel pair as
the error check. It is the numerical ground truth for every asymptotic
formula elsewhere in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import scipy.special

from .errors import BudgetExceeded, DegenerateSupport, Pole
from .parallel import chunk_bounds, ordered_map, ordered_sum

ArrayFn = Callable[[np.ndarray], np.ndarray]

GL_ORDER = 16
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)
MAX_PANELS = 10**8
_PANEL_CHUNK = 1 << 14


# ---------------------------------------------------------------- windows


def _step(u: np.ndarray) -> np.ndarray:
    """Smooth step from 0 at ``u <= 0`` to 1 at ``u >= 1``.

    ``S(u) = f(u) / (f(u) + f(1 - u))`` with ``f(u) = exp(-1/u)``; all
    derivatives vanish at both ends and ``S(u) + S(1 - u) = 1``.
    """
    u = np.clip(np.asarray(u, dtype=np.float64), 0.0, 1.0)
    inner = (u > 0) & (u < 1)
    out = np.array(u >= 1, dtype=np.float64)
    ui = u[inner]
    # S = 1 / (1 + exp(1/u - 1/(1-u)))
    out[inner] = scipy.special.expit(1.0 / (1.0 - ui) - 1.0 / ui)
    return out


def _step_derivatives(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivatives of :func:`_step` in ``u``."""
    u = np.clip(np.asarray(u, dtype=np.float64), 0.0, 1.0)
    inner = (u > 0) & (u < 1)
    d1 = np.zeros(u.shape)
    d2 = np.zeros(u.shape)
    ui = u[inner]
    g = 1.0 / (1.0 - ui) - 1.0 / ui  # S = expit(g)
    s = scipy.special.expit(g)
    ds = s * (1.0 - s)
    g1 = 1.0 / (1.0 - ui) ** 2 + 1.0 / ui**2
    g2 = 2.0 / (1.0 - ui) ** 3 - 2.0 / ui**3
    d1[inner] = ds * g1
    d2[inner] = ds * ((1.0 - 2.0 * s) * g1**2 + g2)
    return d1, d2


@dataclass(frozen=True)
class SmoothWindow:
    """Compactly supported smooth window with a flat top.

    The window vanishes outside ``[a, b]``, equals 1 on ``[c, d]`` and
    rises and falls monotonically through smooth steps on ``[a, c]`` and
    ``[d, b]``. ``delta`` records the derivative scale: the j-th
    derivative is of size ``delta**j``.
    """

    a: float
    b: float
    c: float
    d: float
    delta: float

    def __post_init__(self) -> None:
        if not (self.a < self.c <= self.d < self.b):
            raise DegenerateSupport(f"need a < c <= d < b, got {self.a}, {self.c}, {self.d}, {self.b}")

    @property
    def support(self) -> tuple[float, float]:
        return (self.a, self.b)

    @property
    def plateau(self) -> tuple[float, float]:
        return (self.c, self.d)

    @property
    def resolution(self) -> float:
        """Panel width that resolves the narrower transition."""
        return min(self.c - self.a, self.b - self.d) / 4

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        up = _step((x - self.a) / (self.c - self.a))
        down = _step((self.b - x) / (self.b - self.d))
        return up * down

    def derivative(self, x, order: int = 1) -> np.ndarray:
        """Derivative of the window; exact for ``order <= 2``, else finite differences."""
        x = np.asarray(x, dtype=np.float64)
        if order == 0:
            return self(x)
        if order <= 2:
            wl, wr = self.c - self.a, self.b - self.d
            ul, ur = (x - self.a) / wl, (self.b - x) / wr
            s_l, s_r = _step(ul), _step(ur)
            dl1, dl2 = _step_derivatives(ul)
            dr1, dr2 = _step_derivatives(ur)
            dl1, dl2 = dl1 / wl, dl2 / wl**2
            dr1, dr2 = -dr1 / wr, dr2 / wr**2
            if order == 1:
                return dl1 * s_r + s_l * dr1
            return dl2 * s_r + 2 * dl1 * dr1 + s_l * dr2
        return finite_difference(self, x, order, 0.02 * min(self.c - self.a, self.b - self.d))

    def integral(self) -> float:
        """Exact integral; each step contributes half its width."""
        return (self.d - self.c) + 0.5 * (self.c - self.a) + 0.5 * (self.b - self.d)

    def total_variation(self) -> float:
        """Total variation; a rise to 1 and a fall back to 0."""
        return 2.0

    def scaled(self, factor: float) -> "SmoothWindow":
        """The window ``x -> W(x / factor)``."""
        return SmoothWindow(self.a * factor, self.b * factor, self.c * factor, self.d * factor, self.delta / factor)


def make_window(a: float, b: float, delta: float) -> SmoothWindow:
    """Window on ``[a, b]`` equal to 1 on ``[a + 1/delta, b - 1/delta]``.

    Raises:
        DegenerateSupport: when ``delta * (b - a) < 4``.
    """
    if not a < b:
        raise DegenerateSupport("need a < b")
    if delta < 1:
        raise ValueError("delta must be at least 1")
    if delta * (b - a) < 4:
        raise DegenerateSupport(f"delta*(b-a) = {delta * (b - a)} < 4 leaves no room for two transitions")
    return SmoothWindow(a, b, a + 1 / delta, b - 1 / delta, delta)


def plateau_window(plateau: tuple[float, float], support: tuple[float, float]) -> SmoothWindow:
    """Window equal to 1 on ``plateau`` and supported on ``support``.

    The transitions may have different widths; ``delta`` is set from the
    narrower one.
    """
    (c, d), (a, b) = plateau, support
    return SmoothWindow(a, b, c, d, 1.0 / min(c - a, b - d))


@dataclass(frozen=True)
class PhaseSpec:
    """The phase ``phi(x) = alpha log x`` or ``alpha x**beta``, in cycles.

    The squared-variable form ``d/dy phi(y**2) = c y**-b`` has
    ``(c, b) = (2 alpha, 1)`` for the logarithm and
    ``(2 alpha beta, 1 - 2 beta)`` for the power.
    """

    kind: str
    alpha: float
    beta: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("log", "power"):
            raise ValueError("kind must be 'log' or 'power'")
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")
        if self.kind == "power":
            if self.beta is None or not 0 < self.beta < 1:
                raise ValueError("power phase needs beta in (0, 1)")
            if self.beta in (0.5, 0.75):
                raise ValueError(f"beta = {self.beta} is excluded")
        elif self.beta is not None:
            raise ValueError("log phase takes no beta")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "log":
            return self.alpha * np.log(x)
        return self.alpha * x**self.beta

    def derivative(self, x, order: int = 1) -> np.ndarray:
        """Exact derivative of any order."""
        x = np.asarray(x, dtype=np.float64)
        if order == 0:
            return self(x)
        if self.kind == "log":
            return self.alpha * (-1) ** (order - 1) * math.factorial(order - 1) * x ** (-order)
        falling = math.prod(self.beta - j for j in range(order))
        return self.alpha * falling * x ** (self.beta - order)

    @property
    def c(self) -> float:
        return 2 * self.alpha if self.kind == "log" else 2 * self.alpha * self.beta

    @property
    def b(self) -> float:
        return 1.0 if self.kind == "log" else 1.0 - 2 * self.beta


def finite_difference(f: ArrayFn, x: np.ndarray, order: int, h: float) -> np.ndarray:
    """Central finite difference of ``f`` of the given order with step ``h``."""
    coeffs = np.array([(-1) ** j * math.comb(order, j) for j in range(order + 1)], dtype=np.float64)
    offsets = (order / 2 - np.arange(order + 1)) * h
    x = np.asarray(x, dtype=np.float64)
    total = sum(c * f(x + o) for c, o in zip(coeffs, offsets))
    return total / h**order


# ---------------------------------------------------------------- Bessel J


@lru_cache(maxsize=None)
def _hankel_plan(order: int) -> tuple[float, np.ndarray]:
    """Threshold and coefficients of the large-argument expansion of ``J_order``.

    Returns ``(z0, a)`` where ``a[k]`` is the k-th Hankel coefficient and
    the truncated series is accurate to double precision for ``z >= z0``.
    """
    mu = 4.0 * order * order
    coeffs = [1.0]
    for k in range(1, 80):
        coeffs.append(coeffs[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    coeffs = np.array(coeffs)
    for z0 in (20.0, 25.0, 30.0, 40.0, 50.0, 60.0, 80.0, 100.0, 125.0, 160.0, 200.0,
               250.0, 320.0, 400.0, 500.0, 640.0, 800.0, 1000.0, 1300.0, 1600.0, 2000.0, 2600.0, 3200.0, 4000.0):
        terms = np.abs(coeffs) / z0 ** np.arange(len(coeffs))
        for k in range(4, len(coeffs)):
            if terms[k] < 1e-17 and np.all(terms[k:] <= terms[k]) and terms[:k].max() <= 4.0:
                return z0, coeffs[:k]
    return math.inf, coeffs[:1]


def _bessel_hankel(order: int, z: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    inv = 1.0 / z
    w = inv * inv
    even = coeffs[0::2] * (-1.0) ** np.arange(len(coeffs[0::2]))
    odd = coeffs[1::2] * (-1.0) ** np.arange(len(coeffs[1::2]))
    p = np.zeros_like(z)
    for c in even[::-1]:
        p = p * w + c
    q = np.zeros_like(z)
    for c in odd[::-1]:
        q = q * w + c
    q *= inv
    shift = (order / 2 + 0.25) * math.pi
    cs, sn = math.cos(shift), math.sin(shift)
    cz, sz = np.cos(z), np.sin(z)
    cos_chi = cz * cs + sz * sn
    sin_chi = sz * cs - cz * sn
    return np.sqrt(2.0 / (math.pi * z)) * (p * cos_chi - q * sin_chi)


def bessel_j(order: int, x) -> np.ndarray | float:
    """Bessel function ``J_order(x)`` for integer ``0 <= order <= 64`` and ``x >= 0``.

    Large arguments use the Hankel expansion summed to double precision;
    the rest go through :func:`scipy.special.jv`.
    """
    if not 0 <= order <= 64 or int(order) != order:
        raise ValueError("order must be an integer in [0, 64]")
    scalar = np.ndim(x) == 0
    z = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(z < 0):
        raise ValueError("bessel_j needs x >= 0")
    z0, coeffs = _hankel_plan(int(order))
    out = np.empty_like(z)
    big = z >= z0
    if np.any(big):
        out[big] = _bessel_hankel(int(order), z[big], coeffs)
    if not np.all(big):
        out[~big] = scipy.special.jv(order, z[~big])
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------- Gamma


def _check_poles(z: np.ndarray) -> None:
    re, im = z.real, z.imag
    if np.any((im == 0) & (re <= 0) & (re == np.round(re))):
        raise Pole("Gamma has a pole at a nonpositive integer")


def log_gamma(z) -> np.ndarray | complex:
    """Principal-branch ``log Gamma(z)`` (continuous off the negative real axis)."""
    arr = np.asarray(z, dtype=np.complex128)
    _check_poles(np.atleast_1d(arr))
    out = scipy.special.loggamma(arr)
    return complex(out) if np.ndim(z) == 0 else out


def complex_gamma(z) -> np.ndarray | complex:
    """``Gamma(z)`` for complex ``z``.

    Raises:
        Pole: at nonpositive integers.
    """
    arr = np.asarray(z, dtype=np.complex128)
    _check_poles(np.atleast_1d(arr))
    real = arr.imag == 0
    out = np.where(real, scipy.special.gamma(np.where(real, arr.real, 1.0)), 0.0).astype(np.complex128)
    if not np.all(real):
        out = np.where(real, out, np.exp(scipy.special.loggamma(np.where(real, 1.0, arr))))
    return complex(out) if np.ndim(z) == 0 else out


# ---------------------------------------------------------------- quadrature


@dataclass(frozen=True)
class QuadResult:
    """Value of an oscillatory integral with its coarse/fine check."""

    value: complex
    error_estimate: float
    panels: int


def _frequency_profile(
    interval: tuple[float, float],
    dphase: ArrayFn | None,
    frequency: ArrayFn | None,
    probes: int,
) -> tuple[np.ndarray, np.ndarray]:
    a, b = interval
    y = np.linspace(a, b, probes)
    nu = np.zeros(probes)
    if dphase is not None:
        nu += np.abs(np.asarray(dphase(y), dtype=np.float64)) / (2 * math.pi)
    if frequency is not None:
        nu += np.abs(np.asarray(frequency(y), dtype=np.float64))
    return y, nu


def _mesh(a: float, b: float, density: Callable[[float, float], tuple[np.ndarray, np.ndarray]], count_scale: int):
    y, rho = density(a, b)
    cell = np.maximum(rho[:-1], rho[1:])
    cum = np.concatenate([[0.0], np.cumsum(cell * np.diff(y))])
    panels = max(1, int(math.ceil(cum[-1] - 1e-9))) * count_scale
    if panels > MAX_PANELS:
        raise BudgetExceeded(f"{panels} panels needed, budget is {MAX_PANELS}")
    targets = np.linspace(0.0, cum[-1], panels + 1)
    edges = np.interp(targets, cum, y)
    edges[0], edges[-1] = a, b
    return edges


def _integrate_mesh(edges: np.ndarray, amplitude: ArrayFn, phase: ArrayFn | None) -> complex:
    """Gauss-Legendre sum over panels, reduced in fixed chunk order."""
    n = len(edges) - 1

    def chunk(bounds: tuple[int, int]) -> complex:
        lo, hi = bounds
        left, right = edges[lo:hi], edges[lo + 1 : hi + 1]
        mid, half = 0.5 * (left + right), 0.5 * (right - left)
        y = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
        f = np.asarray(amplitude(y))
        if phase is not None:
            f = f * np.exp(1j * np.asarray(phase(y)))
        return complex(np.sum(w * f))

    parts = ordered_map(chunk, chunk_bounds(n, _PANEL_CHUNK))
    return complex(ordered_sum(parts))


def oscillatory_integral(
    amplitude: ArrayFn,
    phase: ArrayFn | None,
    interval: tuple[float, float],
    target_tol: float = 1e-10,
    *,
    dphase: ArrayFn | None = None,
    frequency: ArrayFn | None = None,
    base_h: float | None = None,
    breakpoints: Sequence[float] = (),
    max_refinements: int = 8,
    full_result: bool = False,
):
    """Integrate ``amplitude(y) * exp(i * phase(y))`` over ``interval``.

    Args:
        amplitude: Vectorized real or complex amplitude.
        phase: Vectorized real phase in radians, or ``None`` for zero phase.
        interval: Integration limits ``(a, b)``.
        target_tol: Absolute tolerance for the coarse/fine agreement.
        dphase: Derivative of ``phase``; estimated by differences if omitted.
        frequency: Extra oscillation carried by the amplitude, in cycles
            per unit length (for example from a Bessel factor).
        base_h: Largest panel width, resolving the amplitude itself.
        breakpoints: Points that must be panel edges (kinks, window corners).
        full_result: Return a :class:`QuadResult` instead of the value.

    Panels of the returned estimate are never wider than
    ``min(base_h, 1 / (4 * nu))`` where ``nu`` is the local frequency in
    cycles per unit. That estimate is compared with one on a mesh with
    half as many panels, and both meshes are doubled until they agree to
    ``target_tol``.

    Raises:
        BudgetExceeded: if more than ``10**8`` panels would be needed.
    """
    a, b = float(interval[0]), float(interval[1])
    if b <= a:
        value = 0j
        return QuadResult(value, 0.0, 0) if full_result else value
    if base_h is None:
        base_h = (b - a) / 64
    if phase is not None and dphase is None:
        step = 1e-6 * max(1.0, abs(a), abs(b))

        def dphase(y):
            return (np.asarray(phase(y + step)) - np.asarray(phase(y - step))) / (2 * step)

    cuts = sorted({a, b, *[float(t) for t in breakpoints if a < t < b]})
    probes_per_unit = 2048 / (b - a)

    def density(lo: float, hi: float):
        probes = int(min(max(65, probes_per_unit * (hi - lo)), 1 << 20))
        y, nu = _frequency_profile((lo, hi), dphase, frequency, probes)
        # Half the final panel density: the finer mesh of the pair obeys
        # width <= min(base_h, 1 / (4 nu)).
        return y, np.maximum(0.5 / base_h, 2.0 * nu)

    def mesh(scale: int) -> np.ndarray:
        pieces = [_mesh(lo, hi, density, scale) for lo, hi in zip(cuts[:-1], cuts[1:])]
        return np.concatenate([pieces[0]] + [p[1:] for p in pieces[1:]])

    coarse = _integrate_mesh(mesh(1), amplitude, phase)
    scale = 2
    for _ in range(max_refinements):
        edges = mesh(scale)
        fine = _integrate_mesh(edges, amplitude, phase)
        err = abs(fine - coarse)
        if err <= target_tol:
            break
        coarse = fine
        scale *= 2
    result = QuadResult(fine, err, len(edges) - 1)
    return result if full_result else result.value


def mellin_transform(W: SmoothWindow, s: complex, target_tol: float = 1e-12) -> complex:
    """``int_0^inf W(x) x**(s-1) dx`` by oscillatory quadrature in ``Im(s) log x``."""
    a, b = W.support
    if a <= 0:
        raise ValueError("window must be supported in (0, inf)")
    sigma, tau = float(np.real(s)), float(np.imag(s))
    return oscillatory_integral(
        lambda x: W(x) * x ** (sigma - 1),
        (lambda x: tau * np.log(x)) if tau else None,
        (a, b),
        target_tol,
        dphase=(lambda x: tau / x) if tau else None,
        base_h=W.resolution,
        breakpoints=W.plateau,
    )

"""The Duke-Friedlander-Iwaniec delta identity and Poisson summation in residue classes.

For a smooth ``w`` supported in ``[Q/2, Q]`` with unit mass,
``delta(n) = sum_q sum*_{a mod q} e(an/q) Delta_q(n)`` with::

    Delta_q(u) = sum_{r >= 1} (qr)**-1 (w(qr) - w(|u| / (qr)))

For ``n != 0`` the two halves both collapse to ``sum_{m | n} w(m)`` and
cancel; for ``n = 0`` the value is the lattice sum ``sum_m w(m)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .arith import coprime_residues, ramanujan_sum
from .errors import TruncationWarning
from .parallel import ordered_map
from .quad import SmoothWindow, oscillatory_integral
from .voronoi import e_rational

R_SLACK = 8


@dataclass(frozen=True)
class DeltaScheme:
    """A modulus scale ``Q`` and a unit-mass weight ``w`` on ``[Q/2, Q]``.

    ``window`` is the unnormalized bump; ``w(x) = window(x) / mass``.
    """

    Q: float
    window: SmoothWindow
    mass: float = field(init=False)

    def __post_init__(self) -> None:
        a, b = self.window.support
        if a <= 0:
            raise ValueError("w must be supported in (0, inf)")
        if a < self.Q / 2 - 1e-12 or b > self.Q + 1e-12:
            raise ValueError(f"w must live in [Q/2, Q] = [{self.Q / 2}, {self.Q}]")
        object.__setattr__(self, "mass", self.window.integral())

    @classmethod
    def standard(cls, Q: float, transition: int | None = None) -> "DeltaScheme":
        """Scheme whose window has integer corners inside ``[Q/2, Q]``.

        With integer corners and the symmetric step profile, the lattice
        sum ``sum_m w(m)`` equals ``int w`` exactly, so ``delta(0) = 1``
        holds to rounding. ``transition`` is the rise/fall length and
        defaults to a third of the support.
        """
        a, b = math.ceil(Q / 2), math.floor(Q)
        if b - a < 2:
            raise ValueError("Q too small for an integer-cornered window")
        L = transition if transition is not None else max(1, (b - a) // 3)
        if not 1 <= L <= (b - a) // 2:
            raise ValueError(f"transition {L} does not fit in [{a}, {b}]")
        return cls(Q, SmoothWindow(a, b, a + L, b - L, 1.0 / L))

    def w(self, x) -> np.ndarray:
        return self.window(x) / self.mass

    @property
    def q_max(self) -> int:
        return math.floor(self.window.support[1])

    def r_max(self, q: int) -> int:
        return math.floor(self.Q / q) + R_SLACK

    def lattice_sum(self) -> float:
        """``sum_m w(m)``; the exact value of ``delta(0)`` for this scheme."""
        a, b = self.window.support
        m = np.arange(max(1, math.ceil(a)), math.floor(b) + 1)
        return float(np.sum(self.w(m)))

    def delta_q(self, q: int, u, r_max: int | None = None) -> np.ndarray:
        """``Delta_q(u)`` with the r-sum cut at ``r_max`` (default :meth:`r_max`).

        The default cut is exact for ``|u| <= Q**2 / 2``; larger ``|u|``
        need ``r`` up to ``2|u| / (qQ)``.
        """
        u = np.abs(np.atleast_1d(np.asarray(u, dtype=np.float64)))
        r = np.arange(1, (r_max or self.r_max(q)) + 1, dtype=np.float64)
        qr = q * r
        head = float(np.sum(self.w(qr) / qr))
        tail = np.sum(self.w(u[:, None] / qr[None, :]) / qr[None, :], axis=1)
        return head - tail

    def delta_q_limit(self, q: int) -> float:
        """Limit of ``Delta_q(u)`` as ``|u| -> inf``."""
        r = np.arange(1, self.r_max(q) + 1, dtype=np.float64)
        head = float(np.sum(self.w(q * r) / (q * r)))
        lo, hi = self.window.support
        log_moment = oscillatory_integral(lambda y: self.w(y) / y, None, (lo, hi), 1e-15,
                                          base_h=self.window.resolution, breakpoints=self.window.plateau)
        return head - log_moment.real / q


def _check_range(n: int, scheme: DeltaScheme) -> None:
    # Second half needs qr <= 2|n|/Q; the r-cut covers qr <= Q + R_SLACK q.
    if 2 * abs(n) / scheme.Q > scheme.Q:
        warnings.warn(f"|n| = {abs(n)} is outside the detection range of Q = {scheme.Q}",
                      TruncationWarning, stacklevel=3)


def dfi_delta(n: int, scheme: DeltaScheme) -> float:
    """``sum_q sum*_a e(an/q) Delta_q(n)``, summing the a-sums as exponentials.

    Warns:
        TruncationWarning: when ``|n|`` is beyond the range the q and r cuts cover.
    """
    _check_range(n, scheme)

    def term(q: int) -> complex:
        a = np.asarray(coprime_residues(q), dtype=np.int64)
        return complex(np.sum(e_rational(a * n, q))) * float(scheme.delta_q(q, n)[0])

    parts = ordered_map(term, range(1, scheme.q_max + 1))
    return float(np.sum(parts).real)


def dfi_delta_ramanujan(n: int, scheme: DeltaScheme) -> float:
    """Same sum with the a-sums replaced by exact Ramanujan sums."""
    _check_range(n, scheme)
    total = 0.0
    for q in range(1, scheme.q_max + 1):
        total += ramanujan_sum(n, q) * float(scheme.delta_q(q, n)[0])
    return total


# ---------------------------------------------------------------- g(q, zeta)


@dataclass(frozen=True)
class GReport:
    """Numerical ``g(q, zeta)`` on a grid with simple shape diagnostics."""

    q: int
    Q: float
    zetas: np.ndarray
    values: np.ndarray
    near_one: float
    decay_ratio: float
    decreasing: bool


def g_value(scheme: DeltaScheme, q: int, zeta: float, spread: float = 40.0, tol: float = 1e-10) -> complex:
    """``g(q, zeta) = int (Delta_q(u) - Delta_q(inf)) e(-u zeta / (qQ)) du`` for ``zeta != 0``.

    ``Delta_q`` is even, so the transform is twice a cosine integral over
    ``0 <= u <= spread * qQ``; beyond that ``Delta_q`` sits at its limit
    up to a smooth Riemann-sum error.
    """
    scale = q * scheme.Q
    limit = scheme.delta_q_limit(q)
    U = spread * scale
    r_cut = max(scheme.r_max(q), math.ceil(2 * U / scale) + R_SLACK)
    res = oscillatory_integral(
        lambda u: 2.0 * (scheme.delta_q(q, u, r_cut) - limit),
        lambda u: -2 * math.pi * u * zeta / scale,
        (0.0, U),
        tol,
        dphase=lambda u: np.full_like(u, -2 * math.pi * zeta / scale),
        base_h=scheme.window.resolution / 4,
    )
    return complex(res.real, 0.0)


def g_properties_check(scheme: DeltaScheme, q: int, zetas) -> GReport:
    """Evaluate ``g(q, .)`` on ``zetas`` and summarize its size.

    ``near_one`` is ``|g - 1|`` at the smallest ``|zeta|`` of the grid,
    ``decay_ratio`` is ``|g|`` at the largest ``|zeta|`` over ``|g|`` at the
    grid point nearest ``|zeta| = 1``, and ``decreasing`` records whether
    the running maximum of ``|g|`` beyond ``|zeta| = 1`` is non-increasing.
    """
    if q > 2 * scheme.Q:
        raise ValueError("q must be at most 2Q")
    zetas = np.asarray(sorted(zetas, key=abs), dtype=np.float64)
    if np.any(zetas == 0):
        raise ValueError("g is evaluated away from zeta = 0")
    values = np.array(ordered_map(lambda z: g_value(scheme, q, float(z)), zetas))
    mags = np.abs(values)
    near_one = float(abs(values[0] - 1))
    one = int(np.argmin(np.abs(np.abs(zetas) - 1)))
    decay_ratio = float(mags[-1] / mags[one]) if mags[one] > 0 else math.inf
    beyond = mags[np.abs(zetas) >= 1]
    envelope = np.maximum.accumulate(beyond[::-1])[::-1] if beyond.size else beyond
    decreasing = bool(np.all(np.diff(envelope) <= 1e-12))
    return GReport(q, scheme.Q, zetas, values, near_one, decay_ratio, decreasing)


# ---------------------------------------------------------------- Poisson


def fourier_transform(h: SmoothWindow, xi: float, tol: float = 1e-14) -> complex:
    """``h_hat(xi) = int h(x) e(-x xi) dx``."""
    return oscillatory_integral(
        h, (lambda x: -2 * math.pi * xi * x) if xi else None, h.support, tol,
        dphase=(lambda x: np.full_like(x, -2 * math.pi * xi)) if xi else None,
        base_h=h.resolution, breakpoints=h.plateau,
    )


@dataclass(frozen=True)
class PoissonResult:
    lattice: float
    dual: float
    defect: float
    dual_terms: int


def poisson_congruence_check(h: SmoothWindow, d: int, M: float, r: int, cutoff: float = 1e-12) -> PoissonResult:
    """Both sides of ``sum_{m = r mod d} h(m/M) = (M/d) sum_j e(jr/d) h_hat(jM/d)``.

    The dual sum runs over ``j >= 0`` using ``h_hat(-xi) = conj(h_hat(xi))``
    and stops after two consecutive ``|h_hat| < cutoff``.
    """
    if d < 1 or d > 10**4:
        raise ValueError("d must lie in [1, 10**4]")
    lo, hi = h.support
    first = math.ceil(lo * M)
    first += (r - first) % d
    m = np.arange(first, math.floor(hi * M) + 1, d)
    lattice = float(np.sum(h(m / M)))
    total = fourier_transform(h, 0.0).real
    j, quiet = 0, 0
    while quiet < 2:
        j += 1
        hat = fourier_transform(h, j * M / d)
        total += 2.0 * (complex(e_rational(j * r, d)) * hat).real
        quiet = quiet + 1 if abs(hat) < cutoff else 0
    dual = M / d * total
    return PoissonResult(lattice, dual, abs(lattice - dual), j)


__all__ = [
    "DeltaScheme", "dfi_delta", "dfi_delta_ramanujan", "GReport", "g_value",
    "g_properties_check", "fourier_transform", "PoissonResult", "poisson_congruence_check",
]

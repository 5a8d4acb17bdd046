"""Fast self-test: small-scale oracles for each module, run by ``verify-all fast``."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import scipy.special

from . import exppair, forms
from .acceptance import VORONOI_WINDOW, CriterionResult, _timed
from .deltamethod import DeltaScheme, dfi_delta, poisson_congruence_check
from .phase import second_derivative_bound_check, stationary_leading_term
from .quad import PhaseSpec, bessel_j, complex_gamma, make_window, oscillatory_integral
from .twist import GammaFactor, TwistSpec, eval_twist_sum, gamma_factor
from .voronoi import VoronoiInstance, voronoi_check


def _with_fault(table: forms.FourierTable) -> forms.FourierTable:
    values = table.values.copy()
    values[2] *= 1 + 1e-6
    return forms.FourierTable(table.weight, values)


def _forms(fault: str | None):
    def body(r: CriterionResult) -> None:
        ref = forms.q_expansion_reference(12, 5)
        r.add("delta_coefficients", float(ref[2:6] != [-24, 252, -1472, 4830]), 0.0)
        table = forms.build_eigenform(12, 20_000)
        if fault == "coefficients":
            table = _with_fault(table)
        rep = forms.verify_hecke(table)
        r.add("hecke_defect", max(rep.max_multiplicativity_defect, rep.max_hecke_defect, rep.max_deligne_excess), 1e-10)
        ref16 = forms.q_expansion_reference(16, 200)
        raw = forms.build_eigenform(16, 200).raw_coefficients()
        exact = np.array([float(a) for a in ref16[1:]])
        r.add("engine_vs_reference_w16", float(np.max(np.abs(raw[1:] - exact) / np.maximum(np.abs(exact), 1.0))), 1e-12)

    return body


def _quad(r: CriterionResult) -> None:
    series = sum((-1) ** m * 0.5 ** (2 * m + 11) / (math.factorial(m) * math.factorial(m + 11)) for m in range(40))
    r.add("bessel_series", abs(bessel_j(11, 1.0) / series - 1), 1e-12)
    r.add("bessel_large_argument", abs(bessel_j(11, 500.0) / scipy.special.jv(11, 500.0) - 1), 1e-12)
    r.add("gamma_integer", abs(complex_gamma(5) - 24), 1e-12)
    r.add("gamma_half", abs(complex_gamma(0.5) - math.sqrt(math.pi)), 1e-14)
    w = make_window(1.0, 2.0, 4.0)
    value = oscillatory_integral(w, lambda y: 1e4 * y, w.support, 1e-12, dphase=lambda y: np.full_like(y, 1e4))
    r.add("nonstationary_integral", abs(value), 1e-8)


def _voronoi(r: CriterionResult) -> None:
    table = forms.build_eigenform(12, 20_000)
    res = voronoi_check(VoronoiInstance(table, 3, 1, 50.0, VORONOI_WINDOW))
    r.add("voronoi_defect", res.defect, 1e-6)


def _delta(r: CriterionResult) -> None:
    scheme = DeltaScheme.standard(30)
    worst = max(abs(dfi_delta(n, scheme) - (n == 0)) for n in range(-5, 6))
    r.add("dfi_defect", worst, 1e-7)
    r.add("poisson_defect", poisson_congruence_check(make_window(1.0, 2.0, 4.0), 7, 50.0, 3).defect, 1e-9)


def _phase(r: CriterionResult) -> None:
    w = make_window(1.0, 2.0, 4.0)
    H = 1e3
    rep = stationary_leading_term(w, lambda y: H * (y - 1.5) ** 2, lambda y: 2 * H * (y - 1.5), lambda y: np.full_like(y, 2 * H))
    r.add("quadratic_leading_term", rep.ratio_defect, 0.02)
    w0 = make_window(-1.0, 1.0, 4.0)
    rep = second_derivative_bound_check(w0, lambda y: 50 * y * y, lambda y: 100 * y, lambda y: np.full_like(y, 100.0), 100.0)
    r.add("second_derivative_ratio", rep.ratio, 8.0)


def _twist(r: CriterionResult) -> None:
    r.add("gamma_center_modulus", abs(abs(gamma_factor(0.5, GammaFactor(16, 12))) - 1), 1e-12)
    f, g = forms.build_eigenform(12, 100), forms.build_eigenform(16, 100)
    phase = PhaseSpec("log", 1.0)
    window = make_window(1.0, 2.0, 4.0)
    S = eval_twist_sum(f, g, TwistSpec(phase, 5.0, 10.0, window))
    hand = sum(f[n] * g[n] * window(n / 10) * np.exp(2j * math.pi * 5 * math.log(n / 10)) for n in range(11, 20))
    r.add("twist_hand_sum", abs(S - hand), 1e-12)


def _exppair(r: CriterionResult) -> None:
    image = exppair.a_process(exppair.BOURGAIN)
    r.add("A_process_image", float((image.p, image.q) != (Fraction(13, 194), Fraction(76, 97))), 0.0)
    r.add("balance_delta", float(exppair.balance_delta() != Fraction(1, 356)), 0.0)


def run_fast(fault: str | None = None) -> list[CriterionResult]:
    """Run every fast check; ``fault='coefficients'`` perturbs one eigenvalue first."""
    suites = [
        ("forms.verify_hecke", _forms(fault)),
        ("quad.oscillatory_integral", _quad),
        ("voronoi.voronoi_check", _voronoi),
        ("deltamethod.dfi_delta", _delta),
        ("phase.stationary_leading_term", _phase),
        ("twist.eval_twist_sum", _twist),
        ("exppair.a_process", _exppair),
    ]
    return [_timed(i + 1, name, None, body, label="check") for i, (name, body) in enumerate(suites)]

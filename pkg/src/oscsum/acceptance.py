"""Release criteria: thirteen end-to-end numerical checks with fixed thresholds.

Each ``criterion_N`` returns a :class:`CriterionResult` whose ``rows`` hold
only deterministic numbers, so their CSV rendering is identical for any
thread count. Wall-clock time is kept apart in ``seconds``.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import exppair, forms
from .arith import coprime_residues
from .deltamethod import DeltaScheme, dfi_delta
from .phase import (
    PhaseContext,
    DecayParams,
    eval_H,
    eval_paper_integrals,
    h_critical_scale,
    i_frak_leading,
    nonstationary_decay_check,
    second_derivative_bound_check,
    stationary_leading_term,
)
from .quad import PhaseSpec, make_window
from .twist import (
    GammaFactor,
    dirichlet_sup,
    gamma_factor,
    gl5_partial_sum_check,
    l_value_rankin,
    theorem1_harness,
)
from .voronoi import VoronoiInstance, phi_h_asymptotic, phi_h_exact, resonance_sum, voronoi_check

ALL_WEIGHTS = forms.SUPPORTED_WEIGHTS
PAIR = (12, 16)
# Table length for every check that needs the pair (12, 16); one build serves all.
PAIR_LENGTH = 4 * 10**6


@dataclass(frozen=True)
class Check:
    """One measured quantity against its threshold (``passed`` is the verdict)."""

    name: str
    measured: float
    threshold: float
    passed: bool


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list[Check] = field(default_factory=list)
    budget: float | None = None
    seconds: float = 0.0
    notes: list[str] = field(default_factory=list)
    label: str = "criterion"

    def add(self, name: str, measured: float, threshold: float, passed: bool | None = None, upper: bool = True) -> None:
        if passed is None:
            passed = measured <= threshold if upper else measured >= threshold
        self.checks.append(Check(name, float(measured), float(threshold), bool(passed)))

    @property
    def checks_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def within_budget(self) -> bool:
        return self.budget is None or self.seconds <= self.budget

    @property
    def passed(self) -> bool:
        return self.checks_passed and self.within_budget

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        worst = next((c for c in self.checks if not c.passed), None)
        detail = f"{worst.name}: {worst.measured:.4g} vs {worst.threshold:.4g}" if worst else f"{len(self.checks)} checks"
        budget = f", {self.seconds:.1f}s" + (f" of {self.budget:.0f}s" if self.budget else "")
        return f"[{verdict}] {self.label} {self.number:2d} {self.title}: {detail}{budget}"


def _timed(
    number: int, title: str, budget: float | None, body: Callable[[CriterionResult], None], label: str = "criterion"
) -> CriterionResult:
    result = CriterionResult(number, title, budget=budget, label=label)
    start = time.perf_counter()
    body(result)
    result.seconds = time.perf_counter() - start
    return result


_PAIR_CACHE: dict[int, forms.FourierTable] = {}


def pair_tables(length: int = PAIR_LENGTH) -> tuple[forms.FourierTable, forms.FourierTable]:
    """Weight 12 and 16 tables, loaded once per process through the disk cache."""
    for w in PAIR:
        if w not in _PAIR_CACHE or _PAIR_CACHE[w].N < length:
            _PAIR_CACHE[w] = forms.load_eigenform(w, length)
    return tuple(_PAIR_CACHE[w].truncate(length) for w in PAIR)


# ---------------------------------------------------------------- 1


def criterion_1() -> CriterionResult:
    def body(r: CriterionResult) -> None:
        ref = forms.q_expansion_reference(12, 5)
        for n, want in ((2, -24), (3, 252), (5, 4830)):
            r.add(f"delta_a({n})", ref[n], want, ref[n] == want)
        table = forms.build_eigenform(12, 100)
        raw = table.raw_coefficients()
        r.add("engine_matches_reference", max(abs(raw[n] - ref[n]) for n in (2, 3, 5)), 0.0)
        for w in ALL_WEIGHTS:
            rep = forms.verify_hecke(forms.build_eigenform(w, 10**6), 1e-10)
            worst = max(rep.max_multiplicativity_defect, rep.max_hecke_defect, rep.max_deligne_excess)
            r.add(f"verify_hecke_w{w}", worst, 1e-10)

    return _timed(1, "coefficient correctness", 60.0, body)


# ---------------------------------------------------------------- 2

VORONOI_WINDOW = make_window(0.5, 4.5, 1.0)


def criterion_2() -> CriterionResult:
    def body(r: CriterionResult) -> None:
        for w in PAIR:
            table = forms.load_eigenform(w, 200_000)
            worst = 0.0
            for q in range(1, 9):
                for a in (coprime_residues(q) if q > 1 else [0]):
                    for X in (25.0, 50.0, 100.0):
                        with warnings.catch_warnings():
                            warnings.simplefilter("error")
                            res = voronoi_check(VoronoiInstance(table, q, a, X, VORONOI_WINDOW))
                        worst = max(worst, res.defect)
            r.add(f"max_defect_w{w}", worst, 1e-6)

    return _timed(2, "Voronoi identity", 300.0, body)


# ---------------------------------------------------------------- 3


def criterion_3() -> CriterionResult:
    def body(r: CriterionResult) -> None:
        h = make_window(1.0, 2.0, 4.0)
        xs = np.geomspace(1e2, 1e4, 9)
        exact = [phi_h_exact(x, h, 12, 1e-14) for x in xs]
        for J in (0, 1, 2):
            err = [abs(e - phi_h_asymptotic(x, h, 12, J, 1e-15)) for e, x in zip(exact, xs)]
            slope = float(np.polyfit(np.log(xs), np.log(err), 1)[0])
            r.add(f"slope_J{J}", slope, -(J / 2 + 0.75) + 0.1)

    return _timed(3, "Bessel expansion error order", None, body)


# ---------------------------------------------------------------- 4


def criterion_4() -> CriterionResult:
    def body(r: CriterionResult) -> None:
        f, _ = pair_tables()
        V = make_window(1.0, 2.0, 4.0)
        Xs = (1e4, 4e4, 1.6e5)
        worst_ratio, worst_ratio_exp, largest = 0.0, 0.0, 0.0
        for q in (1, 2, 3):
            scaled, scaled_exp = [], []
            for X in Xs:
                res = resonance_sum(f, q, X, V)
                scaled.append(res.residual / (q * X) ** 0.25)
                scaled_exp.append(res.residual_expansion / (q * X) ** 0.25)
            largest = max(largest, max(scaled))
            worst_ratio = max(worst_ratio, max(b / a for a, b in zip(scaled, scaled[1:])))
            worst_ratio_exp = max(worst_ratio_exp, max(b / a for a, b in zip(scaled_exp, scaled_exp[1:])))
        r.add("max_consecutive_ratio", worst_ratio, 1.6)
        r.add("max_scaled_residual", largest, math.inf, math.isfinite(largest))
        # Diagnostic only: the same statistic with the Bessel-expansion constant (1+i)/2.
        r.notes.append(f"expansion-constant main term: max consecutive ratio {worst_ratio_exp:.4g}")
        r.checks.append(Check("diagnostic_ratio_expansion_constant", worst_ratio_exp, 1.6, True))

    return _timed(4, "resonance main term", None, body)


# ---------------------------------------------------------------- 5


def criterion_5() -> CriterionResult:
    def body(r: CriterionResult) -> None:
        schemes = (DeltaScheme.standard(30), DeltaScheme.standard(30, transition=2))
        values = [[dfi_delta(n, s) for n in range(-20, 21)] for s in schemes]
        for i, vals in enumerate(values):
            worst = max(abs(v - (1.0 if n == 0 else 0.0)) for n, v in zip(range(-20, 21), vals))
            r.add(f"max_defect_window{i + 1}", worst, 1e-7)
        r.add("window_agreement", max(abs(a - b) for a, b in zip(*values)), 2e-7)

    return _timed(5, "delta-method identity", 60.0, body)


# ---------------------------------------------------------------- 6


def cubic_phase(H: float):
    """``H ((y - 3/2)**2 + (y - 3/2)**3)`` with two derivatives."""
    return (
        lambda y: H * ((y - 1.5) ** 2 + (y - 1.5) ** 3),
        lambda y: H * (2 * (y - 1.5) + 3 * (y - 1.5) ** 2),
        lambda y: H * (2 + 6 * (y - 1.5)),
    )


def criterion_6() -> CriterionResult:
    def body(r: CriterionResult) -> None:
        w = make_window(1.0, 2.0, 4.0)
        Hs = np.array([1e3, 1e4, 1e5])
        defects = [stationary_leading_term(w, *cubic_phase(H)).ratio_defect for H in Hs]
        slope = float(np.polyfit(np.log(Hs), np.log(defects), 1)[0])
        r.add("leading_term_defect_slope", abs(slope + 1), 0.15)

        w0 = make_window(-1.0, 1.0, 4.0)
        worst = 0.0
        for lam in (1e1, 1e2, 1e3, 1e4):
            rep = second_derivative_bound_check(
                w0, lambda y: lam * y * y / 2, lambda y: lam * y, lambda y: np.full_like(y, lam), lam
            )
            worst = max(worst, rep.ratio)
        r.add("second_derivative_constant", worst, 8.0)

        Rs = np.array([1e2, 1e3, 1e4])
        mags = []
        for R in Rs:
            rep = nonstationary_decay_check(
                w, lambda y: R * y, lambda y: np.full_like(y, R), DecayParams(Q=1, U=0.25, Y=1, Z=1, R=R), A=3
            )
            mags.append(abs(rep.integral))
        decay = float(np.polyfit(np.log(Rs), np.log(mags), 1)[0])
        r.add("nonstationary_decay_slope", decay, -3.0)

    return _timed(6, "stationary-phase estimates", None, body)


# ---------------------------------------------------------------- 7

H_CONSTANT = 20.0


def h_context(n2: float) -> PhaseContext:
    """Correlation-integral setting with ``D/t`` in ``[0.28, 0.61]`` over ``supp omega``."""
    return PhaseContext(
        q=100, Q=100.0, zeta=1.0, t=1e4, X=1e6, m=30625, n=625,
        phase=PhaseSpec("log", 1 / (2 * math.pi)), n1=625, n2=n2, M=30625,
    )


def criterion_7() -> CriterionResult:
    def body(r: CriterionResult) -> None:
        t, X, q = 1e4, 1e6, 100
        B, D = 0.05 * t, 3098.0
        ctx = PhaseContext(
            q=q, Q=100.0, zeta=1.0, t=t, X=X, m=(D * q / 2) ** 2 / X, n=(B * q / 2) ** 2 / X,
            phase=PhaseSpec("log", 1 / (2 * math.pi)),
        )
        quad = eval_paper_integrals(ctx, "Ifrak", tol=1e-12)
        r.add("stationary_value_defect", abs(quad - i_frak_leading(ctx)), 20 * t**-1.5)

        worst_t, worst_sqrt, worst_far = 0.0, 0.0, 0.0
        for n2 in (625, 675):
            hc = h_context(n2)
            far = 3 * h_critical_scale(hc)
            for x in (0.0, 1.0, 4.0, 16.0, 64.0, far):
                val = abs(eval_H(x, hc))
                worst_t = max(worst_t, val * t)
                if x in (1.0, 4.0, 16.0, 64.0):
                    worst_sqrt = max(worst_sqrt, val * t * math.sqrt(x))
                if x == far:
                    worst_far = max(worst_far, val)
        r.add("H_times_t", worst_t, H_CONSTANT)
        r.add("H_times_t_sqrt_x", worst_sqrt, H_CONSTANT)
        r.add("H_past_critical_scale", worst_far, 1e-8)

    return _timed(7, "stationary value and correlation integral", None, body)


# ---------------------------------------------------------------- 8


def criterion_8() -> CriterionResult:
    def body(r: CriterionResult) -> None:
        f, g = pair_tables()
        for label, phase in (("log", PhaseSpec("log", 1.0)), ("power", PhaseSpec("power", 1.0, 0.4))):
            rep = theorem1_harness(f, g, phase)
            r.add(f"{label}_points", len(rep.points), 20, len(rep.points) == 20)
            r.add(f"{label}_max_c_star", rep.max_c_star, math.inf, math.isfinite(rep.max_c_star))
            r.add(f"{label}_p90_growth_exponent", rep.growth_exponent, 0.05)

    return _timed(8, "twisted sum harness", 600.0, body)


# ---------------------------------------------------------------- 9


def criterion_9() -> CriterionResult:
    def body(r: CriterionResult) -> None:
        f, g = pair_tables()
        # Calibrated once, at t = 64, and reused unchanged below.
        C = dirichlet_sup(f, g, 64.0).normalized
        r.add("calibrated_C", C, math.inf, math.isfinite(C) and C > 0)
        for t in (128.0, 256.0):
            r.add(f"normalized_sup_t{int(t)}", dirichlet_sup(f, g, t).normalized, C)

    return _timed(9, "Dirichlet polynomial supremum", None, body)


# ---------------------------------------------------------------- 10

GL5_RATIO_BOUND = 1.0


def criterion_10() -> CriterionResult:
    def body(r: CriterionResult) -> None:
        f, g = pair_tables()
        lv = l_value_rankin(f, g, target=1e-4)
        r.add("mollifier_agreement", lv.agreement, 1e-4)
        rep = gl5_partial_sum_check(f, g, [1e5, 4e5, 1.6e6], lv.value)
        r.add("max_E_over_X_two_thirds", float(np.max(rep.ratios)), GL5_RATIO_BOUND)
        trend = float(np.polyfit(np.log(rep.Xs), np.log(rep.ratios), 1)[0])
        r.add("ratio_trend_exponent", trend, 0.0)
        r.notes.append(f"fitted error exponent {rep.fitted_exponent:.4f}; L(1) = {lv.value:.10f}")

    return _timed(10, "degree-five partial sums", 300.0, body)


# ---------------------------------------------------------------- 11


def criterion_11() -> CriterionResult:
    def body(r: CriterionResult) -> None:
        target = (Fraction(13, 194), Fraction(76, 97))
        image = exppair.a_process(exppair.BOURGAIN)
        r.add("A_process_image", float((image.p, image.q) != target), 0.0)
        r.add("balance_delta", float(exppair.balance_delta() != Fraction(1, 356)), 0.0)
        best = exppair.optimize(exppair.BALANCE_OBJECTIVE, exppair.generate(6)).best
        r.add("objective_minimizer", float((best.p, best.q) != target), 0.0)

    return _timed(11, "exponent pairs", None, body)


# ---------------------------------------------------------------- 12


def criterion_12() -> CriterionResult:
    def body(r: CriterionResult) -> None:
        gf = GammaFactor(16, 12)
        for t in (50.0, 100.0, 200.0):
            ratio = abs(gamma_factor(1 - 1j * t, gf)) / (t / (2 * math.pi)) ** 2.5
            r.add(f"stirling_modulus_t{int(t)}", abs(ratio - 1), 5 / t)

    return _timed(12, "gamma factor asymptotics", None, body)


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
}


# The operation each criterion exercises, named in failure reports.
OPERATIONS: dict[int, str] = {
    1: "forms.verify_hecke", 2: "voronoi.voronoi_check", 3: "voronoi.phi_h_asymptotic",
    4: "voronoi.resonance_sum", 5: "deltamethod.dfi_delta", 6: "phase.stationary_leading_term",
    7: "phase.eval_H", 8: "twist.theorem1_harness", 9: "twist.dirichlet_polynomial",
    10: "twist.gl5_partial_sum_check", 11: "exppair.optimize", 12: "twist.gamma_factor",
}


def run_criteria(numbers=None) -> list[CriterionResult]:
    return [CRITERIA[k]() for k in (numbers or sorted(CRITERIA))]

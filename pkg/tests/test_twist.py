import math

import numpy as np
import pytest

from oscsum import forms
from oscsum.errors import NotConverged, RangeExceeded, StationaryOutsideSupport
from oscsum.quad import PhaseSpec, make_window
from oscsum.twist import (
    GammaFactor, TwistSpec, default_window, dirichlet_polynomial, dirichlet_sup, eval_sharp_sum, eval_twist_sum,
    gamma_factor, gl5_hyperbola_partial_sum, gl5_partial_sum_check, gl5_partial_sums, l_value_rankin,
    sharpness_cap, stirling_approximation, theorem1_harness, xi_stationary_check,
)

LOG1 = PhaseSpec("log", 1.0)
V = make_window(1, 2, 4)


@pytest.fixture(scope="module")
def small():
    return forms.build_eigenform(12, 2000), forms.build_eigenform(16, 2000)


def test_zero_frequency_is_real(small):
    f, g = small
    S = eval_twist_sum(f, g, TwistSpec(LOG1, 0.0, 300.0, V))
    n = np.arange(301, 600)
    assert S.imag == 0.0
    assert S.real == pytest.approx(float(np.sum(f[n] * g[n] * V(n / 300))), abs=1e-12)


def test_hand_enumeration(small):
    f, g = small
    S = eval_twist_sum(f, g, TwistSpec(LOG1, 5.0, 10.0, V))
    hand = sum(f[n] * g[n] * V(n / 10) * np.exp(2j * math.pi * 5 * math.log(n / 10)) for n in range(11, 20))
    assert abs(S - hand) <= 1e-12


@pytest.mark.parametrize("phase", [LOG1, PhaseSpec("power", 0.7, 0.4)])
def test_conjugation(small, phase):
    f, g = small
    S = eval_twist_sum(f, g, TwistSpec(phase, 37.0, 500.0, V))
    assert eval_twist_sum(f, g, TwistSpec(phase, -37.0, 500.0, V)) == S.conjugate()


def test_twist_requires_three_x(small):
    f, g = small
    with pytest.raises(RangeExceeded):
        eval_twist_sum(f, g, TwistSpec(LOG1, 5.0, 1000.0, V))


def test_window_sharpness_cap():
    with pytest.raises(ValueError):
        TwistSpec(LOG1, 100.0, 1e4, make_window(1, 2, 40))
    assert sharpness_cap(4.0) == 4.0 and sharpness_cap(1e6) == pytest.approx(1000 / math.log(1e6))
    TwistSpec(LOG1, 100.0, 1e4, default_window(100.0))


def test_excluded_power_rejected():
    with pytest.raises(ValueError):
        TwistSpec(PhaseSpec("power", 1.0, 0.5), 64.0, 4096.0, V)


def test_sharp_sum(small):
    f, g = small
    res = eval_sharp_sum(f, g, LOG1, 3.0, 20.0)
    direct = sum(f[n] * g[n] * np.exp(2j * math.pi * 3 * math.log(n / 20)) for n in range(21, 41))
    assert abs(res.sharp - direct) <= 1e-12
    assert abs(res.sharp - res.smoothed) <= res.edge_bound


@pytest.mark.parametrize("t, X", [(50.0, 600.0), (200.0, 650.0)])
def test_sharp_minus_smoothed_within_edges(small, t, X):
    f, g = small
    res = eval_sharp_sum(f, g, PhaseSpec("power", 1.0, 1 / 3), t, X)
    assert abs(res.sharp - res.smoothed) <= res.edge_bound


def test_sharp_sum_empty(small):
    f, g = small
    assert eval_sharp_sum(f, g, LOG1, 3.0, 0.5).sharp == 0


def test_harness_point(pair):
    f, g = pair
    rep = theorem1_harness(f, g, LOG1, [(64.0, 4096.0), (64.0, 8192.0), (64.0, 2.0**20)])
    assert [(p.t, p.X) for p in rep.points] == [(64.0, 4096.0), (64.0, 8192.0)]
    assert rep.skipped == [(64.0, 2.0**20)]
    a, b = rep.points
    assert np.isfinite(a.c_star)
    assert b.c_star <= a.c_star * b.X**0.05


def test_dirichlet_matches_harness_scale(pair):
    f, g = pair
    t, N = 100.0, 1e4
    c = abs(dirichlet_polynomial(f, g, N, t)) / (t**0.4 * N**0.75)
    c_star = theorem1_harness(f, g, PhaseSpec("log", -1 / (2 * math.pi))).max_c_star
    assert c <= c_star


def test_dirichlet_equals_phase_twist(small):
    f, g = small
    t, N = 30.0, 300.0
    spec = TwistSpec(PhaseSpec("log", -1 / (2 * math.pi)), t, N, V)
    assert dirichlet_polynomial(f, g, N, t) == pytest.approx(eval_twist_sum(f, g, spec) * N ** (-1j * t), abs=1e-10)


def test_dirichlet_tiny_length(small):
    f, g = small
    direct = sum(f[n] * g[n] * V(n / 1.0) * n ** (-1j * 10.0) for n in (1, 2))
    assert dirichlet_polynomial(f, g, 1.0, 10.0) == pytest.approx(direct, abs=1e-15)


def test_dirichlet_supremum(pair):
    f, g = pair
    C = dirichlet_sup(f, g, 64.0).sup / 64**0.9
    assert dirichlet_sup(f, g, 256.0).sup <= C * 256**0.9


def test_gamma_center_and_reflection():
    gf = GammaFactor(16, 12)
    assert abs(gamma_factor(0.5, gf)) == pytest.approx(1.0, abs=1e-12)
    for s in (0.3 + 7j, 0.9 - 40j):
        assert gamma_factor(s, gf) * gamma_factor(1 - s, gf) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        GammaFactor(12, 16)


@pytest.mark.parametrize("t", [50.0, 100.0, 200.0])
def test_stirling_modulus(t):
    gf = GammaFactor(16, 12)
    ratio = abs(gamma_factor(1 - 1j * t, gf)) / (t / (2 * math.pi)) ** 2.5
    assert abs(ratio - 1) <= 5 / t


def test_stirling_phase_decays_like_inverse_t():
    gf = GammaFactor(16, 12)
    residual = []
    for t in (100.0, 200.0):
        q = gamma_factor(0.5 + 1j * t, gf) / stirling_approximation(0.5, t, gf)
        residual.append(abs(np.angle(q)) * t)
    assert residual[1] == pytest.approx(residual[0], rel=0.1)


def test_l_value(pair):
    f, g = pair
    target = 1e-4
    lv = l_value_rankin(f, g, target)
    assert lv.agreement <= 2 * target
    half = l_value_rankin(f.truncate(2_000_000), g.truncate(2_000_000), target)
    assert abs(half.value - lv.value) <= target


def test_l_value_guards(pair, small):
    f, _ = pair
    with pytest.raises(ValueError):
        l_value_rankin(f, f)
    with pytest.raises(NotConverged):
        l_value_rankin(*small)


def test_gl5_single_term(small):
    f, g = small
    rep = gl5_partial_sum_check(f, g, [1.0, 10.0], l_value=0.678)
    assert rep.A[0] == pytest.approx(1.0, abs=1e-15)
    assert rep.E[0] == pytest.approx(abs(1 - 0.678))


def test_gl5_matches_hyperbola(small):
    f, g = small
    assert gl5_partial_sums(f, g, [2000.0])[0] == pytest.approx(gl5_hyperbola_partial_sum(f, g, 2000.0), abs=1e-9)


def test_gl5_error_exponent(pair):
    f, g = pair
    lv = l_value_rankin(f, g)
    rep = gl5_partial_sum_check(f, g, [1e5, 4e5, 1.6e6], lv.value)
    assert rep.fitted_exponent <= 0.75


def _nX_for(xi0, T):
    return (xi0 * T / (2 * math.pi)) ** 5


def test_xi_leading_term():
    small = xi_stationary_check(1, _nX_for(1.0, 1e3), 1e3)
    large = xi_stationary_check(1, _nX_for(1.0, 4e3), 4e3)
    assert small.xi0 == pytest.approx(1.0) and small.defect <= 0.05
    assert small.defect / large.defect == pytest.approx(4.0, rel=0.2)


def test_xi_outside_support():
    with pytest.raises(StationaryOutsideSupport):
        xi_stationary_check(1, _nX_for(10.0, 1e3), 1e3)
    rep = xi_stationary_check(1, _nX_for(10.0, 1e3), 1e3, allow_outside=True)
    assert abs(rep.integral) <= 1e-8

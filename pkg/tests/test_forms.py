import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscsum import forms
from oscsum.errors import RangeExceeded, UnsupportedWeight


def _poly_mul(x, y, N):
    out = [0] * (N + 1)
    for i, a in enumerate(x):
        if a:
            for j in range(N + 1 - i):
                out[i + j] += a * y[j]
    return out


def _delta_oracle(N):
    """q * prod_{n<=N} (1 - q**n)**24 by repeated polynomial multiplication."""
    series = [1] + [0] * N
    for n in range(1, N + 1):
        factor = [0] * (N + 1)
        factor[0], factor[n] = 1, -1
        for _ in range(24):
            series = _poly_mul(series, factor, N)
    return [0] + series[:N]


def _e4_oracle(N):
    return [1] + [240 * sum(d**3 for d in range(1, n + 1) if n % d == 0) for n in range(1, N + 1)]


def test_normalization_at_one():
    assert forms.build_eigenform(12, 1).values[1] == 1.0


def test_delta_coefficients_match_product_oracle():
    oracle = _delta_oracle(10)
    raw = forms.build_eigenform(12, 10).raw_coefficients()
    assert [oracle[n] for n in (2, 3, 5)] == [-24, 252, 4830]
    assert np.array_equal(np.rint(raw[1:]), np.array(oracle[1:], dtype=float))


def test_weight16_is_delta_times_e4():
    oracle = _poly_mul(_delta_oracle(10), _e4_oracle(10), 10)
    raw = forms.build_eigenform(16, 10).raw_coefficients()
    assert oracle[2] == 216
    assert np.array_equal(np.rint(raw[1:]), np.array(oracle[1:], dtype=float))


@pytest.mark.parametrize("weight", forms.SUPPORTED_WEIGHTS)
def test_engine_matches_exact_reference(weight):
    ref = np.array([float(a) for a in forms.q_expansion_reference(weight, 300)])
    raw = forms.build_eigenform(weight, 300).raw_coefficients()
    rel = np.abs(raw[1:] - ref[1:]) / np.maximum(np.abs(ref[1:]), 1.0)
    assert rel.max() <= 1e-14


def test_unsupported_weight():
    with pytest.raises(UnsupportedWeight):
        forms.build_eigenform(14, 10)


def test_verify_hecke_delta(delta_table):
    rep = forms.verify_hecke(delta_table.truncate(10_000), 1e-10)
    assert rep.passed
    assert rep.pairs_checked > 0


def test_verify_hecke_detects_fault(delta_table):
    values = delta_table.values[:10_001].copy()
    values[6] += 1e-3 * values[6]
    rep = forms.verify_hecke(forms.FourierTable(12, values), 1e-10)
    assert rep.max_multiplicativity_defect == pytest.approx(1e-3, rel=0.01)
    assert not rep.passed


def test_verify_hecke_trivial_table(delta_table):
    rep = forms.verify_hecke(delta_table.truncate(1))
    assert (rep.max_multiplicativity_defect, rep.max_hecke_defect, rep.max_deligne_excess) == (0.0, 0.0, 0.0)
    assert rep.pairs_checked == 0


def test_rankin_selberg_small(delta_table):
    assert forms.rankin_selberg_partial(delta_table, 1) == 1.0
    assert forms.rankin_selberg_partial(delta_table, 2) == pytest.approx(1 + (24 / 2**5.5) ** 2, rel=1e-15)
    with pytest.raises(RangeExceeded):
        forms.rankin_selberg_partial(delta_table, delta_table.N + 1)


@pytest.mark.slow
def test_rankin_selberg_linear_growth(pair):
    f = pair[0]
    S = lambda X: forms.rankin_selberg_partial(f, X)  # noqa: E731
    X = 10**6
    assert abs(S(2 * X) / (2 * X) - S(X) / X) <= 0.02 * S(X) / X


def test_convolve_gl5_examples(delta_table, w16_table):
    f, g = delta_table, w16_table
    c = forms.convolve_gl5(f, g, 1000)
    assert c[1] == pytest.approx(1.0, abs=1e-15)
    # Triples with l * m**2 * r = 4: (4,1,1), (1,2,1), (1,1,4) and (2,1,2).
    assert c[4] == pytest.approx(f[4] * g[4] + f[2] * g[2] + 2, abs=1e-13)
    for p in (2, 3, 5, 97, 997):
        assert c[p] == pytest.approx(f[p] * g[p] + 1, abs=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3000))
def test_convolve_gl5_brute_force(delta_table, w16_table, n):
    f, g = delta_table, w16_table
    c = forms.convolve_gl5(f, g, 3000)
    want = 0.0
    for m in range(1, math.isqrt(n) + 1):
        if n % (m * m) == 0:
            rest = n // (m * m)
            want += sum(f[r] * g[r] for r in range(1, rest + 1) if rest % r == 0)
    assert c[n] == pytest.approx(want, abs=1e-10)


def test_convolve_gl5_same_form_warns(delta_table):
    with pytest.warns(UserWarning):
        forms.convolve_gl5(delta_table, delta_table, 10)


def test_table_length_does_not_change_values():
    short = forms.build_eigenform(18, 1000)
    long = forms.build_eigenform(18, 5000)
    assert np.array_equal(short.values, long.values[:1001])


def test_cache_round_trip(tmp_path):
    table = forms.build_eigenform(20, 2000)
    path = tmp_path / "t.csv"
    forms.write_table_csv(table, path)
    back = forms.read_table_csv(path)
    assert back.weight == 20 and np.array_equal(back.values, table.values)


def test_load_eigenform_reuses_and_extends_cache(tmp_path):
    first = forms.load_eigenform(22, 500, directory=tmp_path)
    assert (tmp_path / "coeffs_w22.csv").exists()
    again = forms.load_eigenform(22, 300, directory=tmp_path)
    assert np.array_equal(again.values, first.values[:301])
    longer = forms.load_eigenform(22, 800, directory=tmp_path)
    assert np.array_equal(longer.values[:501], first.values)


def test_corrupt_cache_is_rebuilt(tmp_path):
    (tmp_path / "coeffs_w26.csv").write_text("garbage\n1,2\n")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        table = forms.load_eigenform(26, 50, directory=tmp_path)
    assert table.values[1] == 1.0

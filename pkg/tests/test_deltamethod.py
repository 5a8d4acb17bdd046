import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscsum.deltamethod import (
    DeltaScheme, dfi_delta, dfi_delta_ramanujan, g_properties_check, g_value, poisson_congruence_check,
)
from oscsum.errors import TruncationWarning
from oscsum.quad import make_window, plateau_window


@pytest.fixture(scope="module")
def scheme20():
    return DeltaScheme.standard(20)


def test_delta_at_zero(scheme20):
    assert dfi_delta(0, scheme20) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("n", [1, 7, -3])
def test_delta_away_from_zero(scheme20, n):
    assert abs(dfi_delta(n, scheme20)) <= 1e-8


@settings(max_examples=25, deadline=None)
@given(st.integers(-20, 20))
def test_exponential_and_ramanujan_forms_agree(scheme20, n):
    assert dfi_delta(n, scheme20) == pytest.approx(dfi_delta_ramanujan(n, scheme20), abs=1e-12)


def test_lattice_sum_is_exact(scheme20):
    assert scheme20.lattice_sum() == pytest.approx(1.0, abs=1e-14)


def test_scheme_rejects_window_outside_range():
    with pytest.raises(ValueError):
        DeltaScheme(20, make_window(5, 20, 1))


def test_out_of_range_warns(scheme20):
    with pytest.warns(TruncationWarning):
        dfi_delta(1000, scheme20)


@pytest.fixture(scope="module")
def scheme50():
    return DeltaScheme.standard(50)


def test_g_near_one_and_decay(scheme50):
    rep = g_properties_check(scheme50, 1, [0.1, 1.0, 10.0])
    assert rep.near_one <= 0.2
    assert abs(rep.values[-1]) <= abs(rep.values[1]) / 5


def test_g_at_top_modulus_is_finite(scheme50):
    assert np.isfinite(g_value(scheme50, 50, 0.5))


def test_g_rejects_zero(scheme50):
    with pytest.raises(ValueError):
        g_properties_check(scheme50, 1, [0.0, 1.0])


def test_plain_poisson():
    h = make_window(1, 2, 4)
    assert poisson_congruence_check(h, 1, 37.5, 0).defect <= 1e-9


@pytest.mark.parametrize("d, r, M", [(4, 1, 100.0), (7, 3, 500.0)])
def test_poisson_in_residue_classes(d, r, M):
    h = plateau_window((1.2, 1.8), (1.0, 2.0))
    assert poisson_congruence_check(h, d, M, r).defect <= 1e-8

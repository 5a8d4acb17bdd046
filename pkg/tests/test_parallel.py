import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscsum import forms, parallel
from oscsum.quad import PhaseSpec, make_window
from oscsum.twist import TwistSpec, eval_twist_sum


@pytest.fixture
def threads():
    yield parallel.set_threads
    parallel.set_threads(1)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 300_000), st.integers(1, 5000))
def test_blocked_sum_independent_of_threads(n, seed):
    rng = np.random.default_rng(seed)
    data = rng.standard_normal(n) * 10.0 ** rng.integers(-8, 8, n)
    results = []
    for count in (1, 8):
        parallel.set_threads(count)
        results.append(parallel.blocked_sum(lambda a, b: data[a:b], n, 4096))
    parallel.set_threads(1)
    assert results[0] == results[1]


def test_twist_sum_bit_identical(threads):
    f, g = forms.build_eigenform(12, 400_000), forms.build_eigenform(16, 400_000)
    spec = TwistSpec(PhaseSpec("power", 1.0, 0.4), 150.0, 100_000.0, make_window(1, 2, 4))
    threads(1)
    one = eval_twist_sum(f, g, spec)
    threads(8)
    eight = eval_twist_sum(f, g, spec)
    assert one == eight


def test_ordered_map_keeps_order(threads):
    threads(4)
    assert parallel.ordered_map(lambda x: x * x, range(100)) == [x * x for x in range(100)]


def test_bad_thread_count():
    with pytest.raises(ValueError):
        parallel.set_threads(0)


def test_cache_hit_and_cold_path_agree(tmp_path):
    cold = forms.load_eigenform(12, 3000, directory=tmp_path)
    hit = forms.load_eigenform(12, 3000, directory=tmp_path)
    spec = TwistSpec(PhaseSpec("log", 1.0), 20.0, 900.0, make_window(1, 2, 4))
    assert eval_twist_sum(cold, cold, spec) == eval_twist_sum(hit, hit, spec)

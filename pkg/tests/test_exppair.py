from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from oscsum.errors import DenominatorVanishes
from oscsum.exppair import (
    BOURGAIN, BALANCE_OBJECTIVE, SEEDS, TRIVIAL, ExponentPair, LinearFractional, a_process, b_process,
    balance_delta, generate, optimize, solve_balance,
)

fractions = st.fractions(min_value=0, max_value=F(1, 2), max_denominator=500)


def pair(p, q):
    return ExponentPair(F(p), F(q))


def test_a_process_values():
    assert a_process(TRIVIAL) == pair(0, 1)
    assert a_process(BOURGAIN) == pair(F(13, 194), F(76, 97))
    assert a_process(pair(F(1, 2), F(1, 2))) == pair(F(1, 6), F(2, 3))


def test_b_process_values():
    assert b_process(TRIVIAL) == pair(F(1, 2), F(1, 2))
    assert b_process(BOURGAIN) == BOURGAIN


@given(fractions, fractions)
def test_b_is_an_involution(p, dq):
    x = pair(p, F(1, 2) + dq)
    assert b_process(b_process(x)) == x


@given(fractions, fractions)
def test_processes_preserve_admissibility(p, dq):
    x = pair(p, F(1, 2) + dq)
    assert a_process(x).admissible and b_process(x).admissible


def test_generate_depths():
    assert generate(0) == set(SEEDS)
    assert generate(1, [TRIVIAL]) == {pair(0, 1), pair(F(1, 2), F(1, 2))}
    assert pair(F(1, 6), F(2, 3)) in generate(2, [TRIVIAL])
    with pytest.raises(ValueError):
        generate(13)


def test_derivation_word():
    image = a_process(b_process(TRIVIAL))
    assert image.word() == "A B (trivial)"


def test_remark_objective_minimum():
    res = optimize(BALANCE_OBJECTIVE, generate(6))
    assert (res.best.p, res.best.q) == (F(13, 194), F(76, 97))
    assert res.value == F(709, 1068) == F(2, 3) - F(1, 356)
    assert all(v >= res.value for v in res.values.values())


def test_optimize_tie_break_and_trivial_objectives():
    pairs = generate(3)
    assert optimize(lambda p, q: F(1), pairs).best == min(pairs)
    assert optimize(lambda p, q: p, pairs).best.p == 0


def test_optimize_vanishing_denominator():
    with pytest.raises(DenominatorVanishes):
        optimize(LinearFractional.parse("1/1-2p"), [pair(F(1, 2), F(1, 2))])


def test_parse_round_trip():
    obj = LinearFractional.parse("(38+33p-28q)/(58+48p-43q)")
    assert obj == BALANCE_OBJECTIVE
    assert LinearFractional.parse(str(obj)) == obj


def test_balance():
    delta = balance_delta()
    assert delta == F(1, 356)
    assert F(109, 69) * delta + F(91, 138) == F(2, 3) - delta
    assert solve_balance(F(109, 69), F(91, 138), F(2, 3)) == F(1, 138) / F(178, 69)

import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heliosim.errors import IndeterminateError
from heliosim.lattice import build_lattice
from heliosim.macro import (PHASE_TABLE, UNCLASSIFIED, MacroParams, MacroState, PhaseSignature,
                            RoundAggregate, chain_gdp, classify_phase, classify_signature, gdp_of,
                            macro_update, phase_signature, trajectory_metrics)

DOMAINS = [("↔", "↑"), ("0", "+"), ("+", "-"), ("C", "D"), ("0", "+", "-", "↔"), ("0", "+", "-")]


def agg(t, gdp=0.0, r=0.0, w=0.0, coop=0.0, frontier=1.0, ordinary=10.0, space=0.0, degree=1.0,
        spend_k=0.0, spend_l=0.0):
    return RoundAggregate(t, gdp, spend_k, spend_l, r, w, coop, frontier, ordinary, space, degree)


def test_gdp_examples():
    assert gdp_of([0, 0], [0, 0]) == 0
    assert gdp_of([3, 4], [1, 2]) == 10
    assert gdp_of([], []) == 0


def test_chain_gdp_sums_both_sides():
    assert chain_gdp([1.5, 2.5], [0.5]) == 4.5


def test_identical_rounds():
    p = MacroParams()
    prev = MacroState(round=3, gdp=7.0, spend_k=2.0, spend_l=5.0)
    state, scale = macro_update(prev, 7.0, 2.0, 5.0, p)
    assert (state.r_observed, state.w_observed, state.delta_gdp) == (0.0, 0.0, 0.0)
    assert state.rho == pytest.approx(1 + p.alpha_rho * -p.earth_growth)
    assert state.round == 4
    assert scale.rho_scale == state.rho


def test_capital_spend_relative_change():
    state, _ = macro_update(MacroState(spend_k=10.0), 0.0, 12.0, 0.0, MacroParams(0, 0, 0))
    assert state.r_observed == pytest.approx(0.2) and state.r == pytest.approx(0.2)


def test_zero_previous_spend_defines_zero_rate():
    state, _ = macro_update(MacroState(spend_k=0.0), 5.0, 12.0, 3.0)
    assert state.r_observed == 0.0 and state.w_observed == 0.0 and state.delta_gdp == 0.0


def test_three_round_hand_trace():
    p = MacroParams(alpha_r=0.5, alpha_w=0.25, alpha_rho=0.1, earth_growth=0.05)
    rows = [(10.0, 4.0, 2.0), (12.0, 5.0, 2.0), (9.0, 5.0, 4.0)]
    s = MacroState()
    expected = []
    prev = (0.0, 0.0, 0.0)
    for gdp, dk, dl in rows:
        rel = lambda new, old: 0.0 if old == 0 else (new - old) / old  # noqa: E731
        d = rel(gdp, prev[0])
        gap = d - 0.05
        expected.append((d, rel(dk, prev[1]) + 0.5 * gap, rel(dl, prev[2]) + 0.25 * gap,
                         min(max(1 + 0.1 * gap, 0.5), 2.0)))
        prev = (gdp, dk, dl)
    got = []
    for gdp, dk, dl in rows:
        s, _ = macro_update(s, gdp, dk, dl, p)
        got.append((s.delta_gdp, s.r, s.w, s.rho))
    assert got == pytest.approx(expected)
    assert expected[1] == pytest.approx((0.2, 0.25 + 0.075, 0.0 + 0.0375, 1.015))


def test_identity_feedback():
    p = MacroParams(0.0, 0.0, 0.0, 0.0)
    s, scale = macro_update(MacroState(gdp=3.0, spend_k=1.0, spend_l=1.0), 5.0, 2.0, 4.0, p)
    assert s.rho == 1.0 and s.r == s.r_observed and s.w == s.w_observed
    assert scale.rho_scale == 1.0


@settings(max_examples=200, deadline=None)
@given(*[st.floats(0, 1e6)] * 6)
def test_scale_factors_clamped(g0, g1, k0, k1, l0, l1):
    p = MacroParams()
    s, scale = macro_update(MacroState(gdp=g0, spend_k=k0, spend_l=l0), g1, k1, l1, p)
    for x in (scale.r_scale, scale.w_scale, scale.rho_scale):
        assert p.rho_min <= x <= p.rho_max
    assert s.rho > 0


def test_invalid_params():
    with pytest.raises(ValueError):
        MacroParams(rho_min=1.5)
    with pytest.raises(ValueError):
        MacroState(rho=0.0)


def test_positive_rates_raise_chain_costs():
    lat = build_lattice(2)
    _, scale = macro_update(MacroState(gdp=1.0, spend_k=1.0, spend_l=1.0), 2.0, 1.5, 1.5)
    assert scale.r_scale > 1 and scale.w_scale > 1
    after = lat.rescaled(scale)
    for a, b in [(1, 2), (0, 20), (1, 25)]:
        assert after.chain_cost(a, b)[1] > lat.chain_cost(a, b)[1]


def test_constant_history_metrics():
    m = trajectory_metrics([agg(t, gdp=4.0, r=0.1, w=0.2, coop=0.5) for t in range(5)])
    assert (m.grad_h, m.kappa_h, m.d_r, m.d_w, m.strategy_drift, m.market_drift, m.kappa_t) == (0,) * 7
    assert m.potential == 20.0


def test_linear_and_quadratic_gdp():
    lin = trajectory_metrics([agg(t, gdp=2.0 * t + 1) for t in range(6)])
    assert lin.grad_h == 2.0 and lin.kappa_h == 0.0
    quad = trajectory_metrics([agg(t, gdp=3.0 * t * t) for t in range(6)], price_vector=(2.0, 0.5))
    assert quad.kappa_h == pytest.approx(6.0 * 2.0 / 0.5)


def test_short_history_is_indeterminate():
    m = trajectory_metrics([agg(0, gdp=1.0)])
    assert m.grad_h is None and m.kappa_h is None and m.d_r is None
    assert trajectory_metrics([agg(0), agg(1)]).kappa_h is None
    with pytest.raises(IndeterminateError):
        trajectory_metrics([])
    with pytest.raises(ValueError):
        trajectory_metrics([agg(0)], price_vector=(0.0, 1.0))


@pytest.mark.parametrize("row, phase", [
    (("↔", "0", "+", "D", "0", "0"), "I"),
    (("↑", "+", "+", "C", "+", "0"), "II"),
    (("↔", "0", "+", "D", "-", "+"), "III"),
    (("↑", "+", "-", "C", "↔", "-"), "IV"),
])
def test_phase_table_rows(row, phase):
    assert classify_signature(row) == phase
    assert classify_signature(PhaseSignature(*row)) == phase


def test_unicode_minus_is_accepted():
    assert classify_signature(("↑", "+", "−", "C", "↔", "−")) == "IV"


def test_every_other_signature_is_unclassified():
    rows = set(PHASE_TABLE)
    for sig in itertools.product(*DOMAINS):
        assert (classify_signature(sig) == UNCLASSIFIED) == (sig not in rows)
    assert classify_signature(("0",) * 6) == UNCLASSIFIED


def test_signature_extraction():
    window = [agg(t, gdp=float(t), coop=0.8, frontier=1 + t, space=t, ordinary=10 - t, degree=5 - t)
              for t in range(4)]
    assert phase_signature(window).as_tuple() == ("↑", "+", "-", "C", "+", "-")
    flat = [agg(t, gdp=1.0, coop=0.2, ordinary=10 + t) for t in range(5)]
    assert classify_phase(flat) == "I"
    zig = [agg(t, gdp=[1.0, 2.0, 1.5][t], coop=0.9, frontier=1 + t, space=t, ordinary=5 - t, degree=3 - t)
           for t in range(3)]
    assert classify_phase(zig) == "IV"
    assert classify_phase(zig) == classify_phase(list(zig))


def test_tiny_changes_read_as_zero():
    window = [agg(t, gdp=1.0 + 1e-9 * t, ordinary=10 + t) for t in range(3)]
    assert phase_signature(window).game == "0"
    assert phase_signature(window, eps=1e-12).game == "+"


def test_window_needs_three_rounds():
    with pytest.raises(IndeterminateError):
        classify_phase([agg(0), agg(1)])


def test_finite_inputs_give_finite_metrics():
    m = trajectory_metrics([agg(t, gdp=math.sin(t), r=t, w=-t) for t in range(10)])
    assert all(math.isfinite(v) for v in (m.grad_h, m.kappa_h, m.d_r, m.d_w, m.potential))

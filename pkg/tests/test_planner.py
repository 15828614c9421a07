from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from arofsim.ofdm import OfdmConfig
from arofsim.planner import (PLAN_PRESETS, ChannelPlan, allocate, max_feasible_bandwidth,
                             sweep_feasibility)

P100 = PLAN_PRESETS["100G"]
P400 = PLAN_PRESETS["400G"]
BWS = [200e6, 400e6, 800e6, 1.6e9]


class TestPresets:
    def test_free_totals_exact(self):
        assert P100.free_total == 12.36e9
        assert P400.free_total == 17.54e9
        assert P100.free_per_side == 6.18e9
        assert P400.free_per_side == 8.77e9

    def test_raw_rates_exact(self):
        assert OfdmConfig.for_bandwidth(200e6, 128e9).raw_bit_rate == 1.2e9
        assert OfdmConfig.for_bandwidth(1.6e9, 128e9).raw_bit_rate == 9.6e9


class TestAllocate:
    def test_100g_default(self):
        a = allocate(P100)
        assert a.feasible and a.span_per_arof == 5.6e9
        assert a.carrier_offset_high == pytest.approx(37.64e9 / 2 + 3.09e9)
        assert a.carrier_offset_low == -a.carrier_offset_high
        assert a.occupancy_ratio == pytest.approx(1.6 / 50)

    def test_400g_slack(self):
        a = allocate(P400)
        assert a.feasible
        assert a.slack == pytest.approx(3.17e9, abs=1.0)

    def test_100g_2400mhz_infeasible(self):
        a = allocate(replace(P100, arof_bw=2.4e9))
        assert not a.feasible
        assert a.span_per_arof == 6.4e9
        assert a.deficit == pytest.approx(0.22e9, abs=1.0)

    def test_extent_fits_between_edges(self):
        for plan in (P100, P400):
            for bw in BWS:
                a = allocate(replace(plan, arof_bw=bw, guard=0.1e9))
                lo = a.carrier_offset_high - a.span_per_arof / 2
                hi = a.carrier_offset_high + a.span_per_arof / 2
                fits = lo >= a.coherent_edge + 0.1e9 - 1 and hi <= a.channel_edge - 0.1e9 + 1
                assert fits == a.feasible

    def test_guard_reduces_slack(self):
        assert allocate(replace(P100, guard=0.25e9)).slack == pytest.approx(
            allocate(P100).slack - 0.5e9)

    def test_plan_invariants(self):
        with pytest.raises(ValueError):
            ChannelPlan(50e9, 82.46e9)
        with pytest.raises(ValueError):
            ChannelPlan(50e9, 30e9, arof_bw=0)
        with pytest.raises(ValueError):
            ChannelPlan(50e9, 30e9, if_freq=0.5e9, arof_bw=1.6e9)
        with pytest.raises(ValueError):
            ChannelPlan(50e9, 30e9, guard=-1)


class TestSweep:
    def test_max_feasible_closed_form(self):
        assert max_feasible_bandwidth(P400) == pytest.approx(4.77e9, abs=1.0)
        assert max_feasible_bandwidth(P100) == pytest.approx(2.18e9, abs=1.0)

    @pytest.mark.parametrize("plan", [P100, P400])
    def test_table_consistent_with_closed_form(self, plan):
        bws = [b * 1e8 for b in range(1, 60)]
        plan = replace(plan, if_freq=3e9)  # so the list straddles the limit
        table = sweep_feasibility(plan, bws)
        assert any(a.feasible for a in table.rows) and not all(a.feasible for a in table.rows)
        assert len(table.rows) == len(bws)
        for a in table.rows:
            assert a.feasible == (a.plan.arof_bw <= table.max_feasible_bw + 1.0)

    def test_records(self):
        rec = sweep_feasibility(P400, BWS).as_records()
        assert [r["bw_mhz"] for r in rec] == [200, 400, 800, 1600]
        assert all(r["free_total_ghz"] == pytest.approx(17.54) for r in rec)
        assert set(rec[0]) >= {"bw_mhz", "feasible", "free_per_side_ghz", "span_ghz",
                               "slack_ghz", "occupancy_ratio"}

    def test_empty_list(self):
        with pytest.raises(ValueError):
            sweep_feasibility(P100, [])

    def test_occupancy_ordering(self):
        for bw in BWS:
            r50 = allocate(replace(P100, arof_bw=bw)).occupancy_ratio
            r100 = allocate(replace(P400, arof_bw=bw)).occupancy_ratio
            assert r50 > r100


@settings(max_examples=100, deadline=None)
@given(st.floats(20e9, 200e9), st.floats(0.0, 1.0), st.floats(0.5e9, 5e9),
       st.floats(0.01, 0.99), st.floats(0.0, 1e9), st.floats(1.0, 3.0))
def test_monotone_and_symmetric(width, frac, if_freq, bw_frac, guard, grow):
    bw = 2 * if_freq * bw_frac
    plan = ChannelPlan(width, width * frac, if_freq, bw, guard)
    a = allocate(plan)
    assert a.carrier_offset_low == -a.carrier_offset_high
    assert a.free_per_side == pytest.approx((plan.channel_width - plan.coherent_occupied) / 2)
    wider = 2 * if_freq * min(0.999, bw_frac * grow)
    if not a.feasible:
        assert not allocate(replace(plan, arof_bw=max(bw, wider))).feasible

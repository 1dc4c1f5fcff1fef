import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circnoc.analysis import (
    DEFAULT_RESOURCE_MODEL,
    ChipProfile,
    CycleReport,
    QuadraticCost,
    ResourceModel,
    adaptive_memory_bits,
    chip_capacity,
    clockwise_memory_bits,
    cycle_report,
    efficiency_k,
    format_memory_csv,
    max_cycle_count,
    memory_report,
    resource_usage,
    route_cycle_count,
    table_memory_bits,
)
from circnoc.errors import ValidationError
from circnoc.routing import AdaptiveMode, RouterConfig, trace_route
from oracles import dp_min_wraps, ref_ring_profile

C8 = RouterConfig(8, 1, 3)
C16 = RouterConfig(16, 1, 7)
C100 = RouterConfig(100, 1, 44)


# --- efficiency criterion -----------------------------------------------------

@pytest.mark.parametrize("cfg", [C8, C16, C100, RouterConfig(25, 1, 7)])
def test_table_routing_is_always_optimal(cfg):
    report = efficiency_k(cfg, "table")
    assert report.k == 1.0
    assert report.hops_algorithm == report.hops_oracle


def test_clockwise_efficiency_c16():
    report = efficiency_k(C16, "clockwise")
    assert report.hops_algorithm == 46
    assert report.hops_oracle == 34
    assert report.k == 46 / 34
    assert report.source == 0


def test_adaptive_efficiency_within_two_wraps():
    assert max_cycle_count(C100) == 2
    assert efficiency_k(C100, "adaptive").k == 1.0


def test_efficiency_source_parameter():
    for source in (0, 3, 11):
        report = efficiency_k(C16, "clockwise", source=source)
        assert report.source == source
        assert report.k == 46 / 34  # clockwise is translation invariant


def test_adaptive_efficiency_source_invariant_when_optimal():
    for source in range(0, 100, 9):
        assert efficiency_k(C100, "adaptive", source=source).k == 1.0


@given(st.integers(min_value=5, max_value=90), st.data())
@settings(max_examples=25)
def test_efficiency_at_least_one(n, data):
    s2 = data.draw(st.integers(min_value=2, max_value=(n - 1) // 2))
    algorithm = data.draw(st.sampled_from(["table", "clockwise", "adaptive"]))
    source = data.draw(st.integers(min_value=0, max_value=n - 1))
    report = efficiency_k(RouterConfig(n, 1, s2), algorithm, source=source)
    assert report.k >= 1.0


# --- wrap counting --------------------------------------------------------------

def test_route_cycle_count_two_wrap_route():
    trace = trace_route("adaptive", 0, 37, C100)
    assert trace.hops == 7
    assert route_cycle_count(trace) == 2
    assert route_cycle_count(trace, 100) == 2


def test_route_cycle_count_neighbor_is_zero():
    assert route_cycle_count(trace_route("table", 2, 3, C8)) == 0


def test_route_cycle_count_short_route_is_zero():
    assert route_cycle_count(trace_route("table", 0, 4, C8)) == 0


def test_max_cycle_count_examples():
    assert max_cycle_count(C100) == 2
    assert max_cycle_count(C8) == 0


def test_cycle_report_matches_dp_oracle():
    for n in list(range(5, 41)) + [60, 77, 96]:
        for s2 in range(2, (n - 1) // 2 + 1):
            cfg = RouterConfig(n, 1, s2)
            report = cycle_report(cfg)
            assert report.per_destination == tuple(dp_min_wraps(n, s2)), (n, s2)
            assert report.max_cycles == max(report.per_destination)
            assert report.n == n and report.s2 == s2


def test_realized_adaptive_wraps_bound_arithmetic_minimum():
    # the candidate scan's counter-clockwise tie preference may realize a
    # wrapped shortest route where an unwrapped one exists, never the
    # opposite: realized wraps dominate the per-destination minima
    for n, s2 in [(14, 6), (20, 9), (67, 32), (100, 44)]:
        cfg = RouterConfig(n, 1, s2)
        report = cycle_report(cfg)
        mode = AdaptiveMode("corrected", max(2, report.max_cycles))
        profile = ref_ring_profile(n, s2)
        realized = []
        for dst in range(1, n):
            trace = trace_route("adaptive", 0, dst, cfg, mode)
            assert trace.hops == profile[dst]
            wraps = route_cycle_count(trace)
            assert wraps >= report.per_destination[dst]
            realized.append(wraps)
        assert max(realized) >= report.max_cycles


# --- memory formulas -------------------------------------------------------------

def test_table_memory_bits_values():
    assert table_memory_bits(8, 4) == 128
    assert table_memory_bits(100, 4) == 20000
    assert table_memory_bits(9, 4) == 162
    assert table_memory_bits(8, 5) == 192


def test_clockwise_memory_bits_values():
    assert clockwise_memory_bits(8) == 40
    assert clockwise_memory_bits(100) == 1300
    # odd n: storing s2 < 4.5 takes 3 bits
    assert clockwise_memory_bits(9) == 63


def test_adaptive_memory_bits_values():
    assert adaptive_memory_bits(8) == 64
    assert adaptive_memory_bits(100) == 2000


def test_adaptive_minus_clockwise_is_node_id_field():
    for n in range(4, 400, 7):
        assert adaptive_memory_bits(n) - clockwise_memory_bits(n) == n * (n - 1).bit_length()


def test_memory_formulas_strictly_increase():
    prev = memory_report(4)
    for n in range(5, 420):
        cur = memory_report(n)
        assert cur.table_bits > prev.table_bits
        assert cur.clockwise_bits > prev.clockwise_bits
        assert cur.adaptive_bits > prev.adaptive_bits
        prev = cur


@pytest.mark.parametrize("call", [
    lambda: table_memory_bits(1),
    lambda: table_memory_bits(8, 1),
    lambda: clockwise_memory_bits(3),
    lambda: adaptive_memory_bits(3),
])
def test_memory_bits_validation(call):
    with pytest.raises(ValidationError):
        call()


def test_memory_report_and_csv():
    report = memory_report(8)
    assert (report.payload_bits, report.table_bits, report.clockwise_bits, report.adaptive_bits) == (3, 128, 40, 64)
    text = format_memory_csv([report])
    assert text == "n,payload_bits,table_bits,clockwise_bits,adaptive_bits\n8,3,128,40,64\n"


# --- resource curves ---------------------------------------------------------------

def test_resource_usage_table_alm_at_275():
    # -74.354 + 15.537 * 275 + 0.464 * 275**2
    value = resource_usage(DEFAULT_RESOURCE_MODEL, "table", "alm", 275)
    assert value == pytest.approx(39288.321, abs=1e-6)


def test_resource_usage_adaptive_alm_at_53():
    value = resource_usage(DEFAULT_RESOURCE_MODEL, "adaptive", "alm", 53)
    assert value == pytest.approx(39381.142, abs=1e-6)


def test_register_curves_table_and_adaptive_coincide():
    assert (
        DEFAULT_RESOURCE_MODEL.curve("table", "register")
        == DEFAULT_RESOURCE_MODEL.curve("adaptive", "register")
    )
    for x in (1, 10, 100, 300):
        assert resource_usage(DEFAULT_RESOURCE_MODEL, "table", "register", x) == resource_usage(
            DEFAULT_RESOURCE_MODEL, "adaptive", "register", x
        )


def test_resource_usage_can_be_negative_for_tiny_networks():
    assert resource_usage(DEFAULT_RESOURCE_MODEL, "adaptive", "alm", 1) < 0


def test_resource_usage_validation():
    with pytest.raises(ValidationError):
        resource_usage(DEFAULT_RESOURCE_MODEL, "table", "alm", 0)
    with pytest.raises(ValidationError):
        resource_usage(DEFAULT_RESOURCE_MODEL, "table", "bram", 5)
    with pytest.raises(ValidationError):
        resource_usage(DEFAULT_RESOURCE_MODEL, "zigzag", "alm", 5)


# --- chip capacity -------------------------------------------------------------------

def test_chip_profile_defaults_and_validation():
    profile = ChipProfile()
    assert (profile.alm_total, profile.reg_total, profile.budget_fraction) == (113560, 12492800, 0.35)
    with pytest.raises(ValidationError):
        ChipProfile(budget_fraction=0.0)
    with pytest.raises(ValidationError):
        ChipProfile(budget_fraction=1.5)
    with pytest.raises(ValidationError):
        ChipProfile(alm_total=0)


@pytest.mark.parametrize("algorithm, expected", [("table", 276), ("clockwise", 278), ("adaptive", 53)])
def test_chip_capacity_default_profile(algorithm, expected):
    report = chip_capacity(DEFAULT_RESOURCE_MODEL, algorithm)
    assert report.max_routers == expected
    assert report.binding_resource == "alm"
    budget_alm = 0.35 * 113560
    budget_reg = 0.35 * 12492800
    assert report.alm_used <= budget_alm
    assert report.reg_used <= budget_reg
    over = resource_usage(DEFAULT_RESOURCE_MODEL, algorithm, "alm", expected + 1)
    assert over > budget_alm


def test_chip_capacity_json_schema():
    payload = json.loads(chip_capacity(DEFAULT_RESOURCE_MODEL, "adaptive").to_json())
    assert list(payload) == [
        "algorithm", "alm_total", "reg_total", "budget_fraction",
        "max_routers", "binding_resource", "alm_used", "reg_used",
    ]
    assert payload["max_routers"] == 53
    assert payload["binding_resource"] == "alm"


def test_chip_capacity_smaller_budget_fits_fewer_routers():
    tight = chip_capacity(DEFAULT_RESOURCE_MODEL, "table", ChipProfile(budget_fraction=0.3))
    assert tight.max_routers < 276


def test_chip_capacity_infeasible_reports_zero():
    report = chip_capacity(
        DEFAULT_RESOURCE_MODEL, "table", ChipProfile(alm_total=113560, reg_total=100)
    )
    assert report.max_routers == 0
    assert report.binding_resource == "register"


def test_custom_resource_model():
    model = ResourceModel(
        curves={
            ("table", "alm"): QuadraticCost(0.0, 1.0, 0.0),
            ("table", "register"): QuadraticCost(0.0, 2.0, 0.0),
        }
    )
    assert resource_usage(model, "table", "alm", 7) == 7.0
    report = chip_capacity(model, "table", ChipProfile(alm_total=10, reg_total=1000, budget_fraction=1.0))
    assert report.max_routers == 10
    assert report.binding_resource == "alm"


# --- report type sanity ----------------------------------------------------------------

def test_cycle_report_type():
    report = CycleReport(n=8, s2=3, per_destination=(0,) * 8)
    assert report.max_cycles == 0

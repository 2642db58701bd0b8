import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubogas.boolpoly import FactoredTerm, Literal, Polynomial, constant, from_mapping, shift, value_register_width
from hubogas.circuit import synthesize_Ay
from hubogas.gas import (
    ANALYTIC,
    STATEVECTOR,
    GasConfig,
    GasStep,
    GasTrace,
    _AnalyticSampler,
    analytic_sample,
    cdf_at,
    normalize_objective,
    normalize_value,
    run,
    run_trials,
    success_cdf,
    success_probability,
    trial_seeds,
)
from hubogas.problems import GcpInstance, convergence_instance, gcp_formulation
from hubogas.simulator import grover_state, key_distribution


def small_poly():
    # values 0..7 spread over 3 variables, unique minimum at x = 0b111
    return Polynomial(
        3,
        [
            FactoredTerm(-3, (Literal(0), Literal(1), Literal(2))),
            FactoredTerm(2, (Literal(0, True),)),
            FactoredTerm(1, (Literal(1), Literal(2, True))),
        ],
        1,
    )


def check_trace(trace, values):
    steps = trace.steps
    assert steps[0].rotations == 0 and steps[0].cum_rotations == 0
    calls = 0
    prev = steps[0]
    for s in steps[1:]:
        assert s.cum_rotations == prev.cum_rotations + s.rotations
        calls += 2 * s.rotations + 1
        assert s.oracle_calls == calls
        assert s.value == values[s.x]
        if s.accepted:
            assert s.threshold == s.value < prev.threshold
        else:
            assert s.threshold == prev.threshold and s.value >= prev.threshold
        prev = s
    assert trace.final_threshold >= trace.optimum
    firsts = [s.cum_rotations for s in steps if s.threshold == trace.optimum and (s.accepted or s is steps[0])]
    if trace.converged_at is None:
        assert trace.final_threshold > trace.optimum
    else:
        assert trace.converged_at == firsts[0]


def test_success_probability_edges():
    assert success_probability(8, 0, 3) == 0.0
    assert success_probability(8, 8, 3) == 1.0
    assert math.isclose(success_probability(8, 1, 1), 0.78125)
    assert math.isclose(success_probability(8, 1, 2), 0.9453125)
    assert math.isclose(success_probability(8, 2, 0), 0.25)
    with pytest.raises(ValueError):
        success_probability(8, 9, 0)


def test_analytic_sample_edges():
    rng = np.random.default_rng(0)
    assert not any(analytic_sample(8, 0, 2, rng) for _ in range(100))
    assert all(analytic_sample(8, 8, 2, rng) for _ in range(100))


@pytest.mark.parametrize("L,p", [(1, 0.78125), (2, 0.9453125)])
def test_analytic_sample_frequency(L, p):
    rng = np.random.default_rng(L)
    draws = 100_000
    hits = sum(analytic_sample(8, 1, L, rng) for _ in range(draws))
    assert abs(hits / draws - p) < 3 * math.sqrt(p * (1 - p) / draws)


@pytest.mark.parametrize("y", [-1, 1, 3, 6, 9])
@pytest.mark.parametrize("L", [0, 1, 2, 3])
def test_analytic_law_matches_statevector_exactly(y, L):
    poly = small_poly()
    vals = poly.values()
    m = value_register_width(shift(poly, y))
    dist = key_distribution(grover_state(synthesize_Ay(poly, y, m), L))
    t = int(np.sum(vals < y))
    N = vals.size
    p = success_probability(N, t, L)
    model = np.where(vals < y, p / max(t, 1), (1 - p) / max(N - t, 1))
    assert np.allclose(dist, model, atol=1e-12)


def test_analytic_sampler_picks_from_the_right_set():
    vals = small_poly().values()
    sampler = _AnalyticSampler(vals)
    rng = np.random.default_rng(5)
    counts = np.zeros(vals.size)
    for _ in range(20_000):
        counts[sampler(2, 1, rng)] += 1
    marked = vals < 2
    p = success_probability(vals.size, int(marked.sum()), 1)
    assert abs(counts[marked].sum() / 20_000 - p) < 0.02
    # uniform inside the marked set
    inside = counts[marked] / counts[marked].sum()
    assert np.all(np.abs(inside - 1 / marked.sum()) < 0.03)


def test_config_validation():
    with pytest.raises(ValueError):
        GasConfig(max_total_rotations=0)
    with pytest.raises(ValueError):
        GasConfig(growth=Fraction(1))
    with pytest.raises(ValueError):
        GasConfig(backend="quantum")


def test_converged_at_zero_when_first_sample_is_optimal():
    trace = run(constant(3, 4), GasConfig(seed=1))
    assert trace.converged_at == 0
    assert len(trace.steps) == 1


def test_budget_exhausted_without_convergence():
    poly = small_poly()
    trace = run(poly, GasConfig(max_total_rotations=30, initial_threshold=int(poly.values().min()), seed=2))
    assert trace.converged_at is None
    assert trace.total_rotations <= 30
    assert all(not s.accepted for s in trace.steps[1:])


@given(st.integers(0, 10_000))
@settings(max_examples=40)
def test_trace_invariants(seed):
    poly = small_poly()
    trace = run(poly, GasConfig(seed=seed, max_total_rotations=200))
    check_trace(trace, poly.values())


def test_trace_invariants_without_early_stop():
    poly = small_poly()
    trace = run(poly, GasConfig(seed=3, max_total_rotations=100, stop_at_optimum=False))
    check_trace(trace, poly.values())
    assert trace.total_rotations <= 100


def test_schedule_caps_rotations_at_sqrt_n():
    poly = small_poly()
    trace = run(poly, GasConfig(seed=4, max_total_rotations=500, initial_threshold=-100))
    assert max(s.rotations for s in trace.steps) < math.ceil(math.sqrt(8))


def test_run_is_deterministic():
    form = gcp_formulation(GcpInstance(4, ((0, 1), (1, 2), (2, 3)), 2), "pf")
    a = run(form, GasConfig(seed=9))
    b = run(form, GasConfig(seed=9))
    assert a == b


def test_statevector_backend_tiny_instance():
    form = gcp_formulation(GcpInstance(3, ((0, 1), (1, 2)), 2), "asc")
    cfg = GasConfig(seed=3, backend=STATEVECTOR, max_total_rotations=200)
    traces = run_trials(form, cfg, 5)
    vals = form.polynomial.values()
    for t in traces:
        check_trace(t, vals)
        assert t.converged_at is not None


def test_backends_accept_same_formulations():
    form = gcp_formulation(GcpInstance(3, ((0, 1),), 2), "or")
    for backend in (ANALYTIC, STATEVECTOR):
        t = run(form, GasConfig(seed=0, backend=backend))
        assert t.converged_at is not None


def test_trial_seeds():
    assert trial_seeds(0, 3) == trial_seeds(0, 3)
    assert len(set(trial_seeds(0, 50))) == 50
    assert trial_seeds(0, 3) != trial_seeds(1, 3)


def test_run_trials_matches_individual_runs():
    poly = small_poly()
    cfg = GasConfig(seed=11)
    traces = run_trials(poly, cfg, 4)
    for s, t in zip(trial_seeds(11, 4), traces):
        assert t == run(poly, GasConfig(seed=s))


def fake(converged):
    return GasTrace((GasStep(0, 0, 0, 0, 0, 0, True),), 0, converged, 0, 1)


def test_success_cdf_examples():
    assert success_cdf([fake(0), fake(0)]) == [(0, 1.0)]
    none = success_cdf([fake(None), fake(None)])
    assert none == [(0, 0.0)]
    assert cdf_at(none, 1e9) == 0.0
    cdf = success_cdf([fake(5), fake(2), fake(None), fake(5)])
    assert cdf == [(2, 0.25), (5, 0.75)]
    assert cdf_at(cdf, 1) == 0.0
    assert cdf_at(cdf, 2) == 0.25
    assert cdf_at(cdf, 4.9) == 0.25
    assert cdf_at(cdf, 5) == 0.75
    assert success_cdf([]) == [(0, 0.0)]


def test_normalize_examples():
    assert normalize_value(5, 0, 10) == 0.5
    assert normalize_value(0, 0, 10) == 0.0
    assert normalize_value(3, 3, 3) == 0.0


def test_normalized_trace_nonincreasing():
    poly = small_poly()
    trace = normalize_objective(run(poly, GasConfig(seed=8)), poly)
    norm = [s.value_normalized for s in trace.steps]
    assert all(0 <= v <= 1 for v in norm)
    assert all(a >= b for a, b in zip(norm, norm[1:]))
    assert norm[-1] == 0.0
    fixed = normalize_objective(trace, (0, 16))
    assert fixed.steps[0].value_normalized == trace.steps[0].threshold / 16


def test_search_space_sizes():
    inst = convergence_instance()
    sizes = {s: 1 << gcp_formulation(inst, s).num_vars for s in ("qubo", "or", "pf")}
    assert sizes == {"qubo": 2**20, "or": 2**15, "pf": 2**10}


def test_analytic_backend_on_expanded_polynomial():
    poly = from_mapping(4, {(0, 1): -2, (2,): 1, (3,): 1})
    trace = run(poly, GasConfig(seed=1))
    assert trace.converged_at is not None
    assert trace.optimum == -2

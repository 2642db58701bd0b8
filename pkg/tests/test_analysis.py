import math

import pytest

from hubogas.analysis import (
    StrategyParams,
    closed_form_terms,
    constructed_counts,
    gate_counts_closed_form,
    grover_iterations,
    qubit_counts,
    reconcile,
    t_count,
    tgate_totals,
    total_t_gates,
)
from hubogas.boolpoly import expand
from hubogas.problems import GcpInstance, convergence_instance, family_instance, gcp_qubo

SMALL = [
    convergence_instance(),
    GcpInstance(3, ((0, 1), (1, 2), (0, 2)), 3),
    GcpInstance(4, ((0, 1), (1, 2), (2, 3)), 4),
    GcpInstance(4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)), 2),
]


def test_params_validation():
    with pytest.raises(ValueError):
        StrategyParams(3, 2, 2, (1, 1, 1))
    p = StrategyParams.from_instance(convergence_instance())
    assert (p.V, p.I, p.E, p.B1, p.B2) == (5, 4, 6, 2, 3)


def test_qubit_counts_convergence_instance():
    inst = convergence_instance()
    q = qubit_counts(inst, "qubo")
    assert (q.n, q.m, q.total) == (20, 7, 27)
    assert q.m_register == 8
    assert qubit_counts(inst, "pf").n == 10
    assert qubit_counts(inst, "or").n == 15
    assert qubit_counts(inst, "or").m == qubit_counts(inst, "asc").m == 3


def test_closed_form_qubo_terms():
    inst = convergence_instance()
    assert closed_form_terms(inst, "qubo") == 74 == len(expand(gcp_qubo(inst).polynomial).terms)
    rep = gate_counts_closed_form(inst, "qubo", m=7)
    assert rep.histogram == {1: 20 * 7, 2: 54 * 7}
    assert rep.ancilla == 1
    assert rep.h_count == 27


def test_closed_form_pf_x_counts():
    rep = gate_counts_closed_form(convergence_instance(), "pf")
    assert (rep.x_pre, rep.x_post) == (40, 20)
    built = constructed_counts(convergence_instance(), "pf")
    assert (built.x_pre, built.x_post) == (40, 20)


def test_descending_has_no_closed_form():
    with pytest.raises(ValueError):
        gate_counts_closed_form(convergence_instance(), "dsc")
    assert closed_form_terms(convergence_instance(), "dsc") is None


@pytest.mark.parametrize("inst", SMALL, ids=lambda i: f"V{i.num_vertices}I{i.num_colors}E{i.num_edges}")
def test_qubo_reconciles_exactly(inst):
    r = reconcile(inst, "qubo")
    assert r.ok and r.resolved_reading == "exact"
    assert r.constructed.histogram == r.closed.histogram


@pytest.mark.parametrize("inst", SMALL + [family_instance(8), family_instance(12)], ids=str)
def test_asc_bracket_reading(inst):
    r = reconcile(inst, "asc")
    assert r.h_match
    assert r.reading_matches["sum_of_deg_minus_one"]
    assert not r.mismatched_orders
    B = (inst.num_colors - 1).bit_length()
    assert all(k in r.exact_orders for k in r.constructed.histogram if k > B)


@pytest.mark.parametrize("V", [8, 12, 16])
def test_pf_and_even_code_on_family(V):
    inst = family_instance(V)
    pf = reconcile(inst, "pf")
    assert pf.ok and pf.x_match
    odd = reconcile(inst, "or")
    assert odd.resolved_reading == "degree"


def test_even_code_discrepancy_is_reported():
    r = reconcile(convergence_instance(), "or")
    assert r.resolved_reading is None
    assert any("interference product alone matches reading ['degree']" in n for n in r.notes)
    assert any("construction is authoritative" in n for n in r.notes)


def test_reconcile_needs_instance():
    with pytest.raises(ValueError):
        reconcile(StrategyParams(2, 2, 1, (1, 1)), "qubo")


def test_grover_iterations():
    assert grover_iterations(4) == 4
    assert grover_iterations(3) == 3
    assert grover_iterations(10) == 32
    assert grover_iterations(0) == 1


def test_total_t_gates_examples():
    assert total_t_gates(14, 4) == 112
    assert total_t_gates(0, 20) == 0


def test_t_count_descending_by_construction():
    inst = family_instance(8)
    assert t_count(inst, "dsc") == constructed_counts(inst, "dsc").t_count()
    with pytest.raises(ValueError):
        t_count(StrategyParams(8, 2, 24, (6,) * 8), "dsc")


def test_t_count_rtof_smaller():
    inst = family_instance(12)
    for s in ("qubo", "asc", "pf", "or"):
        assert t_count(inst, s, "rtof") * 14 == t_count(inst, s) * 8


@pytest.mark.parametrize("V", [8, 12, 16])
def test_descending_totals_below_qubo(V):
    inst = family_instance(V)
    assert tgate_totals(inst, "dsc") < tgate_totals(inst, "qubo")


def test_hubo_totals_below_qubo_over_sweep():
    # the only miss: I = 3 gives the even-parity code as many key qubits as one-hot
    misses = []
    for V in range(8, 65, 4):
        inst = family_instance(V)
        qubo = tgate_totals(inst, "qubo")
        misses += [(V, s) for s in ("asc", "pf", "or") if tgate_totals(inst, s) >= qubo]
    assert misses == [(12, "or")]
    inst = family_instance(12)
    assert qubit_counts(inst, "or").n == qubit_counts(inst, "qubo").n


def test_totals_at_smallest_family_point():
    # frozen from the constructed and closed-form counts
    inst = family_instance(8)
    totals = {s: tgate_totals(inst, s) for s in ("qubo", "asc", "dsc", "pf", "or")}
    assert totals == {"qubo": 2408448, "asc": 53760, "dsc": 53760, "pf": 107520, "or": 2007040}


@pytest.mark.parametrize("V", [12, 16, 32, 64])
def test_pf_totals_not_above_asc(V):
    inst = family_instance(V)
    assert tgate_totals(inst, "pf") <= tgate_totals(inst, "asc")


def test_pf_beats_qubo_per_ay_at_large_size():
    inst = family_instance(128)
    assert t_count(inst, "pf") < t_count(inst, "qubo")
    assert t_count(family_instance(64), "pf") > t_count(family_instance(64), "qubo")


def test_asymptotic_ratios_bounded():
    ratios = {s: [] for s in ("qubo", "pf", "or")}
    for V in range(8, 65, 8):
        p = StrategyParams.from_instance(family_instance(V))
        ratios["qubo"].append(qubit_counts(p, "qubo").n / (p.V * p.I))
        ratios["pf"].append(qubit_counts(p, "pf").n / (p.V * math.log2(p.I)))
        ratios["or"].append(qubit_counts(p, "or").n / (p.V * math.log2(p.I)))
    assert set(ratios["qubo"]) == {1.0}
    for s in ("pf", "or"):
        assert all(1 <= r <= 2.5 for r in ratios[s])
        assert max(ratios[s]) / min(ratios[s]) < 2.5


def test_closed_form_asymptotic_tag():
    assert gate_counts_closed_form(convergence_instance(), "qubo").asymptotic_class == "Omega(VI)"
    assert gate_counts_closed_form(convergence_instance(), "pf").asymptotic_class == "Omega(V log I)"

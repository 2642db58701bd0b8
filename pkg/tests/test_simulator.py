import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hubogas import kernels
from hubogas.boolpoly import FactoredTerm, Literal, Polynomial, constant, from_mapping, shift, value_register_width
from hubogas.circuit import Circuit, Hadamard, InverseQFT, PhaseBlock, synthesize_Ay
from hubogas.problems import GcpInstance, convergence_instance, gcp_formulation
from hubogas.simulator import (
    SimulationTooLarge,
    apply,
    grover_state,
    key_distribution,
    marked_probability,
    measure_key,
    prepare,
    run_key_basis,
    signed_value,
    verify_oracle,
    zero_state,
)


def grover_law(t, N, L):
    return math.sin((2 * L + 1) * math.asin(math.sqrt(t / N))) ** 2


def test_hadamard_on_zero():
    s = apply(Circuit(1, 1, (Hadamard(0),)), zero_state(1, 1))
    assert np.allclose(s[:, 0], [1 / math.sqrt(2)] * 2)
    assert np.allclose(s[:, 1], 0)


def test_phase_adder_constant():
    c = Circuit(0, 2, (Hadamard(0), Hadamard(1), PhaseBlock((), 1), InverseQFT()))
    s = apply(c, zero_state(0, 2))
    assert np.allclose(np.abs(s[0]) ** 2, [0, 1, 0, 0])


def test_adder_matches_matrix_product():
    # H x H, diag phase, then the inverse-QFT matrix written out directly
    m = 2
    M = 1 << m
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    hh = np.kron(h, h)
    phase = np.diag(np.exp(2j * np.pi * 3 * np.arange(M) / M))
    iqft = np.array([[np.exp(-2j * np.pi * j * k / M) for k in range(M)] for j in range(M)]) / math.sqrt(M)
    expect = iqft @ phase @ hh @ np.eye(M)[:, 0]
    got = apply(Circuit(0, m, (Hadamard(0), Hadamard(1), PhaseBlock((), 3), InverseQFT())), zero_state(0, m))
    assert np.allclose(got[0], expect)
    assert np.argmax(np.abs(got[0])) == 3


def test_single_variable_on_basis_one():
    poly = from_mapping(1, {(0,): 1})
    rows = run_key_basis(synthesize_Ay(poly, 0, 2))
    p = np.abs(rows) ** 2 * 2
    assert np.allclose(p[1], [0, 1, 0, 0])
    assert np.allclose(p[0], [1, 0, 0, 0])


def test_grover_no_marked():
    poly = from_mapping(3, {(0,): 1, (1, 2): 2})
    ay = synthesize_Ay(poly, 0, 3)
    s = grover_state(ay, 2)
    assert np.allclose(key_distribution(s), 1 / 8)


def test_grover_all_marked():
    poly = constant(3, -1)
    ay = synthesize_Ay(poly, 0, 2)
    s = grover_state(ay, 1)
    assert np.allclose(key_distribution(s), 1 / 8)
    assert math.isclose(marked_probability(s), 1.0)


def test_grover_single_marked():
    poly = Polynomial(3, [FactoredTerm(-1, (Literal(0), Literal(1), Literal(2)))])
    ay = synthesize_Ay(poly, 0, 2)
    p = marked_probability(grover_state(ay, 1))
    assert math.isclose(p, 0.78125, abs_tol=1e-12)
    assert math.isclose(p, grover_law(1, 8, 1), abs_tol=1e-12)
    assert math.isclose(marked_probability(grover_state(ay, 2)), grover_law(1, 8, 2), abs_tol=1e-12)


def test_measure_key_basis_state():
    s = np.zeros((8, 2), dtype=complex)
    s[5, 1] = 1
    assert all(measure_key(s, seed) == 5 for seed in range(5))


def test_measure_key_frequency_and_determinism():
    s = np.zeros((2, 1), dtype=complex)
    s[:, 0] = 1 / math.sqrt(2)
    draws = measure_key(s, 7, shots=10_000)
    assert abs(draws.mean() - 0.5) < 0.015
    assert np.array_equal(draws, measure_key(s, 7, shots=10_000))


def test_post_grover_sampling_matches_law():
    poly = Polynomial(3, [FactoredTerm(-1, (Literal(0), Literal(1), Literal(2)))])
    s = grover_state(synthesize_Ay(poly, 0, 2), 1)
    draws = measure_key(s, 11, shots=10_000)
    p = grover_law(1, 8, 1)
    freq = np.mean(draws == 7)
    assert abs(freq - p) < 3 * math.sqrt(p * (1 - p) / 10_000)


def test_verify_oracle_cubic():
    poly = from_mapping(3, {(0, 1, 2): 1, (0, 2): 1, (2,): -1})
    rep = verify_oracle(poly, 0, 2)
    assert rep.passed and rep.checked == 8
    decoded = [signed_value(int(r), 2) for r in rep.registers]
    assert decoded == poly.values().tolist()
    assert "verified" in rep.describe()


def test_verify_oracle_undersized_register():
    poly = from_mapping(2, {(0,): 2})
    assert verify_oracle(poly, 0, 3).passed
    rep = verify_oracle(poly, 0, 2)
    assert not rep.passed
    bits, expected, observed = rep.counterexample
    assert (bits, expected, observed) == ((1, 0), 2, -2)
    assert "expected" in rep.describe()


def test_verify_oracle_constant_negative():
    rep = verify_oracle(constant(2, -1), 0, 2)
    assert rep.passed
    assert all(r >= 2 for r in rep.registers)


@pytest.mark.parametrize("s", ["qubo", "asc", "dsc", "pf", "or"])
def test_oracle_on_small_formulations(s):
    inst = GcpInstance(3, ((0, 1), (1, 2)), 3)
    form = gcp_formulation(inst, s)
    poly = form.synthesis_polynomial
    for y in (0, 1, 3):
        m = value_register_width(shift(poly, y))
        assert verify_oracle(poly, y, m, groups=form.emission_groups).passed


def test_oracle_on_convergence_hubo():
    form = gcp_formulation(convergence_instance(), "pf")
    m = value_register_width(form.polynomial)
    assert verify_oracle(form.synthesis_polynomial, 0, m, groups=form.emission_groups).passed


def test_size_cap():
    with pytest.raises(SimulationTooLarge):
        zero_state(20, 10)
    with pytest.raises(ValueError):
        apply(Circuit(2, 1), zero_state(1, 1))


def test_signed_value():
    assert signed_value(3, 2) == -1
    assert signed_value(1, 2) == 1
    assert signed_value(2, 2) == -2


# -- properties ---------------------------------------------------------------


@st.composite
def small_polys(draw, max_vars=4):
    n = draw(st.integers(1, max_vars))
    terms = []
    for _ in range(draw(st.integers(0, 5))):
        vs = draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
        negs = draw(st.lists(st.booleans(), min_size=len(vs), max_size=len(vs)))
        terms.append(FactoredTerm.make(draw(st.integers(-5, 5)), [Literal(v, g) for v, g in zip(vs, negs)]))
    return Polynomial(n, terms, draw(st.integers(-3, 3)))


@given(small_polys(), st.integers(-4, 4))
def test_oracle_correct_on_random_polys(p, y):
    m = value_register_width(shift(p, y))
    assert verify_oracle(p, y, m).passed


@given(small_polys(), st.integers(-4, 4), st.integers(0, 4))
def test_norm_and_grover_law(p, y, L):
    m = value_register_width(shift(p, y))
    ay = synthesize_Ay(p, y, m)
    s = grover_state(ay, L)
    assert abs(np.linalg.norm(s) - 1) < 1e-9
    vals = p.values()
    t = int(np.sum(vals < y))
    N = 1 << p.num_vars
    assert abs(marked_probability(s) - grover_law(t, N, L)) < 1e-9
    dist = key_distribution(s)
    marked = vals < y
    for group in (dist[marked], dist[~marked]):
        if group.size:
            assert np.ptp(group) < 1e-9


@given(st.integers(0, 2**31 - 1))
def test_kernel_variants_agree(seed):
    rng = np.random.default_rng(seed)
    base = rng.normal(size=(16, 8)) + 1j * rng.normal(size=(16, 8))
    phases = np.exp(2j * np.pi * np.arange(8) / 8)
    cases = [
        ("hadamard_rows", (4,)),
        ("hadamard_cols", (2,)),
        ("flip_rows", (1,)),
        ("flip_cols", (4,)),
        ("phase_rows", (np.int64(0b0110), phases)),
    ]
    for name, args in cases:
        a, b = base.copy(), base.copy()
        getattr(kernels, name + "_numpy")(a, *args)
        getattr(kernels, name + "_jit")(b, *args)
        assert np.allclose(a, b, atol=1e-14)


def test_prepare_is_uniform_over_keys():
    form = gcp_formulation(GcpInstance(3, ((0, 1),), 2), "asc")
    ay = synthesize_Ay(form.synthesis_polynomial, 0, 2)
    assert np.allclose(key_distribution(prepare(ay)), 1 / 8)

"""Dense statevector simulation of ``A_y`` circuits and Grover iterations.

The state is a ``(2**n, 2**m)`` complex array: row = key basis state
(little-endian assignment integer), column = value-register integer whose
most-significant bit is the sign qubit.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .boolpoly import Polynomial, TermKey, bits_of, shift
from .circuit import (
    Circuit,
    Hadamard,
    InverseQFT,
    PauliX,
    PhaseBlock,
    QFT,
    SignFlipZ,
    synthesize_Ay,
)

MAX_QUBITS = int(os.environ.get("HUBOGAS_MAX_QUBITS", "26"))


class SimulationTooLarge(ValueError):
    pass


def _check_size(num_qubits: int, limit: int | None = None) -> None:
    limit = MAX_QUBITS if limit is None else limit
    if num_qubits > limit:
        raise SimulationTooLarge(f"{num_qubits} qubits exceed the simulator limit of {limit}")


def zero_state(n: int, m: int) -> np.ndarray:
    _check_size(n + m)
    state = np.zeros((1 << n, 1 << m), dtype=np.complex128)
    state[0, 0] = 1.0
    return state


def _phase_vector(coefficient: int, m: int) -> np.ndarray:
    size = 1 << m
    # reduce exactly before leaving the integers
    k = (coefficient % size) * np.arange(size, dtype=np.int64) % size
    return np.exp(2j * np.pi * k / size)


def apply_gate(circ: Circuit, gate, state: np.ndarray) -> None:
    n, m = circ.num_key, circ.num_value
    if isinstance(gate, (Hadamard, PauliX)):
        q = gate.qubit
        if q < n:
            (kernels.hadamard_rows if isinstance(gate, Hadamard) else kernels.flip_rows)(state, 1 << q)
        else:
            bit = 1 << (m - 1 - (q - n))
            (kernels.hadamard_cols if isinstance(gate, Hadamard) else kernels.flip_cols)(state, bit)
    elif isinstance(gate, PhaseBlock):
        mask = 0
        for c in gate.controls:
            mask |= 1 << c
        kernels.phase_rows(state, np.int64(mask), _phase_vector(gate.coefficient, m))
    elif isinstance(gate, InverseQFT):
        state[:] = np.fft.fft(state, axis=1, norm="ortho")
    elif isinstance(gate, QFT):
        state[:] = np.fft.ifft(state, axis=1, norm="ortho")
    elif isinstance(gate, SignFlipZ):
        state[:, (1 << (m - 1)):] *= -1
    else:
        raise TypeError(f"unknown gate {gate!r}")


def apply(circ: Circuit, state: np.ndarray, inplace: bool = False) -> np.ndarray:
    expected = (1 << circ.num_key, 1 << circ.num_value)
    if state.shape != expected:
        raise ValueError(f"state shape {state.shape} does not match circuit {expected}")
    out = state if inplace else np.array(state, dtype=np.complex128, order="C")
    for g in circ.gates:
        apply_gate(circ, g, out)
    return out


def prepare(ay: Circuit) -> np.ndarray:
    """``A_y |0>``."""
    return apply(ay, zero_state(ay.num_key, ay.num_value), inplace=True)


def reflect_zero(state: np.ndarray) -> None:
    """``2|0><0| - I`` in place."""
    amp = state[0, 0]
    state *= -1
    state[0, 0] = amp


def grover_step(ay: Circuit, state: np.ndarray, ay_inverse: Circuit | None = None) -> np.ndarray:
    """One application of ``A_y (2|0><0| - I) A_y^dagger O`` where ``O`` flips the sign bit."""
    inv = ay.inverse() if ay_inverse is None else ay_inverse
    out = np.array(state, dtype=np.complex128, order="C")
    apply_gate(ay, SignFlipZ(), out)
    apply(inv, out, inplace=True)
    reflect_zero(out)
    apply(ay, out, inplace=True)
    return out


def grover_state(ay: Circuit, rotations: int) -> np.ndarray:
    state = prepare(ay)
    inv = ay.inverse()
    for _ in range(rotations):
        state = grover_step(ay, state, inv)
    return state


def key_distribution(state: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(state) ** 2, axis=1)


def marked_probability(state: np.ndarray) -> float:
    half = state.shape[1] // 2
    return float(np.sum(np.abs(state[:, half:]) ** 2))


def measure_key(state: np.ndarray, rng: np.random.Generator | int | None = None, shots: int | None = None):
    """Sample key-register outcomes (little-endian assignment integers)."""
    rng = np.random.default_rng(rng)
    p = key_distribution(state)
    p = p / p.sum()
    draws = rng.choice(p.size, size=1 if shots is None else shots, p=p)
    return int(draws[0]) if shots is None else draws


def signed_value(register: int, m: int) -> int:
    return register - (1 << m) if register >= 1 << (m - 1) else register


@dataclass(frozen=True)
class OracleCheck:
    passed: bool
    checked: int
    registers: np.ndarray
    counterexample: tuple[tuple[int, ...], int, int] | None = None

    def describe(self) -> str:
        if self.passed:
            return f"oracle verified on {self.checked} assignments"
        bits, expected, observed = self.counterexample
        return f"assignment {list(bits)}: expected E(x)-y = {expected}, register decodes to {observed}"


def run_key_basis(circ: Circuit) -> np.ndarray:
    """Run ``circ`` without its key Hadamards on every key basis state at once.

    Each row of the returned array is the value-register state reached from
    that key basis state (rows are scaled by ``2**(-n/2)``).
    """
    n = circ.num_key
    _check_size(n + circ.num_value)
    state = np.zeros((1 << n, 1 << circ.num_value), dtype=np.complex128)
    state[:, 0] = 1.0 / np.sqrt(1 << n)
    return apply(circ.without_key_hadamards(), state, inplace=True)


def verify_oracle(
    poly: Polynomial,
    y: int,
    m: int,
    groups: Sequence[Sequence[TermKey]] | None = None,
    circuit: Circuit | None = None,
    tol: float = 1e-9,
) -> OracleCheck:
    """Check that ``A_y`` leaves ``E(x) - y`` (two's complement) in the value register.

    Synthesis is not range-checked here, so an undersized register shows up
    as a counterexample instead of an exception.
    """
    circ = circuit if circuit is not None else synthesize_Ay(poly, y, m, groups=groups, check=False)
    n = poly.num_vars
    state = run_key_basis(circ)
    probs = np.abs(state) ** 2 * (1 << n)
    registers = np.argmax(probs, axis=1)
    peaked = np.abs(probs[np.arange(probs.shape[0]), registers] - 1.0) <= tol
    expected = shift(poly, y).values(cap=max(n, 1))
    decoded = np.where(registers >= 1 << (m - 1), registers - (1 << m), registers)
    bad = np.flatnonzero(~peaked | (decoded != expected))
    if bad.size == 0:
        return OracleCheck(True, int(probs.shape[0]), registers)
    x = int(bad[0])
    return OracleCheck(False, int(probs.shape[0]), registers, (tuple(bits_of(x, n)), int(expected[x]), int(decoded[x])))

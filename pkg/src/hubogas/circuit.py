"""Gate-level state preparation ``A_y`` for Grover adaptive search.

Qubits ``0 .. n-1`` hold the binary variables; qubits ``n .. n+m-1`` form the
value register, ``n`` being its most-significant (sign) bit.  A polynomial
term ``a * prod(literals)`` becomes one :class:`PhaseBlock` controlled on the
term's variables, which adds ``a`` to the value register in the phase
domain; negated literals are wrapped in X gates.  A final inverse QFT turns
the accumulated phases into the two's-complement value ``E(x) - y``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence, Union

from .boolpoly import (
    DEFAULT_ENUMERATION_CAP,
    Polynomial,
    TermKey,
    bounds,
    fits_register,
    interval_bounds,
    shift,
)


@dataclass(frozen=True)
class Hadamard:
    qubit: int


@dataclass(frozen=True)
class PauliX:
    qubit: int


@dataclass(frozen=True)
class PhaseBlock:
    """Controlled ``U_G(theta)`` with ``theta = 2*pi*coefficient / 2**m``."""

    controls: tuple[int, ...]
    coefficient: int

    def __post_init__(self):
        ctrl = tuple(sorted(self.controls))
        if len(set(ctrl)) != len(ctrl):
            raise ValueError(f"duplicate control qubits {self.controls}")
        if self.coefficient == 0:
            raise ValueError("phase block with zero coefficient")
        object.__setattr__(self, "controls", ctrl)

    @property
    def arity(self) -> int:
        return len(self.controls)

    def theta(self, m: int) -> float:
        return 2 * math.pi * self.coefficient / (1 << m)

    def angles(self, m: int) -> list[float]:
        """Rotation angle on each value qubit, sign bit first."""
        t = self.theta(m)
        return [(1 << (m - 1 - j)) * t for j in range(m)]


@dataclass(frozen=True)
class InverseQFT:
    pass


@dataclass(frozen=True)
class QFT:
    pass


@dataclass(frozen=True)
class SignFlipZ:
    pass


Gate = Union[Hadamard, PauliX, PhaseBlock, InverseQFT, QFT, SignFlipZ]


@dataclass(frozen=True)
class Circuit:
    num_key: int
    num_value: int
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_value < 1:
            raise ValueError("value register needs at least one qubit")
        total = self.num_key + self.num_value
        for g in self.gates:
            if isinstance(g, (Hadamard, PauliX)) and not 0 <= g.qubit < total:
                raise ValueError(f"{g} acts outside 0..{total - 1}")
            if isinstance(g, PhaseBlock) and any(not 0 <= c < self.num_key for c in g.controls):
                raise ValueError(f"{g} must be controlled by key qubits only")

    @property
    def num_qubits(self) -> int:
        return self.num_key + self.num_value

    @property
    def sign_qubit(self) -> int:
        return self.num_key

    def qubits_of(self, g: Gate) -> tuple[int, ...]:
        value = tuple(range(self.num_key, self.num_qubits))
        if isinstance(g, (Hadamard, PauliX)):
            return (g.qubit,)
        if isinstance(g, PhaseBlock):
            return g.controls + value
        if isinstance(g, (InverseQFT, QFT)):
            return value
        return (self.sign_qubit,)

    def inverse(self) -> Circuit:
        inv: list[Gate] = []
        for g in reversed(self.gates):
            if isinstance(g, PhaseBlock):
                inv.append(PhaseBlock(g.controls, -g.coefficient))
            elif isinstance(g, InverseQFT):
                inv.append(QFT())
            elif isinstance(g, QFT):
                inv.append(InverseQFT())
            else:
                inv.append(g)
        return Circuit(self.num_key, self.num_value, tuple(inv))

    def without_key_hadamards(self) -> Circuit:
        keep = [g for g in self.gates if not (isinstance(g, Hadamard) and g.qubit < self.num_key)]
        return Circuit(self.num_key, self.num_value, tuple(keep))

    @property
    def x_count(self) -> int:
        return sum(isinstance(g, PauliX) for g in self.gates)

    @property
    def phase_blocks(self) -> list[PhaseBlock]:
        return [g for g in self.gates if isinstance(g, PhaseBlock)]

    def dumps(self) -> str:
        lines = [f"qubits n={self.num_key} m={self.num_value}"]
        for g in self.gates:
            if isinstance(g, Hadamard):
                lines.append(f"H q{g.qubit}")
            elif isinstance(g, PauliX):
                lines.append(f"X q{g.qubit}")
            elif isinstance(g, PhaseBlock):
                lines.append(f"CPHASE a={g.coefficient} ctrl={','.join(map(str, g.controls))}")
            elif isinstance(g, InverseQFT):
                lines.append("IQFT")
            elif isinstance(g, QFT):
                lines.append("QFT")
            else:
                lines.append("Z-sign")
        return "\n".join(lines) + "\n"


def loads_circuit(text: str) -> Circuit:
    n = m = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        op, *args = line.split()
        try:
            if op == "qubits":
                kv = dict(a.split("=", 1) for a in args)
                n, m = int(kv["n"]), int(kv["m"])
            elif op in ("H", "X"):
                q = int(args[0].lstrip("q"))
                gates.append(Hadamard(q) if op == "H" else PauliX(q))
            elif op == "CPHASE":
                kv = dict(a.split("=", 1) for a in args)
                ctrl = tuple(int(c) for c in kv.get("ctrl", "").split(",") if c)
                gates.append(PhaseBlock(ctrl, int(kv["a"])))
            elif op == "IQFT":
                gates.append(InverseQFT())
            elif op == "QFT":
                gates.append(QFT())
            elif op == "Z-sign":
                gates.append(SignFlipZ())
            else:
                raise ValueError(f"unknown gate {op!r}")
        except (KeyError, IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if n is None:
        raise ValueError("missing 'qubits n=.. m=..' header")
    return Circuit(n, m, tuple(gates))


class RegisterTooSmall(ValueError):
    pass


def _emission_order(poly: Polynomial, groups: Sequence[Sequence[TermKey]] | None):
    by_key = {t.key: t for t in poly.terms}
    if groups is None:
        return [[t] for t in poly.terms]
    out, used = [], set()
    for grp in groups:
        terms = []
        for k in grp:
            if k not in by_key:
                raise KeyError(f"emission group refers to a term not in the polynomial: {k}")
            if k in used:
                raise ValueError(f"term {k} listed in more than one emission group")
            used.add(k)
            terms.append(by_key[k])
        if terms:
            out.append(terms)
    out += [[t] for t in poly.terms if t.key not in used]
    return out


def synthesize_Ay(
    poly: Polynomial,
    y: int,
    m: int,
    groups: Sequence[Sequence[TermKey]] | None = None,
    check: bool = True,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Circuit:
    """Build ``A_y`` for ``poly - y`` on ``m`` value qubits.

    Terms are emitted in canonical order, each inside its own X sandwich.
    With ``groups`` (lists of term keys) they are emitted group by group and
    a qubit that is negated in every term of the group that touches it gets
    a single X pair around the whole group.
    """
    shifted = shift(poly, y)
    if check:
        lo, hi = bounds(shifted, cap) if poly.num_vars <= cap else interval_bounds(shifted)
        if not fits_register(lo, hi, m):
            raise RegisterTooSmall(f"values in [{lo}, {hi}] do not fit a {m}-qubit two's-complement register")
    n = poly.num_vars
    gates: list[Gate] = [Hadamard(q) for q in range(n + m)]
    if shifted.constant:
        gates.append(PhaseBlock((), shifted.constant))
    for grp in _emission_order(poly, groups):
        # a block ignores qubits it is not controlled on, so terms that do not
        # touch a qubit never block hoisting it
        hoisted = set().union(*(t.negated_vars for t in grp))
        for t in grp:
            hoisted -= {l.var for l in t.literals if not l.negated}
        outer = [PauliX(q) for q in sorted(hoisted)]
        gates += outer
        for t in grp:
            inner = [PauliX(q) for q in t.negated_vars if q not in hoisted]
            gates += inner
            gates.append(PhaseBlock(t.variables, t.coefficient))
            gates += inner
        gates += outer
    gates.append(InverseQFT())
    return Circuit(n, m, tuple(gates))


def oracle_circuit(ay: Circuit) -> Circuit:
    return Circuit(ay.num_key, ay.num_value, (SignFlipZ(),))


def cancel_x(circ: Circuit) -> Circuit:
    """Remove pairs of X gates on a qubit with nothing else acting on it in between.

    One left-to-right pass per round, repeated until nothing changes.
    """
    gates = list(circ.gates)
    while True:
        out: list[Gate | None] = []
        pending: dict[int, int] = {}
        removed = 0
        for g in gates:
            if isinstance(g, PauliX):
                if g.qubit in pending:
                    out[pending.pop(g.qubit)] = None
                    removed += 1
                    continue
                pending[g.qubit] = len(out)
                out.append(g)
                continue
            for q in circ.qubits_of(g):
                pending.pop(q, None)
            out.append(g)
        gates = [g for g in out if g is not None]
        if not removed:
            return Circuit(circ.num_key, circ.num_value, tuple(gates))


TOFFOLI = "toffoli"
RTOF = "rtof"
_T_PER_CONTROL = {TOFFOLI: 14, RTOF: 8}


def t_count_per_gate(k: int, decomposition: str = TOFFOLI) -> int:
    """T gates for one ``C^k R``: ``14(k-1)`` with Toffolis, ``8(k-1)`` with RTOFs, 0 for ``k <= 1``."""
    if k <= 1:
        return 0
    return _T_PER_CONTROL[decomposition] * (k - 1)


def t_count_from_histogram(hist: dict[int, int], decomposition: str = TOFFOLI) -> int:
    return sum(c * t_count_per_gate(k, decomposition) for k, c in hist.items())


@dataclass(frozen=True)
class ResourceReport:
    n: int
    m: int
    ancilla: int
    h_count: int
    x_count: int
    ckr_histogram: dict[int, int]
    t_count_toffoli: int
    t_count_rtof: int
    decomposition: str = TOFFOLI

    @property
    def t_count(self) -> int:
        return self.t_count_toffoli if self.decomposition == TOFFOLI else self.t_count_rtof

    @property
    def rotation_gates(self) -> int:
        return sum(self.ckr_histogram.values())

    @property
    def total_gates(self) -> int:
        return self.h_count + self.x_count + self.rotation_gates

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "ancilla": self.ancilla,
            "h_count": self.h_count,
            "x_count": self.x_count,
            "ckr_histogram": dict(self.ckr_histogram),
            "t_count_toffoli": self.t_count_toffoli,
            "t_count_rtof": self.t_count_rtof,
            "decomposition": self.decomposition,
        }


def count_resources(circ: Circuit, decomposition: str = TOFFOLI) -> ResourceReport:
    """Gate statistics of ``A_y``; the QFT and the oracle Z are not counted.

    Every phase block of arity ``k`` stands for ``m`` gates of type ``C^k R``.
    """
    if decomposition not in _T_PER_CONTROL:
        raise ValueError(f"decomposition must be one of {sorted(_T_PER_CONTROL)}")
    m = circ.num_value
    arity = Counter(b.arity for b in circ.phase_blocks)
    hist = {k: c * m for k, c in sorted(arity.items())}
    return ResourceReport(
        n=circ.num_key,
        m=m,
        ancilla=max((k - 1 for k in arity), default=0) if arity else 0,
        h_count=sum(isinstance(g, Hadamard) for g in circ.gates),
        x_count=circ.x_count,
        ckr_histogram=hist,
        t_count_toffoli=t_count_from_histogram(hist, TOFFOLI),
        t_count_rtof=t_count_from_histogram(hist, RTOF),
        decomposition=decomposition,
    )

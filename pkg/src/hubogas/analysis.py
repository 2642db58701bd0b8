"""Closed-form resource counts for graph coloring and their audit against built circuits.

The closed forms cover the one-hot QUBO and the ASC, Gray-PF and even-parity
binary codes.  Two of them contain a per-vertex correction whose exact shape
is ambiguous; every admissible reading is evaluated and :func:`reconcile`
reports which one agrees with the synthesized circuit.  Construction is
always authoritative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb

from .boolpoly import Polynomial, log2_ceil, monomial, register_width
from .circuit import TOFFOLI, RTOF, cancel_x, count_resources, synthesize_Ay, t_count_from_histogram
from .encoding import Strategy
from .problems import GcpInstance, gcp_formulation

ASC_READINGS = ("sum_of_deg_minus_one", "sum_deg_then_minus_one")
OR_READINGS = ("degree", "edge_count")


@dataclass(frozen=True)
class StrategyParams:
    V: int
    I: int
    E: int
    deg: tuple[int, ...]
    penalty: int = 1
    instance: GcpInstance | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if sum(self.deg) != 2 * self.E:
            raise ValueError("degree sum must equal 2E")
        if len(self.deg) != self.V:
            raise ValueError("need one degree per vertex")

    @classmethod
    def from_instance(cls, inst: GcpInstance) -> StrategyParams:
        return cls(inst.num_vertices, inst.num_colors, inst.num_edges, tuple(inst.degrees()), inst.penalty, inst)

    @property
    def B1(self) -> int:
        return log2_ceil(self.I)

    @property
    def B2(self) -> int:
        return self.B1 + 1


def _params(p: StrategyParams | GcpInstance) -> StrategyParams:
    return p if isinstance(p, StrategyParams) else StrategyParams.from_instance(p)


def max_objective(p: StrategyParams, strategy: Strategy) -> int:
    """Largest objective value the closed forms size the value register for."""
    if strategy is Strategy.ONE_HOT:
        return p.E * p.I + p.penalty * p.V * (p.I - 1) ** 2
    return p.E


@dataclass(frozen=True)
class QubitCounts:
    n: int
    m: int
    m_register: int  # smallest two's-complement width holding [-max, max]
    lower_bound: float

    @property
    def total(self) -> int:
        return self.n + self.m


def qubit_counts(params: StrategyParams | GcpInstance, strategy: Strategy | str) -> QubitCounts:
    p = _params(params)
    s = Strategy.parse(strategy)
    if s is Strategy.ONE_HOT:
        n, n_lb = p.V * p.I, p.V * p.I
    elif s is Strategy.EVEN_OR:
        n, n_lb = p.V * p.B2, p.V * (math.log2(p.I) + 1)
    else:
        n, n_lb = p.V * p.B1, p.V * math.log2(p.I)
    top = max_objective(p, s)
    m = max(1, log2_ceil(top))
    return QubitCounts(n, m, register_width(-top, top), n_lb + math.log2(max(top, 1)))


ASYMPTOTIC_CLASS = {
    Strategy.ONE_HOT: "Omega(VI)",
    Strategy.ASC: "Omega(V log I)",
    Strategy.DSC: "Omega(V log I)",
    Strategy.GRAY_PF: "Omega(V log I)",
    Strategy.EVEN_OR: "Omega(V log I)",
}


@dataclass(frozen=True)
class ClosedFormReport:
    strategy: Strategy
    n: int
    m: int
    asymptotic_class: str
    h_count: int
    histogram: dict[int, int]  # k -> C^kR gates, k >= 1, default reading
    readings: dict[str, dict[int, int]]
    x_pre: int
    x_post: int
    ancilla: int

    @property
    def total_qubits(self) -> int:
        return self.n + self.m

    @property
    def t_count_toffoli(self) -> int:
        return t_count_from_histogram(self.histogram, TOFFOLI)

    @property
    def t_count_rtof(self) -> int:
        return t_count_from_histogram(self.histogram, RTOF)

    def t_count(self, decomposition: str = TOFFOLI) -> int:
        return t_count_from_histogram(self.histogram, decomposition)


def _nonzero(h: dict[int, int]) -> dict[int, int]:
    return {k: v for k, v in sorted(h.items()) if v}


def _asc_histogram(p: StrategyParams, m: int, correction: int) -> dict[int, int]:
    B = p.B1
    h = {}
    for k in range(1, 2 * B + 1):
        count = p.E * comb(2 * B, k)
        if k <= B:
            count -= comb(B, k) * correction
        h[k] = count * m
    return _nonzero(h)


def _or_histogram(p: StrategyParams, m: int, vertex_excess: int) -> dict[int, int]:
    B = p.B2
    h = {k: (2 ** k * p.E * comb(B, B - k) - comb(B, k) * vertex_excess) * m for k in range(1, B + 1)}
    return _nonzero(h)


def gate_counts_closed_form(
    params: StrategyParams | GcpInstance, strategy: Strategy | str, m: int | None = None
) -> ClosedFormReport:
    """Closed-form gate statistics of ``A_y`` (QFT excluded).

    ``m`` defaults to the closed-form register width.  The descending code
    has no closed form and raises ``ValueError``.
    """
    p = _params(params)
    s = Strategy.parse(strategy)
    q = qubit_counts(p, s)
    m = q.m if m is None else m
    x_pre = x_post = 0
    if s is Strategy.ONE_HOT:
        hist = _nonzero({1: p.V * p.I * m, 2: (p.E * p.I + p.V * comb(p.I, 2)) * m})
        readings = {"exact": hist}
        ancilla = 1
    elif s is Strategy.ASC:
        readings = {
            "sum_of_deg_minus_one": _asc_histogram(p, m, sum(d - 1 for d in p.deg)),
            "sum_deg_then_minus_one": _asc_histogram(p, m, sum(p.deg) - 1),
        }
        hist = readings["sum_of_deg_minus_one"]
        ancilla = 2 * p.B1 - 1
    elif s is Strategy.GRAY_PF:
        B = p.B1
        hist = _nonzero({B: p.V * (2 ** B - p.I) * m, 2 * B: p.E * p.I * m})
        readings = {"exact": hist}
        x_pre = 2 ** B * p.V * B
        x_post = 2 ** B * p.V
        ancilla = 2 * B - 1
    elif s is Strategy.EVEN_OR:
        readings = {
            "degree": _or_histogram(p, m, sum(d - 1 for d in p.deg)),
            "edge_count": _or_histogram(p, m, p.V * (p.E - 1)),
        }
        hist = readings["degree"]
        ancilla = p.B1
    else:
        raise ValueError("the descending code has no closed-form count; use constructed_counts")
    return ClosedFormReport(s, q.n, m, ASYMPTOTIC_CLASS[s], q.n + m, hist, readings, x_pre, x_post, ancilla)


@dataclass(frozen=True)
class ConstructedCounts:
    n: int
    m: int
    terms: int
    h_count: int
    x_pre: int
    x_post: int
    histogram: dict[int, int]  # k >= 1 only
    ancilla: int

    @property
    def t_count_toffoli(self) -> int:
        return t_count_from_histogram(self.histogram, TOFFOLI)

    @property
    def t_count_rtof(self) -> int:
        return t_count_from_histogram(self.histogram, RTOF)

    def t_count(self, decomposition: str = TOFFOLI) -> int:
        return t_count_from_histogram(self.histogram, decomposition)

    @property
    def total_gates(self) -> int:
        return self.h_count + self.x_post + sum(self.histogram.values())


def constructed_counts(inst: GcpInstance, strategy: Strategy | str, m: int | None = None) -> ConstructedCounts:
    """Counts read off the synthesized ``A_0`` circuit, before and after X cancellation."""
    s = Strategy.parse(strategy)
    form = gcp_formulation(inst, s)
    m = qubit_counts(inst, s).m if m is None else m
    poly = form.synthesis_polynomial
    circ = synthesize_Ay(poly, 0, m, groups=form.emission_groups, check=False)
    pre = count_resources(circ)
    post = count_resources(cancel_x(circ))
    hist = {k: v for k, v in pre.ckr_histogram.items() if k >= 1}
    return ConstructedCounts(pre.n, m, len(poly.terms), pre.h_count, pre.x_count, post.x_count, hist, pre.ancilla)


@dataclass(frozen=True)
class ReconcileReport:
    strategy: Strategy
    constructed: ConstructedCounts
    closed: ClosedFormReport
    reading_matches: dict[str, bool]
    resolved_reading: str | None
    exact_orders: tuple[int, ...]  # k with unambiguous closed form that matches
    mismatched_orders: tuple[int, ...]
    h_match: bool
    x_match: bool
    notes: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.h_match and self.x_match and self.resolved_reading is not None


def reconcile(params: StrategyParams | GcpInstance, strategy: Strategy | str, m: int | None = None) -> ReconcileReport:
    p = _params(params)
    if p.instance is None:
        raise ValueError("reconcile needs a concrete instance to construct")
    s = Strategy.parse(strategy)
    closed = gate_counts_closed_form(p, s, m)
    built = constructed_counts(p.instance, s, closed.m)
    matches = {name: h == built.histogram for name, h in closed.readings.items()}
    winners = [name for name, ok in matches.items() if ok]
    resolved = winners[0] if len(winners) == 1 else None
    ks = sorted(set(built.histogram) | {k for h in closed.readings.values() for k in h})
    unambiguous = [k for k in ks if len({h.get(k, 0) for h in closed.readings.values()}) == 1]
    exact = tuple(k for k in unambiguous if closed.histogram.get(k, 0) == built.histogram.get(k, 0))
    bad = tuple(k for k in unambiguous if k not in exact)
    notes = []
    if len(winners) > 1:
        notes.append(f"readings {winners} coincide on this instance")
    if not winners:
        notes.append("no reading reproduces the constructed histogram; construction is authoritative")
    if s is Strategy.EVEN_OR and not winners:
        inter = _or_interference_histogram(p.instance, closed.m)
        hit = [name for name, h in closed.readings.items() if h == inter]
        notes.append(
            f"interference product alone matches reading {hit}; the remaining gap comes from penalty "
            "coefficients cancelling merged single-vertex monomials"
            if hit else "interference product alone matches no reading"
        )
    x_match = (closed.x_pre, closed.x_post) == (built.x_pre, built.x_post) if s is Strategy.GRAY_PF else built.x_pre == 0
    if s is Strategy.GRAY_PF and not x_match:
        notes.append(f"X gates: closed form {closed.x_pre}->{closed.x_post}, built {built.x_pre}->{built.x_post}")
    return ReconcileReport(
        s, built, closed, matches, resolved, exact, bad, closed.h_count == built.h_count, x_match, tuple(notes)
    )


def _or_interference_histogram(inst: GcpInstance, m: int) -> dict[int, int]:
    """Histogram of the expanded edge-interference product without any penalty terms."""
    B = log2_ceil(inst.num_colors) + 1
    n = inst.num_vertices * B
    total = Polynomial(n)
    for u, v in inst.edges:
        prod = Polynomial(n, (), 1)
        for r in range(B):
            pair = Polynomial(n, (monomial(-1, u * B + r), monomial(-1, v * B + r)), 1)
            prod = prod * pair
        total = total + prod
    return {k: c * m for k, c in sorted(total.degree_histogram().items()) if k >= 1}


def grover_iterations(n: int) -> int:
    """``ceil(sqrt(2**n))``."""
    N = 1 << n
    r = math.isqrt(N)
    return r if r * r == N else r + 1


def total_t_gates(t_count_per_ay: int, n: int) -> int:
    """T gates for the whole search: ``A_y`` and its inverse in each of ``ceil(sqrt(2**n))`` rotations."""
    return t_count_per_ay * 2 * grover_iterations(n)


def t_count(params: StrategyParams | GcpInstance, strategy: Strategy | str, decomposition: str = TOFFOLI) -> int:
    """T gates per ``A_y``: closed form where one exists, construction for the descending code."""
    p = _params(params)
    s = Strategy.parse(strategy)
    if s is Strategy.DSC:
        if p.instance is None:
            raise ValueError("the descending code is counted by construction and needs an instance")
        return constructed_counts(p.instance, s).t_count(decomposition)
    return gate_counts_closed_form(p, s).t_count(decomposition)


def tgate_totals(params: StrategyParams | GcpInstance, strategy: Strategy | str, decomposition: str = TOFFOLI) -> int:
    p = _params(params)
    s = Strategy.parse(strategy)
    return total_t_gates(t_count(p, s, decomposition), qubit_counts(p, s).n)


def closed_form_terms(params: StrategyParams | GcpInstance, strategy: Strategy | str) -> int | None:
    """Number of non-constant terms implied by the closed-form histogram, if there is one."""
    p = _params(params)
    s = Strategy.parse(strategy)
    if s is Strategy.DSC:
        return None
    rep = gate_counts_closed_form(p, s, m=1)
    return sum(rep.histogram.values())

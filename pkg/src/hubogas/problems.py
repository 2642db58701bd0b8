"""Graph coloring and TSP objectives under one-hot and binary index codes.

Each builder returns a :class:`Formulation`: the polynomial, the index code,
the variable layout ``layout[entity][r]`` and the *emission groups*, i.e. the
builder's term order grouped by codeword slot.  Circuit synthesis walks the
groups in order so that Gray-coded X gates line up across neighbouring slots.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .boolpoly import (
    DEFAULT_ENUMERATION_CAP,
    FactoredTerm,
    Polynomial,
    TermKey,
    bits_of,
    expand,
    monomial,
)
from .encoding import IndexCode, Strategy, delta, make_code, odd_parity_slots, unused_codewords


# --------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class GcpInstance:
    """Vertex coloring of an undirected graph with ``num_colors`` colors.

    Penalty weights: ``penalty`` for the one-hot QUBO, ``penalty_range`` for
    unused codewords in the binary codes, ``penalty_parity`` and
    ``penalty_unused`` for the odd-weight and unused even-weight words of the
    even-parity code.
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    num_colors: int
    penalty: int = 1
    penalty_range: int = 1
    penalty_parity: int = 1
    penalty_unused: int = 1

    def __post_init__(self):
        if self.num_vertices < 1:
            raise ValueError("need at least one vertex")
        if self.num_colors < 1:
            raise ValueError("need at least one color")
        norm = []
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"edge ({u}, {v}) outside 0..{self.num_vertices - 1}")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            norm.append(e)
        object.__setattr__(self, "edges", tuple(norm))
        for name in ("penalty", "penalty_range", "penalty_parity", "penalty_unused"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.num_vertices
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def with_penalties(self, value: int) -> GcpInstance:
        return replace(self, penalty=value, penalty_range=value, penalty_parity=value, penalty_unused=value)

    def safe_penalties(self) -> GcpInstance:
        """Penalties large enough that no constraint violation can pay off.

        Dropping a vertex out of the valid code saves at most ``deg(v)``
        conflicts; odd parity words can also cancel up to ``deg(v)/2`` more
        through negative interference, hence ``2 * maxdeg + 1``.
        """
        return self.with_penalties(2 * max(self.degrees(), default=0) + 1)


@dataclass(frozen=True)
class TspInstance:
    """Closed-tour TSP on a symmetric integer distance matrix."""

    weights: tuple[tuple[int, ...], ...]
    penalty_city: int = 1
    penalty_order: int = 1
    penalty_slot: int = 1
    penalty_range: int = 1

    def __post_init__(self):
        w = tuple(tuple(int(x) for x in row) for row in self.weights)
        n = len(w)
        if n < 2:
            raise ValueError("need at least two cities")
        for u in range(n):
            if len(w[u]) != n:
                raise ValueError("distance matrix must be square")
            if w[u][u] != 0:
                raise ValueError("distance matrix must have a zero diagonal")
            for v in range(n):
                if w[u][v] != w[v][u]:
                    raise ValueError("distance matrix must be symmetric")
                if w[u][v] < 0:
                    raise ValueError("distances must be nonnegative")
        object.__setattr__(self, "weights", w)

    @property
    def num_cities(self) -> int:
        return len(self.weights)

    def with_penalties(self, value: int) -> TspInstance:
        return replace(self, penalty_city=value, penalty_order=value, penalty_slot=value, penalty_range=value)

    def safe_penalties(self) -> TspInstance:
        total = sum(sum(row) for row in self.weights) // 2
        return self.with_penalties(total + 1)

    def tour_length(self, order: Sequence[int]) -> int:
        n = len(order)
        return sum(self.weights[order[i]][order[(i + 1) % n]] for i in range(n))


# --------------------------------------------------------------------------
# formulation container


@dataclass(frozen=True, eq=False)
class Formulation:
    problem: str
    strategy: Strategy
    polynomial: Polynomial
    code: IndexCode
    layout: tuple[tuple[int, ...], ...]
    groups: tuple[tuple[TermKey, ...], ...]
    instance: GcpInstance | TspInstance
    factored_circuit: bool = False
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def num_vars(self) -> int:
        return self.polynomial.num_vars

    @property
    def synthesis_polynomial(self) -> Polynomial:
        """The form that is mapped to gates: factored for HUBO-PF, expanded otherwise."""
        if "synth" not in self._cache:
            self._cache["synth"] = self.polynomial if self.factored_circuit else expand(self.polynomial)
        return self._cache["synth"]

    @property
    def emission_groups(self) -> tuple[tuple[TermKey, ...], ...] | None:
        return self.groups if self.factored_circuit else None

    def values(self, cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
        return self.polynomial.values(cap)


class _Collector:
    """Accumulates terms group by group and merges them into one polynomial."""

    def __init__(self, num_vars: int):
        self.num_vars = num_vars
        self.terms: list[FactoredTerm] = []
        self.group_of: dict[TermKey, int] = {}
        self.order: list[TermKey] = []
        self.constant = 0
        self.group = -1

    def new_group(self) -> None:
        self.group += 1

    def add(self, term: FactoredTerm | None) -> None:
        if term is None:
            return
        if not term.literals:
            self.constant += term.coefficient
            return
        self.terms.append(term)
        if term.key not in self.group_of:
            self.group_of[term.key] = max(self.group, 0)
            self.order.append(term.key)

    def add_poly(self, poly: Polynomial) -> None:
        for t in poly.terms:
            self.add(t)
        self.constant += poly.constant

    def build(self) -> tuple[Polynomial, tuple[tuple[TermKey, ...], ...]]:
        poly = Polynomial(self.num_vars, self.terms, self.constant)
        live = poly.term_map()
        buckets: dict[int, list[TermKey]] = {}
        for k in self.order:
            if k in live:
                buckets.setdefault(self.group_of[k], []).append(k)
        return poly, tuple(tuple(buckets[g]) for g in sorted(buckets))


def _layout(num_entities: int, width: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(e * width + r for r in range(width)) for e in range(num_entities))


def _linear(num_vars: int, variables: Iterable[int], coeff: int = 1, const: int = 0) -> Polynomial:
    return Polynomial(num_vars, (monomial(coeff, v) for v in variables), const)


def _binary_code(strategy: Strategy | str, num_indices: int) -> IndexCode:
    strategy = Strategy.parse(strategy)
    if strategy not in (Strategy.ASC, Strategy.DSC, Strategy.GRAY_PF):
        raise ValueError(f"expected asc, dsc or pf, got {strategy.value}")
    return make_code(strategy, num_indices)


# --------------------------------------------------------------------------
# graph coloring


def gcp_qubo(inst: GcpInstance) -> Formulation:
    """One-hot QUBO: edge conflicts plus ``penalty * (1 - sum_i x_vi)**2``."""
    V, I = inst.num_vertices, inst.num_colors
    n = V * I
    layout = _layout(V, I)
    col = _Collector(n)
    for i in range(I):
        col.new_group()
        for u, v in inst.edges:
            col.add(monomial(1, layout[u][i], layout[v][i]))
    for v in range(V):
        col.new_group()
        row = _linear(n, layout[v], -1, 1)
        col.add_poly((row * row).scaled(inst.penalty))
    poly, groups = col.build()
    return Formulation("gcp", Strategy.ONE_HOT, poly, make_code(Strategy.ONE_HOT, I), layout, groups, inst)


def gcp_hubo(inst: GcpInstance, strategy: Strategy | str = Strategy.GRAY_PF) -> Formulation:
    """Binary-coded coloring: ``sum_edges sum_i d_ui d_vi`` plus unused-slot penalties.

    Terms are emitted slot by slot (``i = 1 .. 2**B``) which for the Gray code
    makes consecutive X sandwiches differ in a single qubit per vertex.
    """
    code = _binary_code(strategy, inst.num_colors)
    V, B = inst.num_vertices, code.width
    n = V * B
    layout = _layout(V, B)
    unused = set(unused_codewords(code))
    col = _Collector(n)
    for i in range(1, code.num_slots + 1):
        col.new_group()
        if i <= inst.num_colors:
            for u, v in inst.edges:
                col.add(delta(code, i, layout[u]) * delta(code, i, layout[v]))
        elif i in unused:
            for v in range(V):
                col.add(delta(code, i, layout[v], inst.penalty_range))
    poly, groups = col.build()
    return Formulation(
        "gcp", code.strategy, poly, code, layout, groups, inst,
        factored_circuit=code.strategy is Strategy.GRAY_PF,
    )


def gcp_hubo_or(inst: GcpInstance, pf_constraints: bool = False) -> Formulation:
    """Even-parity code: interference ``prod_r (1 - x_ur - x_vr)`` plus parity/range penalties.

    The interference product is expanded; constraint indicators stay factored
    in :attr:`Formulation.polynomial` and are expanded for synthesis unless
    ``pf_constraints`` is set.
    """
    code = make_code(Strategy.EVEN_OR, inst.num_colors)
    V, B = inst.num_vertices, code.width
    n = V * B
    layout = _layout(V, B)
    col = _Collector(n)
    col.new_group()
    for u, v in inst.edges:
        prod = Polynomial(n, (), 1)
        for r in range(B):
            prod = prod * _linear(n, (layout[u][r], layout[v][r]), -1, 1)
        col.add_poly(prod)
    parity = set(odd_parity_slots(code))
    penalised = sorted(parity | set(unused_codewords(code)), key=lambda s: code.codeword(s))
    for s in penalised:
        col.new_group()
        weight = inst.penalty_parity if s in parity else inst.penalty_unused
        for v in range(V):
            col.add(delta(code, s, layout[v], weight))
    poly, groups = col.build()
    return Formulation("gcp", Strategy.EVEN_OR, poly, code, layout, groups, inst, factored_circuit=pf_constraints)


def gcp_formulation(inst: GcpInstance, strategy: Strategy | str, **kw) -> Formulation:
    strategy = Strategy.parse(strategy)
    if strategy is Strategy.ONE_HOT:
        return gcp_qubo(inst)
    if strategy is Strategy.EVEN_OR:
        return gcp_hubo_or(inst, **kw)
    return gcp_hubo(inst, strategy)


# --------------------------------------------------------------------------
# traveling salesman


def tsp_qubo(inst: TspInstance) -> Formulation:
    """One-hot QUBO with ``x[v, i] = 1`` iff city ``v`` is visited at step ``i``.

    The travel cost sums over ordered city pairs so a closed tour contributes
    its full length; step ``N`` wraps to step 1.
    """
    N = inst.num_cities
    n = N * N
    layout = _layout(N, N)
    W = inst.weights
    col = _Collector(n)
    for i in range(N):
        col.new_group()
        nxt = (i + 1) % N
        for u in range(N):
            for v in range(N):
                if u != v and W[u][v]:
                    col.add(monomial(W[u][v], layout[u][i], layout[v][nxt]))
    for v in range(N):
        col.new_group()
        row = _linear(n, layout[v], -1, 1)
        col.add_poly((row * row).scaled(inst.penalty_city))
    for i in range(N):
        col.new_group()
        column = _linear(n, (layout[v][i] for v in range(N)), -1, 1)
        col.add_poly((column * column).scaled(inst.penalty_order))
    poly, groups = col.build()
    return Formulation("tsp", Strategy.ONE_HOT, poly, make_code(Strategy.ONE_HOT, N), layout, groups, inst)


def tsp_hubo(inst: TspInstance, strategy: Strategy | str = Strategy.GRAY_PF) -> Formulation:
    """Binary-coded visiting order: travel cost + one-city-per-step + unused-slot penalties."""
    N = inst.num_cities
    code = _binary_code(strategy, N)
    B = code.width
    n = N * B
    layout = _layout(N, B)
    W = inst.weights
    unused = set(unused_codewords(code))
    col = _Collector(n)
    for i in range(1, code.num_slots + 1):
        col.new_group()
        if i <= N:
            nxt = i % N + 1
            for u in range(N):
                for v in range(N):
                    if u != v and W[u][v]:
                        col.add(delta(code, i, layout[u], W[u][v]) * delta(code, nxt, layout[v]))
            occupancy = Polynomial(n, (delta(code, i, layout[v], -1) for v in range(N)), 1)
            col.add_poly((occupancy * occupancy).scaled(inst.penalty_slot))
        elif i in unused:
            for v in range(N):
                col.add(delta(code, i, layout[v], inst.penalty_range))
    poly, groups = col.build()
    return Formulation(
        "tsp", code.strategy, poly, code, layout, groups, inst,
        factored_circuit=code.strategy is Strategy.GRAY_PF,
    )


def tsp_formulation(inst: TspInstance, strategy: Strategy | str) -> Formulation:
    strategy = Strategy.parse(strategy)
    if strategy is Strategy.ONE_HOT:
        return tsp_qubo(inst)
    return tsp_hubo(inst, strategy)


# --------------------------------------------------------------------------
# solving and decoding


def brute_force_min(form: Formulation | Polynomial, cap: int = DEFAULT_ENUMERATION_CAP) -> tuple[tuple[int, ...], int]:
    """Global minimiser by exhaustive scan; ties go to the smallest ``sum(x_j << j)``."""
    poly = form.polynomial if isinstance(form, Formulation) else form
    vals = poly.values(cap)
    x = int(np.argmin(vals))
    return tuple(bits_of(x, poly.num_vars)), int(vals[x])


@dataclass(frozen=True)
class Coloring:
    colors: tuple[int | None, ...]
    invalid: dict[int, str]

    @property
    def valid(self) -> bool:
        return not self.invalid

    def conflicts(self, inst: GcpInstance) -> int:
        return sum(1 for u, v in inst.edges if self.colors[u] is not None and self.colors[u] == self.colors[v])


@dataclass(frozen=True)
class Tour:
    position: tuple[int | None, ...]  # city -> 1-based visiting step
    invalid: dict[int, str]

    @property
    def valid(self) -> bool:
        return not self.invalid

    @property
    def order(self) -> tuple[int, ...] | None:
        if not self.valid:
            return None
        return tuple(sorted(range(len(self.position)), key=lambda c: self.position[c]))


def decode(form: Formulation, assignment: Sequence[int]) -> Coloring | Tour:
    if len(assignment) != form.num_vars:
        raise ValueError(f"assignment has length {len(assignment)}, expected {form.num_vars}")
    picks: list[int | None] = []
    invalid: dict[int, str] = {}
    for e, vars_ in enumerate(form.layout):
        bits = [int(assignment[v]) for v in vars_]
        idx = form.code.decode(bits)
        picks.append(idx)
        if idx is None:
            invalid[e] = form.code.invalid_reason(bits)
    if form.problem == "gcp":
        return Coloring(tuple(picks), invalid)
    taken: dict[int, int] = {}
    for city, step in enumerate(picks):
        if step is None:
            continue
        if step in taken:
            invalid[city] = f"step {step} shared with city {taken[step]}"
        else:
            taken[step] = city
    return Tour(tuple(picks), invalid)


def encode_coloring(form: Formulation, colors: Sequence[int]) -> tuple[int, ...]:
    """Assignment representing a coloring (1-based colors) in ``form``'s layout."""
    x = [0] * form.num_vars
    for v, c in enumerate(colors):
        for var, b in zip(form.layout[v], form.code.codeword(c)):
            x[var] = b
    return tuple(x)


def encode_tour(form: Formulation, order: Sequence[int]) -> tuple[int, ...]:
    x = [0] * form.num_vars
    for step, city in enumerate(order, 1):
        for var, b in zip(form.layout[city], form.code.codeword(step)):
            x[var] = b
    return tuple(x)


def min_conflicts(inst: GcpInstance) -> int:
    """Fewest monochromatic edges over all ``I**V`` colorings."""
    best = None
    for colors in itertools.product(range(inst.num_colors), repeat=inst.num_vertices):
        c = sum(1 for u, v in inst.edges if colors[u] == colors[v])
        if best is None or c < best:
            best = c
            if best == 0:
                break
    return best


def shortest_tour(inst: TspInstance) -> tuple[tuple[int, ...], int]:
    N = inst.num_cities
    best = None
    for rest in itertools.permutations(range(1, N)):
        order = (0,) + rest
        length = inst.tour_length(order)
        if best is None or length < best[1]:
            best = (order, length)
    return best


# --------------------------------------------------------------------------
# graphs and instance files


def circulant_graph(num_vertices: int, offsets: Iterable[int]) -> tuple[tuple[int, int], ...]:
    edges = set()
    for v in range(num_vertices):
        for d in offsets:
            w = (v + d) % num_vertices
            if w != v:
                edges.add((min(v, w), max(v, w)))
    return tuple(sorted(edges))


def family_instance(num_vertices: int) -> GcpInstance:
    """Sweep instance: 6-regular circulant graph (offsets 1, 2, 3) with ``I = V / 4`` colors."""
    if num_vertices < 8 or num_vertices % 4:
        raise ValueError("family instances need V >= 8 and V divisible by 4")
    return GcpInstance(num_vertices, circulant_graph(num_vertices, (1, 2, 3)), num_vertices // 4)


def convergence_instance() -> GcpInstance:
    """Fixed ``(V, I) = (5, 4)`` graph used for the convergence study: a 5-cycle plus one chord."""
    return GcpInstance(5, ((0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2)), 4)


def _content_lines(text: str) -> list[list[str]]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line.split())
    return out


def parse_gcp(text: str, **penalties) -> GcpInstance:
    """``V I`` header followed by one ``u v`` edge per line (0-based vertices)."""
    rows = _content_lines(text)
    if not rows or len(rows[0]) != 2:
        raise ValueError("graph file must start with a 'V I' header")
    V, I = map(int, rows[0])
    edges = []
    for r in rows[1:]:
        if len(r) != 2:
            raise ValueError(f"bad edge line {' '.join(r)!r}")
        edges.append((int(r[0]), int(r[1])))
    return GcpInstance(V, tuple(edges), I, **penalties)


def dump_gcp(inst: GcpInstance) -> str:
    lines = [f"{inst.num_vertices} {inst.num_colors}"] + [f"{u} {v}" for u, v in inst.edges]
    return "\n".join(lines) + "\n"


def parse_tsp(text: str, **penalties) -> TspInstance:
    """``N`` header, then row ``u`` lists ``W[u][u+1:]`` for ``u = 0 .. N-2``."""
    rows = _content_lines(text)
    if not rows or len(rows[0]) != 1:
        raise ValueError("TSP file must start with an 'N' header")
    N = int(rows[0][0])
    W = [[0] * N for _ in range(N)]
    body = rows[1:]
    if len(body) != N - 1:
        raise ValueError(f"expected {N - 1} distance rows, got {len(body)}")
    for u, r in enumerate(body):
        if len(r) != N - 1 - u:
            raise ValueError(f"row {u} should have {N - 1 - u} entries")
        for k, w in enumerate(r):
            v = u + 1 + k
            W[u][v] = W[v][u] = int(w)
    return TspInstance(tuple(map(tuple, W)), **penalties)


def dump_tsp(inst: TspInstance) -> str:
    N = inst.num_cities
    lines = [str(N)] + [" ".join(str(inst.weights[u][v]) for v in range(u + 1, N)) for u in range(N - 1)]
    return "\n".join(lines) + "\n"

"""Grover adaptive search with an exact and an analytic sampling backend.

Each round draws a rotation count ``L`` uniformly from ``{0, .., ceil(k)-1}``,
amplifies the assignments with ``E(x) < y`` using ``L`` Grover rotations and
measures.  An improvement lowers ``y`` and resets ``k`` to 1; otherwise
``k`` grows by ``growth`` up to ``sqrt(2**n)``.

The analytic backend relies on the fact that amplitude amplification keeps
amplitudes uniform inside the marked and the unmarked set, so a measurement
is "marked with probability ``sin^2((2L+1) asin sqrt(t/N))``, then uniform
within the chosen set".
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .boolpoly import DEFAULT_ENUMERATION_CAP, Polynomial, shift, value_register_width
from .circuit import Circuit, synthesize_Ay
from .problems import Formulation
from .simulator import MAX_QUBITS, SimulationTooLarge, grover_state, measure_key

ANALYTIC = "analytic"
STATEVECTOR = "statevector"


@dataclass(frozen=True)
class GasConfig:
    max_total_rotations: int = 10_000
    growth: Fraction = Fraction(8, 7)
    seed: int = 0
    backend: str = ANALYTIC
    initial_threshold: int | None = None  # None: value of one uniformly random assignment
    max_samples: int = 100_000
    stop_at_optimum: bool = True

    def __post_init__(self):
        if self.max_total_rotations <= 0:
            raise ValueError("rotation budget must be positive")
        if not self.growth > 1:
            raise ValueError("schedule growth must exceed 1")
        if self.backend not in (ANALYTIC, STATEVECTOR):
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass(frozen=True)
class GasStep:
    rotations: int
    cum_rotations: int
    oracle_calls: int  # cumulative A_y / A_y^dagger applications, sum of (2L + 1)
    threshold: int  # y after this measurement
    x: int
    value: int
    accepted: bool
    value_normalized: float | None = None


@dataclass(frozen=True)
class GasTrace:
    steps: tuple[GasStep, ...]
    optimum: int | None
    converged_at: int | None
    seed: int
    num_vars: int

    @property
    def final_threshold(self) -> int:
        return self.steps[-1].threshold

    @property
    def total_rotations(self) -> int:
        return self.steps[-1].cum_rotations


def success_probability(N: int, t: int, rotations: int) -> float:
    """``sin^2((2L+1) asin sqrt(t/N))``."""
    if not 0 <= t <= N or N <= 0:
        raise ValueError("need 0 <= t <= N and N > 0")
    if t == 0:
        return 0.0
    if t == N:
        return 1.0
    return math.sin((2 * rotations + 1) * math.asin(math.sqrt(t / N))) ** 2


def analytic_sample(N: int, t: int, rotations: int, rng: np.random.Generator) -> bool:
    """Whether a measurement after ``rotations`` Grover steps lands in the marked set."""
    if t == 0:
        return False
    if t == N:
        return True
    return bool(rng.random() < success_probability(N, t, rotations))


class _AnalyticSampler:
    def __init__(self, values: np.ndarray):
        self.order = np.argsort(values, kind="stable")
        self.sorted = values[self.order]
        self.N = values.size

    def __call__(self, y: int, rotations: int, rng: np.random.Generator) -> int:
        t = int(np.searchsorted(self.sorted, y, side="left"))
        if analytic_sample(self.N, t, rotations, rng):
            rank = int(rng.integers(0, t))
        else:
            rank = int(rng.integers(t, self.N))
        return int(self.order[rank])


class _StatevectorSampler:
    def __init__(self, poly: Polynomial, groups, max_qubits: int):
        self.poly = poly
        self.groups = groups
        self.max_qubits = max_qubits
        self._circuits: dict[int, Circuit] = {}

    def circuit(self, y: int) -> Circuit:
        if y not in self._circuits:
            m = value_register_width(shift(self.poly, y))
            if self.poly.num_vars + m > self.max_qubits:
                raise SimulationTooLarge(
                    f"{self.poly.num_vars}+{m} qubits exceed the statevector limit of {self.max_qubits}"
                )
            self._circuits[y] = synthesize_Ay(self.poly, y, m, groups=self.groups)
        return self._circuits[y]

    def __call__(self, y: int, rotations: int, rng: np.random.Generator) -> int:
        return measure_key(grover_state(self.circuit(y), rotations), rng)


def _target(form: Formulation | Polynomial):
    if isinstance(form, Formulation):
        return form.polynomial, form.synthesis_polynomial, form.emission_groups
    return form, form, None


class _Problem:
    """Everything a run needs that does not depend on the seed."""

    def __init__(self, form, cfg: GasConfig, optimum, cap, max_qubits):
        poly, synth_poly, groups = _target(form)
        self.values = poly.values(cap)
        self.optimum = int(self.values.min()) if optimum is None else int(optimum)
        self.n = poly.num_vars
        if cfg.backend == ANALYTIC:
            self.sampler = _AnalyticSampler(self.values)
        else:
            limit = MAX_QUBITS if max_qubits is None else max_qubits
            self.sampler = _StatevectorSampler(synth_poly, groups, limit)


def run(
    form: Formulation | Polynomial,
    cfg: GasConfig,
    optimum: int | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
    max_qubits: int | None = None,
) -> GasTrace:
    """One seeded GAS run; ``optimum`` defaults to the brute-force minimum."""
    return _run(_Problem(form, cfg, optimum, cap, max_qubits), cfg)


def _run(prob: _Problem, cfg: GasConfig) -> GasTrace:
    values, optimum, n, sampler = prob.values, prob.optimum, prob.n, prob.sampler
    N = 1 << n
    rng = np.random.default_rng(cfg.seed)

    if cfg.initial_threshold is None:
        x = int(rng.integers(0, N))
        y = int(values[x])
    else:
        x, y = -1, int(cfg.initial_threshold)
    steps = [GasStep(0, 0, 0, y, x, y, True)]
    converged_at = 0 if y <= optimum and x >= 0 else None
    if converged_at is not None and cfg.stop_at_optimum:
        return GasTrace(tuple(steps), optimum, converged_at, cfg.seed, n)

    k = Fraction(1)
    k_cap = math.sqrt(N)
    cum = calls = 0
    for _ in range(cfg.max_samples):
        L = int(rng.integers(0, math.ceil(k)))
        if cum + L > cfg.max_total_rotations:
            break
        x = sampler(y, L, rng)
        cum += L
        calls += 2 * L + 1
        v = int(values[x])
        accepted = v < y
        if accepted:
            y = v
            k = Fraction(1)
        else:
            k = k * cfg.growth if k * cfg.growth <= k_cap else Fraction(k_cap)
        steps.append(GasStep(L, cum, calls, y, x, v, accepted))
        if accepted and converged_at is None and y == optimum:
            converged_at = cum
            if cfg.stop_at_optimum:
                break
    return GasTrace(tuple(steps), optimum, converged_at, cfg.seed, n)


def trial_seeds(seed: int, trials: int) -> list[int]:
    """Independent per-trial seeds derived from one master seed."""
    children = np.random.SeedSequence(seed).spawn(trials)
    return [int(c.generate_state(1, dtype=np.uint64)[0] >> 1) for c in children]


def run_trials(
    form: Formulation | Polynomial,
    cfg: GasConfig,
    trials: int,
    optimum: int | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
    max_qubits: int | None = None,
) -> list[GasTrace]:
    """``trials`` independent runs seeded from ``cfg.seed`` via :func:`trial_seeds`."""
    prob = _Problem(form, cfg, optimum, cap, max_qubits)
    return [_run(prob, replace(cfg, seed=s)) for s in trial_seeds(cfg.seed, trials)]


def success_cdf(traces: Sequence[GasTrace]) -> list[tuple[int, float]]:
    """Empirical CDF of ``converged_at``: ``(rotations, fraction converged by then)`` at each jump.

    Unconverged traces count in the denominator only.  With no convergence
    the CDF is the single point ``(0, 0.0)``.
    """
    total = len(traces)
    hits = sorted(t.converged_at for t in traces if t.converged_at is not None)
    if not total or not hits:
        return [(0, 0.0)]
    out = []
    for i, r in enumerate(hits, 1):
        if out and out[-1][0] == r:
            out[-1] = (r, i / total)
        else:
            out.append((r, i / total))
    return out


def cdf_at(cdf: Sequence[tuple[int, float]], rotations: float) -> float:
    """Evaluate a step CDF from :func:`success_cdf` (right-continuous)."""
    frac = 0.0
    for r, f in cdf:
        if r > rotations:
            break
        frac = f
    return frac


def normalize_value(value: float, lo: float, hi: float) -> float:
    return 0.0 if hi == lo else (value - lo) / (hi - lo)


def normalize_objective(trace: GasTrace, form: Formulation | Polynomial | tuple[int, int]) -> GasTrace:
    """Attach ``value_normalized`` (the threshold rescaled by the objective's min/max) to every step."""
    if isinstance(form, tuple):
        lo, hi = form
    else:
        vals = _target(form)[0].values()
        lo, hi = int(vals.min()), int(vals.max())
    steps = tuple(replace(s, value_normalized=normalize_value(s.threshold, lo, hi)) for s in trace.steps)
    return replace(trace, steps=steps)

"""Figure-data pipelines, experiment files and run manifests used by the CLI."""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import platform
import time
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from ._jit import backend_name
from .analysis import constructed_counts, gate_counts_closed_form, grover_iterations, qubit_counts, total_t_gates
from .encoding import Strategy
from .gas import GasConfig, normalize_objective, run_trials, success_cdf
from .problems import GcpInstance, convergence_instance, family_instance, gcp_formulation

FIGURES = ("qubits", "terms", "tgates", "tgates_total", "convergence", "cdf")
LABELS = {Strategy.ONE_HOT: "qubo", Strategy.ASC: "asc", Strategy.DSC: "dsc", Strategy.GRAY_PF: "pf", Strategy.EVEN_OR: "or"}
ALL_STRATEGIES = ("qubo", "asc", "dsc", "pf", "or")
CONVERGENCE_STRATEGIES = ("qubo", "or", "pf")


def label(strategy: Strategy | str) -> str:
    return LABELS[Strategy.parse(strategy)]


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.replace(",", " ").split())


def _strs(text: str) -> tuple[str, ...]:
    return tuple(t for t in text.replace(",", " ").split())


@dataclass(frozen=True)
class ExperimentSpec:
    figure: str
    v_values: tuple[int, ...] = tuple(range(8, 65, 4))
    strategies: tuple[str, ...] = ()
    trials: int = 100
    seed: int = 0
    budget_constant: int = 4
    backend: str = "analytic"
    penalty: int = 1
    penalty_parity: int = 2
    svg: bool = False

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(f"figure must be one of {FIGURES}")
        if not self.strategies:
            default = CONVERGENCE_STRATEGIES if self.figure in ("convergence", "cdf") else ALL_STRATEGIES
            object.__setattr__(self, "strategies", default)
        object.__setattr__(self, "strategies", tuple(label(s) for s in self.strategies))
        if self.figure in ("convergence", "cdf"):
            if self.trials < 1:
                raise ValueError("trials must be positive")
            if self.budget_constant < 1:
                raise ValueError("budget_constant must be positive")
        elif any(v < 8 or v % 4 for v in self.v_values):
            raise ValueError("sweep values must be multiples of 4, at least 8")

    @classmethod
    def from_config(cls, text: str, **overrides) -> ExperimentSpec:
        """Parse ``key = value`` lines (``#`` comments allowed); ``overrides`` win."""
        kinds = {f.name: f.type for f in fields(cls)}
        values: dict = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in kinds:
                raise ValueError(f"config line {lineno}: unknown key {key!r}")
            values[key] = _coerce(key, val)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def convergence_instance(self) -> GcpInstance:
        return replace(convergence_instance().with_penalties(self.penalty), penalty_parity=self.penalty_parity)

    def budget(self, n: int) -> int:
        """Rotation budget ``C * ceil(sqrt(2**n))``."""
        return grover_iterations(n) * self.budget_constant


def _coerce(key: str, val: str):
    if key == "v_values":
        if ":" in val:
            lo, hi, *step = (int(t) for t in val.split(":"))
            return tuple(range(lo, hi + 1, step[0] if step else 4))
        return _ints(val)
    if key == "strategies":
        return _strs(val)
    if key == "svg":
        return val.lower() in ("1", "true", "yes", "on")
    if key in ("figure", "backend"):
        return val
    return int(val)


# --------------------------------------------------------------------------
# figure rows


def _family_rows(spec: ExperimentSpec) -> list[tuple]:
    rows = []
    for V in spec.v_values:
        inst = family_instance(V).with_penalties(spec.penalty)
        for name in spec.strategies:
            s = Strategy.parse(name)
            q = qubit_counts(inst, s)
            if spec.figure == "qubits":
                rows += [(V, name, "n", q.n), (V, name, "m", q.m), (V, name, "total", q.total),
                         (V, name, "lower_bound", round(q.lower_bound, 6))]
                continue
            built = constructed_counts(inst, s) if spec.figure == "terms" or s is Strategy.DSC else None
            if spec.figure == "terms":
                rows.append((V, name, "terms", built.terms))
                continue
            if s is Strategy.DSC:
                t_tof, t_rtof = built.t_count_toffoli, built.t_count_rtof
            else:
                rep = gate_counts_closed_form(inst, s)
                t_tof, t_rtof = rep.t_count_toffoli, rep.t_count_rtof
            if spec.figure == "tgates":
                rows += [(V, name, "t_toffoli", t_tof), (V, name, "t_rtof", t_rtof)]
            else:
                rows += [(V, name, "t_total_toffoli", total_t_gates(t_tof, q.n)),
                         (V, name, "t_total_rtof", total_t_gates(t_rtof, q.n))]
    return rows


@dataclass
class ConvergenceResult:
    traces: dict[str, list]
    budgets: dict[str, int]
    search_space: dict[str, int]

    def cdf(self, name: str):
        return success_cdf(self.traces[name])


def run_convergence(spec: ExperimentSpec) -> ConvergenceResult:
    inst = spec.convergence_instance()
    traces, budgets, sizes = {}, {}, {}
    for name in spec.strategies:
        form = gcp_formulation(inst, name)
        budgets[name] = spec.budget(form.num_vars)
        sizes[name] = form.num_vars
        cfg = GasConfig(max_total_rotations=budgets[name], seed=spec.seed, backend=spec.backend)
        traces[name] = [normalize_objective(t, form) for t in run_trials(form, cfg, spec.trials)]
    return ConvergenceResult(traces, budgets, sizes)


TRACE_HEADER = ("strategy", "trial", "step", "cum_rotations", "y", "value_normalized", "oracle_calls")
CDF_HEADER = ("strategy", "rotations", "fraction")
FAMILY_HEADER = ("V", "strategy", "metric", "value")


def trace_rows(name: str, traces: Sequence) -> list[tuple]:
    rows = []
    for trial, tr in enumerate(traces):
        for step, s in enumerate(tr.steps):
            norm = "" if s.value_normalized is None else f"{s.value_normalized:.6f}"
            rows.append((name, trial, step, s.cum_rotations, s.threshold, norm, s.oracle_calls))
    return rows


def cdf_rows(name: str, cdf: Sequence[tuple[int, float]]) -> list[tuple]:
    return [(name, r, f"{f:.6f}") for r, f in cdf]


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------------
# outputs


def _relative(path: str, base: Path | None) -> str:
    if base is None:
        return path
    try:
        return str(Path(path).resolve().relative_to(Path(base).resolve()))
    except ValueError:
        return str(Path(path).resolve())


class RunRecorder:
    """Collects output files and writes a manifest with their checksums."""

    def __init__(self, command: str, spec: dict, seed: int | None = None):
        self.command = command
        self.spec = spec
        self.seed = seed
        self.started = time.time()
        self.outputs: dict[str, str] = {}

    def write_text(self, path: Path, text: str) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        self.add(path)
        return path

    def add(self, path: Path) -> None:
        path = Path(path)
        self.outputs[str(path)] = hashlib.sha256(path.read_bytes()).hexdigest()

    def manifest(self, base: Path | None = None) -> dict:
        return {
            "tool": "hubogas",
            "version": __version__,
            "command": self.command,
            "spec": self.spec,
            "seed": self.seed,
            "kernel_backend": backend_name(),
            "python": platform.python_version(),
            "started_utc": _dt.datetime.fromtimestamp(self.started, _dt.timezone.utc).isoformat(),
            "wall_clock_seconds": round(time.time() - self.started, 3),
            "outputs": {_relative(p, base): h for p, h in sorted(self.outputs.items())},
        }

    def write_manifest(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.manifest(path.parent), indent=2, sort_keys=True) + "\n")
        return path


def run_figure(spec: ExperimentSpec, out_dir: Path, recorder: RunRecorder) -> list[Path]:
    out_dir = Path(out_dir)
    written = []
    if spec.figure in ("convergence", "cdf"):
        res = run_convergence(spec)
        if spec.figure == "convergence":
            rows = [r for name in spec.strategies for r in trace_rows(name, res.traces[name])]
            written.append(recorder.write_text(out_dir / "convergence.csv", csv_text(TRACE_HEADER, rows)))
        else:
            rows = [r for name in spec.strategies for r in cdf_rows(name, res.cdf(name))]
            written.append(recorder.write_text(out_dir / "cdf.csv", csv_text(CDF_HEADER, rows)))
        summary = [(name, res.search_space[name], res.budgets[name],
                    sum(t.converged_at is not None for t in res.traces[name]), spec.trials)
                   for name in spec.strategies]
        written.append(recorder.write_text(
            out_dir / f"{spec.figure}_summary.csv",
            csv_text(("strategy", "num_vars", "rotation_budget", "converged", "trials"), summary)))
        if spec.svg:
            written.append(_svg_convergence(spec, res, out_dir, recorder))
        return written
    rows = _family_rows(spec)
    written.append(recorder.write_text(out_dir / f"{spec.figure}.csv", csv_text(FAMILY_HEADER, rows)))
    if spec.svg:
        written.append(_svg_family(spec, rows, out_dir, recorder))
    return written


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise RuntimeError("--svg needs matplotlib (pip install 'hubogas[plot]')") from exc
    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "hubogas"
    matplotlib.rcParams["svg.fonttype"] = "none"
    import matplotlib.pyplot as plt

    return plt


def _save_svg(fig, path: Path, recorder: RunRecorder) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    recorder.add(path)
    return path


_FAMILY_METRIC = {"qubits": "total", "terms": "terms", "tgates": "t_toffoli", "tgates_total": "t_total_toffoli"}


def _svg_family(spec: ExperimentSpec, rows, out_dir: Path, recorder: RunRecorder) -> Path:
    plt = _pyplot()
    metric = _FAMILY_METRIC[spec.figure]
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in spec.strategies:
        pts = [(V, val) for V, s, mname, val in rows if s == name and mname == metric]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", linestyle="none" if spec.figure == "qubits" else "-", label=name)
        if spec.figure == "qubits":
            lb = [(V, val) for V, s, mname, val in rows if s == name and mname == "lower_bound"]
            ax.plot([p[0] for p in lb], [p[1] for p in lb], linestyle="-", color=ax.lines[-1].get_color())
    ax.set_xlabel("V")
    ax.set_ylabel(metric)
    if spec.figure != "qubits":
        ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    path = _save_svg(fig, out_dir / f"{spec.figure}.svg", recorder)
    plt.close(fig)
    return path


def _svg_convergence(spec: ExperimentSpec, res: ConvergenceResult, out_dir: Path, recorder: RunRecorder) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in spec.strategies:
        if spec.figure == "cdf":
            cdf = [(0, 0.0)] + res.cdf(name)
            ax.step([c[0] for c in cdf], [c[1] for c in cdf], where="post", label=name)
        else:
            tr = res.traces[name][0]
            ax.step([s.cum_rotations for s in tr.steps], [s.value_normalized for s in tr.steps], where="post", label=name)
    ax.set_xscale("symlog")
    ax.set_xlabel("Grover rotations")
    ax.set_ylabel("fraction converged" if spec.figure == "cdf" else "normalized objective")
    ax.legend()
    fig.tight_layout()
    path = _save_svg(fig, out_dir / f"{spec.figure}.svg", recorder)
    plt.close(fig)
    return path


def spec_dict(spec: ExperimentSpec) -> dict:
    d = asdict(spec)
    d["v_values"] = list(d["v_values"])
    d["strategies"] = list(d["strategies"])
    return d

"""``hubogas`` command-line interface."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import boolpoly
from .analysis import grover_iterations
from .circuit import RTOF, TOFFOLI, Circuit, cancel_x, count_resources, loads_circuit, synthesize_Ay
from .encoding import format_table, make_code
from .experiments import (
    CDF_HEADER,
    ExperimentSpec,
    RunRecorder,
    cdf_rows,
    csv_text,
    label,
    run_figure,
    spec_dict,
    trace_rows,
)
from .gas import GasConfig, normalize_objective, run_trials, success_cdf
from .problems import gcp_formulation, parse_gcp, parse_tsp, tsp_formulation
from .simulator import grover_state, key_distribution, measure_key, verify_oracle


# --------------------------------------------------------------------------
# shared plumbing


def _add_penalties(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("penalties")
    g.add_argument("--penalty", type=int, default=None, help="set every penalty weight")
    g.add_argument("--penalty-parity", type=int, default=None, help="odd-parity penalty of the even-parity code")
    g.add_argument("--safe-penalties", action="store_true", help="use weights large enough that violations never pay")


def _add_source(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("polynomial source (a polynomial file, or a problem instance)")
    g.add_argument("--poly", type=Path, help="polynomial text file")
    g.add_argument("--problem", choices=("gcp", "tsp"))
    g.add_argument("--input", type=Path, help="instance file for --problem")
    g.add_argument("--strategy", default="pf", help="qubo | asc | dsc | pf | or")
    _add_penalties(p)


def _formulation(args):
    text = args.input.read_text()
    inst = parse_gcp(text) if args.problem == "gcp" else parse_tsp(text)
    if args.safe_penalties:
        inst = inst.safe_penalties()
    elif args.penalty is not None:
        inst = inst.with_penalties(args.penalty)
    if getattr(args, "penalty_parity", None) is not None and args.problem == "gcp":
        inst = replace(inst, penalty_parity=args.penalty_parity)
    build = gcp_formulation if args.problem == "gcp" else tsp_formulation
    return build(inst, args.strategy)


def _poly_and_groups(args):
    """(polynomial to synthesize, emission groups) from either source."""
    if args.poly is not None:
        return boolpoly.loads(args.poly.read_text()), None
    if args.problem is None or args.input is None:
        raise ValueError("give --poly FILE or --problem KIND --input FILE")
    form = _formulation(args)
    return form.synthesis_polynomial, form.emission_groups


def _width(poly, y: int, m: int | None) -> int:
    return boolpoly.value_register_width(boolpoly.shift(poly, y)) if m is None else m


def _emit(text: str, output: Path | None, recorder: RunRecorder) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    recorder.write_text(output, text)
    recorder.write_manifest(output.with_name(output.name + ".manifest.json"))


def _recorder(args, seed=None) -> RunRecorder:
    spec = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "func"}
    return RunRecorder(" ".join(sys.argv[1:]) or args.command, spec, seed)


# --------------------------------------------------------------------------
# commands


def cmd_encode(args) -> int:
    code = make_code(args.strategy, args.indices)
    print(f"{code.strategy.value}: I={code.num_indices}, width={code.width}")
    print(format_table(code))
    return 0


def cmd_formulate(args) -> int:
    form = _formulation(args)
    poly = boolpoly.expand(form.polynomial) if args.expanded else form.synthesis_polynomial
    header = (
        f"# {args.problem} {label(form.strategy)}: {poly.num_vars} variables, {len(poly.terms)} terms, "
        f"degree {poly.degree}\n"
    )
    _emit(header + boolpoly.dumps(poly), args.output, _recorder(args))
    return 0


def cmd_synth(args) -> int:
    poly, groups = _poly_and_groups(args)
    circ = synthesize_Ay(poly, args.y, _width(poly, args.y, args.m), groups=groups)
    if args.cancel_x:
        circ = cancel_x(circ)
    _emit(circ.dumps(), args.output, _recorder(args))
    return 0


def _circuit_from(args) -> Circuit:
    if args.circuit is not None:
        return loads_circuit(args.circuit.read_text())
    poly, groups = _poly_and_groups(args)
    circ = synthesize_Ay(poly, args.y, _width(poly, args.y, args.m), groups=groups)
    return cancel_x(circ) if args.cancel_x else circ


def cmd_count(args) -> int:
    rep = count_resources(_circuit_from(args), args.decomp)
    rows = [("n", rep.n), ("m", rep.m), ("ancilla", rep.ancilla), ("h_count", rep.h_count),
            ("x_count", rep.x_count)]
    rows += [(f"ckr_{k}", v) for k, v in rep.ckr_histogram.items()]
    rows += [("t_count_toffoli", rep.t_count_toffoli), ("t_count_rtof", rep.t_count_rtof),
             ("t_count", rep.t_count)]
    _emit(csv_text(("metric", "value"), rows), args.output, _recorder(args))
    return 0


def cmd_verify(args) -> int:
    poly, groups = _poly_and_groups(args)
    m = _width(poly, args.y, args.m)
    rep = verify_oracle(poly, args.y, m, groups=groups)
    print(f"n={poly.num_vars} m={m} y={args.y}: {'PASS' if rep.passed else 'FAIL'} - {rep.describe()}")
    if args.output is not None:
        vals = boolpoly.shift(poly, args.y).values()
        rows = [(x, int(r), int(v), int(r >= 1 << (m - 1))) for x, (r, v) in enumerate(zip(rep.registers, vals))]
        _emit(csv_text(("x", "register", "expected", "sign_bit"), rows), args.output, _recorder(args))
    return 0 if rep.passed else 1


def cmd_grover(args) -> int:
    poly, groups = _poly_and_groups(args)
    m = _width(poly, args.y, args.m)
    circ = synthesize_Ay(poly, args.y, m, groups=groups)
    state = grover_state(circ, args.L)
    probs = key_distribution(state)
    vals = poly.values()
    counts = None
    if args.shots:
        counts = np.bincount(measure_key(state, args.seed, shots=args.shots), minlength=probs.size)
    rows = []
    for x, p in enumerate(probs):
        row = [x, "".join(map(str, boolpoly.bits_of(x, poly.num_vars))), f"{p:.12f}", int(vals[x]), int(vals[x] < args.y)]
        if counts is not None:
            row.append(int(counts[x]))
        rows.append(row)
    header = ["x", "bits", "probability", "value", "marked"] + (["count"] if counts is not None else [])
    _emit(csv_text(header, rows), args.output, _recorder(args, args.seed))
    return 0


def cmd_gas(args) -> int:
    if args.problem is None or args.input is None:
        raise ValueError("gas run needs --problem and --input")
    form = _formulation(args)
    budget = args.budget
    if budget is None:
        budget = grover_iterations(form.num_vars) * args.budget_constant
    cfg = GasConfig(max_total_rotations=budget, seed=args.seed, backend=args.backend)
    traces = [normalize_objective(t, form) for t in run_trials(form, cfg, args.trials)]
    name = label(form.strategy)
    rec = _recorder(args, args.seed)
    out = args.out_dir
    trace_csv = csv_text(("trial", "step", "cum_rotations", "y", "value_normalized", "oracle_calls"),
                         [r[1:] for r in trace_rows(name, traces)])
    rec.write_text(out / "trace.csv", trace_csv)
    rec.write_text(out / "cdf.csv", csv_text(CDF_HEADER[1:], [r[1:] for r in cdf_rows(name, success_cdf(traces))]))
    rec.write_manifest(out / "manifest.json")
    done = sum(t.converged_at is not None for t in traces)
    print(f"{name}: n={form.num_vars}, search space 2^{form.num_vars}, budget {budget} rotations, "
          f"{done}/{args.trials} trials reached the optimum")
    return 0


def cmd_figure(args) -> int:
    overrides = {
        "figure": args.figure,
        "v_values": _parse_v(args.v_values) if args.v_values else None,
        "strategies": tuple(args.strategies.replace(",", " ").split()) if args.strategies else None,
        "trials": args.trials,
        "seed": args.seed,
        "budget_constant": args.budget_constant,
        "backend": args.backend,
        "penalty_parity": args.penalty_parity,
        "svg": True if args.svg else None,
    }
    text = args.config.read_text() if args.config else ""
    if args.figure is None and "figure" not in text:
        raise ValueError("choose a figure with --figure or in the --config file")
    spec = ExperimentSpec.from_config(text, **overrides)
    rec = RunRecorder(" ".join(sys.argv[1:]) or "figure", spec_dict(spec), spec.seed)
    paths = run_figure(spec, args.out_dir, rec)
    rec.write_manifest(args.out_dir / f"{spec.figure}.manifest.json")
    for p in paths:
        print(p)
    return 0


def _parse_v(text: str) -> tuple[int, ...]:
    if ":" in text:
        lo, hi, *step = (int(t) for t in text.split(":"))
        return tuple(range(lo, hi + 1, step[0] if step else 4))
    return tuple(int(t) for t in text.replace(",", " ").split())


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hubogas", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="inspect index codes")
    enc_sub = enc.add_subparsers(dest="action", required=True)
    show = enc_sub.add_parser("show", help="print the codeword table")
    show.add_argument("--strategy", required=True)
    show.add_argument("--indices", type=int, required=True)
    show.set_defaults(func=cmd_encode)

    form = sub.add_parser("formulate", help="build the objective polynomial of an instance")
    form.add_argument("--problem", choices=("gcp", "tsp"), required=True)
    form.add_argument("--input", type=Path, required=True)
    form.add_argument("--strategy", default="pf")
    form.add_argument("--expanded", action="store_true", help="write the fully expanded polynomial")
    form.add_argument("--output", type=Path)
    _add_penalties(form)
    form.set_defaults(func=cmd_formulate)

    syn = sub.add_parser("synth", help="synthesize A_y")
    _add_source(syn)
    syn.add_argument("--y", type=int, default=0)
    syn.add_argument("--m", type=int, default=None, help="value-register width (default: smallest that fits)")
    syn.add_argument("--cancel-x", action="store_true")
    syn.add_argument("--output", type=Path)
    syn.set_defaults(func=cmd_synth)

    cnt = sub.add_parser("count", help="resource counts of A_y")
    cnt.add_argument("--circuit", type=Path, help="circuit dump (otherwise synthesized from the source)")
    _add_source(cnt)
    cnt.add_argument("--y", type=int, default=0)
    cnt.add_argument("--m", type=int, default=None)
    cnt.add_argument("--cancel-x", action="store_true")
    cnt.add_argument("--decomp", choices=(TOFFOLI, RTOF), default=TOFFOLI)
    cnt.add_argument("--output", type=Path)
    cnt.set_defaults(func=cmd_count)

    sim = sub.add_parser("simulate", help="statevector simulation")
    sim_sub = sim.add_subparsers(dest="action", required=True)
    ver = sim_sub.add_parser("verify-oracle", help="check the value register on every input")
    _add_source(ver)
    ver.add_argument("--y", type=int, default=0)
    ver.add_argument("--m", type=int, default=None)
    ver.add_argument("--output", type=Path)
    ver.set_defaults(func=cmd_verify)
    gro = sim_sub.add_parser("grover", help="key distribution after L Grover rotations")
    _add_source(gro)
    gro.add_argument("--y", type=int, required=True)
    gro.add_argument("--m", type=int, default=None)
    gro.add_argument("--L", type=int, default=1)
    gro.add_argument("--shots", type=int, default=0)
    gro.add_argument("--seed", type=int, default=0)
    gro.add_argument("--output", type=Path)
    gro.set_defaults(func=cmd_grover)

    gas = sub.add_parser("gas", help="Grover adaptive search")
    gas_sub = gas.add_subparsers(dest="action", required=True)
    grun = gas_sub.add_parser("run", help="seeded GAS trials")
    _add_source(grun)
    grun.add_argument("--trials", type=int, default=100)
    grun.add_argument("--seed", type=int, default=0)
    grun.add_argument("--backend", choices=("analytic", "statevector"), default="analytic")
    grun.add_argument("--budget", type=int, default=None, help="rotation budget per trial")
    grun.add_argument("--budget-constant", type=int, default=4, help="budget = C * ceil(sqrt(2^n)) when --budget is absent")
    grun.add_argument("--out-dir", type=Path, required=True)
    grun.set_defaults(func=cmd_gas)

    fig = sub.add_parser("figure", help="regenerate figure data")
    fig.add_argument("--figure", choices=("qubits", "terms", "tgates", "tgates_total", "convergence", "cdf"))
    fig.add_argument("--config", type=Path, help="key = value experiment file")
    fig.add_argument("--out-dir", type=Path, required=True)
    fig.add_argument("--v-values", help="'8:64:4' or '8,16,32'")
    fig.add_argument("--strategies")
    fig.add_argument("--trials", type=int)
    fig.add_argument("--seed", type=int)
    fig.add_argument("--budget-constant", type=int)
    fig.add_argument("--backend", choices=("analytic", "statevector"))
    fig.add_argument("--penalty-parity", type=int)
    fig.add_argument("--svg", action="store_true")
    fig.set_defaults(func=cmd_figure)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"hubogas {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

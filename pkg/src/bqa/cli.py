"""Command-line experiment runner.

Every subcommand writes CSV preceded by one ``#``-prefixed JSON header line
holding the command, its full configuration and the package version. The
output contains no timestamps, so a fixed configuration always produces
byte-identical files, and ``bqa replay FILE`` re-runs a file from its header.

Commands that produce several tables write the first to ``--out`` (or
stdout) and the rest to siblings ``<stem>.<table>.csv``; on stdout the extra
tables follow, each introduced by a ``# table: <name>`` line.

Exit codes: 0 success, 1 invalid configuration, 2 integration failure,
3 capacity exceeded. ``BQA_WORKERS`` sets the number of worker processes
used by sweeps (default 1).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import check_instance
from .analysis import Histogram, benchmark, sampling_distribution, success_curve, success_probability, write_records
from .evolve import DEFAULT_TOL, adiabatic_initial_state, evolve, instantaneous_spectrum, zero_state
from .exceptions import CapacityError, ConvergenceError, IntegrationError, InvalidArgumentError
from .hamiltonians import bqa_hamiltonian, qa_hamiltonian, single_qutrit_field_hamiltonian
from .instances import brute_force_ground_states, ferromagnetic_ring, random_fully_connected
from .meanfield import phase_diagram, protocol_overlay
from .nested import nest_hamiltonian, nested_initial_state, project_to_qutrit
from .schedules import BqaSchedule, QaSchedule

EXIT_OK, EXIT_CONFIG, EXIT_INTEGRATION, EXIT_CAPACITY = 0, 1, 2, 3
WORKERS_ENV = "BQA_WORKERS"


@dataclass
class Table:
    name: str
    columns: list
    rows: list


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise InvalidArgumentError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise InvalidArgumentError(f"{WORKERS_ENV} must be at least 1")
    return value


def _map(fn, items):
    items = list(items)
    workers = _workers()
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _config_str(config) -> str:
    return "".join("+" if s > 0 else ("0" if s == 0 else "-") for s in config)


# ---------------------------------------------------------------- commands


def _bqa_schedule(cfg, a0=None, tf=None):
    a0 = cfg["a0"] if a0 is None else a0
    return BqaSchedule(
        b0=cfg["b0_ratio"] * a0 if "b0_ratio" in cfg else cfg["b0"],
        a0=a0,
        t_final=cfg["tf"] if tf is None else tf,
        protocol=cfg.get("protocol", "gauss"),
        sigma2=cfg.get("sigma2", 0.1),
    )


def cmd_levels(cfg):
    schedule = _bqa_schedule(cfg, a0=1.0, tf=1.0)
    hamiltonian = single_qutrit_field_hamiltonian(cfg["field"], schedule)
    rows = []
    for s in np.linspace(0.0, 1.0, cfg["points"]):
        levels = instantaneous_spectrum(hamiltonian, float(s))
        rows.append([float(s), *levels.tolist()])
    return [Table("levels", ["t_over_tf", "E0", "E1", "E2"], rows)]


def _single_run(args):
    cfg, tf, samples = args
    schedule = _bqa_schedule(cfg, tf=tf)
    hamiltonian = single_qutrit_field_hamiltonian(cfg["field"], schedule)
    result = evolve(hamiltonian, adiabatic_initial_state(hamiltonian), sample_count=samples, tol=cfg["tol"])
    return result.times / tf, result.probabilities, result.norm_drift


def cmd_single(cfg):
    a0 = cfg["a0"]
    s, probs, _ = _single_run((cfg, cfg["tf"] / a0, cfg["samples"]))
    trace = [[float(x), *p.tolist()] for x, p in zip(s, probs)]
    sweep = _map(_single_run, [(cfg, tf / a0, 2) for tf in cfg["tf_sweep"]])
    rows = [[tf, *out[1][-1].tolist()] for tf, out in zip(cfg["tf_sweep"], sweep)]
    columns = ["p_plus", "p_zero", "p_minus"]
    return [
        Table("trace", ["t_over_tf", *columns], trace),
        Table("tf_sweep", ["a0_tf", *columns], rows),
    ]


def _field_run(args):
    cfg, h = args
    schedule = _bqa_schedule(cfg, tf=cfg["tf"] / cfg["a0"])
    hamiltonian = single_qutrit_field_hamiltonian(h * cfg["a0"], schedule)
    result = evolve(hamiltonian, adiabatic_initial_state(hamiltonian), sample_count=2, tol=cfg["tol"])
    return result.final_state.probabilities().tolist()


def cmd_field_sweep(cfg):
    finals = _map(_field_run, [(cfg, h) for h in cfg["h_values"]])
    rows = [[h, *p] for h, p in zip(cfg["h_values"], finals)]
    return [Table("field_sweep", ["h_over_a0", "p_plus", "p_zero", "p_minus"], rows)]


def _methods(cfg):
    return ["BQA", "QA"] if cfg["method"] == "both" else [cfg["method"].upper()]


def _anneal(instance, method, cfg, tf, samples):
    if method == "BQA":
        hamiltonian = bqa_hamiltonian(instance, _bqa_schedule(cfg, tf=tf))
    else:
        hamiltonian = qa_hamiltonian(instance, QaSchedule(cfg["gamma"], tf))
    return evolve(hamiltonian, adiabatic_initial_state(hamiltonian), sample_count=samples, tol=cfg["tol"])


def _ferro_run(args):
    cfg, method, tf, samples = args
    instance = ferromagnetic_ring(cfg["n"], 1.0, cfg["field"])
    oracle = brute_force_ground_states(instance)
    result = _anneal(instance, method, cfg, tf, samples)
    return result.times / tf, success_curve(result, oracle)


def cmd_ferro(cfg):
    methods = _methods(cfg)
    trace = []
    for method in methods:
        s, curve = _ferro_run((cfg, method, cfg["tf"], cfg["samples"]))
        trace += [[method, float(x), float(p)] for x, p in zip(s, curve)]
    jobs = [(cfg, m, tf, 2) for m in methods for tf in cfg["tf_sweep"]]
    sweep = [[m, tf, float(out[1][-1])] for (_, m, tf, _), out in zip(jobs, _map(_ferro_run, jobs))]
    return [
        Table("trace", ["method", "t_over_tf", "success"], trace),
        Table("tf_sweep", ["method", "j_tf", "success"], sweep),
    ]


def cmd_sampling(cfg):
    instance = check_instance(cfg["instance"])
    oracle = brute_force_ground_states(instance)
    rows = []
    for method in _methods(cfg):
        for tf in cfg["tf_sweep"] or [cfg["tf"]]:
            dist = sampling_distribution(_anneal(instance, method, cfg, tf, 2), oracle)
            for config, p in dist.per_configuration.items():
                key = max(config, tuple(-s for s in config))
                rows.append([method, tf, _config_str(config), p, _config_str(key), dist.flip_classes[key]])
    columns = ["method", "j_tf", "configuration", "probability", "flip_class", "class_probability"]
    return [Table("sampling", columns, rows)]


def cmd_random_bench(cfg):
    first, last = cfg["seeds"]
    seeds = list(range(first, last + 1))
    instances = [random_fully_connected(cfg["n"], 1.0, seed) for seed in seeds]
    hist_rows, summary, records = [], [], []
    for method in _methods(cfg):
        schedule = _bqa_schedule(cfg) if method == "BQA" else QaSchedule(cfg["gamma"], cfg["tf"])
        bench = benchmark(
            instances, method, schedule, cfg["tol"], seeds=seeds, bin_width=cfg["bin_width"], workers=_workers()
        )
        records += bench.records
        subsets = {
            "all": bench.histogram,
            "nontrivial": Histogram.from_values(
                (r["success"] for r in bench.records if r["nontrivial"]), cfg["bin_width"]
            ),
        }
        for subset, hist in subsets.items():
            edges = hist.edges
            for k, count in enumerate(hist.counts):
                hist_rows.append([method, subset, float(edges[k]), float(edges[k + 1]), int(count)])
            summary.append(
                [method, subset, hist.sample_count, bench.mean_success(subset == "nontrivial"), bench.failure_count]
            )
    nontrivial = sum(1 for r in records if r["nontrivial"] and r["method"] == records[0]["method"])
    summary.append(["-", "nontrivial_fraction", len(seeds), nontrivial / len(seeds), 0])
    return [
        Table("histogram", ["method", "subset", "bin_lo", "bin_hi", "count"], hist_rows),
        Table("summary", ["method", "subset", "instances", "mean_success", "failures"], summary),
        Table("records", None, records),
    ]


def _grid(lo, hi, step):
    count = int(round((hi - lo) / step)) + 1
    if count < 1:
        raise InvalidArgumentError(f"empty grid {lo}..{hi} step {step}")
    return np.round(lo + step * np.arange(count), 12)


def cmd_phase(cfg):
    a_grid = _grid(0.0, cfg["a_max"], cfg["a_step"])
    b_grid = _grid(cfg["b_min"], cfg["b_max"], cfg["b_step"])
    diagram = phase_diagram(a_grid, b_grid, 1.0)
    points = [[p.A, p.B, p.m_s, p.order, p.energy_density] for p in diagram.points]
    boundary = [[b.A, b.B, b.jump, b.order] for b in diagram.boundary]
    jz = cfg["coordination"]  # ring: Jz = J * z with J = 1
    s, a, b = protocol_overlay(_bqa_schedule(cfg, tf=1.0), jz, cfg["points"])
    overlay = [[float(x), float(y), float(z)] for x, y, z in zip(s, a, b)]
    return [
        Table("phase", ["A", "B", "m_s", "order", "energyDensity"], points),
        Table("boundary", ["A", "B", "jump", "order"], boundary),
        Table("protocol", ["t_over_tf", "A", "B"], overlay),
    ]


def _a0_run(args):
    cfg, protocol, a0 = args
    instance = ferromagnetic_ring(cfg["n"], 1.0, cfg["field"])
    oracle = brute_force_ground_states(instance)
    schedule = BqaSchedule(cfg["b0"], a0, cfg["tf"], protocol, cfg["sigma2"])
    hamiltonian = bqa_hamiltonian(instance, schedule)
    result = evolve(hamiltonian, adiabatic_initial_state(hamiltonian), sample_count=2, tol=cfg["tol"])
    report = success_probability(result, oracle)
    return report.success_probability, report.zero_leakage


def cmd_a0_sweep(cfg):
    protocols = ["gauss", "const"] if cfg["protocol"] == "both" else [cfg["protocol"]]
    jobs = [(cfg, p, a0) for p in protocols for a0 in cfg["a0_values"]]
    rows = [[p, a0, s, z] for (_, p, a0), (s, z) in zip(jobs, _map(_a0_run, jobs))]
    return [Table("a0_sweep", ["protocol", "a0", "success", "zero_leakage"], rows)]


def nested_comparison(instance, schedule, samples=20, tol=DEFAULT_TOL):
    """Evolve an instance as qutrits and as nested qubit pairs.

    Returns ``(times, max |dP|, leakage, qutrit drift, nested drift)`` per
    sample time, starting both sides from the exact all-zero qutrit state.
    """
    n = instance.n
    qutrit = evolve(bqa_hamiltonian(instance, schedule), zero_state(n), sample_count=samples, tol=tol)
    nested = evolve(nest_hamiltonian(instance, schedule), nested_initial_state(n), sample_count=samples, tol=tol)
    deviations, leakages = [], []
    for p_qutrit, amps in zip(qutrit.probabilities, nested.states):
        projected, leak = project_to_qutrit(amps)
        deviations.append(float(np.max(np.abs(projected.probabilities() - p_qutrit))))
        leakages.append(leak)
    return qutrit.times, np.array(deviations), np.array(leakages), qutrit.norm_drift, nested.norm_drift


def cmd_nested_check(cfg):
    instance = random_fully_connected(cfg["n"], 1.0, cfg["seed"])
    times, dev, leak, drift_q, drift_n = nested_comparison(
        instance, _bqa_schedule(cfg), cfg["samples"], cfg["tol"]
    )
    rows = [[float(t) / cfg["tf"], float(d), float(x)] for t, d, x in zip(times, dev, leak)]
    summary = [[float(dev.max()), float(leak.max()), drift_q, drift_n]]
    return [
        Table("nested", ["t_over_tf", "max_probability_deviation", "leakage"], rows),
        Table("summary", ["max_probability_deviation", "max_leakage", "qutrit_drift", "nested_drift"], summary),
    ]


COMMANDS = {
    "levels": cmd_levels,
    "single": cmd_single,
    "field-sweep": cmd_field_sweep,
    "ferro": cmd_ferro,
    "sampling": cmd_sampling,
    "random-bench": cmd_random_bench,
    "phase": cmd_phase,
    "a0-sweep": cmd_a0_sweep,
    "nested-check": cmd_nested_check,
}


# ------------------------------------------------------------------ output


def header_line(command: str, config: dict) -> str:
    payload = {"command": command, "config": config, "version": __version__}
    return "# " + json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def render_table(table: Table) -> str:
    if table.columns is None:  # JSON-lines records
        buf = io.StringIO()
        for record in table.rows:
            buf.write(json.dumps(record, sort_keys=True) + "\n")
        return buf.getvalue()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _sibling(out: Path, table: Table) -> Path:
    suffix = ".jsonl" if table.columns is None else ".csv"
    return out.with_name(f"{out.stem}.{table.name}{suffix}")


def write_output(command, config, tables, out=None) -> list:
    """Write the tables of one run; returns the paths written."""
    header = header_line(command, config)
    if out is None:
        parts = [header, render_table(tables[0])]
        for table in tables[1:]:
            parts += [f"# table: {table.name}\n", render_table(table)]
        sys.stdout.write("".join(parts))
        return []
    out = Path(out)
    written = []
    for k, table in enumerate(tables):
        path = out if k == 0 else _sibling(out, table)
        if table.columns is None:
            write_records(table.rows, path)
        else:
            path.write_text(header + render_table(table), encoding="utf-8")
        written.append(path)
    return written


def run(command: str, config: dict, out=None) -> list:
    tables = COMMANDS[command](config)
    return write_output(command, config, tables, out)


# ----------------------------------------------------------------- parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list:
    if not text.strip():
        return []
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _seed_range(text: str) -> list:
    parts = text.split("..")
    try:
        first, last = (int(parts[0]), int(parts[-1])) if len(parts) in (1, 2) else (None, None)
    except ValueError:
        first = None
    if first is None or first < 0 or last < first:
        raise argparse.ArgumentTypeError(f"expected a seed range a..b with 0 <= a <= b, got {text!r}")
    return [first, last]


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (np.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 2:
        raise argparse.ArgumentTypeError(f"must be at least 2, got {text}")
    return value


def _spins(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 spins, got {text}")
    return value


def _default_instance() -> str:
    return str(resources.files("bqa") / "data" / "five_spin_placeholder.json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bqa", description="Bifurcation-based quantum annealing experiments.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, tf):
        p.add_argument("--tol", type=_positive, default=DEFAULT_TOL, help="integrator tolerance")
        p.add_argument("--tf", type=_positive, default=tf, help="annealing time")
        p.add_argument("--out", type=Path, default=None, help="output CSV (default stdout)")

    def gauss(p, protocol_choices=("gauss", "const")):
        p.add_argument("--sigma2", type=_positive, default=0.1, help="Gaussian driver variance")
        p.add_argument("--protocol", choices=protocol_choices, default=protocol_choices[0])

    p = sub.add_parser("levels", help="instantaneous single-qutrit spectrum (units of A0)")
    p.add_argument("--b0-ratio", type=_positive, default=20.0)
    p.add_argument("--field", type=float, default=0.0, help="h / A0")
    p.add_argument("--points", type=_count, default=201)
    gauss(p)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("single", help="single-qutrit bifurcation; --tf is A0*t_f")
    p.add_argument("--b0-ratio", type=_positive, default=20.0)
    p.add_argument("--a0", type=_positive, default=1.0)
    p.add_argument("--field", type=float, default=0.0)
    p.add_argument("--samples", type=_count, default=101)
    p.add_argument("--tf-sweep", type=_float_list, default=[5.0, 10.0, 20.0, 50.0, 100.0, 200.0])
    gauss(p)
    common(p, 100.0)

    p = sub.add_parser("field-sweep", help="final P(m) versus h/A0; --tf is A0*t_f")
    p.add_argument("--b0-ratio", type=_positive, default=20.0)
    p.add_argument("--a0", type=_positive, default=1.0)
    p.add_argument("--h-values", type=_float_list, default=np.round(np.linspace(-1, 1, 21), 12).tolist(),
                   help="comma-separated h/A0 values; use --h-values=-1,0,1 for negatives")
    gauss(p)
    common(p, 200.0)

    p = sub.add_parser("ferro", help="ferromagnetic ring, BQA and QA (units of J)")
    p.add_argument("--n", type=_spins, default=4, help="ring size")
    p.add_argument("--b0", type=_positive, default=20.0)
    p.add_argument("--a0", type=_positive, default=2.0)
    p.add_argument("--gamma", type=_positive, default=1.0)
    p.add_argument("--field", type=float, default=0.1)
    p.add_argument("--samples", type=_count, default=101)
    p.add_argument("--tf-sweep", type=_float_list, default=[20.0, 50.0, 100.0, 200.0, 500.0, 1000.0])
    p.add_argument("--method", choices=("both", "bqa", "qa"), default="both")
    gauss(p)
    common(p, 200.0)

    p = sub.add_parser("sampling", help="ground-state sampling on a degenerate instance")
    p.add_argument("--instance", default=None, help="instance JSON (default: bundled placeholder)")
    p.add_argument("--tf-sweep", type=_float_list, default=[], help="several t_f values (overrides --tf)")
    p.add_argument("--b0", type=_positive, default=20.0)
    p.add_argument("--a0", type=_positive, default=2.0)
    p.add_argument("--gamma", type=_positive, default=1.0)
    p.add_argument("--method", choices=("both", "bqa", "qa"), default="both")
    gauss(p)
    common(p, 300.0)

    p = sub.add_parser("random-bench", help="random fully connected instances")
    p.add_argument("--n", type=_spins, default=4)
    p.add_argument("--seeds", type=_seed_range, default=[0, 99], help="inclusive range a..b")
    p.add_argument("--b0", type=_positive, default=20.0)
    p.add_argument("--a0", type=_positive, default=2.0)
    p.add_argument("--gamma", type=_positive, default=1.0)
    p.add_argument("--bin-width", type=_positive, default=0.05)
    p.add_argument("--method", choices=("both", "bqa", "qa"), default="both")
    gauss(p)
    common(p, 300.0)

    p = sub.add_parser("phase", help="mean-field phase diagram in units of Jz")
    p.add_argument("--a-max", type=_positive, default=2.0)
    p.add_argument("--a-step", type=_positive, default=0.05)
    p.add_argument("--b-min", type=float, default=-1.5)
    p.add_argument("--b-max", type=float, default=1.5)
    p.add_argument("--b-step", type=_positive, default=0.05)
    p.add_argument("--b0", type=_positive, default=20.0, help="overlay protocol B0/J")
    p.add_argument("--a0", type=_positive, default=2.0, help="overlay protocol A0/J")
    p.add_argument("--coordination", type=_positive, default=2.0, help="z, so that Jz = z J")
    p.add_argument("--points", type=_count, default=101, help="overlay samples")
    gauss(p)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("a0-sweep", help="ring success versus A0/J")
    p.add_argument("--n", type=_spins, default=4)
    p.add_argument("--b0", type=_positive, default=20.0)
    p.add_argument("--field", type=float, default=0.1)
    p.add_argument(
        "--a0-values", type=_float_list, default=[0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0]
    )
    p.add_argument("--sigma2", type=_positive, default=0.1)
    p.add_argument("--protocol", choices=("both", "gauss", "const"), default="both")
    common(p, 200.0)

    p = sub.add_parser("nested-check", help="qutrit versus nested-qubit evolution")
    p.add_argument("--n", type=_spins, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--b0", type=_positive, default=20.0)
    p.add_argument("--a0", type=_positive, default=2.0)
    p.add_argument("--samples", type=_count, default=20)
    gauss(p)
    common(p, 50.0)

    p = sub.add_parser("replay", help="re-run a command from an output file's header")
    p.add_argument("file", type=Path)
    p.add_argument("--out", type=Path, default=None)
    return parser


def config_from_args(args) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("command", "out")}
    if args.command == "sampling":
        source = config["instance"] or _default_instance()
        config["instance"] = check_instance(source).to_dict()
    return config


def read_header(path) -> tuple:
    with Path(path).open(encoding="utf-8") as fh:
        line = fh.readline()
    if not line.startswith("# "):
        raise InvalidArgumentError(f"{path}: no header line")
    try:
        payload = json.loads(line[2:])
        command, config = payload["command"], payload["config"]
    except (json.JSONDecodeError, KeyError, TypeError):
        raise InvalidArgumentError(f"{path}: malformed header") from None
    if command not in COMMANDS:
        raise InvalidArgumentError(f"{path}: unknown command {command!r}")
    if payload.get("version") != __version__:
        print(f"warning: {path} was written by version {payload.get('version')}", file=sys.stderr)
    return command, config


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            command, config = read_header(args.file)
        else:
            command, config = args.command, config_from_args(args)
        run(command, config, args.out)
    except (InvalidArgumentError, ConvergenceError, OSError) as exc:
        print(f"bqa: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"bqa: integration failed: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except CapacityError as exc:
        print(f"bqa: capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

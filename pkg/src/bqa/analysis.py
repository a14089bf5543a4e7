"""Observables computed from propagated states.

Success is the total probability of the oracle's ground configurations,
where a spin ``s_i = +/-1`` maps to the qutrit state ``m_i = s_i`` or to the
matching qubit state. Degenerate ground manifolds are summed.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .evolve import DEFAULT_TOL, EvolutionResult, StateVector, adiabatic_initial_state, evolve_batch
from .exceptions import IndeterminateError, IntegrationError, InvalidArgumentError
from .hamiltonians import bqa_hamiltonian, qa_hamiltonian
from .instances import GroundStateSolution, brute_force_ground_states, is_nontrivial
from .schedules import BqaSchedule, QaSchedule
from .spinops import SiteBasis, SiteKind

__all__ = [
    "SuccessReport",
    "SamplingDistribution",
    "Histogram",
    "BenchmarkResult",
    "basis_probabilities",
    "success_probability",
    "success_curve",
    "sampling_distribution",
    "benchmark",
    "write_records",
    "read_records",
]

DEFAULT_BIN_WIDTH = 0.05
METHODS = ("BQA", "QA")


def basis_probabilities(psi) -> np.ndarray:
    amps = psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi)
    return np.abs(amps) ** 2


def _final_probabilities(obj):
    if isinstance(obj, EvolutionResult):
        return obj.basis, obj.final_state.probabilities()
    if isinstance(obj, StateVector):
        return obj.basis, obj.probabilities()
    raise InvalidArgumentError("expected an EvolutionResult or StateVector")


def _config_indices(basis: SiteBasis, oracle: GroundStateSolution) -> list:
    if basis.n_sites != len(oracle.configurations[0]):
        raise InvalidArgumentError("oracle size does not match the state's basis")
    return [basis.encode(c) for c in oracle.configurations]


def _zero_mask(basis: SiteBasis) -> np.ndarray:
    if basis.kind is SiteKind.QUBIT:
        return np.zeros(basis.dim, dtype=bool)
    return np.any(basis.configurations == 0, axis=1)


@dataclass(frozen=True)
class SuccessReport:
    success_probability: float
    per_configuration: dict
    zero_leakage: float


def success_probability(result, oracle: GroundStateSolution) -> SuccessReport:
    """Probability of the oracle's ground configurations in the final state."""
    basis, probs = _final_probabilities(result)
    indices = _config_indices(basis, oracle)
    per = {c: float(probs[k]) for c, k in zip(oracle.configurations, indices)}
    return SuccessReport(
        success_probability=float(sum(per.values())),
        per_configuration=per,
        zero_leakage=float(probs[_zero_mask(basis)].sum()),
    )


def success_curve(result: EvolutionResult, oracle: GroundStateSolution) -> np.ndarray:
    """Ground-state probability at every sample time of ``result``."""
    indices = _config_indices(result.basis, oracle)
    return result.probabilities[:, indices].sum(axis=1)


@dataclass(frozen=True)
class SamplingDistribution:
    """Probabilities of each degenerate ground configuration.

    ``flip_classes`` pairs each configuration with its global flip; the value
    is the summed probability of the pair, keyed by the lexicographically
    larger member.
    """

    per_configuration: dict
    flip_classes: dict


def _flip_key(config):
    flipped = tuple(-s for s in config)
    return max(config, flipped)


def sampling_distribution(result, oracle: GroundStateSolution) -> SamplingDistribution:
    if oracle.degeneracy < 2:
        raise InvalidArgumentError("sampling distribution needs a degenerate ground manifold")
    report = success_probability(result, oracle)
    classes: dict = {}
    for config, p in report.per_configuration.items():
        key = _flip_key(config)
        classes[key] = classes.get(key, 0.0) + p
    return SamplingDistribution(report.per_configuration, dict(sorted(classes.items(), reverse=True)))


@dataclass
class Histogram:
    """Counts of values in ``[0, 1]`` over bins of fixed width.

    The last bin is closed on the right so that a value of exactly 1 is counted.
    """

    bin_width: float = DEFAULT_BIN_WIDTH
    counts: np.ndarray = field(default=None)
    sample_count: int = 0

    def __post_init__(self):
        n_bins = self.n_bins
        if self.counts is None:
            self.counts = np.zeros(n_bins, dtype=np.int64)
        else:
            self.counts = np.asarray(self.counts, dtype=np.int64)
            if self.counts.shape != (n_bins,):
                raise InvalidArgumentError("counts do not match the bin layout")

    @property
    def n_bins(self) -> int:
        n = round(1.0 / self.bin_width)
        if not math.isclose(n * self.bin_width, 1.0) or n < 1:
            raise InvalidArgumentError("bin width must divide 1")
        return int(n)

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_bins + 1)

    def bin_index(self, value: float) -> int:
        if not -1e-9 <= value <= 1.0 + 1e-9:
            raise InvalidArgumentError(f"value {value} outside [0, 1]")
        return min(max(int(math.floor(value / self.bin_width)), 0), self.n_bins - 1)

    def add(self, value: float) -> None:
        self.counts[self.bin_index(value)] += 1
        self.sample_count += 1

    @classmethod
    def from_values(cls, values, bin_width: float = DEFAULT_BIN_WIDTH) -> "Histogram":
        hist = cls(bin_width)
        for v in values:
            hist.add(float(v))
        return hist

    def __eq__(self, other):
        return (
            isinstance(other, Histogram)
            and self.bin_width == other.bin_width
            and self.sample_count == other.sample_count
            and np.array_equal(self.counts, other.counts)
        )


@dataclass
class BenchmarkResult:
    method: str
    histogram: Histogram
    records: list
    failures: list  # (seed, message)
    norm_drift: float = 0.0  # largest over all successful runs

    @property
    def failure_count(self) -> int:
        return len(self.failures)

    def mean_success(self, nontrivial_only: bool = False) -> float:
        values = [
            r["success"] for r in self.records if not nontrivial_only or r["nontrivial"]
        ]
        return float(np.mean(values)) if values else math.nan


def _hamiltonian(instance, method, schedule):
    if method == "BQA":
        if not isinstance(schedule, BqaSchedule):
            raise InvalidArgumentError("BQA needs a BqaSchedule")
        return bqa_hamiltonian(instance, schedule)
    if not isinstance(schedule, QaSchedule):
        raise InvalidArgumentError("QA needs a QaSchedule")
    return qa_hamiltonian(instance, schedule)


def _record(seed, method, instance, oracle, result) -> dict:
    report = success_probability(result, oracle)
    try:
        nontrivial = bool(is_nontrivial(instance, oracle))
    except IndeterminateError:
        nontrivial = None
    return {
        "seed": seed,
        "method": method,
        "success": report.success_probability,
        "zero_leakage": report.zero_leakage,
        "energy": oracle.energy,
        "nontrivial": nontrivial,
    }


def _run_chunk(args):
    instances, seeds, method, schedule, tol = args
    oracles = [brute_force_ground_states(inst) for inst in instances]
    hams = [_hamiltonian(inst, method, schedule) for inst in instances]
    starts = [adiabatic_initial_state(h) for h in hams]
    records, failures, drift = [], [], 0.0
    try:
        results = evolve_batch(hams, starts, sample_count=2, tol=tol)
    except IntegrationError:
        results = None
    if results is not None:
        for seed, inst, oracle, res in zip(seeds, instances, oracles, results):
            records.append(_record(seed, method, inst, oracle, res))
            drift = max(drift, res.norm_drift)
        return records, failures, drift
    # isolate the failing member(s)
    for seed, inst, oracle, h, psi0 in zip(seeds, instances, oracles, hams, starts):
        try:
            (res,) = evolve_batch([h], [psi0], sample_count=2, tol=tol)
        except IntegrationError as exc:
            failures.append((seed, str(exc)))
            continue
        records.append(_record(seed, method, inst, oracle, res))
        drift = max(drift, res.norm_drift)
    return records, failures, drift


def benchmark(
    instances,
    method: str,
    schedule,
    tol: float = DEFAULT_TOL,
    *,
    seeds=None,
    bin_width: float = DEFAULT_BIN_WIDTH,
    chunk_size: int = 50,
    workers: int = 1,
) -> BenchmarkResult:
    """Anneal every instance and histogram the success probabilities.

    Instances are propagated in batches of ``chunk_size`` sharing one
    integration. Chunks are distributed over ``workers`` processes; results
    are collected in input order, so the output does not depend on worker
    scheduling. An integration failure is recorded and does not abort the run.
    """
    method = method.upper()
    if method not in METHODS:
        raise InvalidArgumentError(f"method must be one of {METHODS}")
    instances = list(instances)
    if not instances:
        raise InvalidArgumentError("benchmark needs at least one instance")
    if len({inst.n for inst in instances}) != 1:
        raise InvalidArgumentError("all benchmark instances must have the same size")
    seeds = list(range(len(instances))) if seeds is None else list(seeds)
    if len(seeds) != len(instances):
        raise InvalidArgumentError("need one seed per instance")
    chunks = [
        (instances[k : k + chunk_size], seeds[k : k + chunk_size], method, schedule, tol)
        for k in range(0, len(instances), chunk_size)
    ]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_run_chunk, chunks))
    else:
        outputs = [_run_chunk(c) for c in chunks]
    records = [r for recs, _, _ in outputs for r in recs]
    failures = [f for _, fails, _ in outputs for f in fails]
    histogram = Histogram.from_values((r["success"] for r in records), bin_width)
    drift = max(d for _, _, d in outputs)
    return BenchmarkResult(method, histogram, records, failures, drift)


def write_records(records, path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_records(path) -> list:
    with Path(path).open(encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]

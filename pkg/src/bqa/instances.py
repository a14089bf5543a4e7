"""Ising problem instances: construction, I/O and exact classical solution.

The classical energy of a configuration ``s`` in ``{+1, -1}^n`` is::

    E(s) = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i

Random instances use numpy's ``PCG64`` bit generator seeded with the
instance seed. Couplings are drawn first, for pairs ``(i, j)`` in
lexicographic order, then the fields. The stream is pinned by a golden test.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import CapacityError, IndeterminateError, InstanceParseError, InvalidArgumentError

__all__ = [
    "ProblemInstance",
    "GroundStateSolution",
    "classical_energy",
    "energies",
    "brute_force_ground_states",
    "random_fully_connected",
    "ferromagnetic_ring",
    "is_nontrivial",
    "load_instance",
    "save_instance",
    "MAX_BRUTE_FORCE_SPINS",
    "DEGENERACY_TOL",
]

MAX_BRUTE_FORCE_SPINS = 24
DEGENERACY_TOL = 1e-9
_CHUNK = 1 << 16


@dataclass(frozen=True)
class ProblemInstance:
    """Couplings and fields of an ``n``-spin Ising problem.

    ``bonds`` holds ``(i, j, J_ij)`` triples with ``i < j``; ``fields`` holds
    ``h_i`` for every spin.
    """

    n: int
    bonds: tuple = ()
    fields: tuple = field(default=None)

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise InvalidArgumentError(f"spin count must be positive, got {self.n}")
        fields = (0.0,) * n if self.fields is None else tuple(float(h) for h in self.fields)
        if len(fields) != n:
            raise InvalidArgumentError(f"expected {n} fields, got {len(fields)}")
        bonds = []
        seen = set()
        for bond in self.bonds:
            i, j, coupling = bond
            i, j, coupling = int(i), int(j), float(coupling)
            if i > j:
                i, j = j, i
            if not 0 <= i < j < n:
                raise InvalidArgumentError(f"bond ({i}, {j}) out of range for n={n}")
            if (i, j) in seen:
                raise InvalidArgumentError(f"duplicate bond ({i}, {j})")
            seen.add((i, j))
            bonds.append((i, j, coupling))
        if not all(math.isfinite(v) for v in fields) or not all(
            math.isfinite(b[2]) for b in bonds
        ):
            raise InvalidArgumentError("instance coefficients must be finite")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "bonds", tuple(bonds))
        object.__setattr__(self, "fields", fields)

    @property
    def coupling_matrix(self) -> np.ndarray:
        """Upper-triangular ``(n, n)`` array of couplings."""
        out = np.zeros((self.n, self.n))
        for i, j, coupling in self.bonds:
            out[i, j] = coupling
        return out

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "bonds": [[i, j, c] for i, j, c in self.bonds],
            "fields": list(self.fields),
        }

    @classmethod
    def from_dict(cls, data) -> "ProblemInstance":
        return _parse_instance(data)


@dataclass(frozen=True)
class GroundStateSolution:
    energy: float
    configurations: tuple  # tuples of +/-1, sorted
    degeneracy: int


def _as_config(instance: ProblemInstance, config) -> np.ndarray:
    arr = np.asarray(config)
    if arr.shape != (instance.n,):
        raise InvalidArgumentError(
            f"configuration must have length {instance.n}, got shape {arr.shape}"
        )
    if not np.all((arr == 1) | (arr == -1)):
        raise InvalidArgumentError("configuration entries must be +1 or -1")
    return arr.astype(float)


def classical_energy(instance: ProblemInstance, config) -> float:
    s = _as_config(instance, config)
    energy = -float(np.dot(instance.fields, s))
    for i, j, coupling in instance.bonds:
        energy -= coupling * s[i] * s[j]
    return energy


def energies(instance: ProblemInstance, configs) -> np.ndarray:
    """Vectorized classical energy for an array of configurations ``(k, n)``.

    Entries need not be restricted to +/-1; qutrit values ``m = 0`` are
    accepted, which gives the diagonal of the problem operator.
    """
    s = np.asarray(configs, dtype=float)
    out = -s @ np.asarray(instance.fields, dtype=float)
    for i, j, coupling in instance.bonds:
        out -= coupling * s[:, i] * s[:, j]
    return out


def _spin_block(n: int, start: int, stop: int) -> np.ndarray:
    # bit k (from the most significant) = 1 means spin -1
    idx = np.arange(start, stop, dtype=np.int64)[:, None]
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return 1 - 2 * ((idx >> shifts) & 1)


def brute_force_ground_states(instance: ProblemInstance, tol: float = DEGENERACY_TOL) -> GroundStateSolution:
    """Exhaustive search over all ``2**n`` configurations."""
    n = instance.n
    if n > MAX_BRUTE_FORCE_SPINS:
        raise CapacityError(
            f"brute force limited to {MAX_BRUTE_FORCE_SPINS} spins, got {n}"
        )
    total = 1 << n
    best = math.inf
    kept_configs, kept_energies = [], []
    for start in range(0, total, _CHUNK):
        block = _spin_block(n, start, min(total, start + _CHUNK))
        e = energies(instance, block)
        best = min(best, float(e.min()))
        mask = e <= best + tol
        kept_configs.append(block[mask])
        kept_energies.append(e[mask])
    configs = np.concatenate(kept_configs)[np.concatenate(kept_energies) <= best + tol]
    configs = sorted(tuple(int(v) for v in c) for c in configs)
    return GroundStateSolution(energy=best, configurations=tuple(configs), degeneracy=len(configs))


def random_fully_connected(n: int, J: float = 1.0, seed: int = 0) -> ProblemInstance:
    """Fully connected instance with ``J_ij = r_ij / n`` and ``r_ij, h_i ~ U[-J, J]``."""
    if n < 2:
        raise InvalidArgumentError("random_fully_connected needs n >= 2")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    pairs = list(itertools.combinations(range(n), 2))
    r = rng.uniform(-J, J, size=len(pairs))
    h = rng.uniform(-J, J, size=n)
    bonds = [(i, j, float(r_ij) / n) for (i, j), r_ij in zip(pairs, r)]
    return ProblemInstance(n, bonds, h.tolist())


def ferromagnetic_ring(n: int, J: float = 1.0, h: float = 0.0) -> ProblemInstance:
    """Periodic chain with uniform coupling ``J`` and uniform field ``h``."""
    if n < 2:
        raise InvalidArgumentError("a ring needs at least two spins")
    if n == 2:
        bonds = [(0, 1, J)]
    else:
        bonds = [(i, (i + 1) % n, J) for i in range(n)]
    return ProblemInstance(n, bonds, [h] * n)


def is_nontrivial(instance: ProblemInstance, solution: GroundStateSolution | None = None) -> bool:
    """True when the unique ground state differs from ``sign(h)`` site by site."""
    if any(h == 0.0 for h in instance.fields):
        raise IndeterminateError("sign(h) is undefined for a zero field")
    solution = solution or brute_force_ground_states(instance)
    if solution.degeneracy != 1:
        raise IndeterminateError(
            f"ground state is {solution.degeneracy}-fold degenerate"
        )
    signs = tuple(1 if h > 0 else -1 for h in instance.fields)
    return solution.configurations[0] != signs


def _parse_instance(data, source: str = "<dict>") -> ProblemInstance:
    def fail(msg):
        raise InstanceParseError(f"{source}: {msg}")

    if not isinstance(data, dict):
        fail("top level must be a JSON object")
    unknown = set(data) - {"n", "bonds", "fields"}
    if unknown:
        fail(f"unknown keys {sorted(unknown)}")
    n = data.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        fail(f"field 'n' must be a positive integer, got {n!r}")
    bonds = data.get("bonds", [])
    if not isinstance(bonds, list):
        fail("field 'bonds' must be a list")
    seen = set()
    parsed = []
    for k, bond in enumerate(bonds):
        where = f"bonds[{k}]"
        if not isinstance(bond, list) or len(bond) != 3:
            fail(f"{where} must be [i, j, J_ij]")
        i, j, coupling = bond
        if isinstance(i, bool) or isinstance(j, bool) or not isinstance(i, int) or not isinstance(j, int):
            fail(f"{where} indices must be integers")
        if not isinstance(coupling, (int, float)) or isinstance(coupling, bool) or not math.isfinite(coupling):
            fail(f"{where} coupling must be a finite number")
        if not (0 <= i < n and 0 <= j < n):
            fail(f"{where} index out of range 0..{n - 1}")
        if i == j:
            fail(f"{where} is a self-coupling")
        key = (min(i, j), max(i, j))
        if key in seen:
            fail(f"{where} duplicates bond {key}")
        seen.add(key)
        parsed.append((i, j, float(coupling)))
    fields = data.get("fields")
    if fields is None:
        fields = [0.0] * n
    if not isinstance(fields, list) or len(fields) != n:
        fail(f"field 'fields' must be a list of {n} numbers")
    for k, h in enumerate(fields):
        if not isinstance(h, (int, float)) or isinstance(h, bool) or not math.isfinite(h):
            fail(f"fields[{k}] must be a finite number")
    return ProblemInstance(n, parsed, [float(h) for h in fields])


def load_instance(path) -> ProblemInstance:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return _parse_instance(data, str(path))


def save_instance(instance: ProblemInstance, path) -> None:
    Path(path).write_text(json.dumps(instance.to_dict(), indent=1) + "\n", encoding="utf-8")

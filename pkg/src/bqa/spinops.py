"""Spin-1 and spin-1/2 operator matrices and their many-body lifts.

Conventions shared by every module:

* Qutrit local states are ordered ``(+1, 0, -1)`` (eigenvalues of Sz).
* Qubit local states are ordered ``(+1/2, -1/2)``; configurations are reported
  as Pauli eigenvalues ``(+1, -1)``.
* Site 0 is the slowest-varying index of the tensor-product basis
  (row-major / ``np.kron`` order).

Operators are dense complex ``numpy`` arrays.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import InvalidArgumentError

__all__ = [
    "SiteKind",
    "SiteBasis",
    "spin1_operator",
    "pauli_operator",
    "lift",
    "two_site",
    "is_hermitian",
]

_SQRT2 = np.sqrt(2.0)


class SiteKind(enum.Enum):
    QUTRIT = "qutrit"
    QUBIT = "qubit"

    @property
    def local_dim(self) -> int:
        return 3 if self is SiteKind.QUTRIT else 2

    @property
    def labels(self) -> tuple[int, ...]:
        return (1, 0, -1) if self is SiteKind.QUTRIT else (1, -1)


@dataclass(frozen=True)
class SiteBasis:
    """Tensor-product basis of ``n_sites`` identical sites."""

    kind: SiteKind
    n_sites: int

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", SiteKind(self.kind))
        if int(self.n_sites) < 1:
            raise InvalidArgumentError(f"n_sites must be positive, got {self.n_sites}")
        object.__setattr__(self, "n_sites", int(self.n_sites))

    @classmethod
    def qutrits(cls, n: int) -> "SiteBasis":
        return cls(SiteKind.QUTRIT, n)

    @classmethod
    def qubits(cls, n: int) -> "SiteBasis":
        return cls(SiteKind.QUBIT, n)

    @property
    def local_dim(self) -> int:
        return self.kind.local_dim

    @property
    def dim(self) -> int:
        return self.local_dim**self.n_sites

    @cached_property
    def configurations(self) -> np.ndarray:
        """Integer array of shape ``(dim, n_sites)``; row ``k`` decodes index ``k``."""
        digits = np.indices((self.local_dim,) * self.n_sites).reshape(self.n_sites, -1).T
        return np.asarray(self.kind.labels)[digits]

    def encode(self, config) -> int:
        labels = self.kind.labels
        config = tuple(int(c) for c in config)
        if len(config) != self.n_sites:
            raise InvalidArgumentError(
                f"configuration has {len(config)} sites, basis has {self.n_sites}"
            )
        index = 0
        for value in config:
            try:
                digit = labels.index(value)
            except ValueError:
                raise InvalidArgumentError(
                    f"{value} is not a {self.kind.value} label {labels}"
                ) from None
            index = index * self.local_dim + digit
        return index

    def decode(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.dim:
            raise InvalidArgumentError(f"index {index} out of range for dim {self.dim}")
        return tuple(int(v) for v in self.configurations[index])


def spin1_operator(which: str) -> np.ndarray:
    """Return the 3x3 spin-1 matrix ``Sz``, ``Sx``, ``Sz2`` or ``Sx2``.

    ``Sz2`` and ``Sx2`` are the matrix squares; unlike Pauli matrices they are
    not proportional to the identity.
    """
    if which == "Sz":
        return np.diag([1.0, 0.0, -1.0]).astype(complex)
    if which == "Sx":
        return np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / _SQRT2
    if which == "Sz2":
        return np.diag([1.0, 0.0, 1.0]).astype(complex)
    if which == "Sx2":
        return 0.5 * np.array([[1, 0, 1], [0, 2, 0], [1, 0, 1]], dtype=complex)
    raise InvalidArgumentError(f"unknown spin-1 operator {which!r}")


def pauli_operator(which: str) -> np.ndarray:
    if which == "Z":
        return np.diag([1.0, -1.0]).astype(complex)
    if which == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    raise InvalidArgumentError(f"unknown Pauli operator {which!r}")


def _check_local(local, basis: SiteBasis) -> np.ndarray:
    local = np.asarray(local, dtype=complex)
    d = basis.local_dim
    if local.shape != (d, d):
        raise InvalidArgumentError(
            f"local operator shape {local.shape} does not match local dimension {d}"
        )
    return local


def _check_site(site: int, basis: SiteBasis) -> int:
    if not 0 <= site < basis.n_sites:
        raise InvalidArgumentError(f"site {site} out of range for {basis.n_sites} sites")
    return int(site)


def _kron_chain(factors) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def lift(local, site: int, basis: SiteBasis) -> np.ndarray:
    """Embed a single-site operator at ``site``; identity elsewhere."""
    local = _check_local(local, basis)
    site = _check_site(site, basis)
    eye = np.eye(basis.local_dim, dtype=complex)
    return _kron_chain(local if k == site else eye for k in range(basis.n_sites))


def two_site(local_a, site_a: int, local_b, site_b: int, basis: SiteBasis) -> np.ndarray:
    """Tensor product of ``local_a`` on ``site_a`` and ``local_b`` on ``site_b``."""
    local_a = _check_local(local_a, basis)
    local_b = _check_local(local_b, basis)
    site_a = _check_site(site_a, basis)
    site_b = _check_site(site_b, basis)
    if site_a == site_b:
        raise InvalidArgumentError("two_site requires distinct sites")
    eye = np.eye(basis.local_dim, dtype=complex)
    factors = []
    for k in range(basis.n_sites):
        factors.append(local_a if k == site_a else local_b if k == site_b else eye)
    return _kron_chain(factors)


def is_hermitian(matrix, atol: float = 1e-12) -> bool:
    matrix = np.asarray(matrix)
    return bool(np.max(np.abs(matrix - matrix.conj().T), initial=0.0) < atol)

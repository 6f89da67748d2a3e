"""Finite-dimensional tensor-product spaces, operators, and states.

Conventions used across the toolkit:

* subsystem order is (qubit, cavity, mech) wherever all three appear;
* the qubit basis is ordered (|e>, |g>), so sigma_z = diag(+1, -1) and the
  ground state is index 1;
* bosonic truncation at dimension d keeps Fock levels 0 .. d-1;
* operators are stored as CSR sparse matrices, states as dense arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
import scipy.sparse as sp

from .exceptions import InvalidArgumentError, InvalidDimensionError

KET_NORM_TOL = 1e-10
TRACE_TOL = 1e-10
HERMITICITY_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-8
# full positivity checks are O(d^3); skip them above this total dimension
DENSE_CHECK_LIMIT = 512


@dataclass(frozen=True)
class CompositeSpace:
    """Ordered tensor product of finite-dimensional subsystems.

    Parameters
    ----------
    dims : tuple of int
        Subsystem dimensions, each >= 2.
    labels : tuple of str
        One label per subsystem. A subsystem labeled ``"qubit"`` must have
        dimension exactly 2.
    """

    dims: tuple[int, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.dims) == 0:
            raise InvalidDimensionError("space needs at least one subsystem")
        if len(self.dims) != len(self.labels):
            raise InvalidDimensionError(
                f"{len(self.dims)} dims but {len(self.labels)} labels"
            )
        if len(set(self.labels)) != len(self.labels):
            raise InvalidArgumentError(f"duplicate subsystem labels: {self.labels}")
        for d, lab in zip(self.dims, self.labels):
            if int(d) != d or d < 2:
                raise InvalidDimensionError(f"subsystem {lab!r} has dim {d}, need >= 2")
            if lab == "qubit" and d != 2:
                raise InvalidDimensionError(f"qubit subsystem must have dim 2, got {d}")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def index(self, label: str) -> int:
        """Position of the subsystem with the given label."""
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidArgumentError(
                f"no subsystem {label!r} in {self.labels}"
            ) from None

    def flat_index(self, levels: Sequence[int]) -> int:
        """Flat basis index of the product state |levels[0], levels[1], ...>."""
        if len(levels) != len(self.dims):
            raise InvalidDimensionError(
                f"need {len(self.dims)} levels, got {len(levels)}"
            )
        idx = 0
        for lvl, d in zip(levels, self.dims):
            if not 0 <= lvl < d:
                raise InvalidArgumentError(f"level {lvl} outside 0..{d - 1}")
            idx = idx * d + lvl
        return idx


def tripartite(n_cavity: int, n_mech: int) -> CompositeSpace:
    """Standard (qubit, cavity, mech) layout."""
    return CompositeSpace((2, n_cavity, n_mech), ("qubit", "cavity", "mech"))


def qubit_mech(n_mech: int) -> CompositeSpace:
    return CompositeSpace((2, n_mech), ("qubit", "mech"))


def cavity_mech(n_cavity: int, n_mech: int) -> CompositeSpace:
    return CompositeSpace((n_cavity, n_mech), ("cavity", "mech"))


def mech_only(n_mech: int) -> CompositeSpace:
    return CompositeSpace((n_mech,), ("mech",))


@dataclass(frozen=True)
class Operator:
    """Linear operator on a :class:`CompositeSpace`, stored sparse (CSR)."""

    space: CompositeSpace
    matrix: sp.csr_matrix

    def __post_init__(self):
        m = sp.csr_matrix(self.matrix, dtype=np.complex128)
        d = self.space.total_dim
        if m.shape != (d, d):
            raise InvalidDimensionError(
                f"matrix shape {m.shape} does not match space dim {d}"
            )
        object.__setattr__(self, "matrix", m)

    def _check_space(self, other: "Operator"):
        if self.space != other.space:
            raise InvalidDimensionError("operators live on different spaces")

    def __add__(self, other: "Operator") -> "Operator":
        self._check_space(other)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_space(other)
        return Operator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.matrix)

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_space(other)
        return Operator(self.space, self.matrix @ other.matrix)

    def dag(self) -> "Operator":
        """Hermitian adjoint."""
        return Operator(self.space, self.matrix.conj().T.tocsr())

    def commutator(self, other: "Operator") -> "Operator":
        return self @ other - other @ self

    def norm_max(self) -> float:
        """Largest absolute entry (cheap operator-distance surrogate)."""
        if self.matrix.nnz == 0:
            return 0.0
        return float(np.abs(self.matrix.data).max())

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return (self - self.dag()).norm_max() <= tol

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()


def identity(space: CompositeSpace) -> Operator:
    return Operator(space, sp.identity(space.total_dim, dtype=np.complex128, format="csr"))


def ladder(dim: int) -> np.ndarray:
    """Truncated bosonic ladder operator as a dense (dim, dim) array.

    Matrix elements <n-1| a |n> = sqrt(n); the top Fock level d-1 is an
    artificial ceiling, so [a, a+] = 1 holds only below it.
    """
    if dim < 2:
        raise InvalidDimensionError(f"ladder operator needs dim >= 2, got {dim}")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(np.complex128)


def number_op(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(np.complex128)


_PAULI = {
    # qubit basis ordered (|e>, |g>)
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "plus": np.array([[0, 1], [0, 0]], dtype=np.complex128),   # |e><g|
    "minus": np.array([[0, 0], [1, 0]], dtype=np.complex128),  # |g><e|
}


def pauli(kind: Literal["x", "y", "z", "plus", "minus"]) -> np.ndarray:
    """Pauli / ladder matrix on the (|e>, |g>) ordered qubit basis."""
    try:
        return _PAULI[kind].copy()
    except KeyError:
        raise InvalidArgumentError(
            f"unknown pauli kind {kind!r}, expected one of {sorted(_PAULI)}"
        ) from None


def embed(local: np.ndarray | sp.spmatrix, position: int, space: CompositeSpace) -> Operator:
    """Lift a single-subsystem operator to the full space by Kronecker products.

    Parameters
    ----------
    local : array or sparse matrix
        Square operator on subsystem ``position``.
    position : int
        Subsystem slot (0-based) in ``space``.
    space : CompositeSpace
        Target space.
    """
    if not 0 <= position < len(space.dims):
        raise InvalidArgumentError(
            f"position {position} outside 0..{len(space.dims) - 1}"
        )
    local = sp.csr_matrix(local, dtype=np.complex128)
    d = space.dims[position]
    if local.shape != (d, d):
        raise InvalidDimensionError(
            f"local operator shape {local.shape} does not match subsystem dim {d}"
        )
    mat = local
    for dim in space.dims[:position][::-1]:
        mat = sp.kron(sp.identity(dim, format="csr"), mat, format="csr")
    for dim in space.dims[position + 1:]:
        mat = sp.kron(mat, sp.identity(dim, format="csr"), format="csr")
    return Operator(space, mat)


def embed_label(local, label: str, space: CompositeSpace) -> Operator:
    """Like :func:`embed` but addressing the subsystem by label."""
    return embed(local, space.index(label), space)


@dataclass(frozen=True)
class QuantumState:
    """Pure ket or density matrix on a :class:`CompositeSpace`.

    Kets are 1-d arrays normalized to 1; densities are dense Hermitian
    trace-one matrices. Positivity is verified on construction up to total
    dimension ``DENSE_CHECK_LIMIT``.
    """

    space: CompositeSpace
    data: np.ndarray
    kind: Literal["ket", "density"]

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.complex128)
        d = self.space.total_dim
        if self.kind == "ket":
            if arr.shape != (d,):
                raise InvalidDimensionError(f"ket shape {arr.shape}, expected ({d},)")
            nrm = np.linalg.norm(arr)
            if abs(nrm - 1.0) > KET_NORM_TOL:
                raise InvalidArgumentError(f"ket norm {nrm} deviates from 1")
        elif self.kind == "density":
            if arr.shape != (d, d):
                raise InvalidDimensionError(
                    f"density shape {arr.shape}, expected ({d}, {d})"
                )
            tr = np.trace(arr)
            if abs(tr - 1.0) > TRACE_TOL:
                raise InvalidArgumentError(f"density trace {tr} deviates from 1")
            if np.abs(arr - arr.conj().T).max() > HERMITICITY_TOL:
                raise InvalidArgumentError("density matrix is not Hermitian")
            if d <= DENSE_CHECK_LIMIT:
                lo = np.linalg.eigvalsh(arr).min()
                if lo < EIGENVALUE_FLOOR:
                    raise InvalidArgumentError(
                        f"density matrix has eigenvalue {lo} < {EIGENVALUE_FLOOR}"
                    )
        else:
            raise InvalidArgumentError(f"unknown state kind {self.kind!r}")
        object.__setattr__(self, "data", arr)

    def as_density(self) -> "QuantumState":
        """Promote a ket to its projector; densities pass through."""
        if self.kind == "density":
            return self
        rho = np.outer(self.data, self.data.conj())
        return QuantumState(self.space, rho, "density")

    def density_matrix(self) -> np.ndarray:
        return self.as_density().data


def basis_ket(space: CompositeSpace, levels: Sequence[int]) -> QuantumState:
    """Product basis state |levels> on the given space."""
    vec = np.zeros(space.total_dim, dtype=np.complex128)
    vec[space.flat_index(levels)] = 1.0
    return QuantumState(space, vec, "ket")


def coherent_ket(dim: int, alpha: complex) -> np.ndarray:
    """Truncated coherent-state amplitudes, renormalized on the cut space."""
    if alpha == 0:
        vec = np.zeros(dim, dtype=np.complex128)
        vec[0] = 1.0
        return vec
    n = np.arange(dim)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, dim)))))
    vec = np.exp(n * np.log(complex(alpha)) - 0.5 * log_fact).astype(np.complex128)
    vec /= np.linalg.norm(vec)
    return vec


def thermal_density(dim: int, n_th: float) -> np.ndarray:
    """Truncated thermal (Gibbs) density matrix with mean occupation n_th."""
    if n_th < 0:
        raise InvalidArgumentError(f"n_th must be >= 0, got {n_th}")
    if n_th == 0:
        rho = np.zeros((dim, dim), dtype=np.complex128)
        rho[0, 0] = 1.0
        return rho
    ratio = n_th / (n_th + 1.0)
    pops = ratio ** np.arange(dim)
    pops /= pops.sum()
    return np.diag(pops).astype(np.complex128)


def expect(op: Operator, state: QuantumState) -> complex:
    """Expectation value <A> for a ket or density matrix on the same space."""
    if op.space != state.space:
        raise InvalidDimensionError("operator and state live on different spaces")
    if state.kind == "ket":
        return complex(np.vdot(state.data, op.matrix @ state.data))
    return complex(np.trace(op.matrix @ state.data))


def expect_matrix(op_matrix, rho: np.ndarray) -> complex:
    """Raw-matrix expectation Tr(A rho) used on hot inner loops."""
    if sp.issparse(op_matrix):
        return complex((op_matrix @ rho).diagonal().sum())
    return complex(np.trace(op_matrix @ rho))

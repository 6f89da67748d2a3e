"""Lindblad master-equation machinery.

Builds sparse superoperators on the row-major vectorized density-matrix
space, integrates the master equation with adaptive Runge-Kutta (explicit;
the damping rates here sit three to four orders below the coherent
frequencies, so the problem is oscillatory rather than stiff), solves for
steady states through a trace-constrained sparse LU with a long-time
integration fallback, and exposes a dense matrix-exponential oracle for
cross-checking the integrator on small systems.

Time-dependent Hamiltonians enter as a static part plus a list of
(constant Hermitian operator, real scalar function of t) pairs, so the
stepping loop only re-evaluates scalars; see
:func:`uom_sim.hamiltonians.drive_coefficients`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .exceptions import (
    DegenerateSteadyStateError,
    InvalidArgumentError,
    InvalidDimensionError,
    SolverError,
)
from .hilbert import (
    DENSE_CHECK_LIMIT,
    CompositeSpace,
    Operator,
    QuantumState,
)

TRUNCATION_FLAG_LIMIT = 1e-3
ORACLE_DIM_LIMIT = 64
_STEADY_REL_TOL = 1e-9


def vec(rho: np.ndarray) -> np.ndarray:
    """Row-major vectorization of a density matrix."""
    return np.asarray(rho, dtype=np.complex128).reshape(-1)


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v, dtype=np.complex128).reshape(dim, dim)


@dataclass(frozen=True)
class CollapseSet:
    """Collapse channels as (operator, rate) pairs on one space."""

    pairs: tuple[tuple[Operator, float], ...]

    def __post_init__(self):
        pairs = tuple((op, float(rate)) for op, rate in self.pairs)
        spaces = {op.space for op, _ in pairs}
        if len(spaces) > 1:
            raise InvalidDimensionError("collapse operators live on different spaces")
        for _, rate in pairs:
            if rate < 0:
                raise InvalidArgumentError(f"collapse rate {rate} is negative")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def empty(cls) -> "CollapseSet":
        return cls(())

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)


def thermal_pairs(op: Operator, rate: float, n_th: float = 0.0) -> list[tuple[Operator, float]]:
    """Damping channel against a bath of occupation n_th.

    rate*(n_th+1) on the lowering operator and rate*n_th on its adjoint,
    the pairing whose fixed point is the Gibbs occupation n_th.
    """
    if n_th < 0:
        raise InvalidArgumentError(f"n_th must be >= 0, got {n_th}")
    pairs = [(op, rate * (n_th + 1.0))]
    if n_th > 0:
        pairs.append((op.dag(), rate * n_th))
    return pairs


@dataclass(frozen=True)
class Superoperator:
    """Generator acting on vec(rho); matrix is (D^2, D^2) sparse."""

    space: CompositeSpace
    matrix: sp.csr_matrix

    def __post_init__(self):
        d2 = self.space.total_dim**2
        m = sp.csr_matrix(self.matrix, dtype=np.complex128)
        if m.shape != (d2, d2):
            raise InvalidDimensionError(
                f"superoperator shape {m.shape}, expected ({d2}, {d2})"
            )
        object.__setattr__(self, "matrix", m)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        d = self.space.total_dim
        return unvec(self.matrix @ vec(rho), d)


def _dissipator_superop(a: sp.csr_matrix, rate: float) -> sp.csr_matrix:
    d = a.shape[0]
    eye = sp.identity(d, dtype=np.complex128, format="csr")
    ada = (a.conj().T @ a).tocsr()
    sandwich = sp.kron(a, a.conj(), format="csr")
    left = sp.kron(ada, eye, format="csr")
    right = sp.kron(eye, ada.T, format="csr")
    return (rate / 2.0) * (2.0 * sandwich - left - right)


def hamiltonian_superop(H: Operator) -> Superoperator:
    """Coherent part -i(H rho - rho H) as a superoperator."""
    d = H.space.total_dim
    eye = sp.identity(d, dtype=np.complex128, format="csr")
    m = -1j * (sp.kron(H.matrix, eye, format="csr") - sp.kron(eye, H.matrix.T, format="csr"))
    return Superoperator(H.space, m.tocsr())


def liouvillian(H: Operator | None, collapses: CollapseSet | Iterable = ()) -> Superoperator:
    """Full Lindblad generator for a static Hamiltonian and collapse set."""
    if not isinstance(collapses, CollapseSet):
        collapses = CollapseSet(tuple(collapses))
    if H is None and len(collapses) == 0:
        raise InvalidArgumentError("need at least a Hamiltonian or one collapse channel")
    space = H.space if H is not None else collapses.pairs[0][0].space
    d2 = space.total_dim**2
    total = sp.csr_matrix((d2, d2), dtype=np.complex128)
    if H is not None:
        total = total + hamiltonian_superop(H).matrix
    for op, rate in collapses:
        if op.space != space:
            raise InvalidDimensionError("collapse operator space differs from H space")
        if rate == 0.0:
            continue
        total = total + _dissipator_superop(op.matrix, rate)
    return Superoperator(space, total.tocsr())


@dataclass
class Trajectory:
    """Sampled master-equation (or Schroedinger) evolution.

    expectations holds one complex series per requested observable;
    truncation_flags maps each bosonic subsystem label to the largest
    top-Fock-level population seen anywhere on the grid.  flagged is True
    when any of those exceed TRUNCATION_FLAG_LIMIT, meaning the run is not
    converged in Hilbert-space size.
    """

    times: np.ndarray
    expectations: dict[str, np.ndarray]
    trace_drift: float
    min_eigenvalue: float
    truncation_flags: dict[str, float]
    error_estimates: dict[str, float] = field(default_factory=dict)
    states: list[np.ndarray] | None = None
    n_steps: int = 0

    @property
    def flagged(self) -> bool:
        return any(v > TRUNCATION_FLAG_LIMIT for v in self.truncation_flags.values())


def _top_level_projectors(space: CompositeSpace) -> dict[str, sp.csr_matrix]:
    from .hilbert import embed

    out = {}
    for pos, (dim, label) in enumerate(zip(space.dims, space.labels)):
        if label == "qubit":
            continue
        proj = np.zeros((dim, dim), dtype=np.complex128)
        proj[dim - 1, dim - 1] = 1.0
        out[label] = embed(proj, pos, space).matrix
    return out


def _drive_list(drives) -> list[tuple[sp.csr_matrix, Callable[[float], float]]]:
    if not drives:
        return []
    return [(op.matrix, f) for op, f in drives]


def evolve(
    rho0: QuantumState,
    H: Operator | None,
    t_grid: Sequence[float],
    collapses: CollapseSet | Iterable = (),
    drives=None,
    e_ops: dict[str, Operator] | None = None,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    method: str = "DOP853",
    store_states: bool = False,
    max_step: float = np.inf,
) -> Trajectory:
    """Integrate the master equation over t_grid.

    A pure ket with no collapse channels follows the Schroedinger equation
    directly (dimension D instead of D^2); anything else is promoted to a
    density matrix and integrated in vectorized form.  Observables in e_ops
    are sampled at every grid time.  Raises SolverError when the stepper
    fails; attaches a truncation warning when any mode's top Fock level
    goes above TRUNCATION_FLAG_LIMIT.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 2 or np.any(np.diff(t_grid) <= 0):
        raise InvalidArgumentError("t_grid must be strictly increasing with >= 2 points")
    if not isinstance(collapses, CollapseSet):
        collapses = CollapseSet(tuple(collapses))
    space = rho0.space
    d = space.total_dim
    e_ops = e_ops or {}
    for name, op in e_ops.items():
        if op.space != space:
            raise InvalidDimensionError(f"observable {name!r} lives on a different space")
    drive_terms = _drive_list(drives)

    closed = len(collapses) == 0
    if closed and rho0.kind == "ket":
        states, n_steps = _integrate_ket(
            rho0.data, H, drive_terms, t_grid, rtol, atol, method, max_step
        )
        rhos = [np.outer(psi, psi.conj()) for psi in states]
    else:
        rho_mat = rho0.density_matrix()
        L0 = liouvillian(H, collapses) if (H is not None or len(collapses)) else None
        drive_supers = [
            (hamiltonian_superop(Operator(space, m)).matrix, f) for m, f in drive_terms
        ]

        def rhs(t, y):
            out = L0.matrix @ y
            for mat, f in drive_supers:
                out = out + f(t) * (mat @ y)
            return out

        sol = solve_ivp(
            rhs,
            (t_grid[0], t_grid[-1]),
            vec(rho_mat),
            t_eval=t_grid,
            method=method,
            rtol=rtol,
            atol=atol,
            max_step=max_step,
        )
        if not sol.success:
            raise SolverError(
                f"integrator failed at t = {sol.t[-1] if len(sol.t) else t_grid[0]}: "
                f"{sol.message} (rtol={rtol}, atol={atol})"
            )
        rhos = [unvec(sol.y[:, k], d) for k in range(sol.y.shape[1])]
        n_steps = int(sol.nfev)

    traces = np.array([np.trace(r) for r in rhos])
    trace_drift = float(np.abs(traces - 1.0).max())
    if d <= DENSE_CHECK_LIMIT:
        min_eig = float(min(np.linalg.eigvalsh((r + r.conj().T) / 2).min() for r in rhos))
    else:
        min_eig = np.nan

    projectors = _top_level_projectors(space)
    flags = {
        label: float(max(np.real((proj @ r).diagonal().sum()) for r in rhos))
        for label, proj in projectors.items()
    }
    for label, val in flags.items():
        if val > TRUNCATION_FLAG_LIMIT:
            warnings.warn(
                f"top Fock level of mode {label!r} reaches population {val:.2e}; "
                "increase the truncation",
                UserWarning,
                stacklevel=2,
            )

    expectations = {}
    error_estimates = {}
    for name, op in e_ops.items():
        series = np.array([(op.matrix @ r).diagonal().sum() for r in rhos])
        expectations[name] = series
        scale = float(np.abs(series).max()) if len(series) else 0.0
        error_estimates[name] = (rtol * max(scale, 1.0) + atol) * np.sqrt(max(n_steps, 1))

    return Trajectory(
        times=t_grid,
        expectations=expectations,
        trace_drift=trace_drift,
        min_eigenvalue=min_eig,
        truncation_flags=flags,
        error_estimates=error_estimates,
        states=rhos if store_states else None,
        n_steps=n_steps,
    )


def _integrate_ket(psi0, H, drive_terms, t_grid, rtol, atol, method, max_step):
    h0 = H.matrix if H is not None else None

    def rhs(t, y):
        out = -1j * (h0 @ y) if h0 is not None else np.zeros_like(y)
        for mat, f in drive_terms:
            out = out + (-1j * f(t)) * (mat @ y)
        return out

    sol = solve_ivp(
        rhs,
        (t_grid[0], t_grid[-1]),
        np.asarray(psi0, dtype=np.complex128),
        t_eval=t_grid,
        method=method,
        rtol=rtol,
        atol=atol,
        max_step=max_step,
    )
    if not sol.success:
        raise SolverError(f"integrator failed: {sol.message}")
    return [sol.y[:, k] for k in range(sol.y.shape[1])], int(sol.nfev)


def _trace_row(d: int) -> np.ndarray:
    row = np.zeros(d * d, dtype=np.complex128)
    row[:: d + 1] = 1.0
    return row


def steady_state(
    L: Superoperator, check_unique: bool | None = None, rel_tol: float = _STEADY_REL_TOL
) -> QuantumState:
    """Null vector of L with unit trace.

    Solves the trace-constrained linear system through sparse LU (one row of
    L replaced by the trace functional); falls back to long-time integration
    when the factorization fails or leaves a large residual.  The residual
    criterion is relative to the largest entry of L because the generator
    carries angular-frequency magnitudes.  Uniqueness of the null space is
    verified by default only where the dense check is cheap (vectorized
    dimension <= 1024); pass check_unique explicitly to override.
    """
    d = L.space.total_dim
    if check_unique is None:
        check_unique = d * d <= 1024
    scale = float(np.abs(L.matrix.data).max()) if L.matrix.nnz else 1.0
    rho = None
    m = L.matrix.tolil(copy=True)
    m[0, :] = _trace_row(d)
    b = np.zeros(d * d, dtype=np.complex128)
    b[0] = 1.0
    try:
        x = spla.splu(m.tocsc()).solve(b)
        candidate = _hermitize_normalize(unvec(x, d))
        if _steady_residual(L, candidate) <= rel_tol * scale:
            rho = candidate
    except RuntimeError:
        rho = None

    if rho is None:
        rho = _steady_by_integration(L, rel_tol * scale)

    if check_unique:
        _assert_unique_null_space(L, scale)

    return QuantumState(L.space, rho, "density")


def _hermitize_normalize(rho: np.ndarray) -> np.ndarray:
    rho = (rho + rho.conj().T) / 2.0
    tr = np.trace(rho).real
    if abs(tr) < 1e-300:
        raise SolverError("steady-state candidate has vanishing trace")
    return rho / tr


def _steady_residual(L: Superoperator, rho: np.ndarray) -> float:
    return float(np.abs(L.matrix @ vec(rho)).max())


def _steady_by_integration(L: Superoperator, abs_tol: float) -> np.ndarray:
    d = L.space.total_dim
    rho = np.eye(d, dtype=np.complex128) / d
    # slowest decay sets the horizon; start from the smallest rate visible in L
    t_step = 10.0 / max(np.abs(L.matrix.diagonal()).max(), 1e-300)
    expm_op = None
    for _ in range(60):
        expm_op = spla.expm_multiply(L.matrix * t_step, vec(rho))
        rho = _hermitize_normalize(unvec(expm_op, d))
        if _steady_residual(L, rho) <= abs_tol:
            return rho
        t_step *= 2.0
    raise SolverError(
        f"long-time integration did not reach a steady state "
        f"(residual {_steady_residual(L, rho):.3e}, target {abs_tol:.3e})"
    )


def _assert_unique_null_space(L: Superoperator, scale: float):
    d2 = L.matrix.shape[0]
    if d2 <= 4096:
        svals = np.linalg.svd(L.matrix.toarray(), compute_uv=False)
        near_null = int(np.sum(svals <= 1e-10 * scale))
    else:
        try:
            vals = spla.eigs(
                L.matrix, k=2, sigma=1e-12 * scale, return_eigenvectors=False
            )
            near_null = int(np.sum(np.abs(vals) <= 1e-10 * scale))
        except Exception as exc:  # Arnoldi breakdowns surface as diagnostics
            warnings.warn(f"uniqueness check inconclusive: {exc}", UserWarning, stacklevel=2)
            return
    if near_null > 1:
        raise DegenerateSteadyStateError(
            f"null space dimension appears to be {near_null}; steady state not unique"
        )


def propagator_oracle(L: Superoperator, t: float) -> np.ndarray:
    """Dense exp(L t) for cross-checking evolve; small systems only."""
    d = L.space.total_dim
    if d > ORACLE_DIM_LIMIT:
        raise InvalidDimensionError(
            f"oracle limited to dimension {ORACLE_DIM_LIMIT}, got {d}"
        )
    return expm(L.matrix.toarray() * t)

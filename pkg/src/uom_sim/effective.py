"""Numerical checks of the qubit-elimination step.

Reducing the three-body qubit/cavity/phonon Hamiltonian to an effective
photon-phonon model rests on two approximations: the qubit remains in its
dressed ground state, and the cavity quadrature can be treated as a slow
classical variable xi = <a + a^dag>.  This module probes both numerically.

:func:`dressed_mech_frequency` pins the cavity quadrature to a scalar and
diagonalizes the remaining qubit-phonon problem exactly; the gap between the
two lowest levels in the qubit-ground sector is the dressed mechanical
frequency as a function of xi.  Comparing it against
:func:`~uom_sim.hamiltonians.shifted_mech_frequency` certifies the
closed-form frequency shift.  :func:`compare_models` propagates one initial
state under the full Hamiltonian and under a reduced one, side by side, and
reports population deviations and oscillation frequencies; this is how the
pair-conversion picture (one photon <-> two phonons) is validated before any
open-system run.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .exceptions import (
    DispersiveDivergenceError,
    InvalidArgumentError,
    InvalidDimensionError,
    SubspaceIdentificationError,
)
from .hamiltonians import SystemParams, coupling_g
from .hilbert import CompositeSpace, Operator, QuantumState, pauli, ladder, qubit_mech

__all__ = [
    "OVERLAP_THRESHOLD",
    "DispersiveCoefficients",
    "ModelComparison",
    "pinned_hamiltonian",
    "dressed_mech_frequency",
    "dressed_pair_resonance",
    "dispersive_coefficients",
    "compare_models",
    "oscillation_frequency",
]

# Eigenvectors belong to the qubit-ground sector when their weight on
# |g><g| (x) I exceeds this; dressed states are never exact product states.
OVERLAP_THRESHOLD = 0.5

# Minimum relative distance of omega_q(xi) from +/- omega_m before the
# dispersive formulas are considered meaningless.
_RESONANCE_GUARD = 1e-9

# Zero-padding factor for the spectral peak estimate; parabolic
# interpolation then refines below one padded bin.
_FFT_PAD = 8


def pinned_hamiltonian(params: SystemParams, xi_mean: float, n_mech: int) -> Operator:
    """Qubit-phonon Hamiltonian with the cavity quadrature pinned to a scalar.

    Substituting (a + a^dag) -> xi_mean turns the longitudinal coupling into
    a qubit frequency offset, omega_q(xi) = omega_q + 2 g_z xi, and removes
    the cavity from the problem (its free energy becomes an additive
    constant).  What remains is a transverse qubit-phonon model on the
    (qubit, mech) product space, small enough for dense diagonalization.
    """
    if n_mech < 2:
        raise InvalidDimensionError(f"need at least 2 phonon levels, got {n_mech}")
    space = qubit_mech(n_mech)
    b = ladder(n_mech)
    sz = pauli("z")
    sx = pauli("x")
    half_wq = 0.5 * params.omega_q + params.g_z * xi_mean
    h = (
        np.kron(half_wq * sz, np.eye(n_mech))
        + np.kron(np.eye(2), params.omega_m * (b.conj().T @ b))
        + np.kron(params.g_x * sx, b + b.conj().T)
    )
    return Operator(space, sp.csr_matrix(h))


def _mech_levels(space: CompositeSpace) -> int:
    return space.dims[space.index("mech")]


def _ground_sector_energies(
    params: SystemParams, xi_mean: float, n_mech: int, count: int
) -> np.ndarray:
    """Lowest ``count`` eigenvalues whose eigenvectors live in the qubit-ground sector."""
    h = pinned_hamiltonian(params, xi_mean, n_mech).to_dense()
    evals, evecs = la.eigh(h)
    # qubit basis is (|e>, |g>): ground weight is the second block row
    blocks = evecs.reshape(2, n_mech, evecs.shape[1])
    ground_weight = np.sum(np.abs(blocks[1]) ** 2, axis=0)
    selected = np.flatnonzero(ground_weight > OVERLAP_THRESHOLD)
    if selected.size < count:
        table = [(float(evals[k]), float(ground_weight[k])) for k in range(min(12, evals.size))]
        raise SubspaceIdentificationError(
            f"found {selected.size} qubit-ground eigenvectors above overlap "
            f"{OVERLAP_THRESHOLD}, need {count}; lowest levels (energy, overlap): {table}",
            overlaps=table,
        )
    return evals[selected[:count]]


def dressed_mech_frequency(
    params: SystemParams, xi_mean: float, space: CompositeSpace
) -> float:
    """Exact dressed mechanical frequency at a pinned cavity quadrature.

    The phonon truncation is taken from the ``mech`` axis of ``space``; a
    cavity axis, if present, is ignored because the pinning replaces it by
    the scalar ``xi_mean``.  Returns the difference between the second and
    first eigenvalues inside the qubit-ground sector (rad/s).
    """
    e = _ground_sector_energies(params, xi_mean, _mech_levels(space), 2)
    return float(e[1] - e[0])


def dressed_pair_resonance(
    params: SystemParams, xi_mean: float, space: CompositeSpace
) -> float:
    """Energy of two dressed phonons, E2 - E0, in the qubit-ground sector.

    This is the cavity frequency at which one photon converts resonantly
    into a phonon pair; the bare choice 2*omega_m misses it by roughly
    4 chi, which exceeds the conversion rate at the reference parameters.
    """
    e = _ground_sector_energies(params, xi_mean, _mech_levels(space), 3)
    return float(e[2] - e[0])


class DispersiveCoefficients(NamedTuple):
    """Dispersive-expansion coefficients at a fixed cavity quadrature xi."""

    lambda_plus: float
    lambda_minus: float
    chi: float


def dispersive_coefficients(params: SystemParams, xi: float) -> DispersiveCoefficients:
    """Dispersive mixing angles and phonon frequency pull at quadrature xi.

    omega_q(xi) = omega_q + 2 g_z xi sets the working qubit frequency;
    lambda_pm = g_x / (omega_q(xi) +/- omega_m) are the mixing angles of the
    two phonon sidebands and chi = g_x^2 omega_q(xi) / (omega_q(xi)^2 -
    omega_m^2) is the state-dependent frequency pull.  All three diverge
    when the shifted qubit crosses a phonon sideband, which is flagged as an
    error rather than returned as a large number.
    """
    wq = params.omega_q + 2.0 * params.g_z * xi
    wm = params.omega_m
    if abs(wq - wm) <= _RESONANCE_GUARD * wm or abs(wq + wm) <= _RESONANCE_GUARD * wm:
        raise DispersiveDivergenceError(
            f"omega_q(xi) = {wq:.6e} rad/s within guard of +/- omega_m = {wm:.6e}"
        )
    chi = params.g_x**2 * wq / (wq**2 - wm**2)
    return DispersiveCoefficients(
        lambda_plus=params.g_x / (wq + wm),
        lambda_minus=params.g_x / (wq - wm),
        chi=chi,
    )


@dataclass(frozen=True)
class ModelComparison:
    """Side-by-side closed-system run of a full and a reduced Hamiltonian.

    ``observables`` maps series names to real arrays on ``times``:
    ``P_02_*`` and ``P_10_*`` are the populations of the (cavity, mech) Fock
    states |0,2> and |1,0> (with the qubit projected on its ground state for
    the full model), and ``P_e_full`` is the qubit excited population, which
    only exists for the full model.  ``max_deviation`` is the largest
    pointwise full-vs-reduced population difference over the shared series.
    Oscillation frequencies are angular (rad/s), extracted from the photon
    population ``P_10``.
    """

    times: np.ndarray
    observables: dict[str, np.ndarray]
    max_deviation: float
    oscillation_frequency_full: float
    oscillation_frequency_reduced: float

    def __post_init__(self):
        n = len(self.times)
        for name, series in self.observables.items():
            if len(series) != n:
                raise InvalidDimensionError(f"series {name!r} length != time grid")
            if np.min(series) < -1e-9 or np.max(series) > 1.0 + 1e-9:
                raise InvalidArgumentError(f"series {name!r} leaves [0, 1]")


def oscillation_frequency(times: np.ndarray, series: np.ndarray) -> float:
    """Dominant angular frequency of a real series on a uniform time grid.

    Mean-subtracted, Hann-windowed FFT with zero padding; the peak bin is
    refined by log-parabolic interpolation, which is robust against the slow
    envelopes produced by residual detuning.  Returns 0.0 for a series that
    is constant to machine precision.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(series, dtype=float)
    if t.ndim != 1 or t.size < 4 or y.shape != t.shape:
        raise InvalidArgumentError("need matching 1-d arrays with >= 4 samples")
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-8, atol=0.0):
        raise InvalidArgumentError("time grid must be uniform for the FFT estimate")
    y = y - y.mean()
    if np.max(np.abs(y)) < 1e-12:
        return 0.0
    window = np.hanning(y.size)
    padded = int(_FFT_PAD * 2 ** math.ceil(math.log2(y.size)))
    spec = np.abs(np.fft.rfft(y * window, n=padded))
    k = int(np.argmax(spec[1:])) + 1  # skip the DC bin
    if 1 <= k < spec.size - 1 and spec[k - 1] > 0 and spec[k + 1] > 0:
        la_, lb, lc = np.log(spec[k - 1 : k + 2])
        denom = la_ - 2.0 * lb + lc
        shift = 0.5 * (la_ - lc) / denom if denom != 0.0 else 0.0
        shift = float(np.clip(shift, -0.5, 0.5))
    else:
        shift = 0.0
    freq = (k + shift) / (padded * dt[0])
    return 2.0 * math.pi * float(freq)


def _closed_series(hmat: np.ndarray, state: QuantumState, times: np.ndarray) -> np.ndarray:
    """Closed-system kets or densities on a time grid via dense eigendecomposition.

    Returns an array of kets with shape (n_t, D) when ``state`` is a ket,
    else densities with shape (n_t, D, D).
    """
    evals, vecs = la.eigh(hmat)
    if state.kind == "ket":
        c = vecs.conj().T @ state.data
        phases = np.exp(-1j * np.outer(times, evals))
        return (phases * c) @ vecs.T  # (n_t, D) kets in the original basis
    rho_eig = vecs.conj().T @ state.density_matrix() @ vecs
    out = np.empty((times.size, evals.size, evals.size), dtype=complex)
    for i, t in enumerate(times):
        ph = np.exp(-1j * evals * t)
        out[i] = vecs @ (np.outer(ph, ph.conj()) * rho_eig) @ vecs.conj().T
    return out


def _population(states: np.ndarray, flat_idx: int) -> np.ndarray:
    if states.ndim == 2:  # kets
        return np.abs(states[:, flat_idx]) ** 2
    return np.real(states[:, flat_idx, flat_idx])


def _excited_population(states: np.ndarray, dim_rest: int) -> np.ndarray:
    # qubit basis (|e>, |g>): the e-sector is the first dim_rest flat indices
    if states.ndim == 2:
        return np.sum(np.abs(states[:, :dim_rest]) ** 2, axis=1)
    diag = np.einsum("tii->ti", states).real
    return np.sum(diag[:, :dim_rest], axis=1)


def _project_ground(state: QuantumState, reduced: CompositeSpace) -> QuantumState:
    """Condition the state on the qubit ground state and drop the qubit axis."""
    dim_rest = reduced.total_dim
    if state.kind == "ket":
        block = state.data.reshape(2, dim_rest)[1]
        weight = float(np.vdot(block, block).real)
        if weight < 1e-12:
            raise InvalidArgumentError("initial state has no qubit-ground component")
        return QuantumState(reduced, block / math.sqrt(weight), "ket")
    rho = state.density_matrix().reshape(2, dim_rest, 2, dim_rest)[1, :, 1, :]
    weight = float(np.trace(rho).real)
    if weight < 1e-12:
        raise InvalidArgumentError("initial state has no qubit-ground component")
    return QuantumState(reduced, rho / weight, "density")


def compare_models(
    params: SystemParams,
    rho0: QuantumState,
    t_grid: np.ndarray,
    full: Operator,
    reduced: Operator,
) -> ModelComparison:
    """Propagate one initial state under the full and a reduced Hamiltonian.

    ``rho0`` lives on the full (qubit, cavity, mech) space; its reduced-model
    counterpart is obtained by conditioning on the qubit ground state.  Both
    propagations are closed-system and use dense eigendecomposition, which is
    exact on the grid and cheap at validation-size truncations.  Pass a
    ``t_grid`` in seconds covering at least one expected conversion period
    (about pi / (sqrt(2) |G1|)), otherwise the spectral estimate of the
    oscillation frequency is flagged as unreliable.
    """
    fspace, rspace = full.space, reduced.space
    if fspace.labels != ("qubit", "cavity", "mech"):
        raise InvalidDimensionError(f"full model needs (qubit, cavity, mech), got {fspace.labels}")
    if rspace.labels != ("cavity", "mech") or rspace.dims != fspace.dims[1:]:
        raise InvalidDimensionError(
            "reduced model must act on the (cavity, mech) axes of the full space"
        )
    if rho0.space != fspace:
        raise InvalidDimensionError("initial state is not on the full space")
    if fspace.dims[2] < 3 or fspace.dims[1] < 2:
        raise InvalidDimensionError("need >= 2 cavity and >= 3 phonon levels to track |0,2> and |1,0>")
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 4 or np.any(np.diff(t) <= 0):
        raise InvalidArgumentError("t_grid must be 1-d, increasing, with >= 4 points")

    g1 = coupling_g(1, params)
    if 2.0 * math.sqrt(2.0) * abs(g1) * (t[-1] - t[0]) < 2.0 * math.pi and g1 != 0.0:
        warnings.warn(
            "time grid shorter than one pair-conversion period; "
            "oscillation-frequency estimates will be unreliable",
            stacklevel=2,
        )

    red0 = _project_ground(rho0, rspace)
    full_states = _closed_series(full.to_dense(), rho0, t)
    red_states = _closed_series(reduced.to_dense(), red0, t)

    obs = {
        "P_02_full": _population(full_states, fspace.flat_index((1, 0, 2))),
        "P_10_full": _population(full_states, fspace.flat_index((1, 1, 0))),
        "P_e_full": _excited_population(full_states, rspace.total_dim),
        "P_02_reduced": _population(red_states, rspace.flat_index((0, 2))),
        "P_10_reduced": _population(red_states, rspace.flat_index((1, 0))),
    }
    deviation = max(
        float(np.max(np.abs(obs[f"P_{tag}_full"] - obs[f"P_{tag}_reduced"])))
        for tag in ("02", "10")
    )
    return ModelComparison(
        times=t,
        observables={k: np.clip(v, 0.0, 1.0) for k, v in obs.items()},
        max_deviation=deviation,
        oscillation_frequency_full=oscillation_frequency(t, obs["P_10_full"]),
        oscillation_frequency_reduced=oscillation_frequency(t, obs["P_10_reduced"]),
    )

"""Mechanical parametric amplifier: quadrature fixed points and gain.

The longitudinal qubit drive at twice the phonon frequency turns the
dispersive interaction into a phonon pump alpha b'^2 + alpha* b^2 in the
frame rotating at omega_m (see :func:`~uom_sim.hamiltonians.mpa_constants`).
Below the oscillation threshold 4|alpha| = kappa the pump amplifies one
input quadrature and squeezes the conjugate one.

Three solvers live here.  :func:`analytic_gain` is the closed formula
G(phi) = (16|a|^2 + kappa^2 - 8|a| kappa sin phi)/(16|a|^2 - kappa^2);
its denominator is oriented so that G(alpha=0) = -1, so the physical
output/input ratios returned by the other two solvers agree with it in
magnitude and differ by an overall sign below threshold.
:func:`quadrature_steady` solves the mean-field quadrature equations

    dX/dt = -(kappa/2 + 2|a| sin phi) X - 2|a| cos phi Y + sqrt(kappa) X_in
    dY/dt = -2|a| cos phi X - (kappa/2 - 2|a| sin phi) Y + sqrt(kappa) Y_in

for the fixed point, optionally closing the Kerr correction 2 K N as a
self-consistent detuning.  The off-diagonal coefficients are symmetric;
both follow from d b/dt = -2i alpha b' - (kappa/2) b with
alpha = |a| e^{-i phi}.  :func:`simulate_gain` cross-validates against the
quantum master equation of the pumped mode with the input modeled as a weak
resonant coherent drive of strength sqrt(kappa) <c_in>.

Output fields use c_out = sqrt(kappa) c - c_in, so a lossless off-resonant
reflection has unit gain.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import CollapseSet, liouvillian, steady_state, thermal_pairs
from .exceptions import (
    InvalidArgumentError,
    InvalidDimensionError,
    KerrConvergenceError,
    ThresholdError,
)
from .hamiltonians import SystemParams, build_reduced, mpa_constants
from .hilbert import embed, expect_matrix, ladder

__all__ = [
    "MpaConfig",
    "GainResult",
    "analytic_gain",
    "quadrature_steady",
    "steady_phonons",
    "simulate_gain",
]

# |input| sqrt(kappa) must stay well under |alpha| for the linearized
# input-output picture; warn past this fraction.
_INPUT_PUMP_RATIO = 0.1

_KERR_MAX_ITER = 500
_KERR_TOL = 1e-10

# steady-state weight on the top two Fock levels above this marks the
# result unconverged; two levels because the pair pump populates one parity
_TRUNCATION_LIMIT = 1e-3


@dataclass(frozen=True)
class MpaConfig:
    """Working point of the parametric amplifier.

    ``alpha`` is the complex pump amplitude |alpha| e^{-i phi}; ``phi`` is
    kept explicitly because the gain formulas are phase-resolved.  ``kerr``
    is the quartic correction constant K and ``n_critical`` the phonon
    budget above which the two-level expansion is invalid (carried for
    reporting, not enforced here).
    """

    alpha: complex
    phi: float
    kappa: float
    kerr: float = 0.0
    input_amplitude: complex = 0.0
    n_critical: float | None = None

    def __post_init__(self):
        if self.kappa <= 0:
            raise InvalidArgumentError("kappa must be positive")
        if self.kerr < 0:
            raise InvalidArgumentError("Kerr constant must be >= 0")
        if not -math.pi < self.phi <= math.pi:
            raise InvalidArgumentError(f"phi = {self.phi} outside (-pi, pi]")
        pump = abs(self.alpha)
        if pump > 0 and math.sqrt(self.kappa) * abs(self.input_amplitude) > _INPUT_PUMP_RATIO * pump:
            warnings.warn(
                "input amplitude is not small against the pump; "
                "gain ratios will include saturation effects",
                stacklevel=2,
            )

    @property
    def below_threshold(self) -> bool:
        # oscillation threshold of the linear pump: 2|alpha| = kappa/2
        return 2.0 * abs(self.alpha) < 0.5 * self.kappa


@dataclass(frozen=True)
class GainResult:
    """Quadrature gains at one working point.

    ``gain_X``/``gain_Y`` are output/input ratios (NaN when the matching
    input quadrature is zero), ``steady_N`` the incoherent phonon number,
    and ``analytic`` distinguishes fixed-point results from master-equation
    ones.  ``converged`` goes False when the master-equation solve shows
    weight on the top Fock level.
    """

    gain_X: float
    gain_Y: float
    steady_N: float
    phase: float
    analytic: bool
    converged: bool = True


def analytic_gain(phi: float, alpha_mag: float, kappa: float) -> float:
    """Closed-form phase-resolved gain of the below-threshold amplifier.

    Returns the signed formula value; take ``abs`` for the measurable gain.
    The extrema sit at sin(phi) = -/+1: amplification at phi = -pi/2 and
    deamplification at +pi/2.
    """
    if alpha_mag < 0 or kappa <= 0:
        raise InvalidArgumentError("need alpha_mag >= 0 and kappa > 0")
    num = 16.0 * alpha_mag**2 + kappa**2 - 8.0 * alpha_mag * kappa * math.sin(phi)
    den = 16.0 * alpha_mag**2 - kappa**2
    if abs(den) <= 1e-12 * kappa**2:
        raise ThresholdError(f"pump at threshold: 4|alpha| = {4 * alpha_mag:.6e} = kappa")
    return num / den


def steady_phonons(alpha_mag: float, kappa: float) -> float:
    """Incoherent phonons generated by the pump alone, 8|a|^2/(kappa^2 - 16|a|^2)."""
    if alpha_mag < 0 or kappa <= 0:
        raise InvalidArgumentError("need alpha_mag >= 0 and kappa > 0")
    den = kappa**2 - 16.0 * alpha_mag**2
    if den <= 0:
        raise ThresholdError(
            f"pump at or above threshold: 4|alpha| = {4 * alpha_mag:.6e} >= kappa = {kappa:.6e}"
        )
    return 8.0 * alpha_mag**2 / den


def _fixed_point(config: MpaConfig, x_in: float, y_in: float, n_guess: float):
    """Solve the 2x2 quadrature system at a given Kerr phonon number."""
    a = abs(config.alpha)
    s = 2.0 * a * math.sin(config.phi)
    c = 2.0 * a * math.cos(config.phi)
    delta = 2.0 * config.kerr * n_guess
    m = np.array(
        [[0.5 * config.kappa + s, c - delta], [c + delta, 0.5 * config.kappa - s]]
    )
    rhs = math.sqrt(config.kappa) * np.array([x_in, y_in])
    return np.linalg.solve(m, rhs)


def quadrature_steady(config: MpaConfig, x_in: float, y_in: float) -> GainResult:
    """Steady intracavity quadratures and output gains from the mean field.

    With ``kerr`` = 0 this is a single linear solve; otherwise the phonon
    number N entering the Kerr detuning 2 K N is iterated to self-
    consistency, where N combines the coherent displacement with the
    pump-generated incoherent population.
    """
    if not config.below_threshold:
        raise ThresholdError(
            f"pump 4|alpha| = {4 * abs(config.alpha):.6e} not below kappa = {config.kappa:.6e}"
        )
    a = abs(config.alpha)
    n_fluct = steady_phonons(a, config.kappa)
    n = n_fluct
    xy = _fixed_point(config, x_in, y_in, n)
    if config.kerr > 0:
        for _ in range(_KERR_MAX_ITER):
            n_new = n_fluct + 0.5 * float(xy @ xy)
            if abs(n_new - n) <= _KERR_TOL * max(1.0, n):
                n = n_new
                break
            # damped update keeps the iteration contractive near threshold
            n = 0.5 * n + 0.5 * n_new
            xy = _fixed_point(config, x_in, y_in, n)
        else:
            raise KerrConvergenceError(
                f"Kerr self-consistency did not settle in {_KERR_MAX_ITER} iterations "
                f"(K = {config.kerr:.3e}, last N = {n:.3e})"
            )
    root_k = math.sqrt(config.kappa)
    gain_x = (root_k * xy[0] - x_in) / x_in if x_in != 0.0 else math.nan
    gain_y = (root_k * xy[1] - y_in) / y_in if y_in != 0.0 else math.nan
    return GainResult(
        gain_X=float(gain_x),
        gain_Y=float(gain_y),
        steady_N=float(n_fluct + 0.5 * float(xy @ xy)),
        phase=config.phi,
        analytic=True,
    )


def simulate_gain(
    params: SystemParams,
    Omega_d: float,
    phi: float,
    input_amplitude: float,
    space,
) -> GainResult:
    """Master-equation cross-check of the quadrature gains.

    Builds the pumped-mode model alpha b'^2 + alpha* b^2 on the mechanics
    alone (``space`` must be a phonon-only space), adds a weak resonant
    coherent drive representing the input field with real <c_in> =
    ``input_amplitude``, and solves for the steady state twice, once per
    input quadrature.  The incoherent part <b'b> - |<b>|^2 of the first
    solve is reported as ``steady_N``.
    """
    if space.labels != ("mech",):
        raise InvalidDimensionError(f"simulate_gain runs on a phonon-only space, got {space.labels}")
    if params.kappa <= 0:
        raise InvalidArgumentError("simulate_gain needs kappa > 0")
    pump = mpa_constants(params, Omega_d, phi)
    a = abs(pump.alpha)
    if a > 0:
        n_pred = steady_phonons(a, params.kappa)
        if space.dims[0] < 4.0 * n_pred:
            raise InvalidDimensionError(
                f"phonon truncation {space.dims[0]} below 4 x predicted occupation {n_pred:.2f}"
            )
    h_pump = build_reduced(params, space, "mpa", alpha=pump.alpha)
    b = embed(ladder(space.dims[0]), 0, space)
    eps = math.sqrt(params.kappa) * input_amplitude
    collapses = CollapseSet(tuple(thermal_pairs(b, params.kappa, params.n_th)))

    # X input: H_d = i eps (b' - b) pushes <X>; Y input: eps (b + b') pushes <Y>
    drive_x = (1j * eps) * (b.dag() - b)
    drive_y = eps * (b + b.dag())
    x_in = math.sqrt(2.0) * input_amplitude
    y_in = -math.sqrt(2.0) * input_amplitude

    b_mat = b.matrix.toarray()
    n_mat = b_mat.conj().T @ b_mat
    top = space.dims[0] - 1
    root_k = math.sqrt(params.kappa)

    results = {}
    converged = True
    steady_n = 0.0
    for tag, h_drive in (("X", drive_x), ("Y", drive_y)):
        rho = steady_state(liouvillian(h_pump + h_drive, collapses)).density_matrix()
        mean_b = expect_matrix(b_mat, rho)
        results[tag] = mean_b
        if tag == "X":
            n_mean = float(expect_matrix(n_mat, rho).real)
            steady_n = n_mean - abs(mean_b) ** 2
        if float(rho[top, top].real + rho[top - 1, top - 1].real) > _TRUNCATION_LIMIT:
            converged = False

    gain_x = (root_k * math.sqrt(2.0) * results["X"].real - x_in) / x_in if x_in else math.nan
    gain_y = (root_k * math.sqrt(2.0) * results["Y"].imag - y_in) / y_in if y_in else math.nan
    return GainResult(
        gain_X=float(gain_x),
        gain_Y=float(gain_y),
        steady_N=float(steady_n),
        phase=phi,
        analytic=False,
        converged=converged,
    )

"""Model Hamiltonians, coupling ladders, and parameter mappings.

The physical setting is a charge qubit coupled longitudinally (sigma_z) to a
microwave resonator mode ``a`` and transversely (sigma_x) to a SAW phonon
mode ``b``.  Eliminating the far-detuned qubit turns the microwave quadrature
xi = <a + a'> into a modulation of the phonon frequency; expanding the
qubit-dressed phonon frequency in xi produces the coefficient ladder G_n
built by :func:`coupling_g`.  The builders below cover the full tripartite
model, the reduced two-mode models obtained from that expansion, the
parametric-amplifier model with a classical pump, and the circuit-level to
model-level parameter map.

Unit convention: every frequency, coupling, and rate inside the package is
angular (rad/s).  :meth:`SystemParams.from_hz` accepts the ordinary-frequency
values (the nu = omega/2pi numbers used in configuration files) and scales
them once, at construction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Union

import numpy as np
from scipy.constants import e as ELEMENTARY_CHARGE
from scipy.constants import hbar as HBAR
from scipy.constants import physical_constants

from .exceptions import (
    InstabilityError,
    InvalidArgumentError,
    InvalidDimensionError,
)
from .hilbert import CompositeSpace, Operator, embed, identity, ladder, pauli

TWO_PI = 2.0 * math.pi
FLUX_QUANTUM = physical_constants["mag. flux quantum"][0]

_HZ_FIELDS = ("omega_q", "omega_m", "omega_c0", "omega_d",
              "g_x", "g_z0", "Gamma", "gamma", "kappa")


@dataclass(frozen=True)
class SystemParams:
    """Model parameters, all angular (rad/s) except the dimensionless n_th.

    Attributes
    ----------
    omega_q : qubit splitting.
    omega_m : bare mechanical (phonon) frequency.
    omega_c0 : bare microwave resonator frequency.
    omega_d : longitudinal-modulation frequency; 0 for a static coupling.
    g_x : transverse qubit-phonon coupling.
    g_z0 : bare longitudinal qubit-field coupling.
    Gamma, gamma, kappa : qubit, resonator, and phonon decay rates.
    n_th : thermal occupation of the phonon bath.

    When the longitudinal coupling is modulated at omega_d, the co-rotating
    description has a shifted resonator frequency and half the coupling;
    both are exposed as the derived properties ``omega_c`` and ``g_z`` so
    every builder downstream is frame-agnostic.
    """

    omega_q: float
    omega_m: float
    omega_c0: float
    g_x: float
    g_z0: float
    omega_d: float = 0.0
    Gamma: float = 0.0
    gamma: float = 0.0
    kappa: float = 0.0
    n_th: float = 0.0

    def __post_init__(self):
        for name in ("omega_q", "omega_m", "omega_c0", "omega_d"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(f"{name} must be >= 0")
        for name in ("Gamma", "gamma", "kappa", "n_th"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(f"{name} must be >= 0")
        if not self.omega_q > self.omega_m:
            raise InvalidArgumentError(
                "require omega_q > omega_m (dispersive qubit-phonon regime)"
            )
        if self.omega_c < 0:
            raise InvalidArgumentError(
                f"effective resonator frequency omega_c0 - omega_d = "
                f"{self.omega_c} is negative"
            )

    @property
    def omega_c(self) -> float:
        """Effective resonator frequency in the modulation frame."""
        return self.omega_c0 - self.omega_d

    @property
    def g_z(self) -> float:
        """Effective longitudinal coupling (halved under modulation)."""
        return 0.5 * self.g_z0 if self.omega_d != 0.0 else self.g_z0

    @classmethod
    def from_hz(cls, **kwargs) -> "SystemParams":
        """Build from nu = omega/2pi values in Hz (rates included)."""
        scaled = {
            k: (TWO_PI * v if k in _HZ_FIELDS else v) for k, v in kwargs.items()
        }
        return cls(**scaled)

    def with_updates(self, **kwargs) -> "SystemParams":
        """Copy with replaced fields (angular units)."""
        return replace(self, **kwargs)


def coupling_g(n: int, params: SystemParams) -> float:
    """Coefficient G_n of the phonon-frequency expansion in the field quadrature.

    G_n = (-1)^n * (g_x^2 / omega_q^(n+1)) * (2 g_z)^n.  G_0 renormalizes the
    phonon frequency, G_1 is the frequency-modulation coupling, and the ratio
    G_(n+1)/G_n = -2 g_z/omega_q controls convergence of the ladder.
    """
    if int(n) != n or n < 0:
        raise InvalidArgumentError(f"order n must be a non-negative integer, got {n}")
    n = int(n)
    return (-1.0) ** n * params.g_x**2 * (2.0 * params.g_z) ** n / params.omega_q ** (n + 1)


def _require_layout(space: CompositeSpace, labels: tuple[str, ...]):
    if space.labels != labels:
        raise InvalidDimensionError(
            f"space layout {space.labels} does not match required {labels}"
        )


def _mode_pair(space: CompositeSpace) -> tuple[Operator, Operator]:
    a = embed(ladder(space.dims[0]), 0, space)
    b = embed(ladder(space.dims[1]), 1, space)
    return a, b


def build_full_hamiltonian(params: SystemParams, space: CompositeSpace) -> Operator:
    """Tripartite Hamiltonian on the (qubit, cavity, mech) layout.

    H = (omega_q/2) sigma_z + omega_c a'a + omega_m b'b
        + g_z sigma_z (a + a') + g_x sigma_x (b + b')
    """
    _require_layout(space, ("qubit", "cavity", "mech"))
    sz = embed(pauli("z"), 0, space)
    sx = embed(pauli("x"), 0, space)
    a = embed(ladder(space.dims[1]), 1, space)
    b = embed(ladder(space.dims[2]), 2, space)
    return (
        0.5 * params.omega_q * sz
        + params.omega_c * (a.dag() @ a)
        + params.omega_m * (b.dag() @ b)
        + params.g_z * (sz @ (a + a.dag()))
        + params.g_x * (sx @ (b + b.dag()))
    )


def build_reduced(
    params: SystemParams,
    space: CompositeSpace,
    variant: str,
    *,
    alpha: complex | None = None,
    delta_s: float | None = None,
) -> Operator:
    """Qubit-eliminated model Hamiltonians.

    Variants
    --------
    uom_full : omega_c a'a + omega_m b'b - G_1 (b'+b)^2 (a+a') on (cavity, mech).
    uom_rwa : free part + 2 G_1 b'b (a+a'); keeps only the phonon-number
        conserving piece of uom_full.
    quadratic : pair-conversion model G_1 (a' b^2 + a b'^2), written in the
        frame rotating at omega_c for the cavity and omega_c/2 for the
        phonons, so a residual detuning (omega_m - omega_c/2) b'b remains.
    mpa : classical-pump limit alpha b'^2 + alpha* b^2 on (mech,) alone;
        requires the ``alpha`` argument (see :func:`mpa_constants`).
    cross_kerr : dispersive-regime cross-Kerr coupling
        (2 G_1^2/delta_s) [a'a (2 b'b + 1) - b'^2 b^2]; requires ``delta_s``,
        the two-photon/two-phonon detuning.
    """
    if variant == "mpa":
        _require_layout(space, ("mech",))
        if alpha is None:
            raise InvalidArgumentError("variant 'mpa' requires the pump amplitude alpha")
        b = embed(ladder(space.dims[0]), 0, space)
        return complex(alpha) * (b.dag() @ b.dag()) + complex(np.conj(alpha)) * (b @ b)

    _require_layout(space, ("cavity", "mech"))
    a, b = _mode_pair(space)
    g1 = coupling_g(1, params)
    n_a = a.dag() @ a
    n_b = b.dag() @ b

    if variant == "uom_full":
        x_b = b + b.dag()
        return (
            params.omega_c * n_a
            + params.omega_m * n_b
            - g1 * (x_b @ x_b @ (a + a.dag()))
        )
    if variant == "uom_rwa":
        return (
            params.omega_c * n_a
            + params.omega_m * n_b
            + 2.0 * g1 * (n_b @ (a + a.dag()))
        )
    if variant == "quadratic":
        detuning = params.omega_m - 0.5 * params.omega_c
        return detuning * n_b + g1 * (a.dag() @ (b @ b) + a @ (b.dag() @ b.dag()))
    if variant == "cross_kerr":
        if delta_s is None:
            raise InvalidArgumentError("variant 'cross_kerr' requires delta_s")
        strength = 2.0 * g1**2 / delta_s
        return strength * (
            n_a @ (2.0 * n_b + identity(space))
            - b.dag() @ b.dag() @ b @ b
        )
    raise InvalidArgumentError(f"unknown reduced variant {variant!r}")


@dataclass(frozen=True)
class CavityCoherentDrive:
    """Coherent resonator drive epsilon (a e^{i w t} + a' e^{-i w t})."""

    epsilon: float
    omega_drive: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise InvalidArgumentError("drive amplitude epsilon must be >= 0")


@dataclass(frozen=True)
class QubitCosineDrive:
    """Longitudinal drive Omega_d sigma_z cos(omega_mod t + phi).

    omega_mod = None defers to twice the mechanical frequency, the parametric
    resonance condition; detuned spectra set it explicitly.
    """

    Omega_d: float
    omega_mod: float | None = None
    phi: float = 0.0

    def __post_init__(self):
        if self.Omega_d < 0:
            raise InvalidArgumentError("drive amplitude Omega_d must be >= 0")
        if not -math.pi < self.phi <= math.pi:
            raise InvalidArgumentError(f"phase {self.phi} outside (-pi, pi]")

    def resolved_frequency(self, params: SystemParams) -> float:
        return 2.0 * params.omega_m if self.omega_mod is None else self.omega_mod


@dataclass(frozen=True)
class QubitStepDrive:
    """Longitudinal step drive Omega_s sigma_z Theta(t - t_on)."""

    Omega_s: float
    t_on: float = 0.0


@dataclass(frozen=True)
class CurrentSinusoidDrive:
    """Classical current pulse I_c cos(Omega t) through the coupling line.

    The induced longitudinal drive amplitude follows from the same mutual
    inductance that sets g_z0, so only the current ratio I_c/I_0 enters:
    amplitude = g_z0 * I_c / I_0.
    """

    I_c: float
    I_0: float
    Omega: float

    def __post_init__(self):
        if self.I_c < 0 or self.I_0 <= 0:
            raise InvalidArgumentError("currents must satisfy I_c >= 0, I_0 > 0")


DriveSpec = Union[CavityCoherentDrive, QubitCosineDrive, QubitStepDrive, CurrentSinusoidDrive]


def drive_coefficients(
    spec: DriveSpec, params: SystemParams, space: CompositeSpace
) -> list[tuple[Operator, Callable[[float], float]]]:
    """Decompose a drive into (Hermitian operator, real scalar of t) pairs.

    The split keeps every matrix constant so integrators only re-evaluate
    scalars inside the stepping loop.
    """
    if isinstance(spec, CavityCoherentDrive):
        pos = space.index("cavity")
        a = embed(ladder(space.dims[pos]), pos, space)
        x_quad = a + a.dag()
        y_quad = 1j * (a - a.dag())
        w = spec.omega_drive
        return [
            (spec.epsilon * x_quad, lambda t, w=w: math.cos(w * t)),
            (spec.epsilon * y_quad, lambda t, w=w: math.sin(w * t)),
        ]
    pos = space.index("qubit")
    sz = embed(pauli("z"), pos, space)
    if isinstance(spec, QubitCosineDrive):
        w = spec.resolved_frequency(params)
        phi = spec.phi
        return [(spec.Omega_d * sz, lambda t, w=w, phi=phi: math.cos(w * t + phi))]
    if isinstance(spec, QubitStepDrive):
        t_on = spec.t_on
        return [(spec.Omega_s * sz, lambda t, t_on=t_on: 1.0 if t >= t_on else 0.0)]
    if isinstance(spec, CurrentSinusoidDrive):
        amp = params.g_z0 * spec.I_c / spec.I_0
        w = spec.Omega
        return [(amp * sz, lambda t, w=w: math.cos(w * t))]
    raise InvalidArgumentError(f"unknown drive spec {type(spec).__name__}")


def drive_term(
    spec: DriveSpec, params: SystemParams, space: CompositeSpace, t: float
) -> Operator:
    """Drive Hamiltonian evaluated at time t."""
    total = None
    for op, coeff in drive_coefficients(spec, params, space):
        piece = coeff(t) * op
        total = piece if total is None else total + piece
    return total


@dataclass(frozen=True)
class CircuitParams:
    """Circuit-level quantities feeding :func:`circuit_map`.

    E_J is the Josephson energy divided by hbar (rad/s); currents in A,
    capacitances in F, flux in Wb, u_0 (voltage zero-point fluctuation) in V.
    """

    E_J: float
    Phi_ext: float
    M: float
    I_0: float
    I_c: float
    C_q: float
    C_Sigma: float
    u_0: float
    Phi_0: float = FLUX_QUANTUM
    charge: float = ELEMENTARY_CHARGE

    def __post_init__(self):
        for name in ("E_J", "M", "I_0", "I_c", "C_q", "C_Sigma", "u_0", "Phi_0", "charge"):
            if getattr(self, name) <= 0:
                raise InvalidArgumentError(f"{name} must be > 0")
        if not 0.0 <= self.Phi_ext < self.Phi_0:
            raise InvalidArgumentError("Phi_ext must lie in [0, Phi_0)")


class CircuitDerived(NamedTuple):
    omega_q: float
    g_z: float
    g_x: float
    Omega_s: float


def circuit_map(c: CircuitParams) -> CircuitDerived:
    """Map circuit parameters to model parameters (all angular).

    omega_q = 2 E_J cos(pi Phi_ext/Phi_0)
    g_z   = -(pi E_J/Phi_0) sin(pi Phi_ext/Phi_0) M I_0
    g_x   = e C_q u_0 / (C_Sigma hbar)
    Omega_s = -(pi E_J/Phi_0) sin(pi Phi_ext/Phi_0) M I_c

    g_z and Omega_s share one prefactor, so g_z/Omega_s = I_0/I_c exactly.
    """
    angle = math.pi * c.Phi_ext / c.Phi_0
    omega_q = 2.0 * c.E_J * math.cos(angle)
    if abs(omega_q) < 1e-9 * c.E_J:
        warnings.warn(
            "flux bias at the degeneracy point: qubit splitting is zero",
            UserWarning,
            stacklevel=2,
        )
    slope = -(math.pi * c.E_J / c.Phi_0) * math.sin(angle) * c.M
    g_x = c.charge * c.C_q * c.u_0 / (c.C_Sigma * HBAR)
    return CircuitDerived(omega_q, slope * c.I_0, g_x, slope * c.I_c)


@dataclass(frozen=True)
class SawGeometry:
    """Phonon resonator geometry: mirror spacing L_0, sound speed v_e, mode index."""

    L_0: float
    v_e: float
    N_mode: int = 1

    def __post_init__(self):
        if self.L_0 <= 0 or self.v_e <= 0 or self.N_mode < 1:
            raise InvalidArgumentError("SawGeometry fields must be positive")

    def mech_frequency(self) -> float:
        """Angular frequency of the N-th standing-wave resonance."""
        return TWO_PI * self.N_mode * self.v_e / (2.0 * self.L_0)

    def check_link(self, params: SystemParams, rel_tol: float = 1e-9):
        """Verify the geometry reproduces params.omega_m."""
        got = self.mech_frequency()
        if abs(got - params.omega_m) > rel_tol * params.omega_m:
            raise InvalidArgumentError(
                f"geometry gives omega_m = {got}, params say {params.omega_m}"
            )


def shifted_mech_frequency(params: SystemParams, xi_mean: float) -> float:
    """Field-shifted mechanical frequency sqrt(omega_m^2 - 4 G_1 omega_m xi).

    First order in xi this is omega_m - 2 G_1 xi; the square root keeps the
    curvature responsible for the departure at large field amplitude.
    """
    g1 = coupling_g(1, params)
    radicand = params.omega_m**2 - 4.0 * g1 * params.omega_m * xi_mean
    if radicand <= 0.0:
        raise InstabilityError(
            f"mode softens to zero frequency at xi = {xi_mean} (radicand {radicand})"
        )
    return math.sqrt(radicand)


def static_length_shift(
    params: SystemParams, Omega_s: float, geom: SawGeometry
) -> tuple[float, float]:
    """Frequency and effective-length shift from a static longitudinal offset.

    delta_omega_m = (4 g_x^2/omega_q^2) Omega_s, delta_L = (delta_omega_m/omega_m) L_0.
    """
    d_omega = 4.0 * params.g_x**2 / params.omega_q**2 * Omega_s
    return d_omega, (d_omega / params.omega_m) * geom.L_0


def modulated_length(
    t: float, params: SystemParams, Omega_d: float, Omega: float, geom: SawGeometry
) -> float:
    """Instantaneous boundary displacement under sinusoidal modulation.

    delta_L(t) = (4 g_x^2/omega_q^2) (Omega_d/omega_m) L_0 cos(Omega t); the
    amplitude is the static shift formula evaluated with the drive amplitude.
    """
    amp, _ = static_length_shift(params, Omega_d, geom)
    return (amp / params.omega_m) * geom.L_0 * math.cos(Omega * t)


class PumpConstants(NamedTuple):
    alpha: complex
    kerr: float


def mpa_constants(
    params: SystemParams, Omega_d: float, phi: float, exact_prefactor: bool = False
) -> PumpConstants:
    """Pump amplitude and Kerr constant of the parametric-amplifier model.

    alpha = Omega_d (g_x/omega_q)^2 e^{-i phi}; the optional exact prefactor
    g_x^2 (omega_q^2 + omega_m^2)/(omega_q^2 - omega_m^2)^2 differs by
    O((omega_m/omega_q)^2), about 2% here.  K = g_x^4/omega_q^3.
    """
    if Omega_d < 0:
        raise InvalidArgumentError("Omega_d must be >= 0")
    if exact_prefactor:
        num = params.g_x**2 * (params.omega_q**2 + params.omega_m**2)
        mag = Omega_d * num / (params.omega_q**2 - params.omega_m**2) ** 2
    else:
        mag = Omega_d * (params.g_x / params.omega_q) ** 2
    kerr = params.g_x**4 / params.omega_q**3
    return PumpConstants(mag * np.exp(-1j * phi), kerr)


@dataclass(frozen=True)
class ValidityBounds:
    """Regime-of-validity ceilings for the reduced models.

    n_critical_drive bounds the phonon number below which the classical-pump
    linearization holds; n_critical_dispersive is the dispersive-expansion
    ceiling omega_q^2/(4 g_x^2); n_critical is the larger of the two (the
    form quoted in the source analysis -- both branches are kept because the
    smaller one is the operationally binding ceiling).  The gain ceiling
    8 N + 4 follows from the pump-linearity branch, which is what limits
    amplification.  n_dispersive_max = 1/(2 lambda_-)^2 keeps the
    qubit-phonon hybridization perturbative, xi_max bounds the intracavity
    quadrature, and cross_kerr_shift is the residual per-phonon pull
    4 G_1^2/delta_s - 2 G_2 of the resonator frequency.
    """

    n_critical: float
    n_critical_drive: float
    n_critical_dispersive: float
    gain_critical: float
    gain_critical_db: float
    n_dispersive_max: float
    xi_max: float
    cross_kerr_shift: float


def validity_bounds(
    params: SystemParams, Omega_d: float, delta_s: float
) -> ValidityBounds:
    """Evaluate every validity ceiling at the given drive and detuning."""
    if Omega_d < 0:
        raise InvalidArgumentError("Omega_d must be >= 0")
    if delta_s == 0:
        raise InvalidArgumentError("delta_s must be nonzero")
    n_drive = Omega_d * params.omega_q / params.g_x**2
    n_disp = params.omega_q**2 / (4.0 * params.g_x**2)
    gain = 8.0 * n_drive + 4.0
    lam_minus = params.g_x / (params.omega_q - params.omega_m)
    g1 = coupling_g(1, params)
    g2 = coupling_g(2, params)
    return ValidityBounds(
        n_critical=max(n_drive, n_disp),
        n_critical_drive=n_drive,
        n_critical_dispersive=n_disp,
        gain_critical=gain,
        gain_critical_db=10.0 * math.log10(gain),
        n_dispersive_max=1.0 / (2.0 * lam_minus) ** 2,
        xi_max=2.0 * params.g_z / params.omega_q,
        cross_kerr_shift=4.0 * g1**2 / delta_s - 2.0 * g2,
    )

"""Output-field statistics of the phonon resonator.

Everything here evaluates stationary correlation functions of a static
Liouvillian through the quantum regression theorem: propagating the
operator-conditioned state exp(L tau)(rho A) and tracing against a second
operator gives <A(0) B(tau)>.  With vacuum input the output field
c = sqrt(kappa) b inherits the intracavity correlations of b scaled by
kappa, so output rates, g2 and emission spectra all reduce to intracavity
quantities; this is verified against the damped-oscillator closed forms in
the tests.

Sign convention: a mode rotating at +omega_0 has <b'(0) b(tau)> =
n exp(-i omega_0 tau - kappa tau / 2), which puts the emission line of
S(omega) = kappa Re int_0^inf <b'(0)b(tau)> e^{i omega tau} dtau at
+omega_0.  Spectra are computed in whatever rotating frame the Liouvillian
is written in; ``frame_offset`` records the frame origin so absolute
frequencies can be reconstructed as frequencies + frame_offset.

The half-line Fourier integral is taken on a finite tau grid with an
exponential tail extrapolation beyond tau_max; plain truncation rings and
corrupts peak-symmetry measurements of bimodal spectra.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.constants as const
import scipy.signal
import scipy.sparse.linalg as spla

from .dynamics import CollapseSet, Superoperator, Trajectory, liouvillian, steady_state, thermal_pairs, vec
from .effective import dispersive_coefficients
from .exceptions import (
    InternalConsistencyError,
    InvalidArgumentError,
    UndefinedCorrelationError,
)
from .hamiltonians import QubitCosineDrive, SystemParams, build_reduced, mpa_constants
from .hilbert import Operator, QuantumState, embed, expect_matrix, ladder, mech_only

__all__ = [
    "SpectrumResult",
    "CorrelationResult",
    "OutputRate",
    "thermal_occupation",
    "two_time_correlation",
    "g2",
    "output_rate",
    "spectrum",
    "snr",
]

# peaks below this fraction of the spectral maximum are reported as noise
_PEAK_FLOOR = 0.05

# minimum kappa * tau_max before the spectral resolution warning
_RESOLUTION_SPAN = 5.0

# occupations below this leave g2 undefined
_OCCUPATION_FLOOR = 1e-12


def thermal_occupation(T: float, omega: float) -> float:
    """Bose occupation of a mode at angular frequency omega and temperature T."""
    if T < 0:
        raise InvalidArgumentError("temperature must be >= 0")
    if omega <= 0:
        raise InvalidArgumentError("mode frequency must be positive")
    if T == 0.0:
        return 0.0
    x = const.hbar * omega / (const.k * T)
    return 1.0 / math.expm1(x)


def _check_uniform(tau_grid: np.ndarray) -> np.ndarray:
    tau = np.asarray(tau_grid, dtype=float)
    if tau.ndim != 1 or tau.size < 2:
        raise InvalidArgumentError("tau grid must be 1-d with >= 2 points")
    if tau[0] != 0.0:
        raise InvalidArgumentError("tau grid must start at 0")
    steps = np.diff(tau)
    if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-8, atol=0.0):
        raise InvalidArgumentError("tau grid must be uniform and increasing")
    return tau


def two_time_correlation(
    L: Superoperator,
    rho_ss: QuantumState,
    A: Operator,
    B: Operator,
    tau_grid: np.ndarray,
) -> np.ndarray:
    """Stationary correlation <A(0) B(tau)> by quantum regression.

    Propagates vec(rho_ss A) under exp(L tau) on the (uniform) grid and
    traces against B at each delay.  The Liouvillian must be static and
    rho_ss its steady state; neither is re-verified here.
    """
    tau = _check_uniform(tau_grid)
    if L.space != rho_ss.space or A.space != rho_ss.space or B.space != rho_ss.space:
        raise InvalidArgumentError("L, state and operators must share one space")
    seed = vec(rho_ss.density_matrix() @ A.matrix.toarray())
    states = spla.expm_multiply(
        L.matrix, seed, start=tau[0], stop=tau[-1], num=tau.size, endpoint=True
    )
    # Tr[B M] = vec(B^T) . vec(M) in row-major layout
    probe = np.asarray(B.matrix.T.todense()).ravel()
    return states @ probe


@dataclass(frozen=True)
class CorrelationResult:
    """Normalized second-order coherence over a delay grid."""

    delays: np.ndarray
    g2: np.ndarray
    g2_zero: float

    def __post_init__(self):
        if len(self.delays) != len(self.g2):
            raise InvalidArgumentError("delay and g2 grids differ in length")
        if np.min(self.g2) < -1e-6:
            raise InvalidArgumentError(f"g2 has a negative value {np.min(self.g2):.3e}")


def g2(
    L: Superoperator, rho_ss: QuantumState, mode: Operator, tau_grid: np.ndarray
) -> CorrelationResult:
    """g2(tau) of the output field for vacuum input.

    Evaluates Tr[(b'b) exp(L tau)(b rho b')]/<b'b>^2; the sqrt(kappa) output
    scaling cancels in the normalization, so intracavity operators are used
    directly.
    """
    tau = _check_uniform(tau_grid)
    number = mode.dag() @ mode
    occupation = float(expect_matrix(number.matrix, rho_ss.density_matrix()).real)
    if occupation <= _OCCUPATION_FLOOR:
        raise UndefinedCorrelationError(
            f"steady occupation {occupation:.3e} leaves g2 undefined"
        )
    b_mat = mode.matrix.toarray()
    sandwiched = b_mat @ rho_ss.density_matrix() @ b_mat.conj().T
    states = spla.expm_multiply(
        L.matrix, vec(sandwiched), start=tau[0], stop=tau[-1], num=tau.size, endpoint=True
    )
    probe = np.asarray(number.matrix.T.todense()).ravel()
    series = np.real(states @ probe) / occupation**2
    series = np.where((series < 0) & (series > -1e-9), 0.0, series)
    return CorrelationResult(delays=tau, g2=series, g2_zero=float(series[0]))


class OutputRate(NamedTuple):
    """Output phonon flux and the thermal input floor, both in 1/s."""

    rate: float | np.ndarray
    thermal_floor: float


def output_rate(source, kappa: float, *, number=None, key: str = "n", n_th: float = 0.0) -> OutputRate:
    """Output flux kappa <b'b> with the thermal floor kappa n_th kept separate.

    ``source`` is either a steady :class:`QuantumState` (then ``number``
    must supply the phonon number operator) or a :class:`Trajectory` whose
    ``expectations[key]`` series holds <b'b>(t).  The thermal floor is
    reported separately so modulation-on minus modulation-off differencing
    can cancel the input contribution.
    """
    if kappa < 0:
        raise InvalidArgumentError("kappa must be >= 0")
    if isinstance(source, QuantumState):
        if number is None:
            raise InvalidArgumentError("steady-state input needs the number operator")
        mat = number.matrix if isinstance(number, Operator) else number
        occ = float(expect_matrix(mat, source.density_matrix()).real)
        return OutputRate(rate=kappa * occ, thermal_floor=kappa * n_th)
    if isinstance(source, Trajectory):
        if key not in source.expectations:
            raise InvalidArgumentError(f"trajectory has no expectation series {key!r}")
        series = np.real(source.expectations[key])
        return OutputRate(rate=kappa * series, thermal_floor=kappa * n_th)
    raise InvalidArgumentError(f"unsupported source type {type(source).__name__}")


@dataclass(frozen=True)
class SpectrumResult:
    """Emission spectral density over a frame-relative frequency grid.

    ``peak_locations`` holds (omega_peak, height) pairs sorted by height,
    tallest first; add ``frame_offset`` to any frame-relative frequency to
    recover the absolute (lab) value.
    """

    frequencies: np.ndarray
    density: np.ndarray
    peak_locations: tuple[tuple[float, float], ...]
    frame_offset: float

    def __post_init__(self):
        if len(self.frequencies) != len(self.density):
            raise InvalidArgumentError("frequency grid and density differ in length")
        heights = [h for _, h in self.peak_locations]
        if any(b > a for a, b in zip(heights, heights[1:])):
            raise InvalidArgumentError("peaks must be sorted tallest first")


def _tail_exponent(tau: np.ndarray, corr: np.ndarray) -> complex | None:
    """Dominant complex decay rate of the correlation tail, or None."""
    m = max(8, tau.size // 10)
    tail_t, tail_c = tau[-m:], corr[-m:]
    mag = np.abs(tail_c)
    if mag.min() <= 1e-14 * (np.abs(corr).max() + 1e-300):
        return None  # tail already at numerical zero; nothing to extrapolate
    y = np.log(mag) + 1j * np.unwrap(np.angle(tail_c))
    z = np.polyfit(tail_t, y, 1)[0]
    if z.real >= 0:
        return None  # not decaying; extrapolation would diverge
    return complex(z)


def spectrum(
    L: Superoperator,
    rho_ss: QuantumState,
    kappa: float,
    omega_grid: np.ndarray,
    *,
    mode: Operator,
    frame_offset: float = 0.0,
    tau_max: float | None = None,
    n_tau: int = 2048,
) -> SpectrumResult:
    """Output-field emission spectrum kappa Re int_0^inf <b'(0)b(tau)> e^{i w tau} dtau.

    The correlation is evaluated on a uniform grid up to ``tau_max``
    (default 12/kappa) and the remainder of the half-line integral is
    added analytically from a single-exponential fit of the tail.  The
    Lorentzian reference case fixes the normalization: a damped thermal
    mode integrates to pi * kappa * <b'b>.
    """
    if kappa <= 0:
        raise InvalidArgumentError("kappa must be positive")
    omega = np.asarray(omega_grid, dtype=float)
    if omega.ndim != 1 or omega.size < 8 or np.any(np.diff(omega) <= 0):
        raise InvalidArgumentError("omega grid must be 1-d, increasing, >= 8 points")
    span = 12.0 / kappa if tau_max is None else float(tau_max)
    if kappa * span < _RESOLUTION_SPAN:
        warnings.warn(
            f"kappa * tau_max = {kappa * span:.2f} < {_RESOLUTION_SPAN}; "
            "spectral peaks will be under-resolved",
            stacklevel=2,
        )
    tau = np.linspace(0.0, span, n_tau)
    corr = two_time_correlation(L, rho_ss, mode.dag(), mode, tau)

    phase = np.exp(1j * np.outer(omega, tau))
    density = np.trapezoid(phase * corr, tau, axis=1)
    z = _tail_exponent(tau, corr)
    if z is not None:
        density += -corr[-1] * np.exp(1j * omega * span) / (z + 1j * omega)
    density = kappa * np.real(density)

    idx, _ = scipy.signal.find_peaks(density, height=_PEAK_FLOOR * density.max())
    peaks = tuple(
        sorted(((float(omega[i]), float(density[i])) for i in idx), key=lambda p: -p[1])
    )
    return SpectrumResult(
        frequencies=omega,
        density=density,
        peak_locations=peaks,
        frame_offset=frame_offset,
    )


def _pump_liouvillian(params: SystemParams, drive: QubitCosineDrive, n_mech: int, modulation_on: bool):
    """Phonon-only pump model in the frame rotating at half the modulation frequency.

    The dressed phonon frequency omega_m - 2 chi sets the detuning; with
    the modulation at Omega the pump term is static in this frame.
    """
    space = mech_only(n_mech)
    b = embed(ladder(n_mech), 0, space)
    chi = dispersive_coefficients(params, 0.0).chi
    omega_drive = drive.resolved_frequency(params)
    detuning = (params.omega_m - 2.0 * chi) - 0.5 * omega_drive
    h = detuning * (b.dag() @ b)
    if modulation_on:
        pump = mpa_constants(params, drive.Omega_d, drive.phi)
        h = h + build_reduced(params, space, "mpa", alpha=pump.alpha)
    collapses = CollapseSet(tuple(thermal_pairs(b, params.kappa, params.n_th)))
    return liouvillian(h, collapses), b


def snr(params: SystemParams, drive: QubitCosineDrive, n_th: float, *, n_mech: int = 30) -> float:
    """Signal-to-noise ratio (P_out - P_out_th) / P_out_th of the pumped phonon flux.

    Two steady-state solves of the phonon pump model, modulation on and
    off, at bath occupation ``n_th``.  Returns +inf at n_th = 0 (zero noise
    floor) and 0 when the modulation amplitude vanishes.
    """
    if n_th < 0:
        raise InvalidArgumentError("n_th must be >= 0")
    if n_th > 0 and params.kappa <= 0:
        raise InternalConsistencyError("thermal floor requires kappa > 0")
    p = params.with_updates(n_th=n_th)
    occupations = {}
    for on in (True, False):
        L, b = _pump_liouvillian(p, drive, n_mech, on)
        rho = steady_state(L)
        occupations[on] = float(
            expect_matrix((b.dag() @ b).matrix, rho.density_matrix()).real
        )
    if n_th == 0.0:
        return math.inf if occupations[True] > 0 else 0.0
    floor = occupations[False]
    if abs(floor - n_th) > 1e-3 * max(n_th, 1.0):
        raise InternalConsistencyError(
            f"modulation-off occupation {floor:.6e} disagrees with bath n_th = {n_th:.6e}"
        )
    return (occupations[True] - floor) / floor

"""Scenario runners: each named experiment assembled from the core modules.

A runner takes a validated ScenarioConfig and returns a ResultTable whose
CSV section is a deterministic function of the configuration.  Sweep points
are independent, so scans fan out over a process pool when jobs > 1; result
order always follows the configured grid order.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from time import perf_counter

import numpy as np
from scipy.optimize import brentq, curve_fit

from .config import ScenarioConfig
from .dynamics import CollapseSet, evolve, liouvillian, steady_state, thermal_pairs
from .effective import (
    compare_models,
    dispersive_coefficients,
    dressed_mech_frequency,
    dressed_pair_resonance,
)
from .hamiltonians import (
    TWO_PI,
    QubitCosineDrive,
    SystemParams,
    build_full_hamiltonian,
    build_reduced,
    coupling_g,
    mpa_constants,
    shifted_mech_frequency,
    validity_bounds,
)
from .hilbert import (
    QuantumState,
    basis_ket,
    cavity_mech,
    embed,
    expect,
    ladder,
    mech_only,
    pauli,
    qubit_mech,
    tripartite,
)
from .mpa import analytic_gain, simulate_gain, steady_phonons
from .output import Column, ResultTable
from .spectra import _pump_liouvillian, g2, snr, spectrum, thermal_occupation

# phonon truncation used when diagonalizing for the pair-resonance retune;
# converged to < 1e-6 relative well below this
_TUNE_MECH_LEVELS = 20


@dataclass(frozen=True)
class RunOptions:
    """Execution knobs that are not part of the physics configuration.

    The tolerance defaults are sized for the time-dependent full-model run,
    which resolves the coupling oscillation explicitly; steady-state solves
    carry their own residual criteria.
    """

    jobs: int = 1
    rtol: float = 1e-6
    atol: float = 1e-9


def _map_jobs(fn, items, jobs: int):
    """Ordered map over sweep points, optionally across processes."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


def _pair_retuned(params: SystemParams) -> tuple[SystemParams, float]:
    """Set the effective resonator frequency onto the dressed pair resonance."""
    pair = dressed_pair_resonance(params, 0.0, tripartite(4, _TUNE_MECH_LEVELS))
    return params.with_updates(omega_c0=pair + params.omega_d), pair


def _hz(x: float) -> float:
    return x / TWO_PI


# ---------------------------------------------------------------- rabi


def _run_rabi(config: ScenarioConfig, options: RunOptions) -> ResultTable:
    p_run, pair = _pair_retuned(config.params)
    dims = config.truncations
    space = tripartite(dims["cavity"], dims["mech"])
    full = build_full_hamiltonian(p_run, space)
    reduced = build_reduced(
        p_run.with_updates(omega_m=0.5 * pair),
        cavity_mech(dims["cavity"], dims["mech"]),
        "quadratic",
    )
    t = np.linspace(0.0, config.grids["t_max"], config.grids["n_times"])
    out = compare_models(p_run, basis_ket(space, (1, 0, 2)), t, full, reduced)

    g1 = coupling_g(1, p_run)
    predicted = 2.0 * math.sqrt(2.0) * abs(g1)
    columns = [Column("time", "s", t)]
    for name in ("P_02_full", "P_10_full", "P_e_full", "P_02_reduced", "P_10_reduced"):
        columns.append(Column(name, "1", out.observables[name]))
    total = out.observables["P_02_full"] + out.observables["P_10_full"]
    meta = {
        "derived": {
            "pair_resonance_hz": _hz(pair),
            "omega_c0_retuned_hz": _hz(p_run.omega_c0),
            "G1_hz": _hz(g1),
            "rabi_frequency_predicted_hz": _hz(predicted),
            "oscillation_frequency_full_hz": _hz(out.oscillation_frequency_full),
            "oscillation_frequency_reduced_hz": _hz(out.oscillation_frequency_reduced),
            "max_deviation": out.max_deviation,
            "max_P_e": float(out.observables["P_e_full"].max()),
            "min_conversion_population": float(total.min()),
        }
    }
    return ResultTable("rabi", tuple(columns), meta)


# ---------------------------------------------------------------- freq_shift


def _run_freq_shift(config: ScenarioConfig, options: RunOptions) -> ResultTable:
    p = config.params
    space = qubit_mech(config.truncations["mech"])
    xi = np.linspace(config.grids["xi_min"], config.grids["xi_max"], config.grids["n_xi"])
    base = dressed_mech_frequency(p, 0.0, space)
    numeric = np.array([dressed_mech_frequency(p, x, space) - base for x in xi])
    analytic = np.array([shifted_mech_frequency(p, x) - p.omega_m for x in xi])
    deviation = np.abs(numeric - analytic)
    meta = {
        "derived": {
            "dressed_gap_at_zero_hz": _hz(base),
            "G1_hz": _hz(coupling_g(1, p)),
            "chi_hz": _hz(dispersive_coefficients(p, 0.0).chi),
        },
        "plot": {"kind": "lines"},
    }
    return ResultTable(
        "freq_shift",
        (
            Column("xi", "1", xi),
            Column("shift_analytic", "Hz", analytic / TWO_PI),
            Column("shift_numeric", "Hz", numeric / TWO_PI),
            Column("abs_deviation", "Hz", deviation / TWO_PI),
        ),
        meta,
    )


# ---------------------------------------------------------------- mpa_gain


def _mpa_sim_point(args):
    params, omega_d, phi, input_amplitude, n_mech = args
    res = simulate_gain(params, omega_d, phi, input_amplitude, mech_only(n_mech))
    return abs(res.gain_X), res.steady_N, res.converged


def _run_mpa_gain(config: ScenarioConfig, options: RunOptions) -> ResultTable:
    p = config.params
    drive = config.drive
    pump = mpa_constants(p, drive.Omega_d, 0.0)
    a_mag = abs(pump.alpha)
    n_phi = config.grids["n_phi"]
    # half-open grid covering (-pi, pi]; even n_phi puts -pi/2 on a node
    phis = -math.pi + 2.0 * math.pi * np.arange(1, n_phi + 1) / n_phi

    signed = np.array([analytic_gain(phi, a_mag, p.kappa) for phi in phis])
    columns = [
        Column("phi", "rad", phis),
        Column("gain_analytic", "1", signed),
        Column("gain_analytic_abs", "1", np.abs(signed)),
    ]
    meta_extra = {}
    if config.grids["simulate"]:
        work = [
            (p, drive.Omega_d, float(phi), config.grids["input_amplitude"],
             config.truncations["mech"])
            for phi in phis
        ]
        sim = _map_jobs(_mpa_sim_point, work, options.jobs)
        columns.append(Column("gain_simulated_abs", "1", np.array([s[0] for s in sim])))
        columns.append(Column("steady_N_simulated", "1", np.array([s[1] for s in sim])))
        meta_extra["all_converged"] = all(s[2] for s in sim)
        worst = int(np.argmax(np.abs(np.array([s[0] for s in sim]) - np.abs(signed))))
        meta_extra["max_abs_gain_mismatch"] = float(abs(sim[worst][0] - abs(signed[worst])))

    k_ext = int(np.argmax(np.abs(signed)))
    meta = {
        "derived": {
            "alpha_hz": _hz(a_mag),
            "kerr_hz": _hz(pump.kerr),
            "steady_phonons_predicted": steady_phonons(a_mag, p.kappa),
            "below_threshold": bool(4.0 * a_mag < p.kappa),
            "extremum_phi_rad": float(phis[k_ext]),
            "extremum_gain_abs": float(abs(signed[k_ext])),
            **meta_extra,
        },
        "plot": {"kind": "lines"},
    }
    return ResultTable("mpa_gain", tuple(columns), meta)


# ---------------------------------------------------------------- dce helpers


def _dce_reduced_liouvillian(params, pair, eps_hz, delta_d_hz, n_cavity, n_mech):
    """Driven pair-conversion model in the frame of the resonant cavity drive.

    The cavity drive tracks the cavity (Delta_d detunes both from the pair
    resonance), so the drive term is static and energy conservation pins
    emitted pairs to omega' + omega'' = omega_c.
    """
    space = cavity_mech(n_cavity, n_mech)
    a = embed(ladder(n_cavity), 0, space)
    b = embed(ladder(n_mech), 1, space)
    p_r = params.with_updates(
        omega_m=0.5 * pair,
        omega_c0=pair + TWO_PI * delta_d_hz + params.omega_d,
    )
    h = build_reduced(p_r, space, "quadratic") + TWO_PI * eps_hz * (a + a.dag())
    collapses = [(a, params.gamma)] + thermal_pairs(b, params.kappa, params.n_th)
    return liouvillian(h, CollapseSet(tuple(collapses))), a, b, p_r.omega_c


def _dce_rate_point(args):
    params, pair, eps_hz, n_cavity, n_mech = args
    L, a, b, _ = _dce_reduced_liouvillian(params, pair, eps_hz, 0.0, n_cavity, n_mech)
    rho = steady_state(L, check_unique=False)
    n_cav = float(expect(a.dag() @ a, rho).real)
    n_mech_val = float(expect(b.dag() @ b, rho).real)
    return n_cav, n_mech_val


def _saturating_level(t, series):
    """Asymptote of a saturating tail; mean of the last quarter as fallback.

    The fit only sees the second half of the series, where the warm-started
    runs are past their undershoot and the residual relaxes monotonically.
    A fit that extrapolates outside the observed range (early transients can
    defeat the single-pole form) is rejected rather than trusted.
    """
    k = len(t) // 2
    ts, ys = t[k:] - t[k], np.asarray(series[k:], dtype=float)
    lo, hi = float(ys.min()), float(ys.max())
    span = max(hi - lo, 1e-12)
    guess = (ys[-1], max(ys[-1] - ys[0], 1e-12), 2.0 / (ts[-1] + 1e-30))
    try:
        popt, _ = curve_fit(
            lambda tt, c, amp, rate: c - amp * np.exp(-rate * tt),
            ts, ys, p0=guess, maxfev=20000,
        )
        level, rate = float(popt[0]), float(popt[2])
        if math.isfinite(level) and rate > 0 and lo - span <= level <= hi + span:
            return level, "exponential tail fit"
    except RuntimeError:
        pass
    tail = ys[int(0.75 * len(ys)):]
    return float(tail.mean()), "tail mean"


def _full_dce_run(params, pair, eps_hz, dims, t_max, n_times, rtol, atol):
    """Time-dependent tripartite master equation for the driven conversion.

    Frame: cavity rotated at its own (retuned) frequency, phonons at half of
    it, so the resonant drive is static and the only explicit time dependence
    is the two coupling terms at omega_c and omega_c/2.  Dissipators are
    invariant under both rotations.

    Starts from the reduced-model steady state with the qubit in its ground
    state, so the integration only has to settle the full-vs-reduced residual
    instead of the whole two-pole filling transient.
    """
    p = params.with_updates(omega_c0=pair + params.omega_d)
    space = tripartite(dims[1], dims[2])
    sz = embed(pauli("z"), 0, space)
    sx = embed(pauli("x"), 0, space)
    sm = embed(pauli("minus"), 0, space)
    a = embed(ladder(dims[1]), 1, space)
    b = embed(ladder(dims[2]), 2, space)
    w = p.omega_c

    h_static = (
        0.5 * p.omega_q * sz
        + (p.omega_m - 0.5 * w) * (b.dag() @ b)
        + TWO_PI * eps_hz * (a + a.dag())
    )
    # each coupling splits into rotating and counter-rotating halves with
    # complex-exponential coefficients; pairs of terms stay Hermitian jointly
    drives = [
        (p.g_z * (sz @ a), lambda t, w=w: cmath.exp(-1j * w * t)),
        (p.g_z * (sz @ a.dag()), lambda t, w=w: cmath.exp(1j * w * t)),
        (p.g_x * (sx @ b), lambda t, w=w: cmath.exp(-0.5j * w * t)),
        (p.g_x * (sx @ b.dag()), lambda t, w=w: cmath.exp(0.5j * w * t)),
    ]
    collapses = [(sm, p.Gamma), (a, p.gamma)] + thermal_pairs(b, p.kappa, p.n_th)
    t = np.linspace(0.0, t_max, n_times)

    red_L, _, _, _ = _dce_reduced_liouvillian(params, pair, eps_hz, 0.0, dims[1], dims[2])
    rho_red = steady_state(red_L, check_unique=False).density_matrix()
    ground = np.diag([0.0, 1.0])
    rho0 = QuantumState(space, np.kron(ground, rho_red), "density")

    traj = evolve(
        rho0,
        h_static,
        t,
        collapses=CollapseSet(tuple(collapses)),
        drives=drives,
        e_ops={"n_cav": a.dag() @ a, "n_mech": b.dag() @ b},
        rtol=rtol,
        atol=atol,
    )
    n_mech_series = np.real(traj.expectations["n_mech"])
    n_cav_series = np.real(traj.expectations["n_cav"])
    level, method = _saturating_level(t, n_mech_series)
    return {
        "dims": list(dims),
        "epsilon_hz": eps_hz,
        "n_mech_steady": level,
        "n_mech_final": float(n_mech_series[-1]),
        "n_cav_final": float(n_cav_series[-1]),
        "P_out": params.kappa * level,
        "estimate": method,
        "t_max": t_max,
        "rtol": rtol,
        "flagged": traj.flagged,
        "n_steps": traj.n_steps,
    }


# ---------------------------------------------------------------- dce_rate


def _run_dce_rate(config: ScenarioConfig, options: RunOptions) -> ResultTable:
    p, grids = config.params, config.grids
    p_run, pair = _pair_retuned(p)
    eps_list = [float(e) for e in grids["epsilon"]]
    work = [
        (p, pair, e, config.truncations["cavity"], config.truncations["mech"])
        for e in eps_list
    ]
    points = _map_jobs(_dce_rate_point, work, options.jobs)
    n_cav = np.array([pt[0] for pt in points])
    n_mech = np.array([pt[1] for pt in points])
    p_out = p.kappa * n_mech

    meta = {
        "derived": {
            "pair_resonance_hz": _hz(pair),
            "omega_c0_retuned_hz": _hz(p_run.omega_c0),
            "G1_hz": _hz(coupling_g(1, p)),
        },
        "plot": {"kind": "lines", "logy": True},
    }
    if grids["full_point"]:
        # the reduced point at the same drive, for a like-for-like ratio
        e_full = grids["full_epsilon"]
        ref_cav, ref_mech = _dce_rate_point(
            (p, pair, e_full, config.truncations["cavity"], config.truncations["mech"])
        )
        full = _full_dce_run(
            p, pair, e_full, grids["full_dims"], grids["full_t_max"],
            grids["full_n_times"], options.rtol, options.atol,
        )
        full["reduced_P_out_same_epsilon"] = p.kappa * ref_mech
        full["reduced_n_mech_same_epsilon"] = ref_mech
        meta["full_model"] = full

    return ResultTable(
        "dce_rate",
        (
            Column("epsilon", "Hz", np.array(eps_list)),
            Column("n_cav", "1", n_cav),
            Column("n_mech", "1", n_mech),
            Column("P_out", "1/s", p_out),
        ),
        meta,
    )


# ---------------------------------------------------------------- dce_g2


def _dce_g2_curve(args):
    params, pair, eps_hz, n_cavity, n_mech, tau = args
    L, _, b, _ = _dce_reduced_liouvillian(params, pair, eps_hz, 0.0, n_cavity, n_mech)
    rho = steady_state(L, check_unique=False)
    return g2(L, rho, b, tau)


def _run_dce_g2(config: ScenarioConfig, options: RunOptions) -> ResultTable:
    p, grids = config.params, config.grids
    _, pair = _pair_retuned(p)
    eps_list = [float(e) for e in grids["epsilon"]]
    tau = np.linspace(0.0, grids["tau_max_kappa"] / p.kappa, grids["n_tau"])
    work = [
        (p, pair, e, config.truncations["cavity"], config.truncations["mech"], tau)
        for e in eps_list
    ]
    curves = _map_jobs(_dce_g2_curve, work, options.jobs)

    eps_col, tau_col, ktau_col, g2_col = [], [], [], []
    zeros, ratios = {}, {}
    k2 = int(np.searchsorted(tau, 2.0 / p.kappa))
    for e, res in zip(eps_list, curves):
        eps_col.extend([e] * len(tau))
        tau_col.extend(tau.tolist())
        ktau_col.extend((p.kappa * tau).tolist())
        g2_col.extend(res.g2.tolist())
        zeros[f"{e:g}"] = res.g2_zero
        ratios[f"{e:g}"] = float(res.g2_zero / res.g2[k2])

    meta = {
        "derived": {
            "pair_resonance_hz": _hz(pair),
            "g2_zero_by_epsilon_hz": zeros,
            "bunching_ratio_at_kappa_tau_2": ratios,
        },
        "plot": {"kind": "grouped", "x": "kappa_tau", "y": "g2", "group": "epsilon",
                 "logy": True},
    }
    return ResultTable(
        "dce_g2",
        (
            Column("epsilon", "Hz", eps_col),
            Column("tau", "s", tau_col),
            Column("kappa_tau", "1", ktau_col),
            Column("g2", "1", g2_col),
        ),
        meta,
    )


# ---------------------------------------------------------------- dce_spectrum


def _dce_spectrum_point(args):
    params, pair, eps_hz, delta_hz, n_cavity, n_mech, w_inframe = args
    L, _, b, omega_c = _dce_reduced_liouvillian(
        params, pair, eps_hz, delta_hz, n_cavity, n_mech
    )
    rho = steady_state(L, check_unique=False)
    res = spectrum(L, rho, params.kappa, w_inframe, mode=b, frame_offset=0.5 * omega_c)
    return res, omega_c


def _modulation_spectrum_point(args):
    params, drive_amp, omega_mod, n_mech, w_inframe = args
    drive = QubitCosineDrive(Omega_d=drive_amp, omega_mod=omega_mod)
    L, b = _pump_liouvillian(params, drive, n_mech, modulation_on=True)
    rho = steady_state(L, check_unique=False)
    res = spectrum(
        L, rho, params.kappa, w_inframe, mode=b, frame_offset=0.5 * omega_mod
    )
    return res


def _run_dce_spectrum(config: ScenarioConfig, options: RunOptions) -> ResultTable:
    p, grids = config.params, config.grids
    span = TWO_PI * grids["span"]
    w = np.linspace(-span, span, grids["n_omega"])

    if grids["sweep"] == "detuning":
        _, pair = _pair_retuned(p)
        detunings = [float(d) for d in grids["detunings"]]
        work = [
            (p, pair, grids["epsilon"], d, config.truncations["cavity"],
             config.truncations["mech"], w)
            for d in detunings
        ]
        points = _map_jobs(_dce_spectrum_point, work, options.jobs)

        key_col, off_col, abs_col, den_col = [], [], [], []
        peaks = {}
        for d, (res, omega_c) in zip(detunings, points):
            key_col.extend([d] * len(w))
            off_col.extend((w / TWO_PI).tolist())
            abs_col.extend(((res.frame_offset + w) / TWO_PI).tolist())
            den_col.extend(res.density.tolist())
            peaks[f"{d:g}"] = {
                "omega_c_hz": _hz(omega_c),
                "top_peaks_offset_hz": [
                    [_hz(loc), height] for loc, height in res.peak_locations[:2]
                ],
            }
        meta = {
            "derived": {
                "pair_resonance_hz": _hz(pair),
                "epsilon_hz": grids["epsilon"],
                "peaks_by_detuning_hz": peaks,
                "grid_spacing_hz": _hz(w[1] - w[0]),
            },
            "plot": {"kind": "grouped", "x": "nu_offset", "y": "density",
                     "group": "delta_d"},
        }
        key_column = Column("delta_d", "Hz", key_col)
    else:
        omegas = np.linspace(grids["Omega_min"], grids["Omega_max"], grids["n_Omega"])
        work = [
            (p, TWO_PI * grids["Omega_d"], TWO_PI * float(om),
             config.truncations["mech"], w)
            for om in omegas
        ]
        points = _map_jobs(_modulation_spectrum_point, work, options.jobs)

        key_col, off_col, abs_col, den_col = [], [], [], []
        ridge = []
        for om, res in zip(omegas, points):
            key_col.extend([float(om)] * len(w))
            off_col.extend((w / TWO_PI).tolist())
            abs_col.extend(((res.frame_offset + w) / TWO_PI).tolist())
            den_col.extend(res.density.tolist())
            if res.peak_locations:
                loc, height = res.peak_locations[0]
                ridge.append([float(om), _hz(res.frame_offset + loc), height])
        dressed = p.omega_m - 2.0 * dispersive_coefficients(p, 0.0).chi
        meta = {
            "derived": {
                "dressed_mech_frequency_hz": _hz(dressed),
                "parametric_resonance_hz": _hz(2.0 * dressed),
                "ridge_Omega_nu_height": ridge,
                "grid_spacing_hz": _hz(w[1] - w[0]),
            },
            "plot": {"kind": "grouped", "x": "nu_offset", "y": "density",
                     "group": "Omega"},
        }
        key_column = Column("Omega", "Hz", key_col)

    return ResultTable(
        "dce_spectrum",
        (
            key_column,
            Column("nu_offset", "Hz", off_col),
            Column("nu_abs", "Hz", abs_col),
            Column("density", "1", den_col),
        ),
        meta,
    )


# ---------------------------------------------------------------- snr_scan


def _snr_levels(n_mech: int, n_th: float) -> int:
    # thermal tail sizing: keep the truncated occupation deficit below the
    # 1e-3 relative floor check inside snr()
    return max(n_mech, int(math.ceil(10.0 + 12.0 * n_th)))


def _snr_point(args):
    params, drive, n_th, n_mech = args
    return snr(params, drive, n_th, n_mech=_snr_levels(n_mech, n_th))


def _run_snr_scan(config: ScenarioConfig, options: RunOptions) -> ResultTable:
    p, grids = config.params, config.grids
    drive = config.drive
    n_mech = config.truncations["mech"]
    n_grid = np.geomspace(grids["n_th_min"], grids["n_th_max"], grids["n_points"])
    values = np.array(
        _map_jobs(_snr_point, [(p, drive, float(n), n_mech) for n in n_grid], options.jobs)
    )

    crossing = None
    bracket = np.nonzero((values[:-1] > 1.0) & (values[1:] <= 1.0))[0]
    if bracket.size:
        lo, hi = n_grid[bracket[0]], n_grid[bracket[0] + 1]
        if grids["refine"]:
            crossing = float(
                brentq(
                    lambda n: snr(p, drive, n, n_mech=_snr_levels(n_mech, n)) - 1.0,
                    lo, hi, xtol=1e-12, rtol=1e-9,
                )
            )
        else:
            # log-linear interpolation on the bracketing pair
            f_lo, f_hi = np.log(values[bracket[0]]), np.log(values[bracket[0] + 1])
            x = f_lo / (f_lo - f_hi)
            crossing = float(np.exp(np.log(lo) + x * (np.log(hi) - np.log(lo))))

    pump = mpa_constants(p, drive.Omega_d, drive.phi)
    chi = dispersive_coefficients(p, 0.0).chi
    delta = (p.omega_m - 2.0 * chi) - 0.5 * drive.resolved_frequency(p)
    d2 = p.kappa**2 + 4.0 * delta**2
    n0 = 8.0 * abs(pump.alpha) ** 2 / (d2 - 16.0 * abs(pump.alpha) ** 2)
    reference = thermal_occupation(27e-3, p.omega_m)
    meta = {
        "derived": {
            "alpha_hz": _hz(abs(pump.alpha)),
            "pump_detuning_hz": _hz(delta),
            "signal_occupation_N0": n0,
            "snr_crossing_n_th": crossing,
            "thermal_occupation_27mK": reference,
            "crossing_note": (
                "SNR = 1 at n_th = "
                + (f"{crossing:.4g}" if crossing is not None else "outside the scan")
                + f"; Bose occupation at 27 mK and the phonon frequency is {reference:.3f}."
                " The temperature-axis mapping between the two is not fixed by the"
                " operating point, so this is a consistency note, not a tolerance."
            ),
        },
        "plot": {"kind": "lines", "logx": True, "logy": True},
    }
    return ResultTable(
        "snr_scan",
        (Column("n_th", "1", n_grid), Column("snr", "1", values)),
        meta,
    )


# ---------------------------------------------------------------- params_report


def _run_params_report(config: ScenarioConfig, options: RunOptions) -> ResultTable:
    p, grids = config.params, config.grids
    drive = config.drive
    xi = grids["xi"]
    space = qubit_mech(config.truncations["mech"])

    pair = dressed_pair_resonance(p, xi, space)
    gap = dressed_mech_frequency(p, xi, space)
    disp = dispersive_coefficients(p, xi)
    pump = mpa_constants(p, drive.Omega_d, drive.phi)
    delta_s = (
        p.omega_c - pair if grids["delta_s"] is None else TWO_PI * grids["delta_s"]
    )
    bounds = validity_bounds(p, drive.Omega_d, delta_s)

    rows = [
        ("G_0", _hz(coupling_g(0, p)), "Hz"),
        ("G_1", _hz(coupling_g(1, p)), "Hz"),
        ("G_2", _hz(coupling_g(2, p)), "Hz"),
        ("G_3", _hz(coupling_g(3, p)), "Hz"),
        ("chi", _hz(disp.chi), "Hz"),
        ("lambda_plus", disp.lambda_plus, "1"),
        ("lambda_minus", disp.lambda_minus, "1"),
        ("dressed_gap", _hz(gap), "Hz"),
        ("pair_resonance", _hz(pair), "Hz"),
        ("pair_mismatch", _hz(p.omega_c - pair), "Hz"),
        ("pump_alpha", _hz(abs(pump.alpha)), "Hz"),
        ("pump_kerr", _hz(pump.kerr), "Hz"),
        ("N_c_drive", bounds.n_critical_drive, "1"),
        ("N_c_dispersive", bounds.n_critical_dispersive, "1"),
        ("N_c", bounds.n_critical, "1"),
        ("G_c", bounds.gain_critical, "1"),
        ("G_c_db", bounds.gain_critical_db, "dB"),
        ("n_dispersive_max", bounds.n_dispersive_max, "1"),
        ("xi_max", bounds.xi_max, "1"),
        ("cross_kerr_shift", _hz(bounds.cross_kerr_shift), "Hz"),
        ("n_th_27mK", thermal_occupation(27e-3, p.omega_m), "1"),
    ]
    meta = {
        "derived": {"xi": xi, "delta_s_hz": _hz(delta_s), "Omega_d_hz": _hz(drive.Omega_d)},
        "plot": {"kind": "text"},
    }
    return ResultTable(
        "params_report",
        (
            Column("quantity", "name", [r[0] for r in rows]),
            Column("value", "per-row", [r[1] for r in rows]),
            Column("unit", "text", [r[2] for r in rows]),
        ),
        meta,
    )


_RUNNERS = {
    "rabi": _run_rabi,
    "freq_shift": _run_freq_shift,
    "mpa_gain": _run_mpa_gain,
    "dce_rate": _run_dce_rate,
    "dce_g2": _run_dce_g2,
    "dce_spectrum": _run_dce_spectrum,
    "snr_scan": _run_snr_scan,
    "params_report": _run_params_report,
}


def run_scenario(config: ScenarioConfig, options: RunOptions | None = None) -> ResultTable:
    """Execute the configured scenario and attach run-level metadata."""
    options = options or RunOptions()
    start = perf_counter()
    table = _RUNNERS[config.scenario](config, options)
    table.metadata["config"] = config.resolved
    table.metadata["solver"] = {
        "rtol": options.rtol,
        "atol": options.atol,
        "jobs": options.jobs,
    }
    table.metadata["wall_time_s"] = perf_counter() - start
    return table

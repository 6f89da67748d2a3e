"""Acceptance checks for the whole toolkit, one test per criterion.

Each test drives the public scenario pipeline (or the relevant function) at
its reference operating point, prints a single PASS/FAIL line with the
measured numbers, and asserts the stated tolerance.  Run with ``-s`` to see
the lines as they complete; a few of these integrate full master equations
and take minutes.
"""

import json
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from uom_sim.config import parse_config
from uom_sim.hamiltonians import TWO_PI, SystemParams, coupling_g, validity_bounds
from uom_sim.mpa import analytic_gain
from uom_sim.scenarios import RunOptions, run_scenario
from uom_sim.spectra import thermal_occupation

REFERENCE_HZ = dict(
    omega_q=3e9, omega_m=250e6, omega_c0=500e6, g_x=60e6, g_z0=40e6,
    omega_d=0.0, Gamma=0.05e6, gamma=0.1e6, kappa=0.2e6, n_th=0.0,
)

DCE_PARAMS = {
    "omega_q": 3e9, "omega_m": 250e6, "omega_c0": 5500e6, "g_x": 60e6,
    "g_z0": 40e6, "omega_d": 5000e6, "Gamma": 0.05e6, "gamma": 0.1e6,
    "kappa": 0.2e6, "n_th": 0.0,
}


def _report(number, label, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"\n[{status}] criterion {number} ({label}): {detail}", flush=True)
    assert ok, f"criterion {number} {label}: {detail}"


def _run(scenario, /, timed=False, jobs=1, **sections):
    config = parse_config({"scenario": scenario, **sections})
    t0 = time.monotonic()
    table = run_scenario(config, RunOptions(jobs=jobs))
    elapsed = time.monotonic() - t0
    return (table, elapsed) if timed else table


def test_criterion_01_static_pair_coupling():
    params = SystemParams.from_hz(**REFERENCE_HZ)
    g1_hz = coupling_g(1, params) / TWO_PI
    rel = abs(g1_hz - (-32e3)) / 32e3
    _report(1, "pair coupling", rel < 0.01,
            f"G_1/2pi = {g1_hz:.6g} Hz vs -32 kHz, rel dev {rel:.2e}")


def test_criterion_02_full_model_conversion():
    table, elapsed = _run("rabi", timed=True)
    d = table.metadata["derived"]
    predicted = d["rabi_frequency_predicted_hz"]
    measured = d["oscillation_frequency_full_hz"]
    rel = abs(measured - predicted) / predicted
    leak = 1.0 - d["min_conversion_population"]
    ok = rel < 0.05 and d["max_P_e"] < 0.05 and leak < 0.05 and elapsed < 120.0
    _report(2, "photon-phonon-pair conversion", ok,
            f"oscillation {measured:.1f} Hz vs 2*sqrt(2)|G_1| = {predicted:.1f} Hz "
            f"(rel {rel:.3f}), max P_e {d['max_P_e']:.4f}, leakage {leak:.4f}, "
            f"{elapsed:.0f} s")


def test_criterion_03_dressed_frequency_shift():
    table, elapsed = _run("freq_shift", timed=True)
    xi = np.asarray(table.column("xi").values, dtype=float)
    analytic = np.asarray(table.column("shift_analytic").values, dtype=float)
    numeric = np.asarray(table.column("shift_numeric").values, dtype=float)
    deviation = np.asarray(table.column("abs_deviation").values, dtype=float)
    # both curves measure the shift from the zero-field point, which is 0/0
    inner = (np.abs(xi) <= 0.5) & (analytic != 0.0)
    rel = np.abs(numeric[inner] - analytic[inner]) / np.abs(analytic[inner])
    inner_ok = bool(np.all(rel < 0.05))

    # beyond |xi| = 1 the closed form loses validity monotonically
    right = deviation[xi > 1.0]
    left = deviation[xi < -1.0][::-1]  # toward more negative xi
    mono_ok = bool(np.all(np.diff(right) > 0)) and bool(np.all(np.diff(left) > 0))

    ok = inner_ok and mono_ok and elapsed < 60.0
    _report(3, "field-dependent frequency shift", ok,
            f"max rel dev {rel.max():.4f} for |xi| <= 0.5, "
            f"monotone growth beyond |xi| > 1: {mono_ok}, {elapsed:.0f} s")


def test_criterion_04_parametric_gain():
    alpha = TWO_PI * 0.045e6
    kappa = TWO_PI * 0.2e6
    g_exact = analytic_gain(-math.pi / 2.0, alpha, kappa)
    exact_ok = abs(g_exact) == pytest.approx(19.0, rel=1e-12)

    table, elapsed = _run("mpa_gain", timed=True)
    phis = np.asarray(table.column("phi").values, dtype=float)
    sim = np.asarray(table.column("gain_simulated_abs").values, dtype=float)
    k = int(np.argmin(np.abs(phis - (-math.pi / 2.0))))
    assert phis[k] == pytest.approx(-math.pi / 2.0, abs=1e-12)
    sim_rel = abs(sim[k] - 19.0) / 19.0

    ext = table.metadata["derived"]["extremum_phi_rad"]
    ok = (exact_ok and sim_rel < 0.20 and abs(ext - (-math.pi / 2.0)) < 0.05
          and elapsed < 600.0)
    _report(4, "parametric gain", ok,
            f"|G| analytic {abs(g_exact):.12g} (exact 19), simulated {sim[k]:.2f} "
            f"(rel {sim_rel:.3f}), extremum at {ext:.4f} rad, {elapsed:.0f} s")
    # dB figures for |G| = 19 depend on convention (10 vs 20 log10); both
    # are printed as a note, neither is a pass/fail condition
    print(f"      note: |G| = 19 is {10 * math.log10(19):.1f} dB (power) or "
          f"{20 * math.log10(19):.1f} dB (amplitude)")


def test_criterion_05_validity_bounds():
    params = SystemParams.from_hz(**REFERENCE_HZ)
    # delta_s only enters the cross-Kerr entry, not the gain ceiling
    bounds = validity_bounds(params, TWO_PI * 100e6, TWO_PI * 4.84e6)
    expected = 10.0 * math.log10(8.0 * bounds.n_critical_drive + 4.0)
    ok = (abs(bounds.gain_critical_db - 28.3) < 1.0
          and bounds.gain_critical_db == pytest.approx(expected, rel=1e-12))
    _report(5, "gain validity ceiling", ok,
            f"G_c = {bounds.gain_critical_db:.3f} dB vs 28.3 +- 1 dB")


def test_criterion_06_full_model_pair_emission_rate():
    table, elapsed = _run(
        "dce_rate",
        params=DCE_PARAMS,
        grids={"epsilon": [0.05e6], "full_point": True},
        timed=True,
    )
    full = table.metadata["full_model"]
    p_out = full["P_out"]
    ratio = p_out / 1e5
    ok = 0.5 <= ratio <= 2.0 and elapsed < 900.0
    _report(6, "pair emission rate, full model", ok,
            f"P_out = {p_out:.3g} 1/s vs 1e5 1/s (ratio {ratio:.2f}), "
            f"dims {tuple(full['dims'])}, estimate: {full['estimate']}, "
            f"{elapsed:.0f} s")
    print(f"      reduced model at same drive: "
          f"P_out = {full['reduced_P_out_same_epsilon']:.3g} 1/s")


def test_criterion_07_pair_statistics():
    table, elapsed = _run("dce_g2", timed=True)
    zeros = table.metadata["derived"]["g2_zero_by_epsilon_hz"]
    eps_sorted = sorted(zeros, key=float)
    g2_values = [zeros[e] for e in eps_sorted]

    smallest_ok = g2_values[0] > 10.0
    decreasing_ok = all(a > b for a, b in zip(g2_values, g2_values[1:]))

    # bunching must persist: g2(0)/g2(tau) > 2 everywhere past kappa*tau = 2
    eps_col = np.asarray(table.column("epsilon").values, dtype=float)
    ktau = np.asarray(table.column("kappa_tau").values, dtype=float)
    g2_col = np.asarray(table.column("g2").values, dtype=float)
    ratio_ok = True
    for e in np.unique(eps_col):
        sel = (eps_col == e) & (ktau >= 2.0)
        ratio_ok &= bool(np.all(zeros[f"{e:g}"] / g2_col[sel] > 2.0))

    ok = smallest_ok and decreasing_ok and ratio_ok and elapsed < 900.0
    _report(7, "pair super-bunching", ok,
            f"g2(0) = {[round(v, 2) for v in g2_values]} over drives "
            f"{eps_sorted} Hz, ratios past kappa*tau = 2 all > 2: {ratio_ok}, "
            f"{elapsed:.0f} s")


def test_criterion_08_pair_spectra():
    table, elapsed = _run("dce_spectrum", timed=True)
    derived = table.metadata["derived"]
    spacing = derived["grid_spacing_hz"]
    peaks = derived["peaks_by_detuning_hz"]

    zero_peaks = peaks["0"]["top_peaks_offset_hz"]
    zero_ok = len(zero_peaks) >= 1 and abs(zero_peaks[0][0]) <= spacing

    split_ok = True
    details = []
    for key, entry in peaks.items():
        if float(key) == 0.0:
            continue
        locs = [p[0] for p in entry["top_peaks_offset_hz"]]
        two = len(locs) == 2 and np.sign(locs[0]) != np.sign(locs[1])
        # emitted pair frequencies must add up to the cavity frequency
        sum_ok = abs(locs[0] + locs[1]) <= 2.0 * spacing
        split_ok &= two and sum_ok
        details.append(f"{key}: offsets {locs[0]:.3g}/{locs[1]:.3g} Hz")

    ok = zero_ok and split_ok and elapsed < 900.0
    _report(8, "pair emission spectra", ok,
            f"resonant peak offset {zero_peaks[0][0]:.3g} Hz (grid {spacing:.3g} Hz); "
            + "; ".join(details) + f"; {elapsed:.0f} s")


def test_criterion_09_thermal_visibility():
    table, elapsed = _run("snr_scan", timed=True)
    values = np.asarray(table.column("snr").values, dtype=float)
    decreasing = bool(np.all(np.diff(values) < 0))
    crossings = int(np.sum((values[:-1] > 1.0) & (values[1:] <= 1.0)))
    crossing = table.metadata["derived"]["snr_crossing_n_th"]
    ok = decreasing and crossings == 1 and crossing is not None and elapsed < 1800.0
    _report(9, "signal visibility vs thermal noise", ok,
            f"snr strictly decreasing: {decreasing}, unique crossing at "
            f"n_th = {crossing:.4g}, {elapsed:.0f} s")
    n27 = thermal_occupation(27e-3, TWO_PI * 250e6)
    print(f"      note: crossing {crossing:.4g} vs thermal occupation "
          f"{n27:.3f} at 27 mK and 250 MHz; with the pump at twice the bare "
          f"mechanical frequency the pair line is detuned by 2*chi, which "
          f"collapses the signal floor well below the fridge-scale occupation")


def test_criterion_10_property_suites_complete_quickly():
    suites = [
        "test_hilbert.py", "test_hamiltonians.py", "test_effective.py",
        "test_dynamics.py", "test_mpa.py", "test_spectra.py",
    ]
    here = os.path.dirname(__file__)
    t0 = time.monotonic()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "--no-header", "-p", "no:cacheprovider"]
        + [os.path.join(here, s) for s in suites],
        capture_output=True, text=True,
        cwd=os.path.dirname(here),
    )
    elapsed = time.monotonic() - t0
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else "?"
    ok = proc.returncode == 0 and elapsed < 300.0
    _report(10, "property suites", ok, f"{tail}, {elapsed:.0f} s")

"""Exit criteria. Each test records one PASS/FAIL line for the summary."""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from mixedspin import linalg
from mixedspin.measures import (
    local_dephase,
    mid,
    negativity,
    negativity_closed_form,
    negativity_from_trace_norm,
)
from mixedspin.model import (
    T0_LIMIT,
    ModelParams,
    boltzmann_partition_function,
    build_hamiltonian,
    closed_form_spectrum,
    numeric_spectrum,
    partition_function,
    thermal_state,
)
from mixedspin.sweep import PRESETS, find_critical_temperature

from conftest import binary_entropy, record

pytestmark = pytest.mark.acceptance

J_GRID = np.linspace(-2, 2, 50)
T_GRID = np.linspace(0.05, 5, 50)


def test_c1_spectrum_oracle(rng):
    worst_e = worst_v = 0.0
    n = 0
    while n < 1000:
        J, B = rng.uniform(-2, 2), rng.uniform(0, 3)
        if abs(J) < 1e-3:
            continue
        n += 1
        p = ModelParams(J, B)
        s = closed_form_spectrum(p)
        worst_e = max(worst_e, np.max(np.abs(np.sort(s.energies) - numeric_spectrum(p).values)))
        h = build_hamiltonian(p)
        for lv in s.levels:
            worst_v = max(worst_v, np.max(np.abs(h @ lv.vector - lv.energy * lv.vector)))
    ok = worst_e <= 1e-10 and worst_v <= 1e-10
    record("C1 spectrum oracle", ok, f"1000 points, max |dE| = {worst_e:.2e}, max residual = {worst_v:.2e} (tol 1e-10)")
    assert ok


def test_c2_partition_function():
    worst = 0.0
    for B in (0.0, 1.0):
        for J in J_GRID:
            energies = numeric_spectrum(ModelParams(J, B)).values
            for T in T_GRID:
                z_closed = partition_function(ModelParams(J, B, T))
                z_sum = boltzmann_partition_function(energies, T)
                worst = max(worst, abs(z_closed - z_sum) / z_sum)
    ok = worst <= 1e-12
    record("C2 partition function", ok, f"50x50 grid, B in {{0,1}}, max rel err = {worst:.2e} (tol 1e-12)")
    assert ok


def test_c3_negativity_paths():
    worst_cf = worst_tn = 0.0
    points = 0
    grids = [(B, J_GRID[np.abs(J_GRID) >= 0.1], T_GRID) for B in (0.0, 1.0)]
    # the wider 40 x 40 property grid over both coupling signs and five fields
    j40 = np.concatenate([np.linspace(0.1, 2, 40), np.linspace(-2, -0.1, 40)])
    grids += [(B, j40, np.linspace(0.05, 5, 40)) for B in (0, 0.2, 0.5, 1, 2)]
    for B, js, ts in grids:
        for J in js:
            for T in ts:
                p = ModelParams(J, B, T)
                rho = thermal_state(p).rho
                n = negativity(rho)
                worst_cf = max(worst_cf, abs(negativity_closed_form(p) - n))
                worst_tn = max(worst_tn, abs(negativity_from_trace_norm(rho) - negativity(rho, raw=True)))
                points += 1
    ok = worst_cf <= 1e-10 and worst_tn <= 1e-12
    record("C3 negativity paths", ok,
           f"{points} points, closed-form vs numeric {worst_cf:.2e} (tol 1e-10), "
           f"trace-norm vs eigenvalue form {worst_tn:.2e} (tol 1e-12)")
    assert ok


def test_c4_ferromagnetic_separability():
    worst = 0.0
    for J in np.linspace(-2, -0.05, 40):
        for T in np.linspace(0.05, 5, 40):
            worst = max(worst, negativity(thermal_state(ModelParams(J, 0, T)).rho))
    ok = worst <= 1e-12
    record("C4 ferromagnetic separability", ok, f"40x40 grid J in [-2,-0.05], max N = {worst:.2e} (tol 1e-12)")
    assert ok


def test_c5_correlation_without_entanglement():
    r = mid(ModelParams(-1, 0, 0.5))
    ok = r.mid > 1e-4 and r.negativity == 0.0
    record("C5 correlation without entanglement", ok, f"(J,B,T)=(-1,0,0.5): Q = {r.mid:.6f} > 1e-4, N = {r.negativity}")
    assert ok


def test_c6_marginal_invariance(rng):
    worst = 0.0
    for _ in range(200):
        rho = thermal_state(ModelParams(rng.uniform(-2, 2), rng.uniform(0, 3), rng.uniform(0.05, 5))).rho
        deph = local_dephase(rho)
        for keep in ("first", "second"):
            worst = max(worst, np.max(np.abs(linalg.partial_trace(deph, keep) - linalg.partial_trace(rho, keep))))
    ok = worst <= 1e-14
    record("C6 marginal invariance", ok, f"200 points, max entry diff = {worst:.2e} (tol 1e-14)")
    assert ok


def test_c7_limits():
    worst = 0.0
    for T in (0.05, 0.5, 1, 10, 1000):
        r = mid(ModelParams(0, 0, T))
        worst = max(worst, abs(r.negativity), abs(r.mid), abs(r.Z - 6))
    hot = mid(ModelParams(1, 0, 1000))
    ok = worst <= 1e-12 and hot.negativity < 1e-3 and hot.mid < 1e-3
    record("C7 limits", ok, f"J=B=0: max |N|,|Q|,|Z-6| = {worst:.1e}; T=1000: N = {hot.negativity:.1e}, Q = {hot.mid:.1e}")
    assert ok


def test_c8_critical_temperature():
    tcs = [find_critical_temperature(J, 0, 0.05, 5, 1e-6) for J in (0.5, 1, 2)]
    ok = None not in tcs and tcs[0] < tcs[1] < tcs[2]
    record("C8 critical temperature", ok, "T_c(J=0.5, 1, 2) = " + ", ".join(
        "none" if t is None else f"{t:.6f}" for t in tcs))
    assert ok


def test_c9_pure_ground_state():
    J, B = 1.0, 1.0
    # hand-built ground state (|0,1> - d+ |1,0>) / norm
    d = (J + math.sqrt(4 * B * B + 4 * B * J + 9 * J * J) + 2 * B) / (2 * math.sqrt(2) * J)
    v = np.zeros(6)
    v[2], v[1] = 1 / math.hypot(1, d), -d / math.hypot(1, d)
    state = thermal_state(ModelParams(J, B), T0_LIMIT)
    fidelity = float(np.real(v @ state.rho @ v))
    r = mid(ModelParams(J, B), T0_LIMIT)
    h = binary_entropy(1 / (1 + d * d))
    n_expected = math.sqrt(d * d) / (1 + d * d)
    q_expected = 2 * h - h
    errs = (1 - fidelity, abs(r.negativity - n_expected), abs(r.mid - q_expected))
    ok = errs[0] <= 1e-10 and errs[1] <= 1e-10 and errs[2] <= 1e-10
    record("C9 pure ground state", ok,
           f"1-F = {errs[0]:.1e}, |N - {n_expected:.6f}| = {errs[1]:.1e}, |Q - {q_expected:.6f}| = {errs[2]:.1e} (tol 1e-10)")
    assert ok


def test_c10_mid_nonnegative_and_continuous():
    lowest = math.inf
    for B in (0, 0.2, 0.5, 1, 2):
        for J in J_GRID:
            for T in T_GRID[::2]:
                lowest = min(lowest, mid(ModelParams(J, B, T)).mid_raw)
    delta = 1e-4
    worst_ratio = 0.0
    for J, B in ((1, 0), (-1, 0), (2, 0), (1, 0.2), (1, 1), (1, 2.5), (-0.5, 1.5)):
        coarse_t = np.arange(0.05, 5.0 + 1e-9, 0.05)
        coarse_q = np.array([mid(ModelParams(J, B, T)).mid for T in coarse_t])
        bound = 10 * np.max(np.abs(np.diff(coarse_q)) / 0.05)
        for T in np.linspace(0.05, 5, 100):
            step = abs(mid(ModelParams(J, B, T)).mid - mid(ModelParams(J, B, T + delta)).mid)
            worst_ratio = max(worst_ratio, step / (bound * delta))
    ok = lowest >= -1e-10 and worst_ratio <= 1
    record("C10 MID nonnegative and continuous", ok,
           f"min Q = {lowest:.2e} (>= -1e-10); max |dQ| / (C dT) = {worst_ratio:.3f} (<= 1, C = 10x coarse slope)")
    assert ok


def _run_preset(name):
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "mixedspin", "sweep", "--preset", name],
                          capture_output=True, check=True)
    return proc.stdout, time.perf_counter() - start


@pytest.mark.parametrize("name", ["fig1", "fig2", "fig3"])
def test_c11_figure_regeneration(name):
    first, elapsed = _run_preset(name)
    second, _ = _run_preset(name)
    spec = PRESETS[name]
    lines = first.decode("utf-8").split("\n")
    header = ",".join(spec.columns())
    rows = [line.split(",") for line in lines[1:-1]]
    values = np.array(rows, dtype=float)
    expected_rows = spec.x_axis.steps * spec.y_axis.steps
    schema = (
        lines[0] == header
        and lines[-1] == ""
        and b"\r" not in first
        and values.shape == (expected_rows, len(spec.columns()))
        and bool(np.all(np.isfinite(values)))
    )
    ok = elapsed < 30 and schema and first == second
    record(f"C11 figure regeneration ({name})", ok,
           f"{elapsed:.1f}s (< 30s), {len(rows)} rows, header '{lines[0]}', deterministic = {first == second}")
    assert ok

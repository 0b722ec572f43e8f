"""Shared benchmark builds and integration runs.

The expensive full-order runs are session-scoped and reused across the test
modules. Every run of the time-dispersive formulation is also recorded in a
session registry so the discrete memory constraint can be audited over all
of them at once at the end of the acceptance suite.
"""

from __future__ import annotations

import numpy as np
import pytest

import sympmor as sm

VOLTERRA_REL = 1e-10


class RunRegistry:
    """(label, report) pairs for every time-dispersive integration run."""

    def __init__(self):
        self.entries = []

    def add(self, label: str, report) -> None:
        if report.kind == "tdd":
            self.entries.append((label, report))


def volterra_bound(report) -> float:
    """Admissible memory-constraint residual, relative to the co-state scale."""
    return VOLTERRA_REL * (1.0 + report.kz_max)


def assert_volterra(report, label: str = "run") -> None:
    assert report.volterra_max <= volterra_bound(report), (
        f"{label}: memory-constraint residual {report.volterra_max:.3e} "
        f"exceeds {volterra_bound(report):.3e}"
    )


def extended_drift(report) -> np.ndarray:
    """|H_ext(t) - H(0)| / H(0): drift of the conserved extended energy,
    normalized by the initial visible energy (positive for these runs)."""
    h0 = report.hamiltonian[0]
    return np.abs(report.extended_energy - h0) / abs(h0)


def passivity_fd(system, report) -> np.ndarray:
    """Centered-difference power balance on interior snapshot nodes:
    d/dt (0.5 ||f||^2) minus the supply rate. Nonpositive along passive
    trajectories, up to the quadrature error of the differences."""
    f = report.costates
    z = report.snapshots.states
    t = report.snapshots.times
    dt = float(t[1] - t[0])
    stored = 0.5 * np.sum(f * f, axis=0)
    supply = np.array([system.supply_rate(z[:, i], f[:, i])
                       for i in range(z.shape[1])])
    return (stored[2:] - stored[:-2]) / (2.0 * dt) - supply[1:-1]


def kink_speed(report, grid) -> float:
    """Propagation speed of the level-pi front of the q profile: linear
    interpolation of the crossing point in x, least-squares slope in t."""
    states = report.snapshots.states
    n = states.shape[0] // 2
    centers = np.empty(states.shape[1])
    for j in range(states.shape[1]):
        q = states[:n, j]
        i = int(np.argmax(q >= np.pi))
        assert 0 < i < n, "front left the grid"
        frac = (np.pi - q[i - 1]) / (q[i] - q[i - 1])
        centers[j] = grid[i - 1] + frac * (grid[i] - grid[i - 1])
    return float(np.polyfit(report.snapshots.times, centers, 1)[0])


def energy_series(system, states) -> np.ndarray:
    """Visible energy H evaluated column by column."""
    return np.array([system.hamiltonian(states[:, j])
                     for j in range(states.shape[1])])


def terminal_growth(series) -> bool:
    """True when a deviation series peaks at its final instant and the peak
    dwarfs the first half: the monotone-growth stability flag."""
    err = np.asarray(series, dtype=float)
    half = err[: max(1, err.size // 2)].max()
    return bool(err[-1] >= err.max() * (1.0 - 1e-9)
                and err[-1] >= 10.0 * half)


def _full_run(name, overrides, registry, label):
    config = sm.make_config(name, overrides)
    bench = sm.build_benchmark(name, config)
    report = sm.integrate(bench.system, dt=config.dt, t_final=config.t_final,
                          snapshot_stride=config.snapshot_stride)
    registry.add(label, report)
    return bench, report


def _reduced_run(system, config, registry, label):
    report = sm.integrate(system, dt=config.dt, t_final=config.t_final,
                          snapshot_stride=config.snapshot_stride)
    registry.add(label, report)
    return report


@pytest.fixture(scope="session")
def run_registry():
    return RunRegistry()


# -- full-order runs ----------------------------------------------------------


@pytest.fixture(scope="session")
def wave_n500(run_registry):
    """Full-size dissipative wave run (n = 500, dt = 0.002, T = 7.5)."""
    return _full_run("wave", {}, run_registry, "wave-n500")


@pytest.fixture(scope="session")
def wave_n500_half_dt(run_registry):
    return _full_run("wave", {"dt": 0.001, "snapshot_stride": 10},
                     run_registry, "wave-n500-dt-halved")


@pytest.fixture(scope="session")
def wave_n100(run_registry):
    """Reduced-size wave run reused by most module tests."""
    return _full_run("wave", {"n": 100}, run_registry, "wave-n100")


@pytest.fixture(scope="session")
def lowdiss_n100(run_registry):
    return _full_run("wave-lowdiss", {"n": 100}, run_registry,
                     "wave-lowdiss-n100")


@pytest.fixture(scope="session")
def sg_n100(run_registry):
    return _full_run("sine-gordon", {"n": 100}, run_registry,
                     "sine-gordon-n100")


@pytest.fixture(scope="session")
def sg_free_kink(run_registry):
    """Undamped kink with boundary values consistent with the profile."""
    return _full_run("sine-gordon",
                     {"n": 100, "r": 0.0, "consistent_bc": True,
                      "t_final": 20.0},
                     run_registry, "sine-gordon-free-kink")


@pytest.fixture(scope="session")
def ladder50(run_registry):
    return _full_run("ladder", {}, run_registry, "ladder-50")


# -- reduced runs -------------------------------------------------------------


@pytest.fixture(scope="session")
def wave_n500_greedy40(wave_n500, run_registry):
    """Greedy 40-mode reduction of the full-size wave, integrated closed."""
    bench, report = wave_n500
    result = sm.greedy_basis(report.snapshots, 20)
    red = sm.rdh_reduce(bench.system, result.basis)
    rep = _reduced_run(red.system, bench.config, run_registry,
                       "wave-n500-greedy-40")
    return red, rep


def _error_cell(bench, full, energy_full, e_scale, mapper, report):
    recon = sm.reconstruct(mapper, report.snapshots, dx=bench.system.dx)
    err = sm.l2_error(full.snapshots, recon)
    energy = energy_series(bench.system, recon.states)
    dev = np.abs(energy - energy_full)
    return {
        "report": report,
        "error": err,
        "energy_dev": dev,
        "energy_error_mean": float(dev.mean()) / e_scale,
        "energy_error_max": float(dev.max()) / e_scale,
    }


@pytest.fixture(scope="session")
def wave_n100_sweep(wave_n100, run_registry):
    """Reduced runs of the small wave problem: the structure-preserving
    reduction and both baselines, with trajectory and energy errors against
    the full model."""
    bench, full = wave_n100
    config = bench.config
    energy_full = energy_series(bench.system, full.snapshots.states)
    e_scale = max(float(np.abs(energy_full).max()), 1e-300)
    basis60, _ = sm.cotangent_lift(full.snapshots, 30)
    model = bench.dissipative_model()
    cells = {}
    for m in (20, 40, 60):
        sub = basis60.truncate(m // 2)
        red = sm.rdh_reduce(bench.system, sub)
        rep = _reduced_run(red.system, config, run_registry,
                           f"wave-n100-rdh-{m}")
        cells["rdh", m] = _error_cell(bench, full, energy_full, e_scale,
                                      sub, rep)
        psd = sm.psd_baseline(model, sub)
        rep = sm.integrate_dissipative(
            psd.model, dt=config.dt, t_final=config.t_final,
            snapshot_stride=config.snapshot_stride)
        cells["psd", m] = _error_cell(bench, full, energy_full, e_scale,
                                      sub, rep)
    v, _ = sm.pod_basis(full.snapshots, 40)
    pm = sm.pod_baseline(model, v)
    rep = sm.integrate_rk4(pm.rhs, pm.y0, dt=config.dt,
                           t_final=config.t_final,
                           snapshot_stride=config.snapshot_stride)
    cell = _error_cell(bench, full, energy_full, e_scale, v, rep)
    cell["abscissa"] = sm.spectral_abscissa(pm.matrix)
    cells["pod", 40] = cell
    return {"bench": bench, "full": full, "cells": cells}


@pytest.fixture(scope="session")
def lowdiss_pair(lowdiss_n100, run_registry):
    """Closed reduction versus the plain symplectic baseline at 40 modes in
    the near-conservative regime."""
    bench, full = lowdiss_n100
    config = bench.config
    basis, _ = sm.cotangent_lift(full.snapshots, 20)
    red = sm.rdh_reduce(bench.system, basis)
    rep_rdh = _reduced_run(red.system, config, run_registry,
                           "wave-lowdiss-rdh-40")
    psd = sm.psd_baseline(bench.dissipative_model(), basis)
    rep_psd = sm.integrate_dissipative(
        psd.model, dt=config.dt, t_final=config.t_final,
        snapshot_stride=config.snapshot_stride)
    recon_rdh = sm.reconstruct(basis, rep_rdh.snapshots, dx=bench.system.dx)
    recon_psd = sm.reconstruct(basis, rep_psd.snapshots, dx=bench.system.dx)
    return {
        "err_rdh": sm.l2_error(full.snapshots, recon_rdh),
        "err_psd": sm.l2_error(full.snapshots, recon_psd),
        "mutual": sm.l2_error(recon_rdh, recon_psd),
    }


@pytest.fixture(scope="session")
def ladder_reduced(ladder50, run_registry):
    """Closed reductions of the ladder at 10, 20 and 30 modes."""
    bench, full = ladder50
    basis15, _ = sm.cotangent_lift(full.snapshots, 15)
    runs = {}
    for m in (10, 20, 30):
        red = sm.rdh_reduce(bench.system, basis15.truncate(m // 2))
        rep = _reduced_run(red.system, bench.config, run_registry,
                           f"ladder-rdh-{m}")
        runs[m] = (red, rep)
    return runs


@pytest.fixture(scope="session")
def sg_reduced(sg_n100, run_registry):
    """Kinetic-energy errors of closed reductions of the damped kink."""
    bench, full = sg_n100
    kin_full = full.kinetic_series()
    basis30, _ = sm.cotangent_lift(full.snapshots, 30)
    n = bench.system.n
    errors = {}
    for m in (20, 40, 60):
        sub = basis30.truncate(m // 2)
        red = sm.rdh_reduce(bench.system, sub)
        rep = _reduced_run(red.system, bench.config, run_registry,
                           f"sine-gordon-rdh-{m}")
        v = sub.lift(rep.derivatives)[:n]
        kin = 0.5 * bench.system.dx * np.sum(v * v, axis=0)
        errors[m] = float(np.abs(kin - kin_full).max())
    return {"kinetic_errors": errors, "kinetic_full": kin_full}


@pytest.fixture(scope="session")
def identity_reduction(wave_n100, run_registry):
    """Reduction on the identity basis: must reproduce the full model."""
    bench, _ = wave_n100
    dim = bench.system.dim
    basis = sm.OrthoSymplecticBasis(np.eye(dim)[:, : dim // 2])
    red = sm.rdh_reduce(bench.system, basis)
    dt = bench.config.dt
    full = sm.integrate(bench.system, dt=dt, n_steps=1000, snapshot_stride=10)
    reduced = sm.integrate(red.system, dt=dt, n_steps=1000, snapshot_stride=10)
    run_registry.add("wave-n100-identity-full", full)
    run_registry.add("wave-n100-identity-reduced", reduced)
    return full, reduced

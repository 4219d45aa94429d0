"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s`.  Criteria 4, 6, and 10
target the recurrence phenomenology of the vortex systems; the shipped
symmetric layout does not reach those targets under the declared time
normalization (no angle assignment can, see the Known gaps section of the
README), so those tests fail honestly and report the measured values
together with the layout-sweep results.
"""
import math

import numpy as np
import pytest

from vortexprop.evolve import (
    RunConfig,
    fidelity_scan,
    geometry_sweep,
    run_exact,
    run_trotter,
)
from vortexprop.hamiltonian import PauliAxis, PauliTerm, period_from_constants
from vortexprop.lattice import build_system, site_equivalence_classes
from vortexprop.observables import (
    check_amplitude_symmetry,
    check_class_degeneracy,
    estimate_period,
    local_maxima,
    read_samples_csv,
)
from vortexprop.runner import cli_main
from vortexprop.statevector import (
    StateVector,
    apply_circuit,
    apply_pauli_exponential_direct,
    max_amplitude_diff,
)

PAPER_DT_AB = 1 / 300
PAPER_DT_C = 1 / 10


def report(criterion: int, ok: bool, detail: str) -> bool:
    print(f"criterion {criterion:02d}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


# ---------------------------------------------------------------------------
# shared runs
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def melon_run():
    config = RunConfig(system=build_system("melon"), dt_over_T=PAPER_DT_AB,
                       total_over_T=4.0, sample_pitch=20)
    return run_trotter(config)


@pytest.fixture(scope="module")
def antimelon_run():
    config = RunConfig(system=build_system("antimelon"), dt_over_T=PAPER_DT_AB,
                       total_over_T=4.0, sample_pitch=20)
    return run_trotter(config)


@pytest.fixture(scope="module")
def melon_exact_run():
    config = RunConfig(system=build_system("melon"), dt_over_T=PAPER_DT_AB,
                       total_over_T=4.0, sample_pitch=20)
    return run_exact(config)


@pytest.fixture(scope="module")
def antimelon_exact_run():
    config = RunConfig(system=build_system("antimelon"), dt_over_T=PAPER_DT_AB,
                       total_over_T=4.0, sample_pitch=20)
    return run_exact(config)


@pytest.fixture(scope="module")
def combined_run():
    config = RunConfig(system=build_system("combined"), dt_over_T=PAPER_DT_C,
                       total_over_T=48.0, sample_pitch=2)
    return run_trotter(config)


@pytest.fixture(scope="module")
def combined_exact_run():
    config = RunConfig(system=build_system("combined"), dt_over_T=PAPER_DT_C,
                       total_over_T=48.0, sample_pitch=2)
    return run_exact(config)


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def test_criterion_01_constants():
    period = period_from_constants()
    ok = abs(period - 40.50) <= 0.01
    assert report(1, ok, f"T = {period:.6f} fs (target 40.50 +/- 0.01)")


def test_criterion_02_circuit_correctness():
    from vortexprop.circuit import compile_pauli_exponential

    rng = np.random.default_rng(424242)
    axes = (PauliAxis.X, PauliAxis.Y, PauliAxis.Z)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        k = int(rng.integers(1, n + 1))
        sites = sorted(rng.choice(n, size=k, replace=False).tolist())
        term = PauliTerm(float(rng.uniform(-2, 2)),
                         tuple((s, axes[rng.integers(3)]) for s in sites))
        phi = float(rng.uniform(-math.pi, math.pi))
        amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        amps /= np.linalg.norm(amps)
        a = StateVector(n, amps.copy())
        b = StateVector(n, amps.copy())
        apply_circuit(a, compile_pauli_exponential(term, phi, n))
        apply_pauli_exponential_direct(b, term, phi)
        worst = max(worst, max_amplitude_diff(a, b))
    ok = worst <= 1e-10
    assert report(2, ok, f"1000 random terms, max amplitude deviation {worst:.3e} (<= 1e-10)")


def test_criterion_03_trotter_convergence():
    spec = build_system("melon")
    exact = run_exact(RunConfig(system=spec, dt_over_T=1.0, total_over_T=1.0,
                                sample_pitch=1)).final_state
    errors = []
    for m in (75, 150, 300, 600):
        config = RunConfig(system=spec, dt_over_T=1.0 / m, total_over_T=1.0,
                           sample_pitch=m)
        errors.append(max_amplitude_diff(exact, run_trotter(config).final_state))
    ratios = [errors[i] / errors[i + 1] for i in range(len(errors) - 1)]
    ok = all(1.7 <= r <= 2.3 for r in ratios)
    assert report(3, ok, f"error halving ratios {[f'{r:.3f}' for r in ratios]} (in [1.7, 2.3])")


def test_criterion_04_single_vortex_recurrence(melon_run, antimelon_run):
    fid_a = melon_run.samples[-1].fidelity0
    fid_b = antimelon_run.samples[-1].fidelity0
    ok = fid_a >= 0.99 and fid_b >= 0.99
    detail = f"fidelity at 4T: melon {fid_a:.4f}, antimelon {fid_b:.4f} (target >= 0.99)"
    if not ok:
        # layout sweep over the one dynamical knob (global angle chi); lattice
        # rotations and reflections are relabelings with no effect on fidelity
        chis = np.linspace(0.0, math.pi / 2, 16, endpoint=False)
        sweep = geometry_sweep("melon", chis, dt_over_T=PAPER_DT_AB, total_over_T=4.0)
        best_chi, best_fid = max(sweep, key=lambda t: t[1])
        detail += (f"; chi sweep best {best_fid:.4f} at chi={best_chi:.4f} "
                   f"- no layout reaches the target, shipped default documents the gap (README)")
    assert report(4, ok, detail)


def test_criterion_05_energy_invariance(melon_run, antimelon_run, combined_run,
                                        melon_exact_run, antimelon_exact_run,
                                        combined_exact_run):
    worst_exact = max(
        max(abs(s.energy) for s in run.samples)
        for run in (melon_exact_run, antimelon_exact_run, combined_exact_run)
    )
    worst_trotter = max(
        max(abs(s.energy) for s in run.samples)
        for run in (melon_run, antimelon_run, combined_run)
    )
    ok = worst_exact <= 1e-6 and worst_trotter <= 0.02
    assert report(5, ok, f"max |<H>|: exact {worst_exact:.2e} (<= 1e-6 J), "
                         f"trotter {worst_trotter:.2e} (<= 0.02 J)")


def test_criterion_06_amplitude_symmetry(melon_run):
    asym = check_amplitude_symmetry(melon_run.samples, 2.0)
    ok = asym <= 0.02
    detail = f"max amplitude asymmetry about 2T: {asym:.4f} (target <= 0.02)"
    if not ok:
        detail += " - same layout gap as criterion 4 (README)"
    assert report(6, ok, detail)


def test_criterion_07_combined_class_degeneracy(combined_exact_run):
    spec = build_system("combined")
    classes = site_equivalence_classes(spec)
    assert ("a", "c", "j", "l") in classes and ("d", "h", "i", "m") in classes
    spreads = check_class_degeneracy(
        combined_exact_run.samples, classes, combined_exact_run.site_labels
    )
    worst = max(spreads.values())
    ok = worst <= 1e-6
    assert report(7, ok, f"exact-evolution class spread over 48T: {worst:.2e} (<= 1e-6), "
                         f"classes {[''.join(c) for c in classes]}")


def test_criterion_08_xxz_lower_bounds():
    flags = {}
    for delta in (0.0, 2.0):
        spec = build_system("xxz", n=8, delta=delta)
        config = RunConfig(system=spec, dt_over_T=PAPER_DT_C, total_over_T=PAPER_DT_C,
                           sample_pitch=1, threshold=0.999)
        series = fidelity_scan(config, 400.0)
        est = estimate_period(series, 0.999, 400.0)
        peak = max(f for _, f in series[1:])
        flags[delta] = (est.lower_bound, peak)
    ok = all(lb for lb, _ in flags.values())
    assert report(8, ok, "XXZ n=8 scans to 400T: " + ", ".join(
        f"delta={d:g} lower_bound={lb} (peak fid {pk:.3f})" for d, (lb, pk) in flags.items()
    ))


def test_criterion_09_determinism_roundtrip(tmp_path):
    args = ["simulate", "--system", "melon", "--dt", "1/60", "--total", "1",
            "--pitch", "10"]
    assert cli_main(args + ["--out", str(tmp_path / "r1")]) == 0
    assert cli_main(args + ["--out", str(tmp_path / "r2")]) == 0
    b1 = (tmp_path / "r1/samples.csv").read_bytes()
    b2 = (tmp_path / "r2/samples.csv").read_bytes()
    identical = b1 == b2
    header, rows = read_samples_csv(tmp_path / "r1/samples.csv")
    config = RunConfig(system=build_system("melon"), dt_over_T=1 / 60,
                       total_over_T=1.0, sample_pitch=10)
    result = run_trotter(config)
    exact_match = all(
        rows[i, 5] == result.samples[i].fidelity0
        and np.array_equal(rows[i, 6:14], np.array(result.samples[i].m_z))
        for i in range(len(result.samples))
    )
    ok = identical and exact_match
    assert report(9, ok, f"byte-identical CSV: {identical}, exact re-parse: {exact_match}")


def test_criterion_10_combined_recurrence_window():
    spec = build_system("combined")
    config = RunConfig(system=spec, dt_over_T=PAPER_DT_C, total_over_T=PAPER_DT_C,
                       sample_pitch=1, threshold=0.999)
    series = fidelity_scan(config, 60.0)
    maxima = local_maxima(series)
    window = [(t, f) for t, f in maxima if 44.0 <= t <= 52.0]
    best_window = max(window, key=lambda x: x[1]) if window else (float("nan"), 0.0)
    interior = [(t, f) for t, f in maxima if t > 1.0]
    best_global = max(interior, key=lambda x: x[1])
    ok = bool(window) and best_window[1] >= 0.999 * best_global[1]
    detail = (f"window [44T, 52T] best local max {best_window[1]:.4f} at t={best_window[0]:.1f}T; "
              f"best over scan {best_global[1]:.4f} at t={best_global[0]:.1f}T (target: window holds "
              f"the best recurrence, 48T goal)")
    if not ok:
        detail += " - same layout gap as criterion 4 (README)"
    assert report(10, ok, detail)

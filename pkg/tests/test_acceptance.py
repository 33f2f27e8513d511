"""Quantitative acceptance gates for the whole laboratory.

One test per numbered criterion.  Each records a single [PASS]/[FAIL] line
with the measured numbers; the lines are echoed in the terminal summary so
a full run reads as a scorecard.
"""

import time
from functools import lru_cache

import numpy as np

from darkpath.dynamics import (HamiltonianModel, NoiseModel, dark_path_state,
                               frame_states, population_trace,
                               propagate_unitary_samples,
                               sampled_population_trace)
from darkpath.gates import (NAMED_GATE_ANGLES, QubitChannel, gate_fidelity,
                            named_gate, realize, target_unitary)
from darkpath.ionphonon import (SpinPhononModel, blue_sideband_frequency,
                                controlled_phase_gate)
from darkpath.pulses import GateSpec, LoopSchedule, solve_duration, synthesize
from darkpath.rb import RBConfig, clifford_group, rb_fidelities, rb_run
from darkpath.robustness import robustness_sweep
from darkpath.tomography import ShotConfig, qpt

PEAK = 2.0 * np.pi * 1.0e4
GATES = ("X", "H", "T", "S")
ETAS = (0.0, 4.0)
SEED = 12345  # config default; fixed before any acceptance data was drawn
SHOTS = 2000
T2_DEFAULT = 10e-3  # representative coherence time for the dephased sweep

REPORT = []


def record(ok, label, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    REPORT.append(line)
    print(line)
    assert ok, line


@lru_cache(maxsize=None)
def realized_gates():
    return {(gate, eta): realize(named_gate(gate, eta, peak_rabi=PEAK))
            for gate in GATES for eta in ETAS}


def test_criterion_1_ideal_holonomy():
    t0 = time.perf_counter()
    realized = realized_gates()
    fids = {key: gate_fidelity(rg, target_unitary(*NAMED_GATE_ANGLES[key[0]]))
            for key, rg in realized.items()}
    elapsed = time.perf_counter() - t0
    worst_f = min(fids.values())
    worst_leak = max(rg.leakage for rg in realized.values())
    ok = worst_f >= 1 - 1e-6 and worst_leak <= 1e-6 and elapsed < 10.0
    record(ok, "criterion 1 ideal holonomy",
           f"8 gates, min fidelity {worst_f:.9f}, max leakage "
           f"{worst_leak:.2e}, {elapsed:.2f} s (< 10 s)")


def test_criterion_2_duration_consistency():
    t0 = time.perf_counter()
    duration = solve_duration(2.0 * np.pi * 1.0e4, 4.0)
    elapsed = time.perf_counter() - t0
    ok = 456e-6 <= duration <= 504e-6 and elapsed < 1.0
    record(ok, "criterion 2 loop duration",
           f"T(eta=4, 2pi x 10 kHz) = {duration * 1e6:.2f} us in [456, 504], "
           f"{elapsed * 1e3:.1f} ms (< 1 s)")


def test_criterion_3_dark_path_invariants():
    worst_energy = 0.0
    worst_coupling = 0.0
    worst_overlap = 1.0
    for gate in GATES:
        theta, phi, gamma = NAMED_GATE_ANGLES[gate]
        frame = frame_states(theta, phi)
        d1 = frame.dark1.amplitudes
        for eta in ETAS:
            spec = named_gate(gate, eta, peak_rabi=PEAK)
            duration = spec.resolve_duration()
            loop = LoopSchedule(duration, eta, gamma)
            model = HamiltonianModel(synthesize(spec))
            grid = np.linspace(0.0, duration, 500)
            h = model.matrices(grid)
            scale = float(np.abs(np.linalg.eigvalsh(h)).max())
            for hi, t in zip(h, grid):
                d2 = dark_path_state(t, loop, frame).amplitudes
                hd1, hd2 = hi @ d1, hi @ d2
                worst_energy = max(worst_energy,
                                   abs(np.vdot(d2, hd2)) / scale)
                worst_coupling = max(worst_coupling,
                                     abs(np.vdot(d1, hd1)) / scale,
                                     abs(np.vdot(d2, hd1)) / scale,
                                     abs(np.vdot(d1, hd2)) / scale)

            times, us = propagate_unitary_samples(model)
            psi = us @ dark_path_state(0.0, loop, frame).amplitudes
            for t, state in zip(times[::64], psi[::64]):
                target = dark_path_state(float(t), loop, frame).amplitudes
                worst_overlap = min(worst_overlap,
                                    abs(np.vdot(target, state)))
    ok = worst_energy <= 1e-9 and worst_coupling <= 1e-9 \
        and worst_overlap >= 1 - 1e-6
    record(ok, "criterion 3 dark-path invariants",
           f"max |<d2|H|d2>|/||H|| = {worst_energy:.2e}, max dark-dark "
           f"coupling {worst_coupling:.2e}, min tracking overlap "
           f"{worst_overlap:.9f}")


def test_criterion_4_population_dynamics():
    model = HamiltonianModel(synthesize(named_gate("X", 4.0, peak_rabi=PEAK)))
    psi0 = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
    times, pops = population_trace(psi0, model)
    mid = (len(times) - 1) // 2
    pa_mid = float(pops[mid, 3])
    p1_end = float(pops[-1, 1])

    subsampled = pops[::64]
    estimates = sampled_population_trace(subsampled, SHOTS, SEED)
    sigma = np.sqrt(np.clip(subsampled * (1 - subsampled), 0.0, None) / SHOTS)
    violations = int((np.abs(estimates - subsampled)
                      > 3.0 * sigma + 1e-12).sum())
    ok = abs(pa_mid - 0.5) <= 0.01 and p1_end >= 0.999 and violations == 0
    record(ok, "criterion 4 population dynamics",
           f"P_a(T/2) = {pa_mid:.4f} (0.50 +- 0.01), P_1(T) = {p1_end:.6f} "
           f"(>= 0.999), {violations} of {estimates.size} sampled points "
           f"outside 3-sigma bands")


def test_criterion_5_robustness_ordering():
    t0 = time.perf_counter()
    epsilons = tuple(sorted({s * k for k in (0.02, 0.04, 0.06, 0.08, 0.10)
                             for s in (-1.0, 1.0)}))
    rows = robustness_sweep(GATES, ETAS, epsilons, PEAK)
    table = {(r.gate, r.eta, r.epsilon): r.fidelity for r in rows}
    ordering = all(table[g, 4.0, e] >= table[g, 0.0, e] - 1e-12
                   for g in GATES for e in epsilons)
    strict = all(table[g, 4.0, e] > table[g, 0.0, e]
                 for g in GATES for e in epsilons if abs(e) >= 0.04 - 1e-12)

    noise = NoiseModel.dephasing(T2_DEFAULT)
    zero = robustness_sweep(GATES, ETAS, (0.0,), PEAK, noise=noise)
    z = {(r.gate, r.eta): r.fidelity for r in zero}
    dephased = all(z[g, 0.0] > z[g, 4.0] for g in GATES)
    elapsed = time.perf_counter() - t0
    ok = ordering and strict and dephased and elapsed < 120.0
    record(ok, "criterion 5 robustness ordering",
           f"F(eta=4) >= F(eta=0) at all 40 points: {ordering}, strict at "
           f"|eps| >= 0.04: {strict}, dephased (T2 = {T2_DEFAULT * 1e3:.0f} ms) "
           f"favors eta=0 at eps=0: {dephased}, {elapsed:.1f} s (< 2 min)")


def _pulse_clifford_channels(eta):
    channels = []
    for elem in clifford_group():
        theta, phi, gamma = elem.loop_angles
        if gamma == 0.0:
            channels.append(QubitChannel.from_unitary(np.eye(2, dtype=complex)))
            continue
        spec = GateSpec(theta, phi, gamma, eta, peak_rabi=PEAK)
        channels.append(realize(spec).qubit_channel())
    return tuple(channels)


def test_criterion_6_randomized_benchmarking():
    channels = _pulse_clifford_channels(4.0)
    cfg = RBConfig((1, 2, 4, 8, 16, 32), sequences=20, seed=SEED)
    ideal = rb_run(cfg, channels)

    p = 0.01
    depol = QubitChannel.depolarizing(p)
    noisy = tuple(ch.then(depol) for ch in channels)
    noisy_run = rb_run(cfg, noisy)
    f_ave, _ = rb_fidelities(noisy_run.fit.r)
    ok = ideal.fit.r >= 0.9999 and abs(f_ave - (1 - p / 2)) <= 0.002
    record(ok, "criterion 6 randomized benchmarking",
           f"ideal r = {ideal.fit.r:.6f} (>= 0.9999), depolarized p = 0.01 "
           f"gives F_ave = {f_ave:.6f} vs 0.995 (+- 0.002)")


def test_criterion_7_process_tomography():
    realized = realized_gates()
    worst_exact = 1.0
    worst_mean = 1.0
    for (gate, eta), rg in realized.items():
        target = target_unitary(*NAMED_GATE_ANGLES[gate])
        worst_exact = min(worst_exact, qpt(rg, cfg=None, target=target).fidelity)
        fids = [qpt(rg, cfg=ShotConfig(SHOTS, SEED + k), target=target).fidelity
                for k in range(20)]
        worst_mean = min(worst_mean, float(np.mean(fids)))
    ok = worst_exact >= 1 - 1e-6 and worst_mean >= 0.99
    record(ok, "criterion 7 process tomography",
           f"exact min F = {worst_exact:.9f} (>= 1 - 1e-6), worst 20-seed "
           f"sampled mean F = {worst_mean:.4f} (>= 0.99)")


def test_criterion_8_two_qubit_gate():
    result = controlled_phase_gate(np.pi, peak_rabi=PEAK)
    target = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    deviation = float(np.abs(result.block - target).max())
    micros = round(result.duration * 1e6)
    spectators = all(
        result.full[k, k] == 1.0
        and np.count_nonzero(result.full[k]) == 1
        and np.count_nonzero(result.full[:, k]) == 1
        for k in range(3))
    ok = deviation <= 1e-4 and result.leakage <= 1e-6 \
        and 480 <= micros <= 550 and spectators
    record(ok, "criterion 8 controlled phase",
           f"max |U - diag(1,1,1,-1)| = {deviation:.2e} (<= 1e-4), leakage "
           f"{result.leakage:.2e}, duration {micros} us in [480, 550], "
           f"spectators exactly invariant: {spectators}")


def test_criterion_9_sideband_model():
    trap = 2.0 * np.pi * 2.4e6
    model = SpinPhononModel(rabi=trap / 20.0, detuning=trap, lamb_dicke=0.1)
    fit = blue_sideband_frequency(model, tol=1e-6)
    expected = model.lamb_dicke * model.rabi
    rel = abs(fit.frequency - expected) / expected
    ok = rel <= 0.05
    record(ok, "criterion 9 sideband model",
           f"blue-sideband rate {fit.frequency:.0f} rad/s vs eta_p Omega_0 = "
           f"{expected:.0f}, relative error {rel:.3f} (<= 0.05)")

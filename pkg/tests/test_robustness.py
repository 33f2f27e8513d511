"""Amplitude-miscalibration sweeps and their writer."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from darkpath.dynamics import NoiseModel
from darkpath.robustness import SweepPoint, robustness_sweep, write_sweep_csv

RABI_DEFAULT = 2.0 * np.pi * 1.0e4
GATES = ("X", "H")
ETAS = (0.0, 4.0)
EPSILONS = (-0.06, 0.0, 0.06)


@pytest.fixture(scope="module")
def sweep_rows():
    return robustness_sweep(GATES, ETAS, EPSILONS, RABI_DEFAULT,
                            tol=1e-8, n_samples=512)


class TestSweepTable:
    def test_canonical_row_order(self, sweep_rows):
        expected = [(g, e, p) for g in GATES for e in ETAS for p in EPSILONS]
        assert [(r.gate, r.eta, r.epsilon) for r in sweep_rows] == expected

    def test_rows_are_named_tuples(self, sweep_rows):
        assert all(isinstance(r, SweepPoint) for r in sweep_rows)

    def test_zero_error_point_is_ideal(self, sweep_rows):
        for row in sweep_rows:
            if row.epsilon == 0.0:
                assert row.fidelity > 1 - 1e-6

    def test_error_never_helps(self, sweep_rows):
        best = {(r.gate, r.eta): r.fidelity
                for r in sweep_rows if r.epsilon == 0.0}
        for row in sweep_rows:
            assert row.fidelity <= best[(row.gate, row.eta)] + 1e-9

    def test_dark_path_flattens_response(self, sweep_rows):
        table = {(r.gate, r.eta, r.epsilon): r.fidelity for r in sweep_rows}
        for gate in GATES:
            for eps in EPSILONS:
                if eps == 0.0:
                    continue
                assert table[(gate, 4.0, eps)] > table[(gate, 0.0, eps)]


def test_threaded_map_matches_serial(sweep_rows):
    with ThreadPoolExecutor(max_workers=4) as pool:
        threaded = robustness_sweep(GATES, ETAS, EPSILONS, RABI_DEFAULT,
                                    tol=1e-8, n_samples=512,
                                    map_fn=pool.map)
    assert threaded == sweep_rows


def test_dephasing_reverses_preference_at_zero_error():
    noise = NoiseModel.dephasing(1e-3)
    rows = robustness_sweep(("X",), ETAS, (0.0,), RABI_DEFAULT,
                            tol=1e-6, n_samples=512, noise=noise)
    table = {r.eta: r.fidelity for r in rows}
    # longer eta=4 loop accumulates more dephasing, so plain wins at eps=0
    assert table[0.0] > table[4.0]


def test_writer_layout(tmp_path, sweep_rows):
    path = tmp_path / "sweep.csv"
    write_sweep_csv(path, sweep_rows)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "gate,eta,epsilon,fidelity"
    assert len(lines) == 1 + len(sweep_rows)
    first = lines[1].split(",")
    assert first[0] == "X"
    assert float(first[3]) == pytest.approx(sweep_rows[0].fidelity, abs=1e-10)

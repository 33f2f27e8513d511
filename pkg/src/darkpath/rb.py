"""Randomized benchmarking over the 24 single-qubit Cliffords.

Each Clifford is a single rotation (axis, angle), which maps directly onto
one holonomic loop U(theta, phi, gamma): theta and phi are the axis polar
angles and gamma is the rotation angle.  Sequences of uniformly random
Cliffords (optionally interleaved with a fixed gate) are closed by the exact
group inverse, simulated as channel compositions, and the survival decay is
fitted with A r^m + B.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .core import PAULI_X, PAULI_Y, PAULI_Z
from .gates import QubitChannel

_MATCH_TOL = 1e-10


@dataclass(frozen=True)
class CliffordElement:
    """One Clifford as a rotation: axis (unit vector), angle, SU(2) matrix."""

    index: int
    axis: tuple
    angle: float
    matrix: np.ndarray

    @property
    def loop_angles(self):
        """(theta, phi, gamma) of the holonomic loop realizing this element."""
        nx, ny, nz = self.axis
        return (float(np.arccos(np.clip(nz, -1.0, 1.0))),
                float(np.arctan2(ny, nx)), self.angle)


def _su2(axis, angle):
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    n_sigma = n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z
    half = angle / 2.0
    return np.cos(half) * np.eye(2) - 1j * np.sin(half) * n_sigma


@lru_cache(maxsize=1)
def clifford_group():
    """All 24 single-qubit Cliffords as single rotations.

    Geometric enumeration of the rotation octahedral group: identity, the
    six quarter turns and three half turns about the coordinate axes, six
    half turns about the edge midpoints, and eight third turns about the
    cube diagonals.
    """
    rotations = [((0.0, 0.0, 1.0), 0.0)]
    for ax in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        for ang in (np.pi / 2.0, -np.pi / 2.0, np.pi):
            rotations.append((ax, ang))
    for ax in ((1, 1, 0), (1, -1, 0), (1, 0, 1), (1, 0, -1), (0, 1, 1), (0, 1, -1)):
        rotations.append((ax, np.pi))
    for ax in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
        for ang in (2.0 * np.pi / 3.0, -2.0 * np.pi / 3.0):
            rotations.append((ax, ang))

    elements = []
    for idx, (ax, ang) in enumerate(rotations):
        n = np.asarray(ax, dtype=float)
        n = tuple(n / np.linalg.norm(n))
        mat = _su2(n, ang)
        mat.flags.writeable = False
        elements.append(CliffordElement(idx, n, float(ang), mat))
    return tuple(elements)


def find_clifford(matrix):
    """The group element equal to `matrix` up to global phase."""
    for elem in clifford_group():
        if abs(np.trace(elem.matrix.conj().T @ matrix)) / 2.0 > 1.0 - _MATCH_TOL:
            return elem
    raise ValueError("matrix is not a Clifford rotation")


def inverse_clifford(accumulated):
    """The group element inverting an accumulated sequence product."""
    return find_clifford(np.asarray(accumulated).conj().T)


@dataclass(frozen=True)
class RBConfig:
    """Sequence lengths, sequences per length, optional interleaving, seed."""

    lengths: tuple
    sequences: int = 20
    interleaved: str | None = None
    seed: int = 0

    def __post_init__(self):
        lengths = tuple(int(m) for m in self.lengths)
        if not lengths or any(m < 1 for m in lengths):
            raise ValueError("lengths must be positive")
        if any(b <= a for a, b in zip(lengths, lengths[1:])):
            raise ValueError("lengths must be strictly increasing")
        if self.sequences < 1:
            raise ValueError("sequences must be >= 1")
        object.__setattr__(self, "lengths", lengths)


@dataclass(frozen=True)
class FitResult:
    """Parameters of the survival model F(m) = A r^m + B."""

    A: float
    r: float
    B: float
    residual: float
    point_std: np.ndarray


def fit_decay(lengths, survival_mean, point_std=None):
    """Least-squares fit of A r^m + B to mean survival versus length.

    Ideal (noiseless) data is flat at 1.0, which leaves A and B individually
    unidentifiable; that case is detected and reported as r = 1 with the
    conventional A = mean - 1/2, B = 1/2 split rather than crashing.
    """
    m = np.asarray(lengths, dtype=float)
    y = np.asarray(survival_mean, dtype=float)
    std = np.zeros_like(y) if point_std is None else np.asarray(point_std, dtype=float)
    if np.ptp(y) < 1e-9:
        return FitResult(float(y.mean() - 0.5), 1.0, 0.5, 0.0, std)

    def model(mm, a, r, b):
        return a * np.power(r, mm) + b

    try:
        with warnings.catch_warnings():
            # The covariance is discarded, so its singularity on an exact
            # fit (e.g. pure depolarizing data) is not worth a warning.
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, _ = curve_fit(model, m, y, p0=(0.5, 0.99, 0.5),
                                bounds=([0.0, 0.0, 0.0], [1.0, 1.0, 1.0]),
                                maxfev=20_000)
    except RuntimeError as err:
        raise RuntimeError(f"decay fit failed on survivals {y.tolist()}") from err
    a, r, b = (float(v) for v in popt)
    residual = float(np.sqrt(np.mean((model(m, a, r, b) - y) ** 2)))
    return FitResult(a, r, b, residual, std)


class RBResult(NamedTuple):
    lengths: tuple
    survivals: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    fit: FitResult


def rb_run(cfg, clifford_channels, interleaved=None):
    """Run the benchmarking protocol and fit the survival decay.

    `clifford_channels` lists one QubitChannel per element of
    clifford_group(), in order.  `interleaved` optionally supplies the gate
    inserted after every Clifford as a (unitary 2x2, QubitChannel) pair; the
    recovery inverts the whole ideal sequence including the interleaved
    unitaries.  Each (length, sequence) work unit draws from its own seed
    stream, so results do not depend on execution order.
    """
    group = clifford_group()
    if len(clifford_channels) != len(group):
        raise ValueError("need one channel per Clifford element")
    int_matrix = int_channel = None
    if interleaved is not None:
        int_matrix, int_channel = interleaved

    rho0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    survivals = np.empty((len(cfg.lengths), cfg.sequences))
    for li, m in enumerate(cfg.lengths):
        for si in range(cfg.sequences):
            rng = np.random.default_rng(
                np.random.SeedSequence(cfg.seed, spawn_key=(li, si)))
            draws = rng.integers(0, len(group), size=m)
            ideal = np.eye(2, dtype=complex)
            rho = rho0
            for idx in draws:
                rho = clifford_channels[idx].apply(rho)
                ideal = group[idx].matrix @ ideal
                if int_channel is not None:
                    rho = int_channel.apply(rho)
                    ideal = int_matrix @ ideal
            recovery = inverse_clifford(ideal)
            rho = clifford_channels[recovery.index].apply(rho)
            survivals[li, si] = float(np.real(rho[0, 0]))

    mean = survivals.mean(axis=1)
    std = survivals.std(axis=1, ddof=1) if cfg.sequences > 1 \
        else np.zeros(len(cfg.lengths))
    fit = fit_decay(cfg.lengths, mean, std)
    return RBResult(tuple(cfg.lengths), survivals, mean, std, fit)


def rb_fidelities(r_ref, r_int=None):
    """Average Clifford fidelity and, if interleaved, the gate fidelity.

    F_ave = 1 - (1 - r_ref)/2; F_gate = 1 - (1 - r_int/r_ref)/2.
    """
    if not 0.0 < r_ref <= 1.0:
        raise ValueError("r_ref must be in (0, 1]")
    f_ave = 1.0 - (1.0 - r_ref) / 2.0
    if r_int is None:
        return f_ave, None
    if not 0.0 < r_int <= 1.0:
        raise ValueError("r_int must be in (0, 1]")
    return f_ave, 1.0 - (1.0 - r_int / r_ref) / 2.0


def ideal_clifford_channels():
    """Exact unitary channels for every group element (no pulse simulation)."""
    return tuple(QubitChannel.from_unitary(e.matrix) for e in clifford_group())


def write_rb_csv(path, result):
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "mean_survival", "stddev", "n_sequences"])
        n_seq = result.survivals.shape[1]
        for m, mu, sd in zip(result.lengths, result.mean, result.std):
            writer.writerow([m, f"{mu:.12g}", f"{sd:.12g}", n_seq])


def write_rb_fit_json(path, result, extra=None):
    fit = result.fit
    payload = {"A": fit.A, "r": fit.r, "B": fit.B, "residual": fit.residual}
    if extra:
        payload.update(extra)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")

"""Three-tone drive synthesis for single-loop holonomic gates.

A gate U(theta, phi, gamma) is driven by one cyclic evolution of duration T
split into two equal intervals.  The loop geometry is fixed by
alpha(t) = (pi/2) sin^2(pi t / T) and beta(t) = eta (1 - cos alpha); the
drive amplitudes are inverse-engineered so that the system follows two
simultaneous dark paths, and the holonomy gamma is imprinted by shifting
both bright-tone phases by -gamma over the second interval.

Amplitudes are signed reals (they cross zero smoothly for eta > 0); phases
are piecewise constant per interval.  All quantities are SI: seconds and
rad/s.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

DEFAULT_N_SAMPLES = 4096
DEFAULT_PEAK_GRID = 20001


def _check_range(t, duration):
    t = np.asarray(t, dtype=float)
    slop = 1e-9 * duration
    if np.any(t < -slop) or np.any(t > duration + slop):
        raise ValueError(f"time outside [0, {duration}]")
    return t


def alpha_of(t, duration):
    """Loop polar angle (pi/2) sin^2(pi t / T); 0 at both ends, pi/2 at T/2."""
    t = _check_range(t, duration)
    s = np.sin(np.pi * t / duration)
    return (np.pi / 2.0) * s * s


def alpha_dot_of(t, duration):
    t = _check_range(t, duration)
    return (np.pi ** 2 / (2.0 * duration)) * np.sin(2.0 * np.pi * t / duration)


def beta_of(t, duration, eta):
    """Second loop angle eta (1 - cos alpha); identically 0 for eta = 0."""
    return eta * (1.0 - np.cos(alpha_of(t, duration)))


def control_amplitudes(t, duration, eta):
    """Bright-path and |2>-path drive amplitudes (Omega, Omega_2) in rad/s.

    These are the closed forms obtained by substituting
    beta_dot = eta sin(alpha) alpha_dot into the raw inverse-engineered
    expressions, which cancels the cot(alpha) singularity at the loop
    endpoints:

        Omega   = 2 alpha_dot (eta cos(alpha) sin(beta) + cos(beta))
        Omega_2 = 2 alpha_dot (eta cos(alpha) cos(beta) - sin(beta))

    Both vanish at t in {0, T/2, T} and change sign over the second half.
    """
    a = alpha_of(t, duration)
    b = eta * (1.0 - np.cos(a))
    adot = alpha_dot_of(t, duration)
    omega = 2.0 * adot * (eta * np.cos(a) * np.sin(b) + np.cos(b))
    omega2 = 2.0 * adot * (eta * np.cos(a) * np.cos(b) - np.sin(b))
    return omega, omega2


def _refined_peak(profile, grid):
    """Max of |profile| over the grid followed by local bounded refinement."""
    vals = np.abs(profile(grid))
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    if hi <= lo:
        return float(vals[i])
    res = minimize_scalar(lambda x: -abs(profile(x)), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-14})
    return float(max(vals[i], -res.fun))


@lru_cache(maxsize=64)
def _dimensionless_peaks(eta, n_grid):
    """(max|Omega| T, max|Omega_2| T) for the unit-duration loop."""
    grid = np.linspace(0.0, 1.0, n_grid)
    p = _refined_peak(lambda x: control_amplitudes(x, 1.0, eta)[0], grid)
    p2 = _refined_peak(lambda x: control_amplitudes(x, 1.0, eta)[1], grid)
    return p, p2


def solve_duration(peak_rabi, eta, per_tone=False, theta=0.0,
                   n_grid=DEFAULT_PEAK_GRID):
    """Loop duration T that caps the drive at `peak_rabi`.

    By default the cap applies to the composite bright amplitude
    |Omega| = sqrt(Omega_0^2 + Omega_1^2); with per_tone=True it applies to
    each physical tone separately (Omega_0, Omega_1 split by `theta`, and
    Omega_2), which yields shorter loops for gates with theta > 0.
    """
    if peak_rabi <= 0:
        raise ValueError("peak_rabi must be positive")
    if n_grid < 10_000:
        raise ValueError("peak search grid must have at least 10^4 points")
    p, p2 = _dimensionless_peaks(float(eta), int(n_grid))
    if per_tone:
        split = max(abs(np.sin(theta / 2.0)), abs(np.cos(theta / 2.0)))
        p = max(p * split, p2)
    return p / peak_rabi


def split_bright(omega, theta, phi, phi0):
    """Split the composite bright amplitude into the two physical tones.

    Omega_0/Omega_1 = tan(theta/2) fixes the bright state's polar angle and
    phi_1 = phi_0 - phi + pi its azimuth.
    """
    omega0 = omega * np.sin(theta / 2.0)
    omega1 = omega * np.cos(theta / 2.0)
    phi1 = phi0 - phi + np.pi
    return omega0, omega1, phi1


@dataclass(frozen=True)
class GateSpec:
    """Target holonomy angles plus the evolution-path and drive budget.

    Exactly one of `duration` (seconds) or `peak_rabi` (rad/s) must be set;
    with a peak budget the duration is resolved by `solve_duration`.
    """

    theta: float
    phi: float
    gamma: float
    eta: float
    duration: float | None = None
    peak_rabi: float | None = None

    def __post_init__(self):
        if not np.isfinite(self.eta) or self.eta < 0:
            raise ValueError("eta must be finite and >= 0")
        if (self.duration is None) == (self.peak_rabi is None):
            raise ValueError("set exactly one of duration or peak_rabi")
        budget = self.duration if self.duration is not None else self.peak_rabi
        if not np.isfinite(budget) or budget <= 0:
            raise ValueError("drive budget must be positive and finite")

    def resolve_duration(self, per_tone=False):
        if self.duration is not None:
            return self.duration
        return solve_duration(self.peak_rabi, self.eta,
                              per_tone=per_tone, theta=self.theta)


@dataclass(frozen=True)
class LoopSchedule:
    """The geometric schedule of one two-interval loop."""

    duration: float
    eta: float
    gamma: float
    phi0: float = 0.0

    def alpha(self, t):
        return alpha_of(t, self.duration)

    def beta(self, t):
        return beta_of(t, self.duration, self.eta)

    @property
    def interval_phases(self):
        """Bright-path drive phase per interval: (phi0, phi0 - gamma)."""
        return (self.phi0, self.phi0 - self.gamma)

    def phi0_at(self, t):
        """Interval-resolved drive phase; the midpoint belongs to interval 1."""
        t = np.asarray(t, dtype=float)
        second = t > self.duration / 2.0
        return np.where(second, self.phi0 - self.gamma, self.phi0)


class PulseSchedule:
    """Sampled three-tone schedule on a uniform time grid.

    `amplitudes` has shape (3, n+1) holding signed Omega_0, Omega_1, Omega_2
    in rad/s; `phases` the per-tone drive phases in rad, piecewise constant
    per interval.  A synthesized schedule also carries the closed-form
    complex envelope callable, which integrators prefer over interpolation;
    schedules loaded from CSV interpolate the samples (linear in the complex
    envelope, which is exact across the mid-loop phase jump because every
    amplitude vanishes there).
    """

    def __init__(self, times, amplitudes, phases, spec=None, loop=None,
                 envelope=None):
        times = np.asarray(times, dtype=float)
        amplitudes = np.asarray(amplitudes, dtype=float)
        phases = np.asarray(phases, dtype=float)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("need a 1-D time grid with at least two samples")
        dt = np.diff(times)
        if times[0] != 0.0 or np.any(dt <= 0):
            raise ValueError("time grid must start at 0 and increase")
        if np.abs(dt - dt[0]).max() > 1e-9 * dt[0] + 1e-18:
            raise ValueError("time grid must be uniform")
        if amplitudes.shape != (3, times.size) or phases.shape != (3, times.size):
            raise ValueError("amplitudes and phases must have shape (3, len(times))")
        if not (np.isfinite(amplitudes).all() and np.isfinite(phases).all()):
            raise ValueError("non-finite schedule samples")
        self.times = times
        self.amplitudes = amplitudes
        self.phases = phases
        self.spec = spec
        self.loop = loop
        self.envelope = envelope

    @property
    def duration(self):
        return float(self.times[-1])

    @property
    def n_samples(self):
        return self.times.size - 1

    @property
    def peak_amplitude(self):
        composite = np.hypot(self.amplitudes[0], self.amplitudes[1])
        return float(max(composite.max(), np.abs(self.amplitudes[2]).max()))

    def complex_envelopes(self, t):
        """Per-tone complex drives c_j(t) = Omega_j e^{-i phi_j}, shape (len, 3)."""
        if self.envelope is not None:
            return self.envelope(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        c = self.amplitudes * np.exp(-1j * self.phases)
        out = np.empty((t.size, 3), dtype=complex)
        for j in range(3):
            out[:, j] = np.interp(t, self.times, c[j].real) \
                + 1j * np.interp(t, self.times, c[j].imag)
        return out

    def scaled(self, factor):
        env = self.envelope
        scaled_env = None if env is None else (lambda t: factor * env(t))
        return PulseSchedule(self.times, factor * self.amplitudes, self.phases,
                             spec=self.spec, loop=self.loop, envelope=scaled_env)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t_s", "omega0_rad_s", "omega1_rad_s",
                             "omega2_rad_s", "phi0_rad", "phi1_rad", "phi2_rad"])
            for k in range(self.times.size):
                row = [self.times[k], *self.amplitudes[:, k], *self.phases[:, k]]
                writer.writerow([f"{v:.12g}" for v in row])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header[:1] != ["t_s"] or len(header) != 7:
                raise ValueError(f"unexpected schedule header: {header}")
            rows = np.array([[float(v) for v in row] for row in reader])
        return cls(rows[:, 0], rows[:, 1:4].T, rows[:, 4:7].T)


def synthesize(spec, n_samples=DEFAULT_N_SAMPLES):
    """Full two-interval schedule realizing the gate described by `spec`.

    The first interval drives with phi_0 = 0; over the second both bright
    tones are shifted by -gamma so that the bright/dark frame (set by
    phi = phi_0 - phi_1 + pi) is unchanged while the loop phase jumps.
    phi_2 = 0 throughout.
    """
    if n_samples < 100 or n_samples % 2:
        raise ValueError("n_samples must be even and at least 100")
    duration = spec.resolve_duration()
    loop = LoopSchedule(duration, spec.eta, spec.gamma)
    times = np.linspace(0.0, duration, n_samples + 1)

    omega, omega2 = control_amplitudes(times, duration, spec.eta)
    phi0_t = loop.phi0_at(times)
    amplitudes = np.empty((3, times.size))
    phases = np.empty((3, times.size))
    amplitudes[0] = omega * np.sin(spec.theta / 2.0)
    amplitudes[1] = omega * np.cos(spec.theta / 2.0)
    amplitudes[2] = omega2
    phases[0] = phi0_t
    phases[1] = phi0_t - spec.phi + np.pi
    phases[2] = 0.0

    sin_half, cos_half = np.sin(spec.theta / 2.0), np.cos(spec.theta / 2.0)
    phi_off = np.pi - spec.phi

    def envelope(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        om, om2 = control_amplitudes(t, duration, spec.eta)
        ph0 = loop.phi0_at(t)
        out = np.empty((t.size, 3), dtype=complex)
        out[:, 0] = om * sin_half * np.exp(-1j * ph0)
        out[:, 1] = om * cos_half * np.exp(-1j * (ph0 + phi_off))
        out[:, 2] = om2
        return out

    return PulseSchedule(times, amplitudes, phases, spec=spec, loop=loop,
                         envelope=envelope)


def inject_rabi_error(schedule, epsilon):
    """Schedule with every tone amplitude scaled by (1 + epsilon)."""
    if abs(epsilon) >= 1:
        raise ValueError("|epsilon| must be below 1")
    return schedule.scaled(1.0 + epsilon)

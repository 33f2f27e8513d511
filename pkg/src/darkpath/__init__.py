"""Pulse-level laboratory for dark-path holonomic gates on a four-level ion.

The package synthesizes the two-tone square-pulse-free loops that steer a
qubit along a pair of dark states, integrates the resulting Schrodinger or
Lindblad dynamics with a high-order commutator-free scheme, and layers the
standard characterization stack on top: process tomography with maximum
likelihood reconstruction, randomized benchmarking, Rabi-error robustness
sweeps, and a spin-phonon controlled-phase extension.
"""

from ._engine import BACKEND, backend_name
from .core import (DensityMatrix, Operator, StateVector, operator_fidelity,
                   partial_trace, pauli_decompose, pauli_reconstruct,
                   state_fidelity, tensor)
from .pulses import (GateSpec, LoopSchedule, PulseSchedule, alpha_of, beta_of,
                     control_amplitudes, inject_rabi_error, solve_duration,
                     split_bright, synthesize)
from .dynamics import (FrameStates, HamiltonianModel, NoiseModel,
                       dark_path_state, frame_states, hamiltonian_at,
                       population_trace, propagate_lindblad,
                       propagate_unitary, sampled_population_trace)
from .gates import (GateChannel, NAMED_GATE_ANGLES, QubitChannel,
                    RealizedGate, gate_fidelity, named_gate, realize,
                    realize_schedule, target_unitary)
from .tomography import (ProcessMatrix, QPTResult, ShotConfig, basis_states,
                         qpt, sample_measurement, state_mle)
from .rb import (CliffordElement, FitResult, RBConfig, RBResult,
                 clifford_group, fit_decay, ideal_clifford_channels,
                 rb_fidelities, rb_run)
from .robustness import SweepPoint, robustness_sweep
from .ionphonon import (CZResult, CZSubspace, SpinPhononModel,
                        blue_sideband_frequency, controlled_phase_gate,
                        effective_cz_hamiltonian, sideband_hamiltonian)
from .config import ConfigError, ExperimentConfig, load_config

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "backend_name", "__version__",
    "StateVector", "DensityMatrix", "Operator", "tensor",
    "operator_fidelity", "state_fidelity", "pauli_decompose",
    "pauli_reconstruct", "partial_trace",
    "GateSpec", "LoopSchedule", "PulseSchedule", "alpha_of", "beta_of",
    "control_amplitudes", "solve_duration", "split_bright", "synthesize",
    "inject_rabi_error",
    "HamiltonianModel", "NoiseModel", "FrameStates", "hamiltonian_at",
    "propagate_unitary", "propagate_lindblad", "dark_path_state",
    "frame_states", "population_trace", "sampled_population_trace",
    "RealizedGate", "QubitChannel", "GateChannel", "target_unitary",
    "named_gate", "realize", "realize_schedule", "gate_fidelity",
    "NAMED_GATE_ANGLES",
    "ShotConfig", "ProcessMatrix", "QPTResult", "basis_states",
    "sample_measurement", "state_mle", "qpt",
    "CliffordElement", "RBConfig", "RBResult", "FitResult",
    "clifford_group", "fit_decay", "ideal_clifford_channels",
    "rb_run", "rb_fidelities",
    "SweepPoint", "robustness_sweep",
    "SpinPhononModel", "CZSubspace", "CZResult", "sideband_hamiltonian",
    "blue_sideband_frequency", "effective_cz_hamiltonian",
    "controlled_phase_gate",
    "ExperimentConfig", "ConfigError", "load_config",
]

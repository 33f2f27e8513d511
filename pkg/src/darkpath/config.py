"""Experiment configuration: JSON file with nested keys, schema-validated.

Every run resolves a full configuration (user values over defaults) and
writes the resolved copy next to the results, so outputs are reproducible
from the emitted files alone.  All physical quantities are SI: seconds,
rad/s, angles in radians.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .gates import NAMED_GATE_ANGLES


class ConfigError(ValueError):
    pass


_DEFAULT_EPSILONS = tuple(round(0.02 * k, 10) for k in range(-5, 6))


@dataclass(frozen=True)
class ExperimentConfig:
    gates: tuple = ("X", "H", "T", "S")
    etas: tuple = (0.0, 4.0)
    peak_rabi: float = 2.0 * np.pi * 1.0e4
    n_samples: int = 4096
    tol: float = 1e-9
    t2: float | None = None
    depolarizing: float = 0.0
    shots: int = 2000
    seed: int = 12345
    epsilons: tuple = _DEFAULT_EPSILONS
    population_gates: tuple = ("X", "H")
    qpt_seeds: int = 20
    rb_lengths: tuple = (1, 2, 4, 8, 16, 32)
    rb_sequences: int = 20
    rb_interleaved: str | None = None
    cz_gamma: float = float(np.pi)
    cz_eta: float = 4.0
    fock: int = 5

    def __post_init__(self):
        gate_names = set(NAMED_GATE_ANGLES)
        for name in ("gates", "population_gates"):
            values = tuple(getattr(self, name))
            if not values or not set(values) <= gate_names:
                raise ConfigError(f"{name} must be a non-empty subset of "
                                  f"{sorted(gate_names)}, got {values}")
            object.__setattr__(self, name, values)
        etas = tuple(float(e) for e in self.etas)
        if not etas or any(e < 0 or not np.isfinite(e) for e in etas):
            raise ConfigError(f"etas must be finite and >= 0, got {etas}")
        object.__setattr__(self, "etas", etas)
        if self.peak_rabi <= 0:
            raise ConfigError("peak_rabi must be positive")
        if self.n_samples < 100 or self.n_samples % 2:
            raise ConfigError("n_samples must be even and at least 100")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")
        if self.t2 is not None and self.t2 <= 0:
            raise ConfigError("t2 must be positive or null")
        if not 0.0 <= self.depolarizing < 1.0:
            raise ConfigError("depolarizing must be in [0, 1)")
        if self.shots < 1:
            raise ConfigError("shots must be >= 1")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        epsilons = tuple(float(e) for e in self.epsilons)
        if any(abs(e) >= 1 for e in epsilons):
            raise ConfigError("epsilons must satisfy |epsilon| < 1")
        object.__setattr__(self, "epsilons", epsilons)
        if self.qpt_seeds < 1:
            raise ConfigError("qpt_seeds must be >= 1")
        lengths = tuple(int(m) for m in self.rb_lengths)
        if not lengths or any(m < 1 for m in lengths) \
                or any(b <= a for a, b in zip(lengths, lengths[1:])):
            raise ConfigError("rb_lengths must be strictly increasing positives")
        object.__setattr__(self, "rb_lengths", lengths)
        if self.rb_sequences < 1:
            raise ConfigError("rb_sequences must be >= 1")
        if self.rb_interleaved is not None and self.rb_interleaved not in gate_names:
            raise ConfigError(f"rb_interleaved must be null or one of "
                              f"{sorted(gate_names)}")
        if not np.isfinite(self.cz_gamma):
            raise ConfigError("cz_gamma must be finite")
        if self.cz_eta < 0 or not np.isfinite(self.cz_eta):
            raise ConfigError("cz_eta must be finite and >= 0")
        if self.fock < 2:
            raise ConfigError("fock must be >= 2")

    def resolved(self):
        """Nested dict with every default made explicit."""
        return {
            "gates": list(self.gates),
            "etas": list(self.etas),
            "peak_rabi": self.peak_rabi,
            "n_samples": self.n_samples,
            "tol": self.tol,
            "noise": {"t2": self.t2, "depolarizing": self.depolarizing},
            "shots": self.shots,
            "seed": self.seed,
            "sweep": {"epsilons": list(self.epsilons)},
            "populations": {"gates": list(self.population_gates)},
            "qpt": {"seeds": self.qpt_seeds},
            "rb": {"lengths": list(self.rb_lengths),
                   "sequences": self.rb_sequences,
                   "interleaved": self.rb_interleaved},
            "cz": {"gamma": self.cz_gamma, "eta": self.cz_eta, "fock": self.fock},
        }


_SCALARS = {
    "peak_rabi": (int, float),
    "n_samples": (int,),
    "tol": (int, float),
    "shots": (int,),
    "seed": (int,),
}

_NESTED = {
    "noise": {"t2": "t2", "depolarizing": "depolarizing"},
    "sweep": {"epsilons": "epsilons"},
    "populations": {"gates": "population_gates"},
    "qpt": {"seeds": "qpt_seeds"},
    "rb": {"lengths": "rb_lengths", "sequences": "rb_sequences",
           "interleaved": "rb_interleaved"},
    "cz": {"gamma": "cz_gamma", "eta": "cz_eta", "fock": "fock"},
}


def config_from_dict(data):
    """Build and validate an ExperimentConfig from a (nested) plain dict."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    kwargs = {}
    for key, value in data.items():
        if key in ("gates", "etas"):
            if not isinstance(value, (list, tuple)):
                raise ConfigError(f"{key} must be a list")
            kwargs[key] = tuple(value)
        elif key in _SCALARS:
            if not isinstance(value, _SCALARS[key]) or isinstance(value, bool):
                raise ConfigError(f"{key} has wrong type {type(value).__name__}")
            kwargs[key] = value
        elif key in _NESTED:
            if not isinstance(value, dict):
                raise ConfigError(f"{key} must be an object")
            for sub, subval in value.items():
                try:
                    target = _NESTED[key][sub]
                except KeyError:
                    raise ConfigError(f"unknown key {key}.{sub}") from None
                if isinstance(subval, list):
                    subval = tuple(subval)
                kwargs[target] = subval
        else:
            raise ConfigError(f"unknown key {key!r}")
    try:
        return ExperimentConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err)) from None


def load_config(path):
    """Parse and validate a JSON config file."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as err:
            raise ConfigError(f"{path} is not valid JSON: {err}") from None
    return config_from_dict(data)


def write_resolved(config, path):
    with open(path, "w") as fh:
        json.dump(config.resolved(), fh, indent=2, sort_keys=True)
        fh.write("\n")

"""Command-line front end: one subcommand per experiment, deterministic files.

Every subcommand reads an optional JSON config, writes plot-ready CSV files
plus the resolved config and a manifest (file hashes, seed, backend) into
the output directory, and returns a nonzero exit code in --check mode when
a quality threshold is missed.  Identical config and seed give byte
identical outputs regardless of --threads.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from ._engine import backend_name
from .config import (ConfigError, ExperimentConfig, config_from_dict,
                     load_config, write_resolved)
from .dynamics import (NoiseModel, population_trace, sampled_population_trace,
                       write_trajectory_csv, HamiltonianModel)
from .gates import (NAMED_GATE_ANGLES, QubitChannel, gate_fidelity, named_gate,
                    realize, target_unitary)
from .ionphonon import controlled_phase_gate
from .pulses import GateSpec, synthesize
from .rb import (RBConfig, clifford_group, rb_fidelities, rb_run, write_rb_csv,
                 write_rb_fit_json)
from .robustness import robustness_sweep, write_sweep_csv
from .tomography import ShotConfig, qpt, write_qpt_csv

GATE_FIDELITY_FLOOR = 1.0 - 1e-6
LEAKAGE_CEILING = 1e-6
CZ_TOLERANCE = 1e-4


def _fmt_eta(eta):
    return f"{eta:g}".replace(".", "p").replace("-", "m")


def _mapper(threads):
    if threads <= 1:
        return map, None
    pool = ThreadPoolExecutor(max_workers=threads)
    return pool.map, pool


def _noise_from(cfg):
    return None if cfg.t2 is None else NoiseModel.dephasing(cfg.t2)


def _write_manifest(out_dir, command, cfg, files):
    hashes = {}
    for name in sorted(files):
        digest = hashlib.sha256((out_dir / name).read_bytes()).hexdigest()
        hashes[name] = digest
    manifest = {"command": command, "version": __version__,
                "backend": backend_name(), "seed": cfg.seed, "files": hashes}
    with open(out_dir / "run_manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_gates(cfg, out_dir, check, threads):
    units = [(gate, eta) for gate in cfg.gates for eta in cfg.etas]

    def run(unit):
        gate, eta = unit
        spec = named_gate(gate, eta, peak_rabi=cfg.peak_rabi)
        realized = realize(spec, tol=cfg.tol, n_samples=cfg.n_samples)
        target = target_unitary(*NAMED_GATE_ANGLES[gate])
        return (gate, eta, realized.duration, gate_fidelity(realized, target),
                realized.leakage)

    map_fn, pool = _mapper(threads)
    try:
        rows = list(map_fn(run, units))
    finally:
        if pool:
            pool.shutdown()

    with open(out_dir / "gates.csv", "w", newline="") as fh:
        fh.write("gate,eta,T_s,fidelity,leakage\n")
        for gate, eta, t_s, fid, leak in rows:
            fh.write(f"{gate},{eta:.12g},{t_s:.12g},{fid:.12g},{leak:.12g}\n")

    failed = [r for r in rows if r[3] < GATE_FIDELITY_FLOOR or r[4] > LEAKAGE_CEILING]
    if check and failed:
        for gate, eta, _, fid, leak in failed:
            print(f"check failed: {gate} eta={eta:g} fidelity={fid:.9f} "
                  f"leakage={leak:.3g}", file=sys.stderr)
        return ["gates.csv"], 1
    return ["gates.csv"], 0


def cmd_populations(cfg, out_dir, check, threads):
    files = []
    noise = _noise_from(cfg)
    for gi, gate in enumerate(cfg.population_gates):
        for ei, eta in enumerate(cfg.etas):
            spec = named_gate(gate, eta, peak_rabi=cfg.peak_rabi)
            model = HamiltonianModel(synthesize(spec, n_samples=cfg.n_samples))
            psi0 = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
            times, pops = population_trace(psi0, model)
            stem = f"populations_{gate}_eta{_fmt_eta(eta)}"
            write_trajectory_csv(out_dir / f"{stem}.csv", times, pops)
            files.append(f"{stem}.csv")

            seed = np.random.SeedSequence(cfg.seed, spawn_key=(gi, ei))
            sampled = sampled_population_trace(
                pops, cfg.shots, seed.generate_state(2).tolist())
            write_trajectory_csv(out_dir / f"{stem}_sampled.csv", times, sampled)
            files.append(f"{stem}_sampled.csv")

            if noise is not None:
                _, noisy = population_trace(psi0, model, noise=noise)
                write_trajectory_csv(out_dir / f"{stem}_dephased.csv", times, noisy)
                files.append(f"{stem}_dephased.csv")
    return files, 0


def cmd_qpt(cfg, out_dir, check, threads):
    files = []
    summary = []
    exit_code = 0
    for gate in cfg.gates:
        target = target_unitary(*NAMED_GATE_ANGLES[gate])
        for eta in cfg.etas:
            spec = named_gate(gate, eta, peak_rabi=cfg.peak_rabi)
            realized = realize(spec, tol=cfg.tol, n_samples=cfg.n_samples)
            exact = qpt(realized, cfg=None, target=target)
            sampled_fids = []
            for k in range(cfg.qpt_seeds):
                shot_cfg = ShotConfig(cfg.shots, cfg.seed + k)
                sampled_fids.append(qpt(realized, cfg=shot_cfg,
                                        target=target).fidelity)
            name = f"qpt_{gate}_eta{_fmt_eta(eta)}.csv"
            write_qpt_csv(out_dir / name, exact.chi, exact.fidelity)
            files.append(name)
            summary.append((gate, eta, exact.fidelity,
                            float(np.mean(sampled_fids)),
                            float(np.std(sampled_fids, ddof=1))
                            if len(sampled_fids) > 1 else 0.0))
            if check and exact.fidelity < 1.0 - 1e-6:
                exit_code = 1
                print(f"check failed: qpt {gate} eta={eta:g} "
                      f"F={exact.fidelity:.9f}", file=sys.stderr)

    with open(out_dir / "qpt_summary.csv", "w", newline="") as fh:
        fh.write("gate,eta,fidelity_exact,fidelity_sampled_mean,"
                 "fidelity_sampled_std\n")
        for gate, eta, fe, fm, fs in summary:
            fh.write(f"{gate},{eta:.12g},{fe:.12g},{fm:.12g},{fs:.12g}\n")
    files.append("qpt_summary.csv")
    return files, exit_code


def _realized_clifford_channels(cfg, eta, threads):
    elements = clifford_group()

    def run(elem):
        theta, phi, gamma = elem.loop_angles
        if gamma == 0.0:
            return QubitChannel.from_unitary(np.eye(2, dtype=complex))
        spec = GateSpec(theta, phi, gamma, eta, peak_rabi=cfg.peak_rabi)
        realized = realize(spec, tol=cfg.tol, n_samples=cfg.n_samples)
        return realized.qubit_channel()

    map_fn, pool = _mapper(threads)
    try:
        channels = list(map_fn(run, elements))
    finally:
        if pool:
            pool.shutdown()
    if cfg.depolarizing > 0.0:
        depol = QubitChannel.depolarizing(cfg.depolarizing)
        channels = [ch.then(depol) for ch in channels]
    return channels


def cmd_rb(cfg, out_dir, check, threads):
    files = []
    exit_code = 0
    for eta in cfg.etas:
        channels = _realized_clifford_channels(cfg, eta, threads)
        rb_cfg = RBConfig(cfg.rb_lengths, cfg.rb_sequences, seed=cfg.seed)
        ref = rb_run(rb_cfg, channels)
        stem = f"rb_eta{_fmt_eta(eta)}"
        write_rb_csv(out_dir / f"{stem}.csv", ref)
        f_ave, _ = rb_fidelities(ref.fit.r)
        write_rb_fit_json(out_dir / f"{stem}_fit.json", ref, {"F_ave": f_ave})
        files += [f"{stem}.csv", f"{stem}_fit.json"]

        if cfg.rb_interleaved is not None:
            gate = cfg.rb_interleaved
            realized = realize(named_gate(gate, eta, peak_rabi=cfg.peak_rabi),
                               tol=cfg.tol, n_samples=cfg.n_samples)
            int_channel = realized.qubit_channel()
            if cfg.depolarizing > 0.0:
                int_channel = int_channel.then(
                    QubitChannel.depolarizing(cfg.depolarizing))
            target = target_unitary(*NAMED_GATE_ANGLES[gate])
            inter = rb_run(RBConfig(cfg.rb_lengths, cfg.rb_sequences,
                                    interleaved=gate, seed=cfg.seed + 1),
                           channels, interleaved=(target.entries, int_channel))
            _, f_gate = rb_fidelities(ref.fit.r, inter.fit.r)
            write_rb_csv(out_dir / f"{stem}_interleaved_{gate}.csv", inter)
            write_rb_fit_json(out_dir / f"{stem}_interleaved_{gate}_fit.json",
                              inter, {"F_ave": f_ave, "F_gate": f_gate})
            files += [f"{stem}_interleaved_{gate}.csv",
                      f"{stem}_interleaved_{gate}_fit.json"]

        if check and cfg.depolarizing == 0.0 and cfg.t2 is None \
                and ref.fit.r < 0.9999:
            exit_code = 1
            print(f"check failed: rb eta={eta:g} r={ref.fit.r:.6f}",
                  file=sys.stderr)
    return files, exit_code


def cmd_sweep(cfg, out_dir, check, threads):
    map_fn, pool = _mapper(threads)
    try:
        rows = robustness_sweep(cfg.gates, cfg.etas, cfg.epsilons,
                                cfg.peak_rabi, tol=cfg.tol,
                                n_samples=cfg.n_samples, map_fn=map_fn)
        files = ["sweep.csv"]
        write_sweep_csv(out_dir / "sweep.csv", rows)
        noise = _noise_from(cfg)
        if noise is not None:
            noisy = robustness_sweep(cfg.gates, cfg.etas, cfg.epsilons,
                                     cfg.peak_rabi, noise=noise, tol=cfg.tol,
                                     n_samples=cfg.n_samples, map_fn=map_fn)
            write_sweep_csv(out_dir / "sweep_dephased.csv", noisy)
            files.append("sweep_dephased.csv")
    finally:
        if pool:
            pool.shutdown()

    exit_code = 0
    if check:
        zero = {(r.gate, r.eta): r.fidelity for r in rows if r.epsilon == 0.0}
        bad = [r for r in rows if r.fidelity > zero.get((r.gate, r.eta), 1.0) + 1e-9]
        if bad:
            exit_code = 1
            print(f"check failed: {len(bad)} sweep points above epsilon=0",
                  file=sys.stderr)
    return files, exit_code


def cmd_cz(cfg, out_dir, check, threads):
    result = controlled_phase_gate(cfg.cz_gamma, peak_rabi=cfg.peak_rabi,
                                   eta=cfg.cz_eta, tol=cfg.tol)
    with open(out_dir / "cz.csv", "w", newline="") as fh:
        fh.write("block,row,c0,c1,c2,c3\n")
        for name, part in (("real", result.block.real), ("imag", result.block.imag)):
            for r in range(4):
                fh.write(f"{name},{r}," +
                         ",".join(f"{v:.12g}" for v in part[r]) + "\n")
    target = np.diag([1.0, 1.0, 1.0, np.exp(1j * cfg.cz_gamma)])
    distance = float(np.abs(result.block - target).max())
    summary = {"gamma": cfg.cz_gamma, "eta": cfg.cz_eta,
               "duration_s": result.duration, "leakage": result.leakage,
               "max_deviation": distance}
    with open(out_dir / "cz_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    exit_code = 0
    if check and (distance > CZ_TOLERANCE or result.leakage > LEAKAGE_CEILING):
        exit_code = 1
        print(f"check failed: cz deviation={distance:.3g} "
              f"leakage={result.leakage:.3g}", file=sys.stderr)
    return ["cz.csv", "cz_summary.json"], exit_code


_COMMANDS = {
    "gates": cmd_gates,
    "populations": cmd_populations,
    "qpt": cmd_qpt,
    "rb": cmd_rb,
    "sweep": cmd_sweep,
    "cz": cmd_cz,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="darkpath",
        description="Pulse-level simulator for dark-path holonomic gates")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", type=Path, default=None,
                       help="JSON config file (defaults used when omitted)")
        p.add_argument("--out", type=Path, default=Path("darkpath_out"),
                       help="output directory (created if missing)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--check", action="store_true",
                       help="exit nonzero when quality thresholds are missed")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for independent units")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            resolved = cfg.resolved()
            resolved["seed"] = args.seed
            cfg = config_from_dict(resolved)
    except (ConfigError, OSError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2

    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    write_resolved(cfg, out_dir / "resolved_config.json")
    files, exit_code = _COMMANDS[args.command](cfg, out_dir, args.check,
                                               args.threads)
    _write_manifest(out_dir, args.command, cfg, list(files)
                    + ["resolved_config.json"])
    return exit_code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``msta evolve|tides|conserved|oracle-check``.

Time series go out as CSV and reports as JSON.  All times are in units of
``1/d`` where ``d`` is the first nonzero pair coupling, and energies are in
units of ``d``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .density import GEOMETRIES, density_from_spinor, random_env_sampled, tides_scan, von_neumann_entropy
from .dynamics import (
    Trajectory,
    action_matrix,
    apply,
    energy,
    propagator_eigen,
    propagator_factored,
    propagator_series,
    spin_trajectory,
)
from .ga import EVEN_CODES, Multivector, split_index
from .hamiltonians import HamiltonianSpec, chain_spec, hamiltonian_sum, two_spin_spec
from .spin import Spinor, amplitudes_from_spinor, spin_bivector, spinor_from_amplitudes
from .symmetries import commutant_dimension, conserved_set_two_spin, total_spin_square

COMMANDS = ("evolve", "tides", "conserved", "oracle-check")
PRESETS = ("zz", "xz", "antiparallel-z", "xx")
ORACLE_TOL = 1e-10

_DEFAULTS = {
    "evolve": {"t_max": 10.0, "samples": 1001},
    "tides": {"t_max": 12.0, "samples": 241},
    "conserved": {"t_max": 20.0, "samples": 201},
    "oracle-check": {"t_max": 10.0, "samples": 9},
}

_Z = (0.0, 0.0, 1.0)

_QUBIT = {
    "up": np.array([1.0, 0.0], dtype=complex),
    "down": np.array([0.0, 1.0], dtype=complex),
    "x": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
}


def preset_factors(name: str, n: int) -> list[str]:
    """Single-qubit factors of a named product state.

    ``zz`` all up, ``xx`` all along +x, ``xz`` spin 1 along +x and the rest up,
    ``antiparallel-z`` spin 1 down and the rest up.  For two spins these are the
    amplitude lists ``(1,0,0,0)``, ``(1,1,1,1)/2``, ``(1,0,1,0)/sqrt2`` and ``(0,0,1,0)``.
    """
    if name == "zz":
        return ["up"] * n
    if name == "xx":
        return ["x"] * n
    if name == "xz":
        return ["x"] + ["up"] * (n - 1)
    if name == "antiparallel-z":
        return ["down"] + ["up"] * (n - 1)
    raise ValueError(f"unknown preset {name!r}; choose from {PRESETS}")


def preset_amplitudes(name: str, n: int) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for f in preset_factors(name, n):
        out = np.kron(out, _QUBIT[f])
    return out


def parse_state(text, n: int) -> np.ndarray:
    """Preset name, or a comma-separated list of ``2**n`` (possibly complex) amplitudes."""
    if isinstance(text, (list, tuple)):
        amps = np.array([complex(x) if not isinstance(x, list) else complex(*x) for x in text])
    elif text in PRESETS:
        return preset_amplitudes(text, n)
    else:
        try:
            amps = np.array([complex(tok.strip().replace(" ", "")) for tok in str(text).split(",")])
        except ValueError as exc:
            raise ValueError(f"state must be a preset {PRESETS} or a list of amplitudes: {exc}") from None
    if amps.size != 2**n:
        raise ValueError(f"expected {2**n} amplitudes for n={n}, got {amps.size}")
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError("amplitudes are all zero")
    return amps / norm


def parse_axis(text) -> tuple:
    if isinstance(text, (list, tuple)):
        v = np.array(text, dtype=float)
    elif text in ("x", "y", "z"):
        v = np.eye(3)["xyz".index(text)]
    else:
        v = np.array([float(tok) for tok in str(text).split(",")])
    if v.shape != (3,) or not np.linalg.norm(v):
        raise ValueError(f"axis must be x, y, z or three comma-separated numbers, got {text!r}")
    return tuple(float(c) for c in v / np.linalg.norm(v))


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int = 2
    spec: HamiltonianSpec = field(default_factory=two_spin_spec)
    state: str | tuple = "xz"
    t_max: float = 10.0
    samples: int = 1001
    out: str | None = None
    seed: int = 0
    geometry: str = "equator"
    mc_samples: int = 0
    negative_control: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.samples < 2:
            raise ValueError("samples must be at least 2")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.spec.n != self.n:
            raise ValueError(f"Hamiltonian is for n={self.spec.n} but n={self.n}")
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"geometry must be one of {GEOMETRIES}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.samples)

    def amplitudes(self) -> np.ndarray:
        return parse_state(self.state, self.n)


def _build_config(args: argparse.Namespace) -> RunConfig:
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    n = args.n if args.n is not None else int(data.get("n", 2))
    if args.d is not None or args.axis is not None or "hamiltonian" not in data:
        d = args.d if args.d is not None else 1.0
        axis = parse_axis(args.axis) if args.axis is not None else _Z
        spec = chain_spec(n, d, axis) if n >= 2 else HamiltonianSpec(n=n)
    else:
        spec = HamiltonianSpec.from_dict(n, data["hamiltonian"])
    defaults = _DEFAULTS[args.command]

    def pick(name, key=None, default=None):
        value = getattr(args, name)
        if value is not None:
            return value
        return data.get(key or name, defaults.get(name, default))

    state = pick("state", default="xz")
    if isinstance(state, list):
        state = tuple(state)
    return RunConfig(
        command=args.command,
        n=n,
        spec=spec,
        state=state,
        t_max=float(pick("tmax", "t_max", defaults["t_max"])),
        samples=int(pick("samples")),
        out=pick("out"),
        seed=int(pick("seed", default=0)),
        geometry=pick("geometry", default="equator"),
        mc_samples=int(pick("mc_samples", default=0)),
        negative_control=bool(args.negative_control),
    )


def _fmt(x: float) -> str:
    s = f"{float(x):.12g}"
    return "0" if s == "-0" else s


def trajectory_header(n: int) -> list[str]:
    cols = ["t"] + [f"p{a}{k}" for a in range(1, n + 1) for k in "xyz"]
    return cols + [f"norm{a}" for a in range(1, n + 1)] + ["theta", "energy"]


def trajectory_csv(traj: Trajectory) -> str:
    n = traj.p.shape[1]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(trajectory_header(n))
    for i, t in enumerate(traj.times):
        row = [t, *traj.p[i].ravel(), *traj.lengths[i], traj.theta[i, 0], traj.energy[i]]
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def read_trajectory_csv(text: str) -> Trajectory:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    n = sum(1 for h in header if h.startswith("norm"))
    if header != trajectory_header(n):
        raise ValueError("not a trajectory CSV")
    T = body.shape[0]
    lengths = body[:, 1 + 3 * n : 1 + 4 * n]
    theta = np.repeat(body[:, -2:-1], n, axis=1)
    return Trajectory(
        times=body[:, 0],
        p=body[:, 1 : 1 + 3 * n].reshape(T, n, 3),
        lengths=lengths,
        theta=theta,
        energy=body[:, -1],
    )


def run_evolve(cfg: RunConfig) -> str:
    psi0 = spinor_from_amplitudes(cfg.amplitudes())
    H = hamiltonian_sum(cfg.spec)
    traj = spin_trajectory(psi0, H, cfg.times, rate=cfg.spec.reference_rate)
    return trajectory_csv(traj)


def run_tides(cfg: RunConfig) -> str:
    rows = tides_scan(cfg.geometry, cfg.times)
    if cfg.mc_samples:
        k = 0 if cfg.geometry == "equator" else 2
        p0 = np.eye(3)[k]
        sampled = random_env_sampled(p0, 1.0, cfg.times, cfg.mc_samples, cfg.seed)[:, k]
        rows = [(t, float(s), von_neumann_entropy(min(abs(float(s)), 1.0))) for (t, _, _), s in zip(rows, sampled)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "signed_length", "entropy_bits"])
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def conserved_report(cfg: RunConfig) -> dict:
    if cfg.n != 2:
        raise ValueError("the conserved-quantity analysis is for two spins")
    H = hamiltonian_sum(cfg.spec)
    rate = cfg.spec.reference_rate
    psi0 = spinor_from_amplitudes(cfg.amplitudes())
    quantities = conserved_set_two_spin(H=H)
    states = [apply(propagator_series(H, t / rate), psi0) for t in cfg.times]
    report = []
    for q in quantities:
        values = np.array([q.charge(s) for s in states])
        report.append({"name": q.name, "initial": float(values[0]), "max_drift": float(np.max(np.abs(values - values[0])))})
    ss = np.array([total_spin_square(s) for s in states])
    return {
        "commutant_dimension": commutant_dimension(H),
        "quantities": report,
        "spin_square_peak_to_peak": float(ss.max() - ss.min()),
        "t_max": cfg.t_max,
        "samples": cfg.samples,
    }


def run_conserved(cfg: RunConfig) -> str:
    return json.dumps(conserved_report(cfg), indent=2, sort_keys=True) + "\n"


def _random_even(n: int, rng) -> Multivector:
    c = np.zeros(8**n)
    for i in range(8**n):
        if all(code in EVEN_CODES for code in split_index(i, n)):
            c[i] = rng.normal()
    return Multivector(n, c)


def _random_state(n: int, rng) -> Spinor:
    a = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return spinor_from_amplitudes(a / np.linalg.norm(a))


def oracle_checks(cfg: RunConfig) -> dict:
    """Equivalence suite between the algebra and the matrix oracle; maps check name to max deviation."""
    n = cfg.n
    rng = np.random.default_rng(cfg.seed)
    H = hamiltonian_sum(cfg.spec)
    Hmat = oracle.spec_matrix(cfg.spec)
    rate = cfg.spec.reference_rate
    sign = -1.0 if cfg.negative_control else 1.0
    dev = {}

    pairs = [(_random_even(n, rng), _random_even(n, rng)) for _ in range(3)]
    dev["homomorphism"] = max(
        np.abs(oracle.to_matrix(a * b) - oracle.to_matrix(a) @ oracle.to_matrix(b)).max() for a, b in pairs
    )
    dev["hamiltonian_image"] = float(np.abs(oracle.to_matrix(H) - Hmat).max())

    states = [_random_state(n, rng) for _ in range(3)]
    amps = [amplitudes_from_spinor(s) for s in states]
    dev["state_map"] = max(np.abs(oracle.to_vector(s) - a).max() for s, a in zip(states, amps))

    inter, unit, pol, ener = 0.0, 0.0, 0.0, 0.0
    dens = 0.0
    eye = np.eye(2 ** (n + 1))
    for t in cfg.times:
        U = propagator_series(H, sign * t / rate)
        M = action_matrix(U, n)
        unit = max(unit, np.abs(M.T @ M - eye).max())
        for s, a in zip(states, amps):
            psi_t = apply(U, s)
            v = oracle.matrix_evolve(a, Hmat, t / rate)
            inter = max(inter, np.abs(oracle.to_vector(psi_t) - v).max())
            rho_m = oracle.projector(v)
            p = spin_bivector(psi_t).p
            for k in range(1, n + 1):
                pol = max(pol, np.abs(p[k - 1] - oracle.bloch_vector(oracle.partial_trace(rho_m, k, n))).max())
            ener = max(ener, abs(energy(psi_t, H) - oracle.expectation(v, Hmat)))
            rho = density_from_spinor(psi_t)
            dens = max(dens, np.abs(oracle.to_matrix(rho.value) / 2**n - rho_m).max())
    dev.update(intertwining=inter, unitarity=unit, polarization=pol, energy=ener, density=dens)

    single_pair = n == 2 and len(cfg.spec.pairs) == 1 and not cfg.spec.zeeman
    if single_pair:
        pair = cfg.spec.pairs[0]
        forms = 0.0
        for t in cfg.times:
            tt = sign * t / rate
            series = action_matrix(propagator_series(H, tt), 2)
            forms = max(forms, np.abs(action_matrix(propagator_factored(2, pair.d, tt, pair.axis), 2) - series).max())
            if np.allclose(pair.axis, _Z):
                forms = max(forms, np.abs(action_matrix(propagator_eigen(pair.d, tt), 2) - series).max())
        dev["propagator_forms"] = forms
    return {k: float(v) for k, v in dev.items()}


def oracle_report(cfg: RunConfig) -> tuple[dict, bool]:
    dev = oracle_checks(cfg)
    checks = [{"name": k, "max_deviation": v, "pass": bool(v < ORACLE_TOL)} for k, v in dev.items()]
    ok = all(c["pass"] for c in checks)
    return {"checks": checks, "n": cfg.n, "pass": ok, "tolerance": ORACLE_TOL}, ok


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to a temporary file beside ``path`` and rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".msta-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="msta", description="Dipolar spin dynamics in the even multiparticle algebra.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--n", type=int, help="number of spins (default 2)")
        p.add_argument("--d", type=float, help="dipolar coupling of each nearest-neighbour pair")
        p.add_argument("--axis", help='internuclear axis: x, y, z or "x,y,z"')
        p.add_argument("--state", help=f"preset {'|'.join(PRESETS)} or comma-separated amplitudes")
        p.add_argument("--tmax", type=float, help="final time in units of 1/d")
        p.add_argument("--samples", type=int, help="number of time samples including t=0")
        p.add_argument("--geometry", choices=GEOMETRIES, help="tides geometry")
        p.add_argument("--mc-samples", dest="mc_samples", type=int, help="tides: Monte Carlo partner count (0 = analytic)")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--seed", type=int, help="seed for random sampling")
        p.add_argument("--negative-control", dest="negative_control", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _build_config(args)
        status = 0
        if cfg.command == "evolve":
            text = run_evolve(cfg)
        elif cfg.command == "tides":
            text = run_tides(cfg)
        elif cfg.command == "conserved":
            text = run_conserved(cfg)
        else:
            report, ok = oracle_report(cfg)
            text = json.dumps(report, indent=2, sort_keys=True) + "\n"
            status = 0 if ok else 1
    except (ValueError, OSError) as exc:
        print(f"msta: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())

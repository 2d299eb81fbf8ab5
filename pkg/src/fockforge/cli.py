"""``fockforge`` batch front end.

Usage::

    fockforge <spectrum|evolve|compare|measure|resources> --config PATH
              [--seed U64] [--out PATH] [--format tsv|csv]

Every command writes a delimited table preceded by ``#`` header lines
that carry the command, the config digest and the column names.

Exit codes: 0 success, 2 configuration error, 3 size-guard error.

Randomness: the 64-bit seed (``--seed`` or ``measurement.seed``) feeds a
:class:`numpy.random.SeedSequence`; its spawned children are consumed in a
fixed order (0: random observable, 1: random state, 2: shot sampling).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass, replace

import numpy as np

from fockforge import bridge, firstq, fock, measure, oracle
from fockforge.config import ConfigError, ExperimentConfig, load_config
from fockforge.lattice import (
    LatticeSpec,
    PotentialField,
    build_line_kinetic,
    build_ring_kinetic,
    coulomb_interaction,
    momentum_transform,
)
from fockforge.oracle import SizeGuardError

COMMANDS = ("spectrum", "evolve", "compare", "measure", "resources")
EXIT_OK, EXIT_CONFIG, EXIT_GUARD = 0, 2, 3


@dataclass
class Table:
    columns: list
    rows: list
    notes: list


@dataclass(frozen=True)
class Model:
    lattice: LatticeSpec
    particles: int
    kinetic: object
    potential: PotentialField
    pair: object

    @property
    def sites(self) -> int:
        return self.lattice.sites

    def second_quantized(self) -> fock.SecondQuantHamiltonian:
        return fock.SecondQuantHamiltonian.from_parts(self.kinetic, self.potential, self.pair)


def potential_profile(name, sites: int, scale: float) -> np.ndarray:
    p = np.arange(1, sites + 1, dtype=float)
    if isinstance(name, tuple):
        return np.array(name, dtype=float)
    if name == "zero":
        return np.zeros(sites)
    if name == "staggered":
        return scale * (-1.0) ** p
    if name == "linear":
        return scale * (p - 1)
    if name == "harmonic":
        return scale * (p - (sites + 1) / 2) ** 2
    raise ConfigError(f"unknown potential profile {name!r}", "hamiltonian.potential")


def build_model(cfg: ExperimentConfig) -> Model:
    lat = cfg.lattice
    try:
        spec = LatticeSpec(lat.sites, lat.geometry, lat.spacing)
    except ValueError as exc:
        raise ConfigError(str(exc), "lattice") from None
    ham = cfg.hamiltonian
    build = build_ring_kinetic if spec.geometry == "ring" else build_line_kinetic
    T = build(spec, ham.hopping)
    V = PotentialField(potential_profile(ham.potential, spec.sites, ham.potential_scale))
    W = coulomb_interaction(spec, ham.coulomb)
    return Model(spec, lat.particles, T, V, W)


def _guard_fock(M: int) -> None:
    if M > oracle.MAX_FOCK_MODES:
        raise SizeGuardError(f"2**{M} Fock space exceeds the M <= {oracle.MAX_FOCK_MODES} guard")


def _guard_first(M: int, N: int) -> None:
    if M**N > oracle.MAX_FIRST_QUANT_DIM:
        raise SizeGuardError(f"M**N = {M**N} exceeds the 2**20 guard")


def _sector_matrix(model: Model) -> np.ndarray:
    _guard_fock(model.sites)
    sector = fock.build_sector(model.sites, model.particles)
    return fock.build_hamiltonian_matrix(model.second_quantized(), sector)


# -- commands ---------------------------------------------------------------

def cmd_spectrum(cfg: ExperimentConfig, representation: str | None = None) -> Table:
    model = build_model(cfg)
    if representation is None:
        representation = "a1" if cfg.plan.algo == "a1" else "a2"
    spectra = {}
    if representation in ("a2", "both"):
        spectra["a2"] = oracle.exact_spectrum(_sector_matrix(model))
    if representation in ("a1", "both"):
        _guard_first(model.sites, model.particles)
        spectra["a1"] = oracle.first_quant_antisym_spectrum(
            model.sites, model.particles, model.kinetic, model.potential, model.pair)
    names = [k for k in ("a1", "a2") if k in spectra]
    rows = [[i] + [spectra[k][i] for k in names] for i in range(len(spectra[names[0]]))]
    notes = []
    if len(names) == 2:
        notes.append(f"max_deviation={_num(float(np.max(np.abs(spectra['a1'] - spectra['a2']))))}")
    return Table(["index"] + [f"energy_{k}" for k in names], rows, notes)


def cmd_evolve(cfg: ExperimentConfig) -> Table:
    model = build_model(cfg)
    plan_cfg = cfg.plan
    M, N = model.sites, model.particles
    dt, steps = plan_cfg.dt, plan_cfg.steps
    rows = []
    if plan_cfg.algo == "a1":
        _guard_first(M, N)
        if N == 0:
            raise ConfigError("first-quantized evolution needs at least one particle",
                              "lattice.particles")
        psi = firstq.localized_state(cfg.initial_sites, M)
        h = oracle.first_quant_hamiltonian_dense(M, N, model.kinetic, model.potential, model.pair)
        step_exact = oracle.dense_expm(h, dt)
        exact = psi.vector
        transform = momentum_transform(model.kinetic)
        plan = firstq.A1Plan(dt, 1, plan_cfg.splitting, plan_cfg.phase_bits)
        for k in range(steps + 1):
            if k:
                psi = firstq.evolve_a1(psi, plan, model.potential, model.pair, transform)
                exact = step_exact @ exact
            rows.append([k, k * dt, abs(np.vdot(exact, psi.vector))] + list(psi.occupations()))
    else:
        _guard_fock(M)
        sector = fock.build_sector(M, N)
        H = model.second_quantized()
        state = fock.FockState.basis(M, cfg.initial_sites)
        step_exact = oracle.dense_expm(fock.build_hamiltonian_matrix(H, sector), dt)
        exact = state.restrict(sector)
        mode = "online" if plan_cfg.algo == "a2-online" else "precomputed"
        bits = plan_cfg.phase_bits if mode == "online" else None
        plan = fock.A2Plan(dt, 1, plan_cfg.splitting, mode, bits)
        for k in range(steps + 1):
            if k:
                state = fock.evolve_a2(state, plan, H, model.lattice)
                exact = step_exact @ exact
            rows.append([k, k * dt, abs(np.vdot(exact, state.restrict(sector)))]
                        + list(state.occupations()))
    columns = ["step", "time", "fidelity"] + [f"n{p}" for p in range(1, M + 1)]
    return Table(columns, rows, [f"algo={plan_cfg.algo}", f"splitting={plan_cfg.splitting}"])


def cmd_compare(cfg: ExperimentConfig) -> Table:
    model = build_model(cfg)
    M, N = model.sites, model.particles
    if N == 0:
        raise ConfigError("comparison needs at least one particle", "lattice.particles")
    _guard_first(M, N)
    _guard_fock(M)
    t = cfg.plan.dt * cfg.plan.steps
    J = cfg.orbital_labels
    transform = momentum_transform(model.kinetic)
    report = bridge.compare_evolutions(J, model.kinetic, model.potential, model.pair, t,
                                       cfg.plan.steps, N=N, transform=transform,
                                       splitting=cfg.plan.splitting)
    rows = [
        ["oracle_fidelity", report.oracle_fidelity],
        ["trotter_fidelity", report.trotter_fidelity],
        ["a1_trotter_vs_oracle", report.a1_trotter_vs_oracle],
        ["a2_trotter_vs_oracle", report.a2_trotter_vs_oracle],
        ["survival", report.survival],
    ]
    if N == 1:
        c = transform.matrix[:, J[0] - 1]
        h = model.kinetic.entries + np.diag(model.potential.values)
        rows.append(["single_particle_survival",
                     abs(np.vdot(c, oracle.dense_expm(h, t) @ c))])
    return Table(["quantity", "value"], rows, [f"time={_num(t)}", f"steps={cfg.plan.steps}"])


def _rng_streams(seed: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3)]


def _random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (x + x.conj().T) / 2


def _measurement_setup(cfg: ExperimentConfig, seed: int):
    meas = cfg.measurement
    obs_rng, state_rng, sample_rng = _rng_streams(seed)
    if meas.observable == "hamiltonian":
        A = measure.Observable(_sector_matrix(build_model(cfg)))
    elif meas.observable == "random":
        A = measure.Observable(_random_hermitian(obs_rng, meas.dimension))
    else:
        if not meas.eigenvalues:
            raise ConfigError("diagonal observable needs eigenvalues", "measurement.eigenvalues")
        A = measure.Observable.diagonal(meas.eigenvalues)
    if meas.state == "random":
        v = state_rng.normal(size=A.dim) + 1j * state_rng.normal(size=A.dim)
        psi = v / np.linalg.norm(v)
    else:
        k = int(meas.state)
        if not 0 <= k < A.dim:
            raise ConfigError(f"eigenstate index must lie in 0..{A.dim - 1}", "measurement.state")
        psi = A.eigenvectors[:, k]
    return A, psi, sample_rng


def _mixture(A: measure.Observable, psi, fn) -> np.ndarray:
    weights = np.abs(A.eigenvectors.conj().T @ psi) ** 2
    return sum(w * fn(lam) for w, lam in zip(weights, A.eigenvalues))


def _scheme_distribution(scheme: str, A, psi, cfg: ExperimentConfig) -> np.ndarray:
    meas = cfg.measurement
    t = meas.time
    if scheme == "vn":
        return measure.von_neumann_measure(A, psi, meas.pointer_size).distribution
    if scheme == "kitaev":
        return measure.kitaev_circuit(A, t, psi).distribution
    if scheme == "kickback":
        return _mixture(A, psi, lambda lam: measure.phase_kickback_circuit(lam, t).distribution)
    return _mixture(A, psi, lambda lam: measure.ramsey_protocol(lam, t, meas.pulse).distribution)


def cmd_measure(cfg: ExperimentConfig, seed: int | None = None, all_schemes: bool = False,
                estimate: bool = False) -> Table:
    meas = cfg.measurement
    seed = meas.seed if seed is None else seed
    A, psi, sample_rng = _measurement_setup(cfg, seed)
    if estimate:
        est = measure.estimate_eigenvalue(A, psi, meas.times, meas.shots, sample_rng)
        rows = [[t, c, meas.shots] for t, c in zip(est.times, est.counts)]
        notes = [f"estimate={_num(est.value)}", f"window={_num(est.window)}", f"seed={seed}"]
        return Table(["time", "count_0", "shots"], rows, notes)
    if not all_schemes:
        dist = _scheme_distribution(meas.scheme, A, psi, cfg)
        rows = [[i, p] for i, p in enumerate(dist)]
        return Table(["outcome", "probability"], rows, [f"scheme={meas.scheme}", f"seed={seed}"])
    t = meas.time
    dists = {
        "vn": measure.von_neumann_measure(A, psi, 2, time=t).distribution,
        "kitaev": _scheme_distribution("kitaev", A, psi, cfg),
        "kickback": _scheme_distribution("kickback", A, psi, cfg),
        # pi/2 pulses put the cosine-enhanced outcome on 1; relabel to compare
        "ramsey": _scheme_distribution("ramsey", A, psi, cfg)[
            ::-1 if meas.pulse == "pi-half" else 1],
    }
    names = list(dists)
    rows = [[o] + [dists[n][o] for n in names] for o in range(2)]
    notes = [f"seed={seed}", "vn uses a 2-site pointer coupled for measurement.time"]
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            notes.append(f"max_dev[{a},{b}]={_num(float(np.max(np.abs(dists[a] - dists[b]))))}")
    return Table(["outcome"] + names, rows, notes)


def resource_rows(M: int, N: int, bits: int | None) -> list:
    """Per-step resource counts for the three algorithms.

    One-body terms: ``M(M-1)/2`` hoppings plus ``M`` diagonal terms; pair
    terms: every site pair for precomputed A2 but only the occupied pairs,
    ``N(N-1)/2``, when computed online. The online arithmetic estimate is
    ``b^2 N(N-1)/2``.
    """
    one_body = M * (M - 1) // 2 + M
    sites_pairs = M * (M - 1) // 2
    electron_pairs = N * (N - 1) // 2
    arith = "b^2*N(N-1)/2"
    arith_value = "-" if bits is None else str(bits * bits * electron_pairs)
    if N <= 1:
        arith_value = "0"
    return [
        ["a1", firstq.qubit_cost_a1(M, N), N, electron_pairs, arith, arith_value, "electrons"],
        ["a2", fock.qubit_cost_a2(M), one_body, sites_pairs, "-", "-", "sites"],
        ["a2-online", fock.qubit_cost_a2(M), one_body, electron_pairs, arith, arith_value,
         "electrons"],
    ]


def cmd_resources(cfg: ExperimentConfig) -> Table:
    M, N = cfg.lattice.sites, cfg.lattice.particles
    bits = cfg.plan.phase_bits
    columns = ["algo", "qubits", "one_body_terms", "pair_terms", "arith_formula",
               "arith_estimate", "spatial_scaling"]
    notes = [f"M={M}", f"N={N}", f"b={'symbolic' if bits is None else bits}"]
    return Table(columns, resource_rows(M, N, bits), notes)


# -- output -----------------------------------------------------------------

def _num(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == 0:
            x = 0.0
        return format(x, ".15g")
    return str(x)


def render(table: Table, command: str, cfg: ExperimentConfig, fmt: str) -> str:
    buf = io.StringIO()
    delim = "\t" if fmt == "tsv" else ","
    buf.write(f"# fockforge {command} config={cfg.digest()}\n")
    for note in table.notes:
        buf.write(f"# {note}\n")
    buf.write("#" + delim.join(table.columns) + "\n")
    writer = csv.writer(buf, delimiter=delim, lineterminator="\n")
    for row in table.rows:
        writer.writerow([_num(v) for v in row])
    return buf.getvalue()


def run(command: str, cfg: ExperimentConfig, seed: int | None = None,
        representation: str | None = None, all_schemes: bool = False,
        estimate: bool = False) -> Table:
    if command == "spectrum":
        return cmd_spectrum(cfg, representation)
    if command == "evolve":
        return cmd_evolve(cfg)
    if command == "compare":
        return cmd_compare(cfg)
    if command == "measure":
        return cmd_measure(cfg, seed, all_schemes, estimate)
    if command == "resources":
        return cmd_resources(cfg)
    raise ValueError(f"unknown command {command!r}")


def _u64(s: str) -> int:
    v = int(s)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockforge", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True)
    parser.add_argument("--seed", type=_u64, default=None)
    parser.add_argument("--out", default=None, help="output path, '-' for stdout")
    parser.add_argument("--format", choices=("tsv", "csv"), default=None)
    parser.add_argument("--representation", choices=("a1", "a2", "both"), default=None,
                        help="spectrum: which representation(s) to diagonalize")
    parser.add_argument("--all", action="store_true", dest="all_schemes",
                        help="measure: run all four schemes and compare them")
    parser.add_argument("--estimate", action="store_true",
                        help="measure: sample kickback outcomes and estimate the eigenvalue")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = replace(cfg, measurement=replace(cfg.measurement, seed=args.seed))
        table = run(args.command, cfg, args.seed, args.representation, args.all_schemes,
                    args.estimate)
    except ConfigError as exc:
        print(f"fockforge: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SizeGuardError as exc:
        print(f"fockforge: size guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    text = render(table, args.command, cfg, args.format or cfg.output.format)
    out = args.out or cfg.output.path
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

# -*- coding: UTF8 -*-

"""
Experiment runners.

Every runner computes one or more `ExperimentTable`s ; `execute` writes them
to the output directory, each CSV starting with the manifest line
`sbm-gft <version> config=<sha256>`, then records the checksums in `manifest.json`.
Seeded work is split into jobs and merged by job index, so reruns give identical bytes.
"""

import os
import time
import logging

import numpy as np

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .config import Config
from .jobs import Job, Jobs
from .errors import ValidationError
from .validation import validate_export_structure, is_valid_experiment
from .utils import file_checksum, hash_dictionary, read_json_file, read_signal, write_csv, write_json_file
from .group_harmonics import AbelianGroup, ConnectionFunction, cayley_matrix
from .sbm_model import SBMSpec, sample_graph, validate_seed
from .spectral import Spectrum, Tolerances, projection_distance, top_bottom_eigenpairs, write_spectrum_csv
from .perturbation import SWEEP_HEADER, perturbation_sweep
from .fourier import (
    SBMFourierBasis,
    basis_agreement,
    default_tolerances,
    graph_fourier_transform,
    sbm_fourier_basis,
    sbm_fourier_transform,
    transferred_character_basis,
    write_basis,
)

KINDS = (
    "basis", "sample", "gft", "compare-bases", "perturb-sweep", "convergence",
    "z5-table1", "z5-table2", "z5-fig4", "z5-fig5a", "z5-fig5b",
)

# Kinds that sample graphs and therefore need seeds.
SAMPLING_KINDS = ("sample", "gft", "convergence", "z5-table1", "z5-table2")

# mu_i = (n_base + slope_i k) / denominator along the Z5 block-size sweeps.
ONE_LARGE_BLOCK_SLOPES = (4, -1, -1, -1, -1)
THREE_BLOCK_SIZES_SLOPES = (2, 1, -1, -1, -1)


def _raise(msg: str):
    logging.error(msg)
    raise ValidationError(msg)


@dataclass(frozen=True, eq=False)
class ExperimentTable:
    name: str  # file name, without extension
    header: Tuple[str, ...]
    rows: List[tuple]

    def column(self, name: str) -> list:
        position = self.header.index(name)
        return [row[position] for row in self.rows]

    def write(self, directory: str, manifest: Optional[str] = None) -> str:
        return write_csv(os.path.join(directory, f'{self.name}.csv'), self.header, self.rows, manifest=manifest)


##################
# Config section #
##################


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    kind: str
    data: dict = field(default_factory=dict)  # validated content of the run configuration file
    seeds: Tuple[int, ...] = ()
    output: str = Config.default_output_directory
    scale: Optional[int] = None
    trials: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            _raise(f'Unknown experiment {self.kind!r}, expected one of {", ".join(KINDS)}')
        if not is_valid_experiment(self.data):
            _raise('Invalid run configuration')
        seeds = self.seeds or tuple(self.data.get("seeds", ())) or tuple(Config.default_seeds)
        object.__setattr__(self, "seeds", tuple(validate_seed(seed) for seed in seeds))
        if self.kind in SAMPLING_KINDS and not self.seeds:
            _raise(f'Experiment {self.kind!r} samples graphs and needs at least one seed')
        if self.scale is not None and (isinstance(self.scale, bool) or int(self.scale) != self.scale or self.scale < 1):
            _raise(f'--scale must be a positive number of vertices, got {self.scale!r}')
        if self.trials is not None and self.trials < 1:
            _raise(f'--trials must be positive, got {self.trials!r}')
        if "signal" in self.data and not os.path.isfile(self.data["signal"]):
            _raise(f'Signal file {self.data["signal"]!r} does not exist')
        if self.kind == "gft" and "signal" not in self.data:
            _raise('A gft run needs a "signal" file in its configuration')
        if self.kind == "compare-bases" and "group" not in self.data:
            _raise('A compare-bases run needs a Cayley model ("group" and "connection")')

    @classmethod
    def from_file(cls, kind: str, path: Optional[str], **kwargs) -> "ExperimentConfig":
        """
        :param str kind: The experiment.
        :param Optional[str] path: A JSON run configuration, or None for an empty one.
        :return ExperimentConfig: The validated configuration.
        """
        data = read_json_file(path) if path is not None else {}
        return cls(kind, data, **kwargs)

    def has_model(self) -> bool:
        return "A" in self.data or "group" in self.data

    def cayley(self) -> Tuple[AbelianGroup, ConnectionFunction]:
        if "group" not in self.data:
            _raise('The configuration does not describe a Cayley model')
        group = AbelianGroup(tuple(self.data["group"]))
        return group, ConnectionFunction.from_dict(group, self.data["connection"])

    def spec(self) -> SBMSpec:
        """
        The model of the run: explicit ("A", "mu", "N"), Cayley ("group", "connection",
        optional "mu" and "N"), or the Z5 model when the configuration describes none.
        `scale` replaces N.
        """
        if not self.has_model():
            return z5_spec(self.scale)
        if "A" in self.data:
            A = self.data["A"]
            if "mu" not in self.data or "N" not in self.data:
                _raise('An SBM configuration needs "A", "mu" and "N"')
            mu = self.data["mu"]
        else:
            group, f = self.cayley()
            A = cayley_matrix(group, f)
            mu = self.data.get("mu", [1. / group.n] * group.n)
        N = self.scale or self.data.get("N")
        if N is None:
            _raise('The configuration does not give the number of vertices "N"')
        return SBMSpec(A, mu, N)

    def tolerances(self, spec: SBMSpec) -> Tolerances:
        return default_tolerances(spec, self.data.get("tolerances"))

    @property
    def epsilons(self) -> Tuple[float, ...]:
        return tuple(float(e) for e in self.data.get("epsilons", Config.sweep_epsilons))

    @property
    def trial_count(self) -> int:
        return self.trials or self.data.get("trials", Config.sweep_trials)

    @property
    def signals(self) -> int:
        return self.data.get("signals", Config.sweep_signals)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(self.data.get("sizes", Config.convergence_sizes))

    def digest(self) -> str:
        return hash_dictionary({
            "kind": self.kind,
            "config": self.data,
            "seeds": list(self.seeds),
            "scale": self.scale,
            "trials": self.trials,
        })

    def manifest_line(self) -> str:
        return manifest_line(self.digest())


def manifest_line(config_hash: str) -> str:
    return f'sbm-gft {__version__} config={config_hash}'


@dataclass
class RunManifest:
    config_hash: str
    version: str
    wall_clock: float
    outputs: Dict[str, str]  # file name -> SHA256 checksum

    @validate_export_structure('manifest_structure')
    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "version": self.version,
            "wall_clock": self.wall_clock,
            "outputs": dict(self.outputs),
        }

    def write(self, directory: str) -> str:
        path = os.path.join(directory, "manifest.json")
        write_json_file(path, self.to_dict())
        return path


##############
# Z5 section #
##############


def z5_group() -> AbelianGroup:
    return AbelianGroup.cyclic(5)


def z5_connection() -> ConnectionFunction:
    return ConnectionFunction(z5_group(), Config.z5_connection)


def z5_spec(N: Optional[int] = None) -> SBMSpec:
    """
    One block of measure 1/3 and four of 1/6, connected through the Z5 Cayley matrix.
    """
    return SBMSpec(cayley_matrix(z5_group(), z5_connection()), Config.z5_measure, N or Config.z5_graph_size)


def sweep_measure(step: int, slopes: Sequence[int], denominator: int) -> np.ndarray:
    """
    Block measure (denominator / n + slope_i * step) / denominator.
    """
    slopes = np.asarray(slopes)
    base = denominator // slopes.size
    if slopes.sum() != 0:
        _raise(f'Slopes {tuple(slopes)} must add up to 0')
    mu = (base + slopes * step) / denominator
    if np.any(mu <= 0.):
        _raise(f'Step {step} empties a block')
    return mu


def _sample_spectrum(spec: SBMSpec, seed: int, p: int) -> Spectrum:
    graph = sample_graph(spec, seed)
    if Config.log_experiments:
        logging.info(f'Seed {seed}: computing {p} extreme eigenpairs of a graph with N={spec.N}')
    return top_bottom_eigenpairs(graph.adjacency, p)


def _sample_spectra(spec: SBMSpec, seeds: Sequence[int], p: int) -> List[Spectrum]:
    return Jobs([Job(i, _sample_spectrum, spec, seed, p) for i, seed in enumerate(seeds)]).run_all()


def run_z5_table1(N: Optional[int] = None, seeds: Sequence[int] = (), spec: Optional[SBMSpec] = None) -> ExperimentTable:
    """
    Eigenvalues of largest magnitude of the model matrix W and of sampled adjacency matrices.
    The model row is padded with zeros, W having as many nonzero eigenvalues as A_mu.

    :param Optional[int] N: Number of vertices, `Config.z5_graph_size` by default.
    :param seeds: One sample row per seed.
    :param Optional[SBMSpec] spec: Another model to use instead of the Z5 one.
    :return ExperimentTable: Rows (row, seed, lambda_1, ..., lambda_p).
    """
    spec = z5_spec(N) if spec is None else spec
    p = min(Config.z5_sample_eigenpairs, spec.N)
    basis = sbm_fourier_basis(spec)
    model = basis.w_eigenvalues[basis.by_magnitude()][:p]
    model = np.concatenate([model, np.zeros(p - model.size)])
    rows = [("model", "") + tuple(model)]
    for seed, spectrum in zip(seeds, _sample_spectra(spec, seeds, p)):
        rows.append(("sample", seed) + tuple(spectrum.eigenvalues[spectrum.by_magnitude()]))
    header = ("row", "seed") + tuple(f"lambda_{i}" for i in range(1, p + 1))
    return ExperimentTable("z5_table1", header, rows)


def run_z5_table2(N: Optional[int] = None, seeds: Sequence[int] = (), spec: Optional[SBMSpec] = None) -> ExperimentTable:
    """
    Agreement between the leading eigenvectors of sampled graphs and the SBM Fourier basis.
    The i-th eigenvector of a graph (by magnitude) is matched to a basis vector ;
    `agreement` is |<phi_graph, phi_model>| when the matched eigenvalue is simple.
    `paired_agreement` compares it with the i-th basis vector by magnitude instead.

    :return ExperimentTable: Rows (seed, i, graph_eigenvalue, model_eigenvalue, agreement, paired_agreement).
    """
    spec = z5_spec(N) if spec is None else spec
    basis = sbm_fourier_basis(spec)
    p = min(max(basis.rank, Config.z5_sample_eigenpairs), spec.N)
    rows = []
    for seed, spectrum in zip(seeds, _sample_spectra(spec, seeds, p)):
        positions = spectrum.by_magnitude()[:basis.rank]
        agreement = basis_agreement(spectrum.eigenvectors[:, positions], basis)
        columns = zip(positions, agreement.values, agreement.matches, agreement.paired)
        for i, (position, value, match, paired) in enumerate(columns, start=1):
            model_value = basis.w_eigenvalues[match] if match >= 0 else np.nan
            rows.append((seed, i, spectrum.eigenvalues[position], model_value, value, paired))
    header = ("seed", "i", "graph_eigenvalue", "model_eigenvalue", "agreement", "paired_agreement")
    return ExperimentTable("z5_table2", header, rows)


def transferred_agreement(group: AbelianGroup, f: ConnectionFunction, spec: SBMSpec) -> np.ndarray:
    """
    Agreement of each transferred character vector V phi_i with the SBM Fourier basis of the model.
    """
    transferred = transferred_character_basis(group, f, spec.realized_measure, spec.N)
    return basis_agreement(transferred.vectors, sbm_fourier_basis(transferred.spec)).values


def _step_rows(N: int, steps: Sequence[int], slopes: Sequence[int], denominator: int) -> List[tuple]:
    group, f = z5_group(), z5_connection()
    A = cayley_matrix(group, f)
    jobs = [
        Job(index, transferred_agreement, group, f, SBMSpec(A, sweep_measure(step, slopes, denominator), N))
        for index, step in enumerate(steps)
    ]
    rows = []
    for step, values in zip(steps, Jobs(jobs).run_all()):
        rows.extend((step, i, value) for i, value in enumerate(values, start=1))
    return rows


def run_z5_fig4(N: Optional[int] = None, steps: Optional[Sequence[int]] = None) -> ExperimentTable:
    """
    One-large-block sweep: mu_1 = (60 + 4k) / 300, the four other blocks (60 - k) / 300.

    :return ExperimentTable: Rows (k, i, agreement) of the transferred character basis.
    """
    N = N or Config.z5_one_block_size
    steps = Config.z5_one_block_steps if steps is None else steps
    rows = _step_rows(N, steps, ONE_LARGE_BLOCK_SLOPES, 300)
    return ExperimentTable("z5_fig4", ("k", "i", "agreement"), rows)


def run_z5_fig5a(N: Optional[int] = None, steps: Optional[Sequence[int]] = None) -> ExperimentTable:
    """
    Three-block-sizes sweep: mu_1 = (30 + 2k) / 150, mu_2 = (30 + k) / 150, the others (30 - k) / 150.
    """
    N = N or Config.z5_three_block_size
    steps = Config.z5_three_block_steps if steps is None else steps
    rows = _step_rows(N, steps, THREE_BLOCK_SIZES_SLOPES, 150)
    return ExperimentTable("z5_fig5a", ("k", "i", "agreement"), rows)


def run_z5_fig5b(models: Optional[Sequence[Sequence[int]]] = None) -> ExperimentTable:
    """
    Agreement of the transferred character basis for fixed Z5 models.

    :param models: Block sizes of each model, `Config.z5_model_1_blocks` and `Config.z5_model_2_blocks` by default.
    :return ExperimentTable: Rows (model, i, agreement), models numbered from 1.
    """
    models = (Config.z5_model_1_blocks, Config.z5_model_2_blocks) if models is None else models
    group, f = z5_group(), z5_connection()
    A = cayley_matrix(group, f)
    rows = []
    for model, blocks in enumerate(models, start=1):
        values = transferred_agreement(group, f, SBMSpec.from_block_sizes(A, blocks))
        rows.extend((model, i, value) for i, value in enumerate(values, start=1))
    return ExperimentTable("z5_fig5b", ("model", "i", "agreement"), rows)


def run_z5_fig5(model_a: Optional[Sequence[int]] = None, model_b: Optional[Sequence[int]] = None,
                N: Optional[int] = None, steps: Optional[Sequence[int]] = None) -> List[ExperimentTable]:
    """
    The three-block-sizes sweep, and the comparison of two models given by their block sizes.
    """
    models = (model_a or Config.z5_model_1_blocks, model_b or Config.z5_model_2_blocks)
    return [run_z5_fig5a(N, steps), run_z5_fig5b(models)]


#######################
# Experiments section #
#######################


def run_compare_bases(group: AbelianGroup, f: ConnectionFunction, spec: SBMSpec) -> ExperimentTable:
    """
    Compares the transferred character basis of a Cayley model with its SBM Fourier basis.

    :return ExperimentTable: Rows (i, cayley_eigenvalue, model_eigenvalue, agreement).
    """
    transferred = transferred_character_basis(group, f, spec.realized_measure, spec.N)
    basis = sbm_fourier_basis(transferred.spec)
    agreement = basis_agreement(transferred.vectors, basis)
    rows = [
        (i, cayley_value, basis.w_eigenvalues[match] if match >= 0 else np.nan, value)
        for i, (cayley_value, match, value) in enumerate(
            zip(transferred.eigenvalues, agreement.matches, agreement.values), start=1)
    ]
    return ExperimentTable("compare_bases", ("i", "cayley_eigenvalue", "model_eigenvalue", "agreement"), rows)


def run_perturb_sweep(spec: SBMSpec, epsilons: Sequence[float], trials: int, signals: int,
                      seed: int) -> List[ExperimentTable]:
    """
    Perturbation sweep, and one summary row per epsilon counting the rows where
    an empirical value exceeds its bound by more than `Config.residual_rtol`.
    """
    slack = Config.residual_rtol
    rows = perturbation_sweep(spec, epsilons, trials, signals, seed)
    sweep = ExperimentTable("perturb_sweep", SWEEP_HEADER, rows)
    summary = []
    for epsilon in epsilons:
        selected = [row for row in rows if row[1] == float(epsilon)]
        bound = np.array([row[6] for row in selected])
        empirical = np.array([row[7] for row in selected])
        ratios = np.divide(empirical, bound, out=np.zeros_like(empirical), where=bound > 0)
        summary.append((
            float(epsilon),
            len(selected),
            int(np.sum(empirical > bound + slack)),
            int(sum(row[9] > row[10] + slack for row in selected)),
            int(sum(row[11] > row[12] + slack for row in selected)),
            float(ratios.max(initial=0.)),
        ))
    header = ("epsilon", "rows", "projection_violations", "v_violations", "shift_violations", "max_ratio")
    return [sweep, ExperimentTable("perturb_sweep_summary", header, summary)]


def _convergence_distances(basis: SBMFourierBasis, seed: int) -> List[float]:
    spectrum = _sample_spectrum(basis.spec, seed, min(max(basis.rank + 1, Config.z5_sample_eigenpairs), basis.N))
    distances = []
    for group in basis.groups:
        try:
            positions = [spectrum.position(index) for index in group.signed_indices]
        except ValidationError:
            logging.warning(f'Seed {seed}: the sampled graph has no eigenvalue matching {group.signed_indices}')
            distances.append(np.nan)
            continue
        distances.append(projection_distance(group.basis, spectrum.eigenvectors[:, positions]).frobenius)
    return distances


def run_convergence_check(spec: SBMSpec, sizes: Sequence[int], seeds: Sequence[int]) -> ExperimentTable:
    """
    Distance between the eigenspaces of sampled graphs and those of W, for growing N.
    Graph eigenvectors are paired with the model's by signed index.

    :param SBMSpec spec: The model ; only its measure and probabilities are used.
    :param sizes: Increasing numbers of vertices.
    :param seeds: Seeds of the graphs sampled at every size.
    :return ExperimentTable: Rows (N, group, W_eigenvalue, d, mean_distance, samples).
    """
    sizes = [int(N) for N in sizes]
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
        _raise(f'Graph sizes must be increasing, got {sizes}')
    if not seeds:
        _raise('The convergence check needs at least one seed')
    rows = []
    for N in sizes:
        basis = sbm_fourier_basis(spec.with_size(N))
        distances = np.array(Jobs([Job(i, _convergence_distances, basis, seed) for i, seed in enumerate(seeds)]).run_all())
        for g, group in enumerate(basis.groups):
            column = distances[:, g]
            found = column[~np.isnan(column)]
            rows.append((
                N,
                ";".join(str(index) for index in group.signed_indices),
                group.value * N,
                group.multiplicity,
                float(found.mean()) if found.size else np.nan,
                int(found.size),
            ))
        if Config.log_experiments:
            logging.info(f'Convergence check: N={N} done')
    return ExperimentTable("convergence", ("N", "group", "W_eigenvalue", "d", "mean_distance", "samples"), rows)


def gft_tables(basis: SBMFourierBasis, x: np.ndarray) -> ExperimentTable:
    """
    The SBM-driven Fourier transform of a signal, one row per eigengroup and one for the kernel of W.
    Coefficients are only given when the group holds a single vector.
    """
    result = sbm_fourier_transform(basis, x)
    norms = result.norms()
    rows = []
    for g, group in enumerate(basis.groups):
        real, imag = "", ""
        if result.coefficients is not None:
            coefficient = result.coefficients[group.positions[0]]
            real, imag = float(np.real(coefficient)), float(np.imag(coefficient))
        rows.append((";".join(str(i) for i in group.signed_indices), result.w_eigenvalues[g],
                     group.multiplicity, norms[g], real, imag))
    rows.append(("kernel", 0., basis.N - basis.rank, result.zero_norm, "", ""))
    header = ("group", "W_eigenvalue", "d", "projection_norm", "coefficient_real", "coefficient_imag")
    return ExperimentTable("gft", header, rows)


def graph_gft_table(spec: SBMSpec, x: np.ndarray, seed: int, count: int) -> ExperimentTable:
    graph = sample_graph(spec, seed)
    result = graph_fourier_transform(graph, x, count=count)
    rows = [
        (index, value, np.real(c), np.imag(c))
        for index, value, c in zip(result.signed_indices, result.eigenvalues, result.coefficients)
    ]
    header = ("eigen_index", "eigenvalue", "coefficient_real", "coefficient_imag")
    return ExperimentTable(f"gft_graph_{seed}", header, rows)


#####################
# Execution section #
#####################


def _write_tables(tables: Sequence[ExperimentTable], config: ExperimentConfig) -> List[str]:
    line = config.manifest_line()
    return [table.write(config.output, manifest=line) for table in tables]


def _basis_outputs(config: ExperimentConfig) -> List[str]:
    spec = config.spec()
    basis = sbm_fourier_basis(spec, config.tolerances(spec))
    csv_path = os.path.join(config.output, "basis.csv")
    json_path = os.path.join(config.output, "basis.json")
    write_basis(basis, csv_path, json_path, manifest=config.manifest_line())
    spectrum_path = write_spectrum_csv(os.path.join(config.output, "spectrum.csv"), basis.spectrum,
                                       manifest=config.manifest_line(), scale=spec.N)
    return [csv_path, json_path, spectrum_path]


def _sample_outputs(config: ExperimentConfig) -> List[str]:
    spec = config.spec()
    paths = []
    for seed in config.seeds:
        edge_path = os.path.join(config.output, f"graph_{seed}.csv")
        header_path = os.path.join(config.output, f"graph_{seed}.json")
        sample_graph(spec, seed).write(edge_path, header_path, manifest=config.manifest_line())
        paths.extend((edge_path, header_path))
    return paths


def _gft_outputs(config: ExperimentConfig) -> List[str]:
    spec = config.spec()
    x = read_signal(config.data["signal"])
    basis = sbm_fourier_basis(spec, config.tolerances(spec))
    count = min(max(basis.rank + 1, Config.z5_sample_eigenpairs), spec.N)
    tables = [gft_tables(basis, x)] + [graph_gft_table(spec, x, seed, count) for seed in config.seeds]
    return _write_tables(tables, config)


def _compare_outputs(config: ExperimentConfig) -> List[str]:
    group, f = config.cayley()
    return _write_tables([run_compare_bases(group, f, config.spec())], config)


def _sweep_outputs(config: ExperimentConfig) -> List[str]:
    tables = run_perturb_sweep(config.spec(), config.epsilons, config.trial_count, config.signals, config.seeds[0])
    return _write_tables(tables, config)


def _convergence_outputs(config: ExperimentConfig) -> List[str]:
    spec = config.spec()
    return _write_tables([run_convergence_check(spec, config.sizes, config.seeds)], config)


_RUNNERS: Dict[str, Callable[[ExperimentConfig], List[str]]] = {
    "basis": _basis_outputs,
    "sample": _sample_outputs,
    "gft": _gft_outputs,
    "compare-bases": _compare_outputs,
    "perturb-sweep": _sweep_outputs,
    "convergence": _convergence_outputs,
    "z5-table1": lambda c: _write_tables([run_z5_table1(seeds=c.seeds, spec=c.spec())], c),
    "z5-table2": lambda c: _write_tables([run_z5_table2(seeds=c.seeds, spec=c.spec())], c),
    "z5-fig4": lambda c: _write_tables([run_z5_fig4(c.scale)], c),
    "z5-fig5a": lambda c: _write_tables([run_z5_fig5a(c.scale)], c),
    "z5-fig5b": lambda c: _write_tables([run_z5_fig5b()], c),
}


def execute(config: ExperimentConfig) -> RunManifest:
    """
    Runs an experiment and writes its outputs and `manifest.json` to `config.output`.

    :param ExperimentConfig config: The run.
    :return RunManifest: The manifest written.
    """
    if Config.log_experiments:
        logging.info(f'Running {config.kind!r} into {config.output!r}')
    start = time.perf_counter()
    paths = _RUNNERS[config.kind](config)
    manifest = RunManifest(
        config_hash=config.digest(),
        version=__version__,
        wall_clock=round(time.perf_counter() - start, 3),
        outputs={os.path.basename(path): file_checksum(path) for path in paths},
    )
    manifest.write(config.output)
    if Config.log_experiments:
        logging.info(f'{config.kind!r} wrote {len(paths)} file(s) in {manifest.wall_clock}s')
    return manifest

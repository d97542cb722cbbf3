# -*- coding: UTF8 -*-

"""
Stochastic block model specifications, the matrices derived from them
(weights M, weighted probabilities A_mu, lift D, isometry V, model matrix W)
and graph sampling.

Vertices are laid out block after block: the first k_1 vertices are in block 0,
the next k_2 in block 1, and so on.
"""

import logging

import numpy as np
import scipy.sparse as sp

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple
from scipy.sparse.linalg import LinearOperator

from .config import Config
from .jobs import Job, Jobs
from .errors import ValidationError
from .validation import validate_export_structure, is_valid_graph_header, is_valid_sbm_spec
from .utils import hash_dictionary, read_csv_rows, read_json_file, write_csv, write_json_file

# Tolerance under which mu_i * N is considered integral.
INTEGRAL_ATOL = 1e-9


def _raise(msg: str):
    logging.error(msg)
    raise ValidationError(msg)


def validate_measure(mu: Sequence[float]) -> np.ndarray:
    """
    Checks a block measure: positive entries adding up to 1.

    :param Sequence[float] mu: The measure.
    :return np.ndarray: The measure as a read-only float array.
    """
    mu = np.array(mu, dtype=float)
    if mu.ndim != 1 or mu.size == 0:
        _raise(f'A block measure must be a non-empty vector, got shape {mu.shape}')
    if not np.all(np.isfinite(mu)) or np.any(mu <= 0.):
        _raise(f'Block measure entries must be positive, got {mu}')
    if abs(mu.sum() - 1.) > Config.measure_atol:
        _raise(f'Block measure must add up to 1, got {mu.sum()!r}')
    mu.setflags(write=False)
    return mu


def validate_probability_matrix(A: Sequence[Sequence[float]]) -> np.ndarray:
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        _raise(f'A probability matrix must be square, got shape {A.shape}')
    if not np.all(np.isfinite(A)) or A.min() < 0. or A.max() > 1.:
        _raise('Probability matrix entries must lie in [0, 1]')
    if np.max(np.abs(A - A.T)) > Config.symmetry_rtol:
        _raise('Probability matrix must be symmetric')
    A = (A + A.T) / 2
    A.setflags(write=False)
    return A


def block_sizes(mu: Sequence[float], N: int) -> Tuple[int, ...]:
    """
    Rounds mu * N to integer block sizes adding up to N (largest remainder method).
    Leftover vertices go to the largest fractional parts, lowest index first on ties.
    When every mu_i * N is integral, k_i = mu_i * N exactly.

    :param Sequence[float] mu: A block measure.
    :param int N: The number of vertices.
    :return Tuple[int, ...]: The block sizes.
    """
    mu = validate_measure(mu)
    N = int(N)
    if N < mu.size:
        _raise(f'N = {N} is smaller than the number of blocks ({mu.size})')
    exact = mu * N
    rounded = np.round(exact)
    integral = np.abs(exact - rounded) <= INTEGRAL_ATOL
    floors = np.where(integral, rounded, np.floor(exact)).astype(np.int64)
    remainders = np.where(integral, 0., exact - np.floor(exact))
    leftover = N - int(floors.sum())
    if not 0 <= leftover <= mu.size:
        _raise(f'Could not round {exact} to block sizes adding up to {N}')
    order = sorted(range(mu.size), key=lambda i: (-round(float(remainders[i]), 9), i))
    k = floors.copy()
    for i in order[:leftover]:
        k[i] += 1
    if np.any(k == 0):
        _raise(f'Block sizes {tuple(k)} contain an empty block, N = {N} is too small for this measure')
    return tuple(int(size) for size in k)


@dataclass(frozen=True, eq=False)
class SBMSpec:
    A: np.ndarray
    mu: np.ndarray
    N: int
    k: Tuple[int, ...] = field(init=False, default=())

    def __post_init__(self):
        A = validate_probability_matrix(self.A)
        mu = validate_measure(self.mu)
        if A.shape[0] != mu.size:
            _raise(f'Probability matrix is {A.shape[0]}x{A.shape[0]} but the measure has {mu.size} blocks')
        if isinstance(self.N, bool) or int(self.N) != self.N:
            _raise(f'N must be an integer, got {self.N!r}')
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "k", block_sizes(mu, self.N))

    @classmethod
    def from_block_sizes(cls, A: Sequence[Sequence[float]], k: Sequence[int]) -> "SBMSpec":
        k = np.array(k, dtype=np.int64)
        if k.ndim != 1 or np.any(k < 1):
            _raise(f'Block sizes must be positive integers, got {k}')
        N = int(k.sum())
        return cls(A, k / N, N)

    @classmethod
    def from_dict(cls, spec_data: dict) -> "SBMSpec":
        if not is_valid_sbm_spec(spec_data):
            _raise('Invalid SBM specification')
        return cls(spec_data["A"], spec_data["mu"], spec_data["N"])

    @validate_export_structure('sbm_spec_structure')
    def to_dict(self) -> dict:
        return {
            "A": self.A.tolist(),
            "mu": self.mu.tolist(),
            "N": self.N,
        }

    def with_size(self, N: int) -> "SBMSpec":
        return SBMSpec(self.A, self.mu, N)

    @property
    def n(self) -> int:
        return self.mu.size

    @property
    def realized_measure(self) -> np.ndarray:
        """
        The measure k / N actually carried by the blocks of an N-vertex graph.
        Equal to mu whenever mu * N is integral.
        """
        return np.array(self.k, dtype=float) / self.N

    def digest(self) -> str:
        return hash_dictionary(self.to_dict())


def weight_matrix(mu: Sequence[float]) -> np.ndarray:
    return np.diag(validate_measure(mu))


def weighted_probability_matrix(A: Sequence[Sequence[float]], mu: Sequence[float]) -> np.ndarray:
    """
    Computes A_mu = sqrt(M) A sqrt(M), i.e. (A_mu)_ij = sqrt(mu_i mu_j) a_ij.

    :param A: A probability matrix.
    :param mu: A block measure of the same size.
    :return np.ndarray: The (n, n) weighted probability matrix, exactly symmetric.
    """
    A = validate_probability_matrix(A)
    root = np.sqrt(validate_measure(mu))
    if root.size != A.shape[0]:
        _raise(f'Probability matrix is {A.shape[0]}x{A.shape[0]} but the measure has {root.size} blocks')
    # The outer product is symmetric bit for bit, so is its product with A.
    return np.outer(root, root) * A


def _validate_sizes(k: Sequence[int]) -> np.ndarray:
    k = np.array(k, dtype=np.int64)
    if k.ndim != 1 or k.size == 0 or np.any(k < 1):
        _raise(f'Block sizes must be positive integers, got {k}')
    return k


def block_labels(k: Sequence[int]) -> np.ndarray:
    k = _validate_sizes(k)
    return np.repeat(np.arange(k.size), k)


def block_starts(k: Sequence[int]) -> np.ndarray:
    k = _validate_sizes(k)
    return np.concatenate(([0], np.cumsum(k)[:-1]))


def lift_matrix(k: Sequence[int]) -> np.ndarray:
    """
    :param k: Block sizes.
    :return np.ndarray: D, the (N, n) 0/1 matrix with a single 1 per row, in the column of the vertex's block.
    """
    labels = block_labels(k)
    D = np.zeros((labels.size, int(labels.max()) + 1))
    D[np.arange(labels.size), labels] = 1.
    return D


def isometry(k: Sequence[int]) -> np.ndarray:
    """
    :param k: Block sizes.
    :return np.ndarray: V = D M^-1/2 / sqrt(N), equal to 1 / sqrt(k_j) on block j, 0 elsewhere.
    """
    k = _validate_sizes(k)
    return lift_matrix(k) / np.sqrt(k)


def lift_vector(k: Sequence[int], x: np.ndarray, isometric: bool = False) -> np.ndarray:
    """
    Blows a block vector up to a vertex vector.

    :param k: Block sizes.
    :param np.ndarray x: An n-vector, or an (n, m) matrix of them.
    :param bool isometric: If True, applies V ; otherwise applies D (x_i repeated k_i times).
    :return np.ndarray: The N-dimensional lift.
    """
    k = _validate_sizes(k)
    x = np.asarray(x)
    if x.shape[0] != k.size:
        _raise(f'Expected {k.size} block values, got {x.shape[0]}')
    if isometric:
        x = x / np.sqrt(k).reshape((-1,) + (1,) * (x.ndim - 1))
    return np.repeat(x, k, axis=0)


def block_sums(k: Sequence[int], y: np.ndarray) -> np.ndarray:
    """
    Applies D^T: sums the entries of y block by block.
    """
    k = _validate_sizes(k)
    y = np.asarray(y)
    if y.shape[0] != int(k.sum()):
        _raise(f'Expected a vector of size {int(k.sum())}, got {y.shape[0]}')
    return np.add.reduceat(y, block_starts(k), axis=0)


def compress_vector(k: Sequence[int], y: np.ndarray) -> np.ndarray:
    """
    Applies V^T, the left inverse of the isometric lift.

    :param k: Block sizes.
    :param np.ndarray y: An N-vector, or an (N, m) matrix of them.
    :return np.ndarray: The n-dimensional compression.
    """
    k = _validate_sizes(k)
    sums = block_sums(k, y)
    return sums / np.sqrt(k).reshape((-1,) + (1,) * (sums.ndim - 1))


def model_matrix(spec: SBMSpec, max_size: Optional[int] = None) -> np.ndarray:
    """
    Materializes the model matrix W = D A D^T, W_uv = a_{block(u), block(v)}.

    :param SBMSpec spec: The model.
    :param Optional[int] max_size: Largest N allowed, `Config.max_dense_model_size` by default.
    :return np.ndarray: The dense (N, N) model matrix.
    """
    max_size = Config.max_dense_model_size if max_size is None else max_size
    if spec.N > max_size:
        _raise(f'Refusing to materialize a {spec.N}x{spec.N} model matrix (cap is {max_size}), '
               f'use model_operator instead')
    labels = block_labels(spec.k)
    return spec.A[np.ix_(labels, labels)]


def model_operator(spec: SBMSpec) -> LinearOperator:
    """
    The model matrix as an operator, y -> D (A (D^T y)), never materialized.

    :param SBMSpec spec: The model.
    :return LinearOperator: A symmetric (N, N) operator.
    """
    k = spec.k
    A = spec.A

    def matmat(y: np.ndarray) -> np.ndarray:
        y = np.asarray(y)
        flat = y.ndim == 1
        sums = block_sums(k, y.reshape(spec.N, -1))
        result = lift_vector(k, A @ sums)
        return result.ravel() if flat else result

    return LinearOperator(
        shape=(spec.N, spec.N),
        matvec=matmat,
        rmatvec=matmat,
        matmat=matmat,
        dtype=np.float64,
    )


####################
# Sampling section #
####################


@dataclass(frozen=True, eq=False)
class SampledGraph:
    N: int
    k: Tuple[int, ...]
    seed: int
    adjacency: sp.csr_matrix

    @property
    def block_assignment(self) -> np.ndarray:
        return block_labels(self.k)

    def edges(self) -> np.ndarray:
        """
        :return np.ndarray: An (E, 2) array of 0-based edges (u, v) with u < v, sorted.
        """
        upper = sp.triu(self.adjacency, k=1).tocoo()
        edges = np.column_stack((upper.row, upper.col)).astype(np.int64)
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        return edges[order]

    @validate_export_structure('graph_header_structure')
    def header(self) -> dict:
        return {
            "N": self.N,
            "k": list(self.k),
            "seed": self.seed,
        }

    def write(self, edge_path: str, header_path: str, manifest: Optional[str] = None) -> None:
        write_csv(edge_path, ("u", "v"), self.edges(), manifest=manifest)
        write_json_file(header_path, self.header())

    @classmethod
    def read(cls, edge_path: str, header_path: str) -> "SampledGraph":
        header = read_json_file(header_path)
        if not is_valid_graph_header(header):
            _raise(f'Invalid graph header in {header_path!r}')
        N = header["N"]
        rows = read_csv_rows(edge_path)
        if rows and rows[0] == ["u", "v"]:
            rows = rows[1:]
        try:
            edges = np.array([[int(u), int(v)] for u, v in rows], dtype=np.int64).reshape(-1, 2)
        except ValueError:
            _raise(f'Edge list {edge_path!r} must hold two integer columns')
        if edges.size and (edges.min() < 0 or edges.max() >= N or np.any(edges[:, 0] >= edges[:, 1])):
            _raise(f'Edge list {edge_path!r} must hold pairs u < v of vertices in [0, {N})')
        return cls(N, tuple(header["k"]), header["seed"], _symmetric_adjacency(edges[:, 0], edges[:, 1], N))


def _symmetric_adjacency(rows: np.ndarray, cols: np.ndarray, N: int) -> sp.csr_matrix:
    upper = sp.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(N, N)).tocsr()
    return (upper + upper.T).tocsr()


def _vertex_stream(seed: int, u: int) -> np.random.Generator:
    # One counter-based stream per (seed, vertex): the draws of a row never depend on other rows.
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, u])))


def _sample_rows(A: np.ndarray, labels: np.ndarray, seed: int, start: int, stop: int) -> Tuple[np.ndarray, np.ndarray]:
    N = labels.size
    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    for u in range(start, stop):
        if u == N - 1:
            break
        probabilities = A[labels[u], labels[u + 1:]]
        draws = _vertex_stream(seed, u).random(N - u - 1)
        neighbours = np.nonzero(draws < probabilities)[0] + u + 1
        rows.append(np.full(neighbours.size, u, dtype=np.int64))
        cols.append(neighbours.astype(np.int64))
    if not rows:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(rows), np.concatenate(cols)


def validate_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= int(seed) < 2 ** 64:
        _raise(f'Seeds must be integers in [0, 2^64), got {seed!r}')
    return int(seed)


def sample_graph(spec: SBMSpec, seed: int) -> SampledGraph:
    """
    Samples a simple graph from the model: each pair u < v is an edge
    with probability W_uv, independently. No self-loops.
    The result only depends on (spec, seed), not on how rows are split between workers.

    :param SBMSpec spec: The model.
    :param int seed: A 64-bit seed.
    :return SampledGraph: The sampled graph.
    """
    seed = validate_seed(seed)
    labels = block_labels(spec.k)
    bounds = np.linspace(0, spec.N, max(1, Config.sampling_chunks) + 1).astype(np.int64)
    jobs = [
        Job(index, _sample_rows, spec.A, labels, seed, int(start), int(stop))
        for index, (start, stop) in enumerate(zip(bounds[:-1], bounds[1:]))
        if stop > start
    ]
    parts = Jobs(jobs).run_all()
    rows = np.concatenate([part[0] for part in parts])
    cols = np.concatenate([part[1] for part in parts])
    graph = SampledGraph(spec.N, spec.k, seed, _symmetric_adjacency(rows, cols, spec.N))
    if Config.log_sampling:
        logging.info(f'Sampled a graph with N={spec.N} and {rows.size} edges (seed {seed})')
    return graph


def block_edge_density(graph: SampledGraph, i: int, j: int) -> float:
    """
    Fraction of the possible edges between blocks i and j (within block i if i == j) that are present.
    """
    starts = block_starts(graph.k)
    block_i = slice(starts[i], starts[i] + graph.k[i])
    block_j = slice(starts[j], starts[j] + graph.k[j])
    count = graph.adjacency[block_i, block_j].sum()
    if i == j:
        pairs = graph.k[i] * (graph.k[i] - 1)
        return float(count / pairs) if pairs else 0.
    return float(count / (graph.k[i] * graph.k[j]))

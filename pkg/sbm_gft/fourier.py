# -*- coding: UTF8 -*-

"""
The SBM-driven graph Fourier transform and its Cayley-structured variants.

Every basis here is built from the small weighted probability matrix A_mu:
a nonzero eigenpair (lambda, x) of A_mu gives the eigenpair (N lambda, V x)
of the N x N model matrix W, and every nonzero eigenpair of W arises this way.
"""

import logging

import numpy as np
import scipy.sparse as sp

from dataclasses import dataclass
from typing import List, Optional, Sequence, Union
from scipy.optimize import linear_sum_assignment
from scipy.sparse.linalg import LinearOperator

from .config import Config
from .utils import write_csv, write_json_file
from .errors import ToleranceError, ValidationError
from .validation import validate_export_structure
from .group_harmonics import (
    AbelianGroup,
    CayleyEigengroup,
    ConnectionFunction,
    cayley_eigenvalues,
    cayley_matrix,
    character_matrix,
    character_table,
    real_eigenpair_basis,
)
from .sbm_model import (
    INTEGRAL_ATOL,
    SampledGraph,
    SBMSpec,
    block_sums,
    compress_vector,
    lift_vector,
    model_operator,
    validate_measure,
    weighted_probability_matrix,
)
from .spectral import (
    EigenGroup,
    Spectrum,
    Tolerances,
    canonicalize_signs,
    group_eigenpairs,
    symmetric_eigendecomposition,
    top_bottom_eigenpairs,
)


def _raise(msg: str):
    logging.error(msg)
    raise ValidationError(msg)


#################
# Basis section #
#################


@dataclass(frozen=True, eq=False)
class SBMFourierBasis:
    spec: SBMSpec
    eigvals: np.ndarray  # nonzero eigenvalues of A_mu, decreasing ; W has N times these
    U0: np.ndarray  # (n, r) eigenvectors of A_mu
    lifted: np.ndarray  # (N, r) eigenvectors of W, V @ U0
    groups: List[EigenGroup]  # positions refer to columns of `lifted`
    tolerances: Tolerances
    spectrum: Spectrum  # full spectrum of A_mu, zeros included

    @property
    def N(self) -> int:
        return self.spec.N

    @property
    def k(self):
        return self.spec.k

    @property
    def rank(self) -> int:
        return self.eigvals.size

    @property
    def w_eigenvalues(self) -> np.ndarray:
        return self.eigvals * self.N

    @property
    def is_simple(self) -> bool:
        return all(group.multiplicity == 1 for group in self.groups)

    def group_of(self, column: int) -> EigenGroup:
        for group in self.groups:
            if column in group.positions:
                return group
        _raise(f'Column {column} is not part of this basis (rank {self.rank})')

    def by_magnitude(self) -> np.ndarray:
        """
        :return np.ndarray: Column positions by decreasing |lambda|, the positive one first on ties.
        """
        return np.lexsort((-self.eigvals, -np.abs(self.eigvals)))

    @validate_export_structure('basis_metadata_structure')
    def metadata(self) -> dict:
        return {
            "spec_hash": self.spec.digest(),
            "N": self.N,
            "k": list(self.k),
            "rank": self.rank,
            "tolerances": self.tolerances.to_dict(),
        }


def default_tolerances(spec: SBMSpec, overrides: Optional[dict] = None) -> Tolerances:
    """
    Default tolerances of the A_mu eigenproblem of a spec, with optional overrides
    (as read from a run configuration).
    """
    A_mu = weighted_probability_matrix(spec.A, spec.realized_measure)
    return Tolerances.for_matrix(float(np.linalg.norm(A_mu, 2)), spec.n, **(overrides or {}))


def _assemble_basis(spec: SBMSpec, eigvals: np.ndarray, U0: np.ndarray, spectrum: Spectrum,
                    tolerances: Tolerances, signed_indices: Sequence[int]) -> SBMFourierBasis:
    lifted = lift_vector(spec.k, U0, isometric=True)
    groups = group_eigenpairs(eigvals, lifted, tolerances.group_tol, signed_indices)
    basis = SBMFourierBasis(spec, eigvals, U0, lifted, groups, tolerances, spectrum)
    _verify_model_eigenpairs(basis)
    return basis


def _verify_model_eigenpairs(basis: SBMFourierBasis) -> None:
    if basis.rank == 0:
        return
    W = model_operator(basis.spec)
    residuals = np.linalg.norm(W.matmat(basis.lifted) - basis.lifted * basis.w_eigenvalues, axis=0)
    tol = basis.tolerances.residual_tol * basis.N + np.finfo(float).tiny
    if residuals.max() > tol:
        msg = f'Lifted vectors are not eigenvectors of W: residual {residuals.max():.3g} > {tol:.3g}'
        logging.critical(msg)
        raise ToleranceError(msg, residuals)


def sbm_fourier_basis(spec: SBMSpec, tolerances: Optional[Tolerances] = None) -> SBMFourierBasis:
    """
    Builds the SBM Fourier basis of a model:
    decomposes A_mu, drops its kernel, and lifts the remaining eigenvectors with V.

    :param SBMSpec spec: The model. Its realized measure k / N is used.
    :param Optional[Tolerances] tolerances: Defaults to `default_tolerances(spec)`.
    :return SBMFourierBasis: The basis, eigenvalues decreasing.
    """
    tolerances = default_tolerances(spec) if tolerances is None else tolerances
    A_mu = weighted_probability_matrix(spec.A, spec.realized_measure)
    spectrum = symmetric_eigendecomposition(A_mu, tolerances)
    mask = spectrum.nonzero_mask
    signed = [index for index, keep in zip(spectrum.signed_indices(), mask) if keep]
    lifted = canonicalize_signs(lift_vector(spec.k, spectrum.eigenvectors[:, mask], isometric=True))
    basis = _assemble_basis(spec, spectrum.eigenvalues[mask], compress_vector(spec.k, lifted),
                            spectrum, tolerances, signed)
    if Config.log_solver:
        logging.info(f'SBM Fourier basis: rank {basis.rank}, {len(basis.groups)} eigengroup(s), N={spec.N}')
    return basis


def write_basis(basis: SBMFourierBasis, csv_path: str, json_path: str, manifest: Optional[str] = None) -> None:
    """
    Exports a basis: one CSV row per basis vector (signed index, W eigenvalue, entries),
    and its metadata as JSON.
    """
    index_of = {}
    for group in basis.groups:
        index_of.update(dict(zip(group.positions, group.signed_indices)))
    header = ["eigen_index", "W_eigenvalue"] + [f"v{u}" for u in range(basis.N)]
    rows = [
        [index_of[j], basis.w_eigenvalues[j]] + list(basis.lifted[:, j])
        for j in range(basis.rank)
    ]
    write_csv(csv_path, header, rows, manifest=manifest)
    write_json_file(json_path, basis.metadata())


#####################
# Transform section #
#####################


@dataclass(frozen=True, eq=False)
class FourierResult:
    eigenvalues: np.ndarray  # one per eigengroup, eigenvalues of A_mu
    projections: np.ndarray  # (groups, N)
    zero_component: np.ndarray
    coefficients: Optional[np.ndarray]  # <x, U_i>, only when every eigenvalue is simple
    group_tol: float

    @property
    def N(self) -> int:
        return self.zero_component.size

    @property
    def w_eigenvalues(self) -> np.ndarray:
        return self.eigenvalues * self.N

    @property
    def zero_norm(self) -> float:
        return float(np.linalg.norm(self.zero_component))

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.projections, axis=1)

    def projection(self, value: float) -> np.ndarray:
        """
        :param float value: An eigenvalue of A_mu, or 0 for the kernel component.
        :return np.ndarray: The matching Fourier projection.
        """
        if self.eigenvalues.size:
            distances = np.abs(self.eigenvalues - value)
            best = int(np.argmin(distances))
            if distances[best] <= self.group_tol:
                return self.projections[best]
        if abs(value) <= self.group_tol:
            return self.zero_component
        _raise(f'{value!r} is not an eigenvalue of this transform')


def sbm_fourier_transform(basis: SBMFourierBasis, x: np.ndarray) -> FourierResult:
    """
    Computes the SBM-driven Fourier transform of a signal:
    one projection per distinct nonzero eigenvalue, and the remainder on the kernel of W.

    :param SBMFourierBasis basis: The basis.
    :param np.ndarray x: A signal on the N vertices.
    :return FourierResult: The transform.
    """
    x = np.asarray(x)
    if x.shape != (basis.N,):
        _raise(f'Expected a signal of size {basis.N}, got shape {x.shape}')
    dtype = np.result_type(x, basis.lifted, float)
    projections = np.zeros((len(basis.groups), basis.N), dtype=dtype)
    for g, group in enumerate(basis.groups):
        projections[g] = group.basis @ (group.basis.conj().T @ x)
    coefficients = basis.lifted.conj().T @ x if basis.is_simple else None
    return FourierResult(
        eigenvalues=np.array([group.value for group in basis.groups]),
        projections=projections,
        zero_component=x - projections.sum(axis=0),
        coefficients=coefficients,
        group_tol=basis.tolerances.group_tol,
    )


def inverse_transform(result: FourierResult) -> np.ndarray:
    return result.zero_component + result.projections.sum(axis=0)


@dataclass(frozen=True, eq=False)
class GraphFourierResult:
    signed_indices: tuple
    eigenvalues: np.ndarray
    coefficients: np.ndarray  # <x, phi_i>
    vectors: np.ndarray

    def projection(self) -> np.ndarray:
        return self.vectors @ self.coefficients


def graph_fourier_transform(source: Union[Spectrum, SampledGraph, np.ndarray, sp.spmatrix, LinearOperator],
                            x: np.ndarray, indices: Optional[Sequence[int]] = None,
                            count: Optional[int] = None) -> GraphFourierResult:
    """
    Fourier transform of a signal on one graph instance, x_hat = Phi^H x.

    :param source: A (possibly partial) spectrum, or the graph / adjacency matrix to decompose.
    Large or sparse matrices only get their `count` extreme eigenpairs.
    :param np.ndarray x: The signal.
    :param indices: Signed indices of the requested coefficients ; every computed eigenpair by default,
    by decreasing magnitude.
    :param Optional[int] count: Number of extreme eigenpairs to compute, `Config.z5_sample_eigenpairs` by default.
    :return GraphFourierResult: The coefficients and their eigenvectors.
    """
    if isinstance(source, SampledGraph):
        source = source.adjacency
    if isinstance(source, Spectrum):
        spectrum = source
    elif sp.issparse(source) or isinstance(source, LinearOperator) or source.shape[0] > Config.max_dense_model_size:
        spectrum = top_bottom_eigenpairs(source, count or Config.z5_sample_eigenpairs)
    else:
        spectrum = symmetric_eigendecomposition(np.asarray(source))
    x = np.asarray(x)
    if x.shape != (spectrum.dimension,):
        _raise(f'Expected a signal of size {spectrum.dimension}, got shape {x.shape}')
    signed = spectrum.signed_indices()
    if indices is None:
        positions = list(spectrum.by_magnitude())
    else:
        positions = [spectrum.position(index) for index in indices]
    vectors = spectrum.eigenvectors[:, positions]
    return GraphFourierResult(
        signed_indices=tuple(signed[p] for p in positions),
        eigenvalues=spectrum.eigenvalues[positions],
        coefficients=vectors.conj().T @ x,
        vectors=vectors,
    )


##########################
# Step embedding section #
##########################


@dataclass(frozen=True, eq=False)
class StepSignal:
    values: np.ndarray  # already scaled by sqrt(N)

    @property
    def resolution(self) -> int:
        return self.values.size

    def norm(self) -> float:
        """
        :return float: The L2 norm on [0, 1].
        """
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) / self.resolution))

    def evaluate(self, t: Union[float, np.ndarray]) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any((t < 0.) | (t > 1.)):
            _raise('Step signals are defined on [0, 1]')
        cells = np.minimum((t * self.resolution).astype(np.int64), self.resolution - 1)
        return self.values[cells]


def step_embed(x: np.ndarray, N: Optional[int] = None) -> StepSignal:
    """
    Embeds a signal on N vertices as the step function equal to sqrt(N) x_j on [(j-1)/N, j/N).

    :param np.ndarray x: The signal.
    :param Optional[int] N: Its resolution, checked against len(x) when given.
    :return StepSignal: A step function with the same norm as x.
    """
    x = np.asarray(x)
    N = x.size if N is None else int(N)
    if N < 1 or x.shape != (N,):
        _raise(f'Expected a signal of size {N} >= 1, got shape {x.shape}')
    return StepSignal(np.sqrt(N) * x)


def step_inner_product(f: StepSignal, g: StepSignal) -> complex:
    """
    L2 inner product of two step functions, <f, g> = integral of f conj(g).
    Integrated exactly over the common refinement of both partitions.
    """
    Nf, Ng = f.resolution, g.resolution
    L = int(np.lcm(Nf, Ng))
    cuts = np.union1d(np.arange(Nf + 1, dtype=np.int64) * (L // Nf), np.arange(Ng + 1, dtype=np.int64) * (L // Ng))
    starts, lengths = cuts[:-1], np.diff(cuts)
    products = f.values[starts // (L // Nf)] * np.conj(g.values[starts // (L // Ng)])
    return complex(np.sum(products * lengths) / L)


#############################
# Cayley structured section #
#############################


def uniform_cayley_spec(group: AbelianGroup, f: ConnectionFunction, N: int) -> SBMSpec:
    if N % group.n:
        _raise(f'N = {N} is not a multiple of the group order {group.n}')
    return SBMSpec(cayley_matrix(group, f), np.full(group.n, 1. / group.n), N)


def cayley_uniform_basis(group: AbelianGroup, f: ConnectionFunction, N: int, real: bool = True,
                         tolerances: Optional[Tolerances] = None) -> SBMFourierBasis:
    """
    The Fourier basis of a Cayley SBM with equal block sizes, straight from the characters:
    chi gives the W-eigenvector D chi / sqrt(N) with eigenvalue (N / n) sum_x f(x) conj(chi(x)).

    :param AbelianGroup group: The group.
    :param ConnectionFunction f: The connection function.
    :param int N: Number of vertices, a multiple of the group order.
    :param bool real: Use the real cosine / sine pairs instead of the characters.
    :param Optional[Tolerances] tolerances: Defaults to the tolerances of A_mu = A / n.
    :return SBMFourierBasis: The basis, eigenvalues decreasing.
    """
    spec = uniform_cayley_spec(group, f, N)
    n = group.n
    if real:
        real_basis = real_eigenpair_basis(group, f)
        vectors, values = real_basis.vectors, real_basis.eigenvalues
    else:
        vectors, values = character_matrix(group), cayley_eigenvalues(group, f)
    values = values / n
    order = np.argsort(-values, kind="stable")
    values, vectors = values[order], vectors[:, order]
    if tolerances is None:
        tolerances = Tolerances.for_matrix(float(np.max(np.abs(values))), n)
    A_mu = weighted_probability_matrix(spec.A, spec.mu)
    residuals = np.linalg.norm(A_mu @ vectors - vectors * values, axis=0)
    spectrum = Spectrum(values, vectors, residuals, tolerances)
    mask = spectrum.nonzero_mask
    signed = [index for index, keep in zip(spectrum.signed_indices(), mask) if keep]
    return _assemble_basis(spec, values[mask], vectors[:, mask], spectrum, tolerances, signed)


@dataclass(frozen=True, eq=False)
class MTildeSystem:
    group: AbelianGroup
    mu: np.ndarray
    mtilde: np.ndarray  # (n, n), U^H M U
    gamma: Optional[np.ndarray]  # Cayley eigenvalues in character order

    @property
    def product(self) -> np.ndarray:
        """
        :return np.ndarray: M~ Gamma, whose eigenvectors are the character coordinates of W's.
        """
        if self.gamma is None:
            _raise('No connection function given, M~ Gamma is undefined')
        return self.mtilde * self.gamma[None, :]

    def weighted_fourier_product(self) -> np.ndarray:
        """
        M~ Gamma written as weighted Fourier analysis on the group:
        entry (k, l) is (1/n) lambda_l <chi_l, chi_k> where the inner product is weighted by mu.
        """
        if self.gamma is None:
            _raise('No connection function given, M~ Gamma is undefined')
        table = character_table(self.group)
        gram = (table.conj().T * self.mu) @ table
        return gram * self.gamma[None, :] / self.group.n


def mtilde_system(group: AbelianGroup, mu: Sequence[float], f: Optional[ConnectionFunction] = None) -> MTildeSystem:
    """
    Builds M~ = U^H M U by direct summation over the group,
    M~_kl = (1/n) sum_j mu_j (chi_k^-1 chi_l)(g_j),
    and checks it against the matrix product.

    :param AbelianGroup group: The group.
    :param Sequence[float] mu: A block measure, one weight per group element.
    :param Optional[ConnectionFunction] f: The connection function giving Gamma.
    :return MTildeSystem: The system.
    """
    mu = validate_measure(mu)
    n = group.n
    if mu.size != n:
        _raise(f'Measure has {mu.size} blocks but the group has order {n}')
    table = character_table(group)
    # mean[c] = (1/n) sum_j mu_j chi_c(g_j) ; chi_k^-1 chi_l has exponents e_l - e_k.
    mean = (table.T @ mu) / n
    mtilde = mean[group.difference_indices()]
    U = character_matrix(group)
    direct = (U.conj().T * mu) @ U
    defect = float(np.max(np.abs(mtilde - direct)))
    if defect > Config.imaginary_tol:
        msg = f'M~ summation disagrees with U^H M U by {defect:.3g}'
        logging.critical(msg)
        raise ToleranceError(msg, [defect])
    gamma = cayley_eigenvalues(group, f) if f is not None else None
    return MTildeSystem(group, mu, mtilde, gamma)


@dataclass(frozen=True, eq=False)
class CayleyBasis:
    basis: SBMFourierBasis
    system: MTildeSystem
    z: np.ndarray  # (n, r) character coordinates of the basis vectors
    residuals: np.ndarray  # ||M~ Gamma z - lambda z|| per column


def general_cayley_basis(group: AbelianGroup, f: ConnectionFunction, mu: Sequence[float], N: int,
                         tolerances: Optional[Tolerances] = None) -> CayleyBasis:
    """
    Fourier basis of a Cayley SBM with arbitrary block sizes, with its character coordinates
    z = U^H D^T y / sqrt(N), which are eigenvectors of M~ Gamma for the same eigenvalue as A_mu.

    :param AbelianGroup group: The group.
    :param ConnectionFunction f: The connection function.
    :param Sequence[float] mu: The block measure.
    :param int N: Number of vertices.
    :param Optional[Tolerances] tolerances: Tolerances of the A_mu eigenproblem.
    :return CayleyBasis: The basis and its verified character coordinates.
    :raises ToleranceError: If some z is not an eigenvector of M~ Gamma.
    """
    spec = SBMSpec(cayley_matrix(group, f), mu, N)
    basis = sbm_fourier_basis(spec, tolerances)
    system = mtilde_system(group, spec.realized_measure, f)
    z = character_matrix(group).conj().T @ block_sums(spec.k, basis.lifted) / np.sqrt(N)
    residuals = np.linalg.norm(system.product @ z - z * basis.eigvals, axis=0)
    tol = Config.residual_rtol * max(1., float(np.max(np.abs(basis.eigvals), initial=0.)))
    if residuals.size and residuals.max() > tol:
        msg = f'Character coordinates are not eigenvectors of M~ Gamma: residual {residuals.max():.3g}'
        logging.critical(msg)
        raise ToleranceError(msg, residuals)
    return CayleyBasis(basis, system, z, residuals)


def one_large_block_spec(group: AbelianGroup, f: ConnectionFunction, tau: float, N: int) -> SBMSpec:
    """
    The model where the identity's block has measure 1 - (n - 1) tau and every other block tau.
    """
    n = group.n
    if not 0. < tau < 1. / n:
        _raise(f'tau must lie in (0, 1/{n}), got {tau!r}')
    if abs(tau * N - round(tau * N)) > INTEGRAL_ATOL:
        _raise(f'tau * N must be an integer, got {tau * N!r}')
    small = int(round(tau * N))
    sizes = [N - (n - 1) * small] + [small] * (n - 1)
    return SBMSpec.from_block_sizes(cayley_matrix(group, f), sizes)


@dataclass(frozen=True, eq=False)
class OneLargeBlockResult:
    spec: SBMSpec
    eigenvalue: float  # eigenvalue of W, N tau gamma
    vectors: np.ndarray  # (N, m - 1), orthonormal
    residuals: np.ndarray


def one_large_block_eigenvectors(group: AbelianGroup, f: ConnectionFunction, tau: float, N: int,
                                 eigengroup: CayleyEigengroup) -> OneLargeBlockResult:
    """
    When every block but the identity's has measure tau, a Cayley eigenvalue gamma of multiplicity m
    gives the W-eigenvalue N tau gamma with m - 1 explicit orthogonal eigenvectors
    V((i - 1) chi_{a_i} - sum_{j < i} chi_{a_j}), 1 < i <= m, all vanishing on the identity.

    :param AbelianGroup group: The group.
    :param ConnectionFunction f: The connection function.
    :param float tau: Measure of the small blocks, in (0, 1/n), tau * N integral.
    :param int N: Number of vertices.
    :param CayleyEigengroup eigengroup: Characters sharing the eigenvalue gamma.
    :return OneLargeBlockResult: The eigenvalue and its normalized eigenvectors.
    """
    m = eigengroup.multiplicity
    if m < 2:
        _raise('The eigengroup must hold at least two characters')
    spec = one_large_block_spec(group, f, tau, N)
    table = character_table(group)
    alphas = [char.index for char in eigengroup.characters]
    block_vectors = np.column_stack([
        ((i - 1) * table[:, alphas[i - 1]] - table[:, alphas[:i - 1]].sum(axis=1)) / np.sqrt(group.n)
        for i in range(2, m + 1)
    ])
    vectors = lift_vector(spec.k, block_vectors, isometric=True)
    vectors = canonicalize_signs(vectors / np.linalg.norm(vectors, axis=0))
    if np.max(np.abs(vectors.imag)) <= Config.imaginary_tol:
        vectors = vectors.real.copy()
    # N tau gamma, tau N being the size of the small blocks.
    eigenvalue = spec.k[1] * eigengroup.value
    residuals = np.linalg.norm(model_operator(spec).matmat(vectors) - eigenvalue * vectors, axis=0)
    tol = Config.residual_rtol * spec.N
    if residuals.max() > tol:
        msg = f'Constructed vectors are not eigenvectors of W: residual {residuals.max():.3g} > {tol:.3g}'
        logging.critical(msg)
        raise ToleranceError(msg, residuals)
    return OneLargeBlockResult(spec, float(eigenvalue), vectors, residuals)


@dataclass(frozen=True, eq=False)
class TransferredBasis:
    spec: SBMSpec
    vectors: np.ndarray  # (N, n), V phi_i
    eigenvalues: np.ndarray  # Cayley eigenvalue of each phi_i
    groups: List[tuple]  # column positions sharing a Cayley eigenvalue


def transferred_character_basis(group: AbelianGroup, f: ConnectionFunction, mu: Sequence[float],
                                N: int) -> TransferredBasis:
    """
    Lifts the real eigenbasis of the Cayley matrix with V.
    The result is orthonormal, but only an eigenbasis of W when the blocks have equal sizes.
    """
    spec = SBMSpec(cayley_matrix(group, f), mu, N)
    real_basis = real_eigenpair_basis(group, f)
    return TransferredBasis(
        spec=spec,
        vectors=lift_vector(spec.k, real_basis.vectors, isometric=True),
        eigenvalues=real_basis.eigenvalues,
        groups=real_basis.groups,
    )


@dataclass(frozen=True, eq=False)
class BasisAgreement:
    values: np.ndarray  # one per compared vector, in [0, 1] ; nan when left unmatched
    matches: np.ndarray  # matched basis column, -1 when left unmatched
    paired: np.ndarray  # vector i against the i-th basis column by magnitude, nan past the rank


def basis_agreement(vectors: np.ndarray, basis: SBMFourierBasis) -> BasisAgreement:
    """
    Measures how well unit vectors agree with the eigenspaces of an SBM Fourier basis.
    Vectors are matched one-to-one with basis columns, maximizing the total squared overlap ;
    each value is then the norm of the projection of the vector on the eigengroup of its match.
    For a simple eigenvalue this is |<vector, basis vector>|.
    `paired` skips the matching and compares the i-th vector with the i-th basis column by eigenvalue magnitude,
    which is what the matching finds when both spectra are well separated.

    :param np.ndarray vectors: Unit vectors of size N, as columns.
    :param SBMFourierBasis basis: The reference basis.
    :return BasisAgreement: The agreement values and matches.
    """
    vectors = np.asarray(vectors)
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    if vectors.shape[0] != basis.N:
        _raise(f'Expected vectors of size {basis.N}, got {vectors.shape[0]}')
    overlaps = np.abs(vectors.conj().T @ basis.lifted) ** 2
    rows, cols = linear_sum_assignment(-overlaps)
    values = np.full(vectors.shape[1], np.nan)
    matches = np.full(vectors.shape[1], -1, dtype=np.int64)
    for i, j in zip(rows, cols):
        group = basis.group_of(int(j))
        values[i] = min(1., float(np.linalg.norm(group.basis.conj().T @ vectors[:, i])))
        matches[i] = j
    paired = np.full(vectors.shape[1], np.nan)
    for i, j in enumerate(basis.by_magnitude()[:vectors.shape[1]]):
        group = basis.group_of(int(j))
        paired[i] = min(1., float(np.linalg.norm(group.basis.conj().T @ vectors[:, i])))
    return BasisAgreement(values, matches, paired)

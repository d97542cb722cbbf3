# -*- coding: UTF8 -*-

"""
Symmetric eigen-decompositions, signed eigenvalue indexing,
eigengroups, spectral gaps and distances between eigenspaces.

Eigenvalues are sorted in decreasing order. Positive eigenvalues are numbered
1, 2, ... from the largest ; negative ones -1, -2, ... from the most negative.
"""

import logging

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, aslinearoperator, eigsh

from .config import Config
from .utils import write_csv
from .errors import ConvergenceError, ValidationError

# Relative margin under which two entries count as the same largest magnitude.
SIGN_TIE_RTOL = 1e-9

Operator = Union[np.ndarray, sp.spmatrix, LinearOperator]


@dataclass(frozen=True)
class Tolerances:
    zero_tol: float
    group_tol: float
    residual_tol: float

    def __post_init__(self):
        for name in ("zero_tol", "group_tol", "residual_tol"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < 0.:
                msg = f'Tolerance {name} must be a finite nonnegative number, got {value!r}'
                logging.error(msg)
                raise ValidationError(msg)
            object.__setattr__(self, name, value)

    @classmethod
    def for_matrix(cls, norm: float, size: int, **overrides) -> "Tolerances":
        """
        Default tolerances for an operator of norm `norm` acting on a space of dimension `size`.
        Keyword arguments replace the corresponding default.
        """
        defaults = {
            "zero_tol": Config.zero_tol_factor * size * np.finfo(float).eps * norm,
            "group_tol": Config.group_rtol * norm,
            "residual_tol": Config.residual_rtol * norm,
        }
        defaults.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**defaults)

    def to_dict(self) -> dict:
        return {
            "zero_tol": self.zero_tol,
            "group_tol": self.group_tol,
            "residual_tol": self.residual_tol,
        }


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray  # decreasing
    eigenvectors: np.ndarray  # one column per eigenvalue
    residuals: np.ndarray
    tolerances: Tolerances
    complete: bool = True

    def __len__(self) -> int:
        return self.eigenvalues.size

    @property
    def dimension(self) -> int:
        return self.eigenvectors.shape[0]

    @property
    def nonzero_mask(self) -> np.ndarray:
        return np.abs(self.eigenvalues) > self.tolerances.zero_tol

    @property
    def n_plus(self) -> int:
        return int(np.sum(self.eigenvalues > self.tolerances.zero_tol))

    @property
    def n_minus(self) -> int:
        return int(np.sum(self.eigenvalues < -self.tolerances.zero_tol))

    def signed_indices(self) -> List[int]:
        """
        :return List[int]: The signed index of every position ; zero eigenvalues get 0.
        """
        indices = []
        for position, value in enumerate(self.eigenvalues):
            if value > self.tolerances.zero_tol:
                indices.append(position + 1)
            elif value < -self.tolerances.zero_tol:
                indices.append(position - len(self))
            else:
                indices.append(0)
        return indices

    def position(self, signed_index: int) -> int:
        if signed_index > 0 and signed_index <= self.n_plus:
            return signed_index - 1
        if signed_index < 0 and -signed_index <= self.n_minus:
            return len(self) + signed_index
        msg = f'No eigenvalue with index {signed_index} (computed: {self.n_plus} positive, {self.n_minus} negative)'
        logging.error(msg)
        raise ValidationError(msg)

    def pair(self, signed_index: int) -> Tuple[float, np.ndarray]:
        position = self.position(signed_index)
        return float(self.eigenvalues[position]), self.eigenvectors[:, position]

    def by_magnitude(self) -> np.ndarray:
        """
        :return np.ndarray: Positions sorted by decreasing |lambda|, the positive one first on ties.
        """
        return np.lexsort((-self.eigenvalues, -np.abs(self.eigenvalues)))

    def to_rows(self) -> List[Tuple[int, float, float]]:
        return [
            (index, float(value), float(residual))
            for index, value, residual in zip(self.signed_indices(), self.eigenvalues, self.residuals)
        ]


def write_spectrum_csv(path: str, spectrum: Spectrum, manifest: Optional[str] = None, scale: float = 1.) -> str:
    rows = [(index, value * scale, residual) for index, value, residual in spectrum.to_rows()]
    return write_csv(path, ("index", "eigenvalue", "residual"), rows, manifest=manifest)


def canonicalize_signs(vectors: np.ndarray) -> np.ndarray:
    """
    Multiplies every column by a unit scalar so that its first entry
    of largest magnitude becomes real and positive.

    :param np.ndarray vectors: A vector or a matrix of column vectors.
    :return np.ndarray: A new array of the same shape.
    """
    vectors = np.array(vectors, dtype=complex if np.iscomplexobj(vectors) else float)
    flat = vectors.ndim == 1
    if flat:
        vectors = vectors[:, None]
    for j in range(vectors.shape[1]):
        magnitudes = np.abs(vectors[:, j])
        top = magnitudes.max() if magnitudes.size else 0.
        if top == 0.:
            continue
        i = int(np.argmax(magnitudes >= (1. - SIGN_TIE_RTOL) * top))
        vectors[:, j] = vectors[:, j] * (np.conj(vectors[i, j]) / magnitudes[i])
    return vectors[:, 0] if flat else vectors


def _residuals(apply, vectors: np.ndarray, values: np.ndarray) -> np.ndarray:
    if vectors.shape[1] == 0:
        return np.zeros(0)
    return np.linalg.norm(apply(vectors) - vectors * values, axis=0)


def _check_residuals(residuals: np.ndarray, tol: float, what: str) -> None:
    if residuals.size and residuals.max() > tol:
        msg = f'{what}: residual {residuals.max():.3g} exceeds tolerance {tol:.3g}'
        logging.error(msg)
        raise ConvergenceError(msg, residuals)


def check_symmetric(S: np.ndarray) -> np.ndarray:
    S = np.asarray(S)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        msg = f'Expected a square matrix, got shape {S.shape}'
        logging.error(msg)
        raise ValidationError(msg)
    if np.iscomplexobj(S):
        msg = 'Expected a real symmetric matrix'
        logging.error(msg)
        raise ValidationError(msg)
    scale = max(1., float(np.max(np.abs(S)))) if S.size else 1.
    if S.size and np.max(np.abs(S - S.T)) > Config.symmetry_rtol * scale:
        msg = f'Matrix is not symmetric: max |S - S^T| = {np.max(np.abs(S - S.T)):.3g}'
        logging.error(msg)
        raise ValidationError(msg)
    return (S + S.T) / 2


def symmetric_eigendecomposition(S: np.ndarray, tolerances: Optional[Tolerances] = None) -> Spectrum:
    """
    Full eigen-decomposition of a real symmetric matrix.

    :param np.ndarray S: An (m, m) real symmetric matrix.
    :param Optional[Tolerances] tolerances: Defaults to `Tolerances.for_matrix(||S||, m)`.
    :return Spectrum: Every eigenpair, eigenvalues decreasing, signs canonicalized.
    """
    S = check_symmetric(S)
    values, vectors = la.eigh(S)
    values = values[::-1].copy()
    vectors = canonicalize_signs(vectors[:, ::-1])
    if tolerances is None:
        norm = float(np.max(np.abs(values))) if values.size else 0.
        tolerances = Tolerances.for_matrix(norm, S.shape[0])
    residuals = _residuals(lambda X: S @ X, vectors, values)
    _check_residuals(residuals, tolerances.residual_tol + np.finfo(float).tiny, 'Dense eigensolver')
    if Config.log_solver:
        logging.debug(f'Decomposed a {S.shape[0]}x{S.shape[0]} matrix, max residual {residuals.max(initial=0.):.3g}')
    return Spectrum(values, vectors, residuals, tolerances)


def top_bottom_eigenpairs(S: Operator, p: int, tolerances: Optional[Tolerances] = None,
                          max_iterations: Optional[int] = None) -> Spectrum:
    """
    Computes the p eigenpairs of largest magnitude of a symmetric operator,
    with an implicitly restarted Lanczos iteration from a seeded starting vector.

    :param S: A symmetric matrix, sparse matrix or LinearOperator.
    :param int p: Number of eigenpairs, at most `Config.max_partial_eigenpairs`.
    :param Optional[Tolerances] tolerances: Defaults to `Tolerances.for_matrix(max |lambda|, m)`.
    :param Optional[int] max_iterations: Restart cap, `Config.solver_max_iterations` by default.
    :return Spectrum: A partial spectrum (eigenvalues decreasing).
    :raises ConvergenceError: If the iteration cap is hit or residuals are too large.
    """
    m = S.shape[0]
    if S.shape != (m, m):
        msg = f'Expected a square operator, got shape {S.shape}'
        logging.error(msg)
        raise ValidationError(msg)
    if not 1 <= p <= min(Config.max_partial_eigenpairs, m):
        msg = f'Cannot compute {p} eigenpairs of a {m}x{m} operator (at most {Config.max_partial_eigenpairs})'
        logging.error(msg)
        raise ValidationError(msg)
    max_iterations = Config.solver_max_iterations if max_iterations is None else max_iterations

    if p >= m - 1:
        # The Lanczos solver needs p < m - 1 ; small problems are solved densely.
        if isinstance(S, LinearOperator):
            dense = S.matmat(np.eye(m))
        elif sp.issparse(S):
            dense = S.toarray()
        else:
            dense = np.asarray(S)
        full = symmetric_eigendecomposition(dense, tolerances)
        keep = np.sort(full.by_magnitude()[:p])
        return Spectrum(full.eigenvalues[keep], full.eigenvectors[:, keep], full.residuals[keep],
                        full.tolerances, complete=(p == m))

    operator = aslinearoperator(S)
    v0 = np.random.default_rng(Config.solver_seed).uniform(-1., 1., m)
    ncv = min(m, max(2 * p + 1, Config.solver_krylov_size))
    try:
        values, vectors = eigsh(operator, k=p, which='LM', v0=v0, ncv=ncv, maxiter=max_iterations,
                                tol=Config.residual_rtol)
    except ArpackNoConvergence as e:
        residuals = _residuals(operator.matmat, e.eigenvectors, e.eigenvalues) if e.eigenvalues.size else []
        msg = f'Lanczos iteration did not converge after {max_iterations} restarts ' \
              f'({e.eigenvalues.size}/{p} eigenpairs found)'
        logging.error(msg)
        raise ConvergenceError(msg, residuals)

    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = canonicalize_signs(vectors[:, order])
    if tolerances is None:
        tolerances = Tolerances.for_matrix(float(np.max(np.abs(values))), m)
    residuals = _residuals(operator.matmat, vectors, values)
    _check_residuals(residuals, tolerances.residual_tol + np.finfo(float).tiny, 'Lanczos iteration')
    if Config.log_solver:
        logging.debug(f'Found {p} extreme eigenpairs of a {m}x{m} operator, max residual {residuals.max():.3g}')
    return Spectrum(values, vectors, residuals, tolerances, complete=False)


@dataclass(frozen=True, eq=False)
class EigenGroup:
    value: float
    positions: Tuple[int, ...]  # positions in the eigenvalue array the group was built from
    signed_indices: Tuple[int, ...]
    basis: np.ndarray  # orthonormal columns
    gap: float = field(default=np.inf)

    @property
    def multiplicity(self) -> int:
        return len(self.positions)


def _cluster(values: np.ndarray, tol: float) -> List[List[int]]:
    # Transitive clustering of a decreasing sequence.
    clusters: List[List[int]] = []
    for position, value in enumerate(values):
        if clusters and values[clusters[-1][-1]] - value <= tol:
            clusters[-1].append(position)
        else:
            clusters.append([position])
    return clusters


def group_eigenpairs(values: np.ndarray, vectors: np.ndarray, tol: float,
                     signed_indices: Optional[Sequence[int]] = None) -> List[EigenGroup]:
    """
    Groups eigenpairs whose eigenvalues lie within `tol` of each other (transitively).

    :param np.ndarray values: Decreasing eigenvalues.
    :param np.ndarray vectors: Matching orthonormal eigenvectors, as columns.
    :param float tol: Grouping tolerance.
    :param signed_indices: Signed index of each pair, positions + 1 by default.
    :return List[EigenGroup]: The groups, by decreasing value, with their spectral gaps.
    """
    values = np.asarray(values, dtype=float)
    if values.size > 1 and np.any(np.diff(values) > 0):
        msg = 'Eigenvalues must be sorted in decreasing order to be grouped'
        logging.error(msg)
        raise ValidationError(msg)
    if signed_indices is None:
        signed_indices = list(range(1, values.size + 1))
    clusters = _cluster(values, tol)
    representatives = [float(np.mean(values[cluster])) for cluster in clusters]
    groups = []
    for cluster, value in zip(clusters, representatives):
        groups.append(EigenGroup(
            value=value,
            positions=tuple(cluster),
            signed_indices=tuple(int(signed_indices[i]) for i in cluster),
            basis=vectors[:, cluster],
            gap=_gap(representatives, value),
        ))
    return groups


def _gap(representatives: Sequence[float], value: float, include_zero: bool = False) -> float:
    others = [abs(value - other) for other in representatives if other != value]
    if include_zero and value != 0.:
        others.append(abs(value))
    return min(others) if others else np.inf


def group_eigenvalues(spectrum: Spectrum, tol: Optional[float] = None) -> List[EigenGroup]:
    """
    Partitions the nonzero eigenpairs of a spectrum into eigengroups.

    :param Spectrum spectrum: The spectrum.
    :param Optional[float] tol: Grouping tolerance, `spectrum.tolerances.group_tol` by default.
    :return List[EigenGroup]: The groups, by decreasing eigenvalue.
    """
    tol = spectrum.tolerances.group_tol if tol is None else tol
    mask = spectrum.nonzero_mask
    signed = [index for index, keep in zip(spectrum.signed_indices(), mask) if keep]
    groups = group_eigenpairs(spectrum.eigenvalues[mask], spectrum.eigenvectors[:, mask], tol, signed)
    positions = np.flatnonzero(mask)
    # Positions refer to the full spectrum, not to its nonzero part.
    return [
        EigenGroup(g.value, tuple(int(positions[i]) for i in g.positions), g.signed_indices, g.basis, g.gap)
        for g in groups
    ]


def spectral_gap(groups: Sequence[EigenGroup], value: float, include_zero: bool = False) -> float:
    """
    Distance from `value` to the nearest other eigengroup.

    :param groups: The eigengroups.
    :param float value: The eigenvalue of one of the groups.
    :param bool include_zero: Whether 0 counts as a neighbour (singular matrices).
    :return float: The gap, +inf when there is no other eigenvalue.
    """
    representatives = [g.value for g in groups]
    if not representatives:
        return np.inf
    nearest = min(representatives, key=lambda r: abs(r - value))
    return _gap(representatives, nearest, include_zero)


def spectral_projection(group: Union[EigenGroup, np.ndarray], x: np.ndarray) -> np.ndarray:
    """
    Projects x on the span of an eigengroup: sum_i <x, phi_i> phi_i.

    :param group: An EigenGroup, or an orthonormal basis as columns.
    :param np.ndarray x: A vector, or a matrix of column vectors.
    :return np.ndarray: The projection.
    """
    basis = group.basis if isinstance(group, EigenGroup) else np.asarray(group)
    x = np.asarray(x)
    if x.shape[0] != basis.shape[0]:
        msg = f'Cannot project a vector of size {x.shape[0]} on a subspace of C^{basis.shape[0]}'
        logging.error(msg)
        raise ValidationError(msg)
    return basis @ (basis.conj().T @ x)


@dataclass(frozen=True, eq=False)
class ProjectionDistance:
    frobenius: float  # ||P_A - P_B||_F
    operator: float  # ||P_A - P_B||_opr
    sines: np.ndarray  # sines of the principal angles, decreasing


def _orthonormality_defect(basis: np.ndarray) -> float:
    if basis.shape[1] == 0:
        return 0.
    return float(np.max(np.abs(basis.conj().T @ basis - np.eye(basis.shape[1]))))


def projection_distance(basis_a: np.ndarray, basis_b: np.ndarray) -> ProjectionDistance:
    """
    Distance between the orthogonal projections on two subspaces of equal dimension.
    The sines of the principal angles are the singular values of (I - P_B) A,
    which keeps small angles accurate.

    :param np.ndarray basis_a: Orthonormal columns.
    :param np.ndarray basis_b: Orthonormal columns, same shape.
    :return ProjectionDistance: Frobenius and operator norms of P_A - P_B.
    """
    basis_a = np.asarray(basis_a)
    basis_b = np.asarray(basis_b)
    if basis_a.ndim == 1:
        basis_a = basis_a[:, None]
    if basis_b.ndim == 1:
        basis_b = basis_b[:, None]
    if basis_a.shape != basis_b.shape:
        msg = f'Cannot compare subspaces given by bases of shapes {basis_a.shape} and {basis_b.shape}'
        logging.error(msg)
        raise ValidationError(msg)
    if max(_orthonormality_defect(basis_a), _orthonormality_defect(basis_b)) > 1e-8:
        msg = 'Subspace bases must be orthonormal'
        logging.error(msg)
        raise ValidationError(msg)
    if basis_a.shape[1] == 0:
        return ProjectionDistance(0., 0., np.zeros(0))
    residual = basis_a - basis_b @ (basis_b.conj().T @ basis_a)
    sines = np.clip(la.svdvals(residual), 0., 1.)
    return ProjectionDistance(
        frobenius=float(np.sqrt(2.) * np.linalg.norm(sines)),
        operator=float(sines.max()),
        sines=sines,
    )

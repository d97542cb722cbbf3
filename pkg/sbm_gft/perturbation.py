# -*- coding: UTF8 -*-

"""
Sensitivity of the SBM Fourier basis to block-size perturbations.

Block i keeps its edge probabilities but its measure becomes mu_i (1 + eps_i),
with sum_i mu_i eps_i = 0 and |eps_i| <= eps.
Bounds are compared with what actually happens to the eigenspaces.
"""

import logging

import numpy as np
import scipy.linalg as la

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from .config import Config
from .jobs import Job, Jobs
from .errors import CorrespondenceError, ValidationError
from .fourier import default_tolerances
from .sbm_model import SBMSpec, isometry, validate_measure, weighted_probability_matrix
from .spectral import (
    EigenGroup,
    Spectrum,
    Tolerances,
    group_eigenvalues,
    projection_distance,
    spectral_gap,
    symmetric_eigendecomposition,
)

SWEEP_HEADER = (
    "trial", "epsilon", "realized_epsilon", "lambda", "d", "gamma", "bound",
    "empirical_op", "empirical_signal", "v_dist", "v_bound", "shift", "shift_bound",
)


def _raise(msg: str):
    logging.error(msg)
    raise ValidationError(msg)


@dataclass(frozen=True, eq=False)
class MeasurePerturbation:
    mu: np.ndarray
    eps_vec: np.ndarray

    @property
    def perturbed(self) -> np.ndarray:
        return self.mu * (1. + self.eps_vec)

    @property
    def epsilon(self) -> float:
        return float(np.max(np.abs(self.eps_vec)))


def perturb_measure(mu: Sequence[float], epsilon: Optional[float] = None, seed: Optional[int] = None,
                    eps_vec: Optional[Sequence[float]] = None,
                    rng: Optional[np.random.Generator] = None) -> MeasurePerturbation:
    """
    Draws (or checks) relative perturbations eps_i of a block measure.
    Random draws are uniform in [-1, 1], centered so that sum_i mu_i eps_i = 0,
    then scaled so that max |eps_i| = epsilon exactly.
    A draw that would bring some eps_i to -1 is negated, so every perturbed block keeps a positive measure.

    :param mu: The block measure.
    :param Optional[float] epsilon: Perturbation size, in [0, 1].
    :param Optional[int] seed: Seed of the draw, when no generator is given.
    :param eps_vec: Explicit perturbations, used instead of a draw.
    :param Optional[np.random.Generator] rng: Generator to draw from.
    :return MeasurePerturbation: The perturbation.
    """
    mu = validate_measure(mu)
    n = mu.size
    if eps_vec is not None:
        eps_vec = np.array(eps_vec, dtype=float)
        if eps_vec.shape != (n,) or not np.all(np.isfinite(eps_vec)):
            _raise(f'Expected {n} finite perturbations, got {eps_vec}')
        if np.max(np.abs(eps_vec)) > 1. or np.any(eps_vec <= -1.):
            _raise(f'Perturbations must lie in (-1, 1], got {eps_vec}')
        if epsilon is not None and np.max(np.abs(eps_vec)) > epsilon + Config.measure_atol:
            _raise(f'Perturbations {eps_vec} exceed epsilon = {epsilon}')
        if abs(float(mu @ eps_vec)) > Config.measure_atol:
            _raise(f'Perturbations must keep the total measure: sum mu_i eps_i = {float(mu @ eps_vec)!r}')
        return MeasurePerturbation(mu, eps_vec)

    if epsilon is None or not 0. <= epsilon <= 1.:
        _raise(f'epsilon must lie in [0, 1], got {epsilon!r}')
    if epsilon == 0.:
        return MeasurePerturbation(mu, np.zeros(n))
    if n == 1:
        _raise('A single block cannot be perturbed while keeping its measure equal to 1')
    rng = np.random.default_rng(seed) if rng is None else rng
    u = rng.uniform(-1., 1., n)
    u -= mu @ u
    top = np.max(np.abs(u))
    if top == 0.:
        _raise('Drew a null perturbation direction')
    if 1. + u.min() * (epsilon / top) <= Config.measure_atol:
        # A block would lose all of its measure ; the opposite direction keeps it.
        u = -u
    eps_vec = u * (epsilon / top)
    if np.any(1. + eps_vec <= Config.measure_atol):
        _raise(f'epsilon = {epsilon} empties a block of {mu} in both directions of the draw')
    return MeasurePerturbation(mu, eps_vec)


def perturbed_spec(spec: SBMSpec, perturbation: MeasurePerturbation) -> SBMSpec:
    return SBMSpec(spec.A, perturbation.perturbed, spec.N)


def realized_epsilon(k: Sequence[int], k_prime: Sequence[int]) -> float:
    """
    :return float: max_i |k'_i / k_i - 1|, the perturbation size actually carried by integer block sizes.
    """
    k = np.asarray(k, dtype=float)
    k_prime = np.asarray(k_prime, dtype=float)
    if k.shape != k_prime.shape:
        _raise(f'Block sizes {k} and {k_prime} have different lengths')
    return float(np.max(np.abs(k_prime / k - 1.)))


##################
# Bounds section #
##################


def v_distance_bound(mu: Sequence[float], epsilon: float, n: Optional[int] = None) -> float:
    """
    Upper bound on ||V - V'||_opr: sqrt(3 n / mu_min) sqrt(epsilon).
    """
    mu = validate_measure(mu)
    if epsilon < 0.:
        _raise(f'epsilon must be nonnegative, got {epsilon!r}')
    n = mu.size if n is None else n
    return float(np.sqrt(3. * n / mu.min()) * np.sqrt(epsilon))


def empirical_v_distance(k: Sequence[int], k_prime: Sequence[int]) -> float:
    """
    :return float: ||V - V'||_opr, the largest singular value of the (N, n) difference.
    """
    if len(k) != len(k_prime) or sum(k) != sum(k_prime):
        _raise(f'Block sizes {tuple(k)} and {tuple(k_prime)} do not describe the same N and n')
    return float(la.svdvals(isometry(k) - isometry(k_prime)).max())


def davis_kahan_bound(eigenvalues: Union[Spectrum, Sequence[float]], delta_op: float, delta_frob: float,
                      r: int, s: int) -> float:
    """
    Bound on ||P_E - P_E~||_F where E is spanned by the eigenvectors r..s (1-based, eigenvalues decreasing)
    of a symmetric matrix and E~ by the same ones of its perturbation:
    2^(3/2) min(sqrt(d) ||Delta||_opr, ||Delta||_F) / min(lambda_(r-1) - lambda_r, lambda_s - lambda_(s+1)),
    with lambda_0 = +inf and lambda_(m+1) = -inf.

    :param eigenvalues: The unperturbed eigenvalues, decreasing, or their Spectrum.
    :param float delta_op: Operator norm of the perturbation.
    :param float delta_frob: Frobenius norm of the perturbation.
    :param int r: First index of the eigenspace.
    :param int s: Last index of the eigenspace.
    :return float: The bound.
    """
    values = np.asarray(eigenvalues.eigenvalues if isinstance(eigenvalues, Spectrum) else eigenvalues, dtype=float)
    m = values.size
    if not 1 <= r <= s <= m:
        _raise(f'Invalid eigenspace range {r}..{s} for {m} eigenvalues')
    above = values[r - 2] - values[r - 1] if r > 1 else np.inf
    below = values[s - 1] - values[s] if s < m else np.inf
    gap = min(above, below)
    if gap <= 0.:
        _raise(f'Eigenvalues {r}..{s} are not separated from their neighbours')
    d = s - r + 1
    return float(2 ** 1.5 * min(np.sqrt(d) * delta_op, delta_frob) / gap)


@dataclass(frozen=True)
class DavisKahanCheck:
    empirical: float  # ||P_E - P_E~||_F
    bound: float


def davis_kahan_check(A: np.ndarray, A_tilde: np.ndarray, r: int, s: int) -> DavisKahanCheck:
    """
    Compares the actual eigenspace drift between two symmetric matrices with its bound.
    """
    spectrum = symmetric_eigendecomposition(A)
    spectrum_tilde = symmetric_eigendecomposition(A_tilde)
    if spectrum.dimension != spectrum_tilde.dimension:
        _raise('Matrices must have the same size')
    E = spectrum.eigenvectors[:, r - 1:s]
    E_tilde = spectrum_tilde.eigenvectors[:, r - 1:s]
    delta = np.asarray(A_tilde) - np.asarray(A)
    bound = davis_kahan_bound(spectrum, float(np.linalg.norm(delta, 2)), float(np.linalg.norm(delta, 'fro')), r, s)
    return DavisKahanCheck(projection_distance(E, E_tilde).frobenius, bound)


def projection_error_bound(d: int, gap: float, norm_a_mu: float, n: int, epsilon: float, mu_min: float) -> float:
    """
    Bound on ||x_hat(lambda) - sum_i <x, y'_i> y'_i|| for a unit signal x,
    where the y'_i span the eigenspace matching lambda once block sizes are perturbed by epsilon:
    2^(5/2) sqrt(d) ||A_mu|| / gamma * n epsilon + 2 sqrt(3) / sqrt(mu_min) * sqrt(n epsilon).

    :param int d: Multiplicity of lambda.
    :param float gap: Spectral gap gamma(lambda).
    :param float norm_a_mu: Operator norm of A_mu.
    :param int n: Number of blocks.
    :param float epsilon: Perturbation size, at most 1.
    :param float mu_min: Smallest block measure.
    :return float: The bound, to be multiplied by ||x|| for other signals.
    """
    if gap <= 0.:
        _raise(f'The spectral gap must be positive, got {gap!r}')
    if not 0. <= epsilon <= 1.:
        _raise(f'epsilon must lie in [0, 1], got {epsilon!r}')
    if mu_min <= 0.:
        _raise(f'The smallest block measure must be positive, got {mu_min!r}')
    return float(
        2 ** 2.5 * np.sqrt(d) * norm_a_mu / gap * n * epsilon
        + 2. * np.sqrt(3.) / np.sqrt(mu_min) * np.sqrt(n * epsilon)
    )


#####################
# Empirical section #
#####################


@dataclass(frozen=True)
class PerturbationEntry:
    value: float  # eigenvalue of A_mu
    d: int
    gap: float
    norm: float  # ||A_mu||_opr
    bound: float
    empirical_op: float  # ||P_E - P_E'||_opr
    empirical_signal: float  # largest error over the random signals
    v_distance: float
    v_bound: float


@dataclass(frozen=True, eq=False)
class PerturbationReport:
    k: Tuple[int, ...]
    k_prime: Tuple[int, ...]
    requested_epsilon: float
    epsilon: float  # realized
    shift: float  # ||A_mu' - A_mu||_opr
    shift_bound: float  # 2 epsilon n ||A_mu||_opr
    entries: List[PerturbationEntry]
    groups: List[EigenGroup]  # nonzero eigengroups of A_mu, one per entry


def _check_correspondence(values: np.ndarray, r: int, s: int, tol: float) -> None:
    # Eigenvalues r..s of the perturbed matrix must be clearly apart from their neighbours.
    m = values.size
    if (r > 1 and values[r - 2] - values[r - 1] <= tol) or (s < m and values[s - 1] - values[s] <= tol):
        msg = f'Perturbed eigenvalues {r}..{s} are not separated from their neighbours, ' \
              f'the matching eigenspace is ambiguous'
        logging.error(msg)
        raise CorrespondenceError(msg)


def empirical_projection_error(spec: SBMSpec, perturbation: MeasurePerturbation, eigen_index: int,
                               signals: int = 0, seed: Optional[int] = None,
                               rng: Optional[np.random.Generator] = None) -> Tuple[float, float]:
    """
    Measures how far one eigenspace of the model moves under a perturbation.

    :param SBMSpec spec: The model.
    :param MeasurePerturbation perturbation: The perturbation of its realized measure.
    :param int eigen_index: Signed index of an eigenvalue of A_mu ; its whole eigengroup is measured.
    :param int signals: Number of random unit signals to try.
    :param Optional[int] seed: Seed of the signals, when no generator is given.
    :param Optional[np.random.Generator] rng: Generator of the signals.
    :return Tuple[float, float]: ||P_E - P_E'||_opr, and the largest error over the signals.
    """
    rng = np.random.default_rng(seed) if rng is None else rng
    report = perturbation_report(spec, perturbation, signals, rng)
    for group_index, group in enumerate(report.groups):
        if eigen_index in group.signed_indices:
            entry = report.entries[group_index]
            return entry.empirical_op, entry.empirical_signal
    _raise(f'No nonzero eigenvalue of A_mu with index {eigen_index}')


def perturbation_report(spec: SBMSpec, perturbation: MeasurePerturbation, signals: int = 0,
                        rng: Optional[np.random.Generator] = None,
                        tolerances: Optional[Tolerances] = None) -> PerturbationReport:
    """
    Compares every nonzero eigenspace of a model with the matching eigenspace of its perturbation.
    Eigenspaces are matched by position in the decreasing spectrum of A_mu.
    Bounds use the realized perturbation max |k'_i / k_i - 1|.

    :param SBMSpec spec: The model.
    :param MeasurePerturbation perturbation: A perturbation of `spec.realized_measure`.
    :param int signals: Number of random unit signals used for the signal-level error.
    :param Optional[np.random.Generator] rng: Generator of those signals.
    :param Optional[Tolerances] tolerances: Tolerances of the unperturbed A_mu.
    :return PerturbationReport: One entry per nonzero eigengroup.
    :raises CorrespondenceError: If a perturbed eigenspace cannot be told apart from its neighbours.
    """
    spec_prime = perturbed_spec(spec, perturbation)
    k, k_prime = spec.k, spec_prime.k
    epsilon = realized_epsilon(k, k_prime)
    mu = spec.realized_measure
    n = spec.n

    tolerances = default_tolerances(spec) if tolerances is None else tolerances
    A_mu = weighted_probability_matrix(spec.A, mu)
    A_mu_prime = weighted_probability_matrix(spec.A, spec_prime.realized_measure)
    spectrum = symmetric_eigendecomposition(A_mu, tolerances)
    spectrum_prime = symmetric_eigendecomposition(A_mu_prime)
    groups = group_eigenvalues(spectrum)
    singular = not bool(np.all(spectrum.nonzero_mask))
    norm = float(np.max(np.abs(spectrum.eigenvalues)))

    V, V_prime = isometry(k), isometry(k_prime)
    v_distance = empirical_v_distance(k, k_prime)
    v_bound = v_distance_bound(mu, epsilon)

    if signals > 0:
        rng = np.random.default_rng() if rng is None else rng
        X = rng.standard_normal((spec.N, signals))
        X /= np.linalg.norm(X, axis=0)
    else:
        X = np.zeros((spec.N, 0))

    entries = []
    for group in groups:
        r, s = group.positions[0] + 1, group.positions[-1] + 1
        _check_correspondence(spectrum_prime.eigenvalues, r, s, tolerances.group_tol)
        E = V @ spectrum.eigenvectors[:, r - 1:s]
        E_prime = V_prime @ spectrum_prime.eigenvectors[:, r - 1:s]
        errors = np.linalg.norm(E @ (E.T @ X) - E_prime @ (E_prime.T @ X), axis=0)
        gap = spectral_gap(groups, group.value, include_zero=singular)
        entries.append(PerturbationEntry(
            value=group.value,
            d=s - r + 1,
            gap=gap,
            norm=norm,
            bound=projection_error_bound(s - r + 1, gap, norm, n, epsilon, float(mu.min())),
            empirical_op=projection_distance(E, E_prime).operator,
            empirical_signal=float(errors.max(initial=0.)),
            v_distance=v_distance,
            v_bound=v_bound,
        ))

    return PerturbationReport(
        k=k,
        k_prime=k_prime,
        requested_epsilon=perturbation.epsilon,
        epsilon=epsilon,
        shift=float(np.linalg.norm(A_mu_prime - A_mu, 2)),
        shift_bound=2. * epsilon * n * norm,
        entries=entries,
        groups=groups,
    )


def _sweep_trial(spec: SBMSpec, epsilon: float, epsilon_index: int, trial: int, signals: int,
                 seed: int) -> List[tuple]:
    # One stream per (seed, epsilon, trial): trials never share draws.
    rng = np.random.default_rng([seed, epsilon_index, trial])
    perturbation = perturb_measure(spec.realized_measure, epsilon, rng=rng)
    report = perturbation_report(spec, perturbation, signals, rng)
    return [
        (trial, epsilon, report.epsilon, entry.value, entry.d, entry.gap, entry.bound, entry.empirical_op,
         entry.empirical_signal, entry.v_distance, entry.v_bound, report.shift, report.shift_bound)
        for entry in report.entries
    ]


def perturbation_sweep(spec: SBMSpec, epsilons: Sequence[float], trials: int, signals: int = 0,
                       seed: int = 0) -> List[tuple]:
    """
    Runs `trials` random perturbations for every epsilon and reports each nonzero eigengroup.
    Rows follow `SWEEP_HEADER`, ordered by (epsilon, trial, eigengroup).

    :param SBMSpec spec: The model.
    :param epsilons: Perturbation sizes, in [0, 1].
    :param int trials: Trials per size.
    :param int signals: Random unit signals per trial.
    :param int seed: Seed of the whole sweep.
    :return List[tuple]: The sweep rows.
    """
    if trials < 1:
        _raise(f'At least one trial is needed, got {trials}')
    jobs = []
    for epsilon_index, epsilon in enumerate(epsilons):
        for trial in range(trials):
            jobs.append(Job(len(jobs), _sweep_trial, spec, float(epsilon), epsilon_index, trial, signals, seed))
    if Config.log_experiments:
        logging.info(f'Perturbation sweep: {len(epsilons)} epsilon(s) x {trials} trial(s)')
    return [row for rows in Jobs(jobs).run_all() for row in rows]

# -*- coding: UTF8 -*-

from typing import List, Tuple


class Config:

    # ---------------------------------------------------
    # ----- GENERAL PARAMETERS, FEEL FREE TO MODIFY -----
    # ---------------------------------------------------

    # Number of threads used to run independent jobs (trials, seeds, sampling chunks).
    # Results are always merged by job index, so this never changes the output.
    workers: int = 4

    # Number of row ranges the sampler splits a graph into.
    sampling_chunks: int = 8

    # Seeds used by sampling experiments when none are passed on the command line.
    default_seeds: List[int] = [1, 2, 3]

    # Directory where the command line interface writes its outputs.
    # Can be relative or absolute.
    default_output_directory: str = "out/"

    # Format applied to every float written to a CSV file.
    # Fixed so that re-running an experiment reproduces identical bytes.
    csv_float_format: str = ".12g"

    # Verbose mode.
    # Activating it will add matrices and vectors to some log messages.
    verbose: bool = False

    # Note: below log parameters are not retroactive.

    # Whether validation errors should be logged.
    log_validation: bool = True

    # Whether the eigensolvers should log their progress.
    log_solver: bool = False

    # Whether graph sampling should be logged.
    log_sampling: bool = False

    # Whether experiment runners should log each step.
    log_experiments: bool = True

    # -------------------------------------
    # ----- BE CAREFUL WHEN MODIFYING -----
    # -------------------------------------

    # Numerical tolerances. Loosening them hides real failures,
    # tightening them below what double precision allows makes valid inputs fail.

    # Largest N for which the model matrix W is materialized as a dense array.
    # Above it, W is only available as an operator y -> D A (D^T y).
    max_dense_model_size: int = 8000

    # An eigenvalue is considered zero below zero_tol_factor * m * eps * ||S||.
    # eigh recovers a zero eigenvalue only up to a small multiple of m * eps * ||S||.
    zero_tol_factor: float = 100.

    # Eigenvalues closer than group_rtol * ||S|| are merged into one eigengroup.
    group_rtol: float = 1e-8

    # Maximum accepted ||Sv - lambda v||, relative to ||S||.
    residual_rtol: float = 1e-8

    # Maximum accepted asymmetry ||S - S^T||, relative to max(1, ||S||).
    symmetry_rtol: float = 1e-12

    # Largest imaginary part silently dropped from a value known to be real.
    imaginary_tol: float = 1e-12

    # Tolerance on the total mass of a block measure.
    measure_atol: float = 1e-12

    # Iteration cap of the partial (Lanczos) eigensolver.
    solver_max_iterations: int = 10_000

    # Dimension of the Krylov space used by the partial eigensolver.
    solver_krylov_size: int = 48

    # Seed of the starting vector of the partial eigensolver.
    solver_seed: int = 20_230_517

    # ---------------------------------------------
    # ----- DO NOT MODIFY ANYTHING UNDER THIS -----
    # ---------------------------------------------

    # These are the constants of the Z5 reproduction experiments.

    # Maximum number of extreme eigenpairs the partial solver may be asked for.
    max_partial_eigenpairs: int = 32

    # Connection function of the Z5 Cayley matrix, keyed by group element.
    z5_connection: Tuple[float, ...] = (0.2, 0.8, 0.2, 0.2, 0.8)

    # One block of 2000 vertices and four of 1000.
    z5_measure: Tuple[float, ...] = (1 / 3, 1 / 6, 1 / 6, 1 / 6, 1 / 6)
    z5_graph_size: int = 6000

    # Number of extreme eigenvalues reported for a sampled graph.
    z5_sample_eigenpairs: int = 6

    # One-large-block sweep: mu_1 = (60 + 4k) / 300, mu_i = (60 - k) / 300.
    z5_one_block_size: int = 3000
    z5_one_block_steps: Tuple[int, ...] = tuple(range(1, 21))

    # Three-block-size sweep: mu_1 = (30 + 2k) / 150, mu_2 = (30 + k) / 150, mu_i = (30 - k) / 150.
    z5_three_block_size: int = 150
    z5_three_block_steps: Tuple[int, ...] = tuple(range(0, 21))

    # Block sizes of the two models compared against each other.
    z5_model_1_blocks: Tuple[int, ...] = (2000, 250, 250, 250, 250)
    z5_model_2_blocks: Tuple[int, ...] = (1350, 1344, 1102, 1102, 1102)

    # Default perturbation sweep.
    sweep_epsilons: Tuple[float, ...] = (0.001, 0.005, 0.01)
    sweep_trials: int = 100
    sweep_signals: int = 16

    # Default graph sizes of the convergence check.
    convergence_sizes: Tuple[int, ...] = (250, 500, 1000, 2000)

    # CLI exit codes.
    exit_success: int = 0
    exit_validation: int = 2
    exit_convergence: int = 3

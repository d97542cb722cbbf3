# -*- coding: UTF8 -*-

__version__ = "0.1.0"

import sbm_gft.utils

from sbm_gft.config import Config
from sbm_gft.jobs import Job, Jobs
from sbm_gft.structures import Structures
from sbm_gft.errors import SBMError, ValidationError, ConvergenceError, ToleranceError, CorrespondenceError
from sbm_gft.group_harmonics import AbelianGroup, Character, ConnectionFunction, cayley_matrix, character_table
from sbm_gft.sbm_model import SBMSpec, SampledGraph, isometry, lift_vector, model_matrix, sample_graph
from sbm_gft.spectral import Spectrum, Tolerances, projection_distance, symmetric_eigendecomposition
from sbm_gft.spectral import top_bottom_eigenpairs
from sbm_gft.fourier import SBMFourierBasis, FourierResult, sbm_fourier_basis, sbm_fourier_transform
from sbm_gft.fourier import inverse_transform, general_cayley_basis, transferred_character_basis
from sbm_gft.perturbation import perturb_measure, perturbation_report, perturbation_sweep, projection_error_bound
from sbm_gft.experiments import ExperimentConfig, RunManifest, execute

__all__ = ['Config', 'Job', 'Jobs', 'Structures', 'SBMError', 'ValidationError', 'ConvergenceError', 'ToleranceError',
           'CorrespondenceError', 'AbelianGroup', 'Character', 'ConnectionFunction', 'cayley_matrix',
           'character_table', 'SBMSpec', 'SampledGraph', 'isometry', 'lift_vector', 'model_matrix', 'sample_graph',
           'Spectrum', 'Tolerances', 'projection_distance', 'symmetric_eigendecomposition', 'top_bottom_eigenpairs',
           'SBMFourierBasis', 'FourierResult', 'sbm_fourier_basis', 'sbm_fourier_transform', 'inverse_transform',
           'general_cayley_basis', 'transferred_character_basis', 'perturb_measure', 'perturbation_report',
           'perturbation_sweep', 'projection_error_bound', 'ExperimentConfig', 'RunManifest', 'execute']

# -*- coding: UTF8 -*-

import sys
import logging
import argparse

from typing import List, Optional

from .config import Config
from .experiments import KINDS, ExperimentConfig, execute
from .errors import ConvergenceError, CorrespondenceError, ValidationError

DESCRIPTIONS = {
    "basis": "Compute the SBM Fourier basis of a model",
    "sample": "Sample graphs from a model, one per seed",
    "gft": "Transform a signal with the SBM basis and with sampled graphs",
    "compare-bases": "Compare the transferred character basis with the SBM basis",
    "perturb-sweep": "Check the block-size perturbation bounds on random perturbations",
    "convergence": "Eigenspace distance between sampled graphs and the model, for growing N",
    "z5-table1": "Z5 model: eigenvalues of W and of sampled graphs",
    "z5-table2": "Z5 model: agreement of graph eigenvectors with the SBM basis",
    "z5-fig4": "Z5 model: one-large-block sweep",
    "z5-fig5a": "Z5 model: three-block-sizes sweep",
    "z5-fig5b": "Z5 model: two fixed models",
}


def set_logging(func):
    def wrapper(argv: Optional[List[str]] = None):
        arguments = sys.argv[1:] if argv is None else argv
        verbose = "-v" in arguments or "--verbose" in arguments
        logging_level = logging.DEBUG if verbose else logging.INFO

        logger = logging.getLogger()
        logger.setLevel(logging_level)

        formatter = logging.Formatter('%(asctime)s - [%(levelname)s | %(module)s] %(message)s')
        formatter.datefmt = '%m/%d/%Y %H:%M:%S'

        sh = logging.StreamHandler(sys.stderr)
        sh.setLevel(logging_level)
        sh.setFormatter(formatter)

        logger.addHandler(sh)
        try:
            return func(argv)
        finally:
            logger.removeHandler(sh)
    return wrapper


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sbm-gft", description="SBM-driven graph Fourier transform experiments")
    subparsers = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sub = subparsers.add_parser(kind, help=DESCRIPTIONS[kind])
        sub.add_argument("--config", default=None, help="JSON run configuration")
        sub.add_argument("--seed", type=int, action="append", dest="seeds", default=None,
                         help="Seed of a sampled graph ; repeat for several")
        sub.add_argument("--out", default=Config.default_output_directory, help="Output directory")
        sub.add_argument("--scale", type=int, default=None, help="Number of vertices, replacing the configured N")
        sub.add_argument("--trials", type=int, default=None, help="Trials per epsilon of a perturbation sweep")
        sub.add_argument("-v", "--verbose", action="store_true", help="Log debug messages")
    return parser


@set_logging
def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point of the `sbm-gft` command.

    :return int: 0 on success, 2 on invalid input, 3 when a numerical procedure fails.
    """
    args = build_parser().parse_args(argv)
    try:
        config = ExperimentConfig.from_file(
            args.kind,
            args.config,
            seeds=tuple(args.seeds or ()),
            output=args.out,
            scale=args.scale,
            trials=args.trials,
        )
        execute(config)
    except ValidationError as e:
        logging.error(f'Invalid input: {e}')
        return Config.exit_validation
    except (ConvergenceError, CorrespondenceError) as e:
        logging.error(f'Numerical failure: {e}')
        return Config.exit_convergence
    return Config.exit_success

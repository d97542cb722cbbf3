# -*- coding: UTF8 -*-

import logging

from functools import wraps

from .utils import is_int
from .config import Config
from .structures import Structures


def _type_name(types) -> str:
    if isinstance(types, tuple):
        return " or ".join(t.__name__ for t in types)
    return types.__name__


def validate_fields(dictionary: dict, struct: dict, partial: bool = False) -> bool:
    """
    Checks a decoded JSON object against a structure from `Structures`.
    Nested structures are checked recursively ; list contents are left to the callers.

    Example arch: {"A": list, "mu": list, "N": int, "tolerances": {"zero_tol": (int, float)}}

    :param dict dictionary: A dictionary to check.
    :param dict struct: Dictionary containing the levels of architecture.
    A value is either a type, a tuple of types, or a nested structure.
    :param bool partial: If True, keys of the structure may be missing from the dictionary.
    Unknown keys are refused either way.
    :return bool: True if the fields are valid, False otherwise.
    """
    if not isinstance(dictionary, dict):
        if Config.log_validation:
            logging.error(f"Expected dict as argument 'dictionary', got {type(dictionary)}: {dictionary!r}")
        return False
    if not isinstance(struct, dict):
        if Config.log_validation:
            logging.error(f"Expected a structure, got {type(struct)}: {struct!r}")
        return False

    unknown = set(dictionary) - set(struct)
    if unknown:
        if Config.log_validation:
            logging.error(f'Unexpected field(s) {sorted(unknown)}, expected a subset of {sorted(struct)}')
        return False

    if not partial and len(dictionary) != len(struct):
        if Config.log_validation:
            log_msg = f'Lengths do not match: passed dict length is {len(dictionary)}, expected {len(struct)}'
            if Config.verbose:
                log_msg += f' (passed {dictionary}, expected {struct})'
            logging.error(log_msg)
        return False

    for key, struct_value in struct.items():
        try:
            dict_value = dictionary[key]
        except KeyError:
            if partial:
                continue
            if Config.log_validation:
                logging.error(f"Couldn't find field {key!r} in passed dictionary")
            return False
        if isinstance(struct_value, (type, tuple)):
            # JSON booleans are Python ints, we never want them where a number is expected.
            if isinstance(dict_value, bool) or not isinstance(dict_value, struct_value):
                if Config.log_validation:
                    logging.error(f'Expected {_type_name(struct_value)} for {key!r}, got {type(dict_value)}')
                return False
            if struct_value is int:
                if not is_int(dict_value):
                    if Config.log_validation:
                        logging.error(f"Couldn't cast to int: {key!r}: {dict_value!r}")
                    return False
        elif isinstance(struct_value, dict):
            # If value is a dict, we want to call this function recursively.
            if not validate_fields(dict_value, struct_value):
                return False
    return True


def is_valid_sbm_spec(spec_data: dict) -> bool:
    """
    Checks the structure of an SBM specification, as read from a JSON file.
    The numerical content (symmetry, measure, sizes) is checked when building the SBMSpec.

    :param dict spec_data: A specification, as a dictionary.
    :return bool: True if it is valid, False otherwise.
    """
    if not validate_fields(spec_data, Structures.sbm_spec_structure):
        return False
    if not all(isinstance(row, list) for row in spec_data["A"]):
        if Config.log_validation:
            logging.error("Field 'A' must be a list of rows")
        return False
    return True


def is_valid_cayley_spec(cayley_data: dict) -> bool:
    """
    Checks the structure of a Cayley specification:
    {"group": [5], "connection": {"0": 0.2, "1": 0.8, ...}}

    :param dict cayley_data: A Cayley specification, as a dictionary.
    :return bool: True if it is valid, False otherwise.
    """
    if not validate_fields(cayley_data, Structures.cayley_spec_structure):
        return False
    if not all(isinstance(order, int) and not isinstance(order, bool) for order in cayley_data["group"]):
        if Config.log_validation:
            logging.error(f"Group factor orders must be integers, got {cayley_data['group']!r}")
        return False
    for key, value in cayley_data["connection"].items():
        coords = key.split(",")
        if not all(c.strip().lstrip("-").isdigit() for c in coords):
            if Config.log_validation:
                logging.error(f'Invalid group element key: {key!r}')
            return False
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            if Config.log_validation:
                logging.error(f'Connection value for {key!r} must be a number, got {value!r}')
            return False
    return True


def is_valid_graph_header(header_data: dict) -> bool:
    """
    Checks the JSON header stored along a sampled graph's edge list.

    :param dict header_data: The header, as a dictionary.
    :return bool: True if it is valid, False otherwise.
    """
    if not validate_fields(header_data, Structures.graph_header_structure):
        return False
    if sum(header_data["k"]) != header_data["N"]:
        if Config.log_validation:
            logging.error(f"Block sizes {header_data['k']} do not add up to N={header_data['N']}")
        return False
    return True


def is_valid_experiment(experiment_data: dict) -> bool:
    """
    Checks a run configuration file.
    It must describe an SBM ("A", "mu", "N"), a Cayley model ("group", "connection"), or both.

    :param dict experiment_data: The configuration, as a dictionary.
    :return bool: True if it is valid, False otherwise.
    """
    if not validate_fields(experiment_data, Structures.experiment_structure, partial=True):
        return False
    if "tolerances" in experiment_data:
        if not validate_fields(experiment_data["tolerances"], Structures.tolerances_structure, partial=True):
            return False
    if "group" in experiment_data or "connection" in experiment_data:
        cayley_part = {key: experiment_data.get(key) for key in Structures.cayley_spec_structure}
        if not is_valid_cayley_spec(cayley_part):
            return False
    return True


def validate_export_structure(struct_name: str):
    """
    Decorates a method returning a dictionary meant for export (JSON header, metadata, manifest)
    so that its result is checked against the named structure of `Structures`.

    :param str struct_name: Name of the structure, as accepted by `Structures.mapping`.
    """
    struct = Structures.mapping(struct_name)
    if not struct:
        msg = f"Unknown export structure: {struct_name!r}"
        logging.critical(msg)
        raise KeyError(msg)

    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            exported = func(*args, **kwargs)
            if not validate_fields(exported, struct):
                msg = f"{func.__qualname__} does not match {struct_name!r}"
                logging.critical(msg)
                raise ValueError(msg)
            return exported
        return wrapper

    return decorator

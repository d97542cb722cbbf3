# -*- coding: UTF8 -*-

import os
import csv
import json
import logging

from typing import Iterable, List, Optional, Sequence

import numpy as np

from Crypto.Hash import SHA256

from .config import Config
from .errors import ValidationError


def encode_json(dictionary: dict) -> str:
    """
    Takes a dictionary and returns a JSON-encoded string.
    Keys are sorted, so that equal dictionaries always give equal strings (and equal hashes).

    :param dict dictionary: A dictionary.
    :return str: A JSON-encoded string.
    """
    return json.JSONEncoder(sort_keys=True).encode(dictionary)


def decode_json(json_string: str) -> dict:
    """
    Takes a JSON string and unpacks it to get a dictionary.

    :param str json_string: A JSON string.
    :return dict: An unverified dictionary. Do not trust this data.
    """
    return json.JSONDecoder().decode(json_string)


def read_json_file(path: str) -> dict:
    """
    Reads and decodes a JSON file.

    :param str path: Path to the file.
    :return dict: An unverified dictionary.
    """
    if not os.path.isfile(path):
        msg = f'No such file: {path!r}'
        logging.error(msg)
        raise ValidationError(msg)
    with open(path, 'r') as fl:
        try:
            return decode_json(fl.read())
        except json.JSONDecodeError as e:
            msg = f'Could not decode {path!r}: {e}'
            logging.error(msg)
            raise ValidationError(msg)


def write_json_file(path: str, dictionary: dict) -> None:
    make_parent_directory(path)
    with open(path, 'w') as fl:
        fl.write(encode_json(dictionary))


def is_int(value) -> bool:
    """
    Whether a value converts to int, as JSON integers (and numeric strings) do.
    `is_int(None)` raises TypeError.
    """
    try:
        int(value)
    except ValueError:
        return False
    else:
        return True


###################
# Hashing section #
###################


def hash_iterable(iterable) -> SHA256.SHA256Hash:
    """
    Returns a hash object of the iterable passed.
    Note that every item in the iterable should have a __str__ method, except if it's of bytes type.

    :param iterable: An iterable of any type, or a bytes object.
    :return SHA256.SHA256Hash: A hash object.
    """
    if type(iterable) == bytes:
        b = iterable
    else:
        b = "".join(str(i) for i in iterable).encode("utf-8")
    return SHA256.new(b)


def hash_dictionary(dictionary: dict) -> str:
    """
    :return str: The hexdigest of the canonical JSON encoding of the dictionary.
    """
    return hash_iterable(encode_json(dictionary)).hexdigest()


def file_checksum(path: str) -> str:
    """
    :param str path: Path to an existing file.
    :return str: The SHA256 hexdigest of its content.
    """
    with open(path, 'rb') as fl:
        return hash_iterable(fl.read()).hexdigest()


###############
# CSV section #
###############


def make_parent_directory(path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def format_cell(value) -> str:
    """
    Formats a value for a CSV cell.
    Floats (and numpy floats) use `Config.csv_float_format` ; -0 is written as 0.
    """
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value == 0.:
            value = 0.
        return format(value, Config.csv_float_format)
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence], manifest: Optional[str] = None) -> str:
    """
    Writes rows to a CSV file.

    :param str path: Destination file. Parent directories are created.
    :param Sequence[str] header: Column names.
    :param Iterable[Sequence] rows: The rows ; cells are formatted with `format_cell`.
    :param Optional[str] manifest: A manifest line, written first as a comment.
    :return str: The path written to.
    """
    make_parent_directory(path)
    with open(path, 'w', newline='') as fl:
        if manifest is not None:
            fl.write(f'# {manifest}\n')
        writer = csv.writer(fl, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(cell) for cell in row])
    return path


def read_csv_rows(path: str) -> List[List[str]]:
    """
    Reads a CSV file, skipping comment lines (starting with "#").

    :param str path: Path to the file.
    :return List[List[str]]: The rows, header included if there is one.
    """
    if not os.path.isfile(path):
        msg = f'No such file: {path!r}'
        logging.error(msg)
        raise ValidationError(msg)
    with open(path, 'r', newline='') as fl:
        lines = [line for line in fl if not line.startswith('#')]
    return [row for row in csv.reader(lines) if row]


def read_signal(path: str) -> np.ndarray:
    """
    Reads a signal stored as a CSV column vector.
    One value per line ; a second column, if present, holds the imaginary part.
    A non-numeric first line is treated as a header.

    :param str path: Path to the file.
    :return np.ndarray: A real or complex vector.
    """
    rows = read_csv_rows(path)
    if rows:
        try:
            float(rows[0][0])
        except ValueError:
            rows = rows[1:]
    if not rows:
        msg = f'Signal file {path!r} is empty'
        logging.error(msg)
        raise ValidationError(msg)
    try:
        values = np.array([[float(cell) for cell in row] for row in rows])
    except ValueError as e:
        msg = f'Signal file {path!r} contains a non-numeric value: {e}'
        logging.error(msg)
        raise ValidationError(msg)
    if values.ndim != 2 or values.shape[1] not in (1, 2):
        msg = f'Signal file {path!r} must have one or two columns'
        logging.error(msg)
        raise ValidationError(msg)
    if values.shape[1] == 2:
        return values[:, 0] + 1j * values[:, 1]
    return values[:, 0]

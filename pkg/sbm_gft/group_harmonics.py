# -*- coding: UTF8 -*-

"""
Finite Abelian groups written as products of cyclic groups,
their characters, and the Cayley matrices they diagonalize.

Elements and characters are both tuples of residues.
They are enumerated in lexicographic order, so that the identity
(resp. the trivial character) always comes first.
"""

import logging
import itertools

import numpy as np

from functools import reduce
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .config import Config
from .errors import ToleranceError, ValidationError

GroupElement = Tuple[int, ...]


@dataclass(frozen=True)
class AbelianGroup:
    factor_orders: Tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(order) for order in self.factor_orders)
        if any(order < 2 for order in orders):
            msg = f'Cyclic factors must have order 2 or more, got {orders}'
            logging.error(msg)
            raise ValidationError(msg)
        object.__setattr__(self, "factor_orders", orders)

    @classmethod
    def cyclic(cls, order: int) -> "AbelianGroup":
        return cls((order,))

    @property
    def n(self) -> int:
        return int(np.prod(self.factor_orders, dtype=np.int64))

    @property
    def rank(self) -> int:
        return len(self.factor_orders)

    @property
    def exponent(self) -> int:
        """
        Least common multiple of the factor orders.
        Every character value is a power of exp(2iπ / exponent).
        """
        return int(reduce(np.lcm, self.factor_orders, 1))

    @property
    def identity(self) -> GroupElement:
        return (0,) * self.rank

    @property
    def strides(self) -> np.ndarray:
        # Mixed-radix weights of the lexicographic enumeration, last coordinate fastest.
        strides = np.ones(self.rank, dtype=np.int64)
        for t in range(self.rank - 2, -1, -1):
            strides[t] = strides[t + 1] * self.factor_orders[t + 1]
        return strides

    def coordinates(self) -> np.ndarray:
        """
        :return np.ndarray: An (n, rank) integer array, row i holding the i-th element.
        """
        if self.rank == 0:
            return np.zeros((1, 0), dtype=np.int64)
        return np.array(list(itertools.product(*(range(order) for order in self.factor_orders))), dtype=np.int64)

    def normalize(self, coords: Sequence[int]) -> GroupElement:
        self.check_shape(coords)
        return tuple(int(c) % order for c, order in zip(coords, self.factor_orders))

    def check_shape(self, coords: Sequence[int]) -> None:
        if len(coords) != self.rank:
            msg = f'Expected {self.rank} coordinate(s) for group {self.factor_orders}, got {tuple(coords)}'
            logging.error(msg)
            raise ValidationError(msg)

    def index_of(self, coords: Sequence[int]) -> int:
        """
        :return int: The 0-based position of the element in the enumeration.
        """
        reduced = np.array(self.normalize(coords), dtype=np.int64)
        return int(reduced @ self.strides)

    def element(self, index: int) -> GroupElement:
        if not 0 <= index < self.n:
            msg = f'Element index {index} out of range for a group of order {self.n}'
            logging.error(msg)
            raise ValidationError(msg)
        return tuple(int(c) for c in (index // self.strides) % np.array(self.factor_orders, dtype=np.int64))

    def multiply(self, g: Sequence[int], h: Sequence[int]) -> GroupElement:
        self.check_shape(h)
        return self.normalize([a + b for a, b in zip(g, h)])

    def inverse(self, g: Sequence[int]) -> GroupElement:
        return self.normalize([-c for c in g])

    def difference_indices(self) -> np.ndarray:
        """
        :return np.ndarray: An (n, n) array whose (i, j) entry is the index of g_i^-1 g_j.
        """
        coords = self.coordinates()
        orders = np.array(self.factor_orders, dtype=np.int64)
        diffs = (coords[None, :, :] - coords[:, None, :]) % orders
        return diffs @ self.strides


@dataclass(frozen=True)
class Character:
    exponents: Tuple[int, ...]
    index: int  # 0-based position in the enumeration of the dual group.


def enumerate_elements(group: AbelianGroup) -> List[GroupElement]:
    return [tuple(int(c) for c in row) for row in group.coordinates()]


def characters(group: AbelianGroup) -> List[Character]:
    return [Character(element, index) for index, element in enumerate(enumerate_elements(group))]


def character(group: AbelianGroup, exponents: Sequence[int]) -> Character:
    reduced = group.normalize(exponents)
    return Character(reduced, group.index_of(reduced))


def index_identifier(group: AbelianGroup, char: Character) -> int:
    """
    Returns the label of a character, counted from 1 so that the trivial character is number 1.

    :param AbelianGroup group: The group.
    :param Character char: A character of this group.
    :return int: Its 1-based label.
    """
    return group.index_of(char.exponents) + 1


def character_product(group: AbelianGroup, a: Character, b: Character) -> Character:
    return character(group, [x + y for x, y in zip(a.exponents, b.exponents)])


def character_inverse(group: AbelianGroup, char: Character) -> Character:
    return character(group, [-x for x in char.exponents])


def is_self_conjugate(group: AbelianGroup, char: Character) -> bool:
    """
    A character equals its conjugate iff twice its exponents vanish in every factor.
    Such characters only take the values 1 and -1.
    """
    return all((2 * e) % order == 0 for e, order in zip(char.exponents, group.factor_orders))


def _phases(group: AbelianGroup, exponents: np.ndarray, coords: np.ndarray) -> np.ndarray:
    # Exact integer phases, as multiples of 2iπ / exponent.
    L = group.exponent
    weights = np.array([L // order for order in group.factor_orders], dtype=np.int64)
    return ((coords * weights) @ exponents.T) % L


def character_value(group: AbelianGroup, char: Character, g: Sequence[int]) -> complex:
    """
    Evaluates a character on a group element.

    :param AbelianGroup group: The group.
    :param Character char: The character.
    :param Sequence[int] g: The coordinates of an element.
    :return complex: A unit-modulus complex number.
    """
    group.check_shape(char.exponents)
    group.check_shape(g)
    phase = _phases(group, np.array([char.exponents], dtype=np.int64), np.array([g], dtype=np.int64))[0, 0]
    return complex(np.exp(2j * np.pi * phase / group.exponent))


def character_table(group: AbelianGroup) -> np.ndarray:
    """
    :return np.ndarray: The (n, n) matrix whose (i, j) entry is chi_j(g_i).
    """
    coords = group.coordinates()
    if group.rank == 0:
        return np.ones((1, 1), dtype=complex)
    return np.exp(2j * np.pi * _phases(group, coords, coords) / group.exponent)


def character_matrix(group: AbelianGroup) -> np.ndarray:
    """
    The unitary matrix whose j-th column is the j-th character, normalized.

    :param AbelianGroup group: The group.
    :return np.ndarray: U, with U[i, j] = chi_j(g_i) / sqrt(n).
    """
    return character_table(group) / np.sqrt(group.n)


@dataclass(frozen=True, eq=False)
class ConnectionFunction:
    group: AbelianGroup
    values: np.ndarray  # indexed by element position

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.group.n,):
            msg = f'A connection function needs {self.group.n} values, got shape {values.shape}'
            logging.error(msg)
            raise ValidationError(msg)
        if not np.all(np.isfinite(values)) or values.min() < 0. or values.max() > 1.:
            msg = 'Connection function values must lie in [0, 1]'
            if Config.verbose:
                msg += f': {values}'
            logging.error(msg)
            raise ValidationError(msg)
        inverse_positions = [self.group.index_of(self.group.inverse(g)) for g in enumerate_elements(self.group)]
        if np.max(np.abs(values - values[inverse_positions])) > Config.symmetry_rtol:
            msg = 'Connection function is not inverse-invariant: f(x) != f(x^-1) for some x'
            logging.error(msg)
            raise ValidationError(msg)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, group: AbelianGroup, p: float) -> "ConnectionFunction":
        return cls(group, np.full(group.n, float(p)))

    @classmethod
    def from_dict(cls, group: AbelianGroup, connection: Dict[str, float]) -> "ConnectionFunction":
        """
        Builds a connection function from its JSON form,
        keys being comma-joined element coordinates, e.g. {"0,1": 0.5}.
        Elements absent from the dictionary are mapped to 0.

        :param AbelianGroup group: The group.
        :param dict connection: The JSON mapping.
        :return ConnectionFunction: A new connection function.
        """
        values = np.zeros(group.n)
        for key, value in connection.items():
            try:
                coords = [int(c) for c in str(key).split(",")] if group.rank else []
            except ValueError:
                msg = f'Invalid group element key: {key!r}'
                logging.error(msg)
                raise ValidationError(msg)
            values[group.index_of(coords)] = float(value)
        return cls(group, values)

    def to_dict(self) -> Dict[str, float]:
        return {
            ",".join(str(c) for c in g): float(v)
            for g, v in zip(enumerate_elements(self.group), self.values)
        }

    def __call__(self, g: Sequence[int]) -> float:
        return float(self.values[self.group.index_of(g)])


def cayley_matrix(group: AbelianGroup, f: ConnectionFunction) -> np.ndarray:
    """
    Builds the Cayley matrix of a connection function, a_ij = f(g_i^-1 g_j).

    :param AbelianGroup group: The group.
    :param ConnectionFunction f: An inverse-invariant connection function on this group.
    :return np.ndarray: A real symmetric (n, n) matrix.
    """
    _check_same_group(group, f)
    return f.values[group.difference_indices()]


def cayley_eigenvalues(group: AbelianGroup, f: ConnectionFunction) -> np.ndarray:
    """
    Eigenvalues of the Cayley matrix, in character order:
    lambda_j = sum_x f(x) conj(chi_j(x)).

    :param AbelianGroup group: The group.
    :param ConnectionFunction f: An inverse-invariant connection function on this group.
    :return np.ndarray: n real values.
    """
    _check_same_group(group, f)
    values = character_table(group).conj().T @ f.values
    scale = max(1., float(np.sum(np.abs(f.values))))
    if np.max(np.abs(values.imag)) > Config.imaginary_tol * scale:
        msg = f'Cayley eigenvalues have an imaginary part of {np.max(np.abs(values.imag)):.3g}'
        logging.critical(msg)
        raise ToleranceError(msg)
    return values.real.copy()


@dataclass(frozen=True)
class CayleyEigengroup:
    value: float
    characters: Tuple[Character, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.characters)


def cayley_eigengroups(group: AbelianGroup, f: ConnectionFunction) -> List[CayleyEigengroup]:
    """
    Groups the characters by Cayley eigenvalue.
    Groups come by decreasing magnitude (the positive one first on ties),
    characters in enumeration order within a group.

    :param AbelianGroup group: The group.
    :param ConnectionFunction f: The connection function.
    :return List[CayleyEigengroup]: The eigengroups.
    """
    eigenvalues = cayley_eigenvalues(group, f)
    tol = Config.group_rtol * max(1., float(np.max(np.abs(eigenvalues))))
    order = np.argsort(-eigenvalues, kind="stable")
    clusters: List[List[int]] = []
    for position in order:
        if clusters and eigenvalues[clusters[-1][-1]] - eigenvalues[position] <= tol:
            clusters[-1].append(int(position))
        else:
            clusters.append([int(position)])
    all_characters = characters(group)
    groups = [
        CayleyEigengroup(
            value=float(np.mean(eigenvalues[cluster])),
            characters=tuple(all_characters[i] for i in sorted(cluster)),
        )
        for cluster in clusters
    ]
    groups.sort(key=lambda eg: (-abs(eg.value), -eg.value))
    return groups


@dataclass(frozen=True, eq=False)
class RealEigenbasis:
    eigenvalues: np.ndarray  # one per column
    vectors: np.ndarray  # (n, n), orthonormal columns
    groups: List[Tuple[int, ...]] = field(default_factory=list)  # column positions per eigengroup


def real_eigenpair_basis(group: AbelianGroup, f: ConnectionFunction) -> RealEigenbasis:
    """
    Real orthonormal eigenbasis of the Cayley matrix.
    A pair of conjugate characters gives the cosine and sine vectors
    sqrt(2/n) Re(chi) and sqrt(2/n) Im(chi), in this order ;
    self-conjugate characters are real already and are kept as they are.

    :param AbelianGroup group: The group.
    :param ConnectionFunction f: The connection function.
    :return RealEigenbasis: The basis, ordered like `cayley_eigengroups`.
    """
    table = character_table(group)
    n = group.n
    columns = []
    eigenvalues = []
    positions = []
    for eigengroup in cayley_eigengroups(group, f):
        members = {char.index for char in eigengroup.characters}
        done = set()
        group_positions = []
        for char in eigengroup.characters:
            if char.index in done:
                continue
            if is_self_conjugate(group, char):
                vectors = [table[:, char.index].real / np.sqrt(n)]
                done.add(char.index)
            else:
                conjugate = character_inverse(group, char)
                if conjugate.index not in members:
                    msg = f'Conjugate characters {char.exponents} and {conjugate.exponents} fell into different eigengroups'
                    logging.critical(msg)
                    raise ToleranceError(msg)
                chi = table[:, char.index]
                vectors = [np.sqrt(2 / n) * chi.real, np.sqrt(2 / n) * chi.imag]
                done.update({char.index, conjugate.index})
            for vector in vectors:
                group_positions.append(len(columns))
                columns.append(vector)
                eigenvalues.append(eigengroup.value)
        positions.append(tuple(group_positions))
    return RealEigenbasis(
        eigenvalues=np.array(eigenvalues),
        vectors=np.column_stack(columns),
        groups=positions,
    )


def _check_same_group(group: AbelianGroup, f: ConnectionFunction) -> None:
    if f.group != group:
        msg = f'Connection function is defined on {f.group.factor_orders}, not on {group.factor_orders}'
        logging.error(msg)
        raise ValidationError(msg)

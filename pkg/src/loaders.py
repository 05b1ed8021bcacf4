"""
JSON input for spaces, measures, test functions, maps, couplings and sequences.
"""

import json
import os
from typing import Dict, List, Mapping, Optional, Tuple

from .coupling import Coupling
from .errors import IdemetricError, ParseError, SpaceMismatchError
from .logger import logger
from .measure import STRICT, IdempotentMeasure, TestFunction, make_measure
from .semiring import MaxPlusScalar
from .space import EUCLIDEAN, MATRIX, GroundSpace


def load_json(path: str):
    """Read a JSON file, turning I/O and syntax problems into ParseError."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError:
        raise ParseError(f"File not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"Invalid JSON in {path}: {exc}") from None
    except OSError as exc:
        raise ParseError(f"Cannot read {path}: {exc}") from None


def _require(data: Mapping, key: str, what: str):
    if not isinstance(data, Mapping):
        raise ParseError(f"{what} must be a JSON object")
    if key not in data:
        raise ParseError(f"{what} is missing '{key}'")
    return data[key]


def parse_space(data, name: Optional[str] = None, validate: bool = True) -> GroundSpace:
    kind = _require(data, 'type', 'Space')
    diam = data.get('diam')
    try:
        if kind == MATRIX:
            points = _require(data, 'points', 'Matrix space')
            matrix = _require(data, 'd', 'Matrix space')
            return GroundSpace.from_matrix(points, matrix, diam=diam, name=name, validate=validate)
        if kind == EUCLIDEAN:
            points = _require(data, 'points', 'Euclidean space')
            if not isinstance(points, Mapping):
                raise ParseError("Euclidean points must map ids to coordinates")
            return GroundSpace.from_points(points, dim=data.get('dim'), diam=diam, name=name)
    except IdemetricError:
        raise
    except (TypeError, ValueError) as exc:
        raise ParseError(f"Malformed space: {exc}") from None
    raise ParseError(f"Unknown space type '{kind}'")


def load_space(path: str, validate: bool = True) -> GroundSpace:
    name = os.path.splitext(os.path.basename(path))[0]
    space = parse_space(load_json(path), name=name, validate=validate)
    logger.info(f"Loaded {space.kind} space '{name}' with {len(space)} points")
    return space


def parse_measure(data, space: GroundSpace, mode: str = STRICT, tol: Optional[float] = None) -> IdempotentMeasure:
    atoms = _require(data, 'atoms', 'Measure')
    declared = data.get('space')
    if isinstance(declared, Mapping) and parse_space(declared) != space:
        raise SpaceMismatchError("Inline space of the measure differs from the given space")
    if not isinstance(atoms, list):
        raise ParseError("Measure atoms must be a list")
    try:
        return make_measure(space, atoms, mode, tol)
    except IdemetricError:
        raise
    except (TypeError, ValueError) as exc:
        raise ParseError(f"Malformed atom: {exc}") from None


def load_measure(path: str, space: GroundSpace, mode: str = STRICT, tol: Optional[float] = None) -> IdempotentMeasure:
    return parse_measure(load_json(path), space, mode, tol)


def parse_function(data) -> TestFunction:
    values = _require(data, 'values', 'Test function')
    if not isinstance(values, Mapping):
        raise ParseError("Test function values must map point ids to numbers")
    try:
        return TestFunction(values)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"Malformed test function: {exc}") from None


def load_function(path: str) -> TestFunction:
    return parse_function(load_json(path))


def parse_map(data) -> Dict[str, str]:
    """Either {"map": {...}} or a bare {source: image} object."""
    table = data.get('map', data) if isinstance(data, Mapping) else None
    if not isinstance(table, Mapping):
        raise ParseError("Map must be a JSON object of point ids")
    return {str(k): str(v) for k, v in table.items()}


def load_map(path: str) -> Dict[str, str]:
    return parse_map(load_json(path))


def parse_sequence(data, space: GroundSpace, mode: str = STRICT, tol: Optional[float] = None) -> List[IdempotentMeasure]:
    """A JSON list of measures, or {"measures": [...]}."""
    items = data.get('measures') if isinstance(data, Mapping) else data
    if not isinstance(items, list) or not items:
        raise ParseError("Sequence must be a nonempty list of measures")
    return [parse_measure(item, space, mode, tol) for item in items]


def load_sequence(path: str, space: GroundSpace, mode: str = STRICT, tol: Optional[float] = None) -> List[IdempotentMeasure]:
    return parse_sequence(load_json(path), space, mode, tol)


def load_measure_dir(directory: str, space: GroundSpace, mode: str = STRICT, tol: Optional[float] = None) -> Tuple[List[str], List[IdempotentMeasure]]:
    """Every ``*.json`` measure in a directory, ordered by file name."""
    if not os.path.isdir(directory):
        raise ParseError(f"Not a directory: {directory}")
    names = sorted(f for f in os.listdir(directory) if f.endswith('.json'))
    if not names:
        raise ParseError(f"No .json measures in {directory}")
    labels = [os.path.splitext(n)[0] for n in names]
    measures = [load_measure(os.path.join(directory, n), space, mode, tol) for n in names]
    logger.info(f"Loaded {len(measures)} measures from {directory}")
    return labels, measures


def parse_coupling(data, space: GroundSpace) -> Coupling:
    mu1 = parse_measure(_require(data, 'mu1', 'Coupling'), space)
    mu2 = parse_measure(_require(data, 'mu2', 'Coupling'), space)
    entries = {}
    for item in _require(data, 'entries', 'Coupling'):
        try:
            gamma = MaxPlusScalar.from_json(item['gamma'])
            if not gamma.is_bottom:
                entries[(int(item['j']), int(item['k']))] = gamma.value
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"Malformed coupling entry: {exc}") from None
    return Coupling(mu1, mu2, entries)

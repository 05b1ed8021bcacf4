"""
Random instances and sequence families for experiments and tests.

Every generator takes a ``numpy.random.Generator`` so runs are reproducible from a seed.
"""

from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .errors import InvalidArgumentError
from .measure import IdempotentMeasure, TestFunction, dirac, make_measure
from .space import EUCLIDEAN, MATRIX, GroundSpace

Family = Tuple[GroundSpace, List[IdempotentMeasure], IdempotentMeasure]


def rng_from(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_space(rng: np.random.Generator,
                 n_points: int,
                 kind: str = MATRIX,
                 dim: int = 2,
                 diam: Optional[float] = None) -> GroundSpace:
    """
    A valid random metric on ``n_points`` points.

    Matrix spaces are the shortest-path closure of random positive edge lengths,
    which always satisfies the triangle inequality.
    """
    if n_points < 1:
        raise InvalidArgumentError("A space needs at least one point")
    ids = [f"p{i}" for i in range(n_points)]

    if kind == EUCLIDEAN:
        coords = rng.uniform(0.0, 1.0, size=(n_points, dim))
        return GroundSpace.from_points(dict(zip(ids, coords.tolist())), dim=dim, diam=diam)

    upper = np.triu(rng.uniform(0.1, 2.0, size=(n_points, n_points)), k=1)
    closed = shortest_path(upper + upper.T, method='FW', directed=False)
    closed = np.minimum(closed, closed.T)
    np.fill_diagonal(closed, 0.0)
    return GroundSpace.from_matrix(ids, closed, diam=diam)


def random_measure(rng: np.random.Generator,
                   space: GroundSpace,
                   max_support: int = 4,
                   low: float = -3.0,
                   grid: Optional[float] = None) -> IdempotentMeasure:
    """
    Weights drawn from [low, 0] with one forced 0. ``grid`` snaps weights to
    multiples of it, which produces ties between atoms of different measures.
    """
    ids = list(space.point_ids)
    size = int(rng.integers(1, min(max_support, len(ids)) + 1))
    points = rng.choice(len(ids), size=size, replace=False)
    weights = rng.uniform(low, 0.0, size=size)
    if grid:
        weights = np.round(weights / grid) * grid + 0.0  # + 0.0 clears signed zeros
    weights[int(rng.integers(size))] = 0.0
    return make_measure(space, [(ids[int(p)], float(w)) for p, w in zip(points, weights)])


def random_function(rng: np.random.Generator, space: GroundSpace, scale: float = 5.0) -> TestFunction:
    values = rng.uniform(-scale, scale, size=len(space))
    return TestFunction(dict(zip(space.point_ids, values.tolist())))


def random_map(rng: np.random.Generator, source: GroundSpace, target: GroundSpace) -> Dict[str, str]:
    """A random map between the registered points of two spaces."""
    images = rng.integers(0, len(target), size=len(source))
    return {p: target.point_ids[int(i)] for p, i in zip(source.point_ids, images)}


def perturb(rng: np.random.Generator, mu: IdempotentMeasure, scale: float = 0.5) -> IdempotentMeasure:
    """Shift one non-anchor weight, or move the support if every weight is 0."""
    movable = [i for i, w in enumerate(mu.weights) if w < 0]
    atoms = list(mu.atoms)
    if movable:
        i = movable[int(rng.integers(len(movable)))]
        p, w = atoms[i]
        atoms[i] = (p, w - float(rng.uniform(0.01, scale)))
        return make_measure(mu.space, atoms)
    free = [p for p in mu.space.point_ids if p not in mu.points]
    if free:
        return make_measure(mu.space, atoms + [(free[int(rng.integers(len(free)))], -1.0)])
    return make_measure(mu.space, atoms[:-1]) if len(atoms) > 1 else mu


# ---------------------------------------------------------------------- sequence families
#
# All families live in the plane: a = (0, 0), b = (1, 0), a far point f = (0, 0.6),
# and drifting points b_t = (1, 1/t), s_t = (1, -1/t). The limit is
# μ = 0⊙δ_a ⊕ (-1)⊙δ_b unless stated otherwise.

FAR_POINT = (0.0, 0.6)


def _plane(steps: int, extra: bool = True) -> GroundSpace:
    points = {'a': (0.0, 0.0), 'b': (1.0, 0.0), 'f': FAR_POINT}
    for t in range(1, steps + 1):
        points[f"b{t}"] = (1.0, 1.0 / t)
        if extra:
            points[f"s{t}"] = (1.0, -1.0 / t)
    return GroundSpace.from_points(points, dim=2, name='plane')


def _limit(space: GroundSpace) -> IdempotentMeasure:
    return make_measure(space, [('a', 0.0), ('b', -1.0)])


def atom_drift(steps: int = 40) -> Family:
    """μ_t = 0⊙δ_a ⊕ (-1)⊙δ_{b_t}: the second atom approaches b at rate 1/t."""
    space = _plane(steps)
    seq = [make_measure(space, [('a', 0.0), (f"b{t}", -1.0)]) for t in range(1, steps + 1)]
    return space, seq, _limit(space)


def weight_drift(steps: int = 40) -> Family:
    """μ_t = 0⊙δ_a ⊕ (-1 + 1/t)⊙δ_b: only the weight of b moves."""
    space = _plane(steps)
    seq = [make_measure(space, [('a', 0.0), ('b', -1.0 + 1.0 / t)]) for t in range(1, steps + 1)]
    return space, seq, _limit(space)


def split_weight_drift(steps: int = 40) -> Family:
    """μ_t = μ ⊕ (-1 - 1/t)⊙δ_{s_t}: a split-off atom drifts in weight and position."""
    space = _plane(steps)
    seq = [make_measure(space, [('a', 0.0), ('b', -1.0), (f"s{t}", -1.0 - 1.0 / t)])
           for t in range(1, steps + 1)]
    return space, seq, _limit(space)


def support_splitting(steps: int = 40) -> Family:
    """μ_t = μ ⊕ (-1)⊙δ_{s_t}: b splits into two atoms that merge in the limit."""
    space = _plane(steps)
    seq = [make_measure(space, [('a', 0.0), ('b', -1.0), (f"s{t}", -1.0)]) for t in range(1, steps + 1)]
    return space, seq, _limit(space)


def persistent_far_atom(steps: int = 40) -> Family:
    """Atom drift plus a weight-0 atom at f, at distance 0.6 from a and farther from b."""
    space = _plane(steps)
    seq = [make_measure(space, [('a', 0.0), (f"b{t}", -1.0), ('f', 0.0)]) for t in range(1, steps + 1)]
    return space, seq, _limit(space)


def dirac_drift(steps: int = 40) -> Family:
    """δ_{b_t} -> δ_b."""
    space = _plane(steps, extra=False)
    seq = [dirac(space, f"b{t}") for t in range(1, steps + 1)]
    return space, seq, dirac(space, 'b')


FAMILIES = {
    'atom_drift': atom_drift,
    'weight_drift': weight_drift,
    'split_weight_drift': split_weight_drift,
    'support_splitting': support_splitting,
    'persistent_far_atom': persistent_far_atom,
    'dirac_drift': dirac_drift,
}

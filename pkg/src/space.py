from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .config import Config
from .errors import MetricValidationError, ParseError, UnknownPointError
from .logger import logger

MATRIX = "matrix"
EUCLIDEAN = "euclidean"


@dataclass(frozen=True)
class MetricViolation:
    """One violated metric axiom instance."""

    kind: str  # 'asymmetry' | 'triangle' | 'zero_off_diagonal' | 'nonzero_diagonal' | 'negative' | 'nonfinite' | 'diameter'
    points: Tuple[str, ...]
    amount: float

    def to_dict(self) -> Dict:
        return {'kind': self.kind, 'points': list(self.points), 'amount': self.amount}


@dataclass
class ValidationReport:
    violations: List[MetricViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def by_kind(self, kind: str) -> List[MetricViolation]:
        return [v for v in self.violations if v.kind == kind]

    def to_dict(self) -> Dict:
        return {'ok': self.ok, 'violations': [v.to_dict() for v in self.violations]}


class GroundSpace:
    """
    A finite metric space standing in for the compactum X.

    Two variants share this class: an explicit symmetric distance matrix over
    string point ids, and a labeled point cloud in R^d with the Euclidean
    metric. A declared diameter describes the ambient X when it is larger than
    the registered points.

    Instances are immutable after construction.
    """

    def __init__(self,
                 point_ids: Sequence[str],
                 distances: np.ndarray,
                 kind: str = MATRIX,
                 coords: Optional[np.ndarray] = None,
                 declared_diameter: Optional[float] = None,
                 name: Optional[str] = None):
        ids = tuple(str(p) for p in point_ids)
        if len(set(ids)) != len(ids):
            raise ParseError("Duplicate point ids in space")

        d = np.array(distances, dtype=float)
        if d.shape != (len(ids), len(ids)):
            raise ParseError(f"Distance matrix shape {d.shape} does not match {len(ids)} points")
        if declared_diameter is not None:
            declared_diameter = float(declared_diameter)
            if not np.isfinite(declared_diameter) or declared_diameter < 0:
                raise ParseError("Declared diameter must be a nonnegative real")

        d.setflags(write=False)
        if coords is not None:
            coords = np.array(coords, dtype=float)
            coords.setflags(write=False)

        self._ids = ids
        self._index = {p: i for i, p in enumerate(ids)}
        self._d = d
        self._coords = coords
        self.kind = kind
        self.declared_diameter = declared_diameter
        self.name = name

    # ------------------------------------------------------------------ builders

    @classmethod
    def from_matrix(cls,
                    point_ids: Sequence[str],
                    matrix,
                    diam: Optional[float] = None,
                    name: Optional[str] = None,
                    validate: bool = True) -> 'GroundSpace':
        """Build the matrix variant; raises MetricValidationError on a bad matrix."""
        space = cls(point_ids, np.asarray(matrix, dtype=float), MATRIX, None, diam, name)
        if validate:
            space.require_valid()
        return space

    @classmethod
    def from_points(cls,
                    points: Mapping[str, Sequence[float]],
                    dim: Optional[int] = None,
                    diam: Optional[float] = None,
                    name: Optional[str] = None) -> 'GroundSpace':
        """Build the Euclidean variant from labeled coordinates."""
        ids = list(points.keys())
        if not ids:
            raise ParseError("Euclidean space needs at least one point")
        coords = np.array([list(points[p]) for p in ids], dtype=float)
        if coords.ndim != 2:
            raise ParseError("Point coordinates must share one dimension")
        if dim is not None and coords.shape[1] != dim:
            raise ParseError(f"Points have dimension {coords.shape[1]}, expected {dim}")

        if len(ids) > 1:
            d = squareform(pdist(coords, metric='euclidean'))
        else:
            d = np.zeros((1, 1))
        space = cls(ids, d, EUCLIDEAN, coords, diam, name)
        space.require_valid()
        return space

    def subspace(self, point_ids: Sequence[str]) -> 'GroundSpace':
        """Restrict to a subset of points, keeping the ambient diameter."""
        idx = [self.index_of(p) for p in point_ids]
        d = self._d[np.ix_(idx, idx)]
        coords = self._coords[idx] if self._coords is not None else None
        return GroundSpace([self._ids[i] for i in idx], d, self.kind, coords,
                           self.diam() if self._ids else None, self.name)

    # ------------------------------------------------------------------ queries

    @property
    def point_ids(self) -> Tuple[str, ...]:
        return self._ids

    @property
    def matrix(self) -> np.ndarray:
        return self._d

    @property
    def dim(self) -> Optional[int]:
        return None if self._coords is None else int(self._coords.shape[1])

    def coords_of(self, x: str) -> np.ndarray:
        if self._coords is None:
            raise ParseError("Matrix spaces carry no coordinates")
        return self._coords[self.index_of(x)]

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, x) -> bool:
        return x in self._index

    def index_of(self, x: str) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise UnknownPointError(x, f"space '{self.name or self.kind}'") from None

    def distance(self, x: str, y: str) -> float:
        """ρ(x, y)."""
        return float(self._d[self.index_of(x), self.index_of(y)])

    def diam(self) -> float:
        """Declared diameter if any, otherwise the largest pairwise distance."""
        if self.declared_diameter is not None:
            return self.declared_diameter
        if not self._ids:
            raise ParseError("Diameter of an empty space is undefined")
        return float(self._d.max())

    # ------------------------------------------------------------------ validation

    def validate_metric(self, tol: Optional[float] = None) -> ValidationReport:
        """List every violated metric axiom instance; never raises."""
        tol = Config.TRIANGLE_TOLERANCE if tol is None else tol
        report = ValidationReport()
        d, ids, n = self._d, self._ids, len(self._ids)

        if not np.all(np.isfinite(d)):
            bad = np.argwhere(~np.isfinite(d))
            for i, j in bad:
                report.violations.append(MetricViolation('nonfinite', (ids[i], ids[j]), float('nan')))
            return report

        for i in range(n):
            if d[i, i] != 0:
                report.violations.append(MetricViolation('nonzero_diagonal', (ids[i],), float(abs(d[i, i]))))

        for i, j in combinations(range(n), 2):
            if d[i, j] < 0 or d[j, i] < 0:
                report.violations.append(
                    MetricViolation('negative', (ids[i], ids[j]), float(-min(d[i, j], d[j, i]))))
            if d[i, j] != d[j, i]:
                report.violations.append(
                    MetricViolation('asymmetry', (ids[i], ids[j]), float(abs(d[i, j] - d[j, i]))))
            if d[i, j] == 0 or d[j, i] == 0:
                report.violations.append(MetricViolation('zero_off_diagonal', (ids[i], ids[j]), 0.0))

        # ρ(a,c) <= ρ(a,b) + ρ(b,c) for every triple of distinct points, one middle point
        # at a time; Euclidean distances satisfy it already
        if n >= 3 and self.kind != EUCLIDEAN:
            triangles = []
            for b in range(n):
                excess = d - (d[:, b, None] + d[None, b, :])
                for a, c in np.argwhere(excess > tol):
                    if a < c and a != b and b != c:
                        triangles.append((a, b, c, float(excess[a, c])))
            for a, b, c, amount in sorted(triangles):
                report.violations.append(MetricViolation('triangle', (ids[a], ids[b], ids[c]), amount))

        if self.declared_diameter is not None and n and d.max() > self.declared_diameter + tol:
            report.violations.append(
                MetricViolation('diameter', (), float(d.max() - self.declared_diameter)))

        return report

    def require_valid(self) -> None:
        report = self.validate_metric()
        if not report.ok:
            first = report.violations[0]
            logger.error(f"Metric validation failed with {len(report.violations)} violation(s)")
            raise MetricValidationError(
                f"Invalid metric: {first.kind} at {', '.join(first.points)}", report)

    # ------------------------------------------------------------------ identity

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroundSpace):
            return NotImplemented
        if self is other:
            return True
        return (self._ids == other._ids
                and self.kind == other.kind
                and np.array_equal(self._d, other._d)
                and self.declared_diameter == other.declared_diameter)

    def __hash__(self) -> int:
        return hash((self._ids, self.kind))

    def __repr__(self) -> str:
        return f"GroundSpace(kind={self.kind!r}, points={len(self._ids)}, diam={self.declared_diameter!r})"

    def to_dict(self) -> Dict:
        data: Dict = {'type': self.kind}
        if self.kind == EUCLIDEAN:
            data['dim'] = self.dim
            data['points'] = {p: [float(c) for c in self._coords[i]] for i, p in enumerate(self._ids)}
        else:
            data['points'] = list(self._ids)
            data['d'] = [[float(x) for x in row] for row in self._d]
        if self.declared_diameter is not None:
            data['diam'] = self.declared_diameter
        return data


def distance(space: GroundSpace, x: str, y: str) -> float:
    return space.distance(x, y)


def validate_metric(space: GroundSpace) -> ValidationReport:
    return space.validate_metric()


def diam(space: GroundSpace) -> float:
    return space.diam()

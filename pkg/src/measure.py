"""
Idempotent probability measures with finite support.

A measure is the max-combination λ₁⊙δ_{x₁} ⊕ … ⊕ λ_k⊙δ_{x_k} with distinct
points and λ₁ ⊕ … ⊕ λ_k = 0. Atoms are kept sorted by point id, which makes the
decomposition canonical: two measures are equal iff their atom tuples are.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .config import Config
from .errors import NormalizationError, ParseError, SpaceMismatchError, UnknownPointError
from .logger import logger
from .semiring import MaxPlusScalar, BOTTOM
from .space import GroundSpace

STRICT = "strict"
AUTONORMALIZE = "autonormalize"

AtomLike = Union[Tuple[str, object], Mapping[str, object]]


class TestFunction:
    """A real function φ on registered points (a continuous function restricted to X's sample)."""

    __test__ = False  # not a pytest class

    def __init__(self, values: Mapping[str, float]):
        self.values: Dict[str, float] = {str(k): float(v) for k, v in values.items()}

    def __call__(self, x: str) -> float:
        try:
            return self.values[x]
        except KeyError:
            raise UnknownPointError(x, "test function") from None

    def defined_on(self, points: Iterable[str]) -> bool:
        return all(p in self.values for p in points)

    @classmethod
    def constant(cls, space: GroundSpace, value: float) -> 'TestFunction':
        """λ_X restricted to the registered points."""
        return cls({p: value for p in space.point_ids})

    @classmethod
    def from_callable(cls, space: GroundSpace, fn: Callable[[str], float]) -> 'TestFunction':
        return cls({p: fn(p) for p in space.point_ids})

    @classmethod
    def tent(cls, space: GroundSpace, center: str, height: float, radius: float) -> 'TestFunction':
        """height·max(0, 1 - ρ(center, y)/radius): Lipschitz with constant height/radius."""
        if radius <= 0:
            raise ParseError("Tent radius must be positive")
        row = space.matrix[space.index_of(center)]
        vals = height * np.maximum(0.0, 1.0 - row / radius)
        return cls(dict(zip(space.point_ids, vals.tolist())))

    def shift(self, c: float) -> 'TestFunction':
        """λ ⊙ φ = φ + λ_X."""
        return TestFunction({k: v + c for k, v in self.values.items()})

    def join(self, other: 'TestFunction') -> 'TestFunction':
        """φ ⊕ ψ = max(φ, ψ) on the common domain."""
        keys = self.values.keys() & other.values.keys()
        return TestFunction({k: max(self.values[k], other.values[k]) for k in keys})

    def compose(self, f: Mapping[str, str]) -> 'TestFunction':
        """φ ∘ f, defined where f's image lies in φ's domain."""
        return TestFunction({x: self.values[y] for x, y in f.items() if y in self.values})

    def to_dict(self) -> Dict:
        return {'values': dict(sorted(self.values.items()))}


@dataclass(frozen=True, eq=False)
class IdempotentMeasure:
    """
    Finitely supported idempotent probability measure.

    Build through :func:`make_measure` or :func:`dirac`; direct construction
    skips validation and is only meant for diagnostics on raw atom lists.
    """

    space: GroundSpace
    points: Tuple[str, ...]
    weights: Tuple[float, ...]
    _index: Dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.points) != len(self.weights):
            raise ParseError("Points and weights differ in length")
        self._index.update({p: i for i, p in enumerate(self.points)})

    @property
    def atoms(self) -> List[Tuple[str, float]]:
        return list(zip(self.points, self.weights))

    @property
    def weight_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def __len__(self) -> int:
        return len(self.points)

    def weight(self, x: str) -> MaxPlusScalar:
        """λ at x; bottom off the support."""
        i = self._index.get(x)
        return BOTTOM if i is None else MaxPlusScalar(self.weights[i])

    def index_of(self, x: str) -> int:
        i = self._index.get(x)
        if i is None:
            raise UnknownPointError(x, "measure support")
        return i

    def __eq__(self, other) -> bool:
        if not isinstance(other, IdempotentMeasure):
            return NotImplemented
        return self.space == other.space and self.points == other.points and self.weights == other.weights

    def __hash__(self) -> int:
        return hash((self.points, self.weights))

    def __repr__(self) -> str:
        body = ", ".join(f"({p}, {w:g})" for p, w in self.atoms)
        return f"IdempotentMeasure([{body}])"

    def to_dict(self, space_ref: Optional[str] = None) -> Dict:
        return {
            'space': space_ref or self.space.name or 'space',
            'atoms': [{'point': p, 'weight': w} for p, w in self.atoms],
        }


def _split_atom(atom: AtomLike) -> Tuple[str, MaxPlusScalar]:
    if isinstance(atom, Mapping):
        try:
            return str(atom['point']), MaxPlusScalar.from_json(atom['weight'])
        except KeyError as exc:
            raise ParseError(f"Atom is missing field {exc}") from None
    point, weight = atom
    return str(point), MaxPlusScalar.of(weight)


def make_measure(space: GroundSpace,
                 atoms: Sequence[AtomLike],
                 mode: str = STRICT,
                 tol: Optional[float] = None) -> IdempotentMeasure:
    """
    Canonicalize an atom list into a measure.

    Duplicates merge by ⊕ (max), bottom atoms are dropped with a warning. In
    strict mode the top weight must already be 0 within ``tol``; autonormalize
    shifts every weight by minus the top weight.
    """
    tol = Config.TOLERANCE if tol is None else tol
    if mode not in (STRICT, AUTONORMALIZE):
        raise ParseError(f"Unknown normalization mode '{mode}'")
    if not atoms:
        raise NormalizationError("A measure needs at least one atom")

    merged: Dict[str, float] = {}
    dropped = []
    for atom in atoms:
        point, weight = _split_atom(atom)
        space.index_of(point)
        if weight.is_bottom:
            dropped.append(point)
            continue
        if point not in merged or weight.value > merged[point]:
            merged[point] = weight.value

    if dropped:
        logger.warning(f"Dropped {len(dropped)} atom(s) with weight -inf at: {', '.join(sorted(dropped))}")
    if not merged:
        raise NormalizationError("All atom weights are -inf")

    top = max(merged.values())
    if mode == STRICT and abs(top) > tol:
        raise NormalizationError(f"Top weight is {top:g}; strict mode requires 0 (use autonormalize)")
    shift = -top
    if mode == AUTONORMALIZE and top != 0:
        logger.info(f"Autonormalized measure by shifting weights {shift:+g}")

    points = tuple(sorted(merged))
    # the top atom lands exactly on 0.0 since merged[p] - top == 0 for it
    weights = tuple(merged[p] + shift for p in points)
    if any(w > 0 for w in weights):
        raise NormalizationError("Positive weight after normalization")
    return IdempotentMeasure(space, points, weights)


def dirac(space: GroundSpace, x: str) -> IdempotentMeasure:
    """δ_x = 0 ⊙ δ_x."""
    space.index_of(x)
    return IdempotentMeasure(space, (x,), (0.0,))


def support(mu: IdempotentMeasure) -> frozenset:
    return frozenset(mu.points)


def support_size(mu: IdempotentMeasure) -> int:
    return len(mu.points)


def integrate(mu: IdempotentMeasure, phi: TestFunction) -> float:
    """Maslov integral ⊕ᵢ λᵢ ⊙ φ(xᵢ) = maxᵢ (λᵢ + φ(xᵢ))."""
    return max(w + phi(p) for p, w in mu.atoms)


def pushforward(f: Mapping[str, str],
                mu: IdempotentMeasure,
                target_space: Optional[GroundSpace] = None) -> IdempotentMeasure:
    """I(f)(μ): move each atom to its image, merging coinciding images by max."""
    target = mu.space if target_space is None else target_space
    moved = []
    for p, w in mu.atoms:
        if p not in f:
            raise UnknownPointError(p, "map domain")
        image = str(f[p])
        target.index_of(image)
        moved.append((image, w))
    return make_measure(target, moved, STRICT)


def same_space(*measures: IdempotentMeasure) -> GroundSpace:
    """Common ground space of the operands, or SpaceMismatchError."""
    first = measures[0].space
    for other in measures[1:]:
        if other.space != first:
            raise SpaceMismatchError("Measures live on different ground spaces")
    return first


@dataclass
class AxiomReport:
    """Residuals of the defining identities of an idempotent probability measure."""

    constant: float      # |μ(λ_X) - λ|
    homogeneity: float   # |μ(λ⊙φ) - (μ(φ) + λ)|
    additivity: float    # |μ(φ⊕ψ) - (μ(φ) ⊕ μ(ψ))|
    linearity: float     # |μ(λ⊙φ ⊕ ψ) - (λ⊙μ(φ) ⊕ μ(ψ))|

    @property
    def max_residual(self) -> float:
        return max(self.constant, self.homogeneity, self.additivity, self.linearity)

    def holds(self, tol: float = 1e-12) -> bool:
        return self.max_residual <= tol

    def to_dict(self) -> Dict:
        return {
            'constant': self.constant,
            'homogeneity': self.homogeneity,
            'additivity': self.additivity,
            'linearity': self.linearity,
        }


def check_axioms(mu: IdempotentMeasure,
                 phi: TestFunction,
                 psi: TestFunction,
                 lam: float) -> AxiomReport:
    """Evaluate the measure axioms through :func:`integrate`; never raises on failure."""
    const = TestFunction({p: lam for p in mu.points})
    mu_phi = integrate(mu, phi)
    mu_psi = integrate(mu, psi)
    return AxiomReport(
        constant=abs(integrate(mu, const) - lam),
        homogeneity=abs(integrate(mu, phi.shift(lam)) - (mu_phi + lam)),
        additivity=abs(integrate(mu, phi.join(psi)) - max(mu_phi, mu_psi)),
        linearity=abs(integrate(mu, phi.shift(lam).join(psi)) - max(mu_phi + lam, mu_psi)),
    )

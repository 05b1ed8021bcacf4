"""
Convergence diagnostics for sequences of finitely supported idempotent measures.

Limits are unverifiable on finite data, so every check looks at a finite tail
with explicit tolerances.

Tolerance coupling between the three verdicts:
  * metric: ρ_ω(μ_t, μ) ≤ eps for every tail t;
  * pointwise: |μ_t(φ) - μ(φ)| < eps_pw for every panel φ, where tents of height h
    and radius r are (h/r)-Lipschitz, |μ_t(φ) - μ(φ)| ≤ max(1, h/r)·H(μ_t, μ), so
    eps_pw = max(1, h/r)·eps matches a metric tolerance eps;
  * star condition: partners within eps_x in space and eps_λ in weight, with
    eps_x + eps_λ = eps.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import Config
from .errors import InvalidArgumentError
from .logger import logger
from .measure import IdempotentMeasure, TestFunction, integrate, same_space
from .metric import rho_omega
from .space import GroundSpace


class MeasureSequence:
    """Ordered measures on a common space, optionally with a limit candidate."""

    def __init__(self, measures: Sequence[IdempotentMeasure], limit: Optional[IdempotentMeasure] = None):
        if not measures:
            raise InvalidArgumentError("A measure sequence must be nonempty")
        same_space(*measures, *([limit] if limit is not None else []))
        self.measures: List[IdempotentMeasure] = list(measures)
        self.limit = limit

    @property
    def space(self) -> GroundSpace:
        return self.measures[0].space

    def __len__(self) -> int:
        return len(self.measures)

    def __iter__(self) -> Iterator[IdempotentMeasure]:
        return iter(self.measures)

    def __getitem__(self, i):
        return self.measures[i]

    def tail(self, tail: Optional[int] = None) -> List[Tuple[int, IdempotentMeasure]]:
        """The last ``tail`` measures with their 1-based positions."""
        n = len(self.measures)
        tail = Config.default_tail(n) if tail is None else tail
        if not 1 <= tail <= n:
            raise InvalidArgumentError(f"Tail {tail} outside 1..{n}")
        return [(t + 1, self.measures[t]) for t in range(n - tail, n)]


SeqLike = Union[MeasureSequence, Sequence[IdempotentMeasure]]


def _as_sequence(seq: SeqLike) -> MeasureSequence:
    return seq if isinstance(seq, MeasureSequence) else MeasureSequence(seq)


def matched_tolerances(eps: float, height: float = 1.0, radius: float = 0.25) -> Dict[str, float]:
    """Tolerances for the star condition and the pointwise check that correspond to a metric tolerance."""
    return {
        'metric': eps,
        'pointwise': max(1.0, height / radius) * eps,
        'eps_x': eps / 2,
        'eps_lambda': eps / 2,
    }


# ---------------------------------------------------------------------- star condition

@dataclass
class AtomTrajectory:
    """Best partner residuals of one atom over the tail."""

    point: str
    weight: float
    steps: List[int]
    distance_residuals: List[float]
    weight_residuals: List[float]
    satisfied: bool

    @property
    def worst_distance(self) -> float:
        return max(self.distance_residuals)

    @property
    def worst_weight(self) -> float:
        return max(self.weight_residuals)

    def to_dict(self) -> Dict:
        return {
            'point': self.point, 'weight': self.weight, 'satisfied': self.satisfied,
            'worst_distance': self.worst_distance, 'worst_weight': self.worst_weight,
            'steps': self.steps,
            'distance_residuals': self.distance_residuals,
            'weight_residuals': self.weight_residuals,
        }


@dataclass
class StarReport:
    satisfied: bool
    atoms: List[AtomTrajectory]
    reverse_failures: List[Tuple[int, str]] = field(default_factory=list)
    eps_x: float = 0.0
    eps_lambda: float = 0.0
    tail: int = 0

    @property
    def worst_distance(self) -> float:
        return max(a.worst_distance for a in self.atoms)

    @property
    def worst_weight(self) -> float:
        return max(a.worst_weight for a in self.atoms)

    def to_dict(self) -> Dict:
        return {
            'satisfied': self.satisfied,
            'eps_x': self.eps_x,
            'eps_lambda': self.eps_lambda,
            'tail': self.tail,
            'worst_distance': self.worst_distance,
            'worst_weight': self.worst_weight,
            'atoms': [a.to_dict() for a in self.atoms],
            'reverse_failures': [{'step': t, 'point': p} for t, p in self.reverse_failures],
        }


def _best_partner(space: GroundSpace, x: str, lam: float, other: IdempotentMeasure,
                  eps_x: float, eps_lambda: float) -> Tuple[float, float, bool]:
    """Partner in ``other`` minimizing max(ρ/eps_x, |Δλ|/eps_λ)."""
    row = space.matrix[space.index_of(x)]
    dists = np.array([row[space.index_of(p)] for p in other.points])
    dlam = np.abs(other.weight_array - lam)
    score = np.maximum(dists / eps_x, dlam / eps_lambda)
    i = int(score.argmin())
    return float(dists[i]), float(dlam[i]), bool(dists[i] <= eps_x and dlam[i] <= eps_lambda)


def star_condition(seq: SeqLike,
                   mu: IdempotentMeasure,
                   eps_x: Optional[float] = None,
                   eps_lambda: Optional[float] = None,
                   tail: Optional[int] = None,
                   symmetric: bool = True) -> StarReport:
    """
    Finite-tail star condition: every atom (x_i, λ_i) of μ has, in each
    tail measure, an atom within eps_x of x_i whose weight is within eps_λ of λ_i.

    With ``symmetric`` the atoms of each tail measure must likewise find a partner
    in μ, which rules out persistent stray atoms the one-sided condition ignores.
    """
    seq = _as_sequence(seq)
    same_space(seq[0], mu)
    eps_x = Config.STAR_EPS_X if eps_x is None else eps_x
    eps_lambda = Config.STAR_EPS_LAMBDA if eps_lambda is None else eps_lambda
    if not (eps_x > 0 and eps_lambda > 0):
        raise InvalidArgumentError(f"Star tolerances must be positive, got eps_x={eps_x}, eps_lambda={eps_lambda}")
    window = seq.tail(tail)
    space = mu.space

    atoms = []
    for x, lam in mu.atoms:
        steps, dres, wres, ok = [], [], [], True
        for t, mt in window:
            d, w, hit = _best_partner(space, x, lam, mt, eps_x, eps_lambda)
            steps.append(t)
            dres.append(d)
            wres.append(w)
            ok = ok and hit
        atoms.append(AtomTrajectory(x, lam, steps, dres, wres, ok))

    reverse = []
    if symmetric:
        for t, mt in window:
            for x, lam in mt.atoms:
                if not _best_partner(space, x, lam, mu, eps_x, eps_lambda)[2]:
                    reverse.append((t, x))

    satisfied = all(a.satisfied for a in atoms) and not reverse
    return StarReport(satisfied, atoms, reverse, eps_x, eps_lambda, len(window))


# ---------------------------------------------------------------------- weak neighborhoods

def in_neighborhood(nu: IdempotentMeasure,
                    mu: IdempotentMeasure,
                    panel: Sequence[TestFunction],
                    eps: float) -> bool:
    """ν ∈ ⟨μ; φ₁, …, φ_k; ε⟩, i.e. |μ(φᵢ) - ν(φᵢ)| < ε for every panel function."""
    return all(abs(integrate(mu, phi) - integrate(nu, phi)) < eps for phi in panel)


def default_panel(space: GroundSpace,
                  mu: IdempotentMeasure,
                  measures: Sequence[IdempotentMeasure] = (),
                  radius: float = 0.25,
                  height: float = 1.0) -> List[TestFunction]:
    """The zero function plus a tent at every support point of μ and of ``measures``."""
    centers = set(mu.points)
    for m in measures:
        centers.update(m.points)
    panel = [TestFunction.constant(space, 0.0)]
    panel.extend(TestFunction.tent(space, c, height, radius) for c in sorted(centers))
    return panel


def separating_function(space: GroundSpace,
                        point: str,
                        others: Sequence[str],
                        height: float) -> TestFunction:
    """``height`` at ``point`` and 0 at every other registered point, in particular on ``others``."""
    if point in others:
        raise InvalidArgumentError(f"Point '{point}' cannot be separated from itself")
    space.index_of(point)
    return TestFunction({p: (height if p == point else 0.0) for p in space.point_ids})


@dataclass
class FailureCertificate:
    step: int
    point: str
    function: TestFunction
    gap: float

    def to_dict(self) -> Dict:
        return {'step': self.step, 'point': self.point, 'gap': self.gap,
                'function': self.function.to_dict()}


def failure_certificate(seq: SeqLike,
                        mu: IdempotentMeasure,
                        eps: float,
                        eps_x: Optional[float] = None,
                        tail: Optional[int] = None) -> Optional[FailureCertificate]:
    """
    A test function witnessing pointwise non-convergence, if one is found in the tail.

    An atom with no partner within eps_x in the other measure gets a separating
    function tall enough that the two integrals differ by more than ``eps``.
    """
    seq = _as_sequence(seq)
    eps_x = Config.STAR_EPS_X if eps_x is None else eps_x
    space = mu.space

    for t, mt in seq.tail(tail):
        spread = max(abs(w) for w in mu.weights + mt.weights)
        height = spread + 1.0 + eps
        for source, target in ((mu, mt), (mt, mu)):
            for x in source.points:
                row = space.matrix[space.index_of(x)]
                nearest = min(row[space.index_of(p)] for p in target.points)
                if nearest <= eps_x:
                    continue
                phi = separating_function(space, x, target.points, height)
                gap = abs(integrate(mu, phi) - integrate(mt, phi))
                if gap > eps:
                    logger.info(f"Separating function at '{x}' certifies a gap of {gap:g} at step {t}")
                    return FailureCertificate(t, x, phi, gap)
    return None


# ---------------------------------------------------------------------- verdicts

def converges_metric(seq: SeqLike,
                     mu: IdempotentMeasure,
                     eps: float,
                     tail: Optional[int] = None) -> bool:
    """ρ_ω(μ_t, μ) ≤ eps over the tail."""
    seq = _as_sequence(seq)
    return all(rho_omega(mt, mu).rho_omega <= eps for _, mt in seq.tail(tail))


def converges_pointwise(seq: SeqLike,
                        mu: IdempotentMeasure,
                        panel: Optional[Sequence[TestFunction]] = None,
                        eps: float = 1e-3,
                        tail: Optional[int] = None,
                        radius: float = 0.25,
                        height: float = 1.0) -> bool:
    """Every tail measure lies in ⟨μ; panel; eps⟩. Without a panel, :func:`default_panel` is used."""
    seq = _as_sequence(seq)
    window = seq.tail(tail)
    if panel is None:
        panel = default_panel(mu.space, mu, [mt for _, mt in window], radius, height)
    return all(in_neighborhood(mt, mu, panel, eps) for _, mt in window)


def metric_trajectory(seq: SeqLike, mu: IdempotentMeasure) -> List[float]:
    """ρ_ω(μ_t, μ) for every t."""
    return [rho_omega(mt, mu).rho_omega for mt in _as_sequence(seq)]


def is_cauchy(seq: SeqLike, eps: float, tail: Optional[int] = None) -> bool:
    """Largest pairwise ρ_ω inside the tail is at most eps."""
    window = [mt for _, mt in _as_sequence(seq).tail(tail)]
    return all(rho_omega(a, b).rho_omega <= eps
               for i, a in enumerate(window) for b in window[i + 1:])


@dataclass
class ConvergenceReport:
    metric: bool
    pointwise: bool
    star: StarReport
    trajectory: List[float]
    tolerances: Dict[str, float]
    certificate: Optional[FailureCertificate] = None

    @property
    def agree(self) -> bool:
        return self.metric == self.pointwise == self.star.satisfied

    def to_dict(self) -> Dict:
        return {
            'metric': self.metric,
            'pointwise': self.pointwise,
            'star': self.star.to_dict(),
            'agree': self.agree,
            'tolerances': self.tolerances,
            'rho_omega_trajectory': self.trajectory,
            'certificate': self.certificate.to_dict() if self.certificate else None,
        }


def diagnose(seq: SeqLike,
             mu: IdempotentMeasure,
             eps: float,
             tail: Optional[int] = None,
             radius: float = 0.25,
             height: float = 1.0,
             eps_x: Optional[float] = None,
             eps_lambda: Optional[float] = None) -> ConvergenceReport:
    """All three verdicts at matched tolerances, plus a separating function on failure.

    ``eps_x`` and ``eps_lambda`` override the halves of ``eps`` used for the star condition.
    """
    seq = _as_sequence(seq)
    tol = matched_tolerances(eps, height, radius)
    if eps_x is not None:
        tol['eps_x'] = eps_x
    if eps_lambda is not None:
        tol['eps_lambda'] = eps_lambda
    logger.processing(f"Diagnosing convergence of {len(seq)} measures (eps={eps:g})")

    star = star_condition(seq, mu, tol['eps_x'], tol['eps_lambda'], tail)
    metric = converges_metric(seq, mu, eps, tail)
    pointwise = converges_pointwise(seq, mu, None, tol['pointwise'], tail, radius, height)
    certificate = None
    if not pointwise:
        certificate = failure_certificate(seq, mu, tol['pointwise'], tol['eps_x'], tail)

    report = ConvergenceReport(metric, pointwise, star, metric_trajectory(seq, mu), tol, certificate)
    if not report.agree:
        logger.warning("Metric, pointwise and star verdicts disagree")
    return report

"""
The idempotent Kantorovich distance on finitely supported idempotent measures.

For a coupling ξ the transport cost is the max over its support of
c_jk = |λ_2k - λ_1j| + ρ(x_1j, x_2k); H is the smallest such cost over all
couplings and ρ_ω truncates it at the diameter of the ambient space.

Because the cost only sees the support, and a support is feasible exactly when
every row j holds a pair with λ_2k ≥ λ_1j and every column k a pair with
λ_1j ≥ λ_2k, the optimum picks each row's and each column's cheapest witness
independently:

    H = max( max_j min{c_jk : λ_2k ≥ λ_1j},  max_k min{c_jk : λ_1j ≥ λ_2k} ).

:func:`h_bruteforce` keeps the exhaustive search over supports as an oracle.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import Config
from .coupling import (Coupling, Pair, compose, feasible_support_masks, from_support,
                       mask_to_support, require_marginals)
from .errors import InvalidArgumentError, OracleMismatchError
from .logger import logger
from .measure import IdempotentMeasure, dirac, same_space
from .space import GroundSpace

CLOSED_FORM = "closed_form"
BRUTEFORCE = "bruteforce"


@dataclass(frozen=True, eq=False)
class CostMatrix:
    values: np.ndarray
    mu1: IdempotentMeasure
    mu2: IdempotentMeasure

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def support_cost(self, pairs) -> float:
        """Bottleneck cost of a support: the largest c_jk over its pairs."""
        return max(float(self.values[j, k]) for j, k in pairs)


@dataclass
class DistanceReport:
    H: float
    rho_omega: float
    optimal_support: List[Pair]
    truncated: bool
    diam: float
    method: str = CLOSED_FORM
    support_points: List[Tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            'H': self.H,
            'rho_omega': self.rho_omega,
            'truncated': self.truncated,
            'support': [[j, k] for j, k in self.optimal_support],
            'support_points': [[x, y] for x, y in self.support_points],
        }


def cost_matrix(mu1: IdempotentMeasure, mu2: IdempotentMeasure) -> CostMatrix:
    """c_jk = |λ_2k - λ_1j| ⊙ ρ(x_1j, x_2k)."""
    space = same_space(mu1, mu2)
    idx1 = [space.index_of(p) for p in mu1.points]
    idx2 = [space.index_of(p) for p in mu2.points]
    rho = space.matrix[np.ix_(idx1, idx2)]
    lam1 = mu1.weight_array
    lam2 = mu2.weight_array
    values = np.abs(lam2[None, :] - lam1[:, None]) + rho
    values.setflags(write=False)
    return CostMatrix(values, mu1, mu2)


def _report(cost: CostMatrix, H: float, support: Sequence[Pair], method: str) -> DistanceReport:
    space = cost.mu1.space
    d = space.diam()
    pairs = sorted(support)
    return DistanceReport(
        H=H,
        rho_omega=min(d, H),
        optimal_support=pairs,
        truncated=d < H,
        diam=d,
        method=method,
        support_points=[(cost.mu1.points[j], cost.mu2.points[k]) for j, k in pairs],
    )


def h_distance(mu1: IdempotentMeasure, mu2: IdempotentMeasure) -> DistanceReport:
    """H via per-row and per-column cheapest witnesses; ties go to the smallest (j, k)."""
    cost = cost_matrix(mu1, mu2)
    c = cost.values
    lam1 = mu1.weight_array
    lam2 = mu2.weight_array

    row_ok = lam2[None, :] >= lam1[:, None]
    col_ok = lam1[:, None] >= lam2[None, :]
    row_c = np.where(row_ok, c, np.inf)
    col_c = np.where(col_ok, c, np.inf)

    # argmin returns the first minimum, i.e. the smallest index on ties
    row_arg = row_c.argmin(axis=1)
    col_arg = col_c.argmin(axis=0)
    row_best = row_c[np.arange(len(lam1)), row_arg]
    col_best = col_c[col_arg, np.arange(len(lam2))]

    H = float(max(row_best.max(), col_best.max()))
    support = {(int(j), int(k)) for j, k in enumerate(row_arg)}
    support |= {(int(j), int(k)) for k, j in enumerate(col_arg)}
    return _report(cost, H, support, CLOSED_FORM)


def h_bruteforce(mu1: IdempotentMeasure,
                 mu2: IdempotentMeasure,
                 max_pairs: Optional[int] = None) -> DistanceReport:
    """
    Oracle for H: minimum bottleneck cost over every feasible support.

    Among minimizers the support with the fewest pairs wins, then the smallest mask.
    """
    same_space(mu1, mu2)
    cost = cost_matrix(mu1, mu2)
    masks = feasible_support_masks(mu1, mu2, max_pairs)
    flat = cost.values.ravel()
    n_pairs = flat.size

    costs = np.full(masks.shape, -np.inf)
    sizes = np.zeros(masks.shape, dtype=np.int64)
    for p in range(n_pairs):
        present = ((masks >> p) & 1).astype(bool)
        costs = np.where(present, np.maximum(costs, flat[p]), costs)
        sizes += present

    H = float(costs.min())
    candidates = np.flatnonzero(costs == H)
    best = candidates[np.argmin(sizes[candidates])]
    support = mask_to_support(masks[best], len(mu2))
    logger.info(f"Oracle searched {masks.size} feasible supports, H = {H:g}")
    return _report(cost, H, support, BRUTEFORCE)


def rho_omega(mu1: IdempotentMeasure,
              mu2: IdempotentMeasure,
              method: str = CLOSED_FORM) -> DistanceReport:
    """ρ_ω = min(diam X, H)."""
    if method == CLOSED_FORM:
        return h_distance(mu1, mu2)
    if method == BRUTEFORCE:
        return h_bruteforce(mu1, mu2)
    raise InvalidArgumentError(f"Unknown solver '{method}'")


def verified_distance(mu1: IdempotentMeasure, mu2: IdempotentMeasure) -> Tuple[DistanceReport, DistanceReport]:
    """Closed form and oracle side by side; raises OracleMismatchError on any difference."""
    fast = h_distance(mu1, mu2)
    slow = h_bruteforce(mu1, mu2)
    if fast.H != slow.H:
        logger.error(f"Solver mismatch: closed form {fast.H!r} vs oracle {slow.H!r}")
        raise OracleMismatchError(f"Closed-form H {fast.H!r} differs from oracle {slow.H!r}")
    logger.success(f"Oracle confirmed H = {fast.H:g}")
    return fast, slow


def optimal_coupling(mu1: IdempotentMeasure, mu2: IdempotentMeasure) -> Coupling:
    """The witness coupling of the closed-form solver, γ at the min-bound on its support."""
    report = h_distance(mu1, mu2)
    return require_marginals(from_support(mu1, mu2, report.optimal_support), "optimal")


# ---------------------------------------------------------------------- limits and matrices

@dataclass
class RhoIEstimate:
    value: float
    converged: bool
    trajectory: List[float]
    window: int

    def to_dict(self) -> Dict:
        return {'value': self.value, 'converged': self.converged,
                'window': self.window, 'trajectory': self.trajectory}


def rho_i_estimate(seq1: Sequence[IdempotentMeasure],
                   seq2: Sequence[IdempotentMeasure],
                   tol: float = 1e-6,
                   window: int = 3) -> RhoIEstimate:
    """
    Estimate ρ_I(μ, ν) = lim_t ρ_ω(μ_t, ν_t) from approximating sequences.

    Sequences are paired from the start and cut to the shorter length. The
    estimate counts as converged when the last ``window`` values spread by at
    most ``tol``.
    """
    if not seq1 or not seq2:
        raise InvalidArgumentError("rho_I estimation needs two nonempty sequences")
    same_space(*seq1, *seq2)

    trajectory = [rho_omega(a, b).rho_omega for a, b in zip(seq1, seq2)]
    tail = trajectory[-window:]
    converged = (max(tail) - min(tail)) <= tol
    return RhoIEstimate(trajectory[-1], converged, trajectory, len(tail))


def gram(measures: Sequence[IdempotentMeasure], workers: Optional[int] = None) -> np.ndarray:
    """Symmetric matrix of pairwise ρ_ω; pairs may be evaluated on a thread pool."""
    if not measures:
        return np.zeros((0, 0))
    same_space(*measures)
    workers = Config.GRAM_WORKERS if workers is None else workers
    n = len(measures)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def evaluate(pair):
        i, j = pair
        return rho_omega(measures[i], measures[j]).rho_omega

    if workers > 1 and len(pairs) > 1:
        logger.processing(f"Evaluating {len(pairs)} pairs on {workers} workers")
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(evaluate, pairs))
    else:
        values = [evaluate(p) for p in pairs]

    out = np.zeros((n, n))
    for (i, j), v in zip(pairs, values):
        out[i, j] = out[j, i] = v
    return out


def embedding_defect(space: GroundSpace) -> float:
    """Largest |ρ_ω(δ_x, δ_y) - ρ(x, y)| over registered pairs; 0 for an isometric embedding."""
    ids = space.point_ids
    worst = 0.0
    for i, x in enumerate(ids):
        for y in ids[i + 1:]:
            got = rho_omega(dirac(space, x), dirac(space, y)).rho_omega
            worst = max(worst, abs(got - space.distance(x, y)))
    return worst


@dataclass
class TriangleCertificate:
    H12: float
    H23: float
    H13: float
    composed_cost: float
    composed_support: List[Pair]

    def holds(self, tol: Optional[float] = None) -> bool:
        tol = Config.TRIANGLE_TOLERANCE if tol is None else tol
        return self.H13 <= self.composed_cost + tol and self.composed_cost <= self.H12 + self.H23 + tol


def triangle_certificate(mu1: IdempotentMeasure,
                         mu2: IdempotentMeasure,
                         mu3: IdempotentMeasure) -> TriangleCertificate:
    """Glue optimal witnesses for (μ₁, μ₂) and (μ₂, μ₃) and price the composed support against μ₁, μ₃."""
    r12 = h_distance(mu1, mu2)
    r23 = h_distance(mu2, mu3)
    xi13 = compose(from_support(mu1, mu2, r12.optimal_support),
                   from_support(mu2, mu3, r23.optimal_support))
    require_marginals(xi13, "composed")
    cost13 = cost_matrix(mu1, mu3)
    return TriangleCertificate(
        H12=r12.H,
        H23=r23.H,
        H13=h_distance(mu1, mu3).H,
        composed_cost=cost13.support_cost(xi13.entries),
        composed_support=sorted(xi13.entries),
    )

"""
Couplings: idempotent measures ξ on X² whose coordinate pushforwards are μ₁ and μ₂.

Entries are stored sparsely as (j, k) -> γ_jk with j, k indexing the canonical
(sorted) atoms of μ₁ and μ₂; an absent pair has weight bottom. For finitely
supported ξ the pushforward condition I(π_i)(ξ) = μ_i reads

    max_k γ_jk = λ_1j for every j,   max_j γ_jk = λ_2k for every k,

with γ_jk ≤ min(λ_1j, λ_2k) on every present pair.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

import numpy as np

from .config import Config
from .errors import MarginalError, NormalizationError, SpaceMismatchError, SupportLimitError
from .logger import logger
from .measure import IdempotentMeasure, same_space
from .semiring import MaxPlusScalar

Pair = Tuple[int, int]
Support = FrozenSet[Pair]


@dataclass
class MarginalReport:
    """Outcome of :func:`check_marginals`. Residuals use -inf-free floats: a missing row counts as inf."""

    ok: bool
    row_residuals: List[float]
    col_residuals: List[float]
    bound_violations: List[Pair] = field(default_factory=list)
    top: float = 0.0
    index_errors: List[Pair] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(self.row_residuals + self.col_residuals + [0.0])

    def to_dict(self) -> Dict:
        return {
            'ok': self.ok,
            'max_residual': self.max_residual,
            'row_residuals': self.row_residuals,
            'col_residuals': self.col_residuals,
            'bound_violations': [list(p) for p in self.bound_violations],
            'top': self.top,
        }


@dataclass(frozen=True)
class Coupling:
    mu1: IdempotentMeasure
    mu2: IdempotentMeasure
    entries: Dict[Pair, float]

    @property
    def support(self) -> Support:
        return frozenset(self.entries)

    def gamma(self, j: int, k: int) -> MaxPlusScalar:
        return MaxPlusScalar.of(self.entries.get((j, k)))

    def point_pairs(self) -> List[Tuple[str, str]]:
        return [(self.mu1.points[j], self.mu2.points[k]) for j, k in sorted(self.entries)]

    def to_dict(self) -> Dict:
        return {
            'mu1': self.mu1.to_dict(),
            'mu2': self.mu2.to_dict(),
            'entries': [
                {'j': j, 'k': k, 'x': self.mu1.points[j], 'y': self.mu2.points[k],
                 'gamma': self.entries[(j, k)]}
                for j, k in sorted(self.entries)
            ],
        }


# ---------------------------------------------------------------------- checks

def check_marginals(xi: Coupling, tol: Optional[float] = None) -> MarginalReport:
    """Both max-marginal families, the γ-bound and the top weight, within ``tol``."""
    tol = Config.TOLERANCE if tol is None else tol
    lam1, lam2 = xi.mu1.weights, xi.mu2.weights
    n1, n2 = len(lam1), len(lam2)

    row_max: List[Optional[float]] = [None] * n1
    col_max: List[Optional[float]] = [None] * n2
    bound_violations: List[Pair] = []
    index_errors: List[Pair] = []

    for (j, k), g in xi.entries.items():
        if not (0 <= j < n1 and 0 <= k < n2):
            index_errors.append((j, k))
            continue
        if g > min(lam1[j], lam2[k]) + tol:
            bound_violations.append((j, k))
        row_max[j] = g if row_max[j] is None else max(row_max[j], g)
        col_max[k] = g if col_max[k] is None else max(col_max[k], g)

    def residuals(maxima, lam):
        return [float('inf') if m is None else abs(m - l) for m, l in zip(maxima, lam)]

    rows = residuals(row_max, lam1)
    cols = residuals(col_max, lam2)
    top = max(xi.entries.values()) if xi.entries else float('-inf')
    ok = (not index_errors and not bound_violations
          and all(r <= tol for r in rows) and all(c <= tol for c in cols)
          and abs(top) <= tol)
    return MarginalReport(ok, rows, cols, sorted(bound_violations), float(top), sorted(index_errors))


def projections(xi: Coupling) -> Tuple[FrozenSet[str], FrozenSet[str]]:
    """π₁(Sξ) and π₂(Sξ) as point sets."""
    first = frozenset(xi.mu1.points[j] for j, _ in xi.entries)
    second = frozenset(xi.mu2.points[k] for _, k in xi.entries)
    return first, second


def require_marginals(xi: Coupling, what: str) -> Coupling:
    report = check_marginals(xi)
    if not report.ok:
        logger.error(f"{what} coupling failed marginal check (residual {report.max_residual:g})")
        raise MarginalError(f"{what} coupling violates its marginals")
    return xi


# ---------------------------------------------------------------------- builders

def _anchor(mu: IdempotentMeasure) -> int:
    """Index of the zero-weight atom with the smallest point id."""
    for i, w in enumerate(mu.weights):
        if w == 0.0:
            return i
    raise NormalizationError("Measure has no atom of weight 0")


def xi0(mu1: IdempotentMeasure, mu2: IdempotentMeasure) -> Coupling:
    """
    The canonical coupling: the anchor row carries μ₂, the anchor column carries μ₁.

    With anchors j*, k*: (j*, k*) -> 0, (j*, k) -> λ_2k, (j, k*) -> λ_1j.
    """
    same_space(mu1, mu2)
    js, ks = _anchor(mu1), _anchor(mu2)

    entries: Dict[Pair, float] = {(js, ks): 0.0}
    for k, w in enumerate(mu2.weights):
        if k != ks:
            entries[(js, k)] = w
    for j, w in enumerate(mu1.weights):
        if j != js:
            entries[(j, ks)] = w
    return require_marginals(Coupling(mu1, mu2, entries), "xi0")


def random_member(mu1: IdempotentMeasure,
                  mu2: IdempotentMeasure,
                  seed: Optional[int] = None,
                  spread: float = 2.0) -> Coupling:
    """
    ξ⁰ ⊕ R: joins ξ⁰ with random weights γ ≤ min(λ_1k, λ_2m) on a random block K × M
    taken away from the anchor row and column.
    """
    base = xi0(mu1, mu2)
    rng = np.random.default_rng(Config.DEFAULT_SEED if seed is None else seed)
    js, ks = _anchor(mu1), _anchor(mu2)

    rows = [j for j in range(len(mu1)) if j != js]
    cols = [k for k in range(len(mu2)) if k != ks]
    K = [j for j in rows if rng.random() < 0.5]
    M = [k for k in cols if rng.random() < 0.5]

    entries = dict(base.entries)
    for j in K:
        for k in M:
            bound = min(mu1.weights[j], mu2.weights[k])
            gamma = bound if rng.random() < 0.5 else bound - float(rng.uniform(0.0, spread))
            entries[(j, k)] = gamma
    return require_marginals(Coupling(mu1, mu2, entries), "random")


def diagonal(mu: IdempotentMeasure) -> Coupling:
    """γ_jj = λ_j on the diagonal Δ(X)."""
    return Coupling(mu, mu, {(j, j): w for j, w in enumerate(mu.weights)})


def product(mu1: IdempotentMeasure, mu2: IdempotentMeasure) -> Coupling:
    """Tensor product μ₁ ⊗ μ₂: γ_jk = λ_1j ⊙ λ_2k."""
    same_space(mu1, mu2)
    entries = {(j, k): a + b for j, a in enumerate(mu1.weights) for k, b in enumerate(mu2.weights)}
    return Coupling(mu1, mu2, entries)


def from_support(mu1: IdempotentMeasure, mu2: IdempotentMeasure, pairs: Iterable[Pair]) -> Coupling:
    """Coupling with γ at its min-bound on the given pair set (feasibility is checked by the caller)."""
    entries = {(j, k): min(mu1.weights[j], mu2.weights[k]) for j, k in pairs}
    return Coupling(mu1, mu2, entries)


def transpose(xi: Coupling) -> Coupling:
    return Coupling(xi.mu2, xi.mu1, {(k, j): g for (j, k), g in xi.entries.items()})


def compose(xi12: Coupling, xi23: Coupling) -> Coupling:
    """
    Glue two couplings through the shared middle measure.

    The support is every (k, l) linked by some middle atom m with (k, m) ∈ Sξ₁₂
    and (m, l) ∈ Sξ₂₃; weights sit at the bound min(λ_1k, λ_3l).
    """
    if xi12.mu2 != xi23.mu1:
        raise SpaceMismatchError("compose needs xi12.mu2 == xi23.mu1")

    left: Dict[int, List[int]] = {}
    right: Dict[int, List[int]] = {}
    for k, m in xi12.entries:
        left.setdefault(m, []).append(k)
    for m, l in xi23.entries:
        right.setdefault(m, []).append(l)

    pairs = set()
    for m, ks in left.items():
        for k in ks:
            for l in right.get(m, ()):
                pairs.add((k, l))

    return require_marginals(from_support(xi12.mu1, xi23.mu2, sorted(pairs)), "composed")


# ---------------------------------------------------------------------- oracle substrate

def witness_masks(mu1: IdempotentMeasure, mu2: IdempotentMeasure) -> Tuple[List[int], List[int]]:
    """
    Bit masks over pairs p = j·n₂ + k.

    Row j is covered by pairs with λ_2k ≥ λ_1j, column k by pairs with
    λ_1j ≥ λ_2k: with γ at the min-bound exactly those pairs attain the marginal.
    """
    lam1, lam2 = mu1.weights, mu2.weights
    n2 = len(lam2)
    rows = [sum(1 << (j * n2 + k) for k in range(n2) if lam2[k] >= lam1[j]) for j in range(len(lam1))]
    cols = [sum(1 << (j * n2 + k) for j in range(len(lam1)) if lam1[j] >= lam2[k]) for k in range(n2)]
    return rows, cols


def feasible_support_masks(mu1: IdempotentMeasure,
                           mu2: IdempotentMeasure,
                           max_pairs: Optional[int] = None) -> np.ndarray:
    """Every feasible support as an integer bit mask, ascending."""
    max_pairs = Config.ORACLE_MAX_PAIRS if max_pairs is None else max_pairs
    n_pairs = len(mu1) * len(mu2)
    if n_pairs > max_pairs:
        raise SupportLimitError(f"{len(mu1)}x{len(mu2)} = {n_pairs} pairs exceeds the oracle guard {max_pairs}")

    masks = np.arange(1, 1 << n_pairs, dtype=np.int64)
    keep = np.ones(masks.shape, dtype=bool)
    for w in sum(witness_masks(mu1, mu2), []):
        keep &= (masks & w) != 0
    return masks[keep]


def mask_to_support(mask: int, n2: int) -> Support:
    mask = int(mask)
    pairs = []
    p = 0
    while mask:
        if mask & 1:
            pairs.append(divmod(p, n2))
        mask >>= 1
        p += 1
    return frozenset(pairs)


def enumerate_feasible_supports(mu1: IdempotentMeasure,
                                mu2: IdempotentMeasure,
                                max_pairs: Optional[int] = None) -> Iterator[Support]:
    """Yield every pair set S on which γ = min-bound satisfies both marginal families."""
    same_space(mu1, mu2)
    n2 = len(mu2)
    for mask in feasible_support_masks(mu1, mu2, max_pairs):
        yield mask_to_support(mask, n2)

"""
twin 空間求解 (twin-solver)

(A+ ⊗ 1 - 1 ⊗ A-) ρ = 0 在 Hermitian 座標上是實線性方程組；
限制在 ρ 的 range 基底上求核，即得所有 twin 對。
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg

from . import linalg
from .exceptions import TwinCheckFailed
from .linalg import Side
from .measurement import certainty_test
from .pairs import ObservablePair, combine, is_twin_pair
from .states import PureDecomposition, from_pure, mix, projectors

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TwinSpace:
    d_plus: int
    d_minus: int
    basis: tuple               # ObservablePair，係數空間上正交歸一，第一個為純量對
    dim_detectable: int
    nullity_plus: int
    nullity_minus: int

    @property
    def dim_total(self):
        return len(self.basis)

    @property
    def dim_undetectable_plus(self):
        return self.nullity_plus ** 2

    @property
    def dim_undetectable_minus(self):
        return self.nullity_minus ** 2

    @property
    def bookkeeping_consistent(self):
        return self.dim_total == self.dim_detectable + self.dim_undetectable_plus + self.dim_undetectable_minus

    def coordinates(self):
        """(d+² + d-²) × dim_total，各行為一個基底對的座標"""
        return np.column_stack([pair.coordinates() for pair in self.basis])

    def pair_from_coordinates(self, coefficients):
        return combine(self.basis, coefficients)

    def containment_distance(self, pairs):
        """pairs 所張空間到本空間的距離 (最大主角的正弦)；0 代表完全包含"""
        return containment_distance(pairs, self.coordinates())

    def __iter__(self):
        return iter(self.basis)

    def __len__(self):
        return len(self.basis)


def _normalized(v):
    return v / np.linalg.norm(v)


def _orthonormal_with_first(first, vectors, tol):
    """以 first 為第一個向量，補上 vectors 張成空間中與之正交的正交歸一基底"""
    first = _normalized(first)
    complement = vectors - np.outer(first, first @ vectors)
    if not complement.size:
        return first[:, None]
    # 門檻是絕對的：vectors 的各行長度 <= 1
    U, s, _ = scipy.linalg.svd(complement, full_matrices=False)
    rest = U[:, s > tol]
    if not rest.size:
        return first[:, None]
    return np.column_stack([first, np.real(linalg.fix_phases(rest))])


def constraint_matrix(state):
    """
    實係數矩陣：座標 x ↦ (A+ ⊗ 1 - 1 ⊗ A-) C 的實部與虛部。

    C 為 ρ 的 range 基底；列數 2·D·rank，行數 d+² + d-²。
    """
    tol = state.tol
    C = linalg.range_basis(state.rho, tol.rank_tol, tol.herm_tol)
    columns = []
    for E in linalg.hermitian_basis(state.d_plus):
        columns.append((state.lift(E, Side.PLUS) @ C).reshape(-1))
    for E in linalg.hermitian_basis(state.d_minus):
        columns.append((-state.lift(E, Side.MINUS) @ C).reshape(-1))
    M = np.column_stack(columns)
    return np.vstack([M.real, M.imag])


def _detectable_coordinates(pairs, range_plus, range_minus):
    rows = []
    for pair in pairs:
        rows.append(ObservablePair(
            range_plus @ pair.a_plus @ range_plus, range_minus @ pair.a_minus @ range_minus,
        ).coordinates())
    return np.column_stack(rows)


def solve_twin_space(state):
    tol = state.tol
    M = constraint_matrix(state)
    kernel = linalg.kernel_basis(M, tol.rank_tol)
    logger.debug('twin constraint system %dx%d, kernel dimension %d', *M.shape, kernel.shape[1])
    scalar = ObservablePair.scalar(state.d_plus, state.d_minus).coordinates()
    coordinates = _orthonormal_with_first(scalar, kernel, tol.residual_tol)
    basis = tuple(
        ObservablePair.from_coordinates(coordinates[:, k], state.d_plus, state.d_minus)
        for k in range(coordinates.shape[1])
    )

    P = projectors(state)
    detectable = _detectable_coordinates(basis, P.R_plus, P.R_minus)
    dim_detectable = int(np.sum(scipy.linalg.svdvals(detectable) > tol.residual_tol))
    space = TwinSpace(
        d_plus=state.d_plus,
        d_minus=state.d_minus,
        basis=basis,
        dim_detectable=dim_detectable,
        nullity_plus=P.nullity_plus,
        nullity_minus=P.nullity_minus,
    )
    if not state.is_singular:
        logger.info('nonsingular state: only scalar twins')
    if not space.bookkeeping_consistent:
        logger.warning(
            'twin space dimension %d != %d detectable + %d + %d undetectable',
            space.dim_total, space.dim_detectable, space.dim_undetectable_plus, space.dim_undetectable_minus,
        )
    return space


def detectable_twin_basis(twin_space, state):
    """(A′ ⊕ 0″) 形式的 twin 基底，第一個為 (R+, R-) 正規化"""
    tol = state.tol
    P = projectors(state)
    detectable = _detectable_coordinates(twin_space.basis, P.R_plus, P.R_minus)
    first = ObservablePair(P.R_plus, P.R_minus).coordinates()
    coordinates = _orthonormal_with_first(first, detectable, tol.residual_tol)
    return tuple(
        ObservablePair.from_coordinates(coordinates[:, k], state.d_plus, state.d_minus)
        for k in range(coordinates.shape[1])
    )


def subspace_distance(space_a, space_b):
    """兩個 twin 空間的距離；維度不同時為 1"""
    return linalg.subspace_distance(space_a.coordinates(), space_b.coordinates())


def containment_distance(pairs, coordinates):
    pairs = list(pairs)
    if not pairs:
        return 0.0
    Q = scipy.linalg.orth(np.column_stack([pair.coordinates() for pair in pairs]))
    K = coordinates
    residual = Q - K @ (K.T @ Q)
    return float(np.linalg.norm(residual, 2)) if residual.size else 0.0


def additive_twins(state, B_plus, B_minus) -> Optional[ObservablePair]:
    """
    B = B+ ⊗ 1 + 1 ⊗ B- 在 ρ 中有 sharp value b 時，
    (B+ - b/2, -B- + b/2) 是 twin；否則回傳 None。
    """
    tol = state.tol
    B_plus = linalg.as_hermitian(B_plus, tol.herm_tol, name='B_plus')
    B_minus = linalg.as_hermitian(B_minus, tol.herm_tol, name='B_minus')
    B = state.lift(B_plus, Side.PLUS) + state.lift(B_minus, Side.MINUS)
    certainty = certainty_test(state, B)
    if not certainty.sharp:
        return None
    b = certainty.value
    pair = ObservablePair(
        B_plus - (b / 2) * np.eye(state.d_plus),
        -B_minus + (b / 2) * np.eye(state.d_minus),
    )
    verdict = is_twin_pair(state, pair)
    if not verdict.verdict:
        raise TwinCheckFailed(f'additive pair for sharp value {b!r} fails the twin check')
    return pair


@dataclass(frozen=True)
class ConsequenceReport:
    residuals: dict
    tolerance: float
    companion_dim: int

    @property
    def passed(self):
        return all(value <= self.tolerance for value in self.residuals.values())


def companion_state(state, seed=None):
    """range 相同、權重不同的狀態"""
    components = state.spectral_components()
    n = len(components)
    if seed is None:
        weights = np.arange(1, n + 1, dtype=float)
    else:
        weights = np.random.default_rng(seed).uniform(0.1, 1.0, size=n)
    weights = weights / weights.sum()
    decomposition = PureDecomposition.build(
        [(w, vector) for w, (_, vector) in zip(weights, components)], state.d_plus, state.d_minus,
    )
    return mix(decomposition, state.tol)


def twins_restrict_to_range_vectors(state, twin_space, decomposition=None, seed=None):
    """
    ρ 的 twin 也是 range 中每個純態的 twin，
    並且只由 range 決定 (換一組權重後解出的空間相同)。
    """
    tol = state.tol
    residuals = {}

    def worst(vectors):
        value = 0.0
        for vector in vectors:
            pure = from_pure(vector, state.d_plus, state.d_minus, tol)
            for pair in twin_space.basis:
                value = max(value, is_twin_pair(pure, pair).residual)
        return value

    residuals['eigenvectors'] = worst(vector for _, vector in state.spectral_components())
    if decomposition is not None:
        residuals['decomposition'] = worst(vector for _, vector in decomposition)
    companion = solve_twin_space(companion_state(state, seed))
    residuals['range_only'] = subspace_distance(twin_space, companion)
    return ConsequenceReport(residuals, tol.residual_tol, companion.dim_total)


class AdmissionVerdict(NamedTuple):
    verdict: bool
    residual: float              # ‖(A+ - A-) R‖
    component_residual: float    # max ‖(A+ - A-) φ‖，φ 為 ρ 的特徵向量
    tolerance: float


def states_admitting_twins(pair, state):
    """range(ρ) ⊆ ker(A+ ⊗ 1 - 1 ⊗ A-)"""
    tol = state.tol
    D = pair.difference()
    R = projectors(state).R
    residual = linalg.max_abs(D @ R)
    component_residual = max(
        (float(np.linalg.norm(D @ vector)) for _, vector in state.spectral_components()), default=0.0,
    )
    verdict = residual <= tol.residual_tol and component_residual <= tol.residual_tol
    return AdmissionVerdict(verdict, residual, component_residual, tol.residual_tol)

"""
complete twins 的標準形 (schmidt-canonical)

以 complete twins 的特徵基底 |a⟩|a⟩ 表示 ρ 的最簡矩陣、純態的 Schmidt 形式，
以及混合態各純態成分的同時 (generalized) Schmidt 展開。
"""
import logging
from dataclasses import dataclass

import numpy as np

from . import linalg
from .analysis import MatchedBases, match_bases, split_detectable
from .exceptions import NotPure, OffDiagonalLeak, SparsityViolation
from .linalg import Side
from .pairs import ObservablePair
from .states import from_pure, mix, reduce

logger = logging.getLogger(__name__)


def _matched(state, complete):
    if isinstance(complete, MatchedBases):
        return complete
    if isinstance(complete, ObservablePair):
        return match_bases(split_detectable(complete, state))
    raise TypeError(f'expected MatchedBases or ObservablePair, got {type(complete).__name__}')


def _coefficient_matrix(vector, matched, d_plus, d_minus):
    """⟨a|⟨c|Φ⟩，列為 a、行為 c"""
    phi = np.asarray(vector, dtype=complex).reshape(d_plus, d_minus)
    return matched.basis_plus.conj().T @ phi @ matched.basis_minus.conj()


@dataclass(frozen=True)
class SimplifiedMatrix:
    sigma_prime: np.ndarray
    matrix: np.ndarray            # M[a, b] = ⟨a,a|ρ|b,b⟩
    forbidden_residual: float     # a≠c 或 b≠d 元素的最大值
    tolerance: float

    @property
    def index(self):
        """特徵值到 M 索引的對照"""
        return {float(value): k for k, value in enumerate(self.sigma_prime)}


def simplified_matrix(state, complete):
    """⟨a|⟨c|ρ|b⟩|d⟩ 只有 a = c 且 b = d 時不為零"""
    tol = state.tol
    matched = _matched(state, complete)
    n = len(matched)
    W = matched.product_vectors
    full = W.conj().T @ state.rho @ W
    diagonal = [a * n + a for a in range(n)]
    mask = np.ones(full.shape, dtype=bool)
    mask[np.ix_(diagonal, diagonal)] = False
    forbidden = linalg.max_abs(full[mask])
    if forbidden > tol.residual_tol:
        raise SparsityViolation(f'forbidden matrix element {forbidden:.3e} exceeds {tol.residual_tol:.3e}')
    M = full[np.ix_(diagonal, diagonal)]
    return SimplifiedMatrix(matched.sigma_prime, (M + M.conj().T) / 2, forbidden, tol.residual_tol)


@dataclass(frozen=True)
class SchmidtForm:
    sigma_prime: np.ndarray
    coefficients: np.ndarray      # r_a^{1/2} >= 0
    basis_plus: np.ndarray
    basis_minus: np.ndarray       # 相位已依 partial scalar product 重新決定
    vector: np.ndarray
    reconstruction_residual: float
    spectrum_residual: float      # r_a 與 ρ± 正特徵值的差

    def reconstruct(self):
        return sum(
            c * np.kron(self.basis_plus[:, k], self.basis_minus[:, k])
            for k, c in enumerate(self.coefficients)
        )


def pure_schmidt(state, complete):
    """
    Φ = Σ_a r_a^{1/2} |a⟩+|a⟩-，其中 |a⟩- ∝ ρ-^{-1/2} ⟨a|+ Φ⟩。
    """
    tol = state.tol
    if state.rank != 1:
        raise NotPure(f'state has rank {state.rank}')
    matched = _matched(state, complete)
    [(_, vector)] = state.spectral_components()
    phi = vector.reshape(state.d_plus, state.d_minus)
    rho_minus = reduce(state).rho_minus
    inverse_root = linalg.pinv_sqrt(rho_minus, tol.rank_tol, tol.herm_tol)
    coefficients = []
    basis_minus = []
    for k in range(len(matched)):
        partial = matched.basis_plus[:, k].conj() @ phi
        direction = inverse_root @ partial
        norm = np.linalg.norm(direction)
        if norm <= tol.rank_tol:
            basis_minus.append(matched.basis_minus[:, k])
            coefficients.append(0.0)
            continue
        a_minus = direction / norm
        basis_minus.append(a_minus)
        coefficients.append(float(np.real(np.vdot(a_minus, partial))))
    coefficients = np.array(coefficients)
    basis_minus = np.column_stack(basis_minus)
    reconstruction = sum(
        c * np.kron(matched.basis_plus[:, k], basis_minus[:, k]) for k, c in enumerate(coefficients)
    )
    # r_a 為 ρ+ 與 ρ- 共同的非零特徵值
    subsystems = reduce(state)
    populations = np.sort(coefficients ** 2)
    spectrum_residual = max(
        linalg.max_abs(populations - linalg.eigh(subsystems[side], tol.herm_tol).values[-len(coefficients):])
        for side in Side
    )
    return SchmidtForm(
        sigma_prime=matched.sigma_prime,
        coefficients=coefficients,
        basis_plus=matched.basis_plus,
        basis_minus=basis_minus,
        vector=vector,
        reconstruction_residual=linalg.max_abs(reconstruction - vector),
        spectrum_residual=spectrum_residual,
    )


@dataclass(frozen=True)
class GeneralizedSchmidtExpansion:
    sigma_prime: np.ndarray
    weights: np.ndarray
    coefficients: np.ndarray      # 第 i 列為 α^(i)
    leak_residual: float
    normalization_residual: float

    @property
    def populations(self):
        """r_a^(i) = |α_a^(i)|²，即 ρ±^(i) 的特徵值"""
        return np.abs(self.coefficients) ** 2

    def simplified_matrix(self):
        """Σ_i w_i α^(i) α^(i)†"""
        return np.einsum('i,ia,ib->ab', self.weights, self.coefficients, self.coefficients.conj())


def simultaneous_expansion(decomposition, complete, state=None):
    """每個純態成分只在對角的 |a⟩|a⟩ 上有係數"""
    state = state or mix(decomposition)
    tol = state.tol
    matched = _matched(state, complete)
    rows = []
    leak = 0.0
    normalization = 0.0
    for _, vector in decomposition:
        X = _coefficient_matrix(vector, matched, decomposition.d_plus, decomposition.d_minus)
        alpha = np.diag(X).copy()
        leak = max(leak, linalg.max_abs(X - np.diag(alpha)))
        normalization = max(normalization, abs(float(np.sum(np.abs(alpha) ** 2)) - 1.0))
        rows.append(alpha)
    if leak > tol.residual_tol or normalization > tol.residual_tol:
        raise OffDiagonalLeak(
            f'decomposition leaves span{{|a,a>}}: off-diagonal {leak:.3e}, norm defect {normalization:.3e}'
        )
    return GeneralizedSchmidtExpansion(
        sigma_prime=matched.sigma_prime,
        weights=np.asarray(decomposition.weights),
        coefficients=np.array(rows),
        leak_residual=leak,
        normalization_residual=normalization,
    )


@dataclass(frozen=True)
class CompatibilityReport:
    residuals: dict
    tolerance: float

    @property
    def passed(self):
        return all(value <= self.tolerance for value in self.residuals.values())


def compatibility_report(decomposition, complete, state=None):
    """A_s、ρ_s^(i)、ρ_s 兩兩的交換子"""
    state = state or mix(decomposition)
    matched = _matched(state, complete)
    subsystems = reduce(state)
    residuals = {}
    for side in Side:
        operators = {'A': np.asarray(matched.pair[side]), 'rho': subsystems[side]}
        for index, (_, vector) in enumerate(decomposition):
            pure = from_pure(vector, decomposition.d_plus, decomposition.d_minus, state.tol)
            operators[f'rho[{index}]'] = reduce(pure)[side]
        names = list(operators)
        for i, first in enumerate(names):
            for second in names[i + 1:]:
                residuals[f'{side.value}:{first},{second}'] = linalg.max_abs(
                    linalg.commutator(operators[first], operators[second])
                )
    return CompatibilityReport(residuals, 1e-9)

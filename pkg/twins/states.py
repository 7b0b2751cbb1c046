"""
複合系統狀態 ρ、子系統狀態 ρ± 與 range/null 幾何 (bipartite-state)
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import linalg
from .exceptions import (
    DecompositionMismatch, DimensionMismatch, InvalidInput, NotNormalized, TraceError, WeightError,
)
from .linalg import Side
from .tolerances import Tolerances

logger = logging.getLogger(__name__)

# 向量歸一化的嚴格容許誤差
NORM_TOL = 1e-10
# 讀入時可自動修正的 trace / 權重誤差
INGEST_TOL = 1e-6
# trace 偏差在此以內視為已歸一，不再縮放
TRACE_EXACT_TOL = 1e-14


def _frozen(M):
    M = np.array(M)
    M.setflags(write=False)
    return M


def _default_tolerances():
    return Tolerances.from_settings()


@dataclass(frozen=True)
class BipartiteState:
    d_plus: int
    d_minus: int
    rho: np.ndarray
    tol: Tolerances = field(default_factory=_default_tolerances)

    @property
    def dim(self):
        return self.d_plus * self.d_minus

    @classmethod
    def from_matrix(cls, matrix, d_plus, d_minus, tol=None):
        """讀入密度矩陣：Hermitian 對稱化、trace 在 1e-6 內自動歸一、檢查半正定"""
        tol = tol or Tolerances.from_settings()
        if d_plus < 1 or d_minus < 1:
            raise DimensionMismatch(f'subsystem dimensions must be >= 1, got {d_plus}, {d_minus}')
        rho = linalg.as_hermitian(matrix, tol.herm_tol, name='rho')
        dim = d_plus * d_minus
        if rho.shape != (dim, dim):
            raise DimensionMismatch(f'rho has shape {rho.shape}, expected {dim}x{dim} for dims {d_plus}x{d_minus}')
        trace = float(np.real(np.trace(rho)))
        if abs(trace - 1.0) > INGEST_TOL:
            raise TraceError(f'trace(rho) = {trace!r} differs from 1 by more than {INGEST_TOL}')
        if abs(trace - 1.0) > TRACE_EXACT_TOL:
            rho = rho / trace
        # range_basis 會在負特徵值時丟出 NotPositive
        linalg.range_basis(rho, tol.rank_tol, tol.herm_tol)
        return cls(d_plus, d_minus, _frozen(rho), tol)

    def lift(self, A, side):
        return linalg.lift(A, self.d_plus, self.d_minus, side)

    @property
    def rank(self):
        return linalg.range_basis(self.rho, self.tol.rank_tol, self.tol.herm_tol).shape[1]

    @property
    def is_singular(self):
        return self.rank < self.dim

    def spectral_components(self):
        """(權重, 特徵向量) 列表，只含正特徵值"""
        decomposition = linalg.eigh(self.rho, self.tol.herm_tol)
        cutoff = linalg.rank_cutoff(decomposition.values, self.tol.rank_tol)
        return [
            (float(value), decomposition.vectors[:, k])
            for k, value in enumerate(decomposition.values)
            if value > cutoff
        ]


@dataclass(frozen=True)
class SubsystemPair:
    rho_plus: np.ndarray
    rho_minus: np.ndarray

    def __getitem__(self, side):
        return self.rho_plus if Side(side) is Side.PLUS else self.rho_minus


@dataclass(frozen=True)
class SubspaceProjectors:
    R: np.ndarray
    N: np.ndarray
    R_plus: np.ndarray
    N_plus: np.ndarray
    R_minus: np.ndarray
    N_minus: np.ndarray

    @property
    def nullity_plus(self):
        return int(round(np.real(np.trace(self.N_plus))))

    @property
    def nullity_minus(self):
        return int(round(np.real(np.trace(self.N_minus))))


@dataclass(frozen=True)
class PureDecomposition:
    d_plus: int
    d_minus: int
    weights: np.ndarray
    vectors: np.ndarray   # 第 i 列為 Φ^(i)

    @classmethod
    def build(cls, components, d_plus, d_minus):
        """
        components: [(weight, vector), ...]

        權重須為正；總和在 1e-6 內時自動歸一，否則 WeightError。
        """
        if not components:
            raise WeightError('decomposition has no components')
        weights = np.array([float(w) for w, _ in components])
        if np.any(~np.isfinite(weights)) or np.any(weights <= 0):
            raise WeightError(f'weights must be positive, got {weights.tolist()}')
        total = weights.sum()
        if abs(total - 1.0) > INGEST_TOL:
            raise WeightError(f'weights sum to {total!r}, not 1')
        dim = d_plus * d_minus
        vectors = []
        for index, (_, vector) in enumerate(components):
            vector = np.array(vector, dtype=complex).reshape(-1)
            if vector.shape != (dim,):
                raise DimensionMismatch(f'component {index} has length {vector.size}, expected {dim}')
            norm = np.linalg.norm(vector)
            if abs(norm - 1.0) > NORM_TOL:
                raise NotNormalized(f'component {index} has norm {norm!r}')
            vectors.append(vector / norm)
        return cls(d_plus, d_minus, _frozen(weights / total), _frozen(np.array(vectors)))

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        return iter(zip(self.weights, self.vectors))

    def density_matrix(self):
        return np.einsum('i,ij,ik->jk', self.weights, self.vectors, self.vectors.conj())


# 狀態建構
def from_pure(phi, d_plus, d_minus, tol=None):
    """|Φ⟩⟨Φ|；‖Φ‖ 須在 1e-10 內為 1"""
    tol = tol or Tolerances.from_settings()
    phi = np.array(phi, dtype=complex).reshape(-1)
    if phi.size != d_plus * d_minus:
        raise DimensionMismatch(f'vector has length {phi.size}, expected {d_plus * d_minus}')
    norm = np.linalg.norm(phi)
    if abs(norm - 1.0) > NORM_TOL:
        raise NotNormalized(f'state vector has norm {norm!r}')
    return BipartiteState(d_plus, d_minus, _frozen(np.outer(phi, phi.conj())), tol)


def mix(decomposition, tol=None):
    """ρ = Σ w_i |Φ^(i)⟩⟨Φ^(i)|"""
    tol = tol or Tolerances.from_settings()
    rho = decomposition.density_matrix()
    return BipartiteState(decomposition.d_plus, decomposition.d_minus, _frozen((rho + rho.conj().T) / 2), tol)


def check_decomposition(state, decomposition):
    """Σ w_i |Φ^(i)⟩⟨Φ^(i)| 必須等於 state.rho (residual_tol 內)"""
    dims = (decomposition.d_plus, decomposition.d_minus)
    if dims != (state.d_plus, state.d_minus):
        raise DimensionMismatch(f'decomposition has dims {dims}, state has {(state.d_plus, state.d_minus)}')
    residual = linalg.max_abs(decomposition.density_matrix() - state.rho)
    if residual > state.tol.residual_tol:
        raise DecompositionMismatch(
            f'decomposition mixes to a different rho (max deviation {residual:.3e} > {state.tol.residual_tol:.3e})'
        )
    return residual


def gibbs_state(hamiltonian, temperature, d_plus, d_minus, tol=None):
    """canonical ensemble exp(-H/T) / Tr exp(-H/T)，k_B = 1"""
    if not temperature > 0:
        raise InvalidInput(f'temperature must be positive, got {temperature!r}')
    tol = tol or Tolerances.from_settings()
    H = linalg.as_hermitian(hamiltonian, tol.herm_tol, name='hamiltonian')
    # 平移基態能量避免 overflow
    shifted = H - np.min(scipy.linalg.eigvalsh(H)) * np.eye(H.shape[0])
    weight = scipy.linalg.expm(-shifted / temperature)
    return BipartiteState.from_matrix(weight / np.real(np.trace(weight)), d_plus, d_minus, tol)


# 子系統與幾何
def reduce(state):
    """ρ± = Tr∓ ρ"""
    rho_plus = linalg.partial_trace(state.rho, state.d_plus, state.d_minus, over=Side.MINUS)
    rho_minus = linalg.partial_trace(state.rho, state.d_plus, state.d_minus, over=Side.PLUS)
    return SubsystemPair(_frozen(rho_plus), _frozen(rho_minus))


def projectors(state):
    tol = state.tol
    subsystems = reduce(state)
    R, N = linalg.range_null_projectors(state.rho, tol.rank_tol, tol.herm_tol)
    R_plus, N_plus = linalg.range_null_projectors(subsystems.rho_plus, tol.rank_tol, tol.herm_tol)
    R_minus, N_minus = linalg.range_null_projectors(subsystems.rho_minus, tol.rank_tol, tol.herm_tol)
    return SubspaceProjectors(
        *(_frozen(P) for P in (R, N, R_plus, N_plus, R_minus, N_minus))
    )


@dataclass(frozen=True)
class GeometryReport:
    residuals: dict
    tolerance: float

    @property
    def passed(self):
        return all(value <= self.tolerance for value in self.residuals.values())


def verify_subspace_geometry(state):
    """R = R R+ R-、R = R± R、N± N = N±、ρ N± = 0 的殘差"""
    P = projectors(state)
    one_plus = np.eye(state.d_plus)
    one_minus = np.eye(state.d_minus)
    R_plus = linalg.kron(P.R_plus, one_minus)
    R_minus = linalg.kron(one_plus, P.R_minus)
    N_plus = linalg.kron(P.N_plus, one_minus)
    N_minus = linalg.kron(one_plus, P.N_minus)
    residuals = {
        'range_product': linalg.max_abs(P.R - P.R @ linalg.kron(P.R_plus, P.R_minus)),
        'range_plus': linalg.max_abs(P.R - R_plus @ P.R),
        'range_minus': linalg.max_abs(P.R - R_minus @ P.R),
        'null_plus': linalg.max_abs(N_plus @ P.N - N_plus),
        'null_minus': linalg.max_abs(N_minus @ P.N - N_minus),
        'null_inclusion_plus': linalg.max_abs(state.rho @ N_plus),
        'null_inclusion_minus': linalg.max_abs(state.rho @ N_minus),
        # N ⊇ (N+ ⊗ H-) + (H+ ⊗ N-)
        'null_sum': linalg.max_abs((N_plus + N_minus - N_plus @ N_minus) @ P.N - (N_plus + N_minus - N_plus @ N_minus)),
    }
    report = GeometryReport(residuals, state.tol.residual_tol)
    if not report.passed:
        logger.warning('subspace geometry check failed: %s', residuals)
    return report


@dataclass(frozen=True)
class RelevantRestriction:
    """ρ 限制到 R+ ⊗ R- 的結果與兩個方向的嵌入"""
    state: BipartiteState          # ρ′，維度 r+ × r-
    basis_plus: np.ndarray         # d+ × r+
    basis_minus: np.ndarray        # d- × r-

    @property
    def isometry(self):
        return linalg.kron(self.basis_plus, self.basis_minus)

    def compress(self, operator):
        W = self.isometry
        return W.conj().T @ operator @ W

    def embed(self, operator):
        W = self.isometry
        return W @ operator @ W.conj().T


def subsystem_bases(state):
    """(range+, null+, range-, null-) 的正交歸一基底"""
    tol = state.tol
    subsystems = reduce(state)
    return (
        linalg.range_basis(subsystems.rho_plus, tol.rank_tol, tol.herm_tol),
        linalg.null_basis(subsystems.rho_plus, tol.rank_tol, tol.herm_tol),
        linalg.range_basis(subsystems.rho_minus, tol.rank_tol, tol.herm_tol),
        linalg.null_basis(subsystems.rho_minus, tol.rank_tol, tol.herm_tol),
    )


def restrict_to_relevant(state):
    """ρ′ = (B+ ⊗ B-)† ρ (B+ ⊗ B-)"""
    basis_plus, _, basis_minus, _ = subsystem_bases(state)
    W = linalg.kron(basis_plus, basis_minus)
    rho_prime = W.conj().T @ state.rho @ W
    trace = float(np.real(np.trace(rho_prime)))
    if abs(trace - 1.0) > 1e-10:
        logger.warning('restricted state has trace %r; range inclusion is violated numerically', trace)
    rho_prime = (rho_prime + rho_prime.conj().T) / 2
    reduced = BipartiteState(basis_plus.shape[1], basis_minus.shape[1], _frozen(rho_prime), state.tol)
    return RelevantRestriction(reduced, _frozen(basis_plus), _frozen(basis_minus))

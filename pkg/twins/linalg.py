"""
稠密複數線性代數工具 (linop-core)

複合空間索引慣例：i = i_plus * d_minus + i_minus，與 numpy.kron 一致。
所有函式皆為純函式，不修改輸入。
"""
import enum
import logging
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .exceptions import ConvergenceFailure, DimensionMismatch, InvalidInput, NonHermitian, NotPositive

logger = logging.getLogger(__name__)

# 決定特徵向量相位時，視為「非零」分量的相對門檻
PHASE_THRESHOLD = 1e-10


class Side(str, enum.Enum):
    PLUS = '+'
    MINUS = '-'

    @property
    def opposite(self):
        return Side.MINUS if self is Side.PLUS else Side.PLUS


class SpectralDecomposition(NamedTuple):
    values: np.ndarray    # 由小到大
    vectors: np.ndarray   # 各行為正交歸一的特徵向量

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.conj().T


class RangeNull(NamedTuple):
    R: np.ndarray
    N: np.ndarray


def max_abs(M):
    """‖M‖_max；空矩陣視為 0"""
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def as_matrix(data, name='matrix'):
    M = np.array(data, dtype=complex)
    if M.ndim != 2:
        raise InvalidInput(f'{name} must be two-dimensional, got shape {M.shape}')
    if not np.all(np.isfinite(M)):
        raise InvalidInput(f'{name} has non-finite entries')
    return M


def as_hermitian(data, herm_tol, name='operator'):
    """檢查 Hermiticity 後回傳對稱化的 (M + M†)/2"""
    M = as_matrix(data, name)
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f'{name} must be square, got shape {M.shape}')
    deviation = max_abs(M - M.conj().T)
    if deviation > herm_tol:
        raise NonHermitian(f'{name} deviates from Hermiticity by {deviation:.3e} > {herm_tol:.3e}')
    return (M + M.conj().T) / 2


def fix_phases(V):
    """每一行的第一個非零分量調成正實數"""
    V = np.array(V, dtype=complex)
    for k in range(V.shape[1]):
        column = V[:, k]
        scale = np.max(np.abs(column)) if column.size else 0.0
        if scale == 0.0:
            continue
        first = np.flatnonzero(np.abs(column) > PHASE_THRESHOLD * scale)[0]
        phase = column[first] / abs(column[first])
        V[:, k] = column / phase
    return V


def eigh(H, herm_tol=1e-9):
    """Hermitian 特徵分解，特徵值遞增，相位固定"""
    H = as_hermitian(H, herm_tol)
    try:
        values, vectors = scipy.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f'eigh did not converge: {exc}') from exc
    return SpectralDecomposition(values, fix_phases(vectors))


def kernel_basis(M, tol):
    """
    M 的零空間正交歸一基底 (各行)。

    奇異值 <= tol * sigma_max 者視為零；零矩陣的核為整個空間。
    """
    M = np.asarray(M)
    if M.ndim != 2:
        raise InvalidInput(f'kernel_basis expects a matrix, got shape {M.shape}')
    if not np.all(np.isfinite(M)):
        raise InvalidInput('kernel_basis input has non-finite entries')
    n = M.shape[1]
    if M.shape[0] == 0 or max_abs(M) == 0.0:
        return np.eye(n, dtype=np.result_type(M.dtype, float))
    return scipy.linalg.null_space(M, rcond=tol)


def kron(A, B):
    """A ⊗ B，索引 (i+ d- + i-, j+ d- + j-)"""
    return np.kron(A, B)


def lift(A, d_plus, d_minus, side):
    """子系統算子嵌入複合空間：A ⊗ 1 或 1 ⊗ A"""
    side = Side(side)
    if side is Side.PLUS:
        return np.kron(A, np.eye(d_minus))
    return np.kron(np.eye(d_plus), A)


def partial_trace(M, d_plus, d_minus, over):
    """對 over 指定的子系統取部分跡，回傳另一個子系統上的算子"""
    M = np.asarray(M)
    dim = d_plus * d_minus
    if M.shape != (dim, dim):
        raise DimensionMismatch(f'operator shape {M.shape} does not match dims {d_plus}x{d_minus}')
    T = M.reshape(d_plus, d_minus, d_plus, d_minus)
    if Side(over) is Side.MINUS:
        return np.trace(T, axis1=1, axis2=3)
    return np.trace(T, axis1=0, axis2=2)


def rank_cutoff(values, rank_tol):
    """range/null 的特徵值門檻：rank_tol * 最大特徵值"""
    top = float(np.max(values)) if len(values) else 0.0
    return rank_tol * top if top > 0 else rank_tol


def _split_spectrum(H, tol, herm_tol):
    decomposition = eigh(H, herm_tol)
    cutoff = rank_cutoff(decomposition.values, tol)
    if decomposition.values.size and decomposition.values[0] < -cutoff:
        raise NotPositive(f'smallest eigenvalue {decomposition.values[0]:.3e} < -{cutoff:.3e}')
    positive = decomposition.values > cutoff
    return decomposition, positive


def range_basis(H, tol, herm_tol=1e-9):
    """
    PSD 算子值域的正交歸一基底。

    滿秩時回傳標準基底 (恆等嵌入)；否則取特徵值 > 門檻的特徵向量，依特徵值遞增。
    """
    decomposition, positive = _split_spectrum(H, tol, herm_tol)
    if positive.all():
        return np.eye(len(positive), dtype=complex)
    return decomposition.vectors[:, positive]


def null_basis(H, tol, herm_tol=1e-9):
    decomposition, positive = _split_spectrum(H, tol, herm_tol)
    return decomposition.vectors[:, ~positive]


def range_null_projectors(H, tol, herm_tol=1e-9):
    """PSD 算子的 range 投影 R 與 null 投影 N，R + N = 1"""
    decomposition, positive = _split_spectrum(H, tol, herm_tol)
    V = decomposition.vectors[:, positive]
    R = V @ V.conj().T
    return RangeNull(R, np.eye(len(positive)) - R)


def hermitian_basis(d):
    """
    d×d Hermitian 算子的 Hilbert–Schmidt 正交歸一基底 (d² 個)。

    順序：對角單位矩陣，接著依 row-major 的每一對 (j, k)，先對稱再反對稱。
    """
    if d < 1:
        raise InvalidInput(f'dimension must be >= 1, got {d}')
    basis = []
    for k in range(d):
        E = np.zeros((d, d), dtype=complex)
        E[k, k] = 1.0
        basis.append(E)
    root = np.sqrt(0.5)
    for j in range(d):
        for k in range(j + 1, d):
            symmetric = np.zeros((d, d), dtype=complex)
            symmetric[j, k] = symmetric[k, j] = root
            antisymmetric = np.zeros((d, d), dtype=complex)
            antisymmetric[j, k] = -1j * root
            antisymmetric[k, j] = 1j * root
            basis.extend([symmetric, antisymmetric])
    return np.array(basis)


def hermitian_coordinates(A, basis=None):
    """A 在 hermitian_basis 上的實座標 Tr(E_k A)"""
    A = np.asarray(A)
    if basis is None:
        basis = hermitian_basis(A.shape[0])
    return np.real(np.einsum('kij,ij->k', basis.conj(), A))


def from_hermitian_coordinates(x, d, basis=None):
    if basis is None:
        basis = hermitian_basis(d)
    return np.tensordot(np.asarray(x, dtype=float), basis, axes=1)


def commutator(A, B):
    return A @ B - B @ A


def is_projector(P, tol):
    P = np.asarray(P)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        return False
    return max_abs(P - P.conj().T) <= tol and max_abs(P @ P - P) <= tol


def pinv_sqrt(H, tol, herm_tol=1e-9):
    """值域上的 H^{-1/2}，null space 上為 0"""
    decomposition, positive = _split_spectrum(H, tol, herm_tol)
    V = decomposition.vectors[:, positive]
    return (V / np.sqrt(decomposition.values[positive])) @ V.conj().T


def subspace_distance(A, B):
    """兩組基底 (各行) 所張子空間的距離：最大主角的正弦；維度不同時為 1"""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape[1] != B.shape[1]:
        return 1.0
    if A.shape[1] == 0:
        return 0.0
    angles = scipy.linalg.subspace_angles(A, B)
    return float(np.sin(np.max(angles)))

"""
子系統可觀測量對 (A+, A-) 與 twin 關係 A+ ρ = A- ρ
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .exceptions import DimensionMismatch
from .linalg import Side


@dataclass(frozen=True)
class ObservablePair:
    a_plus: np.ndarray
    a_minus: np.ndarray

    @classmethod
    def hermitian(cls, a_plus, a_minus, herm_tol=1e-9):
        """讀入時對稱化並檢查 Hermiticity"""
        a_plus = linalg.as_hermitian(a_plus, herm_tol, name='a_plus')
        a_minus = linalg.as_hermitian(a_minus, herm_tol, name='a_minus')
        a_plus.setflags(write=False)
        a_minus.setflags(write=False)
        return cls(a_plus, a_minus)

    @classmethod
    def scalar(cls, d_plus, d_minus, value=1.0):
        return cls(value * np.eye(d_plus, dtype=complex), value * np.eye(d_minus, dtype=complex))

    @property
    def dims(self):
        return self.a_plus.shape[0], self.a_minus.shape[0]

    def __getitem__(self, side):
        return self.a_plus if Side(side) is Side.PLUS else self.a_minus

    def __add__(self, other):
        return ObservablePair(self.a_plus + other.a_plus, self.a_minus + other.a_minus)

    def __sub__(self, other):
        return ObservablePair(self.a_plus - other.a_plus, self.a_minus - other.a_minus)

    def scaled(self, alpha):
        return ObservablePair(alpha * self.a_plus, alpha * self.a_minus)

    __rmul__ = scaled

    def shifted(self, value):
        """(A+ + c·1, A- + c·1)，仍為 twin"""
        d_plus, d_minus = self.dims
        return ObservablePair(self.a_plus + value * np.eye(d_plus), self.a_minus + value * np.eye(d_minus))

    def coordinates(self):
        """兩側 hermitian_basis 座標串接 (長度 d+² + d-²)"""
        return np.concatenate([
            linalg.hermitian_coordinates(self.a_plus),
            linalg.hermitian_coordinates(self.a_minus),
        ])

    @classmethod
    def from_coordinates(cls, x, d_plus, d_minus):
        x = np.asarray(x, dtype=float)
        return cls(
            linalg.from_hermitian_coordinates(x[:d_plus ** 2], d_plus),
            linalg.from_hermitian_coordinates(x[d_plus ** 2:], d_minus),
        )

    def difference(self):
        """A+ ⊗ 1 - 1 ⊗ A-"""
        d_plus, d_minus = self.dims
        return linalg.lift(self.a_plus, d_plus, d_minus, Side.PLUS) - linalg.lift(self.a_minus, d_plus, d_minus, Side.MINUS)

    def max_hermiticity_deviation(self):
        return max(
            linalg.max_abs(self.a_plus - self.a_plus.conj().T),
            linalg.max_abs(self.a_minus - self.a_minus.conj().T),
        )


def combine(pairs, coefficients):
    """Σ c_k (A+_k, A-_k)"""
    pairs = list(pairs)
    a_plus = sum(c * p.a_plus for c, p in zip(coefficients, pairs))
    a_minus = sum(c * p.a_minus for c, p in zip(coefficients, pairs))
    return ObservablePair(np.asarray(a_plus), np.asarray(a_minus))


class TwinVerdict(NamedTuple):
    verdict: bool
    residual: float
    tolerance: float


def check_dims(state, pair):
    if pair.dims != (state.d_plus, state.d_minus):
        raise DimensionMismatch(
            f'pair has dims {pair.dims}, state has dims {(state.d_plus, state.d_minus)}'
        )


def twin_residual(state, pair):
    """‖(A+ ⊗ 1) ρ - (1 ⊗ A-) ρ‖_max"""
    check_dims(state, pair)
    return linalg.max_abs(pair.difference() @ state.rho)


def is_twin_pair(state, pair):
    residual = twin_residual(state, pair)
    tolerance = state.tol.residual_tol
    return TwinVerdict(residual <= tolerance, residual, tolerance)

"""
測試用的狀態與算子
"""
import numpy as np

from twins.pairs import ObservablePair
from twins.spins import build_scenario, load_scenario, spin_operators
from twins.states import BipartiteState, from_pure

SQRT_HALF = np.sqrt(0.5)

UP = np.array([1.0, 0.0])
DOWN = np.array([0.0, 1.0])

HALF = spin_operators(0.5)
ONE = spin_operators(1)
SZ = HALF.sz
SX = 2 * HALF.sx


def ket(*factors):
    vector = np.array([1.0])
    for factor in factors:
        vector = np.kron(vector, factor)
    return vector.astype(complex)


def projector(vector):
    vector = np.asarray(vector, dtype=complex)
    return np.outer(vector, vector.conj())


def example1_state():
    """½(|↑↓⟩⟨↑↓| + |↓↑⟩⟨↓↑|)"""
    return scenario_state('example1_range10_00')


def scenario_state(name, weights=None):
    return build_scenario(load_scenario(name, weights))


def maximally_mixed(d_plus=2, d_minus=2):
    d = d_plus * d_minus
    return BipartiteState.from_matrix(np.eye(d) / d, d_plus, d_minus)


def singlet():
    return from_pure(SQRT_HALF * (ket(UP, DOWN) - ket(DOWN, UP)), 2, 2)


def random_state(rng, d_plus, d_minus, rank=None, tol=None):
    d = d_plus * d_minus
    rank = rank or d
    G = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = G @ G.conj().T
    return BipartiteState.from_matrix(rho / np.real(np.trace(rho)), d_plus, d_minus, tol)


def random_hermitian(rng, d):
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (G + G.conj().T) / 2


def random_unitary(rng, d):
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def total_sz(spin):
    return np.kron(spin.sz, spin.identity) + np.kron(spin.identity, spin.sz)


def sz_pair(sign=1):
    """(s_z, -s_z)；sign=-1 時為 (-s_z, s_z)"""
    return ObservablePair(sign * SZ.astype(complex), -sign * SZ.astype(complex))

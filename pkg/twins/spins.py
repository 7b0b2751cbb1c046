"""
自旋範例系統

兩個自旋 j (½ 或 1) 的耦合基底，由 ladder operator 在執行期產生，
不寫死 Clebsch–Gordan 係數。單一自旋的基底依 m 遞減排列 (j, ..., -j)。
"""
import logging
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from . import linalg
from .exceptions import UnknownScenario, UnsupportedSpin, WeightError
from .pairs import ObservablePair
from .states import PureDecomposition, mix

logger = logging.getLogger(__name__)

SUPPORTED_SPINS = (1, 2)   # 2j


def _two_j(j):
    two_j = int(round(2 * float(j)))
    if abs(2 * float(j) - two_j) > 1e-12 or two_j not in SUPPORTED_SPINS:
        raise UnsupportedSpin(f'spin {j!r} is not supported (only 1/2 and 1)')
    return two_j


@dataclass(frozen=True)
class SpinOperators:
    j: float
    sz: np.ndarray
    s_raise: np.ndarray
    s_lower: np.ndarray

    @property
    def dim(self):
        return self.sz.shape[0]

    @property
    def sx(self):
        return (self.s_raise + self.s_lower) / 2

    @property
    def sy(self):
        return (self.s_raise - self.s_lower) / 2j

    @property
    def identity(self):
        return np.eye(self.dim)


def spin_operators(j):
    two_j = _two_j(j)
    j = two_j / 2
    m = j - np.arange(two_j + 1)
    s_raise = np.zeros((two_j + 1, two_j + 1))
    for k in range(1, two_j + 1):
        # s+|j, m⟩ = sqrt(j(j+1) - m(m+1)) |j, m+1⟩
        s_raise[k - 1, k] = np.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    return SpinOperators(j, np.diag(m), s_raise, s_raise.T.copy())


@dataclass(frozen=True)
class CoupledBasis:
    j1: float
    j2: float
    matrix: np.ndarray    # 各行為 |S, M⟩ 在乘積基底上的係數
    labels: tuple         # (S, M)，S 遞減再 M 遞減

    def column(self, S, M):
        return self.matrix[:, self.labels.index((S, M))]


def coupled_basis(j1, j2):
    """
    乘積基底 |m1, m2⟩ 到耦合基底 |S, M⟩ 的么正矩陣。

    最高權重態取 M = S 子空間中被 S+ 消滅的向量，再以 S- 逐步降低；
    相位依 Condon–Shortley (m1 最大的分量為正)。
    """
    first, second = spin_operators(j1), spin_operators(j2)
    S_lower = linalg.kron(first.s_lower, second.identity) + linalg.kron(first.identity, second.s_lower)
    S_raise = S_lower.T
    total_m = np.add.outer(np.diag(first.sz), np.diag(second.sz)).reshape(-1)
    columns, labels = [], []
    S = first.j + second.j
    while S >= abs(first.j - second.j) - 1e-12:
        sector = np.flatnonzero(np.isclose(total_m, S))
        embedding = np.eye(len(total_m))[:, sector]
        highest = embedding @ scipy.linalg.null_space(S_raise @ embedding)
        vector = np.real(linalg.fix_phases(highest))[:, 0]
        M = S
        while True:
            columns.append(vector)
            labels.append((S, M))
            if M <= -S + 1e-12:
                break
            vector = S_lower @ vector
            vector = vector / np.linalg.norm(vector)
            M -= 1
        S -= 1
    return CoupledBasis(first.j, second.j, np.column_stack(columns), tuple(labels))


# 範例情境
SCENARIOS = {
    'example1_range10_00': (0.5, ((1, 0), (0, 0))),
    'example1_range10_1m1': (0.5, ((1, 0), (1, -1))),
    'example2_ms0': (1, ((2, 0), (1, 0), (0, 0))),
    'example2_ms1': (1, ((2, 1), (1, 1))),
}

ScenarioName = Literal['example1_range10_00', 'example1_range10_1m1', 'example2_ms0', 'example2_ms1']


class SpinScenario(BaseModel):
    """耦合態的混合；未指定權重時各成分相等"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    name: ScenarioName
    weights: Optional[tuple[float, ...]] = None

    @model_validator(mode='after')
    def check_weights(self):
        if self.weights is None:
            return self
        count = len(SCENARIOS[self.name][1])
        if len(self.weights) != count:
            raise ValueError(f'{self.name} has {count} components, got {len(self.weights)} weights')
        if any(w <= 0 for w in self.weights):
            raise ValueError('weights must be positive')
        if abs(sum(self.weights) - 1.0) > 1e-6:
            raise ValueError(f'weights sum to {sum(self.weights)!r}, not 1')
        return self

    @property
    def spin(self):
        return SCENARIOS[self.name][0]

    @property
    def components(self):
        return SCENARIOS[self.name][1]

    @property
    def resolved_weights(self):
        count = len(self.components)
        return self.weights if self.weights is not None else (1.0 / count,) * count


def load_scenario(name, weights=None):
    if name not in SCENARIOS:
        raise UnknownScenario(f'unknown scenario {name!r}; choose from {", ".join(SCENARIOS)}')
    try:
        return SpinScenario(name=name, weights=weights)
    except ValidationError as exc:
        raise WeightError('; '.join(error['msg'] for error in exc.errors())) from exc


def scenario_decomposition(scenario):
    j = scenario.spin
    basis = coupled_basis(j, j)
    d = int(round(2 * j)) + 1
    components = [
        (w, basis.column(S, M)) for w, (S, M) in zip(scenario.resolved_weights, scenario.components)
    ]
    return PureDecomposition.build(components, d, d)


def build_scenario(scenario, tol=None):
    state = mix(scenario_decomposition(scenario), tol)
    logger.debug('built scenario %s with rank %d', scenario.name, state.rank)
    return state


def reference_span(scenario):
    """範例情境的 twin 空間參考生成元 (不含單邊不可偵測的部分)"""
    s = spin_operators(scenario.spin)
    one, sz = s.identity, s.sz
    half = 0.5 * one
    spans = {
        'example1_range10_00': [(one, one), (sz, -sz)],
        'example1_range10_1m1': [(one, one)],
        'example2_ms0': [(one, one), (sz, -sz), (sz @ sz, sz @ sz)],
        'example2_ms1': [(one, one), (sz - half, -sz + half), (sz @ sz - sz, sz @ sz - sz)],
    }
    return [ObservablePair(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)) for a, b in spans[scenario.name]]

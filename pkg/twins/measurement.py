"""
量測層 (measurement)

事件等價的三個判準、Lüders collapse、機率為一的 sharp value 判定，
以及 twin 的遠距量測 (distant measurement) 報告。
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import linalg
from .analysis import characteristic_projector_twins, spectral_data, split_detectable
from .exceptions import DimensionMismatch, NotProjector, TwinCheckFailed
from .linalg import Side
from .pairs import is_twin_pair

logger = logging.getLogger(__name__)

# 機率與 collapse 比較的容許誤差
PROBABILITY_TOL = 1e-9


@dataclass(frozen=True)
class EventPair:
    E: np.ndarray
    F: np.ndarray
    commuting: bool

    @classmethod
    def build(cls, E, F, tol):
        E = linalg.as_matrix(E, 'E')
        F = linalg.as_matrix(F, 'F')
        for name, P in (('E', E), ('F', F)):
            if not linalg.is_projector(P, 1e-10):
                raise NotProjector(f'{name} is not an orthogonal projector')
        if E.shape != F.shape:
            raise NotProjector(f'events act on different spaces: {E.shape} vs {F.shape}')
        commuting = linalg.max_abs(linalg.commutator(E, F)) <= tol.residual_tol
        return cls(E, F, commuting)


class Collapse(NamedTuple):
    probability: float
    post_state: Optional[np.ndarray]


def luders_collapse(state, P):
    """ρ ↦ PρP / Tr(Pρ)；機率 <= rank_tol 時 post_state 為 None"""
    P = linalg.as_matrix(P, 'P')
    if P.shape != state.rho.shape or not linalg.is_projector(P, 1e-10):
        raise NotProjector('collapse operator is not a projector on the composite space')
    probability = float(np.real(np.trace(P @ state.rho)))
    if probability <= state.tol.rank_tol:
        return Collapse(max(probability, 0.0), None)
    post = P @ state.rho @ P / probability
    return Collapse(probability, (post + post.conj().T) / 2)


@dataclass(frozen=True)
class CriteriaReport:
    observational: float          # ‖EρE - FρF‖
    algebraic: float              # ‖Eρ - Fρ‖
    conditional: Optional[tuple]  # (Tr F·EρE/Tr Eρ, Tr E·FρF/Tr Fρ)，不適用時為 None
    tolerance: float

    @property
    def conditional_applicable(self):
        return self.conditional is not None

    @property
    def verdicts(self):
        verdicts = {
            'observational': self.observational <= self.tolerance,
            'algebraic': self.algebraic <= self.tolerance,
        }
        if self.conditional is not None:
            verdicts['conditional'] = all(abs(value - 1.0) <= PROBABILITY_TOL for value in self.conditional)
        return verdicts

    @property
    def coherent(self):
        return len(set(self.verdicts.values())) == 1

    @property
    def equivalent(self):
        return all(self.verdicts.values())


def event_equivalence(state, events):
    rho = state.rho
    E, F = events.E, events.F
    conditional = None
    if events.commuting:
        p_E = float(np.real(np.trace(E @ rho)))
        p_F = float(np.real(np.trace(F @ rho)))
        if p_E > state.tol.rank_tol and p_F > state.tol.rank_tol:
            conditional = (
                float(np.real(np.trace(F @ E @ rho @ E))) / p_E,
                float(np.real(np.trace(E @ F @ rho @ F))) / p_F,
            )
    report = CriteriaReport(
        observational=linalg.max_abs(E @ rho @ E - F @ rho @ F),
        algebraic=linalg.max_abs(E @ rho - F @ rho),
        conditional=conditional,
        tolerance=state.tol.residual_tol,
    )
    if not report.coherent:
        logger.warning('event equivalence criteria disagree: %s', report.verdicts)
    return report


class Certainty(NamedTuple):
    value: Optional[float]    # sharp value，沒有時為 None
    candidate: float          # Tr(Aρ)
    residual: float           # ‖Aρ - aρ‖
    probability: float        # Tr(P_a ρ)
    tolerance: float

    @property
    def sharp(self):
        return self.value is not None


def certainty_test(state, A):
    """
    Aρ = aρ 當且僅當 Tr(P_a ρ) = 1。

    兩個方向分別計算；不一致時記錄 warning 並視為沒有 sharp value。
    """
    tol = state.tol
    A = linalg.as_hermitian(A, tol.herm_tol, name='A')
    if A.shape != state.rho.shape:
        raise DimensionMismatch(f'observable has shape {A.shape}, state has {state.rho.shape}')
    candidate = float(np.real(np.trace(A @ state.rho)))
    residual = linalg.max_abs(A @ state.rho - candidate * state.rho)
    data = spectral_data(A, tol.cluster_tol, tol.herm_tol)
    k = data.index_of(candidate, tol.cluster_tol)
    probability = float(np.real(np.trace(data.projectors[k] @ state.rho))) if k is not None else 0.0
    direct = residual <= tol.residual_tol
    converse = probability >= 1.0 - tol.residual_tol
    if direct != converse:
        logger.warning(
            'certainty directions disagree: residual %.3e, probability %.12f', residual, probability
        )
    value = candidate if direct and converse else None
    return Certainty(value, candidate, residual, probability, tol.residual_tol)


@dataclass(frozen=True)
class MeasurementOutcome:
    value: float
    probability_plus: float
    probability_minus: float
    post_state_plus: np.ndarray       # 經 P+(a) 的 collapse
    post_state_minus: np.ndarray      # 經 P-(a) 的 collapse
    conditional_minus: np.ndarray     # P+(a) 發生後 - 子系統的狀態
    conditional_plus: np.ndarray      # P-(a) 發生後 + 子系統的狀態
    collapse_residual: float
    local_residual: float             # 1 - Tr(P∓(a) ρ_post±)

    @property
    def probability(self):
        return self.probability_plus


@dataclass(frozen=True)
class DistantMeasurementReport:
    outcomes: tuple
    expectation_plus: float
    expectation_minus: float
    probability_sum: float
    tolerance: float

    @property
    def residuals(self):
        residuals = {
            'expectation': abs(self.expectation_plus - self.expectation_minus),
            'probability_sum': abs(self.probability_sum - 1.0),
        }
        for outcome in self.outcomes:
            residuals[f'probability[{outcome.value!r}]'] = abs(outcome.probability_plus - outcome.probability_minus)
            residuals[f'collapse[{outcome.value!r}]'] = outcome.collapse_residual
            residuals[f'local[{outcome.value!r}]'] = outcome.local_residual
        return residuals

    @property
    def passed(self):
        return all(value <= self.tolerance for value in self.residuals.values())


def distant_measurement_report(state, pair):
    """
    量測 A+ 與量測 A- 在 ρ 中造成相同的機率與相同的狀態改變。

    只回報機率 > rank_tol 的結果。
    """
    verdict = is_twin_pair(state, pair)
    if not verdict.verdict:
        raise TwinCheckFailed(f'pair is not a twin pair (residual {verdict.residual:.3e})')
    projector_twins = characteristic_projector_twins(split_detectable(pair, state), state)
    outcomes = []
    for characteristic in projector_twins:
        E = state.lift(characteristic.full_plus, Side.PLUS)
        F = state.lift(characteristic.full_minus, Side.MINUS)
        via_plus = luders_collapse(state, E)
        via_minus = luders_collapse(state, F)
        if via_plus.post_state is None or via_minus.post_state is None:
            continue
        # P+(a) 之後 P-(a) 必然發生，反之亦然
        local = max(
            abs(1.0 - float(np.real(np.trace(F @ via_plus.post_state)))),
            abs(1.0 - float(np.real(np.trace(E @ via_minus.post_state)))),
        )
        outcomes.append(MeasurementOutcome(
            value=characteristic.value,
            probability_plus=via_plus.probability,
            probability_minus=via_minus.probability,
            post_state_plus=via_plus.post_state,
            post_state_minus=via_minus.post_state,
            conditional_minus=linalg.partial_trace(via_plus.post_state, state.d_plus, state.d_minus, over=Side.PLUS),
            conditional_plus=linalg.partial_trace(via_minus.post_state, state.d_plus, state.d_minus, over=Side.MINUS),
            collapse_residual=linalg.max_abs(via_plus.post_state - via_minus.post_state),
            local_residual=local,
        ))
    return DistantMeasurementReport(
        outcomes=tuple(outcomes),
        expectation_plus=float(np.real(np.trace(state.lift(pair.a_plus, Side.PLUS) @ state.rho))),
        expectation_minus=float(np.real(np.trace(state.lift(pair.a_minus, Side.MINUS) @ state.rho))),
        probability_sum=float(sum(outcome.probability_plus for outcome in outcomes)),
        tolerance=PROBABILITY_TOL,
    )

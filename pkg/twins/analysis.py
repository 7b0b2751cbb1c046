"""
twin 的譜理論 (twin-analysis)

detectable / undetectable 分解、相等的 detectable 譜、特徵投影 twin、
函數與對稱多項式的封閉性，以及 complete twins 的搜尋。
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Optional

import numpy as np
import sympy
from sympy.utilities.iterables import multiset_permutations

from . import linalg
from .exceptions import (
    DegenerateSpectrumCollision, InvalidInput, MissingFunctionValue, NotComplete,
    NotReducible, NotSymmetric, SpectraMismatch, TwinCheckFailed,
)
from .linalg import Side
from .pairs import ObservablePair, combine, is_twin_pair
from .states import reduce, restrict_to_relevant, subsystem_bases
from .tolerances import Tolerances, search_defaults

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralData:
    values: np.ndarray          # 相異特徵值 (已分群)，遞增
    multiplicities: tuple
    projectors: tuple           # 每個特徵值的特徵投影
    vectors: tuple              # 每個特徵值的特徵向量 (各行)

    def __len__(self):
        return len(self.values)

    @property
    def is_nondegenerate(self):
        return all(m == 1 for m in self.multiplicities)

    def index_of(self, value, cluster_tol):
        """與 value 相差 <= cluster_tol 的群組索引，沒有則 None"""
        if not len(self.values):
            return None
        k = int(np.argmin(np.abs(self.values - value)))
        return k if abs(self.values[k] - value) <= cluster_tol else None


def spectral_data(H, cluster_tol, herm_tol=1e-9):
    """特徵值依 cluster_tol 分群 (相鄰間距 <= cluster_tol 視為同一群)"""
    decomposition = linalg.eigh(H, herm_tol)
    groups = []
    for k, value in enumerate(decomposition.values):
        if groups and value - decomposition.values[groups[-1][-1]] <= cluster_tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    values, multiplicities, projectors, vectors = [], [], [], []
    for group in groups:
        V = decomposition.vectors[:, group]
        values.append(float(np.mean(decomposition.values[group])))
        multiplicities.append(len(group))
        projectors.append(V @ V.conj().T)
        vectors.append(V)
    return SpectralData(np.array(values), tuple(multiplicities), tuple(projectors), tuple(vectors))


@dataclass(frozen=True)
class CommutationReport:
    residuals: dict
    tolerance: float

    @property
    def passed(self):
        return all(value <= self.tolerance for value in self.residuals.values())


def commutation_check(pair, state):
    """[A±, ρ±] 與 [A±, R±] 的殘差"""
    tol = state.tol
    subsystems = reduce(state)
    R_plus, _ = linalg.range_null_projectors(subsystems.rho_plus, tol.rank_tol, tol.herm_tol)
    R_minus, _ = linalg.range_null_projectors(subsystems.rho_minus, tol.rank_tol, tol.herm_tol)
    residuals = {
        'rho_plus': linalg.max_abs(linalg.commutator(pair.a_plus, subsystems.rho_plus)),
        'rho_minus': linalg.max_abs(linalg.commutator(pair.a_minus, subsystems.rho_minus)),
        'range_plus': linalg.max_abs(linalg.commutator(pair.a_plus, R_plus)),
        'range_minus': linalg.max_abs(linalg.commutator(pair.a_minus, R_minus)),
    }
    return CommutationReport(residuals, tol.residual_tol)


@dataclass(frozen=True)
class DetectableSplit:
    """A± = A′± ⊕ A″±，A′ 在 R±、A″ 在 N± 上 (以各自的正交歸一基底表示)"""
    pair: ObservablePair
    a_prime_plus: np.ndarray
    a_prime_minus: np.ndarray
    a_dprime_plus: np.ndarray
    a_dprime_minus: np.ndarray
    range_plus: np.ndarray
    null_plus: np.ndarray
    range_minus: np.ndarray
    null_minus: np.ndarray
    restriction: object          # states.RelevantRestriction
    off_block_residual: float

    @property
    def prime_pair(self):
        """(A′+, A′-)：ρ′ 上的 twin 候選"""
        return ObservablePair(self.a_prime_plus, self.a_prime_minus)

    def _embed(self, block, basis):
        return basis @ block @ basis.conj().T

    def detectable_pair(self):
        """(A′ ⊕ 0″) 嵌回完整空間"""
        return ObservablePair(
            self._embed(self.a_prime_plus, self.range_plus),
            self._embed(self.a_prime_minus, self.range_minus),
        )

    def undetectable_pair(self):
        """(0′ ⊕ A″) 嵌回完整空間"""
        return ObservablePair(
            self._embed(self.a_dprime_plus, self.null_plus),
            self._embed(self.a_dprime_minus, self.null_minus),
        )

    def reassemble(self):
        return self.detectable_pair() + self.undetectable_pair()

    def detectable_residual(self):
        """A′+ ρ′ = A′- ρ′ 的殘差"""
        return is_twin_pair(self.restriction.state, self.prime_pair).residual

    def undetectable_residual(self, state):
        """(0′ ⊕ A″±) ρ = 0 的殘差"""
        undetectable = self.undetectable_pair()
        return max(
            linalg.max_abs(state.lift(undetectable.a_plus, Side.PLUS) @ state.rho),
            linalg.max_abs(state.lift(undetectable.a_minus, Side.MINUS) @ state.rho),
        )


def split_detectable(pair, state):
    tol = state.tol
    restriction = restrict_to_relevant(state)
    _, null_plus, _, null_minus = subsystem_bases(state)
    range_plus, range_minus = restriction.basis_plus, restriction.basis_minus
    a_plus = np.asarray(pair.a_plus)
    a_minus = np.asarray(pair.a_minus)
    off_block = max(
        linalg.max_abs(range_plus.conj().T @ a_plus @ null_plus),
        linalg.max_abs(range_minus.conj().T @ a_minus @ null_minus),
    )
    if off_block > tol.residual_tol:
        raise NotReducible(f'off-block norm {off_block:.3e} exceeds residual_tol {tol.residual_tol:.3e}')

    def block(A, B):
        M = B.conj().T @ A @ B
        return (M + M.conj().T) / 2

    return DetectableSplit(
        pair=pair,
        a_prime_plus=block(a_plus, range_plus),
        a_prime_minus=block(a_minus, range_minus),
        a_dprime_plus=block(a_plus, null_plus),
        a_dprime_minus=block(a_minus, null_minus),
        range_plus=range_plus,
        null_plus=null_plus,
        range_minus=range_minus,
        null_minus=null_minus,
        restriction=restriction,
        off_block_residual=off_block,
    )


@dataclass(frozen=True)
class DetectableSpectra:
    values: np.ndarray           # 共同的 σ′
    mult_plus: tuple
    mult_minus: tuple
    spectrum_plus: SpectralData
    spectrum_minus: SpectralData


def detectable_spectra(split, tol=None):
    """A′+ 與 A′- 的譜必須相同；重數可以不同"""
    tol = tol or split.restriction.state.tol
    plus = spectral_data(split.a_prime_plus, tol.cluster_tol, tol.herm_tol)
    minus = spectral_data(split.a_prime_minus, tol.cluster_tol, tol.herm_tol)
    if len(plus) != len(minus) or np.any(np.abs(plus.values - minus.values) > tol.cluster_tol):
        raise SpectraMismatch(
            f'detectable spectra differ: {plus.values.tolist()} vs {minus.values.tolist()}'
        )
    values = (plus.values + minus.values) / 2
    return DetectableSpectra(values, plus.multiplicities, minus.multiplicities, plus, minus)


def lagrange_projector(A, value, others):
    """∏_{b ≠ a} (A - b) / (a - b)"""
    P = np.eye(A.shape[0], dtype=complex)
    for other in others:
        P = P @ (A - other * np.eye(A.shape[0])) / (value - other)
    return P


@dataclass(frozen=True)
class CharacteristicPair:
    value: float
    p_plus: np.ndarray           # P′+(a)，在 R+ 上
    p_minus: np.ndarray          # P′-(a)，在 R- 上
    full_plus: np.ndarray        # A+ 在完整 H+ 上的特徵投影 P+(a)
    full_minus: np.ndarray
    twin_residual: float
    probability: float           # Tr P′+(a) ρ′
    probability_residual: float  # |Tr P′±(a) ρ′ - Tr P±(a) ρ| 的最大值


@dataclass(frozen=True)
class ProjectorTwins:
    pairs: tuple
    reconstruction_residual: float
    tolerance: float

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    @property
    def passed(self):
        return (
            all(p.twin_residual <= self.tolerance for p in self.pairs)
            and self.reconstruction_residual <= 1e-9
            and all(p.probability_residual <= 1e-10 for p in self.pairs)
        )


def characteristic_projector_twins(split, state):
    tol = state.tol
    spectra = detectable_spectra(split, tol)
    sigma = spectra.values
    for a, b in itertools.combinations(sigma, 2):
        if abs(a - b) <= tol.cluster_tol:
            raise DegenerateSpectrumCollision(f'characteristic values {a!r} and {b!r} collide')
    full_plus = spectral_data(split.pair.a_plus, tol.cluster_tol, tol.herm_tol)
    full_minus = spectral_data(split.pair.a_minus, tol.cluster_tol, tol.herm_tol)
    rho_prime = split.restriction.state
    d_plus, d_minus = split.pair.dims

    def full_projector(data, value, d):
        k = data.index_of(value, tol.cluster_tol)
        return data.projectors[k] if k is not None else np.zeros((d, d), dtype=complex)

    pairs = []
    rebuilt_plus = np.zeros_like(split.a_prime_plus, dtype=complex)
    rebuilt_minus = np.zeros_like(split.a_prime_minus, dtype=complex)
    for a in sigma:
        others = [b for b in sigma if b != a]
        p_plus = lagrange_projector(split.a_prime_plus, a, others)
        p_minus = lagrange_projector(split.a_prime_minus, a, others)
        rebuilt_plus += a * p_plus
        rebuilt_minus += a * p_minus
        P_plus = full_projector(full_plus, a, d_plus)
        P_minus = full_projector(full_minus, a, d_minus)
        prime_prob_plus = float(np.real(np.trace(rho_prime.lift(p_plus, Side.PLUS) @ rho_prime.rho)))
        prime_prob_minus = float(np.real(np.trace(rho_prime.lift(p_minus, Side.MINUS) @ rho_prime.rho)))
        prob_plus = float(np.real(np.trace(state.lift(P_plus, Side.PLUS) @ state.rho)))
        prob_minus = float(np.real(np.trace(state.lift(P_minus, Side.MINUS) @ state.rho)))
        pairs.append(CharacteristicPair(
            value=float(a),
            p_plus=p_plus,
            p_minus=p_minus,
            full_plus=P_plus,
            full_minus=P_minus,
            twin_residual=is_twin_pair(rho_prime, ObservablePair(p_plus, p_minus)).residual,
            probability=prime_prob_plus,
            probability_residual=max(abs(prime_prob_plus - prob_plus), abs(prime_prob_minus - prob_minus)),
        ))
    reconstruction = max(
        linalg.max_abs(rebuilt_plus - split.a_prime_plus),
        linalg.max_abs(rebuilt_minus - split.a_prime_minus),
    )
    return ProjectorTwins(tuple(pairs), reconstruction, tol.residual_tol)


def support_check(split, tol=None):
    """a+ ≠ a- 的特徵基底對必須在 ρ′ 的 null space：回傳 max ‖ρ′|m+⟩|m-⟩‖"""
    tol = tol or split.restriction.state.tol
    plus = linalg.eigh(split.a_prime_plus, tol.herm_tol)
    minus = linalg.eigh(split.a_prime_minus, tol.herm_tol)
    rho_prime = split.restriction.state.rho
    worst = 0.0
    for i, a_plus in enumerate(plus.values):
        for j, a_minus in enumerate(minus.values):
            if abs(a_plus - a_minus) <= tol.cluster_tol:
                continue
            vector = np.kron(plus.vectors[:, i], minus.vectors[:, j])
            worst = max(worst, float(np.linalg.norm(rho_prime @ vector)))
    return worst


# 函數與多項式封閉性
def _lookup(f, value, cluster_tol):
    if callable(f):
        return float(f(value))
    for key, result in f.items():
        if abs(float(key) - value) <= cluster_tol:
            return float(result)
    raise MissingFunctionValue(f'no function value given for characteristic value {value!r}')


def operator_function(A, f, tol):
    """spectral calculus：F(A) = Σ f(a) P(a)"""
    data = spectral_data(A, tol.cluster_tol, tol.herm_tol)
    result = np.zeros(np.shape(A), dtype=complex)
    for value, projector in zip(data.values, data.projectors):
        result += _lookup(f, value, tol.cluster_tol) * projector
    return result


def _verify_output(state, inputs, output):
    if state is None:
        return
    for index, pair in enumerate(inputs):
        verdict = is_twin_pair(state, pair)
        if not verdict.verdict:
            raise TwinCheckFailed(f'input pair {index} is not a twin pair (residual {verdict.residual:.3e})')
    verdict = is_twin_pair(state, output)
    if not verdict.verdict:
        raise TwinCheckFailed(f'resulting pair is not a twin pair (residual {verdict.residual:.3e})')


def apply_function(pair, f: Callable | Mapping, state=None, tol: Optional[Tolerances] = None):
    """
    (F(A+), F(A-))。

    f 可以是 callable，或 {特徵值: 函數值} 的表；表必須涵蓋兩側的所有特徵值。
    給定 state 時會驗證輸入與輸出皆為 twin。
    """
    tol = tol or (state.tol if state is not None else Tolerances.from_settings())
    result = ObservablePair(operator_function(pair.a_plus, f, tol), operator_function(pair.a_minus, f, tol))
    _verify_output(state, [pair], result)
    return result


def _symmetrized_word(matrices, word):
    """word 中各變數所有相異排列的乘積平均"""
    d = matrices[0].shape[0]
    if not word:
        return np.eye(d, dtype=complex)
    orderings = list(multiset_permutations(word))
    total = np.zeros((d, d), dtype=complex)
    for ordering in orderings:
        total += np.linalg.multi_dot([matrices[k] for k in ordering] + [np.eye(d)])
    return total / len(orderings)


def symmetric_polynomial(pairs, poly, state=None, variables=None):
    """
    對稱實係數多項式作用在 twin 對上；單項式的乘積對所有排列取平均。

    poly 可為 sympy 運算式或字串 (例如 'x*y + x + y')；
    變數預設依名稱排序，數量必須與 pairs 相同。
    """
    pairs = list(pairs)
    try:
        expr = sympy.sympify(poly)
    except sympy.SympifyError as exc:
        raise InvalidInput(f'cannot parse polynomial {poly!r}') from exc
    symbols = list(variables) if variables is not None else sorted(expr.free_symbols, key=str)
    if len(symbols) != len(pairs):
        raise InvalidInput(f'polynomial has {len(symbols)} variables but {len(pairs)} pairs were given')
    for first, second in itertools.combinations(symbols, 2):
        swapped = expr.xreplace({first: second, second: first})
        if sympy.expand(swapped - expr) != 0:
            raise NotSymmetric(f'polynomial {expr} changes under {first} <-> {second}')
    if not symbols:
        d_plus, d_minus = pairs[0].dims if pairs else (1, 1)
        return ObservablePair.scalar(d_plus, d_minus, float(expr))
    try:
        terms = sympy.Poly(expr, *symbols).terms()
    except sympy.PolynomialError as exc:
        raise InvalidInput(f'{expr} is not a polynomial in {", ".join(map(str, symbols))}') from exc
    plus = [np.asarray(p.a_plus) for p in pairs]
    minus = [np.asarray(p.a_minus) for p in pairs]
    result_plus = np.zeros_like(plus[0], dtype=complex)
    result_minus = np.zeros_like(minus[0], dtype=complex)
    for exponents, coefficient in terms:
        try:
            c = float(coefficient)
        except TypeError as exc:
            raise InvalidInput(f'coefficient {coefficient} is not real') from exc
        word = [k for k, e in enumerate(exponents) for _ in range(e)]
        result_plus += c * _symmetrized_word(plus, word)
        result_minus += c * _symmetrized_word(minus, word)
    result = ObservablePair(result_plus, result_minus)
    _verify_output(state, pairs, result)
    return result


# complete twins
@dataclass(frozen=True)
class MatchedBases:
    sigma_prime: np.ndarray
    basis_plus: np.ndarray       # d+ × n，第 k 行對應 sigma_prime[k]
    basis_minus: np.ndarray      # d- × n
    pair: ObservablePair

    def __len__(self):
        return len(self.sigma_prime)

    def eigen_residual(self):
        """max ‖A±|a⟩± - a|a⟩±‖"""
        plus = self.pair.a_plus @ self.basis_plus - self.basis_plus * self.sigma_prime
        minus = self.pair.a_minus @ self.basis_minus - self.basis_minus * self.sigma_prime
        return max(linalg.max_abs(plus), linalg.max_abs(minus))

    @property
    def product_vectors(self):
        """|a⟩+|c⟩- 作為各行，索引 a·n + c"""
        return np.kron(self.basis_plus, self.basis_minus)


def match_bases(split, tol=None):
    """complete twin 的特徵基底，依共同特徵值遞增配對"""
    tol = tol or split.restriction.state.tol
    spectra = detectable_spectra(split, tol)
    if not (spectra.spectrum_plus.is_nondegenerate and spectra.spectrum_minus.is_nondegenerate):
        raise NotComplete(
            f'detectable multiplicities {spectra.mult_plus} / {spectra.mult_minus} are not all 1'
        )
    basis_plus = np.hstack([split.range_plus @ v for v in spectra.spectrum_plus.vectors])
    basis_minus = np.hstack([split.range_minus @ v for v in spectra.spectrum_minus.vectors])
    return MatchedBases(
        sigma_prime=spectra.values,
        basis_plus=linalg.fix_phases(basis_plus),
        basis_minus=linalg.fix_phases(basis_minus),
        pair=split.pair,
    )


class CompleteTwins(NamedTuple):
    pair: ObservablePair
    matched: MatchedBases
    attempts: int


def find_complete_twins(twin_space, state, seed=None, attempts=None):
    """
    以固定 seed 的隨機線性組合搜尋 complete twins。

    找不到時回傳 None，只代表「未找到」，不代表不存在。
    """
    default_attempts, default_seed = search_defaults()
    attempts = default_attempts if attempts is None else attempts
    seed = default_seed if seed is None else seed
    restriction = restrict_to_relevant(state)
    r_plus, r_minus = restriction.state.d_plus, restriction.state.d_minus
    if r_plus != r_minus:
        logger.info('no complete twins: subsystem ranges have dimensions %d and %d', r_plus, r_minus)
        return None
    basis = list(twin_space.basis)
    rng = np.random.default_rng(seed)
    for attempt in range(1, attempts + 1):
        candidate = combine(basis, rng.standard_normal(len(basis)))
        try:
            matched = match_bases(split_detectable(candidate, state))
        except (NotComplete, SpectraMismatch, NotReducible):
            continue
        logger.info('complete twins found after %d attempt(s)', attempt)
        return CompleteTwins(candidate, matched, attempt)
    logger.info('complete twins not found in %d attempts', attempts)
    return None

"""
twins 套件的錯誤類別

仿照 rest_framework.exceptions.APIException：每個錯誤帶有
default_detail / default_code，另外帶 exit_code 給 management command 使用。
"""


class TwinError(Exception):
    """所有 twins 錯誤的基底類別"""
    default_detail = 'Twin observable computation failed.'
    default_code = 'error'
    exit_code = 1

    def __init__(self, detail=None, code=None):
        self.detail = detail if detail is not None else self.default_detail
        self.code = code if code is not None else self.default_code
        super().__init__(self.detail)

    def __str__(self):
        return str(self.detail)


# 輸入錯誤 (exit code 2)
class InvalidInput(TwinError):
    default_detail = 'Invalid input.'
    default_code = 'invalid'
    exit_code = 2


class NonHermitian(InvalidInput):
    default_detail = 'Operator is not Hermitian within herm_tol.'
    default_code = 'non_hermitian'


class DimensionMismatch(InvalidInput):
    default_detail = 'Operator dimensions do not match the declared subsystem dimensions.'
    default_code = 'dimension_mismatch'


class NotNormalized(InvalidInput):
    default_detail = 'State vector is not normalized.'
    default_code = 'not_normalized'


class WeightError(InvalidInput):
    default_detail = 'Mixture weights must be positive and sum to 1.'
    default_code = 'weight_error'


class TraceError(InvalidInput):
    default_detail = 'Density matrix trace is not 1.'
    default_code = 'trace_error'


class NotPositive(InvalidInput):
    default_detail = 'Operator has a negative eigenvalue below -rank_tol.'
    default_code = 'not_positive'


class NotProjector(InvalidInput):
    default_detail = 'Operator is not an orthogonal projector.'
    default_code = 'not_projector'


class UnsupportedSpin(InvalidInput):
    default_detail = 'Only spin 1/2 and spin 1 are supported.'
    default_code = 'unsupported_spin'


class UnknownScenario(InvalidInput):
    default_detail = 'Unknown spin scenario.'
    default_code = 'unknown_scenario'


class NotSymmetric(InvalidInput):
    default_detail = 'Polynomial is not symmetric under exchange of its variables.'
    default_code = 'not_symmetric'


class NotPure(InvalidInput):
    default_detail = 'State is not pure.'
    default_code = 'not_pure'


class MissingFunctionValue(InvalidInput):
    default_detail = 'Function value table does not cover a characteristic value.'
    default_code = 'missing_function_value'


class DecompositionMismatch(InvalidInput):
    default_detail = 'Decomposition does not mix to the given density matrix.'
    default_code = 'decomposition_mismatch'


# 驗證失敗 (exit code 1)
class VerificationError(TwinError):
    default_detail = 'Verification failed.'
    default_code = 'verification_failed'
    exit_code = 1


class ConvergenceFailure(VerificationError):
    default_detail = 'Eigensolver did not converge.'
    default_code = 'convergence_failure'


class NotReducible(VerificationError):
    default_detail = 'Operator does not reduce in the range/null decomposition.'
    default_code = 'not_reducible'


class SpectraMismatch(VerificationError):
    default_detail = 'Detectable parts do not have equal spectra; the pair is not a twin pair.'
    default_code = 'spectra_mismatch'


class DegenerateSpectrumCollision(VerificationError):
    default_detail = 'Two characteristic values fall within cluster_tol.'
    default_code = 'degenerate_spectrum_collision'


class SparsityViolation(VerificationError):
    default_detail = 'Forbidden matrix element exceeds residual_tol.'
    default_code = 'sparsity_violation'


class OffDiagonalLeak(VerificationError):
    default_detail = 'Decomposition component leaves the span of the matched product vectors.'
    default_code = 'off_diagonal_leak'


class NotComplete(VerificationError):
    default_detail = 'Pair is not a complete twin pair (degenerate detectable spectrum).'
    default_code = 'not_complete'


class TwinCheckFailed(VerificationError):
    default_detail = 'Constructed pair does not satisfy the twin relation.'
    default_code = 'twin_check_failed'

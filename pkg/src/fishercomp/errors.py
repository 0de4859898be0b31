"""Exception hierarchy.

Every error carries a stable ``code`` string so the CLI and the tests can
dispatch on it without matching messages.
"""


class FisherCompError(Exception):
    code = "ERROR"


class MalformedLP(FisherCompError):
    code = "MALFORMED_LP"


class ParseError(FisherCompError):
    code = "PARSE_ERROR"


class ValidationError(FisherCompError):
    code = "VALIDATION_ERROR"


class NotUniform(FisherCompError):
    code = "NOT_UNIFORM"


class NotCompatibleStart(FisherCompError):
    code = "NOT_COMPATIBLE_START"


class NotStableInput(FisherCompError):
    code = "NOT_STABLE_INPUT"


class SizeCapExceeded(FisherCompError):
    code = "SIZE_CAP_EXCEEDED"


class NoConvergence(FisherCompError):
    code = "NO_CONVERGENCE"

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class InvalidPrices(FisherCompError):
    code = "INVALID_PRICES"


class NotDuopoly(FisherCompError):
    code = "NOT_DUOPOLY"


class OutOfRegime(FisherCompError):
    code = "OUT_OF_REGIME"


class Not3SAT3(FisherCompError):
    code = "NOT_3SAT3"


class NotBipartite(FisherCompError):
    code = "NOT_BIPARTITE"


# The following signal bugs: the math guarantees they never fire.

class EventBudgetExceeded(FisherCompError):
    code = "EVENT_BUDGET_EXCEEDED"


class AlgorithmAssertion(FisherCompError):
    code = "ASSERTION_FAILED"


class InternalInconsistency(FisherCompError):
    code = "INTERNAL_INCONSISTENCY"


class StabilityCheckFailed(FisherCompError):
    code = "STABILITY_CHECK_FAILED"

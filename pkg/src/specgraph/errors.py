"""Exception hierarchy.

Every error carries a short machine-readable ``code`` and the process exit
status the command-line front end reports for it (2 config, 3 data,
4 numerical).
"""


class SpecGraphError(Exception):
    code = "Error"
    exit_status = 3


class ConfigError(SpecGraphError):
    code = "ConfigError"
    exit_status = 2


class DataError(SpecGraphError, ValueError):
    exit_status = 3


class NumericalError(SpecGraphError, ArithmeticError):
    exit_status = 4


# graph construction / queries
class IdOutOfRange(DataError):
    code = "IdOutOfRange"


class SelfLoopRejected(DataError):
    code = "SelfLoopRejected"


class DuplicateEdge(DataError):
    code = "DuplicateEdge"


class NonpositiveWeight(DataError):
    code = "NonpositiveWeight"


class DimensionMismatch(DataError):
    code = "DimensionMismatch"


class ShapeMismatch(DataError):
    code = "ShapeMismatch"


class DomainMismatch(DataError):
    code = "DomainMismatch"


class WeightedGraphUnsupported(DataError):
    code = "WeightedGraphUnsupported"


class NonSymmetricKind(DataError):
    code = "NonSymmetricKind"


class TooManyCoefficients(DataError):
    code = "TooManyCoefficients"


class NonpositiveLambdaMax(DataError):
    code = "NonpositiveLambdaMax"


class ZeroVector(DataError):
    code = "ZeroVector"


class BadDimensions(DataError):
    code = "BadDimensions"


class EmptyTrainSet(DataError):
    code = "EmptyTrainSet"


class EmptyMask(DataError):
    code = "EmptyMask"


class StaleCache(DataError):
    code = "StaleCache"


class DegenerateParameters(DataError):
    code = "DegenerateParameters"


class ConnectivityFailure(DataError):
    code = "ConnectivityFailure"


class ConvergenceFailure(NumericalError):
    code = "ConvergenceFailure"


class SolveFailure(NumericalError):
    code = "SolveFailure"

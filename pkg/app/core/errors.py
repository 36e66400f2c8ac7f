# app/core/errors.py

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONCLUSIVE = 2
EXIT_CONSISTENCY = 3


class NtkitError(Exception):
    exit_code = EXIT_USAGE


class UsageError(NtkitError, ValueError):
    """Invalid input or violated precondition."""


class ZeroInputError(UsageError):
    pass


class ArityError(UsageError):
    pass


class ParseError(UsageError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class PointNotOnCurveError(UsageError):
    pass


class NonIntegralModelError(UsageError):
    pass


class DegenerateMemberError(UsageError):
    pass


class IncompleteFactorizationError(NtkitError):
    exit_code = EXIT_INCONCLUSIVE

    def __init__(self, n: int, cofactor: int):
        super().__init__(f"factorization of {n} incomplete, composite cofactor {cofactor} survived the budget")
        self.n = n
        self.cofactor = cofactor


class ConsistencyError(NtkitError, ArithmeticError):
    """An internal self-check failed: a result did not verify."""
    exit_code = EXIT_CONSISTENCY


class SelmerClosureError(ConsistencyError):
    """Accepted pairs are not a group: a local solvability test is wrong."""


def exit_code_for(err: Exception) -> int:
    if isinstance(err, NtkitError):
        return err.exit_code
    return EXIT_USAGE if isinstance(err, ValueError) else EXIT_CONSISTENCY

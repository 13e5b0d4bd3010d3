from __future__ import annotations


class CMIntersectError(Exception):
    pass


class ConfigValidationError(CMIntersectError):
    """
    Raised when raw integers do not describe a valid CM pair configuration.

    Args:
        violation (str): Name of the violated rule, e.g. "NotCoprime"
        message (str): Human-readable explanation
        prime (int, optional): Offending prime for "DBPrimeNotInert"
    """

    def __init__(self, violation: str, message: str, prime: int | None = None):
        super().__init__(message)
        self.violation = violation
        self.prime = prime

    @property
    def label(self) -> str:
        if self.prime is None:
            return self.violation
        return f"{self.violation}({self.prime})"


class NonHenselianError(CMIntersectError):
    pass


class PrecisionExhaustedError(CMIntersectError):
    pass


class InconsistentDataError(CMIntersectError):
    pass

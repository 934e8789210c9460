"""Exception hierarchy shared by the library and the command line."""


class ShimuraLabError(Exception):
    exit_code = 1


class ValidationError(ShimuraLabError, ValueError):
    """Input data violates a stated invariant."""

    exit_code = 2


class UnsupportedError(ShimuraLabError):
    """The request is outside the configurations the library handles."""

    exit_code = 3


class NonMonogenicError(UnsupportedError):
    def __init__(self, p: int, detail: str = ""):
        self.p = p
        msg = f"non-monogenic at p={p}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class PrecisionError(ShimuraLabError, ArithmeticError):
    """A numeric decision could not be made at the maximum working precision."""

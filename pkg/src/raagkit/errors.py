"""Exception hierarchy shared by every raagkit module."""


class RaagkitError(Exception):
    """Base class for all raagkit errors."""


class InputError(RaagkitError, ValueError):
    """Malformed input: unknown vertex, bad syntax, violated precondition."""


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapabilityError(RaagkitError):
    """The request is well-formed but exceeds what the tool is built to do."""


class WorkLimitExceeded(CapabilityError):
    pass


class ConstructionError(RaagkitError):
    """A constructor could not produce an object satisfying its contract."""


class VerificationError(RaagkitError):
    """An internal cross-check disagreed with a closed form."""


class NotInPCTError(RaagkitError):
    """Automorphism is not a product of transvections, partial conjugations and inner automorphisms."""


class ConsistencyError(VerificationError):
    pass

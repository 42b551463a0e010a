"""Exception types. Each maps to one CLI exit code."""


class SelfDistError(Exception):
    exit_code = 1


class InputError(SelfDistError, ValueError):
    """Malformed input, dimension mismatch or violated precondition."""

    exit_code = 2


class DomainError(SelfDistError, ValueError):
    """Numeric parameter outside the domain where a formula is defined."""

    exit_code = 3


class SamplerInfeasibleError(SelfDistError, RuntimeError):
    exit_code = 3


class CertificateInvalidError(SelfDistError):
    """A covering does not contain every atom of the measure."""

    exit_code = 4

    def __init__(self, message, atom=None):
        super().__init__(message)
        self.atom = atom

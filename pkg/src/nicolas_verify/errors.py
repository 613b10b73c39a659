"""Exception hierarchy shared by all modules."""


class NicolasVerifyError(Exception):
    pass


class DomainError(NicolasVerifyError, ValueError):
    """Argument outside the domain where a function is defined."""


class ConvergenceError(NicolasVerifyError, ArithmeticError):
    pass


class BracketError(DomainError):
    """Endpoints of a root bracket do not straddle a sign change."""


class SieveExhausted(NicolasVerifyError):
    """The configured prime limit has been reached."""


class IndexGapError(NicolasVerifyError):
    """A prime block does not continue the accumulator state."""


class CheckpointError(NicolasVerifyError):
    pass


class VersionMismatch(CheckpointError):
    pass


class CorruptCheckpoint(CheckpointError):
    pass

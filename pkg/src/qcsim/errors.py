"""Exception hierarchy shared by every qcsim module."""


class QcsimError(Exception):
    """Base class for all errors raised by qcsim."""


class DomainError(QcsimError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class PromiseViolation(QcsimError, ValueError):
    """An oracle does not satisfy the promise an algorithm relies on."""


class AlgorithmFailure(QcsimError, RuntimeError):
    """A probabilistic algorithm exhausted its retry budget."""


class UncorrectableError(QcsimError):
    """A measured syndrome is not in the code's correction table."""

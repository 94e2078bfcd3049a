"""Exception hierarchy shared by every inferlab module."""


class InferlabError(Exception):
    """Base class for all errors raised by inferlab."""


class DomainError(InferlabError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class ConvergenceError(InferlabError, ArithmeticError):
    """A numerical routine exhausted its budget before meeting its tolerance."""

"""Shared exception types."""


class QCurrentsError(Exception):
    pass


class DivisionByZero(QCurrentsError, ZeroDivisionError):
    pass


class BadDirection(QCurrentsError):
    pass


class HigherOrderPole(QCurrentsError):
    pass


class UnresolvedPole(QCurrentsError):
    pass


class OrderExhausted(QCurrentsError):
    pass


class YbeViolation(QCurrentsError):
    pass


class RelationViolation(QCurrentsError):
    pass


class MismatchReport(QCurrentsError):
    pass


class MixedParity(QCurrentsError):
    pass


class Singular(QCurrentsError):
    pass


class WindowTooSmall(QCurrentsError):
    pass


class NonCentralLevel(QCurrentsError):
    pass


class ConfigTooSmall(QCurrentsError):
    pass


class SingularPrincipalBlock(QCurrentsError):
    pass


class UnknownSuite(QCurrentsError):
    pass


class ConfigInvalid(QCurrentsError):
    pass

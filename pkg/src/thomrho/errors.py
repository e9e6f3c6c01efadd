"""Exception hierarchy.

Two families matter to callers: ``ModelError`` covers malformed input
(bad ring presentations, unknown factors, parse failures) and
``MathError`` covers well-formed input whose mathematics fails
(a relation is violated, a class is not divisible by the Thom class,
a map does not commute with an operation).
"""


class ThomRhoError(Exception):
    pass


class ModelError(ThomRhoError):
    pass


class InvalidSpec(ModelError, ValueError):
    pass


class RingMismatch(ModelError):
    pass


class CoefficientMismatch(ModelError):
    pass


class TheoryMismatch(ModelError):
    pass


class UnknownFactor(ModelError):
    pass


class UnsupportedK(ModelError):
    pass


class UnsupportedGeneratorDegree(ModelError):
    pass


class UnsupportedBundle(ModelError):
    pass


class ParseError(ModelError):
    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        before = text[:position]
        self.line = before.count("\n") + 1
        self.column = position - (before.rfind("\n") + 1) + 1
        super().__init__(f"{message} at line {self.line}, column {self.column}")


class MathError(ThomRhoError):
    pass


class RelationViolation(MathError):
    def __init__(self, message, generator=None):
        self.generator = generator
        super().__init__(message)


class NotDivisible(MathError):
    pass


class NotCommuting(MathError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)

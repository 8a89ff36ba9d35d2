"""Exception types.

Two families: `InputError` for violated preconditions or malformed data
(CLI exit code 2), `NumericalError` for failures of the numerics themselves
(CLI exit code 3).
"""


class OrbitHullError(Exception):
    pass


class InputError(OrbitHullError):
    pass


class NumericalError(OrbitHullError):
    pass


class EmptyAlgebra(InputError):
    pass


class BadDimension(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class NotHermitian(InputError):
    pass


class NotPositive(InputError):
    pass


class NotMajorized(InputError):
    pass


class NotDoublyStochastic(InputError):
    pass


class NotContraction(InputError):
    pass


class RankOverflow(InputError):
    pass


class BadEpsilon(InputError):
    pass


class LengthMismatch(InputError):
    pass


class NoConvergence(NumericalError):
    pass


class DecompositionStall(NumericalError):
    pass


class EpsilonTooSmall(NumericalError):
    pass

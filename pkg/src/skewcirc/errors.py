"""Exception types raised by skewcirc."""


class SkewCircError(Exception):
    """Base class for all package errors."""


class DimensionError(SkewCircError, ValueError):
    """Operands have incompatible shapes."""


class LayoutError(SkewCircError, ValueError):
    """A parameter block has the wrong number of entries."""


class SizeError(SkewCircError, ValueError):
    """A qubit count or matrix size is outside the supported range."""


class NotHermitianError(SkewCircError, ValueError):
    pass


class NotAntisymmetricError(SkewCircError, ValueError):
    def __init__(self, i, j, a_ij, a_ji):
        self.pair = (i, j)
        super().__init__(
            f"entries ({i},{j})={a_ij!r} and ({j},{i})={a_ji!r} violate a_ji = -a_ij"
        )


class NotUnitaryError(SkewCircError, ValueError):
    pass


class SingularityError(SkewCircError, ValueError):
    """A Lambda-block parameter sits too close to a cotangent pole."""

    def __init__(self, index, value):
        self.index = index
        super().__init__(
            f"theta_lambda[{index}] = {value!r} has |sin| < 1e-6 (cotangent pole)"
        )


class ConvergenceError(SkewCircError, RuntimeError):
    pass


class NumericError(SkewCircError, ArithmeticError):
    """Overflow or NaN encountered during a numeric computation."""

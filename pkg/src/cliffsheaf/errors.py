"""Exception hierarchy shared by all modules."""


class CliffsheafError(Exception):
    pass


class DegenerateMetric(CliffsheafError, ValueError):
    pass


class InvalidSignature(CliffsheafError, ValueError):
    pass


class NullVectorForM(CliffsheafError, ValueError):
    """The normalised generators M / Mt are undefined on the null cone."""


class UnknownForm(CliffsheafError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnsupportedArity(CliffsheafError, ValueError):
    pass


class NotNull(CliffsheafError, ValueError):
    pass


class NumericalBreakdown(CliffsheafError, ArithmeticError):
    pass


class MassRequired(CliffsheafError, ValueError):
    pass


class IncommensurateMomentum(CliffsheafError, ValueError):
    pass


class FlatOnly(CliffsheafError, ValueError):
    pass


class ExprSyntaxError(CliffsheafError):
    """Parse failure with a 1-based source position."""

    def __init__(self, message, line=1, column=1):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


class ArityError(ExprSyntaxError):
    pass

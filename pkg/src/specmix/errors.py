"""Exception hierarchy shared by every specmix module."""


class SpecmixError(Exception):
    """Base class for all errors raised by specmix."""


class InvalidArgument(SpecmixError, ValueError):
    pass


class InvalidProbability(InvalidArgument):
    """A parameter combination would produce edge probabilities outside [0, 1]."""


class SingularMixing(InvalidArgument):
    pass


class NumericFailure(SpecmixError, ArithmeticError):
    pass


class IllConditioned(NumericFailure):
    def __init__(self, message, cond=None):
        super().__init__(message)
        self.cond = cond


class DegenerateRow(NumericFailure):
    def __init__(self, row, norm):
        super().__init__(f"row {row} has norm {norm:.3e}; cannot normalize (isolated node?)")
        self.row = row
        self.norm = norm


class RankDeficientInput(NumericFailure):
    pass


class DegenerateCone(NumericFailure):
    """The convex hull of the rows contains the origin; no supporting hyperplane exists."""


class ClusteringFailure(NumericFailure):
    pass


class CornerFailure(NumericFailure):
    pass


class EstimationFailure(SpecmixError):
    def __init__(self, message, corners=None):
        super().__init__(message)
        self.corners = corners


class ConfigRejected(InvalidArgument):
    def __init__(self, message, field=None, value=None):
        super().__init__(message)
        self.field = field
        self.value = value

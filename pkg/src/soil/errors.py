"""Exception types raised across the package."""


class SoilError(ValueError):
    """Base class for all data/config errors raised by soil."""


class InvalidDataset(SoilError):
    pass


class RankDeficient(SoilError):
    pass


class TooManyVariables(SoilError):
    pass


class OneClassOnly(SoilError):
    pass


class NonFinite(SoilError):
    pass


class TooLarge(SoilError):
    pass


class DimensionMismatch(SoilError):
    pass


class AllInfinite(SoilError):
    pass


class NoFittableCandidate(SoilError):
    pass


class LengthMismatch(SoilError):
    pass


class BadThreshold(SoilError):
    pass


class BadRho(SoilError):
    pass


class ConfigInvalid(SoilError):
    pass


class MissingColumn(SoilError):
    pass


class NonBinaryResponse(SoilError):
    pass


class ParseError(SoilError):
    def __init__(self, row, col, message="unparseable value"):
        self.row = row
        self.col = col
        super().__init__(f"row {row}, column {col!r}: {message}")


class SeparationWarning(UserWarning):
    """Logistic fit hit (quasi-)complete separation; probabilities were clamped."""

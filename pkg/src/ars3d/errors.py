"""Exception hierarchy."""


class ArsError(Exception):
    """Base class for all domain errors raised by ars3d."""


class InvalidThetaError(ArsError, ValueError):
    pass


class InadmissibleFieldError(ArsError, ValueError):
    """The matrix of a linear field does not commute with theta."""


class InvalidDistributionError(ArsError, ValueError):
    pass


class InvalidARSError(ArsError, ValueError):
    """LARC fails or the regular set is empty.

    ``reasons`` lists every failed check.
    """

    def __init__(self, reasons):
        self.reasons = list(reasons)
        super().__init__("; ".join(self.reasons))


class InvalidAutomorphismError(ArsError, ValueError):
    pass


class RankError(ArsError):
    """The linear field is not rank two."""


class NotConjugatingError(ArsError):
    def __init__(self, message, residuals):
        self.residuals = residuals
        super().__init__(message)


class MaxRootsError(ArsError):
    def __init__(self, message, roots):
        self.roots = roots
        super().__init__(message)

"""Exception hierarchy shared by all modules."""


class BosemixError(Exception):
    """Base class for every error raised by this package."""


class StabilityViolation(BosemixError, ValueError):
    """Interspecies coupling too strong for a miscible mixture (g12^2 >= g1 g2)."""


class NonSymmetricMixture(BosemixError, ValueError):
    """Species parameters differ where a symmetric mixture is required."""


class OutOfRange(BosemixError, ValueError):
    """Requested frequency lies outside the tabulated dispersion."""


class DegenerateFit(BosemixError, ValueError):
    pass


class QuadratureFailure(BosemixError, ArithmeticError):
    pass


class EigenFailure(BosemixError, ArithmeticError):
    pass


class PositivityViolation(BosemixError, ValueError):
    pass


class GridTooCoarse(BosemixError, ValueError):
    pass


class ConfigError(BosemixError, ValueError):
    """One or more configuration problems.

    ``errors`` holds the individual messages; ``str(exc)`` joins them one per line.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))

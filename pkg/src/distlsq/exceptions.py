"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid input data or configuration.

    ``field`` carries a dotted path (``"graph.edges[2]"``) when the error
    originates from a scenario config.
    """

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class DimensionError(ValidationError):
    pass


class AssumptionError(ValidationError):
    """A standing assumption (graph connectivity/balance, distinct frequencies) fails."""


class NotHurwitzError(ValidationError):
    def __init__(self, message, eigenvalues=None, field=None):
        self.eigenvalues = eigenvalues
        super().__init__(message, field=field)


class IntegrationError(RuntimeError):
    """State became non-finite during integration."""

    def __init__(self, message, time):
        self.time = time
        super().__init__(f"{message} (t = {time:.6g} s)")

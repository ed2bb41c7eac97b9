"""Exception types shared across the package."""


class LotOptError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolation(LotOptError, ValueError):
    """An argument breaks a documented precondition (empty vector, bad length, ...)."""


class InvalidParameter(LotOptError, ValueError):
    """A configuration value is outside its legal range."""


class UniverseTooLarge(LotOptError):
    """Lot-type enumeration would exceed the configured cap."""


class ProblemTooLarge(LotOptError):
    """The exact solver refuses an instance; emit a MILP model instead."""


class SchemaError(LotOptError, ValueError):
    """A serialized document does not match the expected schema.

    ``path`` names the offending field ("branches[2].demand", "kappa", ...).
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class EstimationError(LotOptError):
    """Demand estimation cannot produce a usable table."""


class MissingProductError(EstimationError):
    """A configured reference product has no sales history at all."""


class UnsupportedModel(LotOptError, ValueError):
    """The requested MILP formulation cannot express the instance's norm."""

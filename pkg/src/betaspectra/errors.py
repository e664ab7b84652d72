"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class UnsupportedOrderError(ValueError):
    """A reference table has no entry for the requested moment order."""


class EnumerationSizeError(ValueError):
    """A path enumeration would be too large to carry out explicitly."""


class SamplingError(ArithmeticError):
    """A user-supplied model function produced non-finite matrix entries."""

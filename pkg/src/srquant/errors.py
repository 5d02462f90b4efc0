"""Exception types shared across the package."""


class NumericFailure(RuntimeError):
    """A root or optimum could not be bracketed or did not converge."""


class InvalidConfiguration(ValueError):
    """The quantizer configuration does not satisfy a method's assumptions."""


class ScanFormatError(ValueError):
    """A scan dataset or manifest file is malformed."""

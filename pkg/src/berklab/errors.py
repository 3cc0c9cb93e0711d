"""Exception hierarchy shared by every berklab module."""


class BerklabError(Exception):
    """Base class; ``code`` is the machine-readable name used by the CLI."""

    code = "BerklabError"


class ZeroPolynomial(BerklabError, ValueError):
    code = "ZeroPolynomial"


class ParseError(BerklabError, ValueError):
    code = "ParseError"


class InvalidProjectivePoint(BerklabError, ValueError):
    code = "InvalidProjectivePoint"


class NotNormalized(BerklabError, ValueError):
    code = "NotNormalized"


class SingularMatrix(BerklabError, ValueError):
    code = "SingularMatrix"


class DegenerateLift(BerklabError, ValueError):
    code = "DegenerateLift"


class DiskContainsZeroAndPole(BerklabError):
    code = "DiskContainsZeroAndPole"


class IdenticallyEqual(BerklabError):
    code = "IdenticallyEqual"


class InsufficientResolution(BerklabError):
    code = "InsufficientResolution"


class ToleranceUnreachable(BerklabError):
    code = "ToleranceUnreachable"


class ExceptionalBasePoint(BerklabError):
    code = "ExceptionalBasePoint"


class TreeMismatch(BerklabError, ValueError):
    code = "TreeMismatch"


class ConfigError(BerklabError, ValueError):
    code = "ConfigError"

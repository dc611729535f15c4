"""Exception hierarchy.

Everything raised on purpose by the library derives from :class:`XFTError`,
so the CLI can map failures onto exit codes without catching bare
exceptions.
"""

from __future__ import annotations


class XFTError(Exception):
    """Base class for all library errors."""


class NotHermitian(XFTError, ValueError):
    pass


class NotUnitary(XFTError, ValueError):
    pass


class DimensionMismatch(XFTError, ValueError):
    pass


class DegenerateSpectrum(XFTError, ValueError):
    """The exchange operator has (numerically) repeated eigenvalues.

    Charge changes measured in an ambiguous eigenbasis are not well defined,
    so trajectory enumeration refuses such inputs.
    """


class CertificateFailure(XFTError):
    """The interaction does not preserve every charge."""

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class MissingInteractionHamiltonian(XFTError):
    pass


class SingularState(XFTError, ValueError):
    pass


class IndexOutOfRange(XFTError, IndexError):
    pass


class ConfigError(XFTError):
    """Malformed configuration; ``path`` locates the offending entry."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message

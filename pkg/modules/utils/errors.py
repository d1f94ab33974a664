"""Exception hierarchy shared by the library and the CLI"""


class KRError(Exception):
    """Base class for all errors raised by the library"""
    exit_code = 1


class InvalidInputError(KRError, ValueError):
    """Malformed input: bad N, bad diagram, bad marks"""
    exit_code = 2


class ResourceGuardError(KRError):
    """A configured size guard was exceeded"""
    exit_code = 3


class VerificationError(KRError):
    """An identity that must hold exactly did not hold"""
    exit_code = 1


class StructuralError(KRError):
    """A structural contract of a computed object was violated"""
    exit_code = 1

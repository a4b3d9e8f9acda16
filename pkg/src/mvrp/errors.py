"""Exception types shared across the package."""


class MvrpError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameter(MvrpError, ValueError):
    pass


class UnknownCityId(MvrpError, KeyError):
    pass


class ParseError(MvrpError, ValueError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class ClusterTooLarge(MvrpError, ValueError):
    pass


class IncompleteTour(MvrpError, ValueError):
    pass

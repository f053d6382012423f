class CMBError(Exception):
    """Base class for errors raised by this package."""


class InvalidStateError(CMBError, ValueError):
    pass


class ParameterError(CMBError, ValueError):
    pass


class DomainError(CMBError, ValueError):
    pass


class ConfigurationError(CMBError, ValueError):
    pass


class ProtocolError(CMBError, ValueError):
    pass


class StrategyError(CMBError, ValueError):
    pass

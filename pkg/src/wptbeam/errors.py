"""Exception types shared across the simulator."""


class DegenerateGeometryError(ValueError):
    """A receiver sits exactly on a transmitter, so no departure angle exists."""


class ProtocolError(RuntimeError):
    """Environment stepped out of order (wrong agent, intermediate state, or finished episode)."""


class EnumerationCapError(RuntimeError):
    """Joint code space larger than the configured enumeration cap."""


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss, gradient, or parameter."""


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""

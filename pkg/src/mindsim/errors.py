"""Exception types raised by the engine."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine errors."""


class ConfigError(EngineError):
    """Invalid detection/device configuration, e.g. an unknown channel id."""


class TraceError(EngineError):
    """Malformed or out-of-order signal trace input."""


class InvalidCursorError(EngineError):
    """A navigation cursor does not address a valid position in its tree."""


class LayoutError(EngineError):
    """A layout document failed to parse or validate.

    ``violations`` holds the individual findings when validation failed.
    """

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations: list[str] = violations or []


class UnboundSlotError(EngineError):
    """A prediction slot has no candidate word for the current prefix."""


class ProfileError(EngineError):
    """A profile file failed to load: bad schema, dangling reference, etc."""


class PlanningError(EngineError):
    """A task goal cannot be achieved with the configured layouts/devices."""

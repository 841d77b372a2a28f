"""Hardware-independent three-action input engine: hierarchical virtual
keyboard, quadrant pointing device, deterministic simulation harness, and
a live WebSocket gateway."""

from .actions import ClockTick, UserAction, UserActionEvent

__all__ = ["UserAction", "UserActionEvent", "ClockTick"]

__version__ = "0.1.0"

"""The three-action input vocabulary shared by every virtual device."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class UserAction(str, Enum):
    SCROLL = "scroll"
    ZOOM_IN = "zoom_in"
    ZOOM_OUT = "zoom_out"


# Canonical ordering; noise confusion matrices are indexed in this order.
ACTIONS: tuple[UserAction, UserAction, UserAction] = (
    UserAction.SCROLL,
    UserAction.ZOOM_IN,
    UserAction.ZOOM_OUT,
)


@dataclass(frozen=True)
class UserActionEvent:
    """A detected user action with its detection timestamp."""

    action: UserAction
    timestamp_ms: int


@dataclass(frozen=True)
class ClockTick:
    """Injected passage of time; resolves pending-click deadlines."""

    now_ms: int

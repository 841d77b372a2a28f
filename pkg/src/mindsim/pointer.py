"""Quadrant pointing device: recursive screen subdivision, the pending
single/double-click window, and the geometric navigation oracle.

The click window is half-open: a second zoom-in strictly before
``deadline`` upgrades to a double click; at or after the deadline the
single click is already due.  Time never comes from the wall clock -- the
owner injects :class:`~mindsim.actions.ClockTick` events, so click kinds
are a pure function of the input timestamps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

from .actions import ClockTick, UserAction

CLICK_WINDOW_MS = 4000

QUADRANTS = ("TL", "TR", "BL", "BR")  # index order 0..3


@dataclass(frozen=True)
class ScreenRect:
    """Half-open pixel rectangle [x, x+w) x [y, y+h)."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.w < 1 or self.h < 1:
            raise ValueError(f"rect must be at least 1x1, got {self.w}x{self.h}")

    def contains(self, px: int, py: int) -> bool:
        return self.x <= px < self.x + self.w and self.y <= py < self.y + self.h

    def center(self) -> tuple[int, int]:
        return self.x + self.w // 2, self.y + self.h // 2


def subdivide(rect: ScreenRect, quadrant: int) -> ScreenRect:
    """Quadrant of ``rect``; top/left halves take the ceiling of odd splits
    so the four pieces partition the rect exactly.  A dimension of 1 cannot
    be halved: both halves collapse onto the same single row/column."""
    if not 0 <= quadrant <= 3:
        raise ValueError(f"quadrant must be 0..3, got {quadrant}")
    left_w = (rect.w + 1) // 2
    top_h = (rect.h + 1) // 2
    right_w = rect.w - left_w
    bottom_h = rect.h - top_h
    # Degenerate splits keep every quadrant at least one pixel wide.
    right_x = rect.x + left_w if right_w else rect.x
    bottom_y = rect.y + top_h if bottom_h else rect.y
    right_w = right_w or 1
    bottom_h = bottom_h or 1
    if quadrant == 0:
        return ScreenRect(rect.x, rect.y, left_w, top_h)
    if quadrant == 1:
        return ScreenRect(right_x, rect.y, right_w, top_h)
    if quadrant == 2:
        return ScreenRect(rect.x, bottom_y, left_w, bottom_h)
    return ScreenRect(right_x, bottom_y, right_w, bottom_h)


@dataclass(frozen=True)
class ClickEvent:
    x: int
    y: int
    kind: str  # "single" | "double"


@dataclass(frozen=True)
class SwitchToKeyboard:
    """Emitted when zooming out at the full screen closes the pointer."""


PointerOutput = Union[ClickEvent, SwitchToKeyboard, None]


@dataclass(frozen=True)
class PointerState:
    """Rectangle stack from full screen down to the current selection.

    ``quadrants[i]`` records which quadrant ``rects[i+1]`` is of
    ``rects[i]``; zooming out restores that highlight.  ``deadline_ms`` is
    set while a click is pending.
    """

    rects: tuple[ScreenRect, ...]
    quadrants: tuple[int, ...]
    highlighted: int
    max_depth: int
    deadline_ms: int | None = None

    @property
    def depth(self) -> int:
        return len(self.rects) - 1

    @property
    def current(self) -> ScreenRect:
        return self.rects[-1]

    @property
    def pending(self) -> bool:
        return self.deadline_ms is not None


def initial_pointer(screen: ScreenRect, max_depth: int) -> PointerState:
    if max_depth < 1:
        raise ValueError("max_depth must be positive")
    return PointerState((screen,), (), 0, max_depth)


def _reset(state: PointerState) -> PointerState:
    return PointerState(state.rects[:1], (), 0, state.max_depth)


def _click(state: PointerState, kind: str) -> tuple[PointerState, ClickEvent]:
    cx, cy = state.current.center()
    return _reset(state), ClickEvent(cx, cy, kind)


def step_pointer(
    state: PointerState, event: Union[UserAction, ClockTick], now_ms: int
) -> tuple[PointerState, PointerOutput]:
    """One transition of the pointing device.

    ``now_ms`` is the event's timestamp; for ticks it must equal
    ``event.now_ms``.
    """
    if state.pending:
        deadline = state.deadline_ms or 0
        if isinstance(event, ClockTick):
            if event.now_ms >= deadline:
                return _click(state, "single")
            return state, None
        if event is UserAction.ZOOM_IN:
            if now_ms < deadline:
                return _click(state, "double")
            # Late by a whole window: the single click was already due.
            return _click(state, "single")
        if event is UserAction.ZOOM_OUT:
            return replace(state, deadline_ms=None), None
        return state, None  # scroll is ignored while the target blinks

    if isinstance(event, ClockTick):
        return state, None

    if event is UserAction.SCROLL:
        return replace(state, highlighted=(state.highlighted + 1) % 4), None

    if event is UserAction.ZOOM_IN:
        if state.depth < state.max_depth:
            chosen = subdivide(state.current, state.highlighted)
            return (
                PointerState(
                    state.rects + (chosen,),
                    state.quadrants + (state.highlighted,),
                    0,
                    state.max_depth,
                ),
                None,
            )
        return replace(state, deadline_ms=now_ms + CLICK_WINDOW_MS), None

    if event is UserAction.ZOOM_OUT:
        if state.depth > 0:
            return (
                PointerState(
                    state.rects[:-1],
                    state.quadrants[:-1],
                    state.quadrants[-1],
                    state.max_depth,
                ),
                None,
            )
        return _reset(state), SwitchToKeyboard()

    raise ValueError(f"unknown pointer input {event!r}")


def quadrant_path(screen: ScreenRect, px: int, py: int, depth: int) -> list[int]:
    """The unique quadrant choices that keep ``(px, py)`` inside the
    shrinking rect for ``depth`` subdivisions."""
    if depth < 1:
        raise ValueError("depth must be positive")
    if not screen.contains(px, py):
        raise ValueError(f"point ({px}, {py}) outside screen {screen}")
    path: list[int] = []
    rect = screen
    for _ in range(depth):
        for quadrant in range(4):
            candidate = subdivide(rect, quadrant)
            if candidate.contains(px, py):
                path.append(quadrant)
                rect = candidate
                break
    return path


def required_depth(screen: ScreenRect, precision_px: int) -> int:
    """Smallest depth whose worst-case rect dimension is within
    ``precision_px``.  After d splits the largest piece of an extent w is
    exactly ceil(w / 2^d)."""
    if precision_px < 1:
        raise ValueError("precision must be at least one pixel")
    extent = max(screen.w, screen.h)
    depth = 1
    while math.ceil(extent / 2**depth) > precision_px:
        depth += 1
    return depth

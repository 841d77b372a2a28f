"""Core routing loop: owns the active mode, feeds actions to the active
device, and forwards the resulting output events to a sink.

The engine state is an immutable snapshot; :func:`dispatch` is a pure
transition, so identical input streams always produce identical event
logs.  ``Session`` adds the stateful conveniences around it: clock-tick
injection for pending clicks, the mock desktop sink, layout switching on
focus change, and the canonical one-line-per-event log.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable, Union

from .actions import ClockTick, UserAction, UserActionEvent
from .errors import UnboundSlotError
from .hierarchy import LayoutNode, NavCursor, ROOT_CURSOR, apply_action
from .keyboard import (
    BACKSPACE,
    ENTER,
    SPACE,
    KeySequence,
    Keystroke,
    PredictionSlot,
    SwitchToPointer,
    resolve_prediction,
)
from .pointer import (
    ClickEvent,
    PointerState,
    ScreenRect,
    SwitchToKeyboard,
    initial_pointer,
    step_pointer,
)
from .profiles import Profile, layout_for

MODE_KEYBOARD = "keyboard"
MODE_POINTER = "pointer"

#: Sequences carrying a modifier are app commands, not text input.
MODIFIER_KEYS = {"CTRL", "ALT", "SHIFT", "META"}


@dataclass(frozen=True)
class KeyPress:
    key: str
    timestamp_ms: int


@dataclass(frozen=True)
class KeySequenceOut:
    keys: tuple[str, ...]
    label: str
    timestamp_ms: int


@dataclass(frozen=True)
class ClickOut:
    x: int
    y: int
    click: str  # "single" | "double"
    timestamp_ms: int


@dataclass(frozen=True)
class ModeSwitched:
    mode: str
    timestamp_ms: int


@dataclass(frozen=True)
class CancelledOut:
    timestamp_ms: int


OutputEvent = Union[KeyPress, KeySequenceOut, ClickOut, ModeSwitched, CancelledOut]


def canonical_line(event: OutputEvent) -> str:
    """Stable one-line serialization used for event logs and golden tests."""
    if isinstance(event, KeyPress):
        payload = {"kind": "key_press", "key": event.key, "t": event.timestamp_ms}
    elif isinstance(event, KeySequenceOut):
        payload = {
            "kind": "key_sequence",
            "keys": list(event.keys),
            "label": event.label,
            "t": event.timestamp_ms,
        }
    elif isinstance(event, ClickOut):
        payload = {
            "kind": "click",
            "x": event.x,
            "y": event.y,
            "click": event.click,
            "t": event.timestamp_ms,
        }
    elif isinstance(event, ModeSwitched):
        payload = {"kind": "mode_switched", "mode": event.mode, "t": event.timestamp_ms}
    else:
        payload = {"kind": "cancelled", "t": event.timestamp_ms}
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class EngineState:
    mode: str
    layout: LayoutNode
    cursor: NavCursor
    pointer: PointerState
    prefix: str
    profile: Profile
    screen: ScreenRect


def init_state(profile: Profile, screen: ScreenRect, app_id: str | None = None) -> EngineState:
    layout = layout_for(profile, app_id) if app_id else profile.default_layout
    return EngineState(
        mode=MODE_KEYBOARD,
        layout=layout,
        cursor=ROOT_CURSOR,
        pointer=initial_pointer(screen, profile.pointer_max_depth),
        prefix="",
        profile=profile,
        screen=screen,
    )


def pending_deadline(state: EngineState) -> int | None:
    if state.mode == MODE_POINTER and state.pointer.pending:
        return state.pointer.deadline_ms
    return None


def _advance_prefix(prefix: str, key: str) -> str:
    """Track the word being typed; resets on word/line breaks."""
    if key in (SPACE, ENTER):
        return ""
    if key == BACKSPACE:
        return prefix[:-1]
    if len(key) == 1 and (key.isalnum() or key == "'"):
        return prefix + key.lower()
    return prefix


def dispatch(
    state: EngineState, event: Union[UserActionEvent, ClockTick]
) -> tuple[EngineState, list[OutputEvent]]:
    """Route one action or tick to the active device."""
    if isinstance(event, ClockTick):
        if state.mode == MODE_POINTER:
            return _dispatch_pointer(state, event, event.now_ms)
        return state, []
    if state.mode == MODE_KEYBOARD:
        return _dispatch_keyboard(state, event)
    return _dispatch_pointer(state, event.action, event.timestamp_ms)


def _dispatch_keyboard(
    state: EngineState, event: UserActionEvent
) -> tuple[EngineState, list[OutputEvent]]:
    t = event.timestamp_ms
    cursor, effect = apply_action(state.layout, state.cursor, event.action)
    state = replace(state, cursor=cursor)
    if effect.kind == "cancelled":
        return state, [CancelledOut(t)]
    if effect.kind != "emit":
        return state, []

    payload = effect.payload
    if isinstance(payload, Keystroke):
        return replace(state, prefix=_advance_prefix(state.prefix, payload.key)), [
            KeyPress(payload.key, t)
        ]
    if isinstance(payload, KeySequence):
        prefix = state.prefix
        if not MODIFIER_KEYS.intersection(payload.keys):
            for key in payload.keys:
                prefix = _advance_prefix(prefix, key)
        label = _leaf_label(state.layout, effect.leaf_path)
        return replace(state, prefix=prefix), [KeySequenceOut(payload.keys, label, t)]
    if isinstance(payload, SwitchToPointer):
        return replace(state, mode=MODE_POINTER), [ModeSwitched(MODE_POINTER, t)]
    if isinstance(payload, PredictionSlot):
        try:
            completion = resolve_prediction(
                payload.rank, state.prefix, state.profile.dictionary
            )
        except UnboundSlotError:
            return state, []  # unbound slot: selection is a no-op
        prefix = state.prefix
        for key in completion.keys:
            prefix = _advance_prefix(prefix, key)
        label = _leaf_label(state.layout, effect.leaf_path)
        return replace(state, prefix=prefix), [KeySequenceOut(completion.keys, label, t)]
    raise UnboundSlotError(f"unhandled payload {payload!r}")


def _leaf_label(layout: LayoutNode, leaf_path: tuple[int, ...] | None) -> str:
    node = layout
    for index in leaf_path or ():
        node = (node.children or ())[index]
    return node.label


def _dispatch_pointer(
    state: EngineState, event: Union[UserAction, ClockTick], now_ms: int
) -> tuple[EngineState, list[OutputEvent]]:
    pointer, output = step_pointer(state.pointer, event, now_ms)
    state = replace(state, pointer=pointer)
    if isinstance(output, ClickEvent):
        # A click ends the current word like a caret move would.
        return replace(state, prefix=""), [ClickOut(output.x, output.y, output.kind, now_ms)]
    if isinstance(output, SwitchToKeyboard):
        return replace(state, mode=MODE_KEYBOARD), [ModeSwitched(MODE_KEYBOARD, now_ms)]
    return state, []


def on_focus_change(state: EngineState, new_app: str) -> EngineState:
    """Swap in the app's layout and reset keyboard navigation."""
    return replace(
        state, layout=layout_for(state.profile, new_app), cursor=ROOT_CURSOR
    )


def transition_cues(
    before: EngineState, after: EngineState, outputs: list[OutputEvent]
) -> list[str]:
    """Names of UI sound cues triggered by one dispatch step."""
    cues: list[str] = []
    for event in outputs:
        if isinstance(event, ClickOut):
            cues.append("click")
        elif isinstance(event, CancelledOut):
            cues.append("cancel")
        elif isinstance(event, (KeyPress, KeySequenceOut)):
            cues.append("emit")
    if before.mode == after.mode:
        if before.mode == MODE_KEYBOARD:
            if len(after.cursor.path) > len(before.cursor.path):
                cues.append("level-descend")
            elif len(after.cursor.path) < len(before.cursor.path) and not outputs:
                cues.append("level-ascend")
        else:
            if after.pointer.depth > before.pointer.depth:
                cues.append("level-descend")
                if after.pointer.depth == after.pointer.max_depth:
                    cues.append("target-reached")
            elif after.pointer.depth < before.pointer.depth:
                cues.append("level-ascend")
    return cues


class MockDesktop:
    """Stand-in for a real desktop: focusable icon apps, one text buffer
    per app, and a click log."""

    def __init__(
        self,
        screen: ScreenRect,
        icons: dict[str, ScreenRect] | None = None,
        focused_app: str = "desktop",
    ):
        for icon, rect in (icons or {}).items():
            if not (
                screen.contains(rect.x, rect.y)
                and screen.contains(rect.x + rect.w - 1, rect.y + rect.h - 1)
            ):
                raise ValueError(f"icon {icon!r} extends past the screen")
        self.screen = screen
        self.icons: dict[str, ScreenRect] = dict(icons or {})
        self.focused_app = focused_app
        self.buffers: dict[str, str] = {}
        self.click_log: list[ClickOut] = []

    @property
    def text_buffer(self) -> str:
        return self.buffers.get(self.focused_app, "")

    def buffer_of(self, app_id: str) -> str:
        return self.buffers.get(app_id, "")

    def _type_key(self, key: str) -> None:
        buffer = self.buffers.get(self.focused_app, "")
        if key == BACKSPACE:
            buffer = buffer[:-1]
        elif key == ENTER:
            buffer += "\n"
        elif key == SPACE:
            buffer += " "
        elif len(key) == 1:
            buffer += key
        # multi-character named keys (CTRL, PLAY, ...) leave the buffer alone
        self.buffers[self.focused_app] = buffer

    def apply(self, event: OutputEvent) -> None:
        if isinstance(event, KeyPress):
            self._type_key(event.key)
        elif isinstance(event, KeySequenceOut):
            if not MODIFIER_KEYS.intersection(event.keys):
                for key in event.keys:
                    self._type_key(key)
        elif isinstance(event, ClickOut):
            self.click_log.append(event)
            if event.click == "double":
                for icon, rect in self.icons.items():
                    if rect.contains(event.x, event.y):
                        self.focused_app = icon
                        break


def apply_to_desktop(event: OutputEvent, desktop: MockDesktop) -> MockDesktop:
    desktop.apply(event)
    return desktop


class Session:
    """Owns one engine instance plus its desktop sink.

    Injects the due clock tick before any later input so pending single
    clicks resolve exactly at their deadline, applies outputs to the
    desktop, switches layouts when a double click changes focus, and keeps
    the canonical event log.
    """

    def __init__(self, profile: Profile, desktop: MockDesktop, app_id: str | None = None):
        self.desktop = desktop
        self.state = init_state(profile, desktop.screen, app_id or desktop.focused_app)
        self.event_log: list[str] = []
        self.outputs: list[OutputEvent] = []

    def _deliver(self, event: Union[UserActionEvent, ClockTick]) -> list[OutputEvent]:
        self.state, outputs = dispatch(self.state, event)
        focus_before = self.desktop.focused_app
        for output in outputs:
            self.desktop.apply(output)
            self.event_log.append(canonical_line(output))
        if self.desktop.focused_app != focus_before:
            self.state = on_focus_change(self.state, self.desktop.focused_app)
        self.outputs.extend(outputs)
        return outputs

    def feed(self, event: Union[UserActionEvent, ClockTick]) -> list[OutputEvent]:
        at = event.now_ms if isinstance(event, ClockTick) else event.timestamp_ms
        outputs: list[OutputEvent] = []
        deadline = pending_deadline(self.state)
        if deadline is not None and at >= deadline:
            outputs.extend(self._deliver(ClockTick(deadline)))
        outputs.extend(self._deliver(event))
        return outputs

    def feed_action(self, action: UserAction, timestamp_ms: int) -> list[OutputEvent]:
        return self.feed(UserActionEvent(action, timestamp_ms))

    def flush(self) -> list[OutputEvent]:
        """Resolve a pending click that the input stream left hanging."""
        deadline = pending_deadline(self.state)
        if deadline is None:
            return []
        return self._deliver(ClockTick(deadline))

    def run_events(self, events: Iterable[UserActionEvent]) -> list[OutputEvent]:
        outputs: list[OutputEvent] = []
        for event in events:
            outputs.extend(self.feed(event))
        outputs.extend(self.flush())
        return outputs

"""WebSocket gateway: one engine session shared by any number of UI
clients.

Clients send action/config frames; the server owns the engine, stamps
client actions with its own logical clock (so the 4-second click window
is authoritative server-side), and pushes full-state snapshots after
every dispatch plus one frame per output event.  Snapshots carry
everything a renderer needs -- clients hold no engine logic.

All engine access happens on one consumer task; connections only enqueue.
"""

from __future__ import annotations

import asyncio
import json
import time
from dataclasses import replace
from typing import Callable

from websockets.asyncio.server import serve as ws_serve

from .actions import ClockTick, UserAction, UserActionEvent
from .dispatch import (
    EngineState,
    MockDesktop,
    Session,
    canonical_line,
    pending_deadline,
    transition_cues,
)
from .hierarchy import node_at
from .keyboard import PredictionSlot, predict
from .pointer import initial_pointer
from .profiles import Profile

ACTION_NAMES = {action.value: action for action in UserAction}


def snapshot_payload(state: EngineState, desktop: MockDesktop, seq: int) -> dict:
    """Full render state: the UI is a pure function of this document."""
    level = node_at(state.layout, state.cursor.path)
    labels: list[str] = []
    disabled: list[int] = []
    candidates = None
    for index, child in enumerate(level.children or ()):
        label = child.label
        if child.is_leaf and isinstance(child.payload, PredictionSlot):
            if candidates is None:
                candidates = predict(state.prefix, state.profile.dictionary, 6)
            if child.payload.rank < len(candidates):
                label = candidates[child.payload.rank]
            else:
                disabled.append(index)
        labels.append(label)
    breadcrumb = []
    node = state.layout
    for index in state.cursor.path:
        node = (node.children or ())[index]
        breadcrumb.append(node.label)

    pointer = state.pointer
    rect = pointer.current
    return {
        "type": "snapshot",
        "seq": seq,
        "mode": state.mode,
        "keyboard": {
            "labels": labels,
            "highlighted": state.cursor.selected,
            "breadcrumb": breadcrumb,
            "disabled": disabled,
        },
        "pointer": {
            "rect": {"x": rect.x, "y": rect.y, "w": rect.w, "h": rect.h},
            "highlighted": pointer.highlighted,
            "depth": pointer.depth,
            "max_depth": pointer.max_depth,
            "phase": "pending_click" if pointer.pending else "navigating",
            "deadline_ms": pointer.deadline_ms,
        },
        "prefix": state.prefix,
        "sounds": dict(state.profile.sounds),
        "desktop": {
            "screen": {"w": desktop.screen.w, "h": desktop.screen.h},
            "focused_app": desktop.focused_app,
            "icons": {
                name: {"x": r.x, "y": r.y, "w": r.w, "h": r.h}
                for name, r in desktop.icons.items()
            },
            "text_buffer": desktop.text_buffer,
        },
    }


def _monotonic_ms() -> int:
    return int(time.monotonic() * 1000)


class GatewayServer:
    """Serves one session over WebSocket text frames (one JSON per frame).

    ``clock`` supplies logical milliseconds; tests inject a deterministic
    one, live use defaults to the monotonic clock.
    """

    def __init__(
        self,
        profile: Profile,
        desktop: MockDesktop,
        host: str = "127.0.0.1",
        port: int = 0,
        clock: Callable[[], int] | None = None,
    ):
        self.session = Session(profile, desktop)
        self.host = host
        self.port = port
        self.clock = clock or _monotonic_ms
        self._last_now = 0  # updated at each stamped dispatch
        self.seq = 0
        self._clients: set = set()
        self._queue: asyncio.Queue = asyncio.Queue()
        self._server = None
        self._consumer: asyncio.Task | None = None
        self._tick_timer: asyncio.TimerHandle | None = None

    # -- lifecycle

    async def start(self) -> None:
        self._server = await ws_serve(self._handle_client, self.host, self.port)
        self._consumer = asyncio.create_task(self._consume())

    @property
    def bound_port(self) -> int:
        return self._server.sockets[0].getsockname()[1]

    async def stop(self) -> None:
        if self._tick_timer:
            self._tick_timer.cancel()
        if self._consumer:
            self._consumer.cancel()
        if self._server:
            self._server.close()
            await self._server.wait_closed()

    # -- client side

    async def _handle_client(self, websocket) -> None:
        self._clients.add(websocket)
        try:
            await websocket.send(self._snapshot_frame())
            async for raw in websocket:
                await self._on_message(websocket, raw)
        except Exception:
            pass
        finally:
            self._clients.discard(websocket)

    async def _on_message(self, websocket, raw: str) -> None:
        try:
            message = json.loads(raw)
        except json.JSONDecodeError:
            await self._error(websocket, "frame is not valid JSON", raw)
            return
        kind = message.get("type")
        if kind == "action":
            action = ACTION_NAMES.get(message.get("action"))
            if action is None:
                await self._error(websocket, "unknown action", message)
                return
            await self._queue.put(("action", action))
        elif kind == "config":
            await self._queue.put(("config", message))
        else:
            await self._error(websocket, "unknown message type", message)

    async def _error(self, websocket, reason: str, payload) -> None:
        frame = json.dumps(
            {"type": "error", "message": reason, "payload": payload}, sort_keys=True
        )
        await websocket.send(frame)

    # -- engine side (single consumer)

    async def _consume(self) -> None:
        while True:
            kind, payload = await self._queue.get()
            before = self.session.state
            if kind == "action":
                self._last_now = self.clock()
                outputs = self.session.feed(UserActionEvent(payload, self._last_now))
            elif kind == "tick":
                self._last_now = payload
                outputs = self._due_tick(payload)
            else:
                self._apply_config(payload)
                outputs = []
            cues = transition_cues(before, self.session.state, outputs)
            await self._broadcast_state(outputs, cues)
            self._arm_tick_timer()

    def _due_tick(self, deadline: int):
        if pending_deadline(self.session.state) != deadline:
            return []  # the window was resolved or cancelled meanwhile
        return self.session.feed(ClockTick(deadline))

    def _apply_config(self, message: dict) -> None:
        depth = message.get("pointer_max_depth")
        if isinstance(depth, int) and depth >= 1:
            state = self.session.state
            self.session.state = replace(
                state, pointer=initial_pointer(state.screen, depth)
            )
        profile_path = message.get("profile_path")
        if isinstance(profile_path, str):
            from .dispatch import init_state
            from .profiles import load_profile

            try:
                profile = load_profile(profile_path)
            except Exception:
                return  # bad reference: keep the running profile
            desktop = self.session.desktop
            self.session.state = init_state(profile, desktop.screen, desktop.focused_app)

    def _arm_tick_timer(self) -> None:
        if self._tick_timer:
            self._tick_timer.cancel()
            self._tick_timer = None
        deadline = pending_deadline(self.session.state)
        if deadline is None:
            return
        # Delay relative to the last stamped time: never samples the clock,
        # so injected deterministic clocks see one draw per action.
        delay_s = max(0.0, (deadline - self._last_now) / 1000.0)
        loop = asyncio.get_running_loop()
        self._tick_timer = loop.call_later(
            delay_s, lambda: self._queue.put_nowait(("tick", deadline))
        )

    async def _broadcast_state(self, outputs, cues: list[str]) -> None:
        start = len(self.session.event_log) - len(outputs)
        frames = []
        for offset in range(len(outputs)):
            frames.append(
                json.dumps(
                    {"type": "output", "event": json.loads(self.session.event_log[start + offset])},
                    sort_keys=True,
                )
            )
        frames.extend(
            json.dumps({"type": "cue", "event": cue}, sort_keys=True) for cue in cues
        )
        frames.append(self._snapshot_frame())
        for client in list(self._clients):
            for frame in frames:
                try:
                    await client.send(frame)
                except Exception:
                    self._clients.discard(client)
                    break

    def _snapshot_frame(self) -> str:
        self.seq += 1
        payload = snapshot_payload(self.session.state, self.session.desktop, self.seq)
        return json.dumps(payload, sort_keys=True)


async def serve(
    profile: Profile,
    desktop: MockDesktop,
    host: str = "127.0.0.1",
    port: int = 7070,
    clock: Callable[[], int] | None = None,
) -> GatewayServer:
    """Start a gateway; returns once it is accepting connections."""
    server = GatewayServer(profile, desktop, host, port, clock)
    await server.start()
    return server

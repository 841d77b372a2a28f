from __future__ import annotations

import asyncio
import json

from websockets.asyncio.client import connect

from mindsim.actions import UserAction
from mindsim.dispatch import MockDesktop, Session
from mindsim.gateway import GatewayServer, snapshot_payload
from mindsim.hierarchy import minimal_action_sequence
from mindsim.pointer import ScreenRect

HD = ScreenRect(0, 0, 1920, 1080)


def fake_clock(step_ms: int = 100):
    state = {"now": 0}

    def clock() -> int:
        state["now"] += step_ms
        return state["now"]

    return clock


async def recv_json(websocket):
    return json.loads(await websocket.recv())


async def recv_until(websocket, kind: str):
    """Collect frames until one of ``kind`` arrives; returns (frame, seen)."""
    seen = []
    while True:
        frame = await asyncio.wait_for(recv_json(websocket), timeout=5)
        seen.append(frame)
        if frame["type"] == kind:
            return frame, seen


def run_gateway(test_coro_factory, profile, icons=None):
    async def main():
        desktop = MockDesktop(HD, icons=icons or {})
        server = GatewayServer(profile, desktop, port=0, clock=fake_clock())
        await server.start()
        try:
            uri = f"ws://127.0.0.1:{server.bound_port}"
            return await test_coro_factory(server, uri)
        finally:
            await server.stop()

    return asyncio.run(main())


def test_connect_sends_full_snapshot(profile):
    async def scenario(server, uri):
        async with connect(uri) as ws:
            frame = await recv_json(ws)
            assert frame["type"] == "snapshot"
            assert frame["mode"] == "keyboard"
            assert frame["keyboard"]["labels"] == [
                "letters",
                "numbers",
                "symbols",
                "shortcuts",
                "desktop",
            ]
            assert frame["pointer"]["max_depth"] == 7
            assert frame["desktop"]["focused_app"] == "desktop"
            assert frame["sounds"]["click"] == "click.wav"

    run_gateway(scenario, profile)


def test_scroll_advances_snapshot_highlight(profile):
    async def scenario(server, uri):
        async with connect(uri) as ws:
            first = await recv_json(ws)
            await ws.send(json.dumps({"type": "action", "action": "scroll"}))
            snapshot, _ = await recv_until(ws, "snapshot")
            assert snapshot["keyboard"]["highlighted"] == 1
            assert snapshot["seq"] > first["seq"]

    run_gateway(scenario, profile)


def test_nonsense_message_keeps_session_alive(profile):
    async def scenario(server, uri):
        async with connect(uri) as ws:
            await recv_json(ws)
            await ws.send(json.dumps({"type": "nonsense"}))
            error = await recv_json(ws)
            assert error["type"] == "error"
            assert error["payload"] == {"type": "nonsense"}
            await ws.send(json.dumps({"type": "action", "action": "scroll"}))
            snapshot, _ = await recv_until(ws, "snapshot")
            assert snapshot["keyboard"]["highlighted"] == 1

    run_gateway(scenario, profile)


def test_two_clients_see_identical_snapshots(profile):
    async def scenario(server, uri):
        async with connect(uri) as a, connect(uri) as b:
            await recv_json(a)
            await recv_json(b)
            for action in ("scroll", "zoom_in", "scroll"):
                await a.send(json.dumps({"type": "action", "action": action}))
            seen_a = (await recv_until(a, "snapshot"))[1]
            # drain until b catches up to the same number of snapshots
            snaps_a = [f for f in seen_a if f["type"] == "snapshot"]
            while len(snaps_a) < 3:
                more, seen = await recv_until(a, "snapshot")
                snaps_a.append(more)
            snaps_b = []
            while len(snaps_b) < 3:
                frame, seen = await recv_until(b, "snapshot")
                snaps_b.append(frame)
            assert snaps_a[:3] == snaps_b[:3]

    run_gateway(scenario, profile)


def test_snapshot_seq_strictly_increases(profile):
    async def scenario(server, uri):
        async with connect(uri) as ws:
            first = await recv_json(ws)
            seqs = [first["seq"]]
            for _ in range(6):
                await ws.send(json.dumps({"type": "action", "action": "zoom_in"}))
            while len(seqs) < 7:
                frame = await recv_json(ws)
                if frame["type"] == "snapshot":
                    seqs.append(frame["seq"])
            assert seqs == sorted(seqs)
            assert len(set(seqs)) == len(seqs)

    run_gateway(scenario, profile)


def test_gateway_event_log_matches_headless(profile):
    """The same scripted actions, driven through the socket, must produce
    the dispatcher event log a direct feed produces."""
    script = minimal_action_sequence(profile.default_layout, (0, 0, 1))  # types 'b'
    script = script + minimal_action_sequence(profile.default_layout, (4, 0, 0))
    script = script + [UserAction.ZOOM_IN, UserAction.ZOOM_IN, UserAction.ZOOM_IN]

    async def scenario(server, uri):
        async with connect(uri) as ws:
            await recv_json(ws)
            for action in script:
                await ws.send(json.dumps({"type": "action", "action": action.value}))
                await recv_until(ws, "snapshot")
            return list(server.session.event_log)

    gateway_log = run_gateway(scenario, profile)

    headless = Session(profile, MockDesktop(HD))
    clock = fake_clock()
    for action in script:
        headless.feed_action(action, clock())
    assert gateway_log == headless.event_log
    assert any('"key":"b"' in line for line in gateway_log)


def test_config_changes_pointer_depth(profile):
    async def scenario(server, uri):
        async with connect(uri) as ws:
            await recv_json(ws)
            await ws.send(json.dumps({"type": "config", "pointer_max_depth": 3}))
            snapshot, _ = await recv_until(ws, "snapshot")
            assert snapshot["pointer"]["max_depth"] == 3

    run_gateway(scenario, profile)


def test_config_switches_profile(profile, tmp_path):
    import dataclasses

    from mindsim.profiles import bundled_profile_path, save_profile

    import shutil

    data_dir = tmp_path / "data"
    shutil.copytree(bundled_profile_path().parent, data_dir)
    shallow = dataclasses.replace(profile, pointer_max_depth=4, user_id="other")
    save_profile(shallow, data_dir / "other.json")

    async def scenario(server, uri):
        async with connect(uri) as ws:
            await recv_json(ws)
            message = {"type": "config", "profile_path": str(data_dir / "other.json")}
            await ws.send(json.dumps(message))
            snapshot, _ = await recv_until(ws, "snapshot")
            assert snapshot["pointer"]["max_depth"] == 4
            # a dangling path must not kill the session or the profile
            await ws.send(json.dumps({"type": "config", "profile_path": "/nope.json"}))
            snapshot, _ = await recv_until(ws, "snapshot")
            assert snapshot["pointer"]["max_depth"] == 4

    run_gateway(scenario, profile)


def test_unbound_prediction_slots_marked_disabled(profile):
    # at the prediction level with an empty prefix, all six slots are bound
    state_session = Session(profile, MockDesktop(HD))
    for action in minimal_action_sequence(profile.default_layout, (3, 0, 0))[:-1]:
        state_session.feed_action(action, 0)
    payload = snapshot_payload(state_session.state, state_session.desktop, 1)
    assert payload["keyboard"]["disabled"] == []
    assert payload["keyboard"]["labels"][0] == "the"  # top candidate previewed

    # 'thi' leaves only two candidates: slots 2..5 disabled
    typed = Session(profile, MockDesktop(HD))
    for key_path in [(0, 3, 1), (0, 1, 1), (0, 1, 2)]:  # t, h, i
        for action in minimal_action_sequence(profile.default_layout, key_path):
            typed.feed_action(action, 0)
    assert typed.state.prefix == "thi"
    for action in minimal_action_sequence(profile.default_layout, (3, 0, 0))[:-1]:
        typed.feed_action(action, 0)
    payload = snapshot_payload(typed.state, typed.desktop, 1)
    assert payload["keyboard"]["disabled"] == [2, 3, 4, 5]
    assert payload["keyboard"]["labels"][:2] == ["this", "think"]


def test_pending_click_deadline_in_snapshot(profile):
    async def scenario(server, uri):
        async with connect(uri) as ws:
            await recv_json(ws)
            # enter pointer mode: scroll x4 + zoom x3
            for action in ["scroll"] * 4 + ["zoom_in"] * 3:
                await ws.send(json.dumps({"type": "action", "action": action}))
                await recv_until(ws, "snapshot")
            await ws.send(json.dumps({"type": "config", "pointer_max_depth": 1}))
            await recv_until(ws, "snapshot")
            await ws.send(json.dumps({"type": "action", "action": "zoom_in"}))
            await recv_until(ws, "snapshot")  # descend to depth 1 = max
            await ws.send(json.dumps({"type": "action", "action": "zoom_in"}))
            snapshot, _ = await recv_until(ws, "snapshot")
            assert snapshot["pointer"]["phase"] == "pending_click"
            assert snapshot["pointer"]["deadline_ms"] is not None
            # double click: a second zoom-in inside the window
            await ws.send(json.dumps({"type": "action", "action": "zoom_in"}))
            frame, seen = await recv_until(ws, "snapshot")
            outputs = [f for f in seen if f["type"] == "output"]
            assert any(o["event"].get("click") == "double" for o in outputs)

    run_gateway(scenario, profile)


def test_single_click_fires_from_server_timer(profile, monkeypatch):
    """With no further input, the armed window resolves to a single click
    via the server's own timer."""
    import mindsim.pointer as pointer_mod

    monkeypatch.setattr(pointer_mod, "CLICK_WINDOW_MS", 150)

    async def scenario(server, uri):
        async with connect(uri) as ws:
            await recv_json(ws)
            await ws.send(json.dumps({"type": "config", "pointer_max_depth": 1}))
            await recv_until(ws, "snapshot")
            # keyboard -> pointer, then descend to max depth and arm
            for action in ["scroll"] * 4 + ["zoom_in"] * 3 + ["zoom_in", "zoom_in"]:
                await ws.send(json.dumps({"type": "action", "action": action}))
                await recv_until(ws, "snapshot")
            # no more input: the timer must deliver the single click
            while True:
                frame = await asyncio.wait_for(recv_json(ws), timeout=5)
                if frame["type"] == "output" and frame["event"].get("kind") == "click":
                    assert frame["event"]["click"] == "single"
                    return

    run_gateway(scenario, profile)


def test_keyboard_typing_through_gateway_updates_desktop(profile):
    async def scenario(server, uri):
        async with connect(uri) as ws:
            await recv_json(ws)
            for action in minimal_action_sequence(profile.default_layout, (0, 0, 0)):
                await ws.send(json.dumps({"type": "action", "action": action.value}))
                await recv_until(ws, "snapshot")
            return server.session.desktop.text_buffer

    buffer = run_gateway(scenario, profile)
    assert buffer == "a"

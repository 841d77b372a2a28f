from __future__ import annotations

from mindsim.actions import UserAction, UserActionEvent
from mindsim.dispatch import (
    ClickOut,
    KeyPress,
    KeySequenceOut,
    MockDesktop,
    ModeSwitched,
    Session,
    apply_to_desktop,
    canonical_line,
    dispatch,
    init_state,
    on_focus_change,
)
from mindsim.hierarchy import minimal_action_sequence
from mindsim.pointer import ScreenRect

SCROLL, ZOOM_IN, ZOOM_OUT = UserAction.SCROLL, UserAction.ZOOM_IN, UserAction.ZOOM_OUT
HD = ScreenRect(0, 0, 1920, 1080)


def desktop(**kwargs):
    return MockDesktop(HD, **kwargs)


def feed_all(session, actions, start=0, step=100):
    t = start
    outputs = []
    for action in actions:
        outputs.extend(session.feed_action(action, t))
        t += step
    return outputs


def test_oracle_sequence_types_letter(profile):
    session = Session(profile, desktop())
    witness = minimal_action_sequence(profile.default_layout, (0, 0, 0))
    outputs = feed_all(session, witness)
    assert outputs == [KeyPress("a", 200)]
    assert session.desktop.text_buffer == "a"


def test_switch_to_pointer_emits_mode_switch(profile):
    session = Session(profile, desktop())
    witness = minimal_action_sequence(profile.default_layout, (4, 0, 0))
    outputs = feed_all(session, witness)
    assert outputs == [ModeSwitched("pointer", 600)]
    assert session.state.mode == "pointer"


def test_pointer_exit_returns_to_keyboard(profile):
    session = Session(profile, desktop())
    feed_all(session, minimal_action_sequence(profile.default_layout, (4, 0, 0)))
    outputs = session.feed_action(ZOOM_OUT, 1000)
    assert outputs == [ModeSwitched("keyboard", 1000)]
    assert session.state.mode == "keyboard"


def test_backspace_on_empty_buffer(profile):
    d = desktop()
    apply_to_desktop(KeyPress("h", 0), d)
    apply_to_desktop(KeyPress("BACKSPACE", 10), d)
    assert d.text_buffer == ""


def test_double_click_focuses_icon_app():
    d = desktop(icons={"mail": ScreenRect(100, 100, 80, 80)})
    apply_to_desktop(ClickOut(140, 140, "double", 0), d)
    assert d.focused_app == "mail"
    assert len(d.click_log) == 1


def test_single_click_outside_icons_keeps_focus():
    d = desktop(icons={"mail": ScreenRect(100, 100, 80, 80)})
    apply_to_desktop(ClickOut(500, 500, "single", 0), d)
    assert d.focused_app == "desktop"
    assert len(d.click_log) == 1


def test_focus_change_switches_layout_and_resets_cursor(profile):
    state = init_state(profile, HD)
    state, _ = dispatch(state, UserActionEvent(SCROLL, 0))
    assert state.cursor.selected == 1
    state = on_focus_change(state, "mediaplayer")
    assert state.cursor.selected == 0 and state.cursor.path == ()
    assert state.layout == profile.app_layouts["mediaplayer"]
    state = on_focus_change(state, "unmapped")
    assert state.layout == profile.default_layout


def test_session_switches_layout_after_focus_click(profile):
    d = desktop(icons={"mediaplayer": ScreenRect(0, 0, 32, 32)})
    session = Session(profile, d)
    # keyboard -> pointer
    feed_all(session, minimal_action_sequence(profile.default_layout, (4, 0, 0)))
    # seven zoom-ins stay in the top-left quadrant covering the icon
    t = 1000
    for _ in range(profile.pointer_max_depth):
        session.feed_action(ZOOM_IN, t)
        t += 100
    session.feed_action(ZOOM_IN, t)  # open click window
    outputs = session.feed_action(ZOOM_IN, t + 500)  # double click
    assert any(isinstance(o, ClickOut) and o.click == "double" for o in outputs)
    assert d.focused_app == "mediaplayer"
    assert session.state.layout == profile.app_layouts["mediaplayer"]


def test_session_injects_tick_for_late_action(profile):
    session = Session(profile, desktop())
    feed_all(session, minimal_action_sequence(profile.default_layout, (4, 0, 0)))
    t = 1000
    for _ in range(profile.pointer_max_depth):
        session.feed_action(ZOOM_IN, t)
        t += 100
    session.feed_action(ZOOM_IN, t)  # pending, deadline t+4000
    outputs = session.feed_action(SCROLL, t + 9000)  # way past the deadline
    clicks = [o for o in outputs if isinstance(o, ClickOut)]
    assert [c.click for c in clicks] == ["single"]
    assert clicks[0].timestamp_ms == t + 4000  # resolved at the deadline


def test_session_flush_resolves_hanging_click(profile):
    session = Session(profile, desktop())
    feed_all(session, minimal_action_sequence(profile.default_layout, (4, 0, 0)))
    session.feed_action(ZOOM_IN, 1000)
    for _ in range(profile.pointer_max_depth):
        session.feed_action(ZOOM_IN, 1000)
    outputs = session.flush()
    assert [o.click for o in outputs if isinstance(o, ClickOut)] == ["single"]


def test_prediction_slot_completes_word(profile):
    state = init_state(profile, HD)
    for key in ("t", "h"):
        state, _ = _emit_key(state, key)
    assert state.prefix == "th"
    # top candidate for 'th' in the bundled dictionary is 'the'
    outputs = []
    for action in minimal_action_sequence(state.layout, (3, 0, 0)):
        state, out = dispatch(state, UserActionEvent(action, 0))
        outputs.extend(out)
    assert outputs == [KeySequenceOut(("e", "SPACE"), "word 1", 0)]
    assert state.prefix == ""  # completion ends the word


def test_unbound_prediction_slot_is_noop(profile):
    state = init_state(profile, HD)
    for key in ("t", "h", "i"):
        state, _ = _emit_key(state, key)
    # only 'this' and 'think' match: the last slot has no candidate
    outputs = []
    for action in minimal_action_sequence(state.layout, (3, 0, 5)):
        state, out = dispatch(state, UserActionEvent(action, 0))
        outputs.extend(out)
    assert outputs == []
    assert state.cursor.path == ()  # emit still reset the cursor


def test_prediction_matches_letterwise_typing(profile):
    direct = init_state(profile, HD)
    d1 = desktop()
    for key in ("t", "h", "e", "SPACE"):
        direct, outputs = _emit_key(direct, key)
        for event in outputs:
            d1.apply(event)

    slot = init_state(profile, HD)
    d2 = desktop()
    for key in ("t", "h"):
        slot, outputs = _emit_key(slot, key)
        for event in outputs:
            d2.apply(event)
    for action in minimal_action_sequence(slot.layout, (3, 0, 0)):
        slot, outputs = dispatch(slot, UserActionEvent(action, 0))
        for event in outputs:
            d2.apply(event)
    assert d1.text_buffer == d2.text_buffer == "the "


def test_prefix_tracking_and_reset(profile):
    state = init_state(profile, HD)
    for key, expected in [("h", "h"), ("e", "he"), ("BACKSPACE", "h"), ("SPACE", "")]:
        state, _ = _emit_key(state, key)
        assert state.prefix == expected


def _emit_key(state, key):
    # drive the engine through the real leaf for the key
    from mindsim.hierarchy import iter_leaves
    from mindsim.keyboard import Keystroke

    for path, leaf in iter_leaves(state.layout):
        if isinstance(leaf.payload, Keystroke) and leaf.payload.key == key:
            outputs = []
            for action in minimal_action_sequence(state.layout, path):
                state, out = dispatch(state, UserActionEvent(action, 0))
                outputs.extend(out)
            return state, outputs
    raise AssertionError(f"no leaf for {key}")


def test_canonical_lines_are_stable(profile):
    line = canonical_line(KeyPress("a", 42))
    assert line == '{"key":"a","kind":"key_press","t":42}'
    assert canonical_line(ClickOut(3, 4, "double", 9)) == (
        '{"click":"double","kind":"click","t":9,"x":3,"y":4}'
    )


def test_event_log_determinism(profile):
    def run():
        session = Session(profile, desktop())
        feed_all(
            session,
            minimal_action_sequence(profile.default_layout, (0, 0, 1))
            + minimal_action_sequence(profile.default_layout, (4, 0, 0)),
        )
        session.feed_action(ZOOM_IN, 5000)
        session.flush()
        return "\n".join(session.event_log)

    assert run() == run()


def test_cancel_at_root_logged(profile):
    session = Session(profile, desktop())
    outputs = session.feed_action(ZOOM_OUT, 5)
    assert [canonical_line(o) for o in outputs] == ['{"kind":"cancelled","t":5}']

"""Independent shortest-sequence oracle for small task instances.

This is a plain breadth-first search over the engine driven through
``dispatch`` as a black box: no distance fields, no per-goal
decomposition, no knowledge of how the production planner works.  Ticks
resolve pending clicks at zero action cost (0-1 BFS).  Used by the test
suite to cross-check ``plan_optimal`` on instances small enough to
enumerate.

Supports goal predicates over outputs only (typed keys, macros, clicks),
which covers every goal kind except focus changes; keep instances free of
FocusApp goals so the active layout never changes mid-search.
"""

from __future__ import annotations

from collections import deque

from mindsim.actions import ClockTick, UserAction, UserActionEvent
from mindsim.dispatch import (
    CancelledOut,
    ClickOut,
    KeyPress,
    KeySequenceOut,
    ModeSwitched,
    dispatch,
    init_state,
    pending_deadline,
)
from mindsim.harness import ClickPoint, InvokeShortcut, TaskScript, TypeText, _key_for_char


def required_outputs(script: TaskScript, tolerance: int):
    """Predicates over output events, in completion order."""
    predicates = []
    for goal in script.goals:
        if isinstance(goal, TypeText):
            for char in goal.text:
                key = _key_for_char(char)
                predicates.append(
                    lambda e, key=key: isinstance(e, KeyPress) and e.key == key
                )
        elif isinstance(goal, InvokeShortcut):
            predicates.append(
                lambda e, name=goal.name: isinstance(e, KeySequenceOut) and e.label == name
            )
        elif isinstance(goal, ClickPoint):
            kind = "double" if goal.double else "single"
            predicates.append(
                lambda e, goal=goal, kind=kind: isinstance(e, ClickOut)
                and e.click == kind
                and max(abs(e.x - goal.x), abs(e.y - goal.y)) <= tolerance
            )
        else:
            raise ValueError(f"naive search cannot handle {goal!r}")
    return predicates


def _state_key(state, progress: int):
    return (
        state.mode,
        state.cursor.path,
        state.cursor.selected,
        state.pointer.quadrants,
        state.pointer.highlighted,
        state.pointer.pending,
        progress,
    )


def naive_minimal_actions(script: TaskScript, profile, tolerance: int, state_cap: int = 200_000) -> int:
    """Length of the shortest action sequence emitting all required
    outputs in order, with no other engine output in between."""
    from dataclasses import replace

    predicates = required_outputs(script, tolerance)
    state = init_state(profile, script.screen, script.initial_app)
    if script.initial_mode == "pointer":
        state = replace(state, mode="pointer")

    start = (_state_key(state, 0), state, 0)
    best = {start[0]: 0}
    queue = deque([start])
    while queue:
        key, state, progress = queue.popleft()
        cost = best[key]
        if progress == len(predicates):
            return cost
        if len(best) > state_cap:
            raise RuntimeError("instance too large for the naive search")

        moves = []
        deadline = pending_deadline(state)
        if deadline is not None:
            moves.append((ClockTick(deadline), 0))
            now = deadline - 1  # acting within the click window
        else:
            now = 1_000_000 * (cost + 1)  # any increasing stamp works
        for action in UserAction:
            moves.append((UserActionEvent(action, now), 1))

        for event, weight in moves:
            nxt, outputs = dispatch(state, event)
            nxt_progress = progress
            dead_branch = False
            for output in outputs:
                if isinstance(output, (ModeSwitched, CancelledOut)):
                    continue  # benign: no desktop effect
                if nxt_progress < len(predicates) and predicates[nxt_progress](output):
                    nxt_progress += 1
                else:
                    dead_branch = True
                    break
            if dead_branch:
                continue
            nxt_key = _state_key(nxt, nxt_progress)
            nxt_cost = cost + weight
            if nxt_key not in best or nxt_cost < best[nxt_key]:
                best[nxt_key] = nxt_cost
                if weight == 0:
                    queue.appendleft((nxt_key, nxt, nxt_progress))
                else:
                    queue.append((nxt_key, nxt, nxt_progress))
    raise RuntimeError("goals unreachable in naive search")

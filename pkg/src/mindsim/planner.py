"""Exact shortest-plan search over the engine's state graph.

Plans are computed per required output (a keystroke, a macro, a mode
switch, a click) with a breadth-first search over the real transition
graph of the active device; no closed-form shortcuts.  Because every
output emission lands the engine in a canonical state (emits reset the
cursor to the root, clicks reset the pointer to the full screen),
concatenating per-output shortest segments yields a globally shortest
sequence; the test suite cross-checks this against an independent naive
search driven through ``dispatch``.

Distance tables are built by a backward breadth-first search from the
goal states, so replanning from an arbitrary mid-navigation state (the
noisy-user case) is a table lookup instead of a fresh search.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Union

from .actions import UserAction
from .errors import PlanningError
from .hierarchy import LayoutNode, NavCursor, iter_leaves
from .keyboard import KeySequence, Keystroke, SwitchToPointer
from .pointer import PointerState, ScreenRect, subdivide

SCROLL, ZOOM_IN, ZOOM_OUT = UserAction.SCROLL, UserAction.ZOOM_IN, UserAction.ZOOM_OUT

#: Plan step that waits for the pending-click deadline instead of acting.
WAIT_FOR_TICK = "wait_for_tick"

PlanStep = Union[UserAction, str]


def count_actions(plan: Iterable[PlanStep]) -> int:
    return sum(1 for step in plan if isinstance(step, UserAction))


# --------------------------------------------------------------------------
# keyboard navigation field


class KeyboardField:
    """Shortest-distance table for emitting one of ``target_leaves``.

    States are (path, selected) pairs over the layout's internal nodes.
    Leaf emissions other than the targets are excluded: selecting a wrong
    leaf would type a wrong key.  The zoom-out-at-root edge (a benign
    cancel) is kept: it snaps the highlight back to the first group.
    """

    def __init__(self, layout: LayoutNode, target_leaves: frozenset[tuple[int, ...]]):
        if not target_leaves:
            raise PlanningError("no target leaves")
        self.layout = layout
        self.targets = target_leaves
        self._fanout: dict[tuple[int, ...], int] = {}
        self._internal: set[tuple[int, ...]] = set()

        def walk(node: LayoutNode, path: tuple[int, ...]) -> None:
            if node.is_leaf:
                return
            self._internal.add(path)
            self._fanout[path] = len(node.children or ())
            for index, child in enumerate(node.children or ()):
                walk(child, path + (index,))

        walk(layout, ())
        self.dist: dict[tuple[tuple[int, ...], int], int] = {}
        frontier: deque[tuple[tuple[int, ...], int]] = deque()
        for leaf in target_leaves:
            state = (leaf[:-1], leaf[-1])
            if state[0] not in self._internal or leaf[-1] >= self._fanout[state[0]]:
                raise PlanningError(f"target leaf {leaf} not in layout")
            if self.dist.get(state) != 1:
                self.dist[state] = 1  # zoom-in emits from here
                frontier.append(state)

        while frontier:
            state = frontier.popleft()
            for previous in self._predecessors(state):
                if previous not in self.dist:
                    self.dist[previous] = self.dist[state] + 1
                    frontier.append(previous)

    def _predecessors(self, state: tuple[tuple[int, ...], int]):
        path, selected = state
        fanout = self._fanout[path]
        yield (path, (selected - 1) % fanout)  # scroll
        if selected == 0 and path and path in self._internal:
            yield (path[:-1], path[-1])  # zoom-in descended here
        if selected == 0 and not path:
            # cancel at root resets the highlight
            for other in range(1, fanout):
                yield ((), other)
        child = path + (selected,)
        if child in self._internal:
            for other in range(self._fanout[child]):
                yield (child, other)  # zoom-out ascended here

    def plan_from(self, cursor: NavCursor) -> list[PlanStep]:
        state = (cursor.path, cursor.selected)
        if state not in self.dist:
            raise PlanningError(f"no route from cursor {cursor} to {sorted(self.targets)}")
        steps: list[PlanStep] = []
        while True:
            path, selected = state
            if self.dist[state] == 1:
                steps.append(ZOOM_IN)
                return steps
            for action, nxt in self._forward(state):
                if self.dist.get(nxt, 0) == self.dist[state] - 1:
                    steps.append(action)
                    state = nxt
                    break
            else:
                raise PlanningError("distance field is inconsistent")

    def _forward(self, state: tuple[tuple[int, ...], int]):
        path, selected = state
        child = path + (selected,)
        if child in self._internal:
            yield ZOOM_IN, (child, 0)
        yield SCROLL, (path, (selected + 1) % self._fanout[path])
        if path:
            yield ZOOM_OUT, (path[:-1], path[-1])
        else:
            yield ZOOM_OUT, ((), 0)


class _LeafIndex:
    """Per-layout lookup tables from payload to leaf paths."""

    def __init__(self, layout: LayoutNode):
        self.keys: dict[str, set[tuple[int, ...]]] = {}
        self.macros: dict[str, set[tuple[int, ...]]] = {}
        self.switches: set[tuple[int, ...]] = set()
        for path, leaf in iter_leaves(layout):
            if isinstance(leaf.payload, Keystroke):
                self.keys.setdefault(leaf.payload.key, set()).add(path)
            elif isinstance(leaf.payload, KeySequence):
                self.macros.setdefault(leaf.label, set()).add(path)
            elif isinstance(leaf.payload, SwitchToPointer):
                self.switches.add(path)


# Caches are keyed by layout object identity; the indexed layout is held
# in the value, so a live cache entry can never alias a collected tree.
_leaf_indexes: dict[int, tuple[LayoutNode, _LeafIndex]] = {}
_keyboard_fields: dict[tuple, tuple[LayoutNode, KeyboardField]] = {}
_pointer_fields: dict[tuple, PointerField] = {}


def _leaf_index(layout: LayoutNode) -> _LeafIndex:
    entry = _leaf_indexes.get(id(layout))
    if entry is None or entry[0] is not layout:
        entry = (layout, _LeafIndex(layout))
        _leaf_indexes[id(layout)] = entry
    return entry[1]


def keyboard_field(layout: LayoutNode, targets: frozenset) -> KeyboardField:
    key = (id(layout), targets)
    entry = _keyboard_fields.get(key)
    if entry is None or entry[0] is not layout:
        entry = (layout, KeyboardField(layout, targets))
        _keyboard_fields[key] = entry
    return entry[1]


def pointer_field(
    screen: ScreenRect, max_depth: int, targets: frozenset
) -> PointerField:
    key = (screen, max_depth, targets)
    if key not in _pointer_fields:
        _pointer_fields[key] = PointerField(screen, max_depth, targets)
    return _pointer_fields[key]


def leaves_for_key(layout: LayoutNode, key: str) -> frozenset[tuple[int, ...]]:
    return frozenset(_leaf_index(layout).keys.get(key, ()))


def leaves_for_macro(layout: LayoutNode, label: str) -> frozenset[tuple[int, ...]]:
    return frozenset(_leaf_index(layout).macros.get(label, ()))


def leaves_for_pointer_switch(layout: LayoutNode) -> frozenset[tuple[int, ...]]:
    return frozenset(_leaf_index(layout).switches)


# --------------------------------------------------------------------------
# pointer navigation field


class PointerField:
    """Shortest-distance table for reaching any max-depth rect in
    ``target_paths`` (quadrant index tuples of length ``max_depth``).

    States are (quadrant path, highlighted) pairs; the click itself
    (zoom-in to open the window, plus the optional double zoom-in) is
    appended by the caller.
    """

    def __init__(self, screen: ScreenRect, max_depth: int, target_paths: frozenset[tuple[int, ...]]):
        if not target_paths:
            raise PlanningError("no reachable pointer targets")
        self.screen = screen
        self.max_depth = max_depth
        self.targets = target_paths
        self.dist: dict[tuple[tuple[int, ...], int], int] = {}
        frontier: deque[tuple[tuple[int, ...], int]] = deque()
        for path in target_paths:
            if len(path) != max_depth:
                raise PlanningError(f"target path {path} is not at max depth")
            for highlighted in range(4):
                state = (path, highlighted)
                self.dist[state] = 0
                frontier.append(state)

        while frontier:
            state = frontier.popleft()
            for previous in self._predecessors(state):
                if previous not in self.dist:
                    self.dist[previous] = self.dist[state] + 1
                    frontier.append(previous)

    def _predecessors(self, state: tuple[tuple[int, ...], int]):
        path, highlighted = state
        yield (path, (highlighted - 1) % 4)  # scroll
        if highlighted == 0 and path:
            yield (path[:-1], path[-1])  # zoom-in descended here
        if len(path) < self.max_depth:
            for other in range(4):
                yield (path + (highlighted,), other)  # zoom-out ascended here

    def plan_from(self, path: tuple[int, ...], highlighted: int) -> list[PlanStep]:
        state = (path, highlighted)
        if state not in self.dist:
            raise PlanningError(f"pointer state {state} cannot reach targets")
        steps: list[PlanStep] = []
        while self.dist[state] > 0:
            for action, nxt in self._forward(state):
                if self.dist.get(nxt, -1) == self.dist[state] - 1:
                    steps.append(action)
                    state = nxt
                    break
            else:
                raise PlanningError("pointer distance field is inconsistent")
        return steps

    def _forward(self, state: tuple[tuple[int, ...], int]):
        path, highlighted = state
        if len(path) < self.max_depth:
            yield ZOOM_IN, (path + (highlighted,), 0)
        yield SCROLL, (path, (highlighted + 1) % 4)
        if path:
            yield ZOOM_OUT, (path[:-1], path[-1])


def pointer_targets_containing(
    screen: ScreenRect, max_depth: int, px: int, py: int
) -> frozenset[tuple[int, ...]]:
    """The single max-depth path whose rect contains the point."""
    from .pointer import quadrant_path

    return frozenset({tuple(quadrant_path(screen, px, py, max_depth))})


def pointer_targets_centered_in(
    screen: ScreenRect, max_depth: int, region: ScreenRect
) -> frozenset[tuple[int, ...]]:
    """All max-depth paths whose rect center falls inside ``region``."""
    found: list[tuple[int, ...]] = []

    def overlaps(rect: ScreenRect) -> bool:
        return not (
            rect.x + rect.w <= region.x
            or region.x + region.w <= rect.x
            or rect.y + rect.h <= region.y
            or region.y + region.h <= rect.y
        )

    def walk(rect: ScreenRect, path: tuple[int, ...]) -> None:
        if not overlaps(rect):
            return
        if len(path) == max_depth:
            if region.contains(*rect.center()):
                found.append(path)
            return
        for quadrant in range(4):
            walk(subdivide(rect, quadrant), path + (quadrant,))

    walk(screen, ())
    return frozenset(found)


@dataclass(frozen=True)
class ClickPlanExtras:
    """Actions appended once the target rect is reached."""

    kind: str  # "single" | "double"

    def steps(self) -> list[PlanStep]:
        if self.kind == "double":
            return [ZOOM_IN, ZOOM_IN]
        return [ZOOM_IN, WAIT_FOR_TICK]


def pointer_exit_steps(pointer: PointerState) -> list[PlanStep]:
    """Cancel any pending click, climb to the full screen, and leave."""
    steps: list[PlanStep] = []
    if pointer.pending:
        steps.append(ZOOM_OUT)
    steps.extend([ZOOM_OUT] * pointer.depth)
    steps.append(ZOOM_OUT)  # at depth 0 this switches to the keyboard
    return steps

"""Generic tree navigation shared by the virtual keyboard and pointer.

A cursor walks a layout tree under three actions:

* scroll    -- highlight the next sibling (wraps forward)
* zoom in   -- descend into the highlighted child, or emit a leaf payload
* zoom out  -- ascend one level (restoring the previous highlight), or
               cancel at the root

Emitting a leaf resets the cursor to the root so the next selection starts
from a known state.  ``minimal_actions`` is the exact shortest-sequence
oracle: a breadth-first search over the real transition graph, used by the
task harness and the acceptance suite.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Iterator

from .actions import UserAction
from .errors import InvalidCursorError, LayoutError

LAYOUT_VERSION = 1


@dataclass(frozen=True)
class LayoutNode:
    """Internal node (children) or leaf (payload); never both."""

    label: str
    children: tuple["LayoutNode", ...] | None = None
    payload: Any = None

    def __post_init__(self) -> None:
        if (self.children is None) == (self.payload is None):
            raise LayoutError(f"node {self.label!r} must have children or a payload")

    @property
    def is_leaf(self) -> bool:
        return self.children is None


@dataclass(frozen=True)
class NavCursor:
    path: tuple[int, ...] = ()
    selected: int = 0


ROOT_CURSOR = NavCursor()


@dataclass(frozen=True)
class NavEffect:
    """Result of one action: nothing, an emitted leaf, or a cancel."""

    kind: str  # "none" | "emit" | "cancelled"
    payload: Any = None
    leaf_path: tuple[int, ...] | None = None


EFFECT_NONE = NavEffect("none")
EFFECT_CANCELLED = NavEffect("cancelled")


def node_at(root: LayoutNode, path: tuple[int, ...]) -> LayoutNode:
    node = root
    for index in path:
        if node.children is None or not 0 <= index < len(node.children):
            raise InvalidCursorError(f"path {path} leaves the tree at {node.label!r}")
        node = node.children[index]
    return node


def _level(root: LayoutNode, cursor: NavCursor) -> tuple[LayoutNode, ...]:
    node = node_at(root, cursor.path)
    if node.children is None:
        raise InvalidCursorError(f"cursor path {cursor.path} addresses a leaf")
    if not 0 <= cursor.selected < len(node.children):
        raise InvalidCursorError(
            f"selected {cursor.selected} out of range at {node.label!r}"
        )
    return node.children


def apply_action(
    root: LayoutNode, cursor: NavCursor, action: UserAction
) -> tuple[NavCursor, NavEffect]:
    siblings = _level(root, cursor)

    if action is UserAction.SCROLL:
        return NavCursor(cursor.path, (cursor.selected + 1) % len(siblings)), EFFECT_NONE

    if action is UserAction.ZOOM_IN:
        target = siblings[cursor.selected]
        if target.is_leaf:
            leaf_path = cursor.path + (cursor.selected,)
            return ROOT_CURSOR, NavEffect("emit", target.payload, leaf_path)
        return NavCursor(cursor.path + (cursor.selected,), 0), EFFECT_NONE

    if action is UserAction.ZOOM_OUT:
        if cursor.path:
            return NavCursor(cursor.path[:-1], cursor.path[-1]), EFFECT_NONE
        return ROOT_CURSOR, EFFECT_CANCELLED

    raise InvalidCursorError(f"unknown action {action!r}")


def iter_leaves(root: LayoutNode) -> Iterator[tuple[tuple[int, ...], LayoutNode]]:
    stack: list[tuple[tuple[int, ...], LayoutNode]] = [((), root)]
    while stack:
        path, node = stack.pop()
        if node.is_leaf:
            yield path, node
        else:
            for index in reversed(range(len(node.children or ()))):
                stack.append((path + (index,), node.children[index]))


def minimal_action_sequence(
    root: LayoutNode, target_leaf: tuple[int, ...]
) -> list[UserAction]:
    """Witness for :func:`minimal_actions`: the shortest action sequence
    whose final effect emits the target leaf, found by breadth-first search
    over the exact ``apply_action`` state graph."""
    target = node_at(root, tuple(target_leaf))
    if not target.is_leaf:
        raise LayoutError(f"path {tuple(target_leaf)} is not a leaf")

    start = (ROOT_CURSOR.path, ROOT_CURSOR.selected)
    parents: dict[tuple, tuple[tuple, UserAction] | None] = {start: None}
    queue: deque[tuple] = deque([start])
    goal = tuple(target_leaf)

    while queue:
        state = queue.popleft()
        cursor = NavCursor(*state)
        for action in UserAction:
            nxt, effect = apply_action(root, cursor, action)
            if effect.kind == "emit":
                if effect.leaf_path == goal:
                    sequence = [action]
                    back: tuple | None = state
                    while parents[back] is not None:
                        back, via = parents[back]  # type: ignore[misc]
                        sequence.append(via)
                    sequence.reverse()
                    return sequence
                continue  # emitting any other leaf is a dead branch
            key = (nxt.path, nxt.selected)
            if key not in parents:
                parents[key] = (state, action)
                queue.append(key)
    raise LayoutError(f"leaf {goal} is unreachable")


def minimal_actions(root: LayoutNode, target_leaf: tuple[int, ...]) -> int:
    return len(minimal_action_sequence(root, target_leaf))


@dataclass(frozen=True)
class LayoutConstraints:
    """Fan-out limits per depth plus an optional uniform leaf depth."""

    max_fanout: tuple[int, ...]
    exact_depth: int | None = None


#: Keyboard shape: three levels, up to 5 groups, 5 subgroups, 6 keys.
KEYBOARD_CONSTRAINTS = LayoutConstraints(max_fanout=(5, 5, 6), exact_depth=3)


def validate_layout(root: LayoutNode, constraints: LayoutConstraints) -> list[str]:
    """Collect constraint violations; an empty list means the tree conforms."""
    violations: list[str] = []

    def walk(node: LayoutNode, path: tuple[int, ...]) -> None:
        where = "/".join(str(i) for i in path) or "root"
        if node.is_leaf:
            if constraints.exact_depth is not None and len(path) != constraints.exact_depth:
                violations.append(
                    f"leaf {node.label!r} at {where} has depth {len(path)},"
                    f" expected {constraints.exact_depth}"
                )
            return
        children = node.children or ()
        if not children:
            violations.append(f"group {node.label!r} at {where} has no children")
            return
        depth = len(path)
        if depth < len(constraints.max_fanout):
            limit = constraints.max_fanout[depth]
            if len(children) > limit:
                violations.append(
                    f"group {node.label!r} at {where} has {len(children)} children,"
                    f" limit {limit}"
                )
        elif constraints.exact_depth is not None:
            violations.append(
                f"group {node.label!r} at {where} exceeds depth {constraints.exact_depth}"
            )
        for index, child in enumerate(children):
            walk(child, path + (index,))

    walk(root, ())
    return violations


def layout_to_doc(
    root: LayoutNode, encode_payload: Callable[[Any], Any] = lambda p: p
) -> dict:
    """Serialize a tree to the shared layout document structure."""

    def encode(node: LayoutNode) -> dict:
        if node.is_leaf:
            return {"label": node.label, "payload": encode_payload(node.payload)}
        return {"label": node.label, "children": [encode(c) for c in node.children or ()]}

    return {"layout_version": LAYOUT_VERSION, "root": encode(root)}


def layout_from_doc(
    doc: dict, decode_payload: Callable[[Any], Any] = lambda p: p
) -> LayoutNode:
    if not isinstance(doc, dict):
        raise LayoutError("layout document must be an object")
    version = doc.get("layout_version")
    if version != LAYOUT_VERSION:
        raise LayoutError(f"unsupported layout_version {version!r}")
    if "root" not in doc:
        raise LayoutError("layout document missing 'root'")

    def decode(raw: Any) -> LayoutNode:
        if not isinstance(raw, dict) or "label" not in raw:
            raise LayoutError(f"malformed layout node: {raw!r}")
        has_children = "children" in raw
        has_payload = "payload" in raw
        if has_children == has_payload:
            raise LayoutError(f"node {raw.get('label')!r} must have children or payload")
        if has_children:
            if not isinstance(raw["children"], list):
                raise LayoutError(f"children of {raw['label']!r} must be a list")
            children = tuple(decode(c) for c in raw["children"])
            if not children:
                # Represent the structural breach so validate_layout can report it.
                return LayoutNode(raw["label"], children=(), payload=None)
            return LayoutNode(raw["label"], children=children)
        return LayoutNode(raw["label"], payload=decode_payload(raw["payload"]))

    return decode(doc["root"])


def dumps_layout(root: LayoutNode, encode_payload: Callable[[Any], Any] = lambda p: p) -> str:
    return json.dumps(layout_to_doc(root, encode_payload), indent=2, sort_keys=True) + "\n"

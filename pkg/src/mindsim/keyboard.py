"""The three-level virtual keyboard: payload kinds, the default layout,
layout (de)serialization, and frequency-ranked prefix prediction.

Root groups are ordered letters, numbers, symbols, shortcuts, desktop.
Letters come first because they dominate usage and every scroll away from
the root costs one action; within a group the keys are alphabetical blocks
of six for learnability.  A frequency-optimized layout can ship as an
alternate document; the oracle quantifies the difference.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Union

from .errors import LayoutError, UnboundSlotError
from .hierarchy import (
    KEYBOARD_CONSTRAINTS,
    LayoutNode,
    layout_from_doc,
    layout_to_doc,
    validate_layout,
)

SPACE = "SPACE"
ENTER = "ENTER"
BACKSPACE = "BACKSPACE"

PREDICTION_SLOTS = 6


@dataclass(frozen=True)
class Keystroke:
    """A single character or named key (SPACE, ENTER, BACKSPACE)."""

    key: str


@dataclass(frozen=True)
class KeySequence:
    """An ordered macro of named keys, e.g. a shortcut binding."""

    keys: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.keys:
            raise LayoutError("key sequence must not be empty")


@dataclass(frozen=True)
class SwitchToPointer:
    """Leaf payload that hands control to the pointing device."""


@dataclass(frozen=True)
class PredictionSlot:
    """Completion slot bound at runtime to the rank-th candidate word."""

    rank: int

    def __post_init__(self) -> None:
        if not 0 <= self.rank < PREDICTION_SLOTS:
            raise LayoutError(f"prediction rank must be 0..5, got {self.rank}")


KeyPayload = Union[Keystroke, KeySequence, SwitchToPointer, PredictionSlot]


@dataclass(frozen=True)
class Dictionary:
    """Word -> frequency table backing the prediction slots."""

    entries: dict[str, int]

    def __post_init__(self) -> None:
        for word, count in self.entries.items():
            if not word or word != word.lower():
                raise LayoutError(f"dictionary word {word!r} must be lowercase, non-empty")
            if count <= 0:
                raise LayoutError(f"count for {word!r} must be positive")

    @classmethod
    def from_file(cls, path: str | Path) -> "Dictionary":
        entries: dict[str, int] = {}
        for number, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), 1
        ):
            if not line.strip():
                continue
            try:
                word, count = line.split("\t")
                entries[word] = int(count)
            except ValueError as exc:
                raise LayoutError(f"{path}:{number}: expected word<TAB>count") from exc
        return cls(entries)

    def to_file(self, path: str | Path) -> None:
        lines = [f"{w}\t{c}" for w, c in sorted(self.entries.items())]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def predict(prefix: str, dictionary: Dictionary, k: int) -> list[str]:
    """Up to ``k`` completions of ``prefix``, most frequent first, ties
    broken alphabetically.  An empty prefix ranks the whole dictionary."""
    if k < 1:
        raise ValueError("k must be >= 1")
    needle = prefix.lower()
    matches = [w for w in dictionary.entries if w.startswith(needle)]
    matches.sort(key=lambda w: (-dictionary.entries[w], w))
    return matches[:k]


def resolve_prediction(
    slot_rank: int, current_word_prefix: str, dictionary: Dictionary
) -> KeySequence:
    """Keystrokes completing the slot's candidate: remaining characters
    followed by SPACE.  Raises when the slot has no candidate."""
    if not 0 <= slot_rank < PREDICTION_SLOTS:
        raise UnboundSlotError(f"slot rank {slot_rank} out of range")
    candidates = predict(current_word_prefix, dictionary, PREDICTION_SLOTS)
    if slot_rank >= len(candidates):
        raise UnboundSlotError(
            f"no candidate at rank {slot_rank} for prefix {current_word_prefix!r}"
        )
    word = candidates[slot_rank]
    remaining = word[len(current_word_prefix):]
    return KeySequence(tuple(remaining) + (SPACE,))


def _keys(*keys: str) -> tuple[LayoutNode, ...]:
    return tuple(LayoutNode(k, payload=Keystroke(k)) for k in keys)


def _group(label: str, *children: LayoutNode) -> LayoutNode:
    return LayoutNode(label, children=children)


def default_layout() -> LayoutNode:
    """The bundled keyboard: 5 root groups, each a depth-3 subtree."""
    letters = _group(
        "letters",
        _group("a-f", *_keys("a", "b", "c", "d", "e", "f")),
        _group("g-l", *_keys("g", "h", "i", "j", "k", "l")),
        _group("m-r", *_keys("m", "n", "o", "p", "q", "r")),
        _group("s-x", *_keys("s", "t", "u", "v", "w", "x")),
        _group(
            "y-.",
            LayoutNode("y", payload=Keystroke("y")),
            LayoutNode("z", payload=Keystroke("z")),
            LayoutNode("space", payload=Keystroke(SPACE)),
            LayoutNode("backspace", payload=Keystroke(BACKSPACE)),
            LayoutNode("enter", payload=Keystroke(ENTER)),
            LayoutNode(".", payload=Keystroke(".")),
        ),
    )
    numbers = _group(
        "numbers",
        _group("0-4", *_keys("0", "1", "2", "3", "4")),
        _group("5-9", *_keys("5", "6", "7", "8", "9")),
    )
    symbols = _group(
        "symbols",
        _group("punctuation", *_keys(",", ";", ":", "!", "?", "'")),
        _group("math", *_keys("+", "-", "*", "/", "=", "%")),
        _group("pairs", *_keys("(", ")", "[", "]", "<", ">")),
        _group("misc", *_keys("@", "#", "$", "&", "_", '"')),
    )
    shortcuts = _group(
        "shortcuts",
        _group(
            "predict",
            *(
                LayoutNode(f"word {rank + 1}", payload=PredictionSlot(rank))
                for rank in range(PREDICTION_SLOTS)
            ),
        ),
        _group(
            "edit",
            LayoutNode("COPY", payload=KeySequence(("CTRL", "c"))),
            LayoutNode("PASTE", payload=KeySequence(("CTRL", "v"))),
            LayoutNode("CUT", payload=KeySequence(("CTRL", "x"))),
            LayoutNode("UNDO", payload=KeySequence(("CTRL", "z"))),
            LayoutNode("SELECT_ALL", payload=KeySequence(("CTRL", "a"))),
            LayoutNode("FIND", payload=KeySequence(("CTRL", "f"))),
        ),
        _group(
            "app",
            LayoutNode("SEND", payload=KeySequence(("CTRL", ENTER))),
            LayoutNode("NEW", payload=KeySequence(("CTRL", "n"))),
            LayoutNode("OPEN", payload=KeySequence(("CTRL", "o"))),
            LayoutNode("SAVE", payload=KeySequence(("CTRL", "s"))),
            LayoutNode("CLOSE", payload=KeySequence(("CTRL", "w"))),
            LayoutNode("SEARCH", payload=KeySequence(("CTRL", "e"))),
        ),
    )
    desktop = _group(
        "desktop",
        _group("switch", LayoutNode("pointer", payload=SwitchToPointer())),
    )
    return _group("keyboard", letters, numbers, symbols, shortcuts, desktop)


def media_player_layout() -> LayoutNode:
    """Per-application layout with transport macros for a media player."""
    transport = _group(
        "transport",
        _group(
            "playback",
            LayoutNode("PLAY", payload=KeySequence(("PLAY",))),
            LayoutNode("PAUSE", payload=KeySequence(("PAUSE",))),
            LayoutNode("STOP", payload=KeySequence(("STOP",))),
        ),
        _group(
            "seek",
            LayoutNode("REWIND", payload=KeySequence(("REWIND",))),
            LayoutNode("FORWARD", payload=KeySequence(("FORWARD",))),
        ),
    )
    desktop = _group(
        "desktop",
        _group("switch", LayoutNode("pointer", payload=SwitchToPointer())),
    )
    return _group("mediaplayer", transport, desktop)


def encode_payload(payload: KeyPayload) -> dict:
    if isinstance(payload, Keystroke):
        return {"type": "key", "key": payload.key}
    if isinstance(payload, KeySequence):
        return {"type": "seq", "keys": list(payload.keys)}
    if isinstance(payload, SwitchToPointer):
        return {"type": "pointer"}
    if isinstance(payload, PredictionSlot):
        return {"type": "predict", "rank": payload.rank}
    raise LayoutError(f"unknown payload {payload!r}")


def decode_payload(raw: Any) -> KeyPayload:
    if not isinstance(raw, dict) or "type" not in raw:
        raise LayoutError(f"malformed payload {raw!r}")
    kind = raw["type"]
    if kind == "key":
        return Keystroke(raw["key"])
    if kind == "seq":
        return KeySequence(tuple(raw["keys"]))
    if kind == "pointer":
        return SwitchToPointer()
    if kind == "predict":
        return PredictionSlot(raw["rank"])
    raise LayoutError(f"unknown payload type {kind!r}")


def load_layout(doc: dict | str) -> LayoutNode:
    """Parse and validate a keyboard layout document (dict or JSON text)."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise LayoutError(f"layout is not valid JSON: {exc}") from exc
    tree = layout_from_doc(doc, decode_payload)
    violations = validate_layout(tree, KEYBOARD_CONSTRAINTS)
    if violations:
        raise LayoutError("layout violates keyboard constraints", violations)
    return tree


def load_layout_file(path: str | Path) -> LayoutNode:
    return load_layout(Path(path).read_text(encoding="utf-8"))


def serialize_layout(tree: LayoutNode) -> dict:
    return layout_to_doc(tree, encode_payload)


def save_layout_file(tree: LayoutNode, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(serialize_layout(tree), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )

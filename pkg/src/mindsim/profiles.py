"""Per-user configuration persisted as a single JSON document plus
referenced layout/dictionary files.

Layouts and the dictionary live in their own files (paths relative to the
profile) so they can be shared between users.  Loading is all-or-nothing:
every reference must resolve and validate or the whole load fails.  Saving
is atomic (temp file + rename) and canonical, so two saves of the same
profile are byte-identical.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .actions import UserAction
from .errors import LayoutError, ProfileError
from .hierarchy import LayoutNode
from .keyboard import Dictionary, load_layout_file
from .signals import DetectionConfig

SCHEMA_VERSION = 1

#: Cue names the engine reports; profiles map them to sound asset ids.
SOUND_EVENTS = (
    "level-descend",
    "level-ascend",
    "emit",
    "target-reached",
    "click",
    "cancel",
)


@dataclass(frozen=True)
class Profile:
    user_id: str
    detection: DetectionConfig
    pointer_max_depth: int
    default_layout_ref: str
    app_layout_refs: dict[str, str]
    dictionary_ref: str
    sounds: dict[str, str]
    default_layout: LayoutNode
    app_layouts: dict[str, LayoutNode]
    dictionary: Dictionary
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        if self.pointer_max_depth < 1:
            raise ProfileError("pointer_max_depth must be at least 1")


def layout_for(profile: Profile, app_id: str) -> LayoutNode:
    """The app-specific layout when one is mapped, else the default."""
    return profile.app_layouts.get(app_id, profile.default_layout)


def load_profile(path: str | Path) -> Profile:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ProfileError(f"profile file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ProfileError(f"{path}: not valid JSON: {exc}") from exc

    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ProfileError(f"{path}: unknown schema_version {version!r}")

    base = path.parent

    def resolve(ref: str, what: str) -> Path:
        target = base / ref
        if not target.is_file():
            raise ProfileError(f"{path}: {what} reference {ref!r} does not exist")
        return target

    try:
        detection = DetectionConfig(
            channel_map={
                channel: UserAction(action)
                for channel, action in raw["detection"]["channels"].items()
            },
            thresholds=dict(raw["detection"]["thresholds"]),
            debounce_ms=int(raw["detection"]["debounce_ms"]),
        )
        default_ref = raw["default_layout"]
        app_refs = dict(raw.get("app_layouts", {}))
        dictionary_ref = raw["dictionary"]
        sounds = dict(raw.get("sounds", {}))
        pointer_max_depth = int(raw["pointer_max_depth"])
        user_id = raw["user_id"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ProfileError(f"{path}: malformed profile: {exc!r}") from exc

    try:
        default_layout = load_layout_file(resolve(default_ref, "layout"))
        app_layouts = {
            app: load_layout_file(resolve(ref, "layout")) for app, ref in app_refs.items()
        }
    except LayoutError as exc:
        raise ProfileError(
            f"{path}: layout failed validation: {exc} {exc.violations}"
        ) from exc
    try:
        dictionary = Dictionary.from_file(resolve(dictionary_ref, "dictionary"))
    except LayoutError as exc:
        raise ProfileError(f"{path}: bad dictionary: {exc}") from exc

    return Profile(
        user_id=user_id,
        detection=detection,
        pointer_max_depth=pointer_max_depth,
        default_layout_ref=default_ref,
        app_layout_refs=app_refs,
        dictionary_ref=dictionary_ref,
        sounds=sounds,
        default_layout=default_layout,
        app_layouts=app_layouts,
        dictionary=dictionary,
    )


def save_profile(profile: Profile, path: str | Path) -> None:
    """Write the profile document atomically in canonical form.

    Only references are persisted; layout/dictionary files are owned by
    their own writers.
    """
    path = Path(path)
    document = {
        "schema_version": profile.schema_version,
        "user_id": profile.user_id,
        "detection": {
            "channels": {
                channel: action.value
                for channel, action in sorted(profile.detection.channel_map.items())
            },
            "thresholds": dict(sorted(profile.detection.thresholds.items())),
            "debounce_ms": profile.detection.debounce_ms,
        },
        "pointer_max_depth": profile.pointer_max_depth,
        "default_layout": profile.default_layout_ref,
        "app_layouts": dict(sorted(profile.app_layout_refs.items())),
        "dictionary": profile.dictionary_ref,
        "sounds": dict(sorted(profile.sounds.items())),
    }
    text = json.dumps(document, indent=2, sort_keys=True) + "\n"
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def bundled_profile_path() -> Path:
    """Path of the profile shipped with the package."""
    return Path(__file__).parent / "data" / "default_profile.json"

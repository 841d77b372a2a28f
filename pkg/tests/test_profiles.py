from __future__ import annotations

import json
import shutil

import pytest

from mindsim.errors import ProfileError
from mindsim.keyboard import media_player_layout
from mindsim.profiles import (
    bundled_profile_path,
    layout_for,
    load_profile,
    save_profile,
)


@pytest.fixture
def profile_dir(tmp_path):
    src = bundled_profile_path().parent
    shutil.copytree(src, tmp_path / "data")
    return tmp_path / "data"


def test_bundled_profile_loads(profile):
    assert profile.pointer_max_depth == 7
    assert profile.user_id == "default"
    assert "mediaplayer" in profile.app_layouts


def test_save_load_round_trip(profile, profile_dir):
    target = profile_dir / "copy.json"
    save_profile(profile, target)
    assert load_profile(target) == profile


def test_saves_are_byte_identical(profile, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    save_profile(profile, a)
    save_profile(profile, b)
    assert a.read_bytes() == b.read_bytes()


def test_missing_layout_reference_names_path(profile_dir):
    raw = json.loads((profile_dir / "default_profile.json").read_text())
    raw["default_layout"] = "layouts/ghost.json"
    bad = profile_dir / "bad.json"
    bad.write_text(json.dumps(raw))
    with pytest.raises(ProfileError, match="ghost.json"):
        load_profile(bad)


def test_unknown_schema_version_rejected(profile_dir):
    raw = json.loads((profile_dir / "default_profile.json").read_text())
    raw["schema_version"] = 99
    bad = profile_dir / "bad.json"
    bad.write_text(json.dumps(raw))
    with pytest.raises(ProfileError, match="schema_version"):
        load_profile(bad)


def test_invalid_layout_fails_load(profile_dir):
    layout = json.loads((profile_dir / "layouts" / "default_keyboard.json").read_text())
    group = layout["root"]["children"][0]["children"][0]
    group["children"].append({"label": "extra", "payload": {"type": "key", "key": "!"}})
    (profile_dir / "layouts" / "default_keyboard.json").write_text(json.dumps(layout))
    with pytest.raises(ProfileError, match="validation"):
        load_profile(profile_dir / "default_profile.json")


def test_layout_for_prefers_app_mapping(profile):
    assert layout_for(profile, "mediaplayer") == media_player_layout()


def test_layout_for_falls_back_to_default(profile):
    assert layout_for(profile, "editor") == profile.default_layout
    assert layout_for(profile, "anything") is profile.default_layout


def test_sound_map_loaded(profile):
    assert profile.sounds["target-reached"] == "target.wav"

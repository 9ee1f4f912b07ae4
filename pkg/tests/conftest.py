from __future__ import annotations

from pathlib import Path

import pytest

from hrc.scene import load_scene_file

REPO_ROOT = Path(__file__).resolve().parent.parent
SCENE_PATH = REPO_ROOT / "scenes" / "drywall_fig9.json"
CORPUS_PATH = REPO_ROOT / "corpora" / "incorrect_instructions.yaml"

PANEL_IDS = [501, 502, 503, 504]
STUD_IDS = [601, 602, 603, 604, 605, 606, 607, 608, 609]
DESTINATION_STUD_IDS = [602, 604, 606, 608]


@pytest.fixture
def scene():
    """A fresh reference scene (4 panels, 9 studs, nothing installed)."""
    return load_scene_file(str(SCENE_PATH))


@pytest.fixture
def scene_text():
    return SCENE_PATH.read_text(encoding="utf-8")

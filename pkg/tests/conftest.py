import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fixture_lib import (
    build_music_document,
    build_music_prompts,
    build_recipe_document,
    build_recipe_prompts,
    build_vacation_document,
    music_scripted_fixtures,
)


@pytest.fixture
def music_doc():
    return build_music_document()


@pytest.fixture
def music_prompts():
    return build_music_prompts()


@pytest.fixture
def music_backend():
    from promptloom.backends import ScriptedBackend

    return ScriptedBackend(music_scripted_fixtures())


@pytest.fixture
def recipe_doc():
    return build_recipe_document()


@pytest.fixture
def recipe_prompts():
    return build_recipe_prompts()


@pytest.fixture
def vacation_doc():
    return build_vacation_document()

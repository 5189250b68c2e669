#!/usr/bin/env python3
"""Regenerate the golden CLI reports under tests/golden/.

Run from the repo root after an intentional behavior change:

    python3 scripts/regen_goldens.py

Every golden is produced by `promptloom run` with a deterministic backend
(oracle, or scripted fixtures derived from the failure-injection modes), so
regeneration is reproducible bit for bit.
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

from click.testing import CliRunner

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "tests"))

from promptloom.backends import FAILURE_MODES, inject_failure
from promptloom.cli import main
from promptloom.document import set_text
from promptloom.template import render

from fixture_lib import (
    build_recipe_document,
    build_recipe_prompts,
    write_json,
    write_music_fixture,
    write_recipe_fixture,
)

GOLDEN_DIR = REPO / "tests" / "golden"


def run_cli(args: list[str]) -> None:
    result = CliRunner().invoke(main, args)
    if result.exit_code not in (0, 1):
        raise SystemExit(f"cli failed ({result.exit_code}): {result.output}")


def recipe_failure_fixture(mode: str, directory: Path) -> Path:
    doc = set_text(build_recipe_document(), "ingredients", "spicy, egg, tomato")
    rendered = render(build_recipe_prompts()[0], doc).text
    canned = inject_failure(mode).default_completion
    return write_json(
        directory / f"fixtures_{mode}.json",
        [{"prompt": rendered, "completion": canned}],
    )


def main_():
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        music = write_music_fixture(tmp / "music")
        recipe = write_recipe_fixture(tmp / "recipe")

        run_cli(
            [
                "run",
                "--document", str(music["document"]),
                "--prompts", str(music["prompts"]),
                "--scenario", str(music["scenario"]),
                "--backend", "scripted",
                "--fixtures", str(music["completions"]),
                "--report", str(GOLDEN_DIR / "music_report.json"),
            ]
        )

        run_cli(
            [
                "run",
                "--document", str(recipe["document"]),
                "--prompts", str(recipe["prompts"]),
                "--scenario", str(recipe["scenario"]),
                "--backend", "oracle",
                "--report", str(GOLDEN_DIR / "recipe_oracle_report.json"),
            ]
        )

        for mode in FAILURE_MODES:
            if mode == "timeout":
                continue  # timeouts produce no report content worth freezing
            fixtures = recipe_failure_fixture(mode, tmp)
            run_cli(
                [
                    "run",
                    "--document", str(recipe["document"]),
                    "--prompts", str(recipe["prompts"]),
                    "--scenario", str(recipe["scenario"]),
                    "--backend", "scripted",
                    "--fixtures", str(fixtures),
                    "--report", str(GOLDEN_DIR / f"recipe_{mode}_report.json"),
                ]
            )

    for path in sorted(GOLDEN_DIR.glob("*.json")):
        data = json.loads(path.read_text())
        print(f"{path.name}: runs={len(data['runs'])} findings={len(data['report']['findings'])}")


if __name__ == "__main__":
    main_()

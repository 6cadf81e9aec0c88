"""Shared fixtures: a reusable corpus of small random scenes, the frozen
hand-checked quad scene, and a terminal summary line per acceptance test.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import pytest

from crownmerge import (
    Hierarchy,
    Isol,
    LabeledRaster,
    LinkStore,
    SynthScene,
    agglomerate,
    cast_rays,
    extract_isols,
    generate_random,
)

CORPUS_SIZE = 100


@dataclass(frozen=True)
class SceneBundle:
    """A generated scene with the pipeline stages everyone needs."""

    scene: SynthScene
    isols: list[Isol]
    store: LinkStore
    hierarchy: Hierarchy


def build_bundle(raster: LabeledRaster, scene: SynthScene | None = None) -> SceneBundle:
    isols = extract_isols(raster)
    store = cast_rays(raster, isols)
    return SceneBundle(
        scene=scene, isols=isols, store=store, hierarchy=agglomerate(isols, store)
    )


@pytest.fixture(scope="session")
def corpus() -> list[SceneBundle]:
    """100 random 40x40 scenes with 1..12 segments each."""
    bundles = []
    for seed in range(CORPUS_SIZE):
        scene = generate_random(seed, n_isols=1 + seed % 12, size=40)
        bundles.append(build_bundle(scene.raster, scene))
    return bundles


# Hand-verified 13x7 scene: four 2x2 blocks, five linked pairs, and a
# distance tie on the first merge.  Distances were counted by hand:
# (1,2)=8  (1,3)=6  (1,4)=2  (2,3)=2  (3,4)=3, no (2,4) links at all.
QUAD_GRID = [
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 1, 0, 0, 0, 0, 2, 2, 0, 0, 0, 0],
    [0, 1, 1, 0, 0, 0, 0, 2, 2, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 4, 4, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 4, 4, 0, 0, 0, 3, 3, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 3, 3, 0, 0, 0, 0, 0],
]

QUAD_PAIR_DISTANCES = {(1, 2): 8, (1, 3): 6, (1, 4): 2, (2, 3): 2, (3, 4): 3}


@pytest.fixture(scope="session")
def quad() -> SceneBundle:
    return build_bundle(LabeledRaster.from_array(QUAD_GRID))


# ---------------------------------------------------------------------------
# acceptance summary
# ---------------------------------------------------------------------------

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows: dict[int, tuple[str, str]] = {}
    for status in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(status, []):
            match = _CRITERION.search(getattr(report, "nodeid", ""))
            if match:
                number = int(match.group(1))
                name = match.group(2).replace("_", " ")
                # A later failed phase (teardown) overrides an earlier pass.
                if rows.get(number, ("", "passed"))[1] == "passed":
                    rows[number] = (name, status)
    if not rows:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(rows):
        name, status = rows[number]
        verdict = "PASS" if status == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number} ({name}): {verdict}")

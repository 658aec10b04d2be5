# conftest.py
import os

import pytest
from hypothesis import HealthCheck, settings

import testkit

settings.register_profile("default", max_examples=100, deadline=None)
settings.register_profile(
    "ci", max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def small_cfg():
    """A GenConfig sized for unit tests rather than the full acceptance runs."""
    return testkit.GenConfig(seed=7, max_size=6, cases=40, exhaustive_size=4)


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    # keep CLI runs away from a developer's rewritekit.json and REWRITEKIT_* settings
    for name in ("REWRITEKIT_SEED", "REWRITEKIT_LOG_LEVEL", "REWRITEKIT_LOG_FILE"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)

"""Shared fixtures: the 10-second raw-media fixture, built once per session."""

import pytest

from veracity_adapters import make_fixture


@pytest.fixture(scope="session")
def fixture_media(tmp_path_factory):
    out = tmp_path_factory.mktemp("media")
    return make_fixture(out, seed=0, duration_s=10.0)

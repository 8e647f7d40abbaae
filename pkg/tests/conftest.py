"""Shared fixtures: one session-wide polynomial cache so every expensive
fit (P_9, Q_12, Q_14, Q_20, ...) is computed at most once per run and
reused across test modules."""

import pytest

from thetacert.modpoly import load_or_fit


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    return str(tmp_path_factory.mktemp("polycache"))


@pytest.fixture(scope="session")
def p3(cache_dir):
    return load_or_fit("P", 3, directory=cache_dir)


@pytest.fixture(scope="session")
def p5(cache_dir):
    return load_or_fit("P", 5, directory=cache_dir)


@pytest.fixture(scope="session")
def q6(cache_dir):
    return load_or_fit("Q", 6, directory=cache_dir)


@pytest.fixture(scope="session")
def q10(cache_dir):
    return load_or_fit("Q", 10, directory=cache_dir)


@pytest.fixture(scope="session")
def q12(cache_dir):
    return load_or_fit("Q", 12, directory=cache_dir)


@pytest.fixture(scope="session")
def q20(cache_dir):
    return load_or_fit("Q", 20, directory=cache_dir)

"""Shared fixtures: cached catalog entries and deterministic RNG helpers."""

import functools
import random

import pytest

from superjet import catalog


@functools.lru_cache(maxsize=None)
def cached_entry(entry_id: str):
    return catalog.get(entry_id)


@pytest.fixture(scope="session")
def entry():
    """Accessor for catalog entries, built at most once per session."""
    return cached_entry


@pytest.fixture()
def rng():
    return random.Random(20260824)

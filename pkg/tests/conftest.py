import functools

import pytest

from rank3mod.analyze import run_analysis
from rank3mod.geometry import SpaceSpec, build_space, enumerate_points
from rank3mod.groups import build_group
from rank3mod.modules import PermModule


@functools.cache
def cached_setup(family: str, dim: int, seed: int = 0):
    """(space, points, group) for one instance; shared across tests."""
    spec = SpaceSpec(family, dim)
    space = build_space(spec)
    points = enumerate_points(space)
    group = build_group(space, points, seed=seed)
    return space, points, group


@functools.cache
def cached_pm(family: str, dim: int, ell: int, seed: int = 0) -> PermModule:
    _, points, group = cached_setup(family, dim, seed)
    return PermModule(
        points, ell, [p.on_P for p in group.pairs], [p.on_P0 for p in group.pairs]
    )


@functools.cache
def cached_analysis(family: str, size: int, ell: int, seed: int = 0):
    return run_analysis(family, size, ell, seed=seed)


@pytest.fixture
def setup():
    return cached_setup


@pytest.fixture
def pm_factory():
    return cached_pm


@pytest.fixture
def analysis():
    return cached_analysis

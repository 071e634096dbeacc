"""测试共享的夹具"""

import pytest

from parahyper.catalog import load_builtin
from parahyper.smooth import FDScheme, SamplePlan


@pytest.fixture(scope='session')
def scheme() -> FDScheme:
    return FDScheme()


@pytest.fixture(scope='session')
def plan() -> SamplePlan:
    return SamplePlan(count=5, seed=7)


@pytest.fixture(scope='session')
def catalog(scheme):
    return {entry.id: entry for entry in load_builtin(scheme)}

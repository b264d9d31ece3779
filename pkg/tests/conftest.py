from __future__ import annotations

import pytest

from tests.factories import chain_project, make_project


@pytest.fixture
def chain():
    return chain_project()


@pytest.fixture
def minimal():
    return make_project()

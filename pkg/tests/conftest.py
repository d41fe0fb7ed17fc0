"""Shared fixtures.  The binding table is expensive, so build it once."""

import pytest

from icx import default_binding_table


@pytest.fixture(scope="session")
def table():
    """Process-wide binding table on [-60, 60] with step 0.25."""
    return default_binding_table()

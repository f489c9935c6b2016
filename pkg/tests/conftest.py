import pytest
from hypothesis import HealthCheck, settings

from henselab.series import registry_scope

settings.register_profile(
    "henselab", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("henselab")


@pytest.fixture(autouse=True)
def fresh_registry():
    """Each test sees the 8 default generators; minted ones do not leak."""
    with registry_scope() as reg:
        yield reg

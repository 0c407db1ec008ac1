"""Shared pytest configuration: a deterministic, CI-friendly hypothesis profile."""

from __future__ import annotations

from hypothesis import HealthCheck, settings

from latticeforms.functions import TestFunctionSpec

# the library class is named like a test class; keep pytest from collecting it
TestFunctionSpec.__test__ = False

settings.register_profile(
    "latticeforms",
    deadline=None,
    max_examples=50,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("latticeforms")

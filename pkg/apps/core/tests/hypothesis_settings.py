"""Shared Hypothesis settings for property tests.

Usage:
    from apps.core.tests.hypothesis_settings import STANDARD_SETTINGS

    @given(formula=formulas())
    @STANDARD_SETTINGS
    def test_something(self, formula):
        ...
"""

from hypothesis import HealthCheck, settings

# Parser round trips are cheap, so they get the most examples
ROUND_TRIP_SETTINGS = settings(max_examples=200, deadline=None)

# Semantic properties evaluate formulas on several models per example
STANDARD_SETTINGS = settings(
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)

QUICK_SETTINGS = settings(max_examples=20, deadline=None)

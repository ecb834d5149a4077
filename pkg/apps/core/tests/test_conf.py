"""
Tests for resource limits, the write-once cache and error bodies.
"""

import pytest
from django.core.cache import caches

from apps.core.cache import CACHE_ALIAS, get_or_build
from apps.core.conf import DEFAULT_LIMITS, enforce, limit
from apps.core.exceptions import FormulaSyntaxError, InvalidInputError, ResourceBoundError


class TestLimits:
    """Tests for limit and enforce."""

    def test_settings_value(self, settings):
        settings.GEOMODAL = {"MAX_POINTS": 3}
        assert limit("MAX_POINTS") == 3

    def test_default_when_unset(self, settings):
        settings.GEOMODAL = {}
        assert limit("AM_SEARCH_NODES") == DEFAULT_LIMITS["AM_SEARCH_NODES"]

    def test_override_wins(self, settings):
        settings.GEOMODAL = {"MAX_POINTS": 3}
        assert limit("MAX_POINTS", 6) == 6

    def test_enforce_at_the_bound(self, settings):
        settings.GEOMODAL = {"MAX_POINTS": 3}
        enforce("MAX_POINTS", 3, "Points")

    def test_enforce_above_the_bound(self, settings):
        """Test the error names the limit and the offending value."""
        settings.GEOMODAL = {"MAX_POINTS": 3}
        with pytest.raises(ResourceBoundError) as exc_info:
            enforce("MAX_POINTS", 5, "Points")
        assert exc_info.value.details == {"limit": "MAX_POINTS", "bound": 3, "value": 5}


class TestGetOrBuild:
    """Tests for the write-once cache helper."""

    def setup_method(self):
        caches[CACHE_ALIAS].clear()

    def test_builder_runs_once(self, mocker):
        builder = mocker.Mock(return_value=[1, 2])
        assert get_or_build("carrier", "k", builder) == [1, 2]
        assert get_or_build("carrier", "k", builder) == [1, 2]
        assert builder.call_count == 1

    def test_namespaces_are_separate(self):
        assert get_or_build("a", "k", lambda: 1) == 1
        assert get_or_build("b", "k", lambda: 2) == 2

    def test_falsy_values_are_cached(self, mocker):
        builder = mocker.Mock(return_value=None)
        get_or_build("carrier", "none", builder)
        get_or_build("carrier", "none", builder)
        assert builder.call_count == 1


class TestErrorBodies:
    """Tests for the machine-readable error form."""

    def test_path_and_details(self):
        error = InvalidInputError("Valuation of p is not open", path="valuation.p", letter="p")
        assert error.as_dict() == {
            "type": "invalid_input",
            "message": "Valuation of p is not open",
            "path": "valuation.p",
            "details": {"letter": "p"},
        }

    def test_syntax_error_position(self):
        error = FormulaSyntaxError("Unexpected end of input", line=2, column=4)
        assert error.as_dict()["details"] == {"line": 2, "column": 4}
        assert error.line == 2

"""
Tests for Celery tasks.
"""

from unittest.mock import MagicMock, patch

import pytest

from apps.cli.tasks import run_acceptance_item, run_acceptance_suite, run_soundness_sweep
from apps.core.exceptions import UnknownIdentifierError


@pytest.fixture
def mock_acceptance():
    """Mock the acceptance module so tasks run without the real checks."""
    with patch("apps.cli.tasks.get_acceptance") as mock:
        yield mock.return_value


class TestRunAcceptanceSuiteTask:
    """Tests for run_acceptance_suite task."""

    def test_suite_success(self, mock_acceptance):
        """Test the suite report is returned unchanged."""
        mock_acceptance.run_suite.return_value = {
            "passed": True,
            "max_points": 2,
            "items": [{"id": "01", "passed": True}, {"id": "02", "passed": True}],
        }

        result = run_acceptance_suite(suite="01,02", max_points=2, seed=4)

        assert result["passed"] is True
        assert len(result["items"]) == 2
        mock_acceptance.run_suite.assert_called_once_with("01,02", 2, 4)

    def test_unknown_item(self, mock_acceptance):
        """Test an invalid selection is reported instead of raised."""
        mock_acceptance.run_suite.side_effect = UnknownIdentifierError("Unknown acceptance item: 99")

        result = run_acceptance_suite(suite="99")

        assert result["passed"] is False
        assert result["items"] == []
        assert "99" in result["errors"][0]

    def test_real_item_runs_eagerly(self):
        """Test the task runs the parser item through the Celery machinery."""
        result = run_acceptance_suite.delay(suite="12", max_points=2, seed=1).get()
        assert result["passed"] is True
        assert result["items"][0]["name"] == "parser-round-trip"


class TestRunAcceptanceItemTask:
    """Tests for run_acceptance_item task."""

    def test_item_result_is_serialized(self, mock_acceptance):
        mock_acceptance.run_item.return_value = MagicMock(
            as_dict=MagicMock(return_value={"id": "04", "passed": True})
        )

        result = run_acceptance_item("04", max_points=2, seed=0)

        assert result == {"id": "04", "passed": True}
        assert mock_acceptance.run_item.call_args.args[0] == "04"


class TestRunSoundnessSweepTask:
    """Tests for run_soundness_sweep task."""

    def test_sweep_report(self):
        """Test a small exhaustive sweep of the monotone system on D_kh."""
        result = run_soundness_sweep("monotone", "dkh", max_points=1)
        assert result["sound"] is True

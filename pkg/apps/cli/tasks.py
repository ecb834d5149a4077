"""
Celery tasks for long-running checks.

The acceptance suite and exhaustive soundness sweeps can take minutes on
larger bounds; these tasks run them in a worker and return the same
JSON-ready reports the command line prints.
"""

import logging

from celery import shared_task

logger = logging.getLogger(__name__)


def get_acceptance():
    """Lazy import to avoid app loading issues."""
    from apps.cli.services import acceptance

    return acceptance


@shared_task(bind=True, time_limit=1800)  # 30 minutes
def run_acceptance_item(self, item_id, max_points=2, seed=0):
    """
    Run a single acceptance item.

    Returns:
        dict: The item result
    """
    acceptance = get_acceptance()
    logger.info(f"Starting acceptance item {item_id}")
    result = acceptance.run_item(item_id, acceptance.SuiteContext(max_points, seed))
    return result.as_dict()


@shared_task(bind=True, time_limit=3600)  # 60 minutes
def run_acceptance_suite(self, suite="all", max_points=2, seed=0):
    """
    Run the selected acceptance items in id order.

    Returns:
        dict: Suite report with ``passed`` and one entry per item, or an
        ``errors`` list when the selection itself is invalid
    """
    from apps.core.exceptions import GeomodalError

    logger.info(f"Starting run_acceptance_suite task: suite={suite} max_points={max_points} seed={seed}")
    acceptance = get_acceptance()
    try:
        report = acceptance.run_suite(suite, max_points, seed)
    except GeomodalError as e:
        error_msg = f"Error running acceptance suite: {e.message}"
        logger.error(error_msg)
        return {"passed": False, "items": [], "errors": [error_msg]}
    failed = [item["id"] for item in report["items"] if not item["passed"]]
    logger.info(f"Completed run_acceptance_suite: {len(report['items'])} items, {len(failed)} failed")
    return report


@shared_task(bind=True, time_limit=1800)
def run_soundness_sweep(self, system, functor, max_points=2):
    """
    Exhaustive soundness sweep of one axiom system.

    Returns:
        dict: The sweep report
    """
    from apps.logic.services.proofsys import soundness_sweep

    logger.info(f"Starting soundness sweep {system}/{functor} up to {max_points} points")
    return soundness_sweep(system, functor, max_points=max_points).as_dict()

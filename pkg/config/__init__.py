"""
geomodal project package.

The Celery app is imported here so that ``shared_task`` in apps/cli/tasks.py
binds to it whenever Django starts.
"""

from .celery import app as celery_app  # noqa: F401

__all__ = ("celery_app",)

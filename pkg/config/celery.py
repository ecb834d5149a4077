"""
Celery configuration for geomodal.

Long acceptance runs and soundness sweeps can be queued as background
tasks; the broker defaults to the in-memory transport.
"""

import os

from celery import Celery

# Set the default Django settings module for the 'celery' program.
os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings.development")

app = Celery("geomodal")

# - namespace='CELERY' means all celery-related configuration keys
#   should have a `CELERY_` prefix.
app.config_from_object("django.conf:settings", namespace="CELERY")

# Load task modules from all registered Django apps.
app.autodiscover_tasks()

app.conf.broker_connection_retry_on_startup = True
app.conf.timezone = "UTC"

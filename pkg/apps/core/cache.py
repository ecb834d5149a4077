"""Write-once memoisation backed by the Django cache framework."""

import hashlib
import logging
from typing import Callable, TypeVar

from django.core.cache import caches

logger = logging.getLogger(__name__)

T = TypeVar("T")

CACHE_ALIAS = "geomodal"
_MISSING = object()


def get_or_build(namespace: str, key: str, builder: Callable[[], T]) -> T:
    """
    Return the cached value for ``namespace:key``, building it on a miss.

    Values are computed from immutable inputs, so an entry never has to be
    invalidated once written.
    """
    cache = caches[CACHE_ALIAS]
    digest = hashlib.sha256(key.encode("utf-8")).hexdigest()
    cache_key = f"geomodal:{namespace}:{digest}"
    value = cache.get(cache_key, _MISSING)
    if value is not _MISSING:
        logger.debug(f"Cache hit for {namespace}")
        return value
    value = builder()
    cache.set(cache_key, value, None)
    logger.debug(f"Cached {namespace} entry")
    return value

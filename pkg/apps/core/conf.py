"""Access to the GEOMODAL resource limits defined in settings."""

from typing import Optional

from django.conf import settings

from apps.core.exceptions import ResourceBoundError

DEFAULT_LIMITS = {
    "MAX_POINTS": 4,
    "DKH_MAX_POINTS": 4,
    "PRESENTATION_MAX_GENERATORS": 24,
    "PRESENTED_FRAME_MAX_GENERATORS": 5,
    "BRUTE_FORCE_FRAME_LIMIT": 12,
    "COHERENT_PAIR_CAP": 4096,
    "AM_SEARCH_NODES": 200000,
    "SCOTT_FAMILY_SIZE": 4,
    "FRAME_ISO_MAX_ELEMENTS": 64,
}


def limit(name: str, override: Optional[int] = None) -> int:
    """
    Look up a resource limit.

    Args:
        name: Key inside ``settings.GEOMODAL``
        override: Explicit per-call value, wins over settings

    Returns:
        The effective limit
    """
    if override is not None:
        return override
    configured = getattr(settings, "GEOMODAL", {})
    return int(configured.get(name, DEFAULT_LIMITS[name]))


def enforce(name: str, value: int, what: str, override: Optional[int] = None) -> None:
    """Raise ResourceBoundError when ``value`` exceeds the named limit."""
    bound = limit(name, override)
    if value > bound:
        raise ResourceBoundError(
            f"{what} is {value}, above the {name} bound of {bound}",
            limit=name,
            bound=bound,
            value=value,
        )

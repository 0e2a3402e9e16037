import logging

from celery import shared_task

from .identities import first_failure
from .localmaps import first_orbit_failure
from .serializers import load_identity_payload, load_orbit_payload


logger = logging.getLogger(__name__)


@shared_task
def scan_identity_range(payload, start, stop):
    """
    Evaluates one identity on the enumeration indices [start, stop).
    Returns the smallest failing index, or None.
    """
    algebra, spec, target = load_identity_payload(payload)
    index = first_failure(algebra, spec, target, start, stop)
    logger.debug("Identity chunk [%d, %d) of %s -> %s", start, stop, payload['kind'], index)
    return index


@shared_task
def scan_orbit_range(payload, start, stop):
    """
    Runs the local orbit test on the enumeration indices [start, stop).
    Returns the smallest failing index, or None.
    """
    algebra, kind, T = load_orbit_payload(payload)
    index = first_orbit_failure(algebra, kind, T, start, stop)
    logger.debug("Orbit chunk [%d, %d) of %s -> %s", start, stop, kind, index)
    return index

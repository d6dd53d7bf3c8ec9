"""
Settings access for the photonics and sweeps apps.

Values come from ``settings.PHOTONICS`` / ``settings.SWEEPS`` when Django is
configured and fall back to the defaults below otherwise, so the library can
be imported from a plain Python session.
"""

from typing import Any

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

DEFAULTS = {
    "PHOTONICS": {
        "PHI_STEPS": 1024,
        "COARSE_GRID": 512,
        "GOLDEN_TOL": 1e-8,
        "THRESHOLD_TOL": 1e-4,
        "THRESHOLD_GRID": 100,
        "ORACLE_MAX_M": 8,
        "CLOSED_FORM_MAX_M": 30,
    },
    "SWEEPS": {
        "WORKERS": 1,
        "SIGNIFICANT_DIGITS": 12,
        "EXACT_HALF_DEFAULT": True,
        "VERIFY_TOLERANCE": 1e-10,
    },
}


def get_setting(name: str, group: str = "PHOTONICS") -> Any:
    """Return a setting from the given group, falling back to the library default."""
    try:
        configured = getattr(settings, group, {})
    except ImproperlyConfigured:
        configured = {}
    return configured.get(name, DEFAULTS[group][name])

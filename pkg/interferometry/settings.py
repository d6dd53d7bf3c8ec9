"""
Django settings for the interferometry project.

The project has no web surface and no database: Django provides the
configuration layer, logging setup and the management-command CLI
(``python manage.py <command>``) for the numerical apps.
"""

from pathlib import Path
from typing import List

import environ

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Environment setup (loads .env if present)
env = environ.Env()
env_file = BASE_DIR / ".env"
if env_file.exists():
    environ.Env.read_env(str(env_file))


# Only used by Django internals; nothing here is signed or served.
SECRET_KEY = env(
    "INTERFEROMETRY_SECRET_KEY",
    default="interferometry-insecure-development-key",
)

DEBUG = env.bool("DEBUG", default=False)

ALLOWED_HOSTS: List[str] = []


# Application definition

LOCAL_APPS = [
    "photonics.apps.PhotonicsConfig",
    "sweeps.apps.SweepsConfig",
]

INSTALLED_APPS = LOCAL_APPS

# No persistence: sweeps write plain CSV/JSON files.
DATABASES: dict = {}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

USE_TZ = True
TIME_ZONE = "UTC"


# Numerical library configuration
PHOTONICS = {
    # Default phase grid size for curves (one fringe period)
    "PHI_STEPS": env.int("INTERFEROMETRY_PHI_STEPS", default=1024),
    # Coarse grid for the delta-phi minimisation, refined by golden section
    "COARSE_GRID": env.int("INTERFEROMETRY_COARSE_GRID", default=512),
    "GOLDEN_TOL": env.float("INTERFEROMETRY_GOLDEN_TOL", default=1e-8),
    # Bisection tolerance (in long-arm loss) for the shot-noise threshold
    "THRESHOLD_TOL": env.float("INTERFEROMETRY_THRESHOLD_TOL", default=1e-4),
    "THRESHOLD_GRID": env.int("INTERFEROMETRY_THRESHOLD_GRID", default=100),
    # Four-mode brute force is dense over (m+1)^4 amplitudes
    "ORACLE_MAX_M": env.int("INTERFEROMETRY_ORACLE_MAX_M", default=8),
    "CLOSED_FORM_MAX_M": env.int("INTERFEROMETRY_CLOSED_FORM_MAX_M", default=30),
}

# Sweep engine and file output configuration
SWEEPS = {
    "WORKERS": env.int("INTERFEROMETRY_SWEEP_WORKERS", default=1),
    "SIGNIFICANT_DIGITS": env.int("INTERFEROMETRY_OUTPUT_DIGITS", default=12),
    # Treat 3 dB as exactly 50% loss
    "EXACT_HALF_DEFAULT": env.bool("INTERFEROMETRY_EXACT_HALF", default=True),
    "VERIFY_TOLERANCE": env.float("INTERFEROMETRY_VERIFY_TOLERANCE", default=1e-10),
}


# Logging (console, stderr; command output itself goes to stdout)
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {"format": "%(asctime)s %(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "verbose"},
    },
    "root": {
        "handlers": ["console"],
        "level": env("INTERFEROMETRY_LOG_LEVEL", default="INFO"),
    },
}

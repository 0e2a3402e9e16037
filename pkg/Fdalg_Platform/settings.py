"""
Django settings for Fdalg_Platform project.

The project hosts a single app, ``fdalg``; there are no models, views or
URLs. Every tunable below can be set from the environment or a ``.env`` file.
"""

from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-fdalg-local-only')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'rest_framework',
    'fdalg',
]

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# ============================================================================
# FDALG CONFIGURATION
# ============================================================================

# Largest number of elements (or element pairs) enumerated by exhaustive checks.
FDALG_BUDGET = int(os.getenv('FDALG_BUDGET', 2 ** 21))

# Largest |F|^n the brute-force radical will enumerate.
FDALG_RADICAL_BUDGET = int(os.getenv('FDALG_RADICAL_BUDGET', 2 ** 21))

FDALG_SAMPLE_COUNT = int(os.getenv('FDALG_SAMPLES', 256))
FDALG_SEED = int(os.getenv('FDALG_SEED', 0))

# More than one worker splits exhaustive scans into Celery tasks of FDALG_CHUNK_SIZE indices.
FDALG_WORKERS = int(os.getenv('FDALG_WORKERS', 1))
FDALG_CHUNK_SIZE = int(os.getenv('FDALG_CHUNK_SIZE', 4096))

FDALG_REPORT_TIMINGS = os.getenv('FDALG_REPORT_TIMINGS', 'False') == 'True'

FDALG_LOG_LEVEL = os.getenv('FDALG_LOG_LEVEL', 'WARNING')

# ============================================================================
# LOGGING CONFIGURATION
# ============================================================================

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'fdalg': {
            'handlers': ['console'],
            'level': FDALG_LOG_LEVEL,
            'propagate': False,
        },
    },
}

# ============================================================================
# CELERY CONFIGURATION
# ============================================================================

# Eager by default so the CLI needs no broker; set False to fan out to workers.
CELERY_TASK_ALWAYS_EAGER = os.getenv('CELERY_TASK_ALWAYS_EAGER', 'True') == 'True'
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_BROKER_URL = os.getenv("REDIS_URL", "redis://127.0.0.1:6379/1")
CELERY_RESULT_BACKEND = os.getenv("REDIS_URL", "redis://127.0.0.1:6379/1")
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = 'UTC'

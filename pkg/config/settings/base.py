"""
Base Django settings for the geomodal project.
This file contains settings common to all environments.
"""

from pathlib import Path
import environ

# Build paths
BASE_DIR = Path(__file__).resolve().parent.parent.parent

# Initialize environment variables
env = environ.Env(
    DEBUG=(bool, False),
    GEOMODAL_MAX_POINTS=(int, 4),
)

# Read .env file if it exists
environ.Env.read_env(BASE_DIR / '.env')

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = env('SECRET_KEY', default='django-insecure-change-this-in-production-12345')

# Application definition
INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',

    # Third-party apps
    'rest_framework',

    # Local apps
    'apps.core',
    'apps.topology',
    'apps.coalgebra',
    'apps.logic',
    'apps.bisim',
    'apps.cli',
]

MIDDLEWARE = []

ROOT_URLCONF = 'config.urls'

# No tables of our own; auth and contenttypes only need somewhere to live
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Django REST Framework (serializers validate the input documents)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
}

# Resource bounds for the finite enumerations
GEOMODAL = {
    'MAX_POINTS': env('GEOMODAL_MAX_POINTS'),
    'DKH_MAX_POINTS': env.int('GEOMODAL_DKH_MAX_POINTS', default=4),
    'PRESENTATION_MAX_GENERATORS': env.int('GEOMODAL_PRESENTATION_MAX_GENERATORS', default=24),
    'PRESENTED_FRAME_MAX_GENERATORS': 5,
    'BRUTE_FORCE_FRAME_LIMIT': 12,
    'COHERENT_PAIR_CAP': env.int('GEOMODAL_COHERENT_PAIR_CAP', default=4096),
    'AM_SEARCH_NODES': env.int('GEOMODAL_AM_SEARCH_NODES', default=200000),
    'SCOTT_FAMILY_SIZE': 4,
    'FRAME_ISO_MAX_ELEMENTS': 64,
}

# Celery Configuration
CELERY_BROKER_URL = env('CELERY_BROKER_URL', default='memory://')
CELERY_RESULT_BACKEND = env('CELERY_RESULT_BACKEND', default='cache+memory://')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = TIME_ZONE

# Cache Configuration
CACHES = {
    'default': {
        'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
    },
    # write-once carriers and lifted frames, keyed by canonical space serialization
    'geomodal': {
        'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
        'LOCATION': 'geomodal',
        'TIMEOUT': None,
        'OPTIONS': {
            'MAX_ENTRIES': env.int('GEOMODAL_CACHE_ENTRIES', default=4096),
        },
    },
}

# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': env('DJANGO_LOG_LEVEL', default='INFO'),
            'propagate': False,
        },
        'apps': {
            'handlers': ['console'],
            'level': env('GEOMODAL_LOG_LEVEL', default='INFO'),
            'propagate': False,
        },
    },
}

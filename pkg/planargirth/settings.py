"""
Django settings for the planargirth project.

The project has no web surface; Django provides configuration, logging,
management commands, the test runner and the lookup-cache database.
"""

from pathlib import Path
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'planargirth-local-only')

DEBUG = os.getenv('DJANGO_DEBUG', 'False').lower() in {'1', 'true', 'yes', 'on'}

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    # Local apps
    'graphs',
    'girth',
]

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Database
# The default database only holds the lookup cache; --lookup-cache repoints it.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.getenv('GIRTH_LOOKUP_CACHE') or BASE_DIR / 'lookup.sqlite3',
    }
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Girth computation
GIRTH = {
    'ELL_POLICY': os.getenv('GIRTH_ELL', 'scaled'),
    'ELL_SCALE': 1,
    'LOOKUP_MODE': 'lazy',
    'LOOKUP_CACHE': os.getenv('GIRTH_LOOKUP_CACHE'),
    'LOOKUP_MAX_NODES': 16,
    'THREADS': int(os.getenv('GIRTH_THREADS', '1')),
    'SEED': 0,
    'WITNESS': False,
    'CORPUS_SIZE': int(os.getenv('GIRTH_CORPUS_SIZE', '40')),
}

GIRTH_LOG_LEVEL = os.getenv('GIRTH_LOG_LEVEL', 'WARNING').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'kv': {
            '()': 'planargirth.log.KeyValueFormatter',
            'format': '%(asctime)s %(levelname)s %(name)s %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'kv',
            'stream': 'ext://sys.stderr',
        },
    },
    'loggers': {
        'graphs': {
            'handlers': ['console'],
            'level': GIRTH_LOG_LEVEL,
            'propagate': False,
        },
        'girth': {
            'handlers': ['console'],
            'level': GIRTH_LOG_LEVEL,
            'propagate': False,
        },
    },
}

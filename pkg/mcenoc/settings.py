"""
Django settings for the mcenoc project.

The project has no web front end: it is driven through manage.py
subcommands (topo, draw, route, sim, tdm, verify). Settings here cover the
installed apps, logging, and the database stub the test runner expects.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import os

# Build paths inside the project like this: os.path.join(BASE_DIR, ...)
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

SECRET_KEY = os.environ.get('MCENOC_SECRET_KEY', 'mcenoc-local-tooling-only')

DEBUG = os.environ.get('MCENOC_DEBUG', '') == '1'

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'noc',
]

MIDDLEWARE = []

REST_FRAMEWORK = {
    'DEFAULT_PARSER_CLASSES': [
        'rest_framework.parsers.JSONParser',
    ],
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'UNAUTHENTICATED_USER': None,
}

# Database
# Nothing is persisted; sqlite keeps the test runner and system checks happy.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.environ.get('MCENOC_DB', os.path.join(BASE_DIR, 'db.sqlite3')),
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Logging

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'noc': {
            'handlers': ['console'],
            'level': os.environ.get('MCENOC_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}

# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

# MCENoC defaults (see noc/conf.py for the full list)

MCENOC_FREQUENCY_HZ = float(os.environ.get('MCENOC_FREQUENCY_HZ', 364e6))

"""
Django settings for config project.

The project has no web surface: it hosts the quermass apps and the
``quermass`` management command.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

from pathlib import Path
import dotenv, os

dotenv.load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv(
    'DJANGO_SECRET_KEY',
    'django-insecure-quermass-local-development-key-change-me'
)

DEBUG = os.getenv('DJANGO_DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'rest_framework',
    'symfunc',
    'sphere_basis',
    'geometry',
    'functionals',
    'asymmetry',
    'verify',
    'cli',
]

MIDDLEWARE = []

# No persistence: every domain object is an in-memory value.
DATABASES = {}

# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Numerical settings shared by the apps
QUERMASS = {
    'OUTPUT_DIR': os.getenv('QUERMASS_OUTPUT_DIR', str(BASE_DIR / 'reports')),
    'WORKERS': int(os.getenv('QUERMASS_WORKERS', '4')),
    'MIN_RADIUS': 0.05,
    'RESOLUTION_TOLERANCE': 1e-9,
    'MAX_DEGREE': 32,
}

LOG_LEVEL = os.getenv('QUERMASS_LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name} {message}',
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
        'level': LOG_LEVEL,
    },
}

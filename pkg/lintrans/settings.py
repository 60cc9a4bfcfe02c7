"""Project settings for the lintrans verification engine."""

from pathlib import Path

import environ
from django.core.exceptions import ImproperlyConfigured

# Build paths inside the project like this: BASE_DIR / "subdir".
BASE_DIR = Path(__file__).resolve().parent.parent

env = environ.Env(
    DJANGO_DEBUG=(bool, False),
    LINTRANS_LOG_LEVEL=(str, "WARNING"),
    LINTRANS_CONFIG_ENV=(str, "LINTRANS_CONFIG"),
)

# If a .env file exists, load it before reading any env vars so defaults
# declared above are overridden by file values.
env_file = BASE_DIR / ".env"
if env_file.exists():
    environ.Env.read_env(env_file)

# The command-line surface never serves requests; the key only satisfies
# Django's startup checks.
SECRET_KEY = env("DJANGO_SECRET_KEY", default="lintrans-offline-key")
if not SECRET_KEY:
    raise ImproperlyConfigured("DJANGO_SECRET_KEY must not be empty.")

DEBUG = env("DJANGO_DEBUG")

ALLOWED_HOSTS: list[str] = []


# Name of the environment variable that points at the run configuration
# file. It is the only environment dependency of a verification run.
LINTRANS_CONFIG_ENV = env("LINTRANS_CONFIG_ENV")

# Used when neither the environment variable nor --config is given.
LINTRANS_DEFAULT_CONFIG = BASE_DIR / "lintrans.env"


_LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


def _read_log_level() -> str:
    level = env("LINTRANS_LOG_LEVEL").upper()
    if level not in _LOG_LEVELS:
        raise ImproperlyConfigured(
            "LINTRANS_LOG_LEVEL must be one of " + ", ".join(sorted(_LOG_LEVELS)) + "."
        )
    return level


LINTRANS_LOG_LEVEL = _read_log_level()


# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "core",
]

MIDDLEWARE: list[str] = []


# Database
# https://docs.djangoproject.com/en/5.0/ref/settings/#databases

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": env("LINTRANS_DATABASE_PATH", default=str(BASE_DIR / "db.sqlite3")),
    }
}


# Logging
# https://docs.djangoproject.com/en/5.0/topics/logging/

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {
            "format": "{levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "loggers": {
        "core": {
            "handlers": ["console"],
            "level": LINTRANS_LOG_LEVEL,
            "propagate": False,
        },
    },
}


# Internationalization
# https://docs.djangoproject.com/en/5.0/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True


# Default primary key field type
# https://docs.djangoproject.com/en/5.0/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

"""
Django settings for config project.

Generated by 'django-admin startproject' using Django 5.1.6.

For more information on this file, see
https://docs.djangoproject.com/en/5.1/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.1/ref/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv


load_dotenv()


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'django-insecure-twins-local-only')

DEBUG = os.getenv('DJANGO_DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'rest_framework',
    'twins',
]

MIDDLEWARE = []


# Database
# 只有 Django 的 test runner 需要；twins 不使用任何 model

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}


# Internationalization
# https://docs.djangoproject.com/en/5.1/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'Asia/Taipei'

USE_I18N = True

USE_TZ = True


# Default primary key field type
# https://docs.djangoproject.com/en/5.1/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# REST Framework 設定 (只用到 serializer / renderer / parser)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'DEFAULT_PARSER_CLASSES': [
        'rest_framework.parsers.JSONParser',
    ],
    'STRICT_JSON': True,
    'COERCE_DECIMAL_TO_STRING': False,
}

## twins

# 數值容許誤差與 complete twins 搜尋設定
TWINS = {
    'RANK_TOL': float(os.getenv('TWINS_RANK_TOL', '1e-10')),        # 相對於最大特徵值
    'RESIDUAL_TOL': float(os.getenv('TWINS_RESIDUAL_TOL', '1e-8')),
    'CLUSTER_TOL': float(os.getenv('TWINS_CLUSTER_TOL', '1e-8')),
    'HERM_TOL': float(os.getenv('TWINS_HERM_TOL', '1e-9')),
    'SEARCH_ATTEMPTS': int(os.getenv('TWINS_SEARCH_ATTEMPTS', '64')),
    'SEED': int(os.getenv('TWINS_SEED', '0')),
}

# 日誌設定
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {message}',
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
        'twins': {
            'handlers': ['console'],
            'level': os.getenv('TWINS_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}

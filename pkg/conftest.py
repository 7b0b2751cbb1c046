"""pytest 設定：在收集測試前載入 Django settings (同 manage.py)"""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
django.setup()

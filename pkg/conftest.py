import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'Fdalg_Platform.settings')
django.setup()

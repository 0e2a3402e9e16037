import os
from celery import Celery

# Set default Django settings module
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'Fdalg_Platform.settings')

app = Celery('Fdalg_Platform')

app.config_from_object('django.conf:settings', namespace='CELERY')

# Picks up fdalg.tasks.
app.autodiscover_tasks()

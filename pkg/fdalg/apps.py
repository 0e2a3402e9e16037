from django.apps import AppConfig


class FdalgConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'fdalg'
    verbose_name = 'Finite-dimensional algebra toolkit'

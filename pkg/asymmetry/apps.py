from django.apps import AppConfig


class AsymmetryConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'asymmetry'

from django.apps import AppConfig


class SphereBasisConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'sphere_basis'

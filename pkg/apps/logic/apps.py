from django.apps import AppConfig


class LogicConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.logic'
    verbose_name = 'Geometric Modal Logic'

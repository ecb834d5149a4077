from django.apps import AppConfig


class BisimConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.bisim'
    verbose_name = 'Bisimulations and Behavioural Equivalence'

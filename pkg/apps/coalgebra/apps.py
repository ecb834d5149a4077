from django.apps import AppConfig


class CoalgebraConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.coalgebra'
    verbose_name = 'Functors, Liftings and Lifts'

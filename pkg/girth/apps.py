from django.apps import AppConfig


class GirthConfig(AppConfig):
    name = 'girth'
    verbose_name = 'Planar girth'
    default_auto_field = 'django.db.models.BigAutoField'

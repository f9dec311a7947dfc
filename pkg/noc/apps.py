from django.apps import AppConfig


class NocConfig(AppConfig):
    name = 'noc'
    verbose_name = 'MCENoC switching network'

    def ready(self):
        # registers the MCENOC_* defaults on django.conf.settings
        from noc import conf  # noqa: F401

import os

from appconf import AppConf
from django.conf import settings  # noqa: F401


class NocAppConf(AppConf):
    """
    Defaults for the MCENoC tools. Override any of them in the project
    settings as MCENOC_<NAME>.
    """
    # 2-bit switch operating point; a model input, never a timing claim
    FREQUENCY_HZ = 364e6
    EFFICIENCY = 0.99
    SEED = int(os.environ.get('MCENOC_SEED', 0))
    EXHAUSTIVE_MAX_NODES = 8
    CORE_CYCLES = 1000000
    NETWORK_SAMPLES = 10000
    WORKERS = int(os.environ.get('MCENOC_WORKERS', 1))

    class Meta:
        prefix = 'mcenoc'

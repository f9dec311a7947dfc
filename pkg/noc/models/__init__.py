from .topology import *
from .switch import *
from .netsim import *
from .routing import *
from .tdm import *

"""
Immutable numeric containers shared by the services.
"""

from .banking import *
from .contagion import *
from .emissions import *
from .instance import *
from .network import *
from .shock import *

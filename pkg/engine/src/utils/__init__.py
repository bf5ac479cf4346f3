from .logger import *
from .sectors import *

from .config import *
from .reports import *

"""
CSV gateway package: every file the engine reads or writes goes through here.
"""

from .readers import *
from .writers import *

"""
Version 1 gateways.
"""

from .csv_gateway.readers import *
from .csv_gateway.writers import *

__all__ = ["CsvReader", "CsvWriter"]

"""
File gateways: CSV readers and report writers.
"""

from .v1 import *

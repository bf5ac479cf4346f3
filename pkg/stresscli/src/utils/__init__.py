# Utils package for the stress CLI

from .logger import *

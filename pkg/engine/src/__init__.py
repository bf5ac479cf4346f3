from .errors import *
from .models import *
from .schemas import *
from .gateways import *
from .services import *
from .utils import *

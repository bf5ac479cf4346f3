from .base_service import *
from .contagion_service import *
from .direct_shock_service import *
from .emissions_service import *
from .financial_service import *
from .network_service import *
from .passthrough_service import *
from .scenario_service import *
from .synthetic_service import *

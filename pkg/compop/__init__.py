__version__ = '0.1.0'

from . import utils
from . import series
from . import quadrature
from . import spaces
from . import symbols
from . import boundary_sets
from . import capacity
from . import diagnostics
from . import constructions

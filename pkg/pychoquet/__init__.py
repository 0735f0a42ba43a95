from .capacity import *
from .product import *
from .relations import *
from .axioms import *
from .representation import *
from .suite import *
from .serialization import *
from .logging_utils import *

# Models
from .models.capacity_model import *
from .models.product_model import *
from .models.preference_model import *
from .models.relation_model import *
from .models.report_model import *
from .models.fit_model import *
from .models.suite_model import *
from .models.options_model import *
from .models.command_model import *

# Exceptions
from .exceptions import *

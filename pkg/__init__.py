from recip_core import pauli2
from recip_core import recip
from recip_core import transport
from recip_tools import moss
from recip_tools import omegascan
from recip_tools import scenario

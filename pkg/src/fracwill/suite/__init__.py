''' Acceptance suite registration
'''
from . import geometry
from . import oracle
from . import analysis
from . import sequences

"""Right-angled Artin group computations: focused and austere graphs, Out(A_G), centralizers."""
from .errors import (CapabilityError, ConsistencyError, ConstructionError, InputError, NotInPCTError,
                     ParseError, RaagkitError, VerificationError, WorkLimitExceeded)
from .graph import SimplicialGraph, classify_focused, is_austere, load_graph, parse_graph
from .words import GroupWord, normal_form, words_equal

__version__ = "0.1.0"

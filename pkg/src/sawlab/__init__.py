"""sawlab: exact self-avoiding-walk enumeration and growth bounds on
infinite regular graphs defined by neighbor-generation rules."""

__version__ = "0.1.0"

from .graphs import (BallGraph, DirectedEdge, EdgeRef, GraphError, GraphRule,
                     ball, parse_family, verify_symmetry)
from .counting import (SawCountSeries, count_extendable, count_saws,
                       count_saws_avoiding, count_saws_midedge)
from .estimate import (GrowthEstimate, check_bounds, convergence_check,
                       estimate_mu, exact_mu, fekete_envelope, growth_estimate)
from .redblue import (ColorVerdict, TraversedTriple, VertexCertificate,
                      audit_blue_counts, certify_vertex, classify_edge,
                      find_witness_matching)
from .lemmas import (CutoffResult, MengerResult, branch_group_bound,
                     edge_disjoint_paths, find_strictness_cutoff,
                     neighbor_decomposition_report, strict_upper_bound_report,
                     submultiplicativity_report, verify_branch_induction)

__all__ = [name for name in dir() if not name.startswith("_")]

"""Canopy-tree souvlaki: a unimodular graph family built from meatballs.

Constructs the finite assemblies, spine truncations and limit balls of the
meatball-on-canopy-skeleton family, the explicit transient unit flow across
each meatball in exact arithmetic, and the finite-volume verification
machinery around them: volumes and root laws, flow energies, effective
resistances and junction contractions, spine-hitting and radial-symmetry
solves, mass-transport checks, ball-type statistics and four-point
hyperbolicity constants.
"""

__version__ = "0.1.0"

from .assembly import (CanonicalVertex, RootedSample, assemble_tn, build_gadget,
                       canonicalize, export_edge_lines, format_address,
                       neighbors_global, parse_address, sample_limit_ball,
                       spine_truncation)
from .census import (CensusTable, LimitLevelSampler, limit_level_probability,
                     ownership_count, root_level_probability,
                     summability_certificate, volume_left)
from .diagnostics import (DeltaStats, TransportFunction, gromov_delta_exact,
                          gromov_delta_sampled, lwc_diagnostic, mtp_check,
                          random_transport_functions)
from .electrical import (ResistanceResult, contract_junctions,
                         effective_resistance, junction_resistance_profile,
                         spanning_tree, subtree_resistance_contrast,
                         tree_resistance_to_set)
from .errors import (BudgetExceededError, CoordinateError, SolverError,
                     SouvlakiError)
from .flow import (EnergyReport, FlowAssignment, build_unit_flow,
                   concatenate_spine_flow, energy_analytic, energy_exact,
                   energy_tail_bound, tree_flow_energy)
from .graph import Graph
from .topology import (H3Vertex, MeatballSpec, WVertex, boundary_bk,
                       format_coordinate, materialize_meatball,
                       neighbors_in_meatball, parse_coordinate, side_of)
from .walk import (HittingDistribution, WalkStats, escape_probability,
                   exact_hitting_distribution, radial_symmetry_check,
                   simulate_spine_hitting)

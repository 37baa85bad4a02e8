"""Higher limits over orbit categories of fusion systems, with exact F_p and integral linear algebra."""
from __future__ import annotations

from .catalg import (CatModule, constant_module, ext, free_resolution, higher_limit, higher_limits,
                     integral_higher_limits, limit)
from .category import FiniteCategory, dn_category, poset_category
from .dwyer import amalgam_graph, build_coset_poset, cgpc_module, fixed_quotient_homology, run_oracle
from .errors import FusionLimError, HypothesisFailed, InputError
from .fusion import FusionSystem, fusion_of_group, generate_fusion, orbit_category
from .grouptheory import FiniteGroup, Subgroup, named_group
from .mackey import MackeyFunctor, check_mackey, cohomology_mackey, fixed_point_mackey
from .theorem_a import (AmalgamSpec, build_amalgam_fusion, load_amalgam, load_corpus, sharpness_scan,
                        verify_exact_sequence, verify_hypotheses)

__all__ = [
    "AmalgamSpec", "CatModule", "FiniteCategory", "FiniteGroup", "FusionLimError", "FusionSystem",
    "HypothesisFailed", "InputError", "MackeyFunctor", "Subgroup", "amalgam_graph", "build_amalgam_fusion",
    "build_coset_poset", "cgpc_module", "check_mackey", "cohomology_mackey", "constant_module", "dn_category",
    "ext", "fixed_point_mackey", "fixed_quotient_homology", "free_resolution", "fusion_of_group",
    "generate_fusion", "higher_limit", "higher_limits", "integral_higher_limits", "limit", "load_amalgam",
    "load_corpus", "named_group", "orbit_category", "poset_category", "run_oracle", "sharpness_scan",
    "verify_exact_sequence", "verify_hypotheses",
]

"""Mod-p modular forms via q-expansions, with exact checks that the Atkin
operator U contracts weight k onto k' = (k - k0)/p + k0, and the genus-zero
Cartier operator / Tango number computations behind that statement."""
from .fp_linalg import FpMatrix, rref, subspace_contains
from .harness import SurjectivityReport, scan_level1, verify_level1, verify_manifest
from .level1 import FormSpace, dim_Mk, victor_miller_basis
from .qseries import QExp, theta, u_slice, v_expand
from .weights import WeightTarget, serre_contraction_bound, target_weight

__all__ = [
    "FormSpace", "FpMatrix", "QExp", "SurjectivityReport", "WeightTarget", "dim_Mk", "rref",
    "scan_level1", "serre_contraction_bound", "subspace_contains", "target_weight", "theta",
    "u_slice", "v_expand", "verify_level1", "verify_manifest", "victor_miller_basis",
]

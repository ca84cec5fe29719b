"""Leaky and trapped Lamb-type waves in a plate between two elastic half-spaces.

Chebyshev collocation with complex-path maps in the half-spaces, a quadratic
eigenvalue problem in the axial wavenumber, and a partial-wave determinant
for independent checks.
"""

from .assembly import RadiationCase, assemble_pep, enumerate_cases
from .materials import ALUMINIUM, EPOXY, Material, TriLayerSystem, adhesive_joint
from .modes import (
    DispersionDataset,
    ModeSolution,
    PipelineOptions,
    filter_modes,
    interface_residual,
    mode_shape,
    select_branch,
    solve_case,
    sweep,
)
from .oracle import characteristic_determinant, rayleigh_lamb_roots, refine_root
from .pep_solver import EigenPair, solve_pep

__version__ = "0.1.0"

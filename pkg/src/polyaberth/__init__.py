"""Polynomial eigenvalue problems by simultaneous Ehrlich-Aberth iteration.

The solver treats det P(x) = 0 in polynomial form without ever expanding the
determinant: each approximation takes Newton steps through the trace identity
tr(P(x)^{-1} P'(x)) with implicit deflation against the other approximations.
Structured variants enforce declared spectral pairings {x, f(x)} exactly.
"""

from .bounds import (
    ClusterReport,
    DiskKind,
    InclusionDisk,
    SingularLeadingError,
    cluster_analysis,
    henrici_disks,
    smith_disks,
)
from .eai import (
    EigenEstimate,
    SolverConfig,
    SpectrumResult,
    Status,
    aberth_sum,
    detect_deflation,
    scalar_step,
    solve,
    stricter_stop,
)
from .linalg import (
    LUFactors,
    PointDiagnostics,
    lu_factor,
    lu_solve,
    null_vector,
    point_diagnostics,
    rank_lower_bound,
)
from .matpoly import (
    MatrixPolynomial,
    MobiusMap,
    MobiusPoleError,
    coeff_norm2,
    coeff_norms,
    eval_at,
    eval_deriv,
    eval_mobius,
    eval_pair,
    reversal,
)
from .oracle import MatchReport, ScalarPoly, det_poly, match_spectra, scalar_roots
from .starting import Annulus, PolygonSegment, initial_points, newton_polygon, rouche_annulus
from .structured import (
    NearExceptionalError,
    PairedSpectrum,
    StructureKind,
    StructureMismatchError,
    StructureSpec,
    even_odd_newton_correction,
    f_apply,
    hamiltonian_to_even_odd,
    palindromic_newton_correction,
    q_newton_correction,
    solve_structured,
    verify_structure,
    x_branches_of_z,
    z_of_x,
)

__version__ = "0.1.0"

"""Numerical tolerances shared by the library and its test suite.

Every tolerance that appears in a contract (precondition check, residual
bound, acceptance threshold) lives here so the two sides cannot drift apart.
"""

# -- dense linear algebra -------------------------------------------------
HERMITIAN_INPUT_ATOL = 1e-12      # max|A - A^dag| accepted by hermitian_eig
EIG_ORTHONORMALITY_TOL = 1e-10    # max|V^dag V - I|
EIG_RESIDUAL_REL = 1e-10          # max|A v - lam v| relative to max|A|
UNITARY_INPUT_TOL = 1e-9          # max|U^dag U - I| accepted by unitary_eig
UNITARY_RESIDUAL_TOL = 1e-9       # max|U v - f v| for returned eigenpairs
UNITARY_MODULUS_TOL = 1e-9        # | |f| - 1 |
# Phases whose cosines lie closer than this are diagonalised jointly; wide
# enough that subspace conditioning keeps residuals below the 1e-9 target.
UNITARY_COS_CLUSTER_TOL = 1e-6
EXPM_UNITARITY_TOL = 1e-10        # max|U^dag U - I| for expm_i_hermitian

# -- spin algebra ----------------------------------------------------------
SPIN_COMMUTATOR_TOL = 1e-10       # max|[Jx,Jy] - i Jz| and cyclic
SPIN_CASIMIR_TOL = 1e-10          # max|Jx^2+Jy^2+Jz^2 - J(J+1) I|
SCS_NORM_TOL = 1e-12
SCS_ALIGNMENT_TOL = 1e-9          # |<n.J> - J| for a coherent state
SCS_VARIANCE_TOL = 1e-9           # transverse variances vs J/2
COMMUTING_PROBE_TOL = 1e-10       # max|[W, |scs><scs|]| at t = 0

# -- classical dynamics ----------------------------------------------------
ANGULAR_NORM_DRIFT_REL = 1e-9     # |L| drift over 1000 periods
JACOBIAN_FD_REL = 1e-5            # analytic vs central finite differences
PHI_RENORM_THRESHOLD = 1e100      # fundamental-matrix renormalisation point
LYAPUNOV_MAP_FLOOR = 1e-3         # display floor for emitted maps, 1/period

# -- Floquet ---------------------------------------------------------------
FLOQUET_UNITARITY_TOL = 1e-9
FLOQUET_SPECTRUM_RESIDUAL = 1e-9
FLOQUET_CONVERGENCE_TARGET = 1e-6   # max|U(N) - U(2N)| certification gap
FLOQUET_DEGENERACY_GAP = 1e-10      # phase gap that triggers the PR warning
EVOLVE_NORM_TOL = 1e-9

# -- OTOC protocol ----------------------------------------------------------
POPULATION_SUM_TOL = 1e-9         # exact-mode populations must sum to 1
STATE_NORM_GUARD = 1e-6           # evolved-state norm drift treated as error
ORTHOGONALITY_TOL = 1e-10         # polarization-identity input check
PURITY_TOL = 1e-10                # Tr[rho^2] = 1 check for pure states
MIXTURE_WEIGHT_TOL = 1e-12        # sum(p_n) = 1
BASIS_GRAM_TOL = 1e-10            # mixture basis orthonormality

# -- open systems ------------------------------------------------------------
TRACE_PRESERVATION_TOL = 1e-12    # superoperator acting on vec(identity)
DENSITY_TRACE_TOL = 1e-9
DENSITY_HERMITICITY_TOL = 1e-9
DENSITY_POSITIVITY_FLOOR = -1e-8  # most negative admissible eigenvalue
PRODUCT_STRUCTURE_TOL = 1e-8      # doubled-evolution deviation bound

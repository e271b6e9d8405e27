"""Fixed numerical constants.

Every tolerance used by default anywhere in the package lives here, so that
reports can quote them and tests can pin them.
"""

#: relative tolerance for Gram-matrix NND verdicts, scaled by max(1, lambda_max)
NND_TOL = 1e-9

#: absolute accuracy a truncated series must certify before it is evaluated
TAIL_ACCURACY = 1e-10

#: minimum pairwise separation of sample points
MIN_SEPARATION = 1e-6

#: default cap on |z| for generated sample grids
MAX_GRID_RADIUS = 0.95

#: largest Gram matrix handed to a single eigen-decomposition by the verifiers
GRAM_CAP = 12

#: default verifier grid
DEFAULT_RADII = (0.1, 0.3, 0.5, 0.7, 0.9)
DEFAULT_ANGLES = 8

#: pointwise tolerance for curvature margins, relative to max(1, |bound|)
MARGIN_TOL = 1e-10

#: finite-difference mesh for bundle curvature (one Richardson step on top)
FD_MESH = 1e-3

#: path used to approach the diagonal in the limit computation
LIMIT_T0 = 0.02
LIMIT_SHRINK = 0.5
LIMIT_STEPS = 6
LIMIT_FIT_DEGREE = 2

#: default polynomial truncation for the tensor-product spaces
TRUNCATION_N = 40

#: refuse to solve normal equations above this condition number
MAX_CONDITION = 1e10

#: relative tolerance for membership tests in truncated submodules
MEMBERSHIP_TOL = 1e-8

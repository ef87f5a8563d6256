"""Numeric defaults, collected in one place (documented in the README)."""

# jump truncation level for the noise sampler
DELTA = 0.01

# Picard iteration
TOL = 1e-8
MAX_ITER = 200

# operator-norm probing
N_PROBES = 64
PROBE_SAFETY = 1.5

# quadrature: geometric-panel budget toward 0/infinity, Cauchy tolerance,
# Gauss-Legendre nodes per panel
QUAD_PANELS = 60
QUAD_TOL = 1e-10
QUAD_NODES = 16

# denominator-zero refusal threshold scale: |p(i xi)| >= scale * (1 + sum|coeffs|)
ZERO_THRESHOLD_SCALE = 1e-10

# decay-order estimation
KAPPA_XI_RANGE = 4096.0
KAPPA_SHELLS = 64
KAPPA_DIRECTIONS = 8
KAPPA_FD_STEP = 1e-4
KAPPA_RESIDUAL_THRESHOLD = 0.5

# weight-function generalized inverse (bisection)
BISECT_TOL = 1e-10

# c values scanned by the CLI admissibility check
C_SCAN = (0.1, 0.25, 0.5, 1.0, 2.0)

#  -*- mode: python; mode: fold -*-
#
#  License: MIT
#
#  Part of cascade-sim
#
#  See the README.md in the repository for more info
#
"""packet wide constants"""

import math

__version__ = "0.1.0"

#
#  Global basis contract, matrices, CSV columns and channel indices
#  all follow this order
#
BASIS = ("a", "b", "c", "d", "e")
IDX_A, IDX_B, IDX_C, IDX_D, IDX_E = range(5)

#  Jump channels 1..5, in this order
CHANNEL_NAMES = (
    "emission",  # J1 both cavities towards the detector
    "loss_a",  # J2 mirror absorption/scattering, cavity A
    "loss_b",  # J3 mirror absorption/scattering, cavity B
    "spont_a",  # J4 spontaneous emission, atom A
    "spont_b",  # J5 spontaneous emission, atom B
)

REL_TOL_DEFAULT = 1e-10
ABS_TOL_DEFAULT = 1e-12
REL_TOL_MAX = 1e-3
ABS_TOL_MAX = 1e-6

#  Norm tolerance allowed above unity for AmplitudeState
NORM_SLACK = 1e-9

#  Relative size below which a g/h denominator is treated as zero
DEGENERACY_THRESHOLD = 1e-8
#  Omega values smaller than this (relative) are lifted to it, critical damping
CRITICAL_OMEGA_FLOOR = 1e-5

#  Remaining no-jump norm accepted as "photon has left" for t -> inf
NORM_CUTOFF = 1e-10
T_CUT_START = 1.0
T_CUT_LIMIT = 1e6

#  Quadrature
QUAD_ABS_TOL = 1e-10
#  Subinterval budget of one QUADPACK call
QUAD_LIMIT = 4000

RECONSTRUCT_FLOOR = 1e-12

BISECT_MAX_ITER = 200
BISECT_XTOL = 1e-13

HORIZON_DEFAULT = 20.0
BINS_DEFAULT = 200

#
#  Parameter set used for both published figures, units of K = K_a = K_b
#
FIGURE_PARAMS = {
    "g": 5.0,
    "kappa": 0.9,
    "kappa_loss": 0.1,
    "gamma": 0.2,
    "delta": 0.1,
}
FIGURE_PHI = 0.0
FIGURE_T_MAX = 10.0
FIGURE_STEPS = 1001

TWO_PI = 2.0 * math.pi

ENV_THREADS = "CASCADE_SIM_THREADS"

#  CLI exit codes
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

EVOLVE_HEADER = (
    "t",
    "re_alpha",
    "im_alpha",
    "re_beta",
    "im_beta",
    "re_gamma",
    "im_gamma",
    "re_delta",
    "im_delta",
    "prob_a",
    "prob_b",
    "prob_c",
    "prob_d",
    "prob_e",
)
FIGURE_HEADER = ("t", "value", "variant")
RECONSTRUCT_HEADER = ("t", "beta_abs", "delta_abs", "concurrence_est", "flag")
DETECT_HEADER = ("t", "p_d")

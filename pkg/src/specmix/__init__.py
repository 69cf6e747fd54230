"""Spectral estimation of mixed memberships in networks (SPACL, SVM-cone-DCMMSB)
with generators and Monte Carlo checks of separation and sparsity behaviour."""
from .errors import *  # noqa: F401,F403
from .netmodels import (
    Population,
    build_ptilde_offdiag,
    build_ptilde_standard,
    derive_seed,
    make_rng,
    omega_dcmm,
    omega_mmsb,
    sample_adjacency,
    sample_er,
    sample_membership,
    sample_theta,
)
from .estimators import MembershipEstimate, ideal_spacl, ideal_svmcone_dcmm, spacl, svmcone_dcmm
from .metrics import (
    bernstein_constant,
    eigenspace_error,
    instance_diagnostics,
    is_connected,
    membership_error,
    spectral_deviation,
)
from .scstc import (
    SweepConfig,
    fit_loglog_slope,
    run_sweep,
    scstc_report,
    sweep_beta,
    sweep_separation,
    sweep_sparsity,
    threshold_scan,
)

__version__ = "0.1.0"

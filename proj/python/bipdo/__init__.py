"""Bi-parameter pseudo-differential operators on a discretized torus."""

from ._bipdo import (
    ConfigError,
    Grid,
    MollifierInfeasible,
    Symbol,
    adjoint_apply,
    apply,
    bmo_norm,
    build_id,
    builtin,
    builtin_names,
    commutator_error,
    dense_matrix,
    derived,
    dft_forward,
    dft_inverse,
    identity_suite,
    kernel_l1,
    l2_opnorm,
    lp_norm,
    parse_config,
)

__all__ = [name for name in dir() if not name.startswith("_")]

import numpy as np
import pytest

import bipdo


@pytest.fixture
def grid():
    return bipdo.Grid(1, 1, 16, 1.0)


def test_identity_symbol_is_identity(grid):
    rng = np.random.default_rng(3)
    f = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    g = bipdo.apply(bipdo.builtin("constant", {"c": 1.0}), grid, f)
    assert np.max(np.abs(g - f)) < 1e-12


def test_dft_roundtrip_and_parseval(grid):
    rng = np.random.default_rng(4)
    f = rng.standard_normal((16, 16)) + 0j
    fh = bipdo.dft_forward(grid, f)
    assert np.allclose(bipdo.dft_inverse(grid, fh), f, atol=1e-12)
    # ‖f‖₂ with quadrature weights equals ‖f̂‖₂ on the dual lattice (spacing 1/L).
    assert bipdo.lp_norm(grid, f, 2.0) == pytest.approx(np.sqrt(np.sum(np.abs(fh) ** 2)), rel=1e-12)


def test_multiplier_norm_is_symbol_sup(grid):
    s = bipdo.builtin("multiplier_bessel", {"m": -1.0})
    value, iterations, converged = bipdo.l2_opnorm(s, grid)
    assert converged and iterations > 0
    # sup over the lattice of (1+|ξ|²)^{−1/2} is attained at ξ = 0.
    assert value == pytest.approx(1.0, rel=1e-6)


def test_dense_matrix_agrees_with_apply():
    g = bipdo.Grid(1, 1, 8, 1.0)
    s = bipdo.builtin("separable", {"m1": -0.5, "m2": -0.5})
    rng = np.random.default_rng(5)
    f = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    A = bipdo.dense_matrix(s, g)
    assert np.allclose(A @ f.ravel(), bipdo.apply(s, g, f).ravel(), atol=1e-10)
    assert np.linalg.norm(A, 2) == pytest.approx(bipdo.l2_opnorm(s, g)[0], rel=1e-6)


def test_identity_suite_passes():
    checks = bipdo.identity_suite(8)
    assert checks and all(ok for _, ok in checks.values())


def test_strict_config_rejects_unknown_key():
    with pytest.raises(ValueError, match="rho_"):
        bipdo.parse_config('experiment = "ortho"\nrho_ = 0.5\n')


def test_shape_mismatch_raises(grid):
    with pytest.raises(ValueError):
        bipdo.apply(bipdo.builtin("constant", {"c": 1.0}), grid, np.zeros((8, 8), dtype=complex))

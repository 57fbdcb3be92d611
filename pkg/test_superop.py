"""Tests for Choi-first linear maps and the complete positivity checks."""

import numpy as np
import pytest

from app.errors import DimensionMismatch, NotSquare
from app.lab.randomness import random_cp_map, random_map, random_selfadjoint_map
from app.linalg.core import vec
from app.linalg.streams import generator, ginibre, haar_unitary
from app.superop.positivity import (
    contraction_block,
    is_cp,
    is_psd,
    is_selfadjoint_map,
    modulus_block_check,
    sparsity_components,
)
from app.superop.superoperator import (
    adjoint,
    amplify,
    apply,
    commutative_map,
    compose,
    conjugation_map,
    corner,
    from_action,
    has_diagonal_input,
    hs_adjoint,
    identity_map,
    linear_combination,
    liouville,
    opposite,
    tilde,
    trace_map,
    transpose_map,
    zero_map,
)


@pytest.fixture
def rng():
    return generator(2024, "test", "superop")


def test_action_agrees_with_unit_images(rng):
    t = random_map(rng, 3, 2)
    for i in range(3):
        for j in range(3):
            e = np.zeros((3, 3))
            e[i, j] = 1.0
            assert np.allclose(t(e), t.image(i, j))
    x = ginibre(rng, 3)
    assert np.allclose(liouville(t) @ vec(x), vec(apply(t, x)))


def test_compose_applies_right_factor_first(rng):
    s, t = random_map(rng, 2, 3), random_map(rng, 3, 2)
    x = ginibre(rng, 2)
    assert np.allclose(compose(t, s)(x), t(s(x)))
    assert np.allclose((t @ s)(x), t(s(x)))
    with pytest.raises(DimensionMismatch):
        compose(s, s)


def test_opposite_and_adjoints(rng):
    t = random_map(rng, 2, 3)
    x, y = ginibre(rng, 2), ginibre(rng, 3)
    assert np.allclose(opposite(t)(x), t(x.conj().T).conj().T)
    assert np.trace(t(x) @ y) == pytest.approx(np.trace(x @ adjoint(t)(y)))
    assert np.trace(t(x).conj().T @ y) == pytest.approx(np.trace(x.conj().T @ hs_adjoint(t)(y)))
    assert np.allclose(adjoint(adjoint(t)).choi, t.choi)
    assert np.allclose(opposite(opposite(t)).choi, t.choi)


def test_transpose_is_positive_but_not_cp():
    cert = is_cp(transpose_map(2))
    assert not cert
    assert cert.min_eigenvalue == pytest.approx(-1.0, abs=1e-10)
    assert is_cp(identity_map(3))
    assert is_cp(trace_map(2, 3))


def test_certificate_holds_builtin_scalars(rng):
    for t in (identity_map(2), transpose_map(2), random_cp_map(rng, 3)):
        cert = is_cp(t)
        assert type(cert.is_cp) is bool
        assert type(cert.min_eigenvalue) is float
        assert bool(cert) is cert.is_cp
    assert type(is_psd(np.eye(3)).is_cp) is bool
    verdicts = [t for t in (identity_map(2), transpose_map(2)) if is_cp(t)]
    assert len(verdicts) == 1


def test_amplified_map_on_maximally_entangled_matrix_is_choi(rng):
    omega = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            omega[i * 2 + i, j * 2 + j] = 1.0
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert np.allclose(apply(amplify(transpose_map(2), 2), omega), swap)
    t = random_map(rng, 2)
    assert np.allclose(apply(amplify(t, 2), omega), t.choi)
    assert amplify(t, 1) is t


def test_tilde_is_selfadjoint_with_expected_corners(rng):
    t = random_map(rng, 2)
    tt = tilde(t)
    assert is_selfadjoint_map(tt)
    assert np.allclose(corner(tt, 0, 1).choi, t.choi)
    assert np.allclose(corner(tt, 1, 0).choi, opposite(t).choi)
    assert np.allclose(corner(tt, 0, 0).choi, 0.0)
    with pytest.raises(NotSquare):
        tilde(random_map(rng, 2, 3))


def test_selfadjoint_detection(rng):
    assert is_selfadjoint_map(random_selfadjoint_map(rng, 3))
    assert is_selfadjoint_map(random_cp_map(rng, 2, 3))
    assert not is_selfadjoint_map(random_map(rng, 3) * 1j + identity_map(3))


def test_commutative_map_acts_on_diagonals(rng):
    b = ginibre(rng, 3, 2)
    t = commutative_map(b)
    assert (t.in_dim, t.out_dim) == (2, 3)
    assert has_diagonal_input(t)
    assert not has_diagonal_input(identity_map(2))
    x = np.array([1.5, -2.0j])
    assert np.allclose(t(np.diag(x)), np.diag(b @ x))
    assert np.allclose(t(np.array([[0.0, 1.0], [0.0, 0.0]])), 0.0)


def test_modulus_and_contraction_blocks_are_positive(rng):
    b = ginibre(rng, 3, 2)
    assert modulus_block_check(b)
    c = ginibre(rng, 3)
    c = c / np.linalg.norm(c, 2)
    assert is_psd(contraction_block(c), tol=1e-9)


def test_sparsity_components_split_block_diagonal():
    mat = np.zeros((5, 5))
    mat[0, 3] = mat[3, 0] = 1.0
    mat[1, 2] = mat[2, 1] = 1.0
    comps = sorted(sparsity_components(mat))
    assert comps == [[0, 3], [1, 2], [4]]


def test_linear_combination_and_shape_checks(rng):
    t, s = random_map(rng, 2), random_map(rng, 2)
    combo = linear_combination(2.0, t, -1j, s)
    assert np.allclose(combo.choi, (t * 2.0 - s * 1j).choi)
    with pytest.raises(DimensionMismatch):
        linear_combination(1.0, t, 1.0, random_map(rng, 2, 3))
    with pytest.raises(DimensionMismatch):
        from_action(2, 2, [np.eye(2)] * 3)
    with pytest.raises(DimensionMismatch):
        t(np.eye(3))


def test_conjugation_and_zero_maps(rng):
    u = haar_unitary(rng, 3)
    t = conjugation_map(u)
    x = ginibre(rng, 3)
    assert np.allclose(t(x), u @ x @ u.conj().T)
    assert is_cp(t)
    z = zero_map(2, 3)
    assert np.allclose(z(np.eye(2)), np.zeros((3, 3)))
    assert np.allclose((t + zero_map(3, 3)).choi, t.choi)

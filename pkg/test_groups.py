"""Tests for finite groups, 2-cocycles and twisted group algebras."""

import numpy as np
import pytest

from app.errors import InvalidCocycle, InvalidGroup, NotASubgroup
from app.groups.algebra import (
    build_algebra,
    check_symbol,
    conjugate_symbol,
    delta_symbol,
    fourier_multiplier,
    is_selfadjoint_symbol,
    kernel_positive_type_gram,
    multiplier_polynomial,
    project_fourier,
    project_schur,
    random_positive_definite_symbol,
    schur_multiplier,
    unit_symbol,
)
from app.groups.finite_group import (
    FiniteGroup,
    TwoCocycle,
    bicharacter_cocycle,
    coboundary,
    cyclic_group,
    dihedral_group,
    direct_product,
    symmetric_group,
)
from app.lab.randomness import random_coboundary, random_map
from app.lab.sample_data import pauli_algebra, sample_symbol
from app.linalg.core import herm_eig
from app.linalg.streams import generator, ginibre
from app.superop.positivity import is_cp, is_psd
from app.superop.superoperator import identity_map, kraus_map


@pytest.fixture
def rng():
    return generator(7, "test", "groups")


def test_group_constructions():
    z4 = cyclic_group(4)
    assert z4.order == 4 and z4.identity == 0 and z4.is_abelian()
    assert z4.mul(3, 2) == 1 and z4.inv(1) == 3
    s3 = symmetric_group(3)
    assert s3.order == 6 and not s3.is_abelian()
    assert s3.labels[0] == "123"
    d4 = dihedral_group(4)
    assert d4.order == 8 and not d4.is_abelian()
    klein = direct_product(cyclic_group(2), cyclic_group(2))
    assert klein.labels == ("(0,0)", "(0,1)", "(1,0)", "(1,1)")
    assert all(klein.mul(s, s) == klein.identity for s in range(4))


def test_invalid_groups_are_rejected():
    with pytest.raises(InvalidGroup):
        cyclic_group(0)
    with pytest.raises(InvalidGroup):
        FiniteGroup(np.array([[0, 0], [1, 1]]))
    with pytest.raises(InvalidGroup):
        symmetric_group(5)


def test_invalid_cocycles_are_rejected():
    z2 = cyclic_group(2)
    with pytest.raises(InvalidCocycle):
        TwoCocycle(z2, np.array([[1.0, 1.0], [1.0, 2.0]]))
    with pytest.raises(InvalidCocycle):
        TwoCocycle(z2, np.array([[1.0, -1.0], [1.0, 1.0]]))
    with pytest.raises(InvalidCocycle):
        coboundary(z2, np.array([1j, 1.0]))
    assert not TwoCocycle(z2, np.array([[1.0, 1.0], [1.0, -1.0]])).is_trivial


def test_twisted_relations_hold(rng):
    alg = pauli_algebra()
    g, sigma = alg.group, alg.cocycle.sigma
    for s in range(4):
        for t in range(4):
            assert np.allclose(alg.lam(s) @ alg.lam(t), sigma[s, t] * alg.lam(g.mul(s, t)))
    z4 = cyclic_group(4)
    twisted = build_algebra(z4, random_coboundary(z4, rng))
    assert np.allclose(twisted.lam(1) @ twisted.lam(1).conj().T, np.eye(4))


def test_center_dimensions(rng):
    assert pauli_algebra().center_dimension() == 1
    klein = direct_product(cyclic_group(2), cyclic_group(2))
    assert build_algebra(klein).center_dimension() == 4
    z4 = cyclic_group(4)
    assert build_algebra(z4, random_coboundary(z4, rng)).center_dimension() == 4
    assert build_algebra(symmetric_group(3)).center_dimension() == 3
    assert build_algebra(direct_product(cyclic_group(3), cyclic_group(3)), bicharacter_cocycle(3)).center_dimension() == 1


def test_fourier_multiplier_scales_generators(rng):
    alg = build_algebra(symmetric_group(3))
    phi = ginibre(rng, 6, 1)[:, 0]
    m = fourier_multiplier(alg, phi)
    for s in range(6):
        assert np.allclose(m(alg.lam(s)), phi[s] * alg.lam(s))
    assert np.allclose(project_fourier(alg, m), phi)
    assert np.allclose(fourier_multiplier(alg, unit_symbol(alg)).choi, fourier_multiplier(alg, np.ones(6)).choi)
    x = ginibre(rng, 6)
    assert np.allclose(fourier_multiplier(alg, delta_symbol(alg))(x), alg.normalized_trace(x) * np.eye(6))


def test_projections_are_idempotent(rng):
    z4 = cyclic_group(4)
    alg = build_algebra(z4, random_coboundary(z4, rng))
    t = random_map(rng, 4)
    phi = project_fourier(alg, t, subgroup=[0, 2])
    assert phi[1] == 0 and phi[3] == 0
    again = project_fourier(alg, fourier_multiplier(alg, phi), subgroup=[0, 2])
    assert np.allclose(again, phi, atol=1e-12)
    with pytest.raises(NotASubgroup):
        project_fourier(alg, t, subgroup=[0, 1])

    a = ginibre(rng, 3)
    assert np.allclose(project_schur(schur_multiplier(a)), a)


def test_fourier_projection_on_half_subgroup_of_z4():
    alg = build_algebra(cyclic_group(4))
    m = fourier_multiplier(alg, [1.0, 2.0, 3.0, 4.0])
    assert np.allclose(project_fourier(alg, m, subgroup=[0, 2]), [1.0, 0.0, 3.0, 0.0], atol=1e-12)
    assert np.allclose(project_fourier(alg, identity_map(4)), unit_symbol(alg), atol=1e-12)


def test_kernel_gram_matrices():
    alg = build_algebra(cyclic_group(2))
    points = [(0, 0), (0, 1)]
    gram = kernel_positive_type_gram(alg, {(0, 0): [1.0, 0.5]}, points)
    assert np.allclose(gram, [[1.0, 0.5], [0.5, 1.0]])
    assert np.allclose(herm_eig(gram).eigenvalues, [1.5, 0.5], atol=1e-12)
    assert np.allclose(kernel_positive_type_gram(alg, {(0, 0): delta_symbol(alg)}, points), np.eye(2))

    phi = [1.0, 2.0]
    bad = kernel_positive_type_gram(alg, {(0, 0): phi}, points)
    spectrum = herm_eig(bad)
    assert spectrum.min_eigenvalue == pytest.approx(-1.0, abs=1e-12)
    assert not is_psd(bad)
    assert not is_cp(fourier_multiplier(alg, phi))


def test_projection_preserves_complete_positivity(rng):
    alg = pauli_algebra()
    kraus = [ginibre(rng, 4) for _ in range(2)]
    phi = project_fourier(alg, kraus_map(kraus))
    assert is_cp(fourier_multiplier(alg, phi))


def test_selfadjoint_symbols():
    alg = build_algebra(cyclic_group(4))
    assert is_selfadjoint_symbol(alg, [1.0, 0.5, 0.2, 0.5])
    assert not is_selfadjoint_symbol(alg, [1.0, 0.5, 0.2, 0.1])
    assert is_selfadjoint_symbol(alg, [1.0, 0.5j, 0.2, -0.5j])


def test_positive_definite_symbols_give_unital_cp_multipliers(rng):
    for group in (cyclic_group(4), symmetric_group(3)):
        psi = random_positive_definite_symbol(group, rng)
        alg = build_algebra(group)
        assert psi[group.identity] == pytest.approx(1.0)
        m = fourier_multiplier(alg, psi)
        assert is_cp(m)
        assert np.allclose(m(np.eye(group.order)), np.eye(group.order))
        points = [(0, s) for s in range(group.order)]
        assert is_psd(kernel_positive_type_gram(alg, {(0, 0): psi}, points), tol=1e-10)


def test_sample_symbol_on_pauli_algebra_is_cp_unital():
    alg = pauli_algebra()
    m = fourier_multiplier(alg, sample_symbol())
    assert is_cp(m)
    assert np.allclose(m(np.eye(4)), np.eye(4))


def test_multiplier_polynomial():
    phi = np.array([1.0, 0.5j, -2.0])
    assert np.allclose(multiplier_polynomial(phi, [1.0, 0.0, 2.0]), 1.0 + 2.0 * phi ** 2)


def test_check_and_conjugate_symbols():
    alg = build_algebra(cyclic_group(4))
    phi = np.array([1.0, 0.5j, 0.2, 0.1])
    assert np.allclose(check_symbol(alg, phi), [1.0, 0.1, 0.2, 0.5j])
    assert np.allclose(conjugate_symbol(phi), [1.0, -0.5j, 0.2, 0.1])
    assert is_selfadjoint_symbol(alg, phi + conjugate_symbol(check_symbol(alg, phi)))

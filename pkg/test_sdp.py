"""Tests for the SDP layer and the decomposable / cb / Schur norm programs."""

import numpy as np
import pytest
from scipy.optimize import linprog

from app.errors import Infeasible, LabInputError, NotDiagonalInput, NotSelfadjoint, NotSquare, SolverError
from app.groups.algebra import build_algebra, random_decomposable_symbol, schur_multiplier, triangular_symbol
from app.groups.finite_group import cyclic_group
from app.lab.randomness import random_cp_map, random_map, random_selfadjoint_map
from app.lab.sample_data import clock_shift_row, pauli_row
from app.linalg.streams import generator
from app.sdp.norms import (
    cb_norm_inf,
    dec_norm_from_commutative,
    dec_norm_inf,
    dec_norm_one,
    dec_norm_selfadjoint,
    property_P_witness,
    schur_cb_norm,
)
from app.sdp.problem import AffineExpr, SdpProblem, SdpStatus, solve
from app.superop.positivity import is_cp
from app.superop.superoperator import (
    adjoint,
    block2,
    commutative_map,
    identity_map,
    trace_map,
    transpose_map,
)


@pytest.fixture
def rng():
    return generator(99, "test", "sdp")


def test_tiny_program():
    prob = SdpProblem("tiny")
    prob.variable("t", 1, real=True)
    prob.minimize(AffineExpr.scalar().add("t", lambda s: s))
    prob.add_psd(AffineExpr(2, np.array([[0.0, 1.0], [1.0, 0.0]])).add("t", lambda s: s[0, 0] * np.eye(2)))
    sol = solve(prob)
    assert sol.status == SdpStatus.OPTIMAL
    assert sol.primal_objective == pytest.approx(1.0, abs=1e-6)
    assert sol.to_record().status == SdpStatus.OPTIMAL.value


def test_malformed_programs_are_rejected():
    prob = SdpProblem("unused")
    prob.variable("t", 1, real=True)
    prob.variable("u", 2)
    prob.minimize(AffineExpr.scalar().add("t", lambda s: s))
    prob.add_psd(AffineExpr(1, np.array([[1.0]])).add("t", lambda s: s))
    with pytest.raises(SolverError):
        solve(prob)
    with pytest.raises(LabInputError):
        solve(SdpProblem("empty"))
    with pytest.raises(LabInputError):
        prob.variable("t", 3)


def test_standard_decomposable_norms():
    assert dec_norm_inf(identity_map(2)).value == pytest.approx(1.0, abs=1e-5)
    for n in (2, 3):
        dec = dec_norm_inf(transpose_map(n))
        assert dec.certified
        assert dec.value == pytest.approx(float(n), rel=1e-4)
        assert cb_norm_inf(transpose_map(n)).value == pytest.approx(float(n), rel=1e-4)


def test_trace_map_distinguishes_the_two_endpoints():
    t = trace_map(2, 1)
    assert dec_norm_inf(t).value == pytest.approx(2.0, rel=1e-5)
    assert dec_norm_one(t).value == pytest.approx(1.0, rel=1e-5)
    assert dec_norm_inf(adjoint(t)).value == pytest.approx(1.0, rel=1e-5)


def test_witness_blocks_are_completely_positive(rng):
    t = random_map(rng, 2)
    dec = dec_norm_inf(t)
    cert = is_cp(block2(dec.v1, t, dec.v2).assembled)
    assert cert.min_eigenvalue >= -1e-5
    assert np.linalg.norm(dec.v1(np.eye(2)), 2) <= dec.value * (1 + 1e-5)


def test_cb_is_dominated_by_dec(rng):
    for _ in range(3):
        t = random_map(rng, 2)
        assert cb_norm_inf(t).value <= dec_norm_inf(t).value * (1 + 1e-5)


def test_cp_map_decomposable_norm_is_norm_of_unit_image(rng):
    t = random_cp_map(rng, 2, 3)
    expected = np.linalg.norm(t(np.eye(2)), 2)
    assert dec_norm_inf(t).value == pytest.approx(expected, rel=1e-5)
    assert cb_norm_inf(t).value == pytest.approx(expected, rel=1e-5)


def test_selfadjoint_program_agrees_with_general_one(rng):
    t = random_selfadjoint_map(rng, 2)
    assert dec_norm_selfadjoint(t).value == pytest.approx(dec_norm_inf(t).value, rel=1e-4)
    with pytest.raises(NotSelfadjoint):
        dec_norm_selfadjoint(random_map(rng, 2) * 1j + identity_map(2))


def test_unitary_rows():
    assert dec_norm_from_commutative(pauli_row()).value == pytest.approx(2.0, rel=1e-5)
    assert dec_norm_from_commutative(clock_shift_row()).value == pytest.approx(3.0, rel=1e-5)
    assert dec_norm_inf(pauli_row()).value == pytest.approx(2.0, rel=1e-4)
    with pytest.raises(NotDiagonalInput):
        dec_norm_from_commutative(identity_map(2))


def test_commutative_map_norm_is_max_row_sum(rng):
    b = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    expected = float(np.max(np.sum(np.abs(b), axis=1)))
    assert dec_norm_from_commutative(commutative_map(b)).value == pytest.approx(expected, rel=1e-5)


def test_schur_multiplier_norms(rng):
    assert schur_cb_norm(np.ones((3, 3))).value == pytest.approx(1.0, abs=1e-6)
    assert schur_cb_norm(triangular_symbol(2)).value == pytest.approx(2.0 / np.sqrt(3.0), rel=1e-5)
    a = rng.standard_normal((3, 3))
    assert schur_cb_norm(a).value == pytest.approx(dec_norm_inf(schur_multiplier(a)).value, rel=1e-4)
    with pytest.raises(NotSquare):
        schur_cb_norm(np.ones((2, 3)))


def test_property_p_witness(rng):
    z4 = cyclic_group(4)
    alg = build_algebra(z4)
    phi = random_decomposable_symbol(z4, rng)
    witness = property_P_witness(alg, phi)
    assert witness is not None
    assert witness.margin >= -1e-7
    assert witness.psi1[z4.identity] == pytest.approx(1.0, abs=1e-7)
    assert witness.psi2[z4.identity] == pytest.approx(1.0, abs=1e-7)


def test_property_p_rejections():
    z2 = build_algebra(cyclic_group(2))
    with pytest.raises(NotSelfadjoint):
        property_P_witness(z2, [1.0, 0.5j])
    with pytest.raises(Infeasible):
        property_P_witness(z2, [2.0, 2.0])


def test_property_p_on_fixed_symbols():
    z2 = build_algebra(cyclic_group(2))
    unit = property_P_witness(z2, [1.0, 1.0])
    assert unit is not None
    assert np.allclose(unit.psi1, [1.0, 1.0], atol=1e-3)
    assert np.allclose(unit.psi2, [1.0, 1.0], atol=1e-3)

    sign = property_P_witness(z2, [1.0, -1.0])
    assert sign is not None and sign.margin >= -1e-7

    z4 = build_algebra(cyclic_group(4))
    alternating = property_P_witness(z4, [1.0, 0.0, -1.0, 0.0])
    assert alternating is not None and alternating.margin >= -1e-7
    assert alternating.psi1[0] == pytest.approx(1.0, abs=1e-7)


def test_diagonal_program_matches_linear_program(rng):
    n = 5
    cost = rng.uniform(0.5, 2.0, n)
    lower = rng.standard_normal(n)
    budget = float(np.sum(lower)) + 3.0

    prob = SdpProblem("diagonal")
    prob.variable("x", n, real=True, diagonal=True)
    prob.minimize(AffineExpr.scalar().add("x", lambda x: np.sum(cost * np.diag(x))))
    prob.add_psd(AffineExpr(n, -np.diag(lower)).add("x", lambda x: x))
    prob.add_equality(AffineExpr.scalar().add("x", lambda x: np.trace(x)), budget)
    sol = solve(prob)

    lp = linprog(cost, A_eq=np.ones((1, n)), b_eq=[budget], bounds=[(lo, None) for lo in lower])
    assert lp.success
    assert sol.primal_objective == pytest.approx(lp.fun, abs=1e-6)
    assert lp.fun == pytest.approx(float(cost @ lower) + 3.0 * cost.min(), abs=1e-9)
    assert np.allclose(np.real(np.diag(sol.values["x"])), lp.x, atol=1e-5)

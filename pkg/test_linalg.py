"""Tests for the dense linear algebra kernels and random streams."""

import math

import numpy as np
import pytest

from app.errors import DimensionMismatch, InvalidP, NoConvergence, NotHermitian
from app.linalg.core import (
    INF,
    dual_exponent,
    duality_map,
    herm_eig,
    kron,
    parse_exponent,
    partial_trace,
    polar,
    schatten_norm,
    svd,
)
from app.linalg.streams import generator, ginibre, haar_unitary


def random_hermitian(seed: int, n: int) -> np.ndarray:
    x = ginibre(generator(seed, "test", "herm"), n)
    return x + x.conj().T


def test_herm_eig_matches_lapack():
    h = random_hermitian(1, 6)
    spectrum = herm_eig(h)
    assert np.allclose(spectrum.eigenvalues, np.linalg.eigvalsh(h)[::-1], atol=1e-10)
    v = spectrum.eigenvectors
    assert np.allclose(v @ np.diag(spectrum.eigenvalues) @ v.conj().T, h, atol=1e-10)
    assert np.allclose(v.conj().T @ v, np.eye(6), atol=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6, 9, 16, 25, 36])
def test_herm_eig_converges_across_sizes(n):
    seeds = range(20) if n <= 9 else range(3)
    for seed in seeds:
        h = random_hermitian(100 + seed, n)
        for scale in (1.0, 1e6):
            spectrum = herm_eig(scale * h)
            expected = np.linalg.eigvalsh(scale * h)[::-1]
            assert np.allclose(spectrum.eigenvalues, expected, rtol=0, atol=1e-10 * (1 + np.abs(expected).max()))


def test_herm_eig_accepts_diagonal_input_without_sweeps():
    d = np.diag([3.0, -1.0, 2.0])
    spectrum = herm_eig(d, max_sweeps=0)
    assert np.array_equal(spectrum.eigenvalues, [3.0, 2.0, -1.0])


def test_herm_eig_is_deterministic():
    h = random_hermitian(2, 5)
    a, b = herm_eig(h), herm_eig(h)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_herm_eig_errors():
    with pytest.raises(NotHermitian):
        herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NoConvergence):
        herm_eig(random_hermitian(3, 4), max_sweeps=0)


def test_herm_eig_min_eigenpair_of_swap():
    swap = np.eye(4)[[0, 2, 1, 3]]
    spectrum = herm_eig(swap)
    assert spectrum.min_eigenvalue == pytest.approx(-1.0, abs=1e-12)
    vec = spectrum.min_eigenvector
    assert np.allclose(swap @ vec, -vec, atol=1e-12)


def test_schatten_norm_of_identity():
    eye = np.eye(4)
    assert schatten_norm(eye, 1.0) == pytest.approx(4.0)
    assert schatten_norm(eye, 2.0) == pytest.approx(2.0)
    assert schatten_norm(eye, 3.0) == pytest.approx(4 ** (1 / 3))
    assert schatten_norm(eye, INF) == pytest.approx(1.0)


def test_schatten_norm_axioms():
    rng = generator(7, "test", "schatten")
    x, y = ginibre(rng, 4), ginibre(rng, 4)
    u, w = haar_unitary(rng, 4), haar_unitary(rng, 4)
    for p in (1.0, 1.5, 2.0, 4.0, INF):
        assert schatten_norm(x + y, p) <= schatten_norm(x, p) + schatten_norm(y, p) + 1e-9
        assert schatten_norm(u @ x @ w, p) == pytest.approx(schatten_norm(x, p), rel=1e-9)
    assert schatten_norm(x, 2.0) == pytest.approx(np.linalg.norm(x), rel=1e-12)
    assert schatten_norm(x, INF) == pytest.approx(np.linalg.norm(x, 2), rel=1e-12)


def test_schatten_norm_large_exponent_does_not_overflow():
    x = np.diag([1e3, 1.0])
    assert schatten_norm(x, 500.0) == pytest.approx(1e3, rel=1e-9)


def test_exponents():
    assert parse_exponent("inf") == INF
    assert parse_exponent("1.5") == 1.5
    assert dual_exponent(2.0) == 2.0
    assert dual_exponent(3.0) == pytest.approx(1.5)
    assert dual_exponent(1.0) == INF
    assert dual_exponent(INF) == 1.0
    with pytest.raises(InvalidP):
        parse_exponent("0.5")
    with pytest.raises(InvalidP):
        schatten_norm(np.eye(2), float("nan"))


def test_duality_map_norms_its_argument():
    x = ginibre(generator(11, "test", "duality"), 3)
    for p in (1.3, 2.0, 3.0):
        j = duality_map(x, p)
        assert np.trace(j.conj().T @ x).real == pytest.approx(schatten_norm(x, p), rel=1e-9)
        assert schatten_norm(j, dual_exponent(p)) == pytest.approx(1.0, rel=1e-9)
    with pytest.raises(InvalidP):
        duality_map(x, 1.0)


def test_partial_trace_of_product():
    rng = generator(5, "test", "ptrace")
    a, b = ginibre(rng, 2), ginibre(rng, 3)
    ab = kron(a, b)
    assert np.allclose(partial_trace(ab, (2, 3), "first"), np.trace(a) * b)
    assert np.allclose(partial_trace(ab, (2, 3), "second"), np.trace(b) * a)
    with pytest.raises(DimensionMismatch):
        partial_trace(ab, (3, 3), "first")


def test_polar_and_svd():
    x = ginibre(generator(9, "test", "polar"), 4)
    w, mod = polar(x)
    assert np.allclose(w @ mod, x, atol=1e-12)
    assert np.allclose(w.conj().T @ w, np.eye(4), atol=1e-12)
    u, s, v = svd(x)
    assert np.all(np.diff(s) <= 0)
    assert np.allclose((u * s) @ v.conj().T, x, atol=1e-12)


def test_streams_are_reproducible_and_independent():
    a = generator(42, "pnorm", 2, 0).standard_normal(5)
    b = generator(42, "pnorm", 2, 0).standard_normal(5)
    c = generator(42, "pnorm", 2, 1).standard_normal(5)
    d = generator(43, "pnorm", 2, 0).standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)
    assert not np.allclose(a, d)


def test_haar_unitary_is_unitary():
    u = haar_unitary(generator(1, "test", "haar"), 5)
    assert np.allclose(u @ u.conj().T, np.eye(5), atol=1e-12)
    assert math.isclose(abs(np.linalg.det(u)), 1.0, rel_tol=1e-12)

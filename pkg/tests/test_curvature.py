import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crkit.curvature import (
    CurvatureDecomposition,
    TangentVector,
    b2_identity_check,
    complex_structure,
    coupling_inner,
    decompose,
    dtheta,
    f_decompose,
    f_pairing,
    k_theta,
    metric,
    orthonormal_basis,
    recompose,
    reeb,
    riemannian_ricci,
    riemannian_ricci_components,
    sectional_curvature,
    space_form_curvature,
    tanno_classify,
    webster_to_riemannian,
)
from crkit.errors import DomainError, SymmetryError
from crkit.rng import complex_uniform, uniform
from crkit.tensor import (
    TracelessHermitianMatrix,
    WebsterTensor,
    frame_change_webster,
    inner_webster,
    norm_C,
    norm_E,
    random_traceless_hermitian,
    random_unitary,
    random_webster,
    ricci_contraction,
)

from conftest import seeds, small_n


def _vec(n, seed, idx, reeb_part=True):
    h = complex_uniform(seed, idx, n)
    s = float(uniform(seed, idx + 1, 1)[0]) if reeb_part else 0.0
    return TangentVector(h, s)


# -- decomposition ------------------------------------------------------------------

def test_decompose_zero():
    d = decompose(np.zeros((3,) * 4))
    assert d.scalar == 0 and not np.any(d.chern_moser.entries) and not np.any(d.traceless_ricci.entries)


def test_decompose_space_form():
    d = decompose(space_form_curvature(2, 1.0))
    assert d.scalar == 12.0
    assert np.max(np.abs(d.chern_moser.entries)) == 0.0
    assert np.max(np.abs(d.traceless_ricci.entries)) == 0.0


@pytest.mark.parametrize("n,kappa", [(2, 1.0), (3, -0.5), (5, 2.5)])
def test_recompose_scalar_only_is_space_form(n, kappa):
    d = CurvatureDecomposition(
        WebsterTensor(np.zeros((n,) * 4)),
        TracelessHermitianMatrix(np.zeros((n, n))),
        2 * kappa * n * (n + 1),
        n,
    )
    assert np.allclose(recompose(d).entries, space_form_curvature(n, kappa).entries, atol=1e-14)


def test_recompose_passes_chern_moser_through():
    c = random_webster(3, 4, traceless=True)
    d = CurvatureDecomposition(c, TracelessHermitianMatrix(np.zeros((3, 3))), 0.0, 3)
    assert np.array_equal(recompose(d).entries, c.entries)


def test_decompose_rejects_broken_symmetry():
    arr = complex_uniform(0, 0, (2,) * 4)
    with pytest.raises(SymmetryError):
        decompose(arr)


def test_decompose_rejects_n1():
    with pytest.raises(DomainError):
        decompose(np.ones((1,) * 4))


@given(seeds, small_n)
def test_decomposition_roundtrip_and_orthogonality(seed, n):
    r = random_webster(n, seed)
    d = decompose(r)
    scale = norm_C(r)
    assert norm_C(recompose(d).entries - r.entries) <= 1e-12 * scale
    # C is totally traceless
    assert np.max(np.abs(ricci_contraction(d.chern_moser))) <= 1e-12 * scale
    parts = [d.chern_moser.entries, d.ricci_part, d.scalar_part]
    for i in range(3):
        for j in range(i + 1, 3):
            assert abs(inner_webster(parts[i], parts[j])) <= 1e-10 * scale**2
    assert sum(norm_C(p) ** 2 for p in parts) == pytest.approx(scale**2, rel=1e-10)
    # decompose o recompose is the identity on parts
    d2 = decompose(recompose(d))
    assert abs(d2.scalar - d.scalar) <= 1e-12 * scale
    assert np.max(np.abs(d2.traceless_ricci.entries - d.traceless_ricci.entries)) <= 1e-12 * scale
    assert np.max(np.abs(d2.chern_moser.entries - d.chern_moser.entries)) <= 1e-12 * scale


@given(seeds, small_n)
def test_decomposition_is_frame_covariant(seed, n):
    r = random_webster(n, seed)
    u = random_unitary(n, seed, 5)
    a = decompose(frame_change_webster(r, u))
    b = decompose(r)
    assert a.scalar == pytest.approx(b.scalar, abs=1e-10 * norm_C(r))
    assert norm_C(a.chern_moser) == pytest.approx(norm_C(b.chern_moser), rel=1e-10)


# -- space forms and k_theta ---------------------------------------------------------

def test_space_form_entries():
    r = space_form_curvature(2, 1.0).entries
    assert r[0, 0, 0, 0] == 4.0
    assert r[0, 0, 1, 1] == 2.0
    assert not np.any(space_form_curvature(3, 0.0).entries)


def test_k_theta_examples():
    assert k_theta(space_form_curvature(2, 1.0), [1, 0]) == pytest.approx(1.0, abs=1e-15)
    z = complex_uniform(3, 1, 4)
    assert k_theta(space_form_curvature(4, -2.0), z) == pytest.approx(-2.0, rel=1e-14)
    with pytest.raises(DomainError):
        k_theta(space_form_curvature(2, 1.0), [0, 0])


@given(seeds, small_n, st.floats(-5, 5), st.floats(0.1, 10), st.floats(0, 6.28))
def test_k_theta_space_form_and_scale_invariance(seed, n, kappa, mod, phase):
    r = space_form_curvature(n, kappa)
    z = complex_uniform(seed, 0, n)
    assert k_theta(r, z) == pytest.approx(kappa, abs=1e-12 * max(1.0, abs(kappa)))
    g = random_webster(n, seed)
    c = mod * np.exp(1j * phase)
    assert k_theta(g, c * z) == pytest.approx(k_theta(g, z), rel=1e-11, abs=1e-12)
    assert k_theta(g.scaled(mod), z) == pytest.approx(mod * k_theta(g, z), rel=1e-12, abs=1e-12)


def test_tanno_labels():
    assert tanno_classify(1) == "sphere"
    assert tanno_classify(0) == "heisenberg"
    assert tanno_classify(-0.5) == "complex-ball-times-line"


# -- F tensor -------------------------------------------------------------------------

def test_f_decompose_zero():
    fd = f_decompose(np.zeros((3, 3)))
    assert fd.Z == 0 and fd.f == 0
    for t in (fd.F, fd.T, fd.P, fd.Q):
        assert not np.any(t.entries)


def test_f_decompose_diag_example():
    fd = f_decompose(np.diag([1.0, -1.0]))
    assert fd.f == 2.0
    assert fd.Z == 2.0


def test_f_decompose_rejects_trace():
    with pytest.raises(SymmetryError):
        f_decompose(np.eye(2))


@given(seeds, st.integers(min_value=2, max_value=6))
def test_f_tensor_identities(seed, n):
    e = random_traceless_hermitian(n, seed)
    fd = f_decompose(e)
    e2 = norm_E(e) ** 2
    z = fd.Z
    assert fd.f == pytest.approx(0.5 * e2, rel=1e-12)
    assert np.max(np.abs(fd.F.entries - fd.T.entries - fd.P.entries - fd.Q.entries)) <= 1e-12 * e2
    f2 = inner_webster(fd.F, fd.F)
    for a, b in ((fd.T, fd.P), (fd.T, fd.Q), (fd.P, fd.Q)):
        assert abs(inner_webster(a, b)) <= 1e-10 * f2
    assert inner_webster(fd.F, fd.F) / 4 == pytest.approx(0.5 * e2**2 + 2 * z, rel=1e-10)
    assert inner_webster(fd.P, fd.P) / 4 == pytest.approx(4 / (n + 2) * (z - e2**2 / (4 * n)), rel=1e-10, abs=1e-12 * e2**2)
    assert inner_webster(fd.Q, fd.Q) / 4 == pytest.approx(e2**2 / (2 * n * (n + 1)), rel=1e-10)
    # bound on T used in the coupling estimate, with Z <= |E|^4 / 4
    assert z <= e2**2 / 4 * (1 + 1e-12)
    assert inner_webster(fd.T, fd.T) / 4 <= (2 * n * n + 4 * n + 3) / (2 * (n + 1) * (n + 2)) * e2**2 * (1 + 1e-12)


def test_coupling_inner_zero_inputs():
    c = random_webster(3, 1, traceless=True)
    assert coupling_inner(np.zeros((3, 3)), c) == 0.0
    assert coupling_inner(random_traceless_hermitian(3, 1), np.zeros((3,) * 4)) == 0.0


@given(seeds, st.integers(min_value=2, max_value=6))
def test_coupling_inner_three_routes(seed, n):
    e = random_traceless_hermitian(n, seed)
    c = random_webster(n, seed, traceless=True, index=3)
    direct = coupling_inner(e, c)
    scale = norm_E(e) ** 2 * norm_C(c)
    assert abs(direct - f_pairing(e, c)) <= 1e-10 * scale
    assert abs(direct - inner_webster(f_decompose(e).T, c) / 8) <= 1e-10 * scale


def test_coupling_inner_rejects_complex_residual():
    e = random_traceless_hermitian(2, 0).entries
    c = complex_uniform(0, 1, (2,) * 4)
    with pytest.raises(DomainError):
        coupling_inner(e, c)


# -- Riemannian bridge -------------------------------------------------------------------

def test_basis_is_orthonormal():
    b = orthonormal_basis(3)
    g = np.array([[metric(x, y) for y in b] for x in b])
    assert np.allclose(g, np.eye(7), atol=1e-15)


def test_tangent_vector_real_roundtrip():
    v = _vec(3, 1, 0)
    w = TangentVector.from_real(v.as_real())
    assert np.allclose(w.horizontal, v.horizontal) and w.reeb == v.reeb


def test_dtheta_is_metric_of_j():
    x, y = _vec(2, 2, 0), _vec(2, 2, 5)
    assert dtheta(x, y) == pytest.approx(-dtheta(y, x))
    assert dtheta(x, reeb(2)) == 0.0


@pytest.mark.parametrize("kappa", [-1.0, 0.0, 0.3, 1.0, 2.0])
@pytest.mark.parametrize("n", [2, 3])
def test_space_form_sectional_curvatures(n, kappa):
    r = space_form_curvature(n, kappa)
    x = _vec(n, 11, 0, reeb_part=False)
    jx = complex_structure(x)
    assert sectional_curvature(r, x, jx) == pytest.approx(4 * kappa - 3, abs=1e-12)
    assert sectional_curvature(r, x, reeb(n)) == pytest.approx(1.0, abs=1e-12)


def test_reeb_planes_have_unit_curvature_for_any_webster_tensor():
    r = random_webster(3, 7)
    for k in range(5):
        x = _vec(3, 100 + k, 0, reeb_part=False)
        assert sectional_curvature(r, x, reeb(3)) == pytest.approx(1.0, abs=1e-12)


@given(seeds, small_n)
def test_riemannian_ricci_relations(seed, n):
    r = random_webster(n, seed)
    comp = riemannian_ricci_components(r)
    ric = ricci_contraction(r)
    assert np.max(np.abs(comp["hermitian"] - (ric - 2 * np.eye(n)))) <= 1e-12 * max(1.0, np.abs(ric).max())
    assert np.max(np.abs(comp["holomorphic"])) <= 1e-12
    assert np.max(np.abs(comp["mixed"])) <= 1e-12
    assert float(comp["reeb"]) == pytest.approx(2 * n, abs=1e-12)
    full = riemannian_ricci(r)
    assert np.allclose(full, full.T, atol=1e-12)


@given(seeds, small_n)
def test_curvature_antisymmetries(seed, n):
    r = random_webster(n, seed)
    x, y, z, w = (_vec(n, seed, 10 * k) for k in range(4))
    v = webster_to_riemannian(r, x, y, z, w)
    tol = 1e-11 * max(1.0, abs(v)) * max(1.0, norm_C(r))
    assert webster_to_riemannian(r, y, x, z, w) == pytest.approx(-v, abs=tol)
    assert webster_to_riemannian(r, x, y, w, z) == pytest.approx(-v, abs=tol)
    assert webster_to_riemannian(r, z, w, x, y) == pytest.approx(v, abs=tol)


def test_sectional_rejects_parallel_vectors():
    x = _vec(2, 0, 0)
    with pytest.raises(DomainError):
        sectional_curvature(space_form_curvature(2, 1.0), x, 2.0 * x)


# -- b2 identity ---------------------------------------------------------------------------

def test_b2_space_form_both_sides_vanish():
    rec = b2_identity_check(space_form_curvature(3, 0.7))
    assert abs(rec.lhs) <= 1e-12 and abs(rec.rhs) <= 1e-12


@given(seeds, small_n)
def test_b2_identity(seed, n):
    rec = b2_identity_check(random_webster(n, seed))
    assert abs(rec.slack) <= 1e-10 * rec.scale


def test_b2_rhs_nonnegative_for_nonnegative_orthogonal_sectional():
    # a diagonal-type tensor with nonnegative R_{a a b b}: sum of space forms and a
    # traceless-Ricci block built from a positive diagonal
    n = 3
    lam = np.diag([3.0, 1.0, -4.0])
    eye = np.eye(n)
    block = (
        np.einsum("ba,lm->ablm", lam, eye)
        + np.einsum("la,bm->ablm", lam, eye)
        + np.einsum("ab,lm->ablm", eye, lam)
        + np.einsum("al,bm->ablm", eye, lam)
    )
    r = WebsterTensor(0.1 * block + space_form_curvature(n, 2.0).entries)
    k = np.real(np.einsum("aabb->ab", r.entries))
    assert np.all(k >= 0)
    rec = b2_identity_check(r)
    assert rec.rhs >= 0 and abs(rec.slack) <= 1e-10 * rec.scale

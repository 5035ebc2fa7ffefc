import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crkit.conformal import (
    HomotheticBundle,
    as_point,
    d_homothety,
    example_closed_forms,
    horizontal_riemannian_lower_bound,
    nonconstant_scalar_witness,
    ricci_positivity_window,
    transform_ricci_scalar,
    transform_torsion,
)
from crkit.errors import DomainError
from crkit.heisenberg import HeisenbergPoint, abs_z2, constant, gaussian, polynomial, t_coord

E2 = math.exp(-2.0)


def _real_catalogue(n):
    return [
        abs_z2(n),
        gaussian(n, 0.7, 1.3),
        t_coord(n) * 0.3,
        polynomial(n, "z1*zb1*t + t**2 - 1"),
        abs_z2(n) * gaussian(n, 0.5, 0.5) + t_coord(n),
    ]


def _random_points(n, count, seed):
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1.5, 1.5, (count, n)) + 1j * rng.uniform(-1.5, 1.5, (count, n))
    t = rng.uniform(-1.0, 1.0, count)
    return [HeisenbergPoint(z[k], t[k]) for k in range(count)]


def test_example_at_origin():
    d = transform_ricci_scalar(abs_z2(2), HeisenbergPoint([0, 0], 0.0))
    assert np.max(np.abs(d.torsion.entries)) <= 1e-12
    assert np.max(np.abs(d.ricci.entries + 12.0 * np.eye(2))) <= 1e-12
    assert d.scalar == pytest.approx(-24.0, abs=1e-12)
    assert d.traceless_residual <= 1e-12


def test_example_at_unit_point():
    d = transform_ricci_scalar(abs_z2(2), HeisenbergPoint([1, 0], 0.0))
    a = d.torsion.entries
    assert abs(a[0, 0] - (-2j * E2)) <= 1e-12
    assert abs(a[0, 1]) <= 1e-12 and abs(a[1, 1]) <= 1e-12
    assert np.max(np.abs(d.ricci.entries + 24.0 * E2 * np.eye(2))) <= 1e-12
    assert d.scalar == pytest.approx(-48.0 * E2, abs=1e-12)
    assert d.scalar == pytest.approx(-6.496, abs=5e-4)
    assert d.traceless_residual <= 1e-12


def test_displayed_alternative_kept_in_metadata():
    d = transform_ricci_scalar(abs_z2(2), HeisenbergPoint([1, 0], 0.0))
    # lap = 4, |grad|^2 term = 1: -(2*3*4 + 4*3*1) e^-2
    assert d.metadata["scalar_displayed_formula"] == pytest.approx(-36.0 * E2, rel=1e-12)
    assert d.to_dict()["scalar_displayed_formula"] != pytest.approx(d.scalar)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_closed_forms_at_random_points(n):
    for p in _random_points(n, 1000 if n == 2 else 100, seed=n):
        d = transform_ricci_scalar(abs_z2(n), p)
        ref = example_closed_forms(n, p.z)
        scale = max(1.0, abs(ref["scalar"]))
        assert np.max(np.abs(d.torsion.entries - ref["torsion"])) <= 1e-12
        assert np.max(np.abs(d.ricci.entries - ref["ricci"])) <= 1e-12 * scale
        assert abs(d.scalar - ref["scalar"]) <= 1e-12 * scale
        assert d.traceless_residual <= 1e-12 * scale


def test_zero_factor_is_identity():
    for p in _random_points(2, 10, 7):
        d = transform_ricci_scalar(constant(2, 0), p)
        assert np.all(d.ricci.entries == 0) and d.scalar == 0
        assert np.all(transform_torsion(constant(2, 0), p).entries == 0)
        assert d.webster_scale == 1.0


@pytest.mark.parametrize("n", [1, 2])
def test_hermitian_and_trace_consistent(n):
    for u in _real_catalogue(n):
        for p in _random_points(n, 8, 11):
            d = transform_ricci_scalar(u, p)
            r = d.ricci.entries
            assert np.max(np.abs(r - r.conj().T)) <= 1e-12 * max(1.0, np.max(np.abs(r)))
            assert d.scalar == float(np.real(np.trace(r)))
            tor = d.torsion.entries
            assert np.max(np.abs(tor - tor.T)) == 0


def test_complex_factor_rejected():
    with pytest.raises(DomainError):
        transform_ricci_scalar(polynomial(1, "z1"), HeisenbergPoint([0.5 + 0.5j], 0.0))


def test_witness_example():
    w = nonconstant_scalar_witness([[0, 0], [1, 0]], 2)
    assert w.scalars == pytest.approx([-24.0, -48.0 * E2], abs=1e-12)
    assert w.nonconstant and w.pseudo_einstein
    assert "divergence" in w.consequence
    assert w.to_dict()["kind"] == "nonconstant-scalar"


def test_witness_inconclusive_cases():
    with pytest.raises(DomainError):
        nonconstant_scalar_witness([[0, 0]], 2)
    with pytest.raises(DomainError):
        nonconstant_scalar_witness([[1, 0], [0, 1j], {"z": [[0, 1], [0, 0]], "t": 2.0}], 2)


def test_point_parsing():
    p = as_point({"z": [[1, 2], 3], "t": 0.5})
    assert p.z[0] == 1 + 2j and p.z[1] == 3 and p.t == 0.5
    with pytest.raises(DomainError):
        as_point([[1, 2, 3]])


# -- D-homothety ----------------------------------------------------------------

def _bundle(n=2, seed=0, size=50):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(size, n, n)) + 1j * rng.normal(size=(size, n, n))
    ric = a + np.conj(np.swapaxes(a, -1, -2))
    return HomotheticBundle(
        n=n,
        ricci=ric,
        scalar=np.real(np.trace(ric, axis1=-2, axis2=-1)),
        chern_moser_norm=rng.uniform(0, 3, size),
        traceless_ricci_norm=rng.uniform(0, 3, size),
        torsion=rng.normal(size=(size, n, n)),
        volume_density=rng.uniform(0.1, 1, size),
    )


def test_homothety_identity():
    b = _bundle()
    out = d_homothety(b, 1.0)
    for k, v in b.fields().items():
        assert np.array_equal(out.fields()[k], v)


def test_homothety_preserves_lp_functional():
    b = _bundle(n=2)
    out = d_homothety(b, 2.0)
    # |C|^3 picks up 2^-3 and the volume 2^3
    assert out.lp_functional() / b.lp_functional() == pytest.approx(1.0, rel=1e-14)
    assert np.allclose(out.ricci, b.ricci / 2)


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.integers(2, 5))
def test_homothety_composition(l1, l2, n):
    b = _bundle(n=n, size=5)
    lhs = d_homothety(d_homothety(b, l2), l1).fields()
    rhs = d_homothety(b, l1 * l2).fields()
    for k in lhs:
        assert np.allclose(lhs[k], rhs[k], rtol=1e-12, atol=0), k
    assert d_homothety(b, l1).lp_functional() == pytest.approx(b.lp_functional(), rel=1e-10)


@pytest.mark.parametrize("lam", [0.0, -1.0])
def test_homothety_rejects_nonpositive(lam):
    with pytest.raises(DomainError):
        d_homothety(_bundle(), lam)


def test_ricci_positivity_window():
    assert ricci_positivity_window(3.0) == 1.5
    assert horizontal_riemannian_lower_bound(3.0, 1.4) > 0
    assert horizontal_riemannian_lower_bound(3.0, 1.5) == 0
    assert horizontal_riemannian_lower_bound(3.0, 1.6) < 0
    with pytest.raises(DomainError):
        ricci_positivity_window(0.0)

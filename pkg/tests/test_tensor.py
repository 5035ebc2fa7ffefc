import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crkit.errors import DomainError, SymmetryError
from crkit.rng import complex_uniform
from crkit.tensor import (
    HermitianMatrix,
    SlackRecord,
    TorsionMatrix,
    TracelessHermitianMatrix,
    WebsterTensor,
    dumps,
    frame_change_matrix,
    frame_change_webster,
    from_json_dict,
    hermitian_eigen,
    inner_webster,
    loads,
    norm_C,
    norm_E,
    norm_gradC,
    norm_gradE,
    project_webster_symmetry,
    random_hermitian,
    random_traceless_hermitian,
    random_unitary,
    random_webster,
    ricci_contraction,
    to_json_dict,
)

from conftest import rel_err, scales, seeds, small_n


# -- containers ------------------------------------------------------------------

def test_hermitian_rejects_asymmetric():
    with pytest.raises(SymmetryError):
        HermitianMatrix(np.array([[1, 2], [3, 1]]))


def test_traceless_rejects_trace():
    with pytest.raises(SymmetryError):
        TracelessHermitianMatrix(np.eye(2))


def test_torsion_symmetric_and_sasakian_flag():
    assert TorsionMatrix(np.zeros((2, 2))).is_sasakian
    assert not TorsionMatrix(np.array([[0, 1j], [1j, 0]])).is_sasakian
    with pytest.raises(SymmetryError):
        TorsionMatrix(np.array([[0, 1], [-1, 0]]))


def test_webster_rejects_broken_bianchi():
    arr = np.zeros((2,) * 4, dtype=complex)
    arr[0, 0, 1, 1] = 1.0
    with pytest.raises(SymmetryError):
        WebsterTensor(arr)


def test_nonfinite_rejected():
    with pytest.raises(DomainError):
        HermitianMatrix(np.array([[np.nan, 0], [0, 1]]))


def test_containers_are_immutable():
    m = HermitianMatrix(np.eye(2))
    with pytest.raises(ValueError):
        m.entries[0, 0] = 3


def test_slack_record():
    r = SlackRecord.of(1.0, 3.0, {"x": 1}, scale=2.0)
    assert r.slack == 2.0 and r.ratio == pytest.approx(2.0 / 3.0)
    assert not r.violated()
    assert SlackRecord.of(1.0 + 1e-9, 1.0, scale=1.0).violated(1e-10)
    assert not SlackRecord.of(1.0 + 1e-11, 1.0, scale=1.0).violated(1e-10)
    assert set(r.to_dict()) == {"lhs", "rhs", "slack", "scale", "witness"}


# -- eigensolver -------------------------------------------------------------------

def test_eigen_identity():
    w, u = hermitian_eigen(np.eye(3))
    assert np.allclose(w, 1.0)
    assert np.allclose(np.abs(u), np.abs(u).round())  # a permutation up to phases


def test_eigen_diagonal_descending():
    w, _ = hermitian_eigen(np.diag([-1.0, 2.0, -1.0]))
    assert np.allclose(w, [2.0, -1.0, -1.0])


def _det(m):
    # cofactor expansion along the first row
    if m.shape[0] == 1:
        return m[0, 0]
    return sum((-1) ** j * m[0, j] * _det(np.delete(m[1:], j, axis=1)) for j in range(m.shape[0]))


def _bisection_roots(m):
    bound = float(np.sqrt(np.sum(np.abs(m) ** 2))) + 1.0
    f = lambda x: float(np.real(_det(m - x * np.eye(m.shape[0]))))
    xs = np.linspace(-bound, bound, 4001)
    fs = [f(x) for x in xs]
    roots = []
    for a, b, fa, fb in zip(xs, xs[1:], fs, fs[1:]):
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0:
            for _ in range(80):
                mid = 0.5 * (a + b)
                fm = f(mid)
                if fa * fm <= 0:
                    b = mid
                else:
                    a, fa = mid, fm
            roots.append(0.5 * (a + b))
    return np.sort(roots)[::-1]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_eigen_matches_characteristic_roots(seed):
    m = random_hermitian(4, seed).entries
    w, _ = hermitian_eigen(m)
    roots = _bisection_roots(m)
    assert len(roots) == 4
    assert np.allclose(w, roots, atol=1e-9)


def test_eigen_rejects_non_hermitian():
    with pytest.raises(SymmetryError):
        hermitian_eigen(np.array([[0, 1], [0, 0]]))


@given(seeds, st.integers(min_value=2, max_value=8))
def test_eigen_properties(seed, n):
    m = random_hermitian(n, seed).entries
    w, u = hermitian_eigen(m)
    assert np.all(np.diff(w) <= 0)
    assert np.allclose(u.conj().T @ u, np.eye(n), atol=1e-12)
    assert abs(w.sum() - np.trace(m).real) <= 1e-12 * max(1.0, np.abs(m).max()) * n
    recon = u @ np.diag(w) @ u.conj().T
    assert np.max(np.abs(recon - m)) <= 1e-10 * np.sqrt(np.sum(np.abs(m) ** 2))


# -- Webster projector ---------------------------------------------------------------

def _group():
    """Closure of the generator maps acting on positions, with a conjugation flag."""
    gens = [((0, 2, 1, 3), False), ((3, 1, 2, 0), False), ((1, 0, 3, 2), True)]
    elems = {((0, 1, 2, 3), False)}
    frontier = list(elems)
    while frontier:
        new = []
        for p, c in frontier:
            for q, d in gens:
                comp = (tuple(p[i] for i in q), c ^ d)
                if comp not in elems:
                    elems.add(comp)
                    new.append(comp)
        frontier = new
    return elems


def test_symmetry_group_has_order_eight():
    assert len(_group()) == 8


@pytest.mark.parametrize("pos", [(0, 1, 1, 0), (0, 0, 1, 1), (1, 0, 1, 0), (0, 1, 0, 1)])
def test_projector_spreads_unit_entry_over_orbit(pos):
    n = 2
    raw = np.zeros((n,) * 4, dtype=complex)
    raw[pos] = 1j
    want = np.zeros_like(raw)
    group = _group()
    for q in itertools.product(range(n), repeat=4):
        acc = 0
        for perm, conj in group:
            v = raw[tuple(q[i] for i in perm)]
            acc += np.conj(v) if conj else v
        want[q] = acc / len(group)
    got = project_webster_symmetry(raw).entries
    assert np.max(np.abs(got - want)) <= 1e-15
    assert norm_C(got) ** 2 == pytest.approx(4.0 * np.sum(np.abs(want) ** 2))


@given(seeds, small_n)
def test_projector_idempotent(seed, n):
    p = project_webster_symmetry(complex_uniform(seed, 0, (n,) * 4))
    assert np.max(np.abs(project_webster_symmetry(p).entries - p.entries)) <= 1e-14


@given(seeds, small_n, scales)
def test_projector_commutes_with_real_scaling(seed, n, s):
    raw = complex_uniform(seed, 0, (n,) * 4)
    a = project_webster_symmetry(s * raw).entries
    b = s * project_webster_symmetry(raw).entries
    assert np.max(np.abs(a - b)) <= 1e-14 * s


@given(seeds, small_n)
def test_projected_tensor_has_hermitian_ricci(seed, n):
    r = random_webster(n, seed)
    for contraction in ("aalm->lm", "abam->bm", "ablb->al", "abll->ab"):
        ric = np.einsum(contraction, r.entries)
        assert np.max(np.abs(ric - ric.conj().T)) <= 1e-14


# -- norms --------------------------------------------------------------------------

def test_norm_examples():
    assert norm_E(np.zeros((2, 2))) == 0.0
    assert norm_E(np.diag([1.0, -1.0])) == pytest.approx(2.0)
    assert norm_C(np.zeros((2,) * 4)) == 0.0
    assert norm_gradC(np.zeros((2,) * 5)) == 0.0
    d = np.zeros((2,) * 5)
    d[0, 0, 0, 0, 0] = 1.0
    assert norm_gradC(d) ** 2 == pytest.approx(8.0)
    e = np.zeros((2,) * 3)
    e[0, 1, 0] = 1.0
    assert norm_gradE(e) ** 2 == pytest.approx(4.0)


@given(seeds, st.integers(min_value=2, max_value=7))
def test_norm_E_from_eigenvalues(seed, n):
    e = random_traceless_hermitian(n, seed)
    w, _ = hermitian_eigen(e)
    assert norm_E(e) ** 2 == pytest.approx(2.0 * np.sum(w**2), rel=1e-12)


@given(seeds, small_n, scales)
def test_norm_C_homogeneous(seed, n, s):
    c = random_webster(n, seed, traceless=True)
    assert norm_C(c.scaled(-s)) == pytest.approx(s * norm_C(c), rel=1e-13)


@given(seeds, small_n)
def test_norms_unitarily_invariant(seed, n):
    u = random_unitary(n, seed, 1)
    e = random_traceless_hermitian(n, seed)
    r = random_webster(n, seed, index=2)
    e2 = frame_change_matrix(e, u)
    r2 = frame_change_webster(r, u)
    assert abs(norm_E(e2) - norm_E(e)) <= 1e-10 * norm_E(e)
    assert abs(norm_C(r2) - norm_C(r)) <= 1e-10 * norm_C(r)
    # frame change preserves the symmetry class and commutes with contraction
    WebsterTensor(r2)
    assert np.allclose(ricci_contraction(r2), frame_change_matrix(ricci_contraction(r), u), atol=1e-12)


def test_inner_product_matches_norm():
    c = random_webster(3, 5)
    assert inner_webster(c, c) == pytest.approx(norm_C(c) ** 2)


# -- random generators ----------------------------------------------------------------

def test_random_generators_deterministic():
    assert random_webster(3, 42).entries.tobytes() == random_webster(3, 42).entries.tobytes()
    assert random_traceless_hermitian(4, 9).entries.tobytes() == random_traceless_hermitian(4, 9).entries.tobytes()
    assert random_webster(3, 42).entries.tobytes() != random_webster(3, 43).entries.tobytes()


@pytest.mark.parametrize("n", [0, 1])
def test_random_generators_reject_small_n(n):
    with pytest.raises(DomainError):
        random_webster(n, 0)
    with pytest.raises(DomainError):
        random_traceless_hermitian(n, 0)


@given(seeds, small_n)
def test_random_traceless_outputs(seed, n):
    assert abs(np.trace(random_traceless_hermitian(n, seed).entries)) <= 1e-12
    c = random_webster(n, seed, traceless=True).entries
    for contraction in ("aalm->lm", "abam->bm", "ablb->al", "abll->ab"):
        assert np.max(np.abs(np.einsum(contraction, c))) <= 1e-12


# -- JSON -----------------------------------------------------------------------------

@given(seeds, small_n)
def test_json_roundtrip(seed, n):
    for obj in (random_webster(n, seed), random_hermitian(n, seed), TorsionMatrix(np.diag(np.arange(n) * 1j))):
        back = loads(dumps(obj))
        assert type(back) is type(obj)
        assert np.array_equal(back.entries, obj.entries)


def test_json_lists_only_nonzero_entries():
    doc = to_json_dict(HermitianMatrix(np.diag([1.0, 0.0])))
    assert doc == {"kind": "hermitian", "n": 2, "entries": [[0, 0, 1.0, 0.0]]}
    assert json.loads(json.dumps(doc)) == doc


@pytest.mark.parametrize(
    "doc",
    [
        {"kind": "hermitian", "n": 2, "entries": [[0, 2, 1.0, 0.0]]},
        {"kind": "hermitian", "n": 2, "entries": [[-1, 0, 1.0, 0.0]]},
        {"kind": "hermitian", "n": 2, "entries": [[0, 0, 1.0]]},
        {"kind": "spinor", "n": 2, "entries": []},
        {"n": 2, "entries": []},
    ],
)
def test_json_rejects_bad_documents(doc):
    with pytest.raises(DomainError):
        from_json_dict(doc)


def test_json_reader_validates_symmetry():
    with pytest.raises(SymmetryError):
        from_json_dict({"kind": "hermitian", "n": 2, "entries": [[0, 1, 1.0, 0.0]]})

import numpy as np
import pytest

from recip_core import pauli2
from recip_core.errors import PreconditionError
from recip_core.pauli2 import AxisAngleUnitary, PauliForm


def random_form(rng, scale=1.0):
    z = rng.normal(size=8) * scale
    return PauliForm(complex(z[0], z[1]), z[2:5] + 1j * z[5:8])

def random_unitary(rng):
    n = rng.normal(size=3)
    return AxisAngleUnitary(rng.uniform(0, 2*np.pi), rng.uniform(0, 2*np.pi), n / np.linalg.norm(n))

def expm_oracle(M, terms=20):
    # scaling and squaring with a truncated Taylor series
    squarings = max(0, int(np.ceil(np.log2(max(np.linalg.norm(M), 1e-300)))) + 1)
    A = M / 2**squarings
    result, term = np.eye(2, dtype=complex), np.eye(2, dtype=complex)
    for j in range(1, terms + 1):
        term = term @ A / j
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return result


def test_decompose_examples():
    s1 = pauli2.decompose([[0, 1], [1, 0]])
    assert s1.v0 == 0
    np.testing.assert_allclose(s1.v, [1, 0, 0])
    eye = pauli2.decompose(np.eye(2))
    assert eye.v0 == 1
    np.testing.assert_allclose(eye.v, 0)
    v0, v1, v2, v3 = 0.5 - 1j, 2.0 + 1j, -0.25j, 3.0
    p = pauli2.decompose([[v0 + v3, v1 - 1j*v2], [v1 + 1j*v2, v0 - v3]])
    assert p.v0 == pytest.approx(v0)
    np.testing.assert_allclose(p.v, [v1, v2, v3])

def test_decompose_rejects_wrong_shape():
    with pytest.raises(ValueError):
        pauli2.decompose(np.eye(3))

def test_compose_sigma2_and_identity():
    np.testing.assert_array_equal(pauli2.compose(PauliForm(0, (0, 1, 0))), [[0, -1j], [1j, 0]])
    np.testing.assert_array_equal(pauli2.compose(pauli2.identity()), np.eye(2))

def test_compose_decompose_round_trip():
    rng = np.random.default_rng(1)
    for _ in range(100):
        M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        np.testing.assert_allclose(pauli2.compose(pauli2.decompose(M)), M, atol=1e-14)

def test_transpose_pauli():
    t = pauli2.transpose_pauli(pauli2.sigma(2))
    np.testing.assert_array_equal(t.v, [0, -1, 0])
    sym = PauliForm(1j, (1, 0, 2 - 1j))
    np.testing.assert_array_equal(pauli2.transpose_pauli(sym).v, sym.v)
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = random_form(rng)
        np.testing.assert_allclose(pauli2.compose(pauli2.transpose_pauli(p)), pauli2.compose(p).T, atol=1e-14)
        twice = pauli2.transpose_pauli(pauli2.transpose_pauli(p))
        np.testing.assert_array_equal(twice.v, p.v)

def test_mul_examples():
    p = pauli2.mul(pauli2.sigma(1), pauli2.sigma(2))
    assert p.v0 == 0
    np.testing.assert_allclose(p.v, [0, 0, 1j])
    q = PauliForm(0.3, (1j, 2, -1))
    r = pauli2.identity() @ q
    assert r.v0 == q.v0
    np.testing.assert_array_equal(r.v, q.v)

def test_mul_matches_matrix_product():
    rng = np.random.default_rng(3)
    for _ in range(200):
        a, b = random_form(rng), random_form(rng)
        direct = pauli2.compose(a) @ pauli2.compose(b)
        np.testing.assert_allclose(pauli2.compose(pauli2.mul(a, b)), direct, atol=1e-12)

def test_form_arithmetic():
    a, b = PauliForm(1, (1, 2, 3)), PauliForm(2j, (0, 1j, -1))
    np.testing.assert_allclose(pauli2.compose(a + b), pauli2.compose(a) + pauli2.compose(b))
    np.testing.assert_allclose(pauli2.compose(a - b), pauli2.compose(a) - pauli2.compose(b))
    np.testing.assert_allclose(pauli2.compose(np.float64(2.0) * a), 2 * pauli2.compose(a))
    np.testing.assert_allclose(pauli2.compose(-a), -pauli2.compose(a))
    assert a.norm() == pytest.approx(np.linalg.norm(pauli2.compose(a)))

def test_exp2_examples():
    zero = pauli2.exp2(PauliForm(0, np.zeros(3)))
    assert zero.v0 == 1
    np.testing.assert_array_equal(zero.v, 0)
    scalar = pauli2.exp2(PauliForm(0.7j, np.zeros(3)))
    assert scalar.v0 == pytest.approx(np.exp(0.7j))
    diag = pauli2.exp2(pauli2.decompose(np.diag([0.4 - 1j, -2.0 + 0.5j])))
    np.testing.assert_allclose(pauli2.compose(diag), np.diag(np.exp([0.4 - 1j, -2.0 + 0.5j])), atol=1e-12)

@pytest.mark.parametrize("d1, d2", [(0, -1600), (-1600j, -1500 - 3j), (-2000, -700 + 40j)])
def test_exp2_widely_split_eigenvalues(d1, d2):
    got = pauli2.compose(pauli2.exp2(pauli2.decompose(np.diag([d1, d2]))))
    assert np.all(np.isfinite(got))
    np.testing.assert_allclose(got, np.diag(np.exp([d1, d2])), atol=1e-11)

def test_exp2_small_argument_series():
    p = PauliForm(0.1, (1e-6, 2e-6j, -1e-6))
    np.testing.assert_allclose(pauli2.compose(pauli2.exp2(p)), expm_oracle(pauli2.compose(p)), atol=1e-14)

def test_exp2_matches_taylor_oracle():
    rng = np.random.default_rng(4)
    for _ in range(1000):
        M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        M *= rng.uniform(0, 10) / np.linalg.norm(M)
        expected = expm_oracle(M)
        got = pauli2.compose(pauli2.exp2(pauli2.decompose(M)))
        assert np.linalg.norm(got - expected) <= 1e-10 * max(1.0, np.linalg.norm(expected))

@pytest.mark.parametrize("u, expected", [
    (AxisAngleUnitary(0, 0, (1, 0, 0)), np.eye(2)),
    (AxisAngleUnitary(0, np.pi, (0, 0, 1)), -1j * np.diag([1, -1])),
    (AxisAngleUnitary(0, np.pi, (0, 1, 0)), np.array([[0, -1], [1, 0]])),
])
def test_unitary_matrix_examples(u, expected):
    np.testing.assert_allclose(pauli2.compose(pauli2.unitary_matrix(u)), expected, atol=1e-15)

def test_unitary_matrix_is_unitary():
    rng = np.random.default_rng(5)
    for _ in range(50):
        assert pauli2.is_unitary(pauli2.unitary_matrix(random_unitary(rng)), 1e-12)

def test_axis_angle_unitary_normalizes_angles_and_checks_axis():
    u = AxisAngleUnitary(-np.pi / 2, 5 * np.pi, (0, 1, 0))
    assert u.delta == pytest.approx(1.5 * np.pi)
    assert u.phi == pytest.approx(np.pi)
    with pytest.raises(PreconditionError):
        AxisAngleUnitary(0, 1, (1, 1, 0))

def test_rotation_of_identity_and_half_turn():
    rotation = pauli2.rotation_of(AxisAngleUnitary(0, 0, (0, 0, 1)))
    np.testing.assert_allclose(rotation.matrix(), np.eye(3))
    half = pauli2.rotation_of(AxisAngleUnitary(0, np.pi, (0, 0, 1)))
    np.testing.assert_allclose(half.apply([1, 0, 0]), [-1, 0, 0], atol=1e-15)

def test_conjugation_rotates_poincare_vectors():
    rng = np.random.default_rng(6)
    for _ in range(100):
        u = random_unitary(rng)
        x = PauliForm(rng.normal(), rng.normal(size=3))
        U = pauli2.compose(pauli2.unitary_matrix(u))
        direct = U @ pauli2.compose(x) @ np.linalg.inv(U)
        rotated = PauliForm(x.v0, pauli2.rotate3(u.n, u.phi, x.v.real))
        np.testing.assert_allclose(direct, pauli2.compose(rotated), atol=1e-10)
        np.testing.assert_allclose(pauli2.compose(pauli2.conjugate(x, u)), direct, atol=1e-12)

def test_rotate3_examples():
    np.testing.assert_allclose(pauli2.rotate3((0, 1, 0), 1.1, (0, 3, 0)), (0, 3, 0))
    np.testing.assert_allclose(pauli2.rotate3((0, 0, 1), np.pi / 2, (1, 0, 0)), (0, 1, 0), atol=1e-15)
    with pytest.raises(PreconditionError):
        pauli2.rotate3((1, 1, 0), 0.3, (1, 0, 0))

def test_rotate3_group_law():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        a, b = rng.uniform(-4, 4, size=2)
        x = rng.normal(size=3)
        np.testing.assert_allclose(pauli2.rotate3(n, a, pauli2.rotate3(n, b, x)), pauli2.rotate3(n, a + b, x), atol=1e-12)
        np.testing.assert_allclose(pauli2.rotation_matrix(n, a) @ x, pauli2.rotate3(n, a, x), atol=1e-12)

def test_axis_angle_of_round_trip_with_canonical_axis():
    rng = np.random.default_rng(8)
    for _ in range(200):
        p = pauli2.unitary_matrix(random_unitary(rng))
        u = pauli2.axis_angle_of(p)
        np.testing.assert_allclose(pauli2.compose(pauli2.unitary_matrix(u)), pauli2.compose(p), atol=1e-10)
        first = next(x for x in u.n if abs(x) > 1e-12)
        assert first > 0

def test_axis_angle_of_special_cases():
    u = pauli2.axis_angle_of(pauli2.sigma(1))
    assert u.phi == pytest.approx(np.pi)
    np.testing.assert_allclose(u.n, [1, 0, 0])
    minus = pauli2.axis_angle_of(-pauli2.identity())
    assert minus.phi == 0
    np.testing.assert_array_equal(minus.n, [0, 0, 1])
    assert minus.delta == pytest.approx(np.pi)
    with pytest.raises(PreconditionError):
        pauli2.axis_angle_of(PauliForm(2, np.zeros(3)))

def test_axis_angle_from_rotation_round_trip():
    rng = np.random.default_rng(9)
    angles = list(rng.uniform(0, 2*np.pi, size=100)) + [np.pi, np.pi - 1e-9, 1e-9]
    for phi in angles:
        n = rng.normal(size=3)
        R = pauli2.rotation_matrix(n / np.linalg.norm(n), phi)
        u = pauli2.axis_angle_from_rotation(R)
        assert u.delta == 0
        np.testing.assert_allclose(pauli2.rotation_of(u).matrix(), R, atol=1e-9)

def test_axis_angle_from_rotation_rejects_reflections():
    with pytest.raises(PreconditionError):
        pauli2.axis_angle_from_rotation(np.diag([1., -1., 1.]))

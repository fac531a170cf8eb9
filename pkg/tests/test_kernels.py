"""Backend equivalence: the compiled kernels and the numpy fallbacks must agree."""

import importlib

import numpy as np
import pytest

from qbatt import _kernels_py
from qbatt._backend import backend_name, kernels

BACKENDS = [_kernels_py]
try:
    from qbatt import _kernels  # noqa: F401

    BACKENDS.append(_kernels)
except ImportError:
    pass


def random_hermitian(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return np.ascontiguousarray((g + g.conj().T) / 2)


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
class TestMaxQuadraticForm:
    def test_identity_matrix_all_ones(self, mod):
        rng = np.random.default_rng(0)
        draws = np.ascontiguousarray(rng.standard_normal((50, 8)).view(np.complex128))
        val, idx = mod.max_quadratic_form(np.eye(4, dtype=np.complex128), draws)
        assert abs(val - 1.0) < 1e-12
        assert 0 <= idx < 50

    def test_rayleigh_bound(self, mod):
        rng = np.random.default_rng(1)
        b = random_hermitian(4, rng)
        top = np.linalg.eigvalsh(b)[-1]
        draws = np.ascontiguousarray(rng.standard_normal((2000, 8)).view(np.complex128))
        val, _ = mod.max_quadratic_form(b, draws)
        assert val <= top + 1e-9

    def test_dimension_mismatch(self, mod):
        with pytest.raises(ValueError):
            mod.max_quadratic_form(np.eye(4, dtype=np.complex128), np.zeros((3, 5), dtype=np.complex128))

    def test_empty_draws(self, mod):
        with pytest.raises(ValueError):
            mod.max_quadratic_form(np.eye(4, dtype=np.complex128), np.zeros((0, 4), dtype=np.complex128))


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
class TestProductRotationExpectation:
    def test_identity_angles(self, mod):
        rng = np.random.default_rng(2)
        b = random_hermitian(4, rng)
        seed = rng.standard_normal(8).view(np.complex128)
        seed = np.ascontiguousarray(seed / np.linalg.norm(seed))
        got = mod.product_rotation_expectation(np.zeros(6), b, seed)
        expected = float(np.real(seed.conj() @ b @ seed))
        assert abs(got - expected) < 1e-12

    def test_matches_dense_construction(self, mod):
        from qbatt.optimizer import single_qubit_unitary

        rng = np.random.default_rng(3)
        for _ in range(50):
            b = random_hermitian(4, rng)
            seed = rng.standard_normal(8).view(np.complex128)
            seed = np.ascontiguousarray(seed / np.linalg.norm(seed))
            angles = rng.uniform(0, 2 * np.pi, size=6)
            u = np.kron(single_qubit_unitary(*angles[:3]), single_qubit_unitary(*angles[3:]))
            w = u @ seed
            expected = float(np.real(w.conj() @ b @ w))
            got = mod.product_rotation_expectation(angles, b, seed)
            assert abs(got - expected) < 1e-12


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
class TestBackendAgreement:
    def test_quadratic_form_matches(self):
        rng = np.random.default_rng(7)
        b = random_hermitian(8, rng)
        draws = np.ascontiguousarray(rng.standard_normal((5000, 16)).view(np.complex128))
        v_py, i_py = _kernels_py.max_quadratic_form(b, draws)
        v_cy, i_cy = _kernels.max_quadratic_form(b, draws)
        assert i_py == i_cy
        assert abs(v_py - v_cy) < 1e-12

    def test_objective_matches(self):
        rng = np.random.default_rng(8)
        b = random_hermitian(4, rng)
        seed = rng.standard_normal(8).view(np.complex128)
        seed = np.ascontiguousarray(seed / np.linalg.norm(seed))
        for _ in range(200):
            angles = rng.uniform(-np.pi, np.pi, size=6)
            assert abs(
                _kernels_py.product_rotation_expectation(angles, b, seed)
                - _kernels.product_rotation_expectation(angles, b, seed)
            ) < 1e-13


def test_backend_name_is_reported():
    assert backend_name() in ("compiled", "pure")
    assert kernels.__name__.endswith(("_kernels", "_kernels_py"))


def test_pure_env_flag_forces_fallback():
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c", "import qbatt; print(qbatt.backend_name())"],
        capture_output=True,
        text=True,
        env={"QBATT_PURE": "1", "PATH": "/usr/bin:/bin"},
    )
    assert out.stdout.strip() == "pure"

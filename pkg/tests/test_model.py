import math

import numpy as np
import pytest

from qbatt.hilbert import eig_hermitian, partial_trace
from qbatt.model import (
    KET_E,
    GhzSpec,
    ModelParams,
    coupling_hamiltonian,
    default_initial_state,
    ghz_state,
    local_hamiltonian,
)


class TestLocalHamiltonian:
    def test_definition(self):
        assert np.allclose(local_hamiltonian(1.0).matrix, np.diag([1.0, -1.0]))

    def test_zero_field(self):
        assert np.allclose(local_hamiltonian(0.0).matrix, np.zeros((2, 2)))

    def test_excited_state_energy(self):
        h = local_hamiltonian(0.8)
        proj = np.outer(KET_E, KET_E.conj())
        assert abs(np.trace(proj @ h.matrix) - 0.8) < 1e-15


class TestCouplingHamiltonian:
    def test_uncoupled_case(self):
        h = coupling_hamiltonian(1.0, 1.0, 0.0)
        assert np.allclose(h.matrix, np.diag([2.0, 0.0, 0.0, -2.0]))

    def test_default_parameter_entries(self):
        h = coupling_hamiltonian(1.0, 1.0, 2.0)
        assert h.matrix[0, 3] == 2.0 and h.matrix[3, 0] == 2.0
        assert np.allclose(np.diag(h.matrix), [2.0, 0.0, 0.0, -2.0])
        assert h.matrix[1, 2] == 2.0 and h.matrix[2, 1] == 2.0

    def test_eigenvalues_closed_form(self):
        # blocks {|ee>,|gg>} and {|eg>,|ge>} diagonalize by hand to
        # +-sqrt(J^2+(h1+h2)^2) and +-sqrt(J^2+(h1-h2)^2)
        vals, _ = eig_hermitian(coupling_hamiltonian(1.0, 1.0, 2.0))
        expected = sorted([-2 * math.sqrt(2), -2.0, 2.0, 2 * math.sqrt(2)])
        assert np.allclose(vals, expected, atol=1e-12)

    def test_hermitian_for_random_parameters(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            h1, h2, j = rng.uniform(-3, 3, size=3)
            assert coupling_hamiltonian(h1, h2, j).is_hermitian(1e-14)


class TestGhzState:
    def test_boundaries(self):
        top = ghz_state(GhzSpec(3, 1.0))
        assert abs(top.matrix[0, 0] - 1.0) < 1e-15
        bottom = ghz_state(GhzSpec(3, -1.0))
        assert abs(bottom.matrix[7, 7] - 1.0) < 1e-15

    def test_balanced_four_party_amplitudes(self):
        rho = ghz_state(GhzSpec(4, 0.0))
        assert abs(rho.matrix[0, 0] - 0.5) < 1e-15
        assert abs(rho.matrix[15, 15] - 0.5) < 1e-15
        assert abs(rho.matrix[0, 15] - 0.5) < 1e-15

    @pytest.mark.parametrize("l", np.linspace(-1.0, 1.0, 21))
    def test_single_party_marginals(self, l):
        rho = ghz_state(GhzSpec(3, float(l)))
        expected = np.diag([(1 + l) / 2, (1 - l) / 2])
        for label in ("B", "A", "E"):
            marginal = partial_trace(rho, {label})
            assert np.max(np.abs(marginal.matrix - expected)) < 1e-12

    def test_rank_one(self):
        rho = ghz_state(GhzSpec(3, 0.4))
        vals = np.linalg.eigvalsh(rho.matrix)
        assert abs(vals[-1] - 1.0) < 1e-12 and np.all(vals[:-1] < 1e-12)

    def test_l_out_of_range(self):
        with pytest.raises(ValueError):
            GhzSpec(3, 1.2)


class TestDefaultInitialState:
    def test_product_excited(self):
        rho = default_initial_state("product-excited")
        rho.assert_state()
        assert rho.labels == ("B", "A", "E")
        # |e e g> is index 0b001 = 1
        assert abs(rho.matrix[1, 1] - 1.0) < 1e-15

    def test_ghz_top_boundary(self):
        rho = default_initial_state("ghz", GhzSpec(3, 1.0))
        assert abs(rho.matrix[0, 0] - 1.0) < 1e-15

    def test_ghz_four_party_external_marginal(self):
        rho = default_initial_state("ghz", GhzSpec(4, 0.5))
        marginal = partial_trace(rho, {"X"})
        assert np.max(np.abs(marginal.matrix - np.diag([0.75, 0.25]))) < 1e-12

    def test_all_shipped_kinds_are_states(self):
        default_initial_state("product-excited").assert_state()
        for n in (3, 4):
            default_initial_state("ghz", GhzSpec(n, -0.3)).assert_state()

    def test_bad_party_count(self):
        with pytest.raises(ValueError):
            default_initial_state("ghz", GhzSpec(5, 0.0))


class TestModelParams:
    def test_defaults(self):
        p = ModelParams()
        assert p.j_ba == 2.0 and p.h_b == 1.0 and p.t == 0.15
        assert p.j_ae == p.j_ax == p.j_ba and p.h_e == p.h_x == p.h_a

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            ModelParams(t=float("nan"))

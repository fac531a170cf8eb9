import numpy as np
import pytest

from qbatt.hilbert import (
    Operator,
    apply_unitary,
    eig_hermitian,
    expand_unitary,
    identity,
    kron,
    partial_trace,
    unitary_from_hamiltonian,
)
from qbatt.model import ID2, SIGMA_X, SIGMA_Z
from qbatt.optimizer import haar_random_unitary

RNG = np.random.default_rng(424242)


def random_state(labels, rng=RNG):
    """Random full-rank density matrix over qubit subsystems."""
    d = 2 ** len(labels)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return Operator(m / np.trace(m), labels)


def random_hermitian(d, rng=RNG):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def partial_trace_oracle(matrix, dims, keep_indices):
    """Element-wise index-summation partial trace, written independently of
    the einsum-based production implementation."""
    n = len(dims)
    traced = [i for i in range(n) if i not in keep_indices]
    kept = [i for i in range(n) if i in keep_indices]
    out_dim = int(np.prod([dims[i] for i in kept])) if kept else 1
    out = np.zeros((out_dim, out_dim), dtype=complex)

    def unravel(flat):
        idx = []
        for d in reversed(dims):
            idx.append(flat % d)
            flat //= d
        return list(reversed(idx))

    def ravel(idx, subset):
        flat = 0
        for i in subset:
            flat = flat * dims[i] + idx[i]
        return flat

    dim = int(np.prod(dims))
    for r in range(dim):
        ri = unravel(r)
        for c in range(dim):
            ci = unravel(c)
            if all(ri[i] == ci[i] for i in traced):
                out[ravel(ri, kept), ravel(ci, kept)] += matrix[r, c]
    return out


class TestOperator:
    def test_dims_must_match_dimension(self):
        with pytest.raises(ValueError):
            Operator(np.eye(4), ("B",), (2,))

    def test_labels_unique(self):
        with pytest.raises(ValueError):
            Operator(np.eye(4), ("B", "B"))

    def test_matrix_is_readonly(self):
        op = identity(("B",))
        with pytest.raises(ValueError):
            op.matrix[0, 0] = 2.0

    def test_state_invariants(self):
        random_state(("B", "A")).assert_state()
        bad = Operator(np.diag([0.5, 0.6]), ("B",))
        with pytest.raises(ValueError):
            bad.assert_state()

    def test_unitary_invariant(self):
        u = Operator(haar_random_unitary(4, np.random.default_rng(3)), ("B", "A"))
        u.assert_unitary()
        with pytest.raises(ValueError):
            Operator(1.5 * np.eye(2), ("B",)).assert_unitary()


class TestKron:
    def test_identity_case(self):
        out = kron([identity(("B",)), identity(("A",))])
        assert np.array_equal(out.matrix, np.eye(4))
        assert out.labels == ("B", "A")

    def test_sigma_z_with_identity(self):
        out = kron([Operator(SIGMA_Z, ("B",)), identity(("A",))])
        assert np.allclose(out.matrix, np.diag([1, 1, -1, -1]))

    def test_sigma_x_pair_is_antidiagonal(self):
        out = kron([Operator(SIGMA_X, ("B",)), Operator(SIGMA_X, ("A",))])
        assert np.allclose(out.matrix, np.fliplr(np.eye(4)))

    def test_empty_errors(self):
        with pytest.raises(ValueError):
            kron([])


class TestPartialTrace:
    def test_product_state_factorizes(self):
        rho_a = random_state(("A",))
        rho_e = random_state(("E",))
        joint = kron([rho_a, rho_e])
        out = partial_trace(joint, {"A"})
        assert np.max(np.abs(out.matrix - rho_a.matrix)) < 1e-12

    def test_bell_state_marginal_is_maximally_mixed(self):
        vec = np.zeros(4, dtype=complex)
        vec[0] = vec[3] = 1 / np.sqrt(2)
        bell = Operator(np.outer(vec, vec.conj()), ("A", "E"))
        out = partial_trace(bell, {"A"})
        assert np.max(np.abs(out.matrix - np.eye(2) / 2)) < 1e-12

    def test_matches_index_summation_oracle(self):
        rho = random_state(("B", "A", "E"))
        got = partial_trace(rho, {"B", "A"})
        expected = partial_trace_oracle(rho.matrix, rho.dims, keep_indices=[0, 1])
        assert got.labels == ("B", "A")
        assert np.max(np.abs(got.matrix - expected)) < 1e-12

    def test_keep_order_is_original_order(self):
        rho = random_state(("B", "A", "E"))
        got = partial_trace(rho, {"E", "B"})
        expected = partial_trace_oracle(rho.matrix, rho.dims, keep_indices=[0, 2])
        assert got.labels == ("B", "E")
        assert np.max(np.abs(got.matrix - expected)) < 1e-12

    def test_trace_preserved_and_linear(self):
        rho1 = random_state(("B", "A", "E"))
        rho2 = random_state(("B", "A", "E"))
        for keep in ({"B"}, {"A", "E"}, {"B", "E"}):
            out = partial_trace(rho1, keep)
            assert abs(out.trace() - rho1.trace()) < 1e-12
        mix = Operator(0.3 * rho1.matrix + 0.7 * rho2.matrix, rho1.labels)
        lhs = partial_trace(mix, {"A"}).matrix
        rhs = 0.3 * partial_trace(rho1, {"A"}).matrix + 0.7 * partial_trace(rho2, {"A"}).matrix
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_full_keep_returns_input(self):
        rho = random_state(("B", "A"))
        assert partial_trace(rho, {"B", "A"}) is rho

    def test_absent_label_errors(self):
        with pytest.raises(ValueError):
            partial_trace(random_state(("B", "A")), {"Q"})


class TestEigHermitian:
    def test_diagonal_input_sorted(self):
        vals, _ = eig_hermitian(Operator(np.diag([3.0, 1.0, 2.0]), ("B",), (3,)))
        assert np.allclose(vals, [1.0, 2.0, 3.0])

    def test_sigma_x_spectrum(self):
        vals, vecs = eig_hermitian(Operator(SIGMA_X, ("A",)))
        assert np.allclose(vals, [-1.0, 1.0])
        minus = np.array([1, -1]) / np.sqrt(2)
        plus = np.array([1, 1]) / np.sqrt(2)
        assert np.abs(minus @ vecs[:, 0]) > 1 - 1e-10
        assert np.abs(plus @ vecs[:, 1]) > 1 - 1e-10

    def test_reconstruction_identity(self):
        m = random_hermitian(8)
        vals, vecs = eig_hermitian(m)
        rebuilt = (vecs * vals) @ vecs.conj().T
        assert np.max(np.abs(rebuilt - m)) < 1e-10
        assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(8))) < 1e-10

    def test_residuals(self):
        m = random_hermitian(6)
        vals, vecs = eig_hermitian(m)
        for i in range(6):
            assert np.max(np.abs(m @ vecs[:, i] - vals[i] * vecs[:, i])) < 1e-10

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_spectrum_invariant_under_unitary_conjugation(self):
        m = random_hermitian(8)
        u = haar_random_unitary(8, np.random.default_rng(9))
        vals_m, _ = eig_hermitian(m)
        vals_c, _ = eig_hermitian(u @ m @ u.conj().T)
        assert np.max(np.abs(vals_m - vals_c)) < 1e-10


def taylor_expm_oracle(m, terms=20):
    """Scaled-and-squared truncated series for exp(m), independent of the
    eigendecomposition path used in production."""
    squarings = 0
    norm = np.linalg.norm(m)
    while norm > 0.25:
        m = m / 2
        norm /= 2
        squarings += 1
    out = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for n in range(1, terms + 1):
        term = term @ m / n
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


class TestUnitaryFromHamiltonian:
    def test_zero_time_gives_identity(self):
        h = Operator(random_hermitian(4), ("B", "A"))
        u = unitary_from_hamiltonian(h, 0.0)
        assert np.max(np.abs(u.matrix - np.eye(4))) < 1e-12

    def test_diagonal_hamiltonian(self):
        h = Operator(1.3 * SIGMA_Z, ("B",))
        u = unitary_from_hamiltonian(h, 0.7)
        expected = np.diag([np.exp(-1j * 1.3 * 0.7), np.exp(1j * 1.3 * 0.7)])
        assert np.max(np.abs(u.matrix - expected)) < 1e-12

    def test_matches_taylor_series_oracle(self):
        from qbatt.model import coupling_hamiltonian

        h = coupling_hamiltonian(1.0, 1.0, 2.0)
        u = unitary_from_hamiltonian(h, 0.15)
        expected = taylor_expm_oracle(-1j * h.matrix * 0.15)
        assert np.max(np.abs(u.matrix - expected)) < 1e-10
        u.assert_unitary()

    def test_group_composition(self):
        h = Operator(random_hermitian(4), ("B", "A"))
        u1 = unitary_from_hamiltonian(h, 0.4)
        u2 = unitary_from_hamiltonian(h, 0.9)
        u12 = unitary_from_hamiltonian(h, 1.3)
        assert np.max(np.abs(u1.matrix @ u2.matrix - u12.matrix)) < 1e-10


class TestEmbedding:
    def test_expand_in_middle(self):
        u = Operator(haar_random_unitary(4, np.random.default_rng(5)), ("A", "E"))
        full = expand_unitary(u, ("B", "A", "E", "X"))
        assert full.labels == ("B", "A", "E", "X")
        expected = np.kron(np.kron(ID2, u.matrix), ID2)
        assert np.max(np.abs(full.matrix - expected)) < 1e-14

    def test_non_contiguous_rejected(self):
        u = Operator(haar_random_unitary(4, np.random.default_rng(5)), ("B", "E"))
        with pytest.raises(ValueError):
            expand_unitary(u, ("B", "A", "E"))

    def test_apply_unitary_preserves_trace(self):
        rho = random_state(("B", "A", "E"))
        u = Operator(haar_random_unitary(4, np.random.default_rng(7)), ("A", "E"))
        out = apply_unitary(rho, u)
        assert abs(out.trace() - 1.0) < 1e-12
        out.assert_state()

import numpy as np
import pytest
import scipy.sparse as sp

from uom_sim.exceptions import InvalidArgumentError, InvalidDimensionError
from uom_sim.hilbert import (
    CompositeSpace,
    Operator,
    QuantumState,
    ladder,
    basis_ket,
    cavity_mech,
    coherent_ket,
    embed,
    embed_label,
    expect,
    identity,
    mech_only,
    number_op,
    pauli,
    qubit_mech,
    thermal_density,
    tripartite,
)

RNG = np.random.default_rng(20260814)


def random_hermitian(dim, rng):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2


class TestCompositeSpace:
    def test_tripartite_layout(self):
        space = tripartite(4, 6)
        assert space.dims == (2, 4, 6)
        assert space.labels == ("qubit", "cavity", "mech")
        assert space.total_dim == 48
        assert space.index("mech") == 2

    def test_flat_index_row_major(self):
        # |q=1, c=2, m=3> in dims (2,4,6): 1*24 + 2*6 + 3 = 39
        space = tripartite(4, 6)
        assert space.flat_index((1, 2, 3)) == 39

    def test_rejects_dim_below_two(self):
        with pytest.raises(InvalidDimensionError):
            CompositeSpace((2, 1), ("qubit", "mech"))

    def test_rejects_fat_qubit(self):
        with pytest.raises(InvalidDimensionError):
            CompositeSpace((3, 4), ("qubit", "mech"))

    def test_rejects_label_mismatch(self):
        with pytest.raises(InvalidDimensionError):
            CompositeSpace((2, 3), ("qubit",))

    def test_rejects_duplicate_labels(self):
        with pytest.raises(InvalidArgumentError):
            CompositeSpace((3, 3), ("mech", "mech"))

    def test_unknown_label_lookup(self):
        with pytest.raises(InvalidArgumentError):
            mech_only(5).index("cavity")


class TestLadderOperators:
    def test_annihilation_matrix_elements(self):
        a = ladder(3)
        expected = np.array(
            [[0, 1, 0], [0, 0, np.sqrt(2)], [0, 0, 0]], dtype=complex
        )
        assert np.allclose(a, expected)

    def test_commutator_below_ceiling(self):
        # [a, a+] = 1 except in the top truncated level
        dim = 7
        a = ladder(dim)
        comm = a @ a.conj().T - a.conj().T @ a
        assert np.allclose(np.diag(comm)[:-1], 1.0)
        assert np.isclose(np.diag(comm)[-1], -(dim - 1))

    def test_number_operator(self):
        a = ladder(5)
        assert np.allclose(a.conj().T @ a, number_op(5))

    def test_rejects_trivial_dim(self):
        with pytest.raises(InvalidDimensionError):
            ladder(1)


class TestPauli:
    def test_excited_state_is_index_zero(self):
        # sigma_z |e> = +|e> with |e> = (1, 0)
        sz = pauli("z")
        assert np.allclose(sz @ np.array([1, 0]), np.array([1, 0]))
        assert np.allclose(sz @ np.array([0, 1]), -np.array([0, 1]))

    def test_raising_maps_ground_to_excited(self):
        ground = np.array([0, 1], dtype=complex)
        assert np.allclose(pauli("plus") @ ground, np.array([1, 0]))
        assert np.allclose(pauli("minus") @ np.array([1, 0]), ground)

    def test_algebra(self):
        sx, sy, sz = pauli("x"), pauli("y"), pauli("z")
        assert np.allclose(sx @ sy - sy @ sx, 2j * sz)
        assert np.allclose(pauli("plus"), (sx + 1j * sy) / 2)

    def test_unknown_kind(self):
        with pytest.raises(InvalidArgumentError):
            pauli("w")


class TestEmbed:
    def test_matches_explicit_kron(self):
        space = tripartite(3, 4)
        a = ladder(3)
        built = embed(a, 1, space).to_dense()
        oracle = np.kron(np.kron(np.eye(2), a), np.eye(4))
        assert np.allclose(built, oracle)

    def test_action_on_basis_state(self):
        # a_cavity |g, 1, 0> = |g, 0, 0> in dims (2, 3, 4)
        space = tripartite(3, 4)
        a_c = embed(ladder(3), 1, space)
        src = basis_ket(space, (1, 1, 0))
        out = a_c.matrix @ src.data
        assert np.isclose(out[space.flat_index((1, 0, 0))], 1.0)
        assert np.isclose(np.linalg.norm(out), 1.0)

    def test_disjoint_subsystems_commute(self):
        space = tripartite(3, 4)
        sz = embed(pauli("z"), 0, space)
        b = embed(ladder(4), 2, space)
        assert sz.commutator(b).norm_max() < 1e-14

    def test_embed_label_matches_position(self):
        space = qubit_mech(5)
        by_label = embed_label(ladder(5), "mech", space)
        by_pos = embed(ladder(5), 1, space)
        assert (by_label - by_pos).norm_max() == 0.0

    def test_spectrum_preserved_with_multiplicity(self):
        # embedding tensors the spectrum with a flat multiplicity
        space = cavity_mech(3, 4)
        h = random_hermitian(3, RNG)
        lifted = embed(h, 0, space).to_dense()
        got = np.sort(np.linalg.eigvalsh(lifted))
        expected = np.sort(np.repeat(np.linalg.eigvalsh(h), 4))
        assert np.allclose(got, expected)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(InvalidDimensionError):
            embed(ladder(3), 1, tripartite(4, 4))


class TestOperatorAlgebra:
    def test_adjoint_of_product(self):
        space = mech_only(6)
        a = Operator(space, sp.csr_matrix(RNG.normal(size=(6, 6)) + 1j * RNG.normal(size=(6, 6))))
        b = Operator(space, sp.csr_matrix(RNG.normal(size=(6, 6)) + 1j * RNG.normal(size=(6, 6))))
        assert ((a @ b).dag() - b.dag() @ a.dag()).norm_max() < 1e-12

    def test_hermiticity_detection(self):
        space = mech_only(4)
        h = Operator(space, sp.csr_matrix(random_hermitian(4, RNG)))
        assert h.is_hermitian()
        assert not (1j * h).is_hermitian()

    def test_cross_space_arithmetic_rejected(self):
        a = identity(mech_only(4))
        b = identity(mech_only(5))
        with pytest.raises(InvalidDimensionError):
            _ = a @ b


class TestStates:
    def test_ket_norm_enforced(self):
        space = mech_only(3)
        with pytest.raises(InvalidArgumentError):
            QuantumState(space, np.array([1.0, 1.0, 0.0]), "ket")

    def test_density_trace_enforced(self):
        space = mech_only(2)
        with pytest.raises(InvalidArgumentError):
            QuantumState(space, np.eye(2, dtype=complex), "density")

    def test_density_positivity_enforced(self):
        space = mech_only(2)
        rho = np.array([[1.5, 0], [0, -0.5]], dtype=complex)
        with pytest.raises(InvalidArgumentError):
            QuantumState(space, rho, "density")

    def test_ket_promotion(self):
        space = qubit_mech(3)
        psi = basis_ket(space, (1, 2))
        rho = psi.as_density()
        assert rho.kind == "density"
        assert np.isclose(rho.data[psi.space.flat_index((1, 2))][psi.space.flat_index((1, 2))], 1.0)

    def test_thermal_density_mean(self):
        n_th = 0.8
        rho = thermal_density(60, n_th)
        n = number_op(60)
        assert np.isclose(np.trace(n @ rho).real, n_th, atol=1e-6)

    def test_thermal_density_zero_temperature(self):
        rho = thermal_density(5, 0.0)
        assert np.isclose(rho[0, 0], 1.0)
        assert np.isclose(np.trace(rho), 1.0)


class TestExpectation:
    def test_number_on_fock_state(self):
        space = mech_only(6)
        n_op = Operator(space, sp.csr_matrix(number_op(6)))
        psi = basis_ket(space, (4,))
        assert np.isclose(expect(n_op, psi).real, 4.0)

    def test_quadrature_on_coherent_state(self):
        # <a + a+> = 2 Re alpha, truncation high enough to hold tail error
        dim, alpha = 25, 1.0
        space = mech_only(dim)
        a = ladder(dim)
        x = Operator(space, sp.csr_matrix(a + a.conj().T))
        psi = QuantumState(space, coherent_ket(dim, alpha), "ket")
        assert np.isclose(expect(x, psi).real, 2 * alpha, atol=1e-8)

    def test_ket_and_density_agree(self):
        dim = 8
        space = mech_only(dim)
        op = Operator(space, sp.csr_matrix(random_hermitian(dim, RNG)))
        vec = RNG.normal(size=dim) + 1j * RNG.normal(size=dim)
        vec /= np.linalg.norm(vec)
        psi = QuantumState(space, vec, "ket")
        assert np.isclose(expect(op, psi), expect(op, psi.as_density()))

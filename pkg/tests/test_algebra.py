import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fieldcomm import (
    ControlledDisplacement,
    DensityMatrix,
    DisplacementGenerator,
    GeneratorBasis,
    HybridState,
    MomentumKernel,
    ProfileFunction,
    coherent_information,
    entropy,
    fidelity,
)
from fieldcomm.algebra import X_MINUS, X_PLUS

from conftest import momentum_gen

BELL_ENTROPY_EXAMPLE = -(0.25 * np.log2(0.25) + 0.75 * np.log2(0.75))  # 0.811278...


def _triangle_basis():
    tri = ProfileFunction.triangle()
    return GeneratorBasis([momentum_gen(1.0, tri, 0.0), momentum_gen(1.0, tri, 1.5)])


@pytest.fixture(scope="module")
def basis():
    return _triangle_basis()


class TestGram:
    def test_vacuum_overlap_paper_value(self, basis):
        # <alpha_1|0> = 4^{-(mu/L)^2/pi} at mu = L
        expected = 4.0 ** (-1.0 / np.pi)
        assert basis.overlap(basis.unit(0), basis.vacuum) == pytest.approx(
            expected, rel=1e-10
        )

    def test_single_label_gram(self, basis):
        g = basis.gram([basis.unit(0)])
        assert g.shape == (1, 1) and g[0, 0] == pytest.approx(1.0)

    def test_strong_displacement_orthogonalizes(self, triangle):
        strong = GeneratorBasis([momentum_gen(30.0, triangle, 0.0)])
        g = strong.gram([strong.vacuum, strong.unit(0)])
        assert abs(g[0, 1]) < 1e-100
        assert g == pytest.approx(np.conj(g.T))

    def test_gram_psd_and_consistency(self, basis):
        labels = [basis.vacuum, basis.unit(0), basis.unit(1), (1, 1)]
        g = basis.gram(labels)
        assert np.linalg.eigvalsh(g).min() >= -1e-10
        prod = g[1, 2] * g[2, 1]
        assert prod.imag == pytest.approx(0.0, abs=1e-14)
        assert 0.0 <= prod.real <= 1.0


class TestApplyGate:
    def test_plus_x_control_displaces_plus_x_branch(self, basis):
        plus = HybridState.from_qubit_states(basis, [X_PLUS])
        out = plus.apply(ControlledDisplacement(0, "X", +1, 0))
        # |+X>|0> -> |+X>|alpha_1>
        assert set(out.terms) == {((0,), (1, 0)), ((1,), (1, 0))}
        assert out.terms[((0,), (1, 0))] == pytest.approx(1 / np.sqrt(2))

        minus = HybridState.from_qubit_states(basis, [X_MINUS])
        out = minus.apply(ControlledDisplacement(0, "X", +1, 0))
        assert set(out.terms) == {((0,), (0, 0)), ((1,), (0, 0))}
        assert out.terms[((1,), (0, 0))] == pytest.approx(-1 / np.sqrt(2))

    def test_zero_coupling_gate_is_identity(self, triangle):
        basis = GeneratorBasis([momentum_gen(0.0, triangle, 0.0)])
        st0 = HybridState.from_qubit_states(basis, [X_PLUS])
        out = st0.apply(ControlledDisplacement(0, "X", +1, 0))
        rho = out.reduce({0})
        assert rho.matrix == pytest.approx(np.outer(X_PLUS, X_PLUS.conj()), abs=1e-12)

    def test_double_application_reaches_two_alpha(self, basis):
        st0 = HybridState.from_qubit_states(basis, [X_PLUS])
        gate = ControlledDisplacement(0, "X", +1, 0)
        out = st0.apply(gate).apply(gate)
        # phi(alpha, alpha) = 0, so the displaced branch holds label 2 alpha
        assert out.terms[((0,), (2, 0))] == pytest.approx(1 / np.sqrt(2))

    def test_norm_preserved_along_protocol(self, basis):
        st0 = HybridState.from_qubit_states(basis, [np.array([0.6, 0.8j])])
        st1 = st0.apply(ControlledDisplacement(0, "X", +1, 0))
        st2 = st1.apply(ControlledDisplacement(0, "Z", +1, 1))
        assert st2.norm() == pytest.approx(1.0, abs=1e-10)

    @settings(max_examples=20, deadline=None)
    @given(
        seed=st.integers(0, 2**31),
        moves=st.lists(
            st.tuples(
                st.integers(0, 1),              # qubit
                st.sampled_from(["X", "Z"]),    # control axis
                st.sampled_from([-1, 1]),       # control sign
                st.integers(0, 1),              # generator
                st.sampled_from([-1, 1]),       # generator sign
            ),
            min_size=1,
            max_size=5,
        ),
    )
    def test_norm_preserved_random_gates(self, seed, moves):
        rng = np.random.default_rng(seed)
        psi_a = rng.normal(size=2) + 1j * rng.normal(size=2)
        st_ = HybridState.from_qubit_states(
            _triangle_basis(), [psi_a / np.linalg.norm(psi_a), X_MINUS]
        )
        for q, ax, cs, g, gs in moves:
            st_ = st_.apply(ControlledDisplacement(q, ax, cs, g, gs))
        assert st_.norm() == pytest.approx(1.0, abs=1e-10)

    def test_commuting_gates_order_independent(self, basis):
        # the two triangle couplings are timelike separated, phi = 0
        g1 = ControlledDisplacement(0, "Z", +1, 0)
        g2 = ControlledDisplacement(1, "Z", +1, 1)
        st0 = HybridState.from_qubit_states(basis, [X_PLUS, X_PLUS])
        a = st0.apply(g1).apply(g2)
        b = st0.apply(g2).apply(g1)
        keys = set(a.terms) | set(b.terms)
        diff = sum(
            abs(a.terms.get(k, 0) - b.terms.get(k, 0)) ** 2 for k in keys
        )
        assert np.sqrt(diff) < 1e-9


class TestReduce:
    def test_product_state_exact(self, basis):
        psi = np.array([0.6, 0.8j])
        st0 = HybridState.from_qubit_states(basis, [psi])
        rho = st0.reduce({0})
        assert rho.matrix == pytest.approx(np.outer(psi, psi.conj()), abs=1e-14)

    def test_field_marginal_via_purity(self, basis):
        # after the first coupling the field is |x+|^2 |a1><a1| + |x-|^2 |0><0|;
        # purity of the joint state makes both marginal entropies equal
        psi = (0.8 * X_PLUS + 0.6 * X_MINUS).astype(complex)
        st0 = HybridState.from_qubit_states(basis, [psi])
        out = st0.apply(ControlledDisplacement(0, "X", +1, 0))
        rho_a = out.reduce({0})
        overlap = basis.overlap(basis.vacuum, basis.unit(0))
        mixture = np.array([[1.0, overlap], [np.conj(overlap), 1.0]])
        field_eigs = np.linalg.eigvalsh(
            np.diag([0.8, 0.6]) @ mixture @ np.diag([0.8, 0.6])
        )
        field_entropy = -np.sum(field_eigs * np.log2(field_eigs))
        assert entropy(rho_a) == pytest.approx(field_entropy, abs=1e-8)

    def test_bell_marginal_maximally_mixed(self, basis):
        bell = HybridState(
            basis, 2,
            {((0, 1), basis.vacuum): 1 / np.sqrt(2), ((1, 0), basis.vacuum): 1 / np.sqrt(2)},
        )
        rho = bell.reduce({0})
        assert rho.matrix == pytest.approx(np.eye(2) / 2, abs=1e-14)


class TestScalars:
    def test_entropy_examples(self):
        pure = DensityMatrix(np.diag([1.0, 0.0]))
        mixed = DensityMatrix(np.eye(2) / 2)
        skewed = DensityMatrix(np.diag([0.25, 0.75]))
        assert entropy(pure) == 0.0
        assert entropy(mixed) == pytest.approx(1.0)
        assert entropy(skewed) == pytest.approx(BELL_ENTROPY_EXAMPLE, rel=1e-12)

    def test_coherent_information_arithmetic(self):
        # maximally mixed two-qubit state: S = 2, marginal S = 1
        assert coherent_information(DensityMatrix(np.eye(4) / 4)) == pytest.approx(1.0)
        bell = np.zeros((4, 4))
        bell[0, 0] = bell[3, 3] = bell[0, 3] = bell[3, 0] = 0.5
        assert coherent_information(DensityMatrix(bell)) == pytest.approx(-1.0)

    def test_fidelity_examples(self):
        psi = np.array([1.0, 1.0]) / np.sqrt(2)
        assert fidelity(DensityMatrix(np.outer(psi, psi)), psi) == pytest.approx(1.0)
        assert fidelity(DensityMatrix(np.eye(2) / 2), psi) == pytest.approx(0.5)

    def test_density_matrix_validation(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.diag([0.7, 0.7]))


class TestComplementaryEntropy:
    def test_qubits_vs_field_entropies_agree(self, basis):
        # pure overall state: the two-qubit marginal entropy must equal the
        # field marginal entropy, computed here independently from the
        # Gram spectrum of the per-term field states
        psi = (0.48 + 0.2j) * X_PLUS + np.sqrt(1 - abs(0.48 + 0.2j) ** 2) * X_MINUS
        st0 = HybridState.from_qubit_states(basis, [psi, X_MINUS])
        st1 = st0.apply(ControlledDisplacement(0, "X", +1, 0))
        st2 = st1.apply(ControlledDisplacement(1, "Z", +1, 1))
        s_qubits = entropy(st2.reduce({0, 1}))

        # field marginal rho_F = sum_b |phi_b><phi_b| over bit patterns b;
        # its spectrum is that of T[b, b'] = <phi_b' | phi_b>
        patterns = sorted({b for (b, _) in st2.terms})
        grouped = {
            b: [(lab, amp) for (bb, lab), amp in st2.terms.items() if bb == b]
            for b in patterns
        }
        t = np.array(
            [
                [
                    sum(
                        amp_i * np.conj(amp_j) * basis.overlap(lab_j, lab_i)
                        for lab_i, amp_i in grouped[bi]
                        for lab_j, amp_j in grouped[bj]
                    )
                    for bj in patterns
                ]
                for bi in patterns
            ]
        )
        w = np.clip(np.linalg.eigvalsh(t), 0, None)
        w = w[w > 1e-300]
        s_field = float(-np.sum(w * np.log2(w)))
        assert s_qubits == pytest.approx(s_field, abs=1e-8)

"""Cross-validation of the coherent-label engine against a truncated
Fock-space simulation on few-mode cavity configurations."""
import math

import numpy as np
import pytest

from fieldcomm import (
    CavityKernel,
    ControlledDisplacement,
    DisplacementGenerator,
    GeneratorBasis,
    HybridState,
    ProfileFunction,
    cavity_mode_amp,
)
from fieldcomm.algebra import X_MINUS, X_PLUS

from fock_oracle import FockSim, displacement_matrix

KERNEL = CavityKernel(length=1.0, mode_cutoff=3)
PROFILE = ProfileFunction.triangle(width=0.25, center=0.35)
PROFILE_B = ProfileFunction.skew_triangle(width=0.3, center=0.6)


def three_mode_generators():
    return [
        DisplacementGenerator(KERNEL, 0.7, PROFILE, 0.0),
        DisplacementGenerator(KERNEL, 0.5, PROFILE, 0.45),
        DisplacementGenerator(KERNEL, -0.6, PROFILE_B, 0.2),
    ]


def mode_amps(gen):
    return np.array([cavity_mode_amp(gen, j) for j in (1, 2, 3)])


GATES = [
    ControlledDisplacement(0, "X", +1, 0),
    ControlledDisplacement(0, "Z", -1, 1),
    ControlledDisplacement(1, "Z", +1, 2, generator_sign=-1),
    ControlledDisplacement(1, "X", -1, 0),
]


def run_both(qubit_states):
    gens = three_mode_generators()
    basis = GeneratorBasis(gens, truncation_tol=None)
    st = HybridState.from_qubit_states(basis, qubit_states)
    sim = FockSim(qubit_states, n_modes=3, cutoff=30)
    for g in GATES:
        st = st.apply(g)
        sim.apply_controlled(
            g.qubit, g.control_axis, g.control_sign,
            mode_amps(gens[g.generator]), g.generator_sign,
        )
    return st, sim


class TestDisplacementMatrix:
    def test_coherent_state_amplitudes(self):
        alpha = 0.4 - 0.3j
        d = displacement_matrix(alpha, 31)
        vac = np.zeros(31)
        vac[0] = 1.0
        coh = d @ vac
        n = np.arange(31)
        expected = np.exp(-abs(alpha) ** 2 / 2) * alpha**n / np.sqrt(
            [float(math.factorial(int(k))) for k in n]
        )
        assert coh == pytest.approx(expected, abs=1e-12)


class TestOracleEquivalence:
    @pytest.mark.parametrize(
        "qubits",
        [
            [X_PLUS, X_MINUS],
            [X_MINUS, X_MINUS],
            [np.array([0.6, 0.8j]), X_MINUS],
        ],
        ids=["plus-x", "minus-x", "generic"],
    )
    def test_reduced_density_matrices_match(self, qubits):
        st, sim = run_both(qubits)
        for keep in ({0}, {1}, {0, 1}):
            engine = st.reduce(keep).matrix
            oracle = sim.reduced_qubit_dm(sorted(keep))
            assert np.max(np.abs(engine - oracle)) < 1e-6

    def test_norms_agree(self):
        psi = np.array([0.28 + 0.4j, 0.87])
        psi = psi / np.linalg.norm(psi)
        st, sim = run_both([psi, X_PLUS])
        assert st.norm() == pytest.approx(np.linalg.norm(sim.state), abs=1e-10)

    def test_composition_phase_matches_fock(self):
        # D_a D_b = e^{i phi(a,b)} D_{a+b}: the engine's phase convention
        # against a direct matrix product on one mode
        gens = three_mode_generators()
        basis = GeneratorBasis(gens, truncation_tol=None)
        a = mode_amps(gens[0])
        b = mode_amps(gens[2])
        dim = 31
        phase = np.exp(1j * basis.label_phi(basis.unit(0), basis.unit(2)))
        for m in range(3):
            da = displacement_matrix(a[m], dim)
            db = displacement_matrix(b[m], dim)
            dab = displacement_matrix(a[m] + b[m], dim)
            per_mode_phase = np.exp(1j * np.imag(a[m] * np.conj(b[m])))
            # truncation leaves the top rows inexact; compare low excitations
            assert (da @ db)[:10, :10] == pytest.approx(
                (per_mode_phase * dab)[:10, :10], abs=1e-8
            )
        total = np.exp(1j * sum(np.imag(a[m] * np.conj(b[m])) for m in range(3)))
        assert phase == pytest.approx(total, abs=1e-10)

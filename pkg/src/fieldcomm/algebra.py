"""Exact state algebra for qubits coupled to finitely many coherent states.

The field never leaves the span of coherent states |a> indexed by integer
combinations of registered displacement generators, so a hybrid state is a
finite sum of (qubit bitstring, displacement label, amplitude) terms and
everything reduces to the pairwise generator inner products.

Conventions:
  D_a |b> = e^{i phi(a,b)} |a+b>,   phi(a,b) = Im int a(k) b(k)* dk
  <a|b>   = exp(-||a||^2/2 - ||b||^2/2 + int b(k) a(k)* dk)

Labels are plain integer tuples over the registered generator list; the
zero tuple is the vacuum. Inner products extend bilinearly, with the same
cached table entering every exponent, so the large near-cancelling norm
terms cancel structurally in overlaps of nearby labels.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PSDViolationError, UnitarityError
from .kernels import DisplacementGenerator, displacement_inner

Label = tuple[int, ...]
Bits = tuple[int, ...]

_PRUNE = 1e-14
_NORM_TOL = 1e-8
_EIG_FLOOR = -1e-10

LOG2 = np.log(2.0)

# cardinal qubit states in the Z basis
Z_PLUS = np.array([1.0, 0.0], dtype=complex)
Z_MINUS = np.array([0.0, 1.0], dtype=complex)
X_PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
X_MINUS = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2)
Y_PLUS = np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2)
Y_MINUS = np.array([1.0, -1.0j], dtype=complex) / np.sqrt(2)

AXIS_STATES: tuple[tuple[str, np.ndarray], ...] = (
    ("+X", X_PLUS),
    ("-X", X_MINUS),
    ("+Y", Y_PLUS),
    ("-Y", Y_MINUS),
    ("+Z", Z_PLUS),
    ("-Z", Z_MINUS),
)


def haar_states(count: int, seed: int) -> list[np.ndarray]:
    """Seeded Haar-random qubit pure states (Z-basis coefficient vectors)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        out.append(v / np.linalg.norm(v))
    return out


class GeneratorBasis:
    """Registered displacement generators and their cached inner products."""

    def __init__(
        self,
        generators: list[DisplacementGenerator],
        truncation_tol: float | None = 1e-7,
    ):
        self.generators = list(generators)
        n = len(self.generators)
        table = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                v = displacement_inner(
                    self.generators[i], self.generators[j], truncation_tol
                )
                table[i, j] = v
                table[j, i] = np.conj(v)
        self.table = table
        self._overlap_cache: dict[tuple[Label, Label], complex] = {}

    def __len__(self) -> int:
        return len(self.generators)

    @property
    def vacuum(self) -> Label:
        return (0,) * len(self.generators)

    def unit(self, index: int, sign: int = 1) -> Label:
        lab = [0] * len(self.generators)
        lab[index] = sign
        return tuple(lab)

    def label_inner(self, a: Label, b: Label) -> complex:
        """int a(k) b(k)* dk extended bilinearly (integer coefficients)."""
        va = np.asarray(a, dtype=float)
        vb = np.asarray(b, dtype=float)
        return complex(va @ self.table @ vb)

    def label_norm_sq(self, a: Label) -> float:
        return self.label_inner(a, a).real

    def label_phi(self, a: Label, b: Label) -> float:
        return self.label_inner(a, b).imag

    def overlap(self, a: Label, b: Label) -> complex:
        """<a|b>; the exponent is assembled from one shared table so the
        norm terms cancel exactly for labels with equal displacement."""
        key = (a, b)
        cached = self._overlap_cache.get(key)
        if cached is not None:
            return cached
        ex = (
            -0.5 * self.label_inner(a, a)
            - 0.5 * self.label_inner(b, b)
            + self.label_inner(b, a)
        )
        value = complex(np.exp(ex))
        self._overlap_cache[key] = value
        return value

    def gram(self, labels: list[Label]) -> np.ndarray:
        """Gram matrix G[i, j] = <label_i | label_j>; PSD up to quadrature error."""
        n = len(labels)
        g = np.eye(n, dtype=complex)
        for i in range(n):
            for j in range(i + 1, n):
                g[i, j] = self.overlap(labels[i], labels[j])
                g[j, i] = np.conj(g[i, j])
        return g


@dataclass(frozen=True)
class ControlledDisplacement:
    """Displace the field by generator_sign * generator on the matching
    eigenbranch of the control qubit; identity on the other branch."""

    qubit: int
    control_axis: str  # "X" or "Z"
    control_sign: int  # +1 or -1
    generator: int
    generator_sign: int = 1

    def __post_init__(self) -> None:
        if self.control_axis not in ("X", "Z"):
            raise ValueError("control axis must be 'X' or 'Z'")
        if self.control_sign not in (-1, 1) or self.generator_sign not in (-1, 1):
            raise ValueError("signs must be +1 or -1")


@dataclass
class HybridState:
    """Normalized superposition of (qubit bits, displacement label) terms.

    Qubits are stored in the +/-Z computational basis (bit 0 = +Z); gates
    controlled on X expand terms on the fly. Gate application returns a new
    state, leaving the input untouched.
    """

    basis: GeneratorBasis
    n_qubits: int
    terms: dict[tuple[Bits, Label], complex] = field(default_factory=dict)

    @classmethod
    def from_qubit_states(
        cls, basis: GeneratorBasis, qubit_states: list[np.ndarray]
    ) -> "HybridState":
        """Product state of the given qubit vectors with the field vacuum."""
        n = len(qubit_states)
        terms: dict[tuple[Bits, Label], complex] = {}
        for idx in range(2**n):
            bits = tuple((idx >> (n - 1 - q)) & 1 for q in range(n))
            amp = complex(np.prod([qubit_states[q][bits[q]] for q in range(n)]))
            if abs(amp) > _PRUNE:
                terms[(bits, basis.vacuum)] = amp
        return cls(basis, n, terms)

    def norm(self) -> float:
        total = 0j
        items = list(self.terms.items())
        for (bits_i, lab_i), amp_i in items:
            for (bits_j, lab_j), amp_j in items:
                if bits_i == bits_j:
                    total += amp_i * np.conj(amp_j) * self.basis.overlap(lab_j, lab_i)
        return float(np.sqrt(abs(total)))

    def apply(self, gate: ControlledDisplacement) -> "HybridState":
        return apply_gate(self, gate)

    def reduce(self, keep) -> "DensityMatrix":
        return reduce(self, keep)


def _add_term(terms, bits: Bits, lab: Label, amp: complex) -> None:
    key = (bits, lab)
    terms[key] = terms.get(key, 0j) + amp


def apply_gate(state: HybridState, gate: ControlledDisplacement) -> HybridState:
    """Apply a controlled displacement exactly.

    On the matching control branch the term's label gains the generator and
    the amplitude the composition phase e^{i phi(g, a_label)}; the other
    branch is untouched. The result is merged, pruned, and norm-checked
    (unitarity preserves the norm; it is never rescaled).
    """
    basis = state.basis
    if not 0 <= gate.qubit < state.n_qubits:
        raise ValueError(f"gate qubit {gate.qubit} out of range")
    if not 0 <= gate.generator < len(basis):
        raise ValueError(f"gate generator {gate.generator} out of range")
    step = basis.unit(gate.generator, gate.generator_sign)
    out: dict[tuple[Bits, Label], complex] = {}
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for (bits, lab), amp in state.terms.items():
        b = bits[gate.qubit]
        if gate.control_axis == "Z":
            matched = (b == 0) == (gate.control_sign == 1)
            if matched:
                phase = np.exp(1j * basis.label_phi(step, lab))
                new_lab = tuple(l + s for l, s in zip(lab, step))
                _add_term(out, bits, new_lab, amp * phase)
            else:
                _add_term(out, bits, lab, amp)
            continue
        # X control: expand |b> over |+X>, |-X>, displace the matching
        # component, and expand back onto the Z basis.
        for x_sign in (1, -1):
            c_in = inv_sqrt2 * (1.0 if (x_sign == 1 or b == 0) else -1.0)
            if x_sign == gate.control_sign:
                phase = np.exp(1j * basis.label_phi(step, lab))
                new_lab = tuple(l + s for l, s in zip(lab, step))
            else:
                phase = 1.0
                new_lab = lab
            for nb in (0, 1):
                c_out = inv_sqrt2 * (1.0 if (x_sign == 1 or nb == 0) else -1.0)
                new_bits = bits[: gate.qubit] + (nb,) + bits[gate.qubit + 1 :]
                _add_term(out, new_bits, new_lab, amp * c_in * c_out * phase)
    merged = {k: v for k, v in out.items() if abs(v) > _PRUNE}
    result = HybridState(basis, state.n_qubits, merged)
    n = result.norm()
    if abs(n - 1.0) > _NORM_TOL:
        raise UnitarityError(
            f"state norm {n!r} after gate deviates from 1 beyond {_NORM_TOL}"
        )
    return result


@dataclass(frozen=True)
class DensityMatrix:
    """Small Hermitian PSD unit-trace matrix over one or two qubits."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape not in ((2, 2), (4, 4)):
            raise ValueError("density matrix must be 2x2 or 4x4")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian to 1e-12")
        w = np.linalg.eigvalsh(m)
        if w.min() < _EIG_FLOOR:
            raise PSDViolationError(f"eigenvalue {w.min():.3e} below {_EIG_FLOOR}")
        if abs(np.trace(m).real - 1.0) > 1e-10:
            raise ValueError("density matrix trace deviates from 1 beyond 1e-10")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Deterministic ascending eigenvalues, clipped at zero within -1e-10."""
        w = np.linalg.eigvalsh(self.matrix)
        w = np.clip(w, 0.0, None)
        s = w.sum()
        return w / s if s > 0 else w


def reduce(state: HybridState, keep) -> DensityMatrix:
    """Gram-weighted partial trace onto the kept qubits (field traced out).

    rho[(q, q')] sums amp_i conj(amp_j) <label_j|label_i> over term pairs
    whose traced-out qubit bits agree.
    """
    keep = sorted(keep)
    if len(keep) not in (1, 2):
        raise ValueError("reduce keeps one or two qubits")
    traced = [q for q in range(state.n_qubits) if q not in keep]
    dim = 2 ** len(keep)
    rho = np.zeros((dim, dim), dtype=complex)

    def kept_index(bits: Bits) -> int:
        v = 0
        for q in keep:
            v = (v << 1) | bits[q]
        return v

    items = list(state.terms.items())
    for (bits_i, lab_i), amp_i in items:
        for (bits_j, lab_j), amp_j in items:
            if all(bits_i[q] == bits_j[q] for q in traced):
                rho[kept_index(bits_i), kept_index(bits_j)] += (
                    amp_i * np.conj(amp_j) * state.basis.overlap(lab_j, lab_i)
                )
    rho = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(rho)
    if w.min() < _EIG_FLOOR:
        raise PSDViolationError(f"reduced state eigenvalue {w.min():.3e} below tolerance")
    w = np.clip(w, 0.0, None)
    rho = (v * w) @ v.conj().T
    rho = rho / np.trace(rho).real
    return DensityMatrix(0.5 * (rho + rho.conj().T))


def entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits, with 0 log 0 = 0."""
    w = rho.eigenvalues()
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)) / LOG2)


def partial_trace_second(rho4: DensityMatrix) -> DensityMatrix:
    """Trace out the second qubit of a two-qubit density matrix."""
    m = rho4.matrix.reshape(2, 2, 2, 2)
    return DensityMatrix(np.trace(m, axis1=1, axis2=3))


def coherent_information(rho_aaprime: DensityMatrix) -> float:
    """I(A' > F) = S(rho_AA') - S(rho_A) for a purification through the field.

    Qubit ordering: the first factor is the sender A, the second the
    ancilla A'. Range [-1, 1] for protocol states.
    """
    if rho_aaprime.dim != 4:
        raise ValueError("coherent information needs a two-qubit state")
    return entropy(rho_aaprime) - entropy(partial_trace_second(rho_aaprime))


def fidelity(rho: DensityMatrix, psi: np.ndarray) -> float:
    """<psi|rho|psi> for a pure qubit target state."""
    if rho.dim != 2:
        raise ValueError("fidelity target is a single-qubit state")
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return float(np.real(np.conj(psi) @ rho.matrix @ psi))


def pure_state_fidelity(rho: DensityMatrix, psi: np.ndarray) -> float:
    """<psi|rho|psi> for a pure target of matching dimension (1 or 2 qubits)."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    if psi.shape != (rho.dim,):
        raise ValueError("target dimension mismatch")
    return float(np.real(np.conj(psi) @ rho.matrix @ psi))

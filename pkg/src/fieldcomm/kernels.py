"""Field kernels, displacement generators, and their inner products.

An instantaneous detector coupling displaces the field by a multimode
amplitude. With the displacement convention D_a = exp(int a(k) ad_k - h.c.),
the three kernels give

  momentum (right-moving sector, k > 0):
      a(k) = s * mu * e^{ikt} * sqrt(k / 4pi) * conj(f~(k))
  amplitude (both sectors, |k| > k_min):
      a(k) = -i * s * lam * e^{i|k|t} * conj(f~(k)) / sqrt(4pi |k|)
  Dirichlet cavity (discrete modes j = 1, 2, ...):
      a(j) = -i * s * lam * e^{ij pi t / L} * f_j / sqrt(j pi),
      f_j = int f(x) sin(j pi x / L) dx

where f~ is the profile Fourier transform of the physically positioned
profile and s the coupling sign. The j-dependent cavity phase follows from
the mode expansion. The conjugation on f~ follows from reading off the
creation-operator coefficient of the smeared field observable; for the
symmetric profiles it is invisible, for skewed profiles it fixes the sign
of the sensing phase, which is cross-checked against the closed form
phi = (mu_A mu_B / 4) int f'(x) h(x) dx derived from the commutator.

Continuum inner products int a(k) b*(k) dk are evaluated by the
oscillation-aware panel quadrature with position phases pulled into the
light-cone offsets u = (t_a -+ x_a) - (t_b -+ x_b), plus a closed-form
exponential-integral tail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    CavityTruncationError,
    DegenerateGeometryError,
    GeometryError,
    KernelMismatchError,
)
from .profiles import ProfileFunction
from .quadrature import integrate_oscillatory, oscillatory_tail

_FOUR_PI = 4.0 * np.pi


# ---------------------------------------------------------------------------
# kernels


@dataclass(frozen=True)
class MomentumKernel:
    """Continuum coupling to the conjugate momentum of the massless field.

    sector 'right' keeps only k > 0 (the Heaviside-restricted directional
    coupling), 'left' only k < 0, 'both' the full momentum. Protocols that
    must emit directionally use 'right'; the delocalization protocol uses
    'both' for the sender and one single sector per receiver.
    """

    sector: str = "right"

    def __post_init__(self) -> None:
        if self.sector not in ("right", "left", "both"):
            raise KernelMismatchError(f"unknown momentum sector {self.sector!r}")

    @property
    def sectors(self) -> tuple[str, ...]:
        return ("right", "left") if self.sector == "both" else (self.sector,)


@dataclass(frozen=True)
class AmplitudeKernel:
    """Continuum coupling to the field amplitude, IR-regulated at k_min > 0."""

    ir_cutoff: float

    def __post_init__(self) -> None:
        if not (self.ir_cutoff > 0.0):
            raise KernelMismatchError("amplitude kernel requires k_min > 0")


@dataclass(frozen=True)
class CavityKernel:
    """Massless field in a Dirichlet cavity of the given length."""

    length: float
    mode_cutoff: int = 2048

    def __post_init__(self) -> None:
        if not (self.length > 0.0):
            raise KernelMismatchError("cavity length must be positive")
        if self.mode_cutoff < 1:
            raise KernelMismatchError("cavity mode cutoff must be >= 1")


Kernel = MomentumKernel | AmplitudeKernel | CavityKernel


@dataclass(frozen=True)
class DisplacementGenerator:
    """One physical coupling's multimode displacement.

    The profile is given in detector-local coordinates and shifted to
    `position`; `coupling` carries the units (1/mass for momentum
    couplings, dimensionless for amplitude couplings). A zero coupling is
    allowed and denotes the identity displacement.
    """

    kernel: Kernel
    coupling: float
    profile: ProfileFunction
    event_time: float
    position: float = 0.0
    sign: int = 1

    def __post_init__(self) -> None:
        if not math.isfinite(self.coupling):
            raise GeometryError("coupling must be finite")
        if self.sign not in (-1, 1):
            raise GeometryError("sign must be +1 or -1")
        if isinstance(self.kernel, CavityKernel):
            lo, hi = self.physical_profile.support
            if lo <= 0.0 or hi >= self.kernel.length:
                raise GeometryError(
                    "profile support must lie strictly inside the cavity"
                )

    @property
    def strength(self) -> float:
        return self.sign * self.coupling

    @property
    def physical_profile(self) -> ProfileFunction:
        return self.profile.translated(self.position)


# ---------------------------------------------------------------------------
# continuum sector integrals (unit coupling)


def _lightcone_offset(gen_a: DisplacementGenerator, gen_b: DisplacementGenerator, sector: str) -> float:
    """Offset u entering e^{iku}: right-movers depend on t - x, left on t + x."""
    if sector == "right":
        return (gen_a.event_time - gen_a.position) - (gen_b.event_time - gen_b.position)
    return (gen_a.event_time + gen_a.position) - (gen_b.event_time + gen_b.position)


def _sector_product(pa, pb, k, sector: str):
    fa = pa.fourier(k)
    fb = pb.fourier(k)
    if sector == "right":
        return np.conj(fa) * fb
    return fa * np.conj(fb)


def _tail_pairs(pa, pb, u, sector: str):
    """Jump-form coefficients c_ij and offsets u_ij of the large-k integrand."""
    xa, ja = pa.slope_jumps()
    xb, jb = pb.slope_jumps()
    coeffs = np.outer(ja, jb).ravel() / _FOUR_PI
    if sector == "right":
        offs = (u - xa[:, None] + xb[None, :]).ravel()
    else:
        offs = (u + xa[:, None] - xb[None, :]).ravel()
    return coeffs, offs


@lru_cache(maxsize=4096)
def _momentum_sector_unit_inner(nodes_a, nodes_b, u, sector):
    pa = ProfileFunction(nodes_a)
    pb = ProfileFunction(nodes_b)
    max_freq = abs(u) + pa.extent + pb.extent
    cut = 40.0 / min(pa.width, pb.width)

    def integrand(k):
        return (k / _FOUR_PI) * _sector_product(pa, pb, k, sector) * np.exp(1j * k * u)

    main = integrate_oscillatory(integrand, 0.0, cut, max_freq)
    coeffs, offs = _tail_pairs(pa, pb, u, sector)
    return main + oscillatory_tail(coeffs, offs, cut, 3)


@lru_cache(maxsize=4096)
def _amplitude_sector_unit_inner(nodes_a, nodes_b, u, sector, k_min):
    pa = ProfileFunction(nodes_a)
    pb = ProfileFunction(nodes_b)
    max_freq = abs(u) + pa.extent + pb.extent
    cut = max(40.0 / min(pa.width, pb.width), 2.0 * k_min)

    def integrand(k):
        return (
            _sector_product(pa, pb, k, sector) * np.exp(1j * k * u) / (_FOUR_PI * k)
        )

    main = integrate_oscillatory(integrand, k_min, cut, max_freq)
    coeffs, offs = _tail_pairs(pa, pb, u, sector)
    return main + oscillatory_tail(coeffs, offs, cut, 5)


# ---------------------------------------------------------------------------
# cavity mode sums (unit coupling)


def _cavity_mode_overlaps(nodes, length: float, j_max: int) -> np.ndarray:
    """Exact f_j = int f(x) sin(j pi x / L) dx for j = 1..j_max."""
    prof = ProfileFunction(nodes)
    c = np.arange(1, j_max + 1) * np.pi / length
    total = np.zeros(j_max)
    for (x0, v0), (x1, v1) in zip(prof.nodes[:-1], prof.nodes[1:]):
        b = (v1 - v0) / (x1 - x0)
        a = v0 - b * x0
        # int (a + bx) sin(cx) dx = -(a + bx) cos(cx)/c + b sin(cx)/c^2
        total += (
            -(a + b * x1) * np.cos(c * x1) / c
            + (a + b * x0) * np.cos(c * x0) / c
            + b * (np.sin(c * x1) - np.sin(c * x0)) / c**2
        )
    return total


@lru_cache(maxsize=4096)
def _cavity_unit_amps(nodes, t, length, j_max):
    j = np.arange(1, j_max + 1)
    fj = _cavity_mode_overlaps(nodes, length, j_max)
    amps = -1j * np.exp(1j * j * np.pi * t / length) * fj / np.sqrt(j * np.pi)
    amps.setflags(write=False)
    return amps


def cavity_mode_amp(gen: DisplacementGenerator, j: int) -> complex:
    """Mode-j displacement amplitude a(j) including the coupling constant."""
    kern = gen.kernel
    if not isinstance(kern, CavityKernel):
        raise KernelMismatchError("cavity_mode_amp needs a CavityKernel generator")
    if not 1 <= j <= kern.mode_cutoff:
        raise GeometryError(f"mode index {j} outside 1..{kern.mode_cutoff}")
    amps = _cavity_unit_amps(
        gen.physical_profile.nodes, gen.event_time, kern.length, kern.mode_cutoff
    )
    return gen.strength * complex(amps[j - 1])


def cavity_tail_bound(a: DisplacementGenerator, b: DisplacementGenerator) -> float:
    """Bound on the neglected tail sum_{j > J} |a(j) b(j)*|.

    |f_j| <= (L/pi)^2 TV(f') / j^2 gives |a(j)| <= C j^{-5/2}, hence a tail
    below C_a C_b / (pi 4 J^4); doubling J shrinks it 16-fold.
    """
    kern = a.kernel
    j_cut = min(a.kernel.mode_cutoff, b.kernel.mode_cutoff)
    ca = (kern.length / np.pi) ** 2 * a.physical_profile.total_slope_variation
    cb = (kern.length / np.pi) ** 2 * b.physical_profile.total_slope_variation
    return abs(a.strength * b.strength) * ca * cb / (np.pi * 4 * j_cut**4)


# ---------------------------------------------------------------------------
# public inner products


def _check_compatible(a: DisplacementGenerator, b: DisplacementGenerator) -> None:
    ka, kb = a.kernel, b.kernel
    if type(ka) is not type(kb):
        raise KernelMismatchError(f"kernel variants differ: {ka} vs {kb}")
    if isinstance(ka, AmplitudeKernel) and ka.ir_cutoff != kb.ir_cutoff:
        raise KernelMismatchError("amplitude kernels must share the IR cutoff")
    if isinstance(ka, CavityKernel) and ka.length != kb.length:
        raise KernelMismatchError("cavity kernels must share the cavity length")


def displacement_inner(
    a: DisplacementGenerator,
    b: DisplacementGenerator,
    truncation_tol: float | None = 1e-7,
) -> complex:
    """int a(k) b*(k) dk (continuum) or sum_j a(j) b*(j) (cavity).

    Exactly bilinear in the signed couplings: the geometric unit integral
    is computed once and cached, then scaled. truncation_tol=None skips
    the cavity tail check, for kernels whose small mode cutoff is the
    model itself rather than an approximation.
    """
    _check_compatible(a, b)
    scale = a.strength * b.strength
    if scale == 0.0:
        return 0j
    if isinstance(a.kernel, MomentumKernel):
        total = 0j
        for sec in set(a.kernel.sectors) & set(b.kernel.sectors):
            total += _momentum_sector_unit_inner(
                a.profile.nodes, b.profile.nodes, _lightcone_offset(a, b, sec), sec
            )
        return scale * total
    if isinstance(a.kernel, AmplitudeKernel):
        total = 0j
        for sec in ("right", "left"):
            total += _amplitude_sector_unit_inner(
                a.profile.nodes, b.profile.nodes, _lightcone_offset(a, b, sec), sec,
                a.kernel.ir_cutoff,
            )
        return scale * total
    j_cut = min(a.kernel.mode_cutoff, b.kernel.mode_cutoff)
    amps_a = _cavity_unit_amps(
        a.physical_profile.nodes, a.event_time, a.kernel.length, j_cut
    )
    amps_b = _cavity_unit_amps(
        b.physical_profile.nodes, b.event_time, b.kernel.length, j_cut
    )
    value = scale * np.sum(amps_a * np.conj(amps_b))
    if truncation_tol is not None:
        tail = cavity_tail_bound(a, b)
        if tail > truncation_tol * max(abs(value), abs(scale)):
            raise CavityTruncationError(
                f"mode tail bound {tail:.3e} exceeds tolerance at J={j_cut}"
            )
    return complex(value)


def displacement_norm_sq(gen: DisplacementGenerator) -> float:
    return displacement_inner(gen, gen).real


def phi(a: DisplacementGenerator, b: DisplacementGenerator) -> float:
    """Interaction phase phi(a, b) = Im int a(k) b*(k) dk; antisymmetric."""
    return float(np.imag(displacement_inner(a, b)))


# ---------------------------------------------------------------------------
# closed forms


def phi_momentum_closed_form(
    alice: DisplacementGenerator, bob: DisplacementGenerator
) -> float:
    """phi(bob, alice) for right-momentum couplings, by exact piecewise integration.

    Equals (mu_A mu_B / 4) int f'(x) h(x) dx with f Alice's positioned profile
    and h Bob's profile dragged back along the light cone by t_B - t_A.
    Disjoint dragged supports give exactly 0 (no sensing possible).
    """
    for g in (alice, bob):
        if not (isinstance(g.kernel, MomentumKernel) and g.kernel.sector == "right"):
            raise KernelMismatchError("closed form requires right-momentum couplings")
    delay = bob.event_time - alice.event_time
    h = bob.physical_profile.translated(-delay)
    overlap = alice.physical_profile.derivative_overlap(h)
    return 0.25 * alice.strength * bob.strength * overlap


def sensing_overlap(
    alice: DisplacementGenerator, bob_profile: ProfileFunction, delay: float
) -> float:
    """int f_A'(x) h(x) dx with h the positioned receiver profile dragged by delay."""
    h = bob_profile.translated(-delay)
    return alice.physical_profile.derivative_overlap(h)


def solve_sensing_strength(
    alice: DisplacementGenerator,
    bob_profile: ProfileFunction,
    delay: float,
    target_phase: float = np.pi / 2,
) -> float:
    """Coupling mu_B that makes phi(gamma, alpha) equal target_phase exactly.

    From phi = (mu_A mu_B / 4) int f' h, so mu_B = 4 * target / (mu_A int f' h);
    inversely proportional to mu_A. Raises DegenerateGeometryError when the
    overlap integral vanishes (e.g. identical symmetric time-aligned
    profiles), meaning this profile pair cannot sense.
    """
    overlap = sensing_overlap(alice, bob_profile, delay)
    scale = (
        alice.physical_profile.total_slope_variation
        * max(abs(v) for _, v in bob_profile.nodes)
        * bob_profile.width
    )
    if abs(overlap) <= 1e-13 * max(scale, 1e-300):
        raise DegenerateGeometryError(
            "degenerate geometry: int f'(x) h(x) dx = 0, no sensing possible"
        )
    if alice.strength == 0.0:
        raise DegenerateGeometryError("sender coupling is zero")
    return 4.0 * target_phase / (alice.strength * overlap)


def cavity_phase_closed_form(
    later: DisplacementGenerator, earlier: DisplacementGenerator
) -> float:
    """phi(later, earlier) inside the no-reflection window.

    The amplitude commutator is the constant i/2 at strictly timelike
    separation before any wall reflection connects the two couplings, so
    phi = (lam_a lam_b / 4) (int f)(int g) with the sign of t_a - t_b.
    """
    sgn = 1.0 if later.event_time >= earlier.event_time else -1.0
    return (
        0.25
        * later.strength
        * earlier.strength
        * later.physical_profile.area
        * earlier.physical_profile.area
        * sgn
    )


def cavity_phase_window(
    a: DisplacementGenerator, b: DisplacementGenerator
) -> tuple[bool, float]:
    """Whether (a, b) lie in the closed form's validity window, with margin.

    Requires every pair of support points strictly timelike separated and
    the delay shorter than the shortest wall-reflected light path between
    the supports.
    """
    kern = a.kernel
    lo_a, hi_a = a.physical_profile.support
    lo_b, hi_b = b.physical_profile.support
    dt = abs(a.event_time - b.event_time)
    max_dist = max(hi_a - lo_b, hi_b - lo_a)
    reflect = min(lo_a + lo_b, 2 * kern.length - hi_a - hi_b)
    margin = min(dt - max_dist, reflect - dt)
    return margin > 0.0, margin


# ---------------------------------------------------------------------------
# amplitude coupling norm and IR diagnostics


@dataclass(frozen=True)
class AmplitudeNormReport:
    """||gamma||^2 of an amplitude coupling plus its IR-divergence diagnostic."""

    value: float
    ir_cutoff: float
    halved_cutoff_value: float
    divergence_warning: bool


def amplitude_kernel_norm(gen: DisplacementGenerator) -> AmplitudeNormReport:
    """Norm of an amplitude-coupling displacement with a hard IR cutoff.

    Grows like log(1/k_min): the halved-cutoff value is reported and the
    divergence flag set when halving k_min moves the norm by more than 1%.
    """
    if not isinstance(gen.kernel, AmplitudeKernel):
        raise KernelMismatchError("amplitude_kernel_norm needs an AmplitudeKernel")
    value = displacement_norm_sq(gen)
    halved_gen = DisplacementGenerator(
        AmplitudeKernel(gen.kernel.ir_cutoff / 2.0),
        gen.coupling,
        gen.profile,
        gen.event_time,
        gen.position,
        gen.sign,
    )
    halved = displacement_norm_sq(halved_gen)
    if value == 0.0:
        warn = False
    else:
        warn = abs(halved - value) > 0.01 * abs(value)
    return AmplitudeNormReport(value, gen.kernel.ir_cutoff, halved, warn)

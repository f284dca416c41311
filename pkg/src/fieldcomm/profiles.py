"""Piecewise-linear detector smearing profiles and their exact integrals.

Profiles are continuous, compactly supported, piecewise-linear functions
f(x) given by ordered (position, value) nodes with zero endpoint values.
This family is closed under translation and mirroring, has an exact
Fourier transform (sum of per-segment antiderivatives), and its second
distributional derivative is a finite sum of deltas at the nodes, so no
boundary delta terms ever appear in f'.

Fourier convention: f~(k) = int dx f(x) e^{ikx}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ProfileError

# |k| * extent below which the Taylor form of f~ replaces the jump form,
# which loses precision to cancellation as k -> 0.
_SERIES_CUTOFF = 0.25
_SERIES_TERMS = 26


@dataclass(frozen=True)
class ProfileFunction:
    """Continuous compactly supported piecewise-linear smearing f(x)."""

    nodes: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.nodes) < 3:
            raise ProfileError("profile needs at least 3 nodes")
        xs = [x for x, _ in self.nodes]
        vs = [v for _, v in self.nodes]
        if not all(np.isfinite(xs)) or not all(np.isfinite(vs)):
            raise ProfileError("profile nodes must be finite")
        if any(x1 <= x0 for x0, x1 in zip(xs[:-1], xs[1:])):
            raise ProfileError("node positions must be strictly increasing")
        if vs[0] != 0.0 or vs[-1] != 0.0:
            raise ProfileError("profile must vanish at its support endpoints")
        if all(v == 0.0 for v in vs):
            raise ProfileError("profile is identically zero")
        object.__setattr__(self, "nodes", tuple((float(x), float(v)) for x, v in self.nodes))

    # -- constructors -------------------------------------------------

    @classmethod
    def triangle(cls, width: float = 1.0, center: float = 0.0) -> "ProfileFunction":
        """Unit-area symmetric triangle supported on (center-width/2, center+width/2)."""
        w = float(width)
        return cls(((center - w / 2, 0.0), (center, 2.0 / w), (center + w / 2, 0.0)))

    @classmethod
    def skew_triangle(cls, width: float = 1.0, center: float = 0.0) -> "ProfileFunction":
        """Unit-area asymmetric triangle with its peak at center - width/4.

        Default sender profile for sensing protocols; its mirror image is
        the matching receiver profile.
        """
        w = float(width)
        return cls(
            ((center - w / 2, 0.0), (center - w / 4, 2.0 / w), (center + w / 2, 0.0))
        )

    # -- geometry -----------------------------------------------------

    @property
    def support(self) -> tuple[float, float]:
        return self.nodes[0][0], self.nodes[-1][0]

    @property
    def width(self) -> float:
        return self.nodes[-1][0] - self.nodes[0][0]

    @property
    def extent(self) -> float:
        """Largest |x| over the support; bounds the Fourier phase frequency."""
        return max(abs(self.nodes[0][0]), abs(self.nodes[-1][0]))

    @property
    def area(self) -> float:
        xs = np.array([x for x, _ in self.nodes])
        vs = np.array([v for _, v in self.nodes])
        return float(np.sum(0.5 * (vs[1:] + vs[:-1]) * np.diff(xs)))

    @property
    def is_unit_area(self) -> bool:
        return abs(self.area - 1.0) <= 1e-12

    def translated(self, d: float) -> "ProfileFunction":
        return ProfileFunction(tuple((x + d, v) for x, v in self.nodes))

    def mirrored(self, about: float = 0.0) -> "ProfileFunction":
        return ProfileFunction(tuple((2 * about - x, v) for x, v in reversed(self.nodes)))

    def normalized(self) -> "ProfileFunction":
        a = self.area
        if a == 0.0:
            raise ProfileError("cannot normalize a zero-area profile")
        return ProfileFunction(tuple((x, v / a) for x, v in self.nodes))

    # -- evaluation ---------------------------------------------------

    def __call__(self, x):
        xs = [p[0] for p in self.nodes]
        vs = [p[1] for p in self.nodes]
        return np.interp(x, xs, vs, left=0.0, right=0.0)

    def slopes(self) -> np.ndarray:
        xs = np.array([p[0] for p in self.nodes])
        vs = np.array([p[1] for p in self.nodes])
        return np.diff(vs) / np.diff(xs)

    def slope_jumps(self) -> tuple[np.ndarray, np.ndarray]:
        """Node positions and jumps of f' there (= weights of the deltas in f'')."""
        s = self.slopes()
        jumps = np.concatenate(([s[0]], np.diff(s), [-s[-1]]))
        xs = np.array([p[0] for p in self.nodes])
        return xs, jumps

    @property
    def total_slope_variation(self) -> float:
        """Sum of |f''| delta weights; |f~(k)| <= this / k^2."""
        return float(np.sum(np.abs(self.slope_jumps()[1])))

    def moments(self, m_max: int) -> np.ndarray:
        """Exact moments int x^m f(x) dx for m = 0..m_max."""
        xs = np.array([p[0] for p in self.nodes])
        vs = np.array([p[1] for p in self.nodes])
        out = np.zeros(m_max + 1)
        for (x0, v0), (x1, v1) in zip(self.nodes[:-1], self.nodes[1:]):
            b = (v1 - v0) / (x1 - x0)
            a = v0 - b * x0
            for m in range(m_max + 1):
                out[m] += a * (x1 ** (m + 1) - x0 ** (m + 1)) / (m + 1)
                out[m] += b * (x1 ** (m + 2) - x0 ** (m + 2)) / (m + 2)
        return out

    # -- exact Fourier transform ---------------------------------------

    def fourier(self, k) -> complex | np.ndarray:
        """Closed-form f~(k) = int f(x) e^{ikx} dx.

        Uses the slope-jump representation f~(k) = -k^{-2} sum_i J_i e^{ik x_i}
        away from k = 0 and the Taylor series in k near 0, so the result is
        continuous through k = 0 where it equals the profile area.
        """
        k_arr = np.atleast_1d(np.asarray(k, dtype=float))
        out = np.empty(k_arr.shape, dtype=complex)
        small = np.abs(k_arr) * max(self.extent, 1e-300) < _SERIES_CUTOFF
        if np.any(small):
            ks = k_arr[small]
            mom = self.moments(_SERIES_TERMS)
            acc = np.zeros(ks.shape, dtype=complex)
            term = np.ones(ks.shape, dtype=complex)
            for m in range(_SERIES_TERMS + 1):
                acc += term * mom[m]
                term = term * (1j * ks) / (m + 1)
            out[small] = acc
        if np.any(~small):
            kl = k_arr[~small]
            xs, jumps = self.slope_jumps()
            out[~small] = -(jumps[None, :] * np.exp(1j * np.outer(kl, xs))).sum(axis=1) / kl**2
        if np.isscalar(k) or np.asarray(k).ndim == 0:
            return complex(out[0])
        return out

    # -- exact bilinear integrals --------------------------------------

    def derivative_overlap(self, other: "ProfileFunction") -> float:
        """Exact int f'(x) g(x) dx for this profile f and another profile g.

        f' is piecewise constant and g piecewise linear, so the integrand is
        piecewise linear between the merged breakpoints and the trapezoid
        rule on those intervals is exact.
        """
        xs = sorted({x for x, _ in self.nodes} | {x for x, _ in other.nodes})
        lo = max(self.support[0], other.support[0])
        hi = min(self.support[1], other.support[1])
        if hi <= lo:
            return 0.0
        slopes = self.slopes()
        own = np.array([p[0] for p in self.nodes])
        total = 0.0
        for x0, x1 in zip(xs[:-1], xs[1:]):
            if x1 <= lo or x0 >= hi:
                continue
            xm = 0.5 * (x0 + x1)
            idx = np.searchsorted(own, xm) - 1
            if idx < 0 or idx >= len(slopes):
                continue
            g0, g1 = other(x0), other(x1)
            total += slopes[idx] * 0.5 * (g0 + g1) * (x1 - x0)
        return float(total)

    def overlaps_support(self, other: "ProfileFunction") -> bool:
        return (
            min(self.support[1], other.support[1])
            > max(self.support[0], other.support[0])
        )

"""Point-vortex stream kernels and their interface traces.

The flow carries one vortex in the lower layer at z = (0, y0) and its
opposite-signed phantom in the upper layer at (0, y1).  Each layer's vortex
part of the stream function is the kernel centered at that layer's vortex
minus the kernel centered at the other one, so the upper trace is exactly
the negative of the lower trace.

Two kernels are available.  "free_space" is log(x^2 + y^2)/(4 pi).
"periodized" sums the free-space kernel over the 2L-periodic lattice in
closed form, log(cosh(pi y/L) - cos(pi x/L))/(4 pi); it has the same local
singularity strength and is the default because interface traces built from
it are exactly periodic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularEvaluation, VortexTooClose

KERNELS = ("free_space", "periodized")

#: hard singularity floor as a fraction of the layer depth scale
SINGULAR_RADIUS = 1e-12


def _check_kernel(kernel: str) -> None:
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}; choose from {KERNELS}")


@dataclass(frozen=True)
class VortexPair:
    """Vortex position z = (0, y) and phantom position (0, y1), x-aligned."""

    lower: tuple[float, float]
    upper: tuple[float, float]

    def __post_init__(self):
        zl = (float(self.lower[0]), float(self.lower[1]))
        zu = (float(self.upper[0]), float(self.upper[1]))
        if zl[0] != 0.0 or zu[0] != 0.0:
            raise ValueError("both vortices must sit on the symmetry axis x = 0")
        if not zl[1] < zu[1]:
            raise ValueError("lower vortex must lie strictly below the phantom")
        object.__setattr__(self, "lower", zl)
        object.__setattr__(self, "upper", zu)


def gamma(dx, dy, kernel: str = "free_space", half_period: float = np.pi,
          exclusion: float = SINGULAR_RADIUS):
    """Kernel value at displacement (dx, dy) from the vortex."""
    _check_kernel(kernel)
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    if kernel == "free_space":
        r2 = dx * dx + dy * dy
        if np.any(r2 < exclusion * exclusion):
            raise SingularEvaluation(f"evaluation within {exclusion:.1e} of the vortex")
        return np.log(r2) / (4.0 * np.pi)
    a = np.pi / half_period
    den = np.cosh(a * dy) - np.cos(a * dx)
    if np.any(den < 0.5 * (a * exclusion) ** 2):
        raise SingularEvaluation(f"evaluation within {exclusion:.1e} of the vortex")
    return np.log(den) / (4.0 * np.pi)


def gamma_grad(dx, dy, kernel: str = "free_space", half_period: float = np.pi,
               exclusion: float = SINGULAR_RADIUS):
    """Kernel gradient (d/dx, d/dy) at displacement (dx, dy)."""
    _check_kernel(kernel)
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    if kernel == "free_space":
        r2 = dx * dx + dy * dy
        if np.any(r2 < exclusion * exclusion):
            raise SingularEvaluation(f"evaluation within {exclusion:.1e} of the vortex")
        return dx / (2.0 * np.pi * r2), dy / (2.0 * np.pi * r2)
    a = np.pi / half_period
    den = np.cosh(a * dy) - np.cos(a * dx)
    if np.any(den < 0.5 * (a * exclusion) ** 2):
        raise SingularEvaluation(f"evaluation within {exclusion:.1e} of the vortex")
    s = a / (4.0 * np.pi)
    return s * np.sin(a * dx) / den, s * np.sinh(a * dy) / den


def gamma_hess(dx, dy, kernel: str = "free_space", half_period: float = np.pi,
               exclusion: float = SINGULAR_RADIUS):
    """Second derivatives (d_xx, d_xy, d_yy) of the kernel."""
    _check_kernel(kernel)
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    if kernel == "free_space":
        r2 = dx * dx + dy * dy
        if np.any(r2 < exclusion * exclusion):
            raise SingularEvaluation(f"evaluation within {exclusion:.1e} of the vortex")
        r4 = r2 * r2
        gxx = (dy * dy - dx * dx) / (2.0 * np.pi * r4)
        gxy = -dx * dy / (np.pi * r4)
        return gxx, gxy, -gxx
    a = np.pi / half_period
    den = np.cosh(a * dy) - np.cos(a * dx)
    if np.any(den < 0.5 * (a * exclusion) ** 2):
        raise SingularEvaluation(f"evaluation within {exclusion:.1e} of the vortex")
    s = a * a / (4.0 * np.pi)
    sx, shy = np.sin(a * dx), np.sinh(a * dy)
    gxx = s * (np.cos(a * dx) * den - sx * sx) / (den * den)
    gxy = -s * sx * shy / (den * den)
    return gxx, gxy, -gxx


def pair_induced_speed(pair: VortexPair, kernel: str = "free_space",
                       half_period: float = np.pi) -> float:
    """Horizontal drift the phantom induces at the lower vortex.

    This is the y-derivative of the kernel at the displacement z - z1 and
    sets the leading-order wave speed of the branch.
    """
    dy = pair.lower[1] - pair.upper[1]
    _, gy = gamma_grad(0.0, dy, kernel, half_period)
    return float(gy)


@dataclass(frozen=True)
class VortexTraces:
    """Vortex stream function and derivatives sampled along the interface.

    Lower-layer fields are phi_*; upper-layer fields are their negatives and
    carried explicitly for readability at use sites.  Second derivatives
    feed the elevation block of the analytic Jacobian.
    """

    phi: np.ndarray
    phi_x: np.ndarray
    phi_y: np.ndarray
    phi_xx: np.ndarray
    phi_xy: np.ndarray
    phi_yy: np.ndarray

    @property
    def phi_bar(self):
        return -self.phi

    @property
    def phi_bar_x(self):
        return -self.phi_x

    @property
    def phi_bar_y(self):
        return -self.phi_y

    @property
    def phi_bar_xx(self):
        return -self.phi_xx

    @property
    def phi_bar_xy(self):
        return -self.phi_xy

    @property
    def phi_bar_yy(self):
        return -self.phi_yy


def min_vortex_distance(pair: VortexPair, x, eta) -> float:
    """Smallest node-to-vortex Euclidean distance for either vortex."""
    x = np.asarray(x, dtype=float)
    eta = np.asarray(eta, dtype=float)
    d_low = np.hypot(x - pair.lower[0], eta - pair.lower[1])
    d_up = np.hypot(x - pair.upper[0], eta - pair.upper[1])
    return float(min(d_low.min(), d_up.min()))


def vortex_traces(pair: VortexPair, x, eta, kernel: str = "free_space",
                  half_period: float = np.pi,
                  exclusion: float = SINGULAR_RADIUS) -> VortexTraces:
    """Sample the lower layer's vortex stream function along y = eta(x)."""
    x = np.asarray(x, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if min_vortex_distance(pair, x, eta) < exclusion:
        raise VortexTooClose(
            f"interface passes within {exclusion:.1e} of a vortex"
        )
    dxl, dyl = x - pair.lower[0], eta - pair.lower[1]
    dxu, dyu = x - pair.upper[0], eta - pair.upper[1]

    def diff(fn):
        low = fn(dxl, dyl, kernel, half_period, exclusion)
        up = fn(dxu, dyu, kernel, half_period, exclusion)
        if isinstance(low, tuple):
            return tuple(lo - hi for lo, hi in zip(low, up))
        return low - up

    phi = diff(gamma)
    gx, gy = diff(gamma_grad)
    gxx, gxy, gyy = diff(gamma_hess)
    return VortexTraces(phi=phi, phi_x=gx, phi_y=gy, phi_xx=gxx, phi_xy=gxy, phi_yy=gyy)

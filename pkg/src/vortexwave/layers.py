"""Harmonic solves in the two fluid strips via a sigma-mapped collocation grid.

Each layer is pulled back to a fixed rectangle by the vertical map

    y = y_wall + (1 + tau) h(x),      tau in [-1, 0],

where h = eta + d (lower layer, wall at y = -d) or h = eta - d (upper layer,
wall at y = +d; h is negative there and the same formulas apply).  tau = 0 is
the interface, tau = -1 the rigid wall.  Laplace's equation becomes

    u_xx + 2 tau_x u_xtau + (tau_x^2 + 1/h^2) u_tautau + tau_xx u_tau = 0,
    tau_x  = -(1 + tau) h'(x) / h,
    tau_xx = -(1 + tau) (h'' h - 2 h'^2) / h^2.

Discretization: cosine collocation in x on the half grid (everything here is
even), Chebyshev collocation in tau, Dirichlet data on the interface, and a
zero-Dirichlet gauge on the rigid wall.  The gauge fixes the additive constant
of the stream function and gives the k = 0 Dirichlet-to-Neumann multiplier
the value 1/d on a flat strip.

The assembled operator is dense; one LU factorization per geometry is shared
by every trace solve, the Dirichlet-to-Neumann matrix, interior point
evaluation, and the directional shape derivatives used by the Jacobian.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
from numpy.polynomial import chebyshev as ncheb

from .errors import DegenerateStrip, LinearSolveFailure, PointOutsideLayer
from .spectral import CollocationGrid, EvenField

#: shape-derivative step is SHAPE_STEP * depth / max(1, |direction|_inf)
SHAPE_STEP = 1e-6

#: the strip counts as degenerate once min |h| falls below this fraction of depth
GAP_FLOOR_FRACTION = 0.02

SIDES = ("lower", "upper")


def chebyshev_gauss_lobatto(m: int) -> np.ndarray:
    """Gauss-Lobatto points cos(pi i / m), i = 0..m, from 1 down to -1."""
    return np.cos(np.pi * np.arange(m + 1) / m)


def chebyshev_diff_matrix(m: int) -> np.ndarray:
    """First-derivative collocation matrix on the Gauss-Lobatto points."""
    if m < 2:
        raise ValueError("need at least three vertical points")
    t = chebyshev_gauss_lobatto(m)
    c = np.ones(m + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(m + 1)
    dt = t[:, None] - t[None, :]
    np.fill_diagonal(dt, 1.0)
    d = np.outer(c, 1.0 / c) / dt
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))  # rows annihilate constants
    return d


@lru_cache(maxsize=8)
def _vertical(m: int):
    """Cached vertical-discretization pieces on tau in [-1, 0]."""
    t = chebyshev_gauss_lobatto(m)
    tau = 0.5 * (t - 1.0)
    d_tau = 2.0 * chebyshev_diff_matrix(m)  # d/dtau = 2 d/dt
    d_tau2 = d_tau @ d_tau
    vand_inv = np.linalg.inv(ncheb.chebvander(t, m))
    for arr in (t, tau, d_tau, d_tau2, vand_inv):
        arr.flags.writeable = False
    return t, tau, d_tau, d_tau2, vand_inv


@dataclass(frozen=True)
class LayerGeometry:
    """One layer's mapped-strip data on the half grid.

    gap_floor is the smallest admissible thickness; None means the default
    GAP_FLOOR_FRACTION * depth.
    """

    grid: CollocationGrid
    side: str
    depth: float
    eta: EvenField
    gap_floor: float | None = None

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")
        if not self.depth > 0:
            raise ValueError("depth must be positive")
        if self.eta.coeffs.size != self.grid.n_modes + 1:
            raise ValueError("elevation band does not match the grid")
        floor = self.gap_floor
        if floor is None:
            floor = GAP_FLOOR_FRACTION * self.depth
            object.__setattr__(self, "gap_floor", floor)
        e = self.grid.even_values_half(self.eta)
        h = e + self.depth if self.side == "lower" else e - self.depth
        if np.min(np.abs(h)) <= floor:
            raise DegenerateStrip(
                f"{self.side} layer thickness fell to {np.min(np.abs(h)):.3e}, "
                f"below the floor {floor:.3e}"
            )
        object.__setattr__(self, "_eta_half", e)
        object.__setattr__(self, "_thickness", h)

    @property
    def thickness_half(self) -> np.ndarray:
        """Signed thickness h on the half grid (negative for the upper layer)."""
        return self._thickness

    @property
    def wall_level(self) -> float:
        return -self.depth if self.side == "lower" else self.depth


def _profiles(grid: CollocationGrid, eta_half, side: str, depth: float):
    """x-profiles entering the mapped operator's variable coefficients.

    Returns (q_mixed, q_tt_quad, q_tt_flat, q_t) so that

        c_mixed = outer(q_mixed, 1 + tau)
        c_tt    = outer(q_tt_quad, (1 + tau)^2) + outer(q_tt_flat, 1)
        c_t     = outer(q_t, 1 + tau)
    """
    h = eta_half + depth if side == "lower" else eta_half - depth
    hx = grid.half_d1 @ eta_half
    hxx = grid.half_d2 @ eta_half
    p = hx / h
    return -2.0 * p, p * p, 1.0 / (h * h), -(hxx * h - 2.0 * hx * hx) / (h * h)


class LayerOperators:
    """Factorized mapped-Laplace operator for one layer geometry."""

    def __init__(self, geometry: LayerGeometry, m_vertical: int):
        if m_vertical < 8:
            raise ValueError("vertical resolution must be at least 8")
        self.geometry = geometry
        self.m_vertical = int(m_vertical)
        grid = geometry.grid
        nx = grid.n_modes + 1
        mt = self.m_vertical + 1
        _, tau, d_tau, d_tau2, _ = _vertical(self.m_vertical)
        one_plus = 1.0 + tau

        q_mixed, q_tt_quad, q_tt_flat, q_t = _profiles(
            grid, geometry._eta_half, geometry.side, geometry.depth
        )
        c_mixed = np.outer(q_mixed, one_plus)
        c_tt = np.outer(q_tt_quad, one_plus**2) + q_tt_flat[:, None]
        c_t = np.outer(q_t, one_plus)

        # column-major assembly: entry [(x,i),(k,j)] lives at at4[k,j,x,i],
        # so the reshaped transpose view hands LAPACK a Fortran-ordered
        # operator it can factorize fully in place
        at4 = np.empty((nx, mt, nx, mt))
        np.multiply(
            (q_mixed[:, None] * grid.half_d1).T[:, None, :, None],
            (one_plus[:, None] * d_tau).T[None, :, None, :],
            out=at4,
        )
        dxx_t = grid.half_d2.T
        idx = np.arange(mt)
        at4[:, idx, :, idx] += dxx_t
        for j in range(nx):
            at4[j, :, j, :] += (
                c_tt[j][:, None] * d_tau2 + c_t[j][:, None] * d_tau
            ).T
        arr_t = at4.reshape(nx * mt, nx * mt)

        rows = np.arange(nx) * mt
        replaced = np.concatenate([rows, rows + mt - 1])  # Dirichlet rows
        arr_t[:, replaced] = 0.0
        arr_t[replaced, replaced] = 1.0
        self._interface_rows = rows
        self._replaced_rows = replaced
        self._one_plus = one_plus
        self._c_mixed = c_mixed
        self._c_tt = c_tt
        self._c_t = c_t
        self._d_tau = d_tau
        self._d_tau2 = d_tau2
        try:
            self._lu = sla.lu_factor(arr_t.T, overwrite_a=True,
                                     check_finite=False)
        except (ValueError, sla.LinAlgError) as exc:
            raise LinearSolveFailure(f"layer operator factorization failed: {exc}")
        if not np.all(np.isfinite(self._lu[0])):
            raise LinearSolveFailure("layer operator factorization produced non-finite entries")
        self._dno_matrix = None

    # -- solves -------------------------------------------------------------

    def _apply(self, u: np.ndarray) -> np.ndarray:
        """Matrix-free operator apply, Dirichlet rows replaced by identity."""
        grid = self.geometry.grid
        nx = grid.n_modes + 1
        mt = self.m_vertical + 1
        vec = u.ndim == 1
        w = u.reshape(nx, mt, -1)
        ud1 = np.einsum("xjK,ij->xiK", w, self._d_tau)
        out = np.einsum("xk,kiK->xiK", grid.half_d2, w)
        out += self._c_tt[:, :, None] * np.einsum(
            "xjK,ij->xiK", w, self._d_tau2
        )
        out += self._c_t[:, :, None] * ud1
        out += self._c_mixed[:, :, None] * np.einsum(
            "xk,kiK->xiK", grid.half_d1, ud1
        )
        out = out.reshape(nx * mt, -1)
        out[self._replaced_rows, :] = u.reshape(nx * mt, -1)[
            self._replaced_rows, :
        ]
        return out[:, 0] if vec else out

    def _apply_transpose(self, v: np.ndarray) -> np.ndarray:
        """Matrix-free transpose apply of the row-replaced operator."""
        grid = self.geometry.grid
        nx = grid.n_modes + 1
        mt = self.m_vertical + 1
        w = v.copy()
        w[self._replaced_rows] = 0.0
        w = w.reshape(nx, mt)
        out = grid.half_d2.T @ w
        out += (self._c_tt * w) @ self._d_tau2
        out += (self._c_t * w) @ self._d_tau
        out += grid.half_d1.T @ ((self._c_mixed * w) @ self._d_tau)
        out = out.reshape(-1)
        out[self._replaced_rows] += v[self._replaced_rows]
        return out

    def _solve_rhs(self, rhs: np.ndarray, refine: bool = False) -> np.ndarray:
        out = sla.lu_solve(self._lu, rhs, check_finite=False)
        if refine:
            # one refinement pass keeps the Dirichlet rows exact to roundoff
            out += sla.lu_solve(self._lu, rhs - self._apply(out),
                                check_finite=False)
        if not np.all(np.isfinite(out)):
            raise LinearSolveFailure("layer solve produced non-finite entries")
        return out

    def solve(self, trace: EvenField) -> "LayerSolution":
        grid = self.geometry.grid
        nx = grid.n_modes + 1
        mt = self.m_vertical + 1
        if trace.coeffs.size != nx:
            raise ValueError("trace band does not match the grid")
        rhs = np.zeros(nx * mt)
        rhs[self._interface_rows] = grid.even_values_half(trace)
        u = self._solve_rhs(rhs, refine=True).reshape(nx, mt)
        return LayerSolution(operators=self, trace=trace, values=u)

    # -- interface extraction -------------------------------------------------

    def _extraction(self, eta_half, u_tau_ifc, u_x_ifc):
        """Outward interface derivative from interface traces of u_tau, u_x."""
        grid = self.geometry.grid
        side, depth = self.geometry.side, self.geometry.depth
        h = eta_half + depth if side == "lower" else eta_half - depth
        ex = grid.half_d1 @ eta_half
        sign = 1.0 if side == "lower" else -1.0
        return sign * ((1.0 + ex * ex) * u_tau_ifc / h - ex * u_x_ifc)

    def _interface_tau_x(self, u_values):
        _, _, d_tau, _, _ = _vertical(self.m_vertical)
        u_tau_ifc = u_values @ d_tau[0]
        u_x_ifc = self.geometry.grid.half_d1 @ u_values[:, 0]
        return u_tau_ifc, u_x_ifc

    def dno_values_half(self, sol: "LayerSolution") -> np.ndarray:
        u_tau_ifc, u_x_ifc = self._interface_tau_x(sol.values)
        return self._extraction(self.geometry._eta_half, u_tau_ifc, u_x_ifc)

    def dno_matrix(self) -> np.ndarray:
        """Trace coefficients -> Dirichlet-to-Neumann coefficients."""
        if self._dno_matrix is None:
            grid = self.geometry.grid
            nx = grid.n_modes + 1
            mt = self.m_vertical + 1
            rhs = np.zeros((nx * mt, nx))
            rhs[self._interface_rows, :] = grid._cos_mat
            u_all = self._solve_rhs(rhs).reshape(nx, mt, nx)
            _, _, d_tau, _, _ = _vertical(self.m_vertical)
            u_tau_ifc = np.einsum("jik,i->jk", u_all, d_tau[0])
            u_x_ifc = grid.half_d1 @ u_all[:, 0, :]
            vals = self._extraction(
                self.geometry._eta_half[:, None], u_tau_ifc, u_x_ifc
            )
            self._dno_matrix = grid._cos_inv @ vals
        return self._dno_matrix

    # -- interior evaluation ---------------------------------------------------

    def _map_point(self, point, eta_half=None):
        """(x, y) -> (x, tau) with admissibility checks."""
        x, y = float(point[0]), float(point[1])
        geom = self.geometry
        eta_x = geom.grid.evaluate_even(geom.eta, np.array([x]))[0]
        h = eta_x + geom.depth if geom.side == "lower" else eta_x - geom.depth
        tau = (y - geom.wall_level) / h - 1.0
        if not -1.0 < tau < 0.0:
            raise PointOutsideLayer(
                f"point {(x, y)} is not strictly inside the {geom.side} layer"
            )
        return x, tau, h

    def _vertical_coeffs(self, u_values, x):
        """Chebyshev coefficients (in t) of u(x, .) and of its x-derivative."""
        grid = self.geometry.grid
        _, _, _, _, vand_inv = _vertical(self.m_vertical)
        kx = grid.wavenumbers
        row_val = np.cos(kx * x) @ grid._cos_inv
        row_dx = (-kx * np.sin(kx * x)) @ grid._cos_inv
        return vand_inv @ (u_values.T @ row_val), vand_inv @ (u_values.T @ row_dx)

    def eval_interior(self, sol: "LayerSolution", point) -> float:
        """Solution value at an interior point."""
        x, tau, _ = self._map_point(point)
        cvec, _ = self._vertical_coeffs(sol.values, x)
        return float(ncheb.chebval(2.0 * tau + 1.0, cvec))

    def eval_interior_dy(self, sol: "LayerSolution", point) -> float:
        """Vertical derivative of the solution at an interior point."""
        x, tau, h = self._map_point(point)
        cvec, _ = self._vertical_coeffs(sol.values, x)
        u_tau = 2.0 * ncheb.chebval(2.0 * tau + 1.0, ncheb.chebder(cvec))
        return float(u_tau / h)

    def eval_interior_dx(self, sol: "LayerSolution", point) -> float:
        """Horizontal derivative of the solution at an interior point."""
        x, tau, h = self._map_point(point)
        cvec, dvec = self._vertical_coeffs(sol.values, x)
        t = 2.0 * tau + 1.0
        u_x = ncheb.chebval(t, dvec)
        u_tau = 2.0 * ncheb.chebval(t, ncheb.chebder(cvec))
        geom = self.geometry
        ex = geom.grid.evaluate_odd(geom.grid.ddx(geom.eta), np.array([x]))[0]
        return float(u_x - u_tau * (1.0 + tau) * ex / h)

    def interior_dy_row(self, point) -> np.ndarray:
        """Row functional: trace coefficients -> interior vertical derivative."""
        r = self._interior_dy_adjoint(point)
        return r[self._interface_rows] @ self.geometry.grid._cos_mat

    def _interior_dy_adjoint(self, point) -> np.ndarray:
        """Transpose solve of the interior-dy evaluation functional."""
        x, tau, h = self._map_point(point)
        grid = self.geometry.grid
        nx = grid.n_modes + 1
        mt = self.m_vertical + 1
        _, _, _, _, vand_inv = _vertical(self.m_vertical)
        kx = grid.wavenumbers
        row_x = np.cos(kx * x) @ grid._cos_inv
        dt_row = _chebder_row(2.0 * tau + 1.0, self.m_vertical)
        e = np.outer(row_x, (2.0 / h) * (dt_row @ vand_inv)).ravel()
        out = sla.lu_solve(self._lu, e, trans=1, check_finite=False)
        out += sla.lu_solve(self._lu, e - self._apply_transpose(out), trans=1,
                            check_finite=False)
        if not np.all(np.isfinite(out)):
            raise LinearSolveFailure("adjoint solve produced non-finite entries")
        return out

    # -- directional shape derivatives ----------------------------------------

    def shape_batch(self, sol: "LayerSolution", point=None):
        """Directional derivatives along every elevation cosine mode.

        Differentiates the assembled operator entries by central differences
        (step SHAPE_STEP * depth) and back-substitutes through the factorized
        base operator, so each direction costs one triangular solve instead of
        two fresh factorizations.  Returns (dno_dirs, interior_dy_dirs) where
        dno_dirs[:, k] holds half-grid values of the derivative of the
        interface extraction and interior_dy_dirs[k] the derivative of the
        interior vertical-derivative functional at `point` (None skips it).
        """
        geom = self.geometry
        grid = geom.grid
        nx = grid.n_modes + 1
        mt = self.m_vertical + 1
        side, depth = geom.side, geom.depth
        one_plus = self._one_plus
        u = sol.values
        step = SHAPE_STEP * depth

        _, _, d_tau, d_tau2, _ = _vertical(self.m_vertical)
        w_xd = grid.half_d1 @ u @ d_tau.T
        w_dd = u @ d_tau2.T
        w_d = u @ d_tau.T

        eta0 = geom._eta_half
        basis = grid._cos_mat  # column k: cosine mode k on the half grid

        def all_profiles(eta_half):
            return np.stack(_profiles(grid, eta_half, side, depth))

        d_prof = np.empty((4, nx, nx))  # (profile, x, mode)
        for k in range(nx):
            plus = all_profiles(eta0 + step * basis[:, k])
            minus = all_profiles(eta0 - step * basis[:, k])
            d_prof[:, :, k] = (plus - minus) / (2.0 * step)

        rhs = (
            np.einsum("jk,i,ji->jik", d_prof[0], one_plus, w_xd)
            + np.einsum("jk,i,ji->jik", d_prof[1], one_plus**2, w_dd)
            + np.einsum("jk,ji->jik", d_prof[2], w_dd)
            + np.einsum("jk,i,ji->jik", d_prof[3], one_plus, w_d)
        )
        rhs[:, 0, :] = 0.0
        rhs[:, -1, :] = 0.0  # Dirichlet rows carry no geometry dependence
        rhs = rhs.reshape(nx * mt, nx)
        du = self._solve_rhs(-rhs).reshape(nx, mt, nx)

        u_tau_ifc, u_x_ifc = self._interface_tau_x(u)
        du_tau_ifc = np.einsum("jik,i->jk", du, d_tau[0])
        du_x_ifc = grid.half_d1 @ du[:, 0, :]
        dno_dirs = self._extraction(eta0[:, None], du_tau_ifc, du_x_ifc)
        for k in range(nx):
            plus = self._extraction(eta0 + step * basis[:, k], u_tau_ifc, u_x_ifc)
            minus = self._extraction(eta0 - step * basis[:, k], u_tau_ifc, u_x_ifc)
            dno_dirs[:, k] += (plus - minus) / (2.0 * step)

        if point is None:
            return dno_dirs, None

        adj = self._interior_dy_adjoint(point)
        interior_dirs = -(adj @ rhs)
        x_p = float(point[0])
        y_p = float(point[1])
        cvec, _ = self._vertical_coeffs(u, x_p)
        dcvec = ncheb.chebder(cvec)
        eta_p = grid.evaluate_even(geom.eta, np.array([x_p]))[0]
        mode_at_p = np.cos(grid.wavenumbers * x_p)
        for k in range(nx):
            vals = []
            for s in (step, -step):
                eta_s = eta_p + s * mode_at_p[k]
                h_s = eta_s + depth if side == "lower" else eta_s - depth
                tau_s = (y_p - geom.wall_level) / h_s - 1.0
                vals.append(2.0 * ncheb.chebval(2.0 * tau_s + 1.0, dcvec) / h_s)
            interior_dirs[k] += (vals[0] - vals[1]) / (2.0 * step)
        return dno_dirs, interior_dirs


def _chebder_row(t: float, m: int) -> np.ndarray:
    """Row of dT_j/dt(t) for j = 0..m."""
    out = np.empty(m + 1)
    for j in range(m + 1):
        cj = np.zeros(j + 1)
        cj[j] = 1.0
        out[j] = ncheb.chebval(t, ncheb.chebder(cj)) if j else 0.0
    return out


@dataclass(frozen=True)
class LayerSolution:
    """Mapped harmonic function on one layer, with its generating trace."""

    operators: LayerOperators
    trace: EvenField
    values: np.ndarray  # (half-grid x, vertical) nodal values

    @property
    def coeff_tensor(self) -> np.ndarray:
        """Cosine-in-x by Chebyshev-in-vertical coefficient tensor."""
        grid = self.operators.geometry.grid
        _, _, _, _, vand_inv = _vertical(self.operators.m_vertical)
        return grid._cos_inv @ self.values @ vand_inv.T

    def interface_values_half(self) -> np.ndarray:
        return self.values[:, 0]


# -- module-level convenience API ---------------------------------------------


def build_operators(grid: CollocationGrid, eta: EvenField, depth: float,
                    side: str, m_vertical: int,
                    gap_floor: float | None = None) -> LayerOperators:
    return LayerOperators(LayerGeometry(grid, side, depth, eta, gap_floor), m_vertical)


def solve_layer(grid: CollocationGrid, eta: EvenField, trace: EvenField,
                depth: float, side: str, m_vertical: int) -> LayerSolution:
    """One-shot harmonic solve; factorizes, solves, returns the solution."""
    return build_operators(grid, eta, depth, side, m_vertical).solve(trace)


def dno(grid: CollocationGrid, eta: EvenField, trace: EvenField, depth: float,
        side: str, m_vertical: int) -> EvenField:
    """Dirichlet-to-Neumann map: outward interface derivative of the solve."""
    ops = build_operators(grid, eta, depth, side, m_vertical)
    sol = ops.solve(trace)
    return EvenField(grid._cos_inv @ ops.dno_values_half(sol))


def shape_derivative(grid: CollocationGrid, eta: EvenField, trace: EvenField,
                     direction: EvenField, depth: float, side: str,
                     m_vertical: int, point=None, step: float | None = None):
    """Literal central-difference shape derivative of the layer maps.

    Re-solves on the two perturbed geometries eta +/- h * direction with
    h = step * depth / max(1, |direction|_inf), step defaulting to
    SHAPE_STEP.  Returns the derivative of the Dirichlet-to-Neumann output
    as an EvenField and, when `point` is given, the derivative of the
    interior vertical derivative there.

    At the default step the output carries the central-difference noise
    floor of the two solves (solve roundoff / step, about 1e-4 of scale);
    `shape_batch` differentiates the operator entries instead and is the
    accurate path the system Jacobian uses.
    """
    if step is None:
        step = SHAPE_STEP
    sup = float(np.max(np.abs(grid.even_values_half(direction))))
    h = step * depth / max(1.0, sup)
    outs = []
    for s in (h, -h):
        shifted = EvenField(eta.coeffs + s * direction.coeffs)
        ops = build_operators(grid, shifted, depth, side, m_vertical)
        sol = ops.solve(trace)
        g = ops.dno_values_half(sol)
        val = ops.eval_interior_dy(sol, point) if point is not None else 0.0
        outs.append((g, val))
    dg = (outs[0][0] - outs[1][0]) / (2.0 * h)
    dval = (outs[0][1] - outs[1][1]) / (2.0 * h)
    field = EvenField(grid._cos_inv @ dg)
    return (field, float(dval)) if point is not None else (field, None)


# -- flat-strip reference symbols ----------------------------------------------


def flat_dno_symbol(grid: CollocationGrid, depth: float) -> np.ndarray:
    """Per-mode flat-strip multipliers: k pi/L coth(k pi d/L), and 1/d at k=0."""
    kd = grid.wavenumbers * depth
    out = np.empty(grid.n_modes + 1)
    out[0] = 1.0 / depth
    e = np.exp(-2.0 * kd[1:])
    out[1:] = grid.wavenumbers[1:] * (1.0 + e) / (1.0 - e)
    return out


def flat_interior_dy_symbol(grid: CollocationGrid, depth: float, y: float) -> np.ndarray:
    """Flat lower-strip interior d/dy response at (0, y) per trace mode."""
    if not -depth < y < 0.0:
        raise PointOutsideLayer("flat-strip evaluation point must satisfy -d < y < 0")
    k = grid.wavenumbers
    out = np.empty(grid.n_modes + 1)
    out[0] = 1.0 / depth
    kp = k[1:]
    # k cosh(k(y+d))/sinh(kd), written with decaying exponentials
    num = np.exp(kp * y) + np.exp(-kp * (y + 2.0 * depth))
    den = 1.0 - np.exp(-2.0 * kp * depth)
    out[1:] = kp * num / den
    return out

"""Built-in invariant suite behind the `validate` subcommand.

One curated check per module-level contract that matters at runtime:
flat-strip operator symbols, the trivial solution, the closed-form origin
linearization, finite-difference referees for the Jacobian and the strength
derivative, the origin tangent, and the on-axis symmetry diagnostic.
Each check prints one pass/fail line; the suite is deterministic for a
fixed seed.
"""

from __future__ import annotations

import numpy as np

from .continuation import ContinuationEngine, ContinuationSettings
from .layers import build_operators, flat_dno_symbol, flat_interior_dy_symbol
from .spectral import CollocationGrid, EvenField
from .system import PhysicalParameters, WaveState, WaveSystem
from .vortex import vortex_traces


def _random_state(rng, n_modes, eta_scale=0.02, trace_scale=0.05,
                  speed=0.1) -> WaveState:
    n = n_modes + 1
    decay = np.exp(-0.4 * np.arange(n))
    eta = eta_scale * rng.standard_normal(n) * decay
    eta[0] = 0.0
    return WaveState(
        EvenField(eta),
        EvenField(trace_scale * rng.standard_normal(n) * decay),
        EvenField(trace_scale * rng.standard_normal(n) * decay),
        speed,
    )


def check_flat_dno(params: PhysicalParameters):
    grid = CollocationGrid(params.half_period, 64)
    symbol = flat_dno_symbol(grid, params.depth)
    worst = 0.0
    for side in ("lower", "upper"):
        ops = build_operators(grid, EvenField(np.zeros(65)), params.depth,
                              side, 32)
        mat = ops.dno_matrix()
        for k in range(17):
            worst = max(worst, abs(mat[k, k] - symbol[k]) / abs(symbol[k]))
    return worst < 1e-10, f"worst relative multiplier error {worst:.2e}"


def check_trivial_solution(params: PhysicalParameters):
    system = WaveSystem(params, 64, 32)
    norms = system.residual(system.origin(), 0.0).block_norms()
    worst = max(norms)
    return worst < 1e-12, f"largest origin block norm {worst:.2e}"


def check_origin_linearization(params: PhysicalParameters):
    system = WaveSystem(params, 64, 48)
    gap = np.abs(system.jacobian(system.origin(), 0.0)
                 - system.flat_linearization()).max()
    singulars = np.linalg.svd(
        WaveSystem(params, 64, 32).flat_linearization(), compute_uv=False
    )
    ok = gap < 1e-9 and singulars[-1] > 1e-6
    return ok, (f"elementwise gap {gap:.2e}, "
                f"smallest singular value {singulars[-1]:.2e}")


def check_jacobian_referee(params: PhysicalParameters, seed: int):
    rng = np.random.default_rng(seed)
    system = WaveSystem(params, 16, 12)
    state = _random_state(rng, 16)
    analytic = system.jacobian(state, 0.05)
    fd = system.jacobian(state, 0.05, mode="fd")
    rel = np.linalg.norm(analytic - fd) / np.linalg.norm(fd)
    return rel < 1e-5, f"relative Frobenius discrepancy {rel:.2e}"


def check_strength_derivative(params: PhysicalParameters, seed: int):
    rng = np.random.default_rng(seed + 1)
    system = WaveSystem(params, 16, 12)
    state = _random_state(rng, 16)
    prep = system.prepare(state)
    gap = np.abs(system.strength_derivative(prep, 0.03).to_vector()
                 - system.strength_derivative_fd(state, 0.03)).max()
    return gap < 1e-7, f"max entry gap to central difference {gap:.2e}"


def check_origin_tangent(params: PhysicalParameters):
    system = WaveSystem(params, 16, 16)
    engine = ContinuationEngine(system, ContinuationSettings())
    prep = system.prepare(system.origin())
    tang = engine.tangent(prep, 0.0)
    g = system.grid
    n = g.n_modes + 1
    tr = vortex_traces(params.pair, g.half_nodes, np.zeros(n),
                       params.kernel, params.half_period)
    trace_up = -(g._cos_inv @ tr.phi_bar)
    trace_low = -(g._cos_inv @ tr.phi)
    row = flat_interior_dy_symbol(g, params.depth, params.pair.lower[1])
    speed = system.pair_speed - float(row @ trace_low)
    raw = np.r_[np.zeros(n), trace_up, trace_low, speed, 1.0]
    raw /= np.sqrt(engine.weighted_dot(raw, raw))
    gap = np.abs(tang - raw).max()
    return gap < 1e-8, f"max gap to block substitution {gap:.2e}"


def check_vertical_equilibrium(params: PhysicalParameters, seed: int):
    rng = np.random.default_rng(seed + 2)
    system = WaveSystem(params, 16, 12)
    prep = system.prepare(_random_state(rng, 16))
    gap = abs(system.vertical_equilibrium(prep, 0.03))
    return gap < 1e-10, f"on-axis horizontal derivative {gap:.2e}"


def run_validation(params: PhysicalParameters, seed: int = 0,
                   stream=None) -> bool:
    """Run every check, print one line each, return overall pass."""
    import sys

    stream = stream if stream is not None else sys.stdout
    checks = [
        ("flat_dno_multipliers", lambda: check_flat_dno(params)),
        ("trivial_solution", lambda: check_trivial_solution(params)),
        ("origin_linearization", lambda: check_origin_linearization(params)),
        ("jacobian_fd_referee", lambda: check_jacobian_referee(params, seed)),
        ("strength_derivative_fd", lambda: check_strength_derivative(
            params, seed)),
        ("origin_tangent_oracle", lambda: check_origin_tangent(params)),
        ("vertical_equilibrium", lambda: check_vertical_equilibrium(
            params, seed)),
    ]
    all_ok = True
    for name, check in checks:
        try:
            ok, detail = check()
        except Exception as exc:
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        stream.write(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n")
    return all_ok

"""Discretized variational problem on the cylinder R x S^(N-1).

Fields are tensor products of a Dirichlet line grid (sine-spectral calculus
in s, so derivative energies are exact for the interpolant and accurate to
spectral order for decaying profiles) and the zonal sphere basis of
:mod:`cknsharp.sphere` under the uniform probability measure.  On top of
that sit the Rayleigh quotients of the plain and interpolation inequalities,
a normalized-gradient-descent minimizer with Armijo backtracking, the
Euler-Lagrange residual, the five-step proof-chain slack evaluator, the
second-variation instability detector with its threshold bisection, the
log-radial change of variables from Euclidean space, the spectral-bound
equivalence, and the theta < 1 sandwich verification.

All angular integrals use the probability measure, so the radial benchmark
is the interpolation-family constant radial_interp_constant; the
surface-measure constant follows from the explicit sphere_area bridge.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dst
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import sphere
from .closed_forms import (
    extremal_potential,
    extremal_profile,
    gap_factor,
    lt_constant,
    profile_constants,
    radial_interp_coefficient,
    radial_interp_constant,
)
from .errors import DomainError, NumericsError
from .params import ParamPoint, a_critical, chain_exponents, lambda_sym, theta_min, to_cylinder
from .schrodinger import LineGrid, Potential1D, lowest_eigenpair

__all__ = [
    "CylField",
    "MinimizeOpts",
    "MinimizeReport",
    "ChainReport",
    "SandwichReport",
    "DEFAULT_GRID",
    "DEFAULT_L_MAX",
    "extremal_field",
    "radial_field",
    "rayleigh",
    "minimize_quotient",
    "el_residual",
    "defect_functional",
    "proof_chain",
    "second_variation_mode",
    "fs_threshold",
    "emden_fowler_pushforward",
    "eigenvalue_bound",
    "symmetric_mu_threshold",
    "sandwich_check",
    "cyl_field_csv",
]

DEFAULT_GRID = LineGrid(20.0, 2000)
DEFAULT_L_MAX = 8

_angular_cache: dict = {}


def _angular(N: int, L_max: int):
    """Cached (quadrature, basis matrix) pair for the zonal calculus."""
    key = (N, L_max)
    if key not in _angular_cache:
        quad_ = sphere.default_quadrature(N, L_max)
        _angular_cache[key] = (quad_, sphere.basis_matrix(quad_, L_max))
    return _angular_cache[key]


@dataclass
class CylField:
    """Field on R x S^(N-1): coefficients indexed (s-node, zonal degree)."""

    grid: LineGrid
    N: int
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim != 2 or self.data.shape[0] != self.grid.n:
            raise DomainError(f"data must have shape ({self.grid.n}, L_max+1), got {self.data.shape}")
        if self.N not in (2, 3):
            raise DomainError(f"numerical cylinder operations support N in {{2, 3}}, got N={self.N}")

    @property
    def L_max(self) -> int:
        return self.data.shape[1] - 1

    def nodal(self) -> np.ndarray:
        """Values at (s-node, angular quadrature node)."""
        _, B = _angular(self.N, self.L_max)
        return self.data @ B.T

    @classmethod
    def from_nodal(cls, grid: LineGrid, N: int, L_max: int, values: np.ndarray) -> "CylField":
        quad_, B = _angular(N, L_max)
        return cls(grid, N, values @ (quad_.weights[:, None] * B))

    def copy(self) -> "CylField":
        return CylField(self.grid, self.N, self.data.copy())


def radial_field(grid: LineGrid, N: int, L_max: int, profile) -> CylField:
    """Field depending on s only; ``profile`` is a callable or nodal samples."""
    values = profile(grid.nodes()) if callable(profile) else np.asarray(profile, dtype=float)
    data = np.zeros((grid.n, L_max + 1))
    data[:, 0] = values
    return CylField(grid, N, data)


def extremal_field(grid: LineGrid, N: int, L_max: int, Lambda: float, p: float, theta: float = 1.0) -> CylField:
    """The s-only extremal profile embedded as a cylinder field."""
    pc = profile_constants(Lambda, p, theta)
    return radial_field(grid, N, L_max, lambda s: extremal_profile(s, pc, p))


# ---------------------------------------------------------------------------
# sine-spectral calculus in s

def _freqs(grid: LineGrid) -> np.ndarray:
    return np.arange(1, grid.n + 1) * math.pi / (2.0 * grid.S)


def _dst(arr: np.ndarray) -> np.ndarray:
    return dst(arr, type=1, norm="ortho", axis=0)


def _mode_senergy(grid: LineGrid, data: np.ndarray) -> np.ndarray:
    """Per-column Dirichlet energy of the sine interpolant."""
    ch = _dst(data)
    return grid.h * ((_freqs(grid) ** 2)[:, None] * ch**2).sum(axis=0)


def _second_derivative(grid: LineGrid, data: np.ndarray) -> np.ndarray:
    return -_dst((_freqs(grid) ** 2)[:, None] * _dst(data))


def _angular_eigs(N: int, L_max: int) -> np.ndarray:
    ell = np.arange(L_max + 1)
    return ell * (ell + N - 2.0)


def _pieces(u: CylField, p: float):
    """(E, M, P, nodal) with E the full gradient energy, M the squared L2
    norm, P the integral of |u|^p, all under the probability measure."""
    mode_mass = u.grid.h * (u.data**2).sum(axis=0)
    senergy = _mode_senergy(u.grid, u.data)
    eigs = _angular_eigs(u.N, u.L_max)
    E = float(senergy.sum() + (eigs * mode_mass).sum())
    M = float(mode_mass.sum())
    quad_, _ = _angular(u.N, u.L_max)
    U = u.nodal()
    P = float(u.grid.h * (np.abs(U) ** p @ quad_.weights).sum())
    return E, M, P, U


def rayleigh(u: CylField, Lambda: float, p: float, theta: float = 1.0) -> float:
    """Scale-invariant quotient whose infimum is the inverse best constant.

    theta = 1: (E + Lambda M) / ||u||_p^2 with E the full gradient energy
    and M the squared L2 norm; theta < 1: (E + Lambda M)^theta M^(1-theta)
    / ||u||_p^2.  Probability measure on the angular factor.
    """
    if Lambda <= 0 or p <= 2:
        raise DomainError(f"need Lambda > 0 and p > 2, got ({Lambda}, {p})")
    E, M, P, _ = _pieces(u, p)
    if M == 0.0:
        raise DomainError("zero field")
    num = (E + Lambda * M) if theta == 1.0 else (E + Lambda * M) ** theta * M ** (1 - theta)
    return num / P ** (2.0 / p)


def _value_and_grad(u: CylField, Lambda: float, p: float, theta: float):
    """Quotient value and its gradient w.r.t. the coefficients, in the
    h-weighted (functional) scaling."""
    grid, N, L_max = u.grid, u.N, u.L_max
    quad_, B = _angular(N, L_max)
    eigs = _angular_eigs(N, L_max)
    w2 = _freqs(grid) ** 2

    ch = _dst(u.data)
    senergy = grid.h * (w2[:, None] * ch**2).sum(axis=0)
    mode_mass = grid.h * (u.data**2).sum(axis=0)
    E = float(senergy.sum() + (eigs * mode_mass).sum())
    M = float(mode_mass.sum())
    U = u.data @ B.T
    absU = np.abs(U)
    P = float(grid.h * (absU**p @ quad_.weights).sum())
    if M == 0.0 or P == 0.0:
        raise DomainError("zero field")

    # functional gradients (plain coefficient gradient divided by h)
    gE = 2.0 * (_dst(w2[:, None] * ch) + u.data * eigs[None, :])
    gM = 2.0 * u.data
    gP = p * ((absU ** (p - 1) * np.sign(U)) * quad_.weights[None, :]) @ B

    n_p2 = P ** (2.0 / p)
    if theta == 1.0:
        G = E + Lambda * M
        gG = gE + Lambda * gM
    else:
        G = (E + Lambda * M) ** theta * M ** (1 - theta)
        common = (E + Lambda * M) ** (theta - 1) * M ** (-theta)
        gG = common * (theta * M * (gE + Lambda * gM) + (1 - theta) * (E + Lambda * M) * gM)
    Q = G / n_p2
    gQ = (gG - (2.0 / p) * (G / P) * gP) / n_p2
    return Q, gQ, E, M


@dataclass
class MinimizeOpts:
    """Controls for the normalized gradient flow."""

    step0: float = 1.0
    armijo: float = 1e-4
    grow: float = 1.3
    shrink: float = 0.5
    max_backtracks: int = 40
    max_iter: int = 4000
    q_rel_tol: float = 1e-10
    grad_tol: float = 1e-8
    multistart: bool = False
    seed: int = 7


@dataclass
class MinimizeReport:
    """Outcome of a quotient minimization."""

    constant: float
    quotient: float
    iterations: int
    grad_norm: float
    angular_fraction: float
    converged: bool
    Lambda: float
    p: float
    theta: float
    N: int
    minimizer: CylField = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "constant": self.constant,
            "quotient": self.quotient,
            "iterations": self.iterations,
            "grad_norm": self.grad_norm,
            "angular_fraction": self.angular_fraction,
            "converged": self.converged,
            "Lambda": self.Lambda,
            "p": self.p,
            "theta": self.theta,
            "N": self.N,
        }


def _angular_fraction(u: CylField, Lambda: float) -> float:
    mode_mass = u.grid.h * (u.data**2).sum(axis=0)
    senergy = _mode_senergy(u.grid, u.data)
    eigs = _angular_eigs(u.N, u.L_max)
    mode_energy = senergy + (eigs + Lambda) * mode_mass
    total = float(mode_energy.sum())
    if total == 0.0:
        return 0.0
    return float(mode_energy[1:].sum()) / total


def _descend(u0: CylField, Lambda: float, p: float, theta: float, opts: MinimizeOpts) -> MinimizeReport:
    h = u0.grid.h
    # gradient-energy preconditioner: the quotient Hessian is dominated by
    # the quadratic form, diagonal in the sine x zonal basis, so descending
    # along its inverse image removes the grid-induced stiffness
    w2 = _freqs(u0.grid) ** 2
    eigs = _angular_eigs(u0.N, u0.L_max)
    sym = 1.0 / (w2[:, None] + eigs[None, :] + Lambda)

    def precondition(grad: np.ndarray) -> np.ndarray:
        return _dst(sym * _dst(grad))

    mass0 = h * float((u0.data**2).sum())
    if mass0 == 0.0:
        raise DomainError("zero start field")
    u = u0.copy()
    u.data /= math.sqrt(mass0)
    Q, g, _, _ = _value_and_grad(u, Lambda, p, theta)
    t = opts.step0
    iters = 0
    converged = False
    gnorm = math.inf
    while iters < opts.max_iter:
        iters += 1
        d = precondition(g)
        slope = h * float((g * d).sum())  # positive: d is a descent direction
        gnorm = math.sqrt(slope)
        if gnorm < opts.grad_tol:
            converged = True
            break
        accepted = False
        t = min(t * opts.grow, 1e3)
        for _ in range(opts.max_backtracks):
            trial = CylField(u.grid, u.N, u.data - t * d)
            try:
                Qnew = rayleigh(trial, Lambda, p, theta)
            except (DomainError, FloatingPointError):
                Qnew = math.inf
            if Qnew <= Q - opts.armijo * t * slope:
                accepted = True
                break
            t *= opts.shrink
        if not accepted:
            # line search stalled at machine precision: treat as converged
            converged = True
            break
        trial.data /= math.sqrt(h * float((trial.data**2).sum()))
        rel = abs(Q - Qnew) / abs(Q)
        u = trial
        Q, g, _, _ = _value_and_grad(u, Lambda, p, theta)
        if rel < opts.q_rel_tol:
            converged = True
            break
    return MinimizeReport(
        constant=1.0 / Q,
        quotient=Q,
        iterations=iters,
        grad_norm=gnorm,
        angular_fraction=_angular_fraction(u, Lambda),
        converged=converged,
        Lambda=Lambda,
        p=p,
        theta=theta,
        N=u.N,
        minimizer=u,
    )


def minimize_quotient(
    start: CylField, Lambda: float, p: float, theta: float = 1.0, opts: MinimizeOpts | None = None
) -> MinimizeReport:
    """Normalized gradient descent on the quotient, Armijo backtracking.

    With opts.multistart the flow is restarted from three seeded
    perturbations of the start (its radial part, an added degree-1 bump,
    a random perturbation) as a guard against the non-convexity past the
    instability threshold, and the best run is returned.  Exhausting
    max_iter yields a non-converged report, not an exception.
    """
    opts = opts or MinimizeOpts()
    starts = [start]
    if opts.multistart:
        radial = start.copy()
        radial.data[:, 1:] = 0.0
        bump = start.copy()
        if bump.L_max >= 1:
            bump.data[:, 1] += 0.1 * np.abs(bump.data[:, 0])
        rng = np.random.default_rng(opts.seed)
        noisy = start.copy()
        scale = 0.05 * float(np.abs(noisy.data).max())
        noisy.data = noisy.data + scale * rng.standard_normal(noisy.data.shape)
        starts += [radial, bump, noisy]
    best = None
    for s in starts:
        rep = _descend(s, Lambda, p, theta, opts)
        if best is None or rep.quotient < best.quotient:
            best = rep
    return best


def el_residual(u: CylField, Lambda: float, p: float, theta: float = 1.0) -> float:
    """h-weighted l2 norm of the Euler-Lagrange residual in coefficient space.

    Residual of -theta (d^2/ds^2 + angular Laplacian) u
    + [(1 - theta) t[u] + Lambda] u - u^(p-1), with t[u] the gradient-to-mass
    ratio; theta = 1 removes the t[u] term.
    """
    E, M, _, U = _pieces(u, p)
    if M == 0.0:
        raise DomainError("zero field")
    quad_, B = _angular(u.N, u.L_max)
    t_u = E / M
    lap_s = _second_derivative(u.grid, u.data)
    lap_ang = -u.data * _angular_eigs(u.N, u.L_max)[None, :]
    nonlin = ((np.abs(U) ** (p - 1) * np.sign(U)) * quad_.weights[None, :]) @ B
    r = -theta * (lap_s + lap_ang) + ((1 - theta) * t_u + Lambda) * u.data - nonlin
    return math.sqrt(u.grid.h * float((r**2).sum()))


def defect_functional(u: CylField, p: float) -> float:
    """Gradient energy minus the p-th power integral: equals -Lambda * M
    on solutions of the Euler-Lagrange equation at parameter Lambda."""
    E, _, P, _ = _pieces(u, p)
    return E - P


@dataclass
class ChainReport:
    """Slacks of the five chained inequalities and the chain constant D."""

    slack_lt: float
    slack_schwarz: float
    slack_hoelder2p: float
    slack_poincare: float
    slack_hoelder: float
    D: float
    Lambda: float
    gamma: float
    q: float

    def to_dict(self) -> dict:
        return {
            "slack_lt": self.slack_lt,
            "slack_schwarz": self.slack_schwarz,
            "slack_hoelder2p": self.slack_hoelder2p,
            "slack_poincare": self.slack_poincare,
            "slack_hoelder": self.slack_hoelder,
            "D": self.D,
            "Lambda": self.Lambda,
            "gamma": self.gamma,
            "q": self.q,
        }


def proof_chain(u: CylField, Lambda: float, p: float) -> ChainReport:
    """Evaluate the slack of every inequality in the symmetry proof chain.

    Steps, in order: per-angle one-bound-state spectral bound, Schwarz for
    the angular energy of the L2 trace v, Hoelder coupling the p-integral
    to v, the sharp sphere inequality for v, and the probability-measure
    power-mean step.  All five slacks are non-negative up to discretization
    and vanish simultaneously exactly at the s-only extremal profile, where
    D = Lambda.
    """
    gamma, q_exp = chain_exponents(p, 1.0)
    grid = u.grid
    quad_, B = _angular(u.N, u.L_max)
    U = np.abs(u.nodal())

    up_line = grid.h * (U**p).sum(axis=0)  # per-angle integral of u^p
    v = np.sqrt(grid.h * (U**2).sum(axis=0))  # L2 trace on the sphere

    # per-angle derivative energies from the sine-spectral form
    ch = _dst(u.data)
    w2 = _freqs(grid) ** 2
    per_angle_coeffs = ch @ B.T
    e_line = grid.h * (w2[:, None] * per_angle_coeffs**2).sum(axis=0)

    c_pow = lt_constant(gamma) ** (1.0 / gamma)
    slack_lt = float(np.min(e_line - up_line + c_pow * up_line ** (1.0 / gamma) * v**2))

    # angular energy of u versus the projected trace field
    mode_mass = grid.h * (u.data**2).sum(axis=0)
    e_angular = float((_angular_eigs(u.N, u.L_max) * mode_mass).sum())
    l_proj = u.L_max + 4
    vfield = sphere.field_from_nodal(v, quad_, l_proj, u.N)
    slack_schwarz = e_angular - sphere.grad_energy(vfield)

    total_up = float(np.sum(quad_.weights * up_line))
    int_v_q1 = float(np.sum(quad_.weights * v ** (q_exp + 1)))
    int_v_2 = float(np.sum(quad_.weights * v**2))
    lhs = float(np.sum(quad_.weights * up_line ** (1.0 / gamma) * v**2))
    rhs = total_up ** (1.0 / gamma) * int_v_q1 ** ((gamma - 1) / gamma)
    slack_hoelder2p = rhs - lhs

    slack_poincare = (
        (q_exp - 1) / (u.N - 1) * sphere.grad_energy(vfield)
        - int_v_q1 ** (2.0 / (q_exp + 1))
        + int_v_2
    )
    slack_hoelder = int_v_q1 ** (2.0 / (q_exp + 1)) - int_v_2

    D = c_pow * total_up ** (1.0 / gamma)
    return ChainReport(
        slack_lt=slack_lt,
        slack_schwarz=slack_schwarz,
        slack_hoelder2p=slack_hoelder2p,
        slack_poincare=float(slack_poincare),
        slack_hoelder=float(slack_hoelder),
        D=D,
        Lambda=Lambda,
        gamma=gamma,
        q=q_exp,
    )


# ---------------------------------------------------------------------------
# second variation, instability threshold

_SV_GRID = LineGrid(25.0, 4000)


def second_variation_mode(
    ell: int, Lambda: float, p: float, N: int, method: str = "grid", grid: LineGrid | None = None
) -> float:
    """Lowest eigenvalue of the linearization around the radial extremal,
    restricted to zonal degree ell.

    The operator is -d^2/ds^2 + Lambda + ell(ell + N - 2) - (p-1) u_star^(p-2);
    the sech^2 well makes a closed form available
    (method="closed"): Lambda + ell(ell + N - 2) - p^2 Lambda / 4.
    method="grid" solves the well numerically.
    """
    if ell < 1:
        raise DomainError(f"need ell >= 1, got {ell}")
    if Lambda <= 0 or p <= 2:
        raise DomainError(f"need Lambda > 0 and p > 2, got ({Lambda}, {p})")
    shift = Lambda + ell * (ell + N - 2)
    if method == "closed":
        return shift - p * p * Lambda / 4.0
    if method != "grid":
        raise DomainError(f"unknown method {method!r}")
    g = grid or _SV_GRID
    pc = profile_constants(Lambda, p, 1.0)
    well = Potential1D(g, (p - 1) * extremal_potential(g.nodes(), pc, p))
    res = lowest_eigenpair(well)
    return shift - res.lambda1


def fs_threshold(p: float, N: int, grid: LineGrid | None = None, xtol: float = 1e-6) -> float:
    """Instability threshold in Lambda: bisection on the sign of the
    degree-1 second-variation eigenvalue.  Matches 4(N-1)/(p^2-4)."""
    if not 2 < p < 6:
        raise DomainError(f"need 2 < p < 6, got p={p}")
    if N >= 3 and p > 2 * N / (N - 2) + 1e-12:
        raise DomainError(f"p={p} supercritical for N={N}")
    g = grid or _SV_GRID

    def mode(lam: float) -> float:
        return second_variation_mode(1, lam, p, N, "grid", g)

    lo = 1e-3
    if mode(lo) <= 0:
        raise NumericsError(f"no positive bracket end at Lambda={lo}")
    hi = 1.0
    for _ in range(60):
        if mode(hi) < 0:
            break
        hi *= 2.0
    else:
        raise NumericsError(f"no sign change up to Lambda={hi}")
    return float(brentq(mode, lo, hi, xtol=xtol))


# ---------------------------------------------------------------------------
# log-radial change of variables

def emden_fowler_pushforward(s_nodes: np.ndarray, w_values: np.ndarray, pt: ParamPoint):
    """Push a radial profile w(r), sampled on the log grid r = e^s, to the
    line: u(s) = e^((a_c - a) s) w(e^s).

    Returns (u_values, report); the report carries the relative mismatch of
    the weighted p-norm and gradient-norm identities, each evaluated by
    adaptive quadrature independently in the r and s variables (cubic-spline
    interpolation of the samples).
    """
    s = np.asarray(s_nodes, dtype=float)
    w = np.asarray(w_values, dtype=float)
    if s.ndim != 1 or s.size < 16 or s.shape != w.shape:
        raise NumericsError("profile is undersampled or mis-shaped")
    if np.any(np.diff(s) <= 0):
        raise NumericsError("s grid must be strictly increasing")
    cp = to_cylinder(pt)
    sigma = a_critical(pt.N) - pt.a
    u = np.exp(sigma * s) * w

    W = CubicSpline(s, w)
    dW = W.derivative()
    qkw = dict(epsabs=1e-13, epsrel=1e-10, limit=200)

    def quiet_quad(f, lo, hi) -> float:
        # tail chunks integrate to ~0 and trip harmless roundoff warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, _ = quad(f, lo, hi, **qkw)
        return val

    def radial_integral(f) -> float:
        # r spans many orders of magnitude; integrate decade by decade in
        # log steps so the adaptive rule sees well-scaled pieces
        edges = np.append(np.arange(s[0], s[-1], 1.0), s[-1])
        return sum(quiet_quad(f, math.exp(lo), math.exp(hi)) for lo, hi in zip(edges[:-1], edges[1:]))

    # p-norm identity: int r^(N-1-bp) w^p dr = int u^p ds
    lhs_p = radial_integral(lambda r: r ** (pt.N - 1 - pt.b * cp.p) * abs(W(math.log(r))) ** cp.p)
    rhs_p = quiet_quad(lambda t: abs(math.exp(sigma * t) * W(t)) ** cp.p, s[0], s[-1])
    mismatch_p = abs(lhs_p - rhs_p) / abs(rhs_p)

    # gradient identity: int r^(N-1-2a) w'(r)^2 dr = int (u'^2 + Lambda u^2) ds
    lhs_g = radial_integral(lambda r: r ** (pt.N - 1 - 2 * pt.a) * (dW(math.log(r)) / r) ** 2)

    def du(t: float) -> float:
        return math.exp(sigma * t) * (sigma * W(t) + dW(t))

    rhs_g = quiet_quad(lambda t: du(t) ** 2 + cp.Lambda * (math.exp(sigma * t) * W(t)) ** 2, s[0], s[-1])
    mismatch_g = abs(lhs_g - rhs_g) / abs(rhs_g)

    report = {
        "p": cp.p,
        "Lambda": cp.Lambda,
        "p_norm_mismatch": mismatch_p,
        "grad_norm_mismatch": mismatch_g,
    }
    return u, report


# ---------------------------------------------------------------------------
# spectral-bound equivalence

def symmetric_mu_threshold(gamma: float, p: float, N: int) -> float:
    """Largest potential size mu for which the optimizing potential of the
    cylinder spectral bound is certified s-only.

    Requires gamma consistent with (p+2)/(2(p-2)).  The value is
    lambda_sym(p, N) divided by the linear-law slope
    radial_interp_coefficient(1, p)^(2p/(p+2)).
    """
    expected = (p + 2) / (2 * (p - 2))
    if abs(gamma - expected) > 1e-9:
        raise DomainError(f"gamma={gamma} inconsistent with (p+2)/(2(p-2))={expected}")
    slope = radial_interp_coefficient(1.0, p) ** (2 * p / (p + 2))
    return lambda_sym(p, N) / slope


def eigenvalue_bound(
    mu: float,
    p: float,
    N: int,
    grid: LineGrid | None = None,
    L_max: int = 6,
    opts: MinimizeOpts | None = None,
    rtol: float = 1e-3,
) -> float:
    """Bound Lambda(mu) on the binding energy of cylinder potentials of
    size mu, through the best interpolation constant.

    In the certified-symmetric regime the bound is the linear law
    slope * mu with slope = radial_interp_coefficient(1, p)^(2p/(p+2)); past
    it, the relation mu^((p+2)/(2p)) = 1/K(Lambda) is inverted numerically
    with the 2-d minimizer supplying K.
    """
    if mu <= 0:
        raise DomainError(f"need mu > 0, got {mu}")
    slope = radial_interp_coefficient(1.0, p) ** (2 * p / (p + 2))
    lam_lin = slope * mu
    if lam_lin <= lambda_sym(p, N) + 1e-12:
        return lam_lin

    g = grid or LineGrid(20.0, 1200)
    opts = opts or MinimizeOpts(multistart=True, max_iter=1500)
    target = mu ** ((p + 2) / (2 * p))

    def f(lam: float) -> float:
        start = extremal_field(g, N, L_max, lam, p)
        rep = minimize_quotient(start, lam, p, 1.0, opts)
        return rep.quotient - target  # quotient = 1/K, increasing in Lambda

    lo = lam_lin
    flo = f(lo)
    if flo >= 0:
        return lo
    hi = lo
    for _ in range(40):
        hi *= 1.6
        if f(hi) > 0:
            break
    else:
        raise NumericsError(f"no bracket for the inversion up to Lambda={hi}")
    return float(brentq(f, lo, hi, rtol=rtol, xtol=1e-12))


# ---------------------------------------------------------------------------
# theta < 1 sandwich

@dataclass
class SandwichReport:
    """Verified two-sided bounds on the interpolation constant."""

    theta: float
    Lambda: float
    p: float
    N: int
    k_lower: float
    k_numeric: float
    k_upper: float
    gap: float
    gamma_theta: float
    q: float
    d_value: float
    holder_theta_slack: float
    within: bool
    limit_case: bool
    converged: bool

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "Lambda": self.Lambda,
            "p": self.p,
            "N": self.N,
            "k_lower": self.k_lower,
            "k_numeric": self.k_numeric,
            "k_upper": self.k_upper,
            "gap": self.gap,
            "gamma_theta": self.gamma_theta,
            "q": self.q,
            "d_value": self.d_value,
            "holder_theta_slack": self.holder_theta_slack,
            "within": self.within,
            "limit_case": self.limit_case,
            "converged": self.converged,
        }


def sandwich_lambda_bound(theta: float, p: float, N: int) -> float:
    """Largest Lambda admitted by the sandwich condition at (theta, p, N)."""
    return (N - 1) / gap_factor(p, theta) * ((2 * theta - 3) * p + 6) / (4 * (p - 2))


def sandwich_check(
    theta: float,
    Lambda: float,
    p: float,
    N: int,
    grid: LineGrid | None = None,
    L_max: int = DEFAULT_L_MAX,
    opts: MinimizeOpts | None = None,
    tol: float = 5e-3,
) -> SandwichReport:
    """Verify the two-sided bound K_lower <= K_numeric <= K_upper.

    K_lower is the radial constant of the theta family, K_upper is
    K_lower * gap_factor^(((2 theta - 1) p + 2)/(2p)), and K_numeric comes
    from the multistart 2-d minimizer.  Lambda must satisfy
    a_c^2 < Lambda <= sandwich_lambda_bound, except at theta = theta_min
    exactly, where the window is empty (the bound degenerates to 0 for
    N = 3): there the upper check is waived, the run proceeds and the
    report is flagged limit_case.  Also reports the chain quantities:
    gamma_theta, q, the chain constant D on the renormalized minimizer
    (Lambda <= D <= gap * Lambda on solutions) and the slack of the
    theta-Hoelder step.
    """
    tmin = theta_min(p, N)
    if theta < tmin - 1e-12 or theta > 1.0:
        raise DomainError(f"theta={theta} outside [{tmin}, 1]")
    limit_case = abs(theta - tmin) < 1e-12
    ac2 = a_critical(N) ** 2
    if Lambda <= ac2:
        raise DomainError(f"need Lambda > a_c^2 = {ac2}, got {Lambda}")
    if not limit_case:
        bound = sandwich_lambda_bound(theta, p, N) if theta < 1.0 else lambda_sym(p, N)
        if Lambda > bound * (1 + 1e-12):
            raise DomainError(f"Lambda={Lambda} violates the admissible window ({ac2}, {bound}]")

    gamma_t = ((2 * theta - 1) * p + 2) / (2 * (p - 2))
    if gamma_t < 1.0 - 1e-12:
        raise DomainError(f"gamma = {gamma_t} < 1: chain fails at (p={p}, theta={theta})")
    # gamma = 1 at the limit case: the sphere exponent degenerates
    q_exp = (gamma_t + 1) / (gamma_t - 1) if gamma_t > 1.0 + 1e-12 else math.inf
    k_lower = radial_interp_constant(theta, Lambda, p)
    gap = gap_factor(p, theta)
    k_upper = k_lower * gap ** (((2 * theta - 1) * p + 2) / (2 * p))

    g = grid or DEFAULT_GRID
    opts = opts or MinimizeOpts(multistart=True)
    start = extremal_field(g, N, L_max, Lambda, p, theta)
    rep = minimize_quotient(start, Lambda, p, theta, opts)
    k_numeric = rep.constant

    # chain quantities on the Euler-Lagrange-normalized minimizer
    u = rep.minimizer
    E, M, P, U = _pieces(u, p)
    scale = ((E + Lambda * M) / P) ** (1.0 / (p - 2))
    M_n = scale**2 * M
    P_n = scale**p * P
    quad_, _ = _angular(u.N, u.L_max)
    theta_power = float(u.grid.h * ((scale * np.abs(U)) ** (theta * p) @ quad_.weights).sum())
    holder_rhs = M_n ** ((1 - theta) * p / (p - 2)) * P_n ** ((theta * p - 2) / (p - 2))
    d_value = lt_constant(gamma_t) ** (1.0 / gamma_t) * holder_rhs ** (1.0 / gamma_t)

    within = k_lower * (1 - tol) <= k_numeric <= k_upper * (1 + tol)
    return SandwichReport(
        theta=theta,
        Lambda=Lambda,
        p=p,
        N=N,
        k_lower=k_lower,
        k_numeric=k_numeric,
        k_upper=k_upper,
        gap=gap,
        gamma_theta=gamma_t,
        q=q_exp,
        d_value=d_value,
        holder_theta_slack=holder_rhs - theta_power,
        within=within,
        limit_case=limit_case,
        converged=rep.converged,
    )


def cyl_field_csv(u: CylField) -> str:
    """Serialize a field as CSV rows (s, ell, coefficient)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s", "ell", "coefficient"])
    nodes = u.grid.nodes()
    for i in range(u.grid.n):
        for ell in range(u.L_max + 1):
            writer.writerow([f"{nodes[i]:.12g}", ell, f"{u.data[i, ell]:.12g}"])
    return buf.getvalue()

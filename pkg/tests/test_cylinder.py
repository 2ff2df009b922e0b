"""Cylinder variational problem: quotients, flows, chains, thresholds."""

import math

import numpy as np
import pytest

from cknsharp import (
    CylField,
    DomainError,
    LineGrid,
    MinimizeOpts,
    NumericsError,
    ParamPoint,
    a_critical,
    defect_functional,
    eigenvalue_bound,
    el_residual,
    emden_fowler_pushforward,
    euclidean_radial_extremal,
    extremal_field,
    extremal_profile,
    fs_threshold,
    lambda_fs,
    lambda_sym,
    lowest_eigenpair,
    minimize_quotient,
    profile_constants,
    proof_chain,
    radial_interp_coefficient,
    radial_interp_constant,
    rayleigh,
    sandwich_check,
    second_variation_mode,
    sech_squared_potential,
    symmetric_mu_threshold,
)
from cknsharp.cylinder import (
    _angular,
    _value_and_grad,
    cyl_field_csv,
    radial_field,
    sandwich_lambda_bound,
)

GRID = LineGrid(20.0, 2000)


def perturbed_start(grid, N, L_max, Lambda, p, frac=0.1):
    u = extremal_field(grid, N, L_max, Lambda, p)
    u.data[:, 1] = frac * u.data[:, 0]
    return u


def fuzz_field(grid, N, L_max, rng):
    s = grid.nodes()
    g = np.zeros(grid.n)
    for _ in range(rng.integers(1, 4)):
        c = rng.uniform(-0.4 * grid.S, 0.4 * grid.S)
        w = rng.uniform(0.6, 2.5)
        g += rng.uniform(0.2, 1.0) * np.exp(-((s - c) ** 2) / (2 * w * w))
    _, B = _angular(N, L_max)
    ang = rng.standard_normal(L_max) * (0.3 ** np.arange(1, L_max + 1))
    m = np.maximum(1.0 + B[:, 1:] @ ang, 0.05)
    return CylField.from_nodal(grid, N, L_max, np.outer(g, m))


# ---------------------------------------------------------------------------
# field plumbing


def test_nodal_coefficient_round_trip():
    rng = np.random.default_rng(0)
    grid = LineGrid(10.0, 64)
    u = CylField(grid, 3, rng.standard_normal((64, 7)))
    back = CylField.from_nodal(grid, 3, 6, u.nodal())
    np.testing.assert_allclose(back.data, u.data, atol=1e-12)


def test_csv_export():
    grid = LineGrid(10.0, 64)
    u = radial_field(grid, 3, 2, np.ones(64))
    text = cyl_field_csv(u)
    assert text.splitlines()[0] == "s,ell,coefficient"
    assert len(text.splitlines()) == 1 + 64 * 3


# ---------------------------------------------------------------------------
# Rayleigh quotient


def test_rayleigh_at_extremal():
    u = extremal_field(GRID, 3, 8, 1.0, 3.0)
    assert rayleigh(u, 1.0, 3.0) == pytest.approx(7.2 ** (1.0 / 3.0), rel=1e-12)


def test_rayleigh_scale_invariance_and_reduction():
    u = extremal_field(GRID, 3, 8, 1.0, 3.0)
    q0 = rayleigh(u, 1.0, 3.0)
    for c in (0.1, -2.0, 37.5):
        scaled = CylField(GRID, 3, c * u.data)
        assert rayleigh(scaled, 1.0, 3.0) == pytest.approx(q0, rel=1e-13)
    # pure radial content reduces to the 1-d quotient
    prof = u.data[:, 0]
    h = GRID.h
    e1d = np.sum((np.diff(prof) / h) ** 2) * h
    m1d = h * np.sum(prof**2)
    p1d = h * np.sum(prof**3)
    q1d = (e1d + m1d) / p1d ** (2.0 / 3.0)
    assert rayleigh(u, 1.0, 3.0) == pytest.approx(q1d, rel=1e-4)  # FD energy is O(h^2)


def test_rayleigh_theta_at_extremal():
    theta = 0.9
    u = extremal_field(GRID, 3, 8, 1.0, 3.0, theta)
    assert rayleigh(u, 1.0, 3.0, theta) == pytest.approx(1.0 / radial_interp_constant(theta, 1.0, 3.0), rel=1e-12)


def test_rayleigh_zero_field_rejected():
    with pytest.raises(DomainError):
        rayleigh(CylField(GRID, 3, np.zeros((GRID.n, 3))), 1.0, 3.0)


# ---------------------------------------------------------------------------
# gradient and flow


@pytest.mark.parametrize("theta", [1.0, 0.9])
def test_gradient_matches_finite_differences(theta):
    rng = np.random.default_rng(42)
    grid = LineGrid(12.0, 256)
    envelope = np.exp(-np.abs(grid.nodes()) / 3.0)[:, None]
    for _ in range(10):
        u = CylField(grid, 3, (0.5 + rng.random((256, 5))) * envelope)
        d = rng.standard_normal((256, 5)) * envelope
        _, g, _, _ = _value_and_grad(u, 1.0, 3.0, theta)
        eps = 1e-6
        fd = (
            rayleigh(CylField(grid, 3, u.data + eps * d), 1.0, 3.0, theta)
            - rayleigh(CylField(grid, 3, u.data - eps * d), 1.0, 3.0, theta)
        ) / (2 * eps)
        analytic = grid.h * float((g * d).sum())
        assert abs(fd - analytic) <= 1e-6 * max(abs(fd), 1e-3)


def test_zonal_invariance_of_flow():
    u = extremal_field(GRID, 3, 8, 3.0, 3.0)
    rep = minimize_quotient(u, 3.0, 3.0, opts=MinimizeOpts(max_iter=3))
    assert np.abs(rep.minimizer.data[:, 1:]).max() == 0.0


def test_minimize_symmetric_regime():
    rep = minimize_quotient(perturbed_start(GRID, 3, 8, 1.0, 3.0), 1.0, 3.0)
    k_star = radial_interp_coefficient(1.0, 3.0)
    assert rep.converged
    assert rep.constant == pytest.approx(k_star, rel=5e-3)
    assert rep.angular_fraction < 1e-6


def test_minimize_breaking_regime():
    q_star = rayleigh(extremal_field(GRID, 3, 8, 3.0, 3.0), 3.0, 3.0)
    rep = minimize_quotient(perturbed_start(GRID, 3, 8, 3.0, 3.0), 3.0, 3.0)
    assert rep.converged
    assert rep.quotient <= 0.99 * q_star
    assert rep.angular_fraction > 1e-3


def test_minimize_multistart_finds_broken_branch_from_radial():
    start = extremal_field(GRID, 3, 8, 3.0, 3.0)  # purely radial start
    q_star = rayleigh(start, 3.0, 3.0)
    rep = minimize_quotient(start, 3.0, 3.0, opts=MinimizeOpts(multistart=True))
    assert rep.quotient <= 0.99 * q_star


def test_minimize_monotone_in_lambda_and_dominated_by_radial():
    grid = LineGrid(18.0, 900)
    prev = math.inf
    for lam in (0.5, 1.0, 2.0, 3.0):
        rep = minimize_quotient(perturbed_start(grid, 3, 6, lam, 3.0), lam, 3.0)
        q_star = rayleigh(extremal_field(grid, 3, 6, lam, 3.0), lam, 3.0)
        assert rep.quotient <= q_star * (1 + 1e-10)  # numeric optimum never above radial
        assert rep.constant <= prev * (1 + 1e-8)  # constant non-increasing in Lambda
        prev = rep.constant


def test_minimize_lmax_zero_reduces_to_radial_problem():
    grid = LineGrid(18.0, 900)
    rep = minimize_quotient(extremal_field(grid, 3, 0, 1.0, 3.0), 1.0, 3.0)
    assert rep.constant == pytest.approx(radial_interp_coefficient(1.0, 3.0), rel=1e-6)
    assert rep.angular_fraction == 0.0


def test_minimize_iteration_exhaustion_is_reported():
    rep = minimize_quotient(perturbed_start(GRID, 3, 8, 3.0, 3.0), 3.0, 3.0, opts=MinimizeOpts(max_iter=2))
    assert not rep.converged
    assert rep.iterations == 2


# ---------------------------------------------------------------------------
# Euler-Lagrange residual and energy identity


def test_el_residual_at_extremal():
    grid = LineGrid(30.0, 3000)
    u = extremal_field(grid, 3, 8, 1.0, 3.0)
    quad_, B = _angular(3, 8)
    U = u.nodal()
    nonlin = ((np.abs(U) ** 2) * quad_.weights[None, :]) @ B
    scale = math.sqrt(grid.h * float((nonlin**2).sum()))
    assert el_residual(u, 1.0, 3.0) < 1e-8 * scale


def test_el_residual_theta_profile():
    grid = LineGrid(30.0, 3000)
    theta = 0.9
    u = extremal_field(grid, 3, 8, 1.0, 3.0, theta)
    assert el_residual(u, 1.0, 3.0, theta) < 1e-8


def test_el_residual_random_field_positive():
    rng = np.random.default_rng(1)
    u = fuzz_field(GRID, 3, 6, rng)
    assert el_residual(u, 1.0, 3.0) > 1e-3


def test_defect_functional_identity():
    u = extremal_field(GRID, 3, 8, 1.0, 3.0)
    assert defect_functional(u, 3.0) == pytest.approx(-6.0, rel=1e-12)
    # equals -Lambda * mass for the Euler-Lagrange solution
    mass = GRID.h * float((u.data**2).sum())
    assert defect_functional(u, 3.0) == pytest.approx(-1.0 * mass, rel=1e-12)


# ---------------------------------------------------------------------------
# proof chain


def test_proof_chain_equalities_at_extremal():
    u = extremal_field(GRID, 3, 8, 1.0, 3.0)
    rep = proof_chain(u, 1.0, 3.0)
    for slack in (rep.slack_lt, rep.slack_schwarz, rep.slack_hoelder2p, rep.slack_poincare, rep.slack_hoelder):
        assert abs(slack) <= 1e-6
    assert rep.D == pytest.approx(1.0, abs=1e-6)
    assert rep.gamma == pytest.approx(2.5)
    assert rep.q == pytest.approx(7.0 / 3.0)


def test_proof_chain_perturbed_extremal():
    u = extremal_field(GRID, 3, 8, 1.0, 3.0)
    u.data[:, 1] = 0.1 * u.data[:, 0]
    rep = proof_chain(u, 1.0, 3.0)
    slacks = [rep.slack_lt, rep.slack_schwarz, rep.slack_hoelder2p, rep.slack_poincare, rep.slack_hoelder]
    assert all(s >= -1e-10 for s in slacks)
    assert max(slacks) > 1e-4


@pytest.mark.parametrize("p,N", [(2.5, 2), (3.0, 3), (4.0, 2)])
def test_proof_chain_fuzz(p, N):
    rng = np.random.default_rng(23)
    grid = LineGrid(15.0, 600)
    for _ in range(20):
        u = fuzz_field(grid, N, 6, rng)
        rep = proof_chain(u, 1.0, p)
        for slack in (rep.slack_lt, rep.slack_schwarz, rep.slack_hoelder2p, rep.slack_poincare, rep.slack_hoelder):
            assert slack >= -1e-8


def test_proof_chain_d_below_lambda_iff_small_mass():
    # D <= Lambda exactly when the total p-integral is below the extremal's
    u = extremal_field(GRID, 3, 8, 1.0, 3.0)
    small = CylField(GRID, 3, 0.9 * u.data)
    big = CylField(GRID, 3, 1.1 * u.data)
    assert proof_chain(small, 1.0, 3.0).D < 1.0
    assert proof_chain(big, 1.0, 3.0).D > 1.0


def test_proof_chain_rejects_p_out_of_range():
    u = extremal_field(GRID, 3, 4, 1.0, 3.0)
    with pytest.raises(DomainError):
        proof_chain(u, 1.0, 6.5)


# ---------------------------------------------------------------------------
# second variation and instability threshold


def test_second_variation_closed_form():
    assert second_variation_mode(1, 1.0, 3.0, 3, "closed") == pytest.approx(0.75, abs=1e-14)
    assert second_variation_mode(1, 1.6, 3.0, 3, "closed") == pytest.approx(0.0, abs=1e-14)
    assert second_variation_mode(1, 3.0, 3.0, 3, "closed") == pytest.approx(-1.75, abs=1e-14)


def test_second_variation_grid_matches_closed():
    for lam in (1.0, 1.6, 3.0):
        grid_val = second_variation_mode(1, lam, 3.0, 3, "grid")
        closed_val = second_variation_mode(1, lam, 3.0, 3, "closed")
        assert grid_val == pytest.approx(closed_val, abs=1e-3)


def test_second_variation_positive_up_to_lambda_sym():
    for p in (2.5, 3.0, 4.0):
        for frac in (0.25, 0.6, 1.0):
            lam = frac * lambda_sym(p, 3)
            assert second_variation_mode(1, lam, p, 3, "closed") > 0


@pytest.mark.parametrize("p,N", [(3.0, 3), (3.0, 2)])
def test_fs_threshold_quick(p, N):
    expected = lambda_fs(p, N)
    measured = fs_threshold(p, N)
    assert measured == pytest.approx(expected, rel=5e-3)
    assert abs(measured - expected) <= 1e-3


def test_fs_threshold_rejects_supercritical():
    with pytest.raises(DomainError):
        fs_threshold(6.5, 3)


# ---------------------------------------------------------------------------
# log-radial bridge


def test_emden_fowler_pushforward_of_radial_extremal():
    pt = ParamPoint(3, -0.5, 0.0)
    s = np.linspace(-30.0, 30.0, 6001)
    w = euclidean_radial_extremal(np.exp(s), pt)
    u, report = emden_fowler_pushforward(s, w, pt)
    assert report["p_norm_mismatch"] < 1e-6
    assert report["grad_norm_mismatch"] < 1e-6
    pc = profile_constants(1.0, 3.0, 1.0)
    aligned = u * (pc.A / u.max())
    assert np.abs(aligned - extremal_profile(s, pc, 3.0)).max() < 1e-6


def test_emden_fowler_smooth_bump():
    pt = ParamPoint(3, -0.5, 0.0)
    s = np.linspace(-30.0, 30.0, 4001)
    u, report = emden_fowler_pushforward(s, np.exp(-(s**2)), pt)
    assert report["p_norm_mismatch"] < 1e-6
    assert report["grad_norm_mismatch"] < 1e-6


def test_emden_fowler_sech_construction():
    # w(r) = r^(a - a_c) sech(log r)^(2/(p-2)) maps exactly to sech(s)^(2/(p-2))
    pt = ParamPoint(3, -0.5, 0.0)
    s = np.linspace(-25.0, 25.0, 3001)
    sigma = a_critical(3) - pt.a
    w = np.exp(-sigma * s) * np.cosh(s) ** (-2.0)
    u, _ = emden_fowler_pushforward(s, w, pt)
    np.testing.assert_allclose(u, np.cosh(s) ** (-2.0), atol=1e-12)


def test_emden_fowler_undersampled():
    pt = ParamPoint(3, -0.5, 0.0)
    s = np.linspace(-10, 10, 8)
    with pytest.raises(NumericsError):
        emden_fowler_pushforward(s, np.exp(-(s**2)), pt)


# ---------------------------------------------------------------------------
# spectral-bound equivalence


def test_eigenvalue_bound_linear_law():
    slope = radial_interp_coefficient(1.0, 3.0) ** (2 * 3.0 / (3.0 + 2))
    for mu in (0.5, 1.0, 2.0):
        assert eigenvalue_bound(mu, 3.0, 3) == pytest.approx(slope * mu, rel=1e-12)


def test_eigenvalue_bound_equality_case():
    # the optimizing field at Lambda=1, p=3 has mu = (int u*^3 ds)^(1/gamma)
    mu = 7.2 ** (1 / 2.5)
    assert eigenvalue_bound(mu, 3.0, 3) == pytest.approx(1.0, abs=1e-3)


def test_eigenvalue_bound_dominates_sampled_potentials():
    # s-only potentials: the cylinder ground state sits in the zonal-0 mode,
    # so the 1-d solver supplies lambda1; (1.5, 0.5) is the equality case
    grid = LineGrid(20.0, 2000)
    gamma = 2.5
    from cknsharp import poschl_teller_ground

    for v0, b in [(1.5, 0.5), (0.8, 1.0), (3.0, 0.7)]:
        V = sech_squared_potential(grid, v0, b)
        mu = (grid.h * float(np.sum(V.values ** (gamma + 0.5)))) ** (1 / gamma)
        bound = eigenvalue_bound(mu, 3.0, 3)
        assert poschl_teller_ground(v0, b) <= bound * (1 + 1e-12)
        # the discrete eigenvalue agrees up to its own O(h^2) error
        assert lowest_eigenpair(V).lambda1 <= bound * (1 + 1e-4)


def test_eigenvalue_bound_numeric_branch():
    # just past the threshold the numeric inversion still runs; the bound
    # stays at or below the linear law there
    slope = radial_interp_coefficient(1.0, 3.0) ** (6.0 / 5.0)
    mu = 1.1 * symmetric_mu_threshold(2.5, 3.0, 3)
    lam = eigenvalue_bound(mu, 3.0, 3, grid=LineGrid(18.0, 700), L_max=5, rtol=5e-3)
    assert lam <= slope * mu * (1 + 1e-6)
    assert lam > lambda_sym(3.0, 3)


def test_symmetric_mu_threshold():
    thr = symmetric_mu_threshold(2.5, 3.0, 3)
    slope = radial_interp_coefficient(1.0, 3.0) ** (6.0 / 5.0)
    assert thr == pytest.approx(lambda_sym(3.0, 3) / slope, rel=1e-14)
    assert thr > 0
    # linear in the symmetric threshold: N enters only through lambda_sym
    assert symmetric_mu_threshold(2.5, 3.0, 2) / thr == pytest.approx(
        lambda_sym(3.0, 2) / lambda_sym(3.0, 3), rel=1e-14
    )
    with pytest.raises(DomainError):
        symmetric_mu_threshold(2.0, 3.0, 3)


def test_paired_optimizer_symmetric_below_threshold():
    # below the mu threshold the optimizing field is s-only
    slope = radial_interp_coefficient(1.0, 3.0) ** (6.0 / 5.0)
    mu = 0.8 * symmetric_mu_threshold(2.5, 3.0, 3)
    lam = slope * mu
    rep = minimize_quotient(perturbed_start(GRID, 3, 6, lam, 3.0), lam, 3.0)
    assert rep.angular_fraction < 1e-6


# ---------------------------------------------------------------------------
# theta < 1 sandwich


def test_sandwich_theta_09():
    lam = 0.9 * sandwich_lambda_bound(0.9, 3.0, 3)
    rep = sandwich_check(0.9, lam, 3.0, 3)
    assert rep.within and rep.converged
    assert rep.k_lower <= rep.k_numeric <= rep.k_upper
    assert rep.k_lower <= rep.k_upper  # gap >= 1
    assert rep.Lambda <= rep.d_value <= rep.gap * rep.Lambda * (1 + 1e-6)
    assert rep.holder_theta_slack >= -1e-10


def test_sandwich_theta_1_degenerate():
    rep = sandwich_check(1.0, 1.0, 3.0, 3)
    assert rep.within
    assert rep.k_upper == pytest.approx(rep.k_lower, rel=1e-14)
    assert rep.k_numeric == pytest.approx(rep.k_lower, rel=5e-3)


def test_sandwich_condition_violation():
    with pytest.raises(DomainError):
        sandwich_check(0.9, 10.0, 3.0, 3)
    with pytest.raises(DomainError):
        sandwich_check(0.9, 0.1, 3.0, 3)  # below a_c^2


def test_sandwich_limit_case_flag():
    # at theta = theta_min(3, 3) = 1/2 the admissible window is empty
    # ((2 theta - 3) p + 6 = 0); the check still runs and flags the report
    assert sandwich_lambda_bound(0.5, 3.0, 3) == pytest.approx(0.0, abs=1e-14)
    rep = sandwich_check(0.5, 1.0, 3.0, 3, grid=LineGrid(18.0, 900), L_max=6)
    assert rep.limit_case
    assert rep.q == math.inf
    assert rep.gamma_theta == pytest.approx(1.0, abs=1e-14)

import math

import numpy as np
import pytest

from robinspec import assembly, geometry, mixed_dn, robin
from robinspec.assembly import SigmaField
from robinspec.errors import ArgumentError, RangeError
from robinspec.exact1d import optimal_eigenvalue_interval

from conftest import disk_mesh, interval_mesh, square_mesh

TWO_PI_SQ = 2.0 * math.pi ** 2


def closed_form_resolvent(xs, xi, length=1.0):
    """Pinned-both-ends constant-source resolvent on (0, L)."""
    root = math.sqrt(xi)
    return (np.cos(root * (xs - length / 2)) / math.cos(root * length / 2) - 1.0) / xi


class TestGroundState:
    def test_square_two_pi_squared(self, square_l4):
        gs = mixed_dn.ground_state(square_l4)
        assert abs(gs.value - TWO_PI_SQ) / TWO_PI_SQ <= 1e-2

    def test_interval_both_ends(self):
        gs = mixed_dn.ground_state(interval_mesh(128))
        assert abs(gs.value - math.pi ** 2) / math.pi ** 2 <= 1e-3

    def test_interval_one_end_quarter_wave(self):
        mesh = interval_mesh(128, gamma=geometry.gamma_sides(0))
        gs = mixed_dn.ground_state(mesh)
        assert abs(gs.value - math.pi ** 2 / 4.0) / (math.pi ** 2 / 4.0) <= 1e-3

    def test_eigenfunction_zero_on_gamma(self, square_l3):
        gs = mixed_dn.ground_state(square_l3)
        fixed = geometry.gamma_nodes(square_l3)
        assert np.all(gs.eigenfunction[fixed] == 0.0)
        free = np.setdiff1d(np.arange(square_l3.num_nodes), fixed)
        assert np.all(gs.eigenfunction[free] > 0.0)

    def test_integral_range(self, square_l3):
        gs = mixed_dn.ground_state(square_l3)
        vol = geometry.area(square_l3)
        assert 0.0 < gs.integral <= math.sqrt(vol) + 1e-12

    def test_square_integral_matches_separated_value(self, square_l4):
        # integral of the normalized product-of-sines state: 8/pi^2
        gs = mixed_dn.ground_state(square_l4)
        assert abs(gs.integral - 8.0 / math.pi ** 2) <= 5e-3

    def test_empty_gamma_rejected(self):
        mesh = square_mesh(1, gamma=geometry.gamma_none())
        with pytest.raises(ArgumentError):
            mixed_dn.ground_state(mesh)


class TestResolvent:
    def test_interval_closed_form(self):
        mesh = interval_mesh(128)
        u = mixed_dn.resolvent_one(mesh, 1.0)
        exact = closed_form_resolvent(mesh.nodes[:, 0], 1.0)
        assert np.max(np.abs(u - exact)) <= 1e-3

    def test_near_zero_is_constant_source_solve(self, square_l3):
        u = mixed_dn.resolvent_one(square_l3, 1e-8)
        k = assembly.assemble_stiffness(square_l3)
        m = assembly.assemble_mass(square_l3)
        ones = np.ones(square_l3.num_nodes)
        free = np.setdiff1d(np.arange(square_l3.num_nodes),
                            geometry.gamma_nodes(square_l3))
        defect = (k @ u - m @ ones)[free]
        assert np.max(np.abs(defect)) <= 1e-6

    def test_positive_inside(self, square_l3):
        u = mixed_dn.resolvent_one(square_l3, 5.0)
        free = np.setdiff1d(np.arange(square_l3.num_nodes),
                            geometry.gamma_nodes(square_l3))
        assert np.all(u[free] > 0.0)

    def test_diagonal_symmetry(self, square_l3):
        u = mixed_dn.resolvent_one(square_l3, 3.0)
        lookup = {(round(x, 12), round(y, 12)): i
                  for i, (x, y) in enumerate(square_l3.nodes)}
        for i, (x, y) in enumerate(square_l3.nodes):
            j = lookup[(round(y, 12), round(x, 12))]
            assert abs(u[i] - u[j]) <= 1e-10

    def test_out_of_range_rejected(self, square_l3):
        e1 = mixed_dn.ground_state(square_l3).value
        with pytest.raises(RangeError):
            mixed_dn.resolvent_one(square_l3, e1 * 1.01)
        with pytest.raises(RangeError):
            mixed_dn.resolvent_one(square_l3, 0.0)


class TestMassFunction:
    @pytest.mark.parametrize("xi", [1.0, 4.0, 8.0])
    def test_interval_closed_form(self, xi):
        mesh = interval_mesh(128)
        f = mixed_dn.mass_function(mesh, xi)
        exact = 2.0 * math.sqrt(xi) * math.tan(math.sqrt(xi) / 2.0)
        assert abs(f - exact) / exact <= 1e-3

    def test_increasing_and_convex(self, square_l3):
        prob = mixed_dn.MixedProblem(square_l3)
        e1 = prob.ground.value
        grid = np.linspace(0.05, 0.9, 12) * e1
        vals = [prob.mass_function(x) for x in grid]
        diffs = np.diff(vals)
        assert np.all(diffs > 0.0)
        assert np.all(np.diff(diffs) > 0.0)

    def test_vanishes_at_zero(self, square_l3):
        vol = geometry.area(square_l3)
        assert mixed_dn.mass_function(square_l3, 1e-6) <= 2e-6 * vol

    def test_derivative_positive_and_consistent(self, square_l3):
        prob = mixed_dn.MixedProblem(square_l3)
        for xi in (0.5, 5.0, 15.0):
            f, fp = prob.mass_function_with_derivative(xi)
            assert fp > 0.0
            h = 1e-6 * max(1.0, xi)
            fd = (prob.mass_function(xi + h) - prob.mass_function(xi - h)) / (2 * h)
            assert abs(fp - fd) / fd <= 1e-5


class TestOptimalEigenvalue:
    def test_small_mass_volume_scaling(self, square_l3):
        xi = mixed_dn.optimal_eigenvalue(square_l3, 1e-3)
        vol = geometry.area(square_l3)
        assert abs(xi * vol / 1e-3 - 1.0) <= 1e-2

    def test_large_mass_approaches_ground(self, square_l3):
        prob = mixed_dn.MixedProblem(square_l3)
        xi = prob.optimal_eigenvalue(1e4)
        assert xi >= 0.99 * prob.ground.value

    def test_interval_matches_scalar_root(self):
        mesh = interval_mesh(1024)
        xi = mixed_dn.optimal_eigenvalue(mesh, 2.0)
        oracle = optimal_eigenvalue_interval(1.0, 2.0)
        assert abs(xi - oracle) <= 1e-6

    def test_inverse_residual(self, square_l3):
        prob = mixed_dn.MixedProblem(square_l3)
        for m in (0.1, 1.0, 10.0):
            xi = prob.optimal_eigenvalue(m)
            assert abs(prob.mass_function(xi) - m) <= 1e-10 * max(m, 1.0)

    def test_concave_in_mass(self, square_l3):
        prob = mixed_dn.MixedProblem(square_l3)
        masses = np.geomspace(0.1, 100.0, 9)
        xis = np.array([prob.optimal_eigenvalue(m) for m in masses])
        for i in range(1, len(masses) - 1):
            d1 = (xis[i] - xis[i - 1]) / (masses[i] - masses[i - 1])
            d2 = (xis[i + 1] - xis[i]) / (masses[i + 1] - masses[i])
            assert d2 - d1 <= 1e-8


class TestOptimalSigma:
    def test_interval_even_split(self):
        mesh = interval_mesh(64)
        for m in (0.1, 1.0, 10.0):
            opt = mixed_dn.optimal_sigma(mesh, m)
            vals = np.asarray(opt.sigma.values)
            ends = mesh.boundary[:, 0]
            assert np.max(np.abs(vals[ends] - m / 2.0)) <= 1e-8

    def test_disk_rotational_constancy(self):
        mesh = disk_mesh(2)
        m = math.pi
        opt = mixed_dn.optimal_sigma(mesh, m)
        gi = geometry.gamma_nodes(mesh)
        vals = np.asarray(opt.sigma.values)[gi]
        spread = (vals.max() - vals.min()) / vals.mean()
        assert spread <= 0.02
        assert abs(vals.mean() - m / geometry.boundary_length(mesh)) <= 1e-6

    def test_square_mass_and_duality(self, square_l4):
        opt = mixed_dn.optimal_sigma(square_l4, 1.0)
        assert opt.mass_defect / opt.mass <= 1e-3
        assert abs(opt.lambda_check - opt.value) / opt.value <= 1e-4

    def test_invariants(self, square_l3):
        opt = mixed_dn.optimal_sigma(square_l3, 1.0)
        e1 = opt.ground.value
        assert 0.0 < opt.value < e1
        fixed = geometry.gamma_nodes(square_l3)
        free = np.setdiff1d(np.arange(square_l3.num_nodes), fixed)
        assert np.all(opt.resolvent[free] > 0.0)
        vals = np.asarray(opt.sigma.values)
        assert np.all(vals >= 0.0)
        assert np.all(vals[free] == 0.0)
        assert opt.sigma_min_raw >= -1e-8
        # minimizer equals one exactly on gamma
        assert np.all(opt.minimizer[fixed] == 1.0)

    def test_sigma_supported_on_gamma_only(self):
        mesh = square_mesh(3, gamma=geometry.gamma_sides(0))
        opt = mixed_dn.optimal_sigma(mesh, 1.0)
        vals = np.asarray(opt.sigma.values)
        off_gamma = np.setdiff1d(geometry.boundary_nodes(mesh),
                                 geometry.gamma_nodes(mesh))
        assert np.all(vals[off_gamma] == 0.0)
        assert opt.mass_defect <= 1e-9

    def test_disk_arc_gamma_pipeline(self):
        dom = geometry.disk((0, 0), 1.0, 16,
                            gamma=geometry.gamma_arcs([(-math.pi / 2, math.pi / 2)]))
        mesh = geometry.build_mesh(dom, 0.5)
        mesh = geometry.refine(geometry.refine(mesh))
        opt = mixed_dn.optimal_sigma(mesh, 1.0)
        assert opt.mass_defect <= 1e-9
        assert abs(opt.lambda_check - opt.value) / opt.value <= 1e-3
        vals = np.asarray(opt.sigma.values)
        support = np.nonzero(vals)[0]
        # right half-circle only (junction nodes sit at x = 0)
        assert np.all(mesh.nodes[support, 0] > -1e-9)

    def test_consistent_recovery_mode(self, square_l3):
        # sharper interior values, but corner overshoot is clipped; the
        # mass defect then reflects the clipped amount
        opt = mixed_dn.optimal_sigma(square_l3, 1.0, recovery="consistent")
        assert opt.sigma_min_raw < 0.0
        assert opt.mass_defect / opt.mass <= 0.05

    def test_integral_identity(self, square_l3):
        # gamma1^2 = vol - (vol |phi|^2 - gamma1^2) via exact M-products
        gs = mixed_dn.ground_state(square_l3)
        m = assembly.assemble_mass(square_l3)
        ones = np.ones(square_l3.num_nodes)
        vol = float(ones @ (m @ ones))
        phi = gs.eigenfunction
        norm2 = float(phi @ (m @ phi))
        double_integral = 2.0 * vol * norm2 - 2.0 * gs.integral ** 2
        assert abs(gs.integral ** 2 - (vol - 0.5 * double_integral)) <= 1e-10


class TestMaximality:
    def test_square_twenty_trials(self, square_l3):
        rep = mixed_dn.verify_maximality(square_l3, 1.0, trials=20, tol_fem=1e-6)
        assert rep.passed
        assert rep.violations == 0

    def test_quotient_invariance(self, square_l3):
        rep = mixed_dn.verify_maximality(square_l3, 1.0, trials=5)
        for t in rep.trials:
            assert abs(t.quotient_at_minimizer - rep.quotient_optimal) \
                <= 1e-10 * max(1.0, rep.quotient_optimal)

    def test_boundary_term_is_mass(self, square_l3):
        rep = mixed_dn.verify_maximality(square_l3, 1.0, trials=5)
        for t in rep.trials:
            assert abs(t.boundary_term - rep.mass) <= 1e-10

    def test_optimum_itself_attains(self, square_l3):
        opt = mixed_dn.optimal_sigma(square_l3, 1.0)
        assert abs(opt.lambda_check - opt.value) <= 1e-4 * opt.value

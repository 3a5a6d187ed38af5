import math

import numpy as np
import pytest

from travgraph.eikonal import PlaneSpec
from travgraph.errors import DomainError, NonConvergence, SandwichViolation
from travgraph.params import make_params, unit
from travgraph.solver import (GridField, NewtonOptions, _jacobian, concavity_probe, gradient_norm,
                              harmonic_lift, residual_field, solve_dirichlet, verify_sandwich)
from travgraph.subsolution import SphereMeasure, SubSolution


def plane_fn(p, theta, gamma=0.0):
    nu = unit(theta)
    return lambda P: -p.cot_alpha * (np.asarray(P) @ nu) + gamma


def test_plane_residual_is_zero(p45):
    fld = GridField.on_domain(((-3, 3), (-2, 2)), 0.25, plane_fn(p45, 0.8, 1.5))
    assert np.max(np.abs(residual_field(fld, p45))) <= 1e-12


def test_plane_converges_immediately(p45):
    f = plane_fn(p45, 2.0, -0.3)
    fld = solve_dirichlet(((-2, 2), (-2, 2)), 0.25, f, f, p45)
    assert fld.history[0][1] <= 1e-12
    assert len([h for h in fld.history if h[0] > 0]) <= 1
    assert np.max(np.abs(fld.values - f(fld.points()))) <= 1e-12


def test_subsolution_residual_sign(p45):
    mu = SphereMeasure.from_angles([(0.0, 1.0), (2.5, 1.0), (4.0, 0.5)])
    sub = SubSolution(mu, p45)
    fld = GridField.on_domain(((-5, 5), (-5, 5)), 0.1, sub)
    assert np.max(residual_field(fld, p45)) <= 0.0 + 5 * 0.1 ** 2


def test_kink_residual_positive(p45):
    spec = PlaneSpec.from_angles([0.0, math.pi], p45)
    fld = GridField.on_domain(((-1, 1), (-1, 1)), 0.1, spec)
    res = residual_field(fld, p45)
    on_kink = res[9, :]  # x = 0 column of interior nodes
    assert np.all(on_kink > 1.0)
    assert np.max(np.abs(np.delete(res, 9, axis=0))) <= 1e-12


def test_mesh_refinement_order(p45):
    mu = SphereMeasure.from_angles([(0.0, 1.0), (2.0, 1.0)], [(3.0, 4.5)])
    sub = SubSolution(mu, p45)
    exact = None
    errs = []
    for h in (0.2, 0.1, 0.05):
        fld = GridField.on_domain(((-2, 2), (-2, 2)), h, sub)
        res = residual_field(fld, p45)
        # compare at the common nodes x in {-1, 0, 1}^2
        step = int(round(1 / h))
        sel = res[step - 1::step, step - 1::step][:3, :3]
        if exact is None:
            from travgraph.subsolution import jet_phi_star, mcm_from_derivatives
            pts = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1)]
            exact = np.array([mcm_from_derivatives(p45, *jet_phi_star(mu, p45, np.array(x, float))[1:])
                              for x in pts]).reshape(3, 3)
        errs.append(np.max(np.abs(sel - exact)))
    assert 3.0 <= errs[0] / errs[1] <= 5.0
    assert 3.0 <= errs[1] / errs[2] <= 5.0


def test_jacobian_matches_finite_differences(p45):
    rng = np.random.default_rng(0)
    mu = SphereMeasure.from_angles([(0.0, 1.0), (2.0, 1.0), (4.0, 1.0)])
    fld = GridField.on_domain(((-1, 1), (-1, 1)), 0.25, SubSolution(mu, p45))
    fld.values[1:-1, 1:-1] += 0.05 * rng.normal(size=(7, 7))
    J = _jacobian(p45, fld.values, fld.h).toarray()
    base = residual_field(fld, p45).ravel()
    eps = 1e-7
    for k in range(49):
        g = fld.copy()
        g.values[1 + k // 7, 1 + k % 7] += eps
        col = (residual_field(g, p45).ravel() - base) / eps
        assert col == pytest.approx(J[:, k], abs=1e-4 * max(1.0, np.max(np.abs(J[:, k]))))


def test_flat_case_keeps_constant():
    p = make_params(math.pi / 2, 1.2)
    fld = solve_dirichlet(((-1, 1), (-1, 1)), 0.1, lambda P: np.full(np.shape(P)[:-1], 2.5),
                          lambda P: np.full(np.shape(P)[:-1], 2.5), p)
    assert np.max(np.abs(fld.values - 2.5)) <= 1e-12


def test_concavity_probe_examples(p45):
    sq = GridField.on_domain(((-1, 1), (-1, 1)), 0.1, lambda P: (P ** 2).sum(axis=-1))
    assert concavity_probe(sq) == pytest.approx(2.0, rel=1e-10)
    plane = GridField.on_domain(((-1, 1), (-1, 1)), 0.1, plane_fn(p45, 1.0))
    assert abs(concavity_probe(plane)) <= 1e-10
    with pytest.raises(DomainError):
        concavity_probe(GridField.on_domain(((0, 0.4), (0, 0.4)), 0.1))


def test_harmonic_lift_reproduces_linear_data():
    g = GridField.on_domain(((0, 1), (0, 2)), 0.1, lambda P: 2 * P[..., 0] - P[..., 1] + 3)
    data = g.values.copy()
    data[1:-1, 1:-1] = 0.0
    assert np.max(np.abs(harmonic_lift(data) - g.values)) <= 1e-12


def test_options_validation():
    with pytest.raises(DomainError):
        NewtonOptions(residual_tol=1e-13)
    with pytest.raises(DomainError):
        NewtonOptions(damping=0.0)


def test_nonconvergence_reported(p45):
    spec = PlaneSpec.equispaced(3, p45)
    sub = SubSolution(spec.matched_measure(), p45)
    with pytest.raises(NonConvergence):
        solve_dirichlet(((-4, 4), (-4, 4)), 0.2, spec, sub, p45, NewtonOptions(max_iters=1, polish=0))


@pytest.fixture(scope="module")
def small_k3():
    p = make_params(math.pi / 4, 1.0)
    spec = PlaneSpec.equispaced(3, p)
    mu = spec.matched_measure()
    fld = solve_dirichlet(((-6, 6), (-6, 6)), 0.2, spec, SubSolution(mu, p), p)
    return p, spec, mu, fld


def test_small_sandwich(small_k3):
    p, spec, mu, fld = small_k3
    assert fld.history[-1][1] <= 1e-10
    chk = verify_sandwich(fld, mu, spec, 10 * fld.h ** 2)
    assert chk.ok
    assert chk.gap_min >= -p.log_scale * math.log(3) - 10 * fld.h ** 2
    assert np.nanmax(gradient_norm(fld, margin=2.0)) <= p.cot_alpha + fld.h


def test_sandwich_violation_names_node(small_k3):
    p, spec, mu, fld = small_k3
    bad = fld.copy()
    bad.values[10, 12] += 5.0
    with pytest.raises(SandwichViolation) as exc:
        verify_sandwich(bad, mu, spec, 0.01)
    assert exc.value.node == (10, 12)


def test_subsolution_field_has_zero_lower_margin(small_k3):
    p, spec, mu, fld = small_k3
    sub = GridField.on_domain(fld.domain, fld.h, SubSolution(mu, p))
    chk = verify_sandwich(sub, mu, spec, 0.0)
    assert chk.lower_margin == 0.0


def test_translation_invariance(small_k3):
    p, spec, mu, fld = small_k3
    s = np.array([1.0, -2.0])
    shifted = lambda f: (lambda P: f(np.asarray(P) - s))
    sub = SubSolution(mu, p)
    dom = ((-6 + s[0], 6 + s[0]), (-6 + s[1], 6 + s[1]))
    other = solve_dirichlet(dom, 0.2, shifted(spec), shifted(sub), p)
    assert np.max(np.abs(other.values - fld.values)) <= 1e-9


def test_binary_and_csv_round_trip(small_k3, tmp_path):
    fld = small_k3[3]
    fld.to_binary(tmp_path / "f.bin")
    back = GridField.from_binary(tmp_path / "f.bin")
    assert np.array_equal(back.values, fld.values)
    assert (back.h, back.x0, back.y0) == (fld.h, fld.x0, fld.y0)
    raw = (tmp_path / "f.bin").read_bytes()
    assert raw[:4] == b"TGRD" and len(raw) == 4 + 8 + 24 + 8 * fld.values.size
    fld.to_csv(tmp_path / "f.csv")
    back = GridField.from_csv(tmp_path / "f.csv")
    assert np.array_equal(back.values, fld.values)
    (tmp_path / "bad.bin").write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(DomainError):
        GridField.from_binary(tmp_path / "bad.bin")

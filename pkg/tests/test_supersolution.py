import math

import numpy as np
import pytest

from travgraph.cone import solve_cone
from travgraph.eikonal import PlaneSpec, ProfileN3, build_measure_N3
from travgraph.errors import DomainError, OutOfRange
from travgraph.params import TWO_PI, make_params, polar_arrays, unit
from travgraph.subsolution import SphereMeasure, SubSolution, jet_phi_star
from travgraph.supersolution import (ArcPiece, assemble_global_N3, eval_arc, eval_edge, eval_planes_inf,
                                     kink_jump, sandwich_report)


@pytest.fixture(scope="module")
def cone45():
    return solve_cone(make_params(math.pi / 4, 1.0), 400.0)


def test_edge_on_symmetry_axis(p45):
    for t in [-30.0, 0.0, 2.5, 100.0]:
        assert eval_edge(p45, 0.0, math.pi, 1.0, 1.0, np.array([0.0, t])) == pytest.approx(0.0, abs=1e-13)


def test_edge_planes_agree_on_bisector(p45):
    t1, t2 = 0.3, 1.9
    bis = unit(0.5 * (t1 + t2))
    for s in [0.5, 4.0, 20.0]:
        x = s * bis
        p1 = -p45.cot_alpha * x @ unit(t1)
        p2 = -p45.cot_alpha * x @ unit(t2)
        assert p1 == pytest.approx(p2, abs=1e-13)
        assert eval_edge(p45, t1, t2, 1.0, 1.0, x) == pytest.approx(p1, abs=1e-13)


def test_edge_above_two_atom_subsolution(p45):
    mu = SphereMeasure.from_angles([(0.0, 1.0), (2.0, 1.0)])
    X = np.random.default_rng(0).normal(size=(1000, 2)) * 25
    gap = eval_edge(p45, 0.0, 2.0, 1.0, 1.0, X) - SubSolution(mu, p45).values(X)
    assert np.all(gap >= -1e-12)
    assert np.all(gap <= 2 * math.log(2) / (p45.c0 * p45.sin_alpha) + 1e-12)


def test_planes_inf_examples(p45):
    spec = PlaneSpec.from_weights(unit(np.array([0.0, 1.0, 3.0])), [0.5, 4.0, 2.0], p45)
    assert eval_planes_inf(spec, [0.0, 0.0]) == pytest.approx(-p45.log_scale * math.log(4.0), rel=1e-15)
    single = PlaneSpec.from_weights(unit(np.array([0.7])), [3.0], p45)
    x = np.array([2.0, -1.0])
    assert eval_planes_inf(single, x) == pytest.approx(
        -p45.cot_alpha * x @ unit(0.7) - p45.log_scale * math.log(3.0), rel=1e-14)
    assert np.all(spec.gammas == p45.gamma_from_lambda(np.array([0.5, 4.0, 2.0])))


def test_arc_branches(p45, cone45):
    piece = ArcPiece(0.0, 2 * math.pi / 3, 2.0, cone45)
    assert eval_arc(piece, p45, np.array([0.0, 0.0])) == pytest.approx(-p45.log_scale * math.log(2.0), abs=1e-12)
    X = np.column_stack([10 * np.cos(np.linspace(2.2, 6.2, 30)), 10 * np.sin(np.linspace(2.2, 6.2, 30))])
    assert np.array_equal(piece(X), eval_edge(p45, 0.0, 2 * math.pi / 3, 2.0, 2.0, X))
    mid = 300.0 * unit(math.pi / 3)
    assert piece(mid[None, :])[0] == pytest.approx(piece.cone(300.0), abs=1e-12)
    assert piece.cone(300.0) < eval_edge(p45, 0.0, 2 * math.pi / 3, 2.0, 2.0, mid)


def test_arc_edge_neighbourhood(cone45, p45):
    piece = ArcPiece(0.0, math.pi, 1.0, cone45)
    for r in [0.5, 5.0, 50.0, 300.0]:
        x = r * unit(1e-3)[None, :]
        assert piece(x)[0] == pytest.approx(piece.edge(x)[0], abs=1e-12)


def test_arc_out_of_range(cone45):
    piece = ArcPiece(0.0, 1.0, 1.0, cone45)
    with pytest.raises(OutOfRange):
        piece(np.array([[500.0, 0.0]]))
    with pytest.raises(DomainError):
        ArcPiece(1.0, 0.5, 1.0, cone45)
    with pytest.raises(DomainError):
        eval_arc(piece, make_params(math.pi / 3, 1.0), np.zeros(2))


def test_arc_close_to_subsolution(cone45, p45):
    piece = ArcPiece(0.0, 4 * math.pi / 3, 1.0, cone45)
    mu = SphereMeasure.from_angles([(0.0, 1.0), (4 * math.pi / 3, 1.0)], [(0.0, 4 * math.pi / 3)],
                                   arc_density=1 / TWO_PI)
    r = np.geomspace(0.1, 390, 60)
    th = np.linspace(0, TWO_PI, 48, endpoint=False)
    R, T = np.meshgrid(r, th)
    X = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])
    gap = piece(X) - SubSolution(mu, p45).values(X)
    assert np.all(np.isfinite(gap)) and np.max(np.abs(gap)) < 10.0


def test_pure_edge_assembly(p45):
    prof = ProfileN3([0.0, math.pi], (0, 0), p45)
    sup = assemble_global_N3(None, prof, 1.0, p45)
    spec = PlaneSpec.from_weights(unit(np.array([0.0, math.pi])), [2.0, 2.0], p45)
    X = np.random.default_rng(3).normal(size=(500, 2)) * 30
    assert np.allclose(sup.base(X), spec(X), atol=1e-13, rtol=0)
    assert sup.shift >= 1e-6


def test_sector_selector(p45, cone45):
    prof = ProfileN3([0.2, 1.5, 3.0, 4.4], (1, 0, 1, 0), p45)
    sup = assemble_global_N3(cone45, prof, 0.5, p45)
    X = np.random.default_rng(7).uniform(-250, 250, size=(4000, 2))
    X = X[np.hypot(X[:, 0], X[:, 1]) <= 390]
    _, th = polar_arrays(X)
    idx = prof.sector_of(th)
    pv = sup.piece_values(X)
    own = pv[idx, np.arange(X.shape[0])]
    assert np.allclose(sup.base(X), own, atol=1e-12, rtol=0)


def test_global_sandwich_many_points(p45, cone45):
    prof = ProfileN3([0.0, 2.0, 4.0], (1, 0, 0), p45)
    sup = assemble_global_N3(cone45, prof, 1.0, p45)
    low = SubSolution(build_measure_N3(prof, 1.0), p45)
    rng = np.random.default_rng(1)
    r = 399.0 * np.sqrt(rng.uniform(size=10_000))
    t = rng.uniform(0, TWO_PI, 10_000)
    X = np.column_stack([r * np.cos(t), r * np.sin(t)])
    rep = sandwich_report(low.values, sup, X)
    assert rep.ok and rep.gap_min >= 0


def test_planes_are_exact_solutions(p45):
    from travgraph.subsolution import mcm_from_derivatives
    for t in np.linspace(0, TWO_PI, 7):
        assert mcm_from_derivatives(p45, -p45.cot_alpha * unit(t), np.zeros((2, 2))) == pytest.approx(0.0, abs=1e-15)


def test_kinks_are_concave(p45, cone45):
    edge = lambda X: eval_edge(p45, 0.0, math.pi / 2, 1.0, 1.0, X)
    x = 5.0 * unit(math.pi / 4)
    assert kink_jump(edge, x, unit(-math.pi / 4)) < -1.0
    piece = ArcPiece(0.0, 4 * math.pi / 3, 1.0, cone45)
    # locate the cone/edge switch along the ray at angle 0.6 and probe across it
    r = np.linspace(1, 300, 30000)
    pts = r[:, None] * unit(0.6)[None, :]
    diff = piece.cone(r) - piece.edge(pts)
    i = int(np.argmax(diff < 0))
    assert 0 < i
    xk = pts[i]
    assert kink_jump(piece, xk, unit(0.6), h=1e-4) <= 1e-6


def test_sandwich_report_examples(p45):
    ang = np.array([0.0, 2 * math.pi / 3, 4 * math.pi / 3])
    spec = PlaneSpec.from_angles(ang, p45)
    mu = spec.matched_measure()
    X = np.random.default_rng(2).uniform(-40, 40, size=(20000, 2))
    rep = sandwich_report(SubSolution(mu, p45).values, spec, X, normals=spec.normals, levels=(1, 10))
    assert rep.gap_min >= 0 and rep.gap_max <= p45.log_scale * math.log(3) + 1e-12
    (l1, g1), (l10, g10) = rep.decay
    assert g10 < g1
    same = sandwich_report(spec, spec, X)
    assert same.gap_min == 0 and same.gap_max == 0
    bad = sandwich_report(spec, lambda S: spec(S) - 1.0, X, tol=0.5)
    assert not bad.ok and bad.worst_violation == pytest.approx(0.5)


def test_assembly_rejects(p45, cone45):
    with pytest.raises(DomainError):
        assemble_global_N3(cone45, ProfileN3([0.0], (1,), p45), 1.0, p45)
    with pytest.raises(DomainError):
        assemble_global_N3(cone45, ProfileN3([0.0, 1.0], (1, 0), p45), 0.0, p45)

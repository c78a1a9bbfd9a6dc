"""Tests for the nested-subsystem joint recursion and its support pattern."""
from __future__ import annotations

import numpy as np
import pytest

from qdtree.algebra import Label
from qdtree.joint import (
    JointParams,
    apply_M2B,
    apply_M2u,
    classify_joint_support,
    iterate_joint,
    joint_initial_condition,
    joint_step,
    joint_trajectory,
    marginals,
)
from qdtree.recursion import initial_condition, iterate, mixed_fixed_point


def delta(s, t):
    Pi = np.zeros((5, 5))
    Pi[s, t] = 1.0
    return Pi


def test_apply_M2B_fixed_corners():
    assert np.allclose(apply_M2B(delta(Label.N, Label.N)), delta(Label.N, Label.N))
    assert np.allclose(apply_M2B(delta(Label.A, Label.A)), delta(Label.A, Label.A))


def test_apply_M2B_cross_term_makes_z():
    Pi = 0.5 * delta(Label.N, Label.N) + 0.5 * delta(Label.A, Label.A)
    want = (
        0.25 * delta(Label.N, Label.N)
        + 0.50 * delta(Label.Z, Label.Z)
        + 0.25 * delta(Label.A, Label.A)
    )
    assert np.allclose(apply_M2B(Pi), want, atol=1e-15)


def test_apply_M2u_identity_at_p_zero():
    rng = np.random.default_rng(11)
    Pi = rng.dirichlet(np.ones(25)).reshape(5, 5)
    assert np.allclose(apply_M2u(Pi, 0.0), Pi)


def test_apply_M2u_full_mixing_of_letter_pair():
    out = apply_M2u(delta(Label.Z, Label.X), 1.0)
    # the same permutation hits both slots, so the image is uniform over the
    # six ordered pairs of distinct letters
    letters = (Label.Z, Label.X, Label.Y)
    want = np.zeros((5, 5))
    for s in letters:
        for t in letters:
            if s != t:
                want[s, t] = 1.0 / 6.0
    assert np.allclose(out, want, atol=1e-15)


def test_apply_M2u_fixes_na_corner():
    for p in (0.0, 0.4, 1.0):
        assert np.allclose(apply_M2u(delta(Label.N, Label.A), p), delta(Label.N, Label.A))


def test_joint_params_validation():
    JointParams(p=0.5, f=0.2, g=0.7)
    with pytest.raises(ValueError):
        JointParams(p=0.5, f=0.7, g=0.2)
    with pytest.raises(ValueError):
        JointParams(p=0.5, f=0.2, g=0.2)
    with pytest.raises(ValueError):
        JointParams(p=1.5, f=0.2, g=0.7)


def test_initial_condition_masses():
    Pi = joint_initial_condition(0.2, 0.5)
    assert Pi[Label.N, Label.N] == 0.5
    assert Pi[Label.N, Label.A] == 0.3
    assert Pi[Label.A, Label.A] == 0.2
    assert Pi.sum() == 1.0


@pytest.mark.parametrize("seed", range(4))
def test_joint_step_preserves_simplex(seed: int):
    rng = np.random.default_rng(600 + seed)
    for _ in range(250):
        Pi = rng.dirichlet(np.ones(25)).reshape(5, 5)
        out = joint_step(Pi, float(rng.uniform(0, 1)))
        assert out.min() >= -1e-15
        assert abs(out.sum() - 1.0) < 1e-12


@pytest.mark.parametrize(
    "p,f,g", [(0.68, 0.2, 0.7), (0.3, 0.1, 0.35), (0.9, 0.45, 0.8), (0.5, 0.3, 0.6)]
)
def test_marginalization_commutes_with_dynamics(p, f, g):
    t = 12
    traj = joint_trajectory(JointParams(p=p, f=f, g=g), t)
    f_side = iterate(initial_condition(f), p, t)
    g_side = iterate(initial_condition(g), p, t)
    for k in range(t + 1):
        mf, mg = marginals(traj[k])
        assert np.max(np.abs(np.array(mf) - np.array(f_side[k]))) < 1e-10
        assert np.max(np.abs(np.array(mg) - np.array(g_side[k]))) < 1e-10


def letter_diag_mass(Pi):
    return Pi[Label.Z, Label.Z] + Pi[Label.X, Label.X] + Pi[Label.Y, Label.Y]


def test_mixed_window_nested_across_half():
    # f < 1/2 < g: the limit is a mixture of a QD-like branch carrying the
    # letter diagonal and an encoding-like branch sitting at (n, a)
    p = 0.68
    Pi = iterate_joint(JointParams(p=p, f=0.2, g=0.7))
    rep = classify_joint_support(Pi, 0.2, 0.7)
    assert rep.within_tol
    assert rep.off_pattern_mass < 1e-6
    assert (Label.N, Label.A) in rep.masses
    u = (6 - 8 * p) / (3 - 3 * p)
    assert abs(letter_diag_mass(Pi) - u) < 1e-6
    assert abs(Pi[Label.N, Label.A] + Pi[Label.N, Label.N] - (1 - u)) < 1e-6


def test_mixed_window_nested_below_half():
    p = 0.68
    Pi = iterate_joint(JointParams(p=p, f=0.2, g=0.4))
    rep = classify_joint_support(Pi, 0.2, 0.4)
    assert rep.within_tol
    assert (Label.N, Label.N) in rep.masses
    assert (Label.N, Label.A) not in rep.masses
    u = (6 - 8 * p) / (3 - 3 * p)
    assert abs(Pi[Label.N, Label.N] - (1 - u)) < 1e-6
    assert abs(letter_diag_mass(Pi) - u) < 1e-6


def test_mixed_window_nested_above_half():
    Pi = iterate_joint(JointParams(p=0.68, f=0.55, g=0.8))
    rep = classify_joint_support(Pi, 0.55, 0.8)
    assert rep.within_tol
    assert (Label.A, Label.A) in rep.masses
    assert (Label.N, Label.A) not in rep.masses
    assert Pi[Label.A, Label.A] > 0.1


def test_encoding_phase_all_mass_at_na():
    Pi = iterate_joint(JointParams(p=0.9, f=0.3, g=0.7))
    assert abs(Pi[Label.N, Label.A] - 1.0) < 1e-6


def test_qd_phase_support():
    Pi = iterate_joint(JointParams(p=0.3, f=0.2, g=0.4))
    rep = classify_joint_support(Pi, 0.2, 0.4)
    assert rep.within_tol
    # deep in the redundant phase nearly all mass is on the letter diagonal
    assert letter_diag_mass(Pi) > 1.0 - 1e-6


def test_classify_flags_off_pattern_mass():
    Pi = np.zeros((5, 5))
    Pi[Label.Z, Label.Z] = 0.9
    Pi[Label.Z, Label.X] = 0.1
    rep = classify_joint_support(Pi, 0.2, 0.4)
    assert not rep.within_tol
    assert abs(rep.off_pattern_mass - 0.1) < 1e-15


def test_iterate_joint_fixed_t_matches_trajectory():
    params = JointParams(p=0.5, f=0.2, g=0.6)
    assert np.allclose(iterate_joint(params, t=7), joint_trajectory(params, 7)[-1])

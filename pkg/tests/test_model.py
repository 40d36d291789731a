import math

import pytest

from impulseq import (
    DomainError,
    Dynamics,
    ImpulseMode,
    ImpulseSpec,
    ParameterError,
    QueueParams,
    RegimeCase,
    Single,
    UndefinedFixedPointError,
    classify_regime,
    fixed_points,
    integrate_impulsive,
)


def test_classify_examples():
    assert classify_regime(QueueParams(10, 1, 2, 2), 3.0) is RegimeCase.OVER_START_OVER_LOAD
    assert classify_regime(QueueParams(9, 5, 2, 2), 1.0) is RegimeCase.UNDER_START_UNDER_LOAD


def test_classify_boundaries_go_to_under_branches():
    p = QueueParams(10, 1, 2, 2)
    assert classify_regime(p, p.c) is RegimeCase.UNDER_START_OVER_LOAD
    crit = QueueParams(2, 1, 2, 2)  # lam == mu*c
    assert classify_regime(crit, 5.0) is RegimeCase.OVER_START_UNDER_LOAD
    assert classify_regime(crit, 1.0) is RegimeCase.UNDER_START_UNDER_LOAD


@pytest.mark.parametrize("q0", [0.0, 1.0, 2.0, 3.5, 100.0])
@pytest.mark.parametrize("lam", [0.5, 2.0, 2.0000001, 7.0])
def test_classify_total_and_boundary_flips(lam, q0):
    p = QueueParams(lam, 1, 2, 2)
    tag = classify_regime(p, q0)
    assert isinstance(tag, RegimeCase)
    eps = 1e-9
    up = classify_regime(p, q0 + eps)
    # crossing the q0 = c boundary flips exactly the start coordinate
    if q0 == p.c:
        assert up.starts_above and not tag.starts_above
        assert up.overloaded == tag.overloaded
    lam_up = classify_regime(QueueParams(p.mu * p.c + eps, 1, 2, 2), q0)
    lam_dn = classify_regime(QueueParams(p.mu * p.c - eps, 1, 2, 2), q0)
    assert lam_up.overloaded and not lam_dn.overloaded
    assert lam_up.starts_above == lam_dn.starts_above


def test_classify_rejects_negative_q0():
    with pytest.raises(DomainError):
        classify_regime(QueueParams(10, 1, 2, 2), -0.5)


def test_fixed_points_examples():
    fp = fixed_points(QueueParams(10, 1, 2, 2))
    assert fp.xi1 == pytest.approx(6.0, abs=1e-15)
    assert fp.xi2 == pytest.approx(10.0, abs=1e-15)
    fp = fixed_points(QueueParams(9, 5, 2, 2))
    assert fp.xi1 == pytest.approx(1.5, abs=1e-15)
    assert fp.xi2 == pytest.approx(1.8, abs=1e-15)


def test_fixed_points_critical_load_meets_capacity():
    fp = fixed_points(QueueParams(2, 1, 2, 2))
    assert fp.xi1 == pytest.approx(2.0, abs=1e-15)
    assert fp.xi2 == pytest.approx(2.0, abs=1e-15)


def test_fixed_points_continuity_at_critical_load():
    for sign in (-1.0, 1.0):
        p = QueueParams(2.0 * (1 + sign * 1e-9), 1, 2, 2)
        fp = fixed_points(p)
        assert abs(fp.xi1 - 2.0) < 1e-8
        assert abs(fp.xi2 - 2.0) < 1e-8


def test_fixed_points_side_invariants():
    for lam in (0.5, 1.9, 2.1, 30.0):
        p = QueueParams(lam, 1, 2, 2)
        fp = fixed_points(p)
        assert (fp.xi1 > p.c) == (p.lam > p.mu * p.c)
        assert (fp.xi2 <= p.c) == (p.lam <= p.mu * p.c)


def test_fixed_points_undefined_at_theta_zero_overloaded():
    with pytest.raises(UndefinedFixedPointError):
        fixed_points(QueueParams(10, 1, 0, 2))


def test_overloaded_relaxation_reaches_xi1():
    # independent check: integrating from above capacity settles at xi1
    p = QueueParams(10, 1, 2, 2)
    traj = integrate_impulsive(p, 9.0, ImpulseSpec(1.0, Single(100.0)), 20.0)
    assert traj.final[1] == pytest.approx(6.0, abs=1e-8)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(lam=0, mu=1, theta=1, c=1),
        dict(lam=1, mu=0, theta=1, c=1),
        dict(lam=1, mu=1, theta=-0.1, c=1),
        dict(lam=1, mu=1, theta=1, c=0),
        dict(lam=math.inf, mu=1, theta=1, c=1),
        dict(lam=math.nan, mu=1, theta=1, c=1),
    ],
)
def test_invalid_params_rejected(kwargs):
    with pytest.raises(ParameterError):
        QueueParams(**kwargs)


def test_impulse_modes():
    spec = ImpulseSpec(0.5, Single(1.0))
    assert spec.apply(8.0, 2.0) == 4.0
    excess = ImpulseSpec(0.5, Single(1.0), ImpulseMode.ABANDONMENT_ONLY)
    assert excess.apply(8.0, 2.0) == 2.0 + 0.5 * 6.0
    assert excess.apply(1.5, 2.0) == 1.5  # below capacity: untouched
    assert excess.apply(2.0, 2.0) == 2.0  # at capacity: no excess, no-op


def test_impulse_multiplier_validated():
    with pytest.raises(ParameterError):
        ImpulseSpec(0.0, Single(1.0))
    with pytest.raises(ParameterError):
        ImpulseSpec(-0.5, Single(1.0))

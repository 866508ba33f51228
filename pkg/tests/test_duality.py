import math

import numpy as np
import pytest

from kothe import (
    FiniteProbSpace,
    MusielakFamily,
    Rv,
    amemiya_dual_norm,
    density_of_functional,
    expectation,
    indicator,
    lorentz_norm,
    lp_norm,
    marcinkiewicz_norm,
    pairing,
    phi_sqrt,
    polar,
    rho_m,
    singular_part_report,
    verify_bipolar,
    verify_holder,
    verify_sandwich,
    young_power,
    young_power_over_p,
)
from kothe.norms import CustomSeminorm, LorentzNorm, LpNorm, LuxemburgNorm, MarcinkiewiczNorm

UNIFORM4 = FiniteProbSpace.uniform(4)


def test_polar_l2_example():
    res = polar(UNIFORM4, LpNorm(2), Rv([2.0, 0, 0, 0]))
    assert res.value == pytest.approx(1.0, abs=1e-9)
    assert res.gap <= 1e-9
    assert pairing(UNIFORM4, res.maximizer, Rv([2.0, 0, 0, 0])) == pytest.approx(
        res.value, abs=1e-9
    )
    assert LpNorm(2).value(UNIFORM4, res.maximizer) <= 1.0 + 1e-9


def test_polar_l1_is_sup_norm():
    rng = np.random.default_rng(61)
    for _ in range(10):
        y = Rv(rng.standard_normal(4))
        res = polar(UNIFORM4, LpNorm(1), y)
        assert res.value == pytest.approx(np.abs(y.values).max(), abs=1e-9)


def test_polar_marcinkiewicz_equals_lorentz():
    res = polar(UNIFORM4, MarcinkiewiczNorm(phi_sqrt()), indicator(UNIFORM4, [0]))
    assert res.value == pytest.approx(0.5, abs=1e-6)
    rng = np.random.default_rng(62)
    for k in range(10):
        n = int(rng.integers(2, 9))
        space = FiniteProbSpace.uniform(n)
        y = Rv(rng.standard_normal(n))
        res = polar(space, MarcinkiewiczNorm(phi_sqrt()), y, seed=k)
        assert res.value == pytest.approx(lorentz_norm(space, y, phi_sqrt()), abs=1e-6)
        # and the mutual direction
        res = polar(space, LorentzNorm(phi_sqrt()), y, seed=k)
        assert res.value == pytest.approx(marcinkiewicz_norm(space, y, phi_sqrt()), abs=1e-6)


def test_polar_lp_conjugate_pairs():
    rng = np.random.default_rng(63)
    for p in (1.0, 1.5, 2.0, 3.0, math.inf):
        q = math.inf if p == 1.0 else (1.0 if math.isinf(p) else p / (p - 1.0))
        for _ in range(5):
            n = int(rng.integers(2, 7))
            probs = rng.random(n) + 0.2
            space = FiniteProbSpace(probs / probs.sum())
            y = Rv(rng.standard_normal(n))
            res = polar(space, LpNorm(p), y)
            assert res.value == pytest.approx(lp_norm(space, y, q), abs=1e-6)


def test_polar_strategy_agreement_small_spaces():
    rng = np.random.default_rng(64)
    specs = [LpNorm(2), LpNorm(1), MarcinkiewiczNorm(phi_sqrt()), LorentzNorm(phi_sqrt())]
    for k, spec in enumerate(specs):
        for n in (3, 4):
            space = FiniteProbSpace.uniform(n)
            y = Rv(rng.standard_normal(n))
            como = polar(space, spec, y, strategy="comonotone", seed=k)
            gen = polar(space, spec, y, strategy="general", seed=k)
            enum = polar(space, spec, y, strategy="general", enumerate_full=True, seed=k)
            assert como.value == pytest.approx(gen.value, abs=1e-6)
            assert como.value == pytest.approx(enum.value, abs=1e-6)


def test_polar_monotone_in_domination():
    rng = np.random.default_rng(65)
    spec = MarcinkiewiczNorm(phi_sqrt())
    for k in range(10):
        n = int(rng.integers(2, 7))
        space = FiniteProbSpace.uniform(n)
        y = rng.standard_normal(n)
        smaller = y * rng.uniform(0, 1, n)
        big = polar(space, spec, Rv(y), seed=k).value
        small = polar(space, spec, Rv(smaller), seed=k).value
        assert small <= big + 1e-7


def test_polar_luxemburg_matches_amemiya():
    rng = np.random.default_rng(66)
    for k in range(10):
        n = int(rng.integers(2, 6))
        probs = rng.random(n) + 0.2
        space = FiniteProbSpace(probs / probs.sum())
        fam = MusielakFamily(
            tuple(
                young_power(p, s)
                for p, s in zip(rng.uniform(1.3, 3.0, n), rng.uniform(0.5, 2.0, n))
            )
        )
        y = Rv(rng.standard_normal(n))
        res = polar(space, LuxemburgNorm(fam), y, seed=k)
        assert res.value == pytest.approx(amemiya_dual_norm(space, y, fam), abs=1e-5)


def test_polar_zero_and_axiom_failure():
    res = polar(UNIFORM4, LpNorm(2), Rv.zero(4))
    assert res.value == 0.0 and res.converged
    broken = CustomSeminorm(lambda s, x: float(np.dot(s.probs, x)), name="signed-mean")
    with pytest.raises(ValueError):
        polar(UNIFORM4, broken, Rv([1.0, 0, 0, 0]))


def test_verify_holder():
    rng = np.random.default_rng(67)
    assert verify_holder(UNIFORM4, LpNorm(2), Rv.zero(4), Rv([1.0, 2, 3, 4]))
    for _ in range(10):
        u = Rv(rng.standard_normal(4))
        y = Rv(rng.standard_normal(4))
        assert verify_holder(UNIFORM4, LpNorm(2), u, y)
    # equality exactly on proportional pairs
    u = Rv(rng.standard_normal(4))
    y = Rv(2.5 * u.values)
    res = polar(UNIFORM4, LpNorm(2), y)
    assert pairing(UNIFORM4, u, y) == pytest.approx(
        lp_norm(UNIFORM4, u, 2) * res.value, rel=1e-8
    )
    for k in range(30):
        n = int(rng.integers(2, 7))
        space = FiniteProbSpace.uniform(n)
        spec = MarcinkiewiczNorm(phi_sqrt()) if k % 2 == 0 else LorentzNorm(phi_sqrt())
        assert verify_holder(
            space, spec, Rv(rng.standard_normal(n)), Rv(rng.standard_normal(n)), seed=k
        )


def test_verify_bipolar():
    rng = np.random.default_rng(68)
    for p in (1.0, 2.0, 3.0):
        for k in range(4):
            n = int(rng.integers(2, 7))
            space = FiniteProbSpace.uniform(n)
            rep = verify_bipolar(space, LpNorm(p), Rv(rng.standard_normal(n)), seed=k)
            assert rep.rel_gap <= 1e-5
    space = FiniteProbSpace.uniform(8)
    rep = verify_bipolar(space, MarcinkiewiczNorm(phi_sqrt()), indicator(space, [0, 3]))
    assert rep.rel_gap <= 1e-5
    rep = verify_bipolar(UNIFORM4, LpNorm(2), Rv.zero(4))
    assert rep.primal == 0.0 and rep.bipolar == 0.0 and rep.rel_gap == 0.0


def test_verify_bipolar_risk_norm():
    from kothe import avar
    from kothe.norms import RiskNorm

    rng = np.random.default_rng(681)
    space = FiniteProbSpace.uniform(4)
    rep = verify_bipolar(space, RiskNorm(avar(0.6)), Rv(rng.standard_normal(4)), seed=1)
    assert rep.rel_gap <= 1e-5


def test_verify_bipolar_without_closed_form():
    # a wrapped callback norm has no registered dual: the nested optimizer
    # route must still round-trip, at reduced precision
    custom = CustomSeminorm(
        lambda s, x: 1.7 * math.sqrt(float(np.dot(s.probs, x**2))), name="scaled-l2"
    )
    rng = np.random.default_rng(682)
    space = FiniteProbSpace.uniform(3)
    rep = verify_bipolar(space, custom, Rv(rng.standard_normal(3)), seed=1)
    assert rep.rel_gap <= 1e-4


def test_verify_sandwich_musielak():
    rng = np.random.default_rng(69)
    fam2 = MusielakFamily.constant(young_power(2), 4)
    for _ in range(5):
        y = Rv(rng.standard_normal(4))
        rep = verify_sandwich(UNIFORM4, fam2, y)
        assert rep.ok
        # quadratic case: the conjugate-modular gauge is half the dual norm, so
        # the sandwich collapses onto its upper edge
        assert rep.ratio == pytest.approx(2.0, rel=1e-9)
    fam3 = MusielakFamily.constant(young_power_over_p(3), 5)
    space = FiniteProbSpace.uniform(5)
    for _ in range(10):
        y = Rv(rng.standard_normal(5))
        rep = verify_sandwich(space, fam3, y)
        assert rep.ok
        assert 1.0 - 1e-9 <= rep.ratio <= 2.0 + 1e-9
    rep = verify_sandwich(UNIFORM4, fam2, Rv.zero(4))
    assert rep.ok and rep.lower == 0.0 and rep.value == 0.0


def test_rho_m_examples():
    u = Rv([4.0, 1.0, 3.0, 2.0])
    y = Rv([1.0, -1.0, 1.0, -1.0])
    assert rho_m(UNIFORM4, u, y) == pytest.approx(2.5)
    assert rho_m(UNIFORM4, u, Rv.zero(4)) == 0.0
    assert rho_m(UNIFORM4, Rv(-u.values), y) == rho_m(UNIFORM4, u, y)
    assert rho_m(UNIFORM4, u, Rv(-np.asarray(y.values))) == rho_m(UNIFORM4, u, y)


def test_singular_part_report():
    y = density_of_functional(UNIFORM4, np.array([1.0, 0, 0, 0]))
    assert np.allclose(y.values, [4.0, 0, 0, 0])
    rng = np.random.default_rng(70)
    u = Rv(rng.standard_normal(4))
    assert pairing(UNIFORM4, u, y) == pytest.approx(u.values[0], abs=1e-12)
    ones = density_of_functional(UNIFORM4, UNIFORM4.probs)
    assert np.allclose(ones.values, 1.0)
    assert pairing(UNIFORM4, u, ones) == pytest.approx(expectation(UNIFORM4, u), abs=1e-12)
    report = singular_part_report(UNIFORM4, n_functionals=20, seed=3)
    assert report.max_error <= 1e-12
    assert report.singular_part_trivial
    assert report.dual_dimension == 4

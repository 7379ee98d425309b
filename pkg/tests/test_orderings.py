"""Psi functionals, the K kernel, TP2 checks, and the order deciders."""
import math

import numpy as np
import pytest

from wdsembed.measures import Measure, MeasureFamily
from wdsembed.orderings import (
    MeanSignViolationError,
    NonNegativeMeanError,
    Relation,
    compare_family,
    compare_pair,
    comparison_grid,
    k_function,
    psi_mrl,
    psi_wds,
    psi_wds_many,
    psi_wis,
    tp2_check_grid,
)
from wdsembed.transforms import (
    density_power_measure,
    discrete_power_measure,
    gaussian_peacock_family,
    translated_two_atom_measure,
    two_atom_measure,
)

TWO_ATOM = Measure.from_atoms([(-2.0, 0.5), (1.0, 0.5)])


# -- K ---------------------------------------------------------------


def test_k_function_values():
    assert k_function(TWO_ATOM, 0.0) == 1.0
    assert k_function(TWO_ATOM, 5.0) == 0.5  # -mean beyond support
    assert k_function(Measure.point_mass(-1.0), -3.0) == 3.0


def test_k_function_requires_negative_mean():
    with pytest.raises(NonNegativeMeanError):
        k_function(Measure.point_mass(1.0), 0.0)


def test_k_exact_branches():
    # K(x) = -x strictly below the support, K(x) = -mean at and above the top
    m = TWO_ATOM
    for x in (-3.0, -5.5):
        assert k_function(m, x) == -x
    for x in (1.0, 4.0):
        assert k_function(m, x) == 0.5


# -- psi functionals --------------------------------------------------


def test_psi_wds_discrete_power():
    m = discrete_power_measure(1, 0.5)
    assert abs(psi_wds(m, 0.0) - 1.5) < 1e-12  # 1 - t + t/(1-t) at t = 0.5


def test_psi_wds_two_atom_middle_branch():
    for t in (0.2, 0.5, 0.8):
        m = two_atom_measure(t)
        for x in (-t + 1e-9, 0.5 * (1.0 - 2.0 * t), 1.0 - t - 1e-9):
            assert abs(psi_wds(m, x) - 1.0) < 1e-9


def test_psi_wds_point_mass_zero():
    for a in (0.5, 2.0):
        m = Measure.point_mass(-a)
        assert psi_wds(m, -a - 1.0) == 0.0


def test_psi_wds_density_power():
    m = density_power_measure(0, 1.0)
    assert abs(psi_wds(m, 0.0) - 3.0) < 1e-10


def test_psi_wds_infinite_at_top():
    assert math.isinf(psi_wds(TWO_ATOM, 1.0))
    assert math.isinf(psi_wds(TWO_ATOM, 2.0))


def test_psi_wds_left_limit_zero():
    for m in (TWO_ATOM, density_power_measure(1, 0.8)):
        l = m.support_inf()
        prev = math.inf
        for j in (1, 2, 3):
            v = psi_wds(m, l - 10.0**j)
            assert 0.0 <= v <= prev
            prev = v
        assert psi_wds(m, l - 1000.0) < 1e-2


def test_psi_wds_alternate_formula():
    for m in (TWO_ATOM, density_power_measure(0, 1.0), discrete_power_measure(2, 0.4)):
        xs = np.linspace(m.support_inf() - 2.0, m.support_sup() - 1e-6, 101)
        for x in xs:
            x = float(x)
            sv = m.survival_from(x)
            if sv <= 0.0:
                continue
            alt = x + k_function(m, x) / sv
            assert abs(psi_wds(m, x) - alt) <= 1e-12 * max(1.0, abs(alt))


def test_psi_mrl():
    assert psi_mrl(TWO_ATOM, 0.0) == 1.0
    for x in (1.0, 3.5):  # at and beyond the top: value is x itself
        assert psi_mrl(TWO_ATOM, x) == x


def test_psi_wis_reflection_identity():
    m = Measure.from_atoms([(2.0, 0.5), (-1.0, 0.5)])
    assert psi_wis(m, 0.0) == psi_wds(m.reflect(), 0.0) == 2.0


# -- TP2 grid check ---------------------------------------------------


def test_tp2_rank_one_kernel_passes():
    ts = [0.5, 1.0, 2.0]
    xs = [-1.0, 0.0, 3.0]
    F = np.outer([1.0, 2.0, 5.0], [0.3, 0.7, 1.1])
    assert tp2_check_grid(ts, xs, F).ok


def test_tp2_gaussian_kernel_passes():
    ts = np.linspace(0.0, 2.0, 9)
    xs = np.linspace(-2.0, 2.0, 11)
    F = np.exp(-((ts[:, None] - xs[None, :]) ** 2))
    assert tp2_check_grid(ts, xs, F).ok


def test_tp2_translated_family_violation():
    # the violating minors sit where both x's lie between the two measures'
    # top atoms (inside (-1.5, -1] for this time pair)
    ts = [0.5, 1.0]
    xs = [-1.4, -1.1]
    F = np.array(
        [[k_function(translated_two_atom_measure(t), x) for x in xs] for t in ts]
    )
    rep = tp2_check_grid(ts, xs, F)
    assert not rep.ok
    assert rep.witness is not None


# -- pairwise comparison ----------------------------------------------


def test_wds_holds_discrete_power_pair():
    mu = discrete_power_measure(1, 0.3)
    nu = discrete_power_measure(1, 0.6)
    v = compare_pair(Relation.WDS, mu, nu, s=0.3, t=0.6)
    assert v.holds and not v.inconclusive


def test_st_decreasing_fails_with_witness_at_zero():
    mu = discrete_power_measure(1, 0.3)
    nu = discrete_power_measure(1, 0.6)
    v = compare_pair(Relation.ST_DECREASING, mu, nu, s=0.3, t=0.6)
    assert not v.holds
    assert v.witness.x == 0.0
    # survival above 0: t - t^2 = 0.21 at t=0.3 and 0.24 at t=0.6
    assert v.witness.lhs == pytest.approx(0.21)
    assert v.witness.rhs == pytest.approx(0.24)


def test_wds_fails_translated_family():
    v = compare_pair(
        Relation.WDS,
        translated_two_atom_measure(0.5),
        translated_two_atom_measure(1.0),
        s=0.5,
        t=1.0,
    )
    assert not v.holds and not v.inconclusive


def test_wds_implies_dcx():
    pairs = [
        (discrete_power_measure(1, 0.3), discrete_power_measure(1, 0.6)),
        (two_atom_measure(0.25), two_atom_measure(0.75)),
        (density_power_measure(0, 0.6), density_power_measure(0, 1.5)),
    ]
    for mu, nu in pairs:
        assert compare_pair(Relation.WDS, mu, nu).holds
        assert compare_pair(Relation.DCX, mu, nu).holds


def test_wds_requires_negative_means():
    with pytest.raises(MeanSignViolationError):
        compare_pair(Relation.WDS, Measure.point_mass(1.0), Measure.point_mass(2.0))


def test_witness_reproduces_violation():
    v = compare_pair(
        Relation.WDS,
        translated_two_atom_measure(0.5),
        translated_two_atom_measure(1.0),
        s=0.5,
        t=1.0,
    )
    w = v.witness
    lhs = psi_wds(translated_two_atom_measure(0.5), w.x)
    rhs = psi_wds(translated_two_atom_measure(1.0), w.x)
    assert lhs == pytest.approx(w.lhs)
    assert rhs == pytest.approx(w.rhs)
    assert lhs > rhs


# -- familywise comparison --------------------------------------------


def test_wds_holds_density_power_family():
    fam = MeasureFamily.make(
        [(t, density_power_measure(0, t)) for t in (0.6, 1.0, 1.5)]
    )
    assert compare_family(Relation.WDS, fam).holds


def test_wds_holds_shifted_point_masses():
    fam = MeasureFamily.make(
        [(t, Measure.point_mass(-t)) for t in (1.0, 2.0, 3.0)]
    )
    assert compare_family(Relation.WDS, fam).holds


def test_constant_mean_peacock_fails_wds():
    fam = gaussian_peacock_family(-1.0, (0.5, 1.0))
    v = compare_family(Relation.WDS, fam)
    assert not v.holds
    assert v.witness is not None


# -- route equivalence and duality ------------------------------------


def _random_pair(rng):
    """A random negative-mean pair: two-atom or atom-plus-segment."""
    if rng.random() < 0.5:
        def mk():
            a = -rng.uniform(0.5, 3.0)
            b = rng.uniform(0.1, 1.5)
            w = rng.uniform(0.55, 0.95)
            if w * a + (1 - w) * b >= 0:
                b = -a * w / (1 - w) * 0.5  # force a negative mean
            return Measure.from_atoms([(a, w), (b, 1 - w)])
        return mk(), mk()
    def mk():
        a = -rng.uniform(1.0, 3.0)
        width = rng.uniform(0.5, 2.0)
        w = rng.uniform(0.5, 0.9)
        lo = rng.uniform(-0.5, 0.0)
        return Measure.make(
            atoms=[(a, w)],
            segments=[(lo, lo + width, ((1 - w) / width,))],
        )
    return mk(), mk()


def test_route_equivalence_on_randomized_pairs():
    """The pointwise-psi route and the TP2-on-K route never disagree."""
    rng = np.random.default_rng(42)
    n_inconclusive = 0
    for _ in range(120):
        mu, nu = _random_pair(rng)
        if mu.mean() >= 0 or nu.mean() >= 0:
            continue
        v = compare_pair(Relation.WDS, mu, nu)
        n_inconclusive += int(v.inconclusive)
    assert n_inconclusive == 0


def test_wis_equals_wds_of_reflections():
    rng = np.random.default_rng(43)
    for _ in range(30):
        mu, nu = _random_pair(rng)
        vw = compare_pair(Relation.WIS, mu.reflect(), nu.reflect())
        vd = compare_pair(Relation.WDS, mu, nu)
        assert vw.holds == vd.holds
        if vw.witness is not None:
            assert vw.witness.x == pytest.approx(-vd.witness.x, rel=1e-9)
            assert vw.witness.lhs == pytest.approx(vd.witness.lhs, rel=1e-9)


def test_st_decreasing_negative_means_implies_wds():
    rng = np.random.default_rng(44)
    base = Measure.from_atoms([(-1.5, 0.6), (0.5, 0.4)])
    for _ in range(25):
        c = rng.uniform(0.1, 2.0)
        fam = MeasureFamily.make(
            [(t, base.translate(-c * t)) for t in (0.5, 1.0, 2.0)]
        )
        assert compare_family(Relation.ST_DECREASING, fam).holds
        assert compare_family(Relation.WDS, fam).holds


def test_comparison_grid_covers_knots():
    mu = discrete_power_measure(1, 0.3)
    nu = discrete_power_measure(1, 0.6)
    grid = comparison_grid(mu, nu)
    for knot in mu.knots() + nu.knots() + [0.0]:
        assert np.min(np.abs(grid - knot)) == 0.0


def test_verdict_serialization():
    v = compare_pair(
        Relation.WDS,
        translated_two_atom_measure(0.5),
        translated_two_atom_measure(1.0),
        s=0.5,
        t=1.0,
    )
    d = v.to_dict()
    assert d["relation"] == "wds"
    assert d["holds"] is False
    assert "x" in d["witness"]

"""Exact-measure representation: constructors, functionals, invariants."""
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wdsembed.measures import (
    EmptySampleError,
    InvalidMeasureError,
    Measure,
    MeasureFamily,
    Segment,
    validate,
)
from wdsembed.transforms import density_power_measure, two_atom_measure

TWO_ATOM = Measure.from_atoms([(-2.0, 0.5), (1.0, 0.5)])


# -- validation -------------------------------------------------------


def test_two_atom_measure_is_valid():
    assert validate(TWO_ATOM) == []


def test_mass_not_one_rejected():
    with pytest.raises(InvalidMeasureError, match="mass"):
        Measure.make(atoms=[(-2.0, 0.5)])


def test_negative_density_rejected():
    with pytest.raises(InvalidMeasureError, match="[Nn]egative"):
        Measure.make(segments=[(0.0, 1.0, (-1.0,))])


def test_overlapping_segments_rejected():
    with pytest.raises(InvalidMeasureError):
        Measure.make(segments=[(0.0, 1.0, (0.5,)), (0.5, 1.5, (0.5,))])


# -- mean -------------------------------------------------------------


def test_mean_two_atom():
    assert TWO_ATOM.mean() == -0.5


def test_mean_density_power_k0_t1():
    m = density_power_measure(0, 1.0)
    assert abs(m.mean() - (-1.25)) < 1e-12


def test_mean_point_mass():
    for a in (0.5, 1.0, 3.25):
        assert Measure.point_mass(-a).mean() == -a


# -- survival ---------------------------------------------------------


def test_survival_discrete_power():
    # t^k - t^{k+1} at k=1, t=0.5
    m = Measure.from_atoms([(-0.5, 0.75), (0.5, 0.25)])
    assert m.survival_from(0.0) == 0.25


def test_survival_closed_interval_convention():
    assert TWO_ATOM.survival_from(-2.0) == 1.0
    assert TWO_ATOM.survival_from(2.0) == 0.0


def test_survival_jump_equals_atom_weight():
    for x in (-2.0, 0.0, 1.0):
        jump = TWO_ATOM.survival_from(x) - TWO_ATOM.survival_above(x)
        assert jump == TWO_ATOM.atom_weight_at(x)


# -- integrated survival ----------------------------------------------


def test_integrated_survival_two_atom():
    assert TWO_ATOM.integrated_survival(0.0) == 0.5
    assert TWO_ATOM.integrated_survival(-3.0) == 2.5


def test_integrated_survival_zero_beyond_support():
    for m in (TWO_ATOM, density_power_measure(0, 1.0), Measure.point_mass(-1.0)):
        r = m.support_sup()
        assert m.integrated_survival(r) == 0.0
        assert m.integrated_survival(r + 2.0) == 0.0


# -- support bounds ---------------------------------------------------


def test_support_two_atom():
    assert TWO_ATOM.support_sup() == 1.0
    assert TWO_ATOM.support_inf() == -2.0


def test_support_density_power():
    from wdsembed.transforms import density_alpha

    for k, t in [(0, 1.0), (1, 0.8), (2, 1.5)]:
        m = density_power_measure(k, t)
        assert abs(m.support_sup() - 1.0 / t) < 1e-12
        assert abs(m.support_inf() - (-density_alpha(k, t))) < 1e-12


def test_support_point_mass():
    m = Measure.point_mass(-3.0)
    assert m.support_sup() == m.support_inf() == -3.0


# -- reflect / translate ----------------------------------------------


def test_reflect_two_atom():
    r = TWO_ATOM.reflect()
    assert r.atoms == ((-1.0, 0.5), (2.0, 0.5))


def test_translate_two_atom_family_member():
    t = 0.4
    shifted = two_atom_measure(t).translate(-1.0)
    locs = [x for x, _ in shifted.atoms]
    assert locs == pytest.approx([-t - 1.0, -t])


def test_reflect_is_involution():
    m = Measure.make(atoms=[(-1.0, 0.5)], segments=[(0.0, 1.0, (0.5,))])
    assert m.reflect().reflect() == m


def test_reflect_translate_mean_maps():
    m = Measure.make(atoms=[(-1.0, 0.5)], segments=[(0.0, 1.0, (0.5,))])
    assert m.reflect().mean() == pytest.approx(-m.mean(), abs=1e-14)
    assert m.translate(0.7).mean() == pytest.approx(m.mean() + 0.7, abs=1e-14)
    assert m.reflect().total_mass == pytest.approx(1.0, abs=1e-14)
    assert m.translate(0.7).total_mass == pytest.approx(1.0, abs=1e-14)


# -- from_samples -----------------------------------------------------


def test_from_samples_merges_duplicates():
    m = Measure.from_samples([1.0, 1.0, -2.0, -2.0])
    assert m.atoms == ((-2.0, 0.5), (1.0, 0.5))


def test_from_samples_single():
    assert Measure.from_samples([0.0]).atoms == ((0.0, 1.0),)


def test_from_samples_empty_rejected():
    with pytest.raises(EmptySampleError):
        Measure.from_samples([])


def test_from_samples_large_draw_binomial_error():
    n = 100_000
    rng = np.random.default_rng(7)
    xs = np.where(rng.random(n) < 0.5, -2.0, 1.0)
    m = Measure.from_samples(xs.tolist())
    se4 = 4.0 * math.sqrt(0.25 / n)
    for _loc, w in m.atoms:
        assert abs(w - 0.5) <= se4


# -- analytic identities ----------------------------------------------

CORPUS = [
    TWO_ATOM,
    Measure.point_mass(-1.0),
    density_power_measure(0, 1.0),
    density_power_measure(2, 0.8),
    Measure.make(atoms=[(-1.5, 0.25), (0.5, 0.25)], segments=[(-1.0, 0.0, (0.5,))]),
]


@pytest.mark.parametrize("m", CORPUS)
def test_put_call_parity(m):
    mean = m.mean()
    lo, hi = m.support_inf() - 3.0, m.support_sup() + 3.0
    for x in np.linspace(lo, hi, 101):
        put = m.put_value(float(x))
        call = m.integrated_survival(float(x))
        assert abs((put - call) - (x - mean)) <= 1e-12 * max(1.0, abs(x), abs(mean))


@pytest.mark.parametrize("m", CORPUS)
def test_integrated_survival_shape(m):
    """Convexity, nonnegativity, vanishing beyond the top, -x + mean asymptote."""
    rng = np.random.default_rng(3)
    lo, hi = m.support_inf() - 2.0, m.support_sup() + 2.0
    for _ in range(200):
        a, b = sorted(rng.uniform(lo, hi, size=2))
        mid = 0.5 * (a + b)
        ca, cb, cm = (m.integrated_survival(v) for v in (a, b, mid))
        assert cm <= 0.5 * (ca + cb) + 1e-12
        assert ca >= 0.0 and cb >= 0.0
    r = m.support_sup()
    assert m.integrated_survival(r) == 0.0
    left = m.support_inf() - 1.0
    assert abs(m.integrated_survival(left) + left - m.mean()) <= 1e-9


@pytest.mark.parametrize("m", CORPUS)
def test_vectorized_functionals_match_scalar(m):
    xs = np.linspace(m.support_inf() - 2.0, m.support_sup() + 2.0, 57)
    assert np.array_equal(m.survival_from_many(xs), [m.survival_from(float(x)) for x in xs])
    assert np.array_equal(m.survival_above_many(xs), [m.survival_above(float(x)) for x in xs])
    assert np.allclose(
        m.integrated_survival_many(xs),
        [m.integrated_survival(float(x)) for x in xs],
        rtol=0, atol=0,
    )


# -- serialization ----------------------------------------------------


def test_json_round_trip_bit_exact():
    m = Measure.make(
        atoms=[(-2.0, 0.25), (0.1 + 0.2, 0.25)],  # 0.30000000000000004 survives
        segments=[(0.0 - 1.0, 0.0, (0.5,))],
    )
    assert Measure.from_json(m.to_json()) == m


def test_json_format_shape():
    d = TWO_ATOM.to_dict()
    assert d["atoms"][0] == {"x": "-2.0", "w": "0.5"}
    assert d["segments"] == []


def test_family_round_trip():
    fam = MeasureFamily.make([(0.3, TWO_ATOM), (0.6, Measure.point_mass(-1.0))])
    back = MeasureFamily.from_json(fam.to_json())
    assert back.times == fam.times
    assert back.measures == fam.measures


def test_family_requires_increasing_times():
    with pytest.raises(Exception):
        MeasureFamily.make([(0.6, TWO_ATOM), (0.3, TWO_ATOM)])


# -- property tests ---------------------------------------------------


@st.composite
def atomic_measures(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    locs = draw(
        st.lists(
            st.floats(min_value=-50, max_value=50, allow_nan=False),
            min_size=n, max_size=n, unique=True,
        )
    )
    raw = draw(
        st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=n, max_size=n)
    )
    total = sum(raw)
    return Measure.from_atoms([(x, w / total) for x, w in zip(locs, raw)])


@given(atomic_measures())
@settings(max_examples=60, deadline=None)
def test_property_mass_conserved(m):
    assert abs(m.total_mass - 1.0) <= 1e-12


@given(atomic_measures(), st.floats(min_value=-10, max_value=10, allow_nan=False))
@settings(max_examples=60, deadline=None)
def test_property_translate_reflect(m, c):
    assert m.translate(c).mean() == pytest.approx(m.mean() + c, abs=1e-9)
    assert m.reflect().mean() == pytest.approx(-m.mean(), abs=1e-9)
    assert Measure.from_json(m.to_json()) == m


@given(atomic_measures(), st.floats(min_value=-60, max_value=60, allow_nan=False))
@settings(max_examples=60, deadline=None)
def test_property_survival_monotone(m, x):
    assert -1e-12 <= m.survival_from(x) <= 1.0 + 1e-12
    assert m.survival_above(x) <= m.survival_from(x)
    assert m.integrated_survival(x) >= 0.0

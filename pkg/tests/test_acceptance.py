"""Full verification gate: one test per criterion, each printing a
[PASS]/[FAIL] line with the measured detail."""
import pytest

from wdsembed import acceptance


def _run(criterion):
    result = criterion()
    print(result.line)
    assert result.passed, result.line


def test_criterion_01_discrete_power_closed_form(capsys):
    with capsys.disabled():
        _run(acceptance.criterion_1)


def test_criterion_02_density_power_closed_form(capsys):
    with capsys.disabled():
        _run(acceptance.criterion_2)


def test_criterion_03_barrier_inverse_identity(capsys):
    with capsys.disabled():
        _run(acceptance.criterion_3)


def test_criterion_04_two_atom_embedding(capsys):
    with capsys.disabled():
        _run(acceptance.criterion_4)


def test_criterion_05_stopping_time_monotonicity(capsys):
    with capsys.disabled():
        _run(acceptance.criterion_5)


def test_criterion_06_supermartingale_bins(capsys):
    with capsys.disabled():
        _run(acceptance.criterion_6)


def test_criterion_07_wds_implies_dcx(capsys):
    with capsys.disabled():
        _run(acceptance.criterion_7)


def test_criterion_08_constant_mean_control(capsys):
    with capsys.disabled():
        _run(acceptance.criterion_8)


def test_criterion_09_translation_counterexample(capsys):
    with capsys.disabled():
        _run(acceptance.criterion_9)


def test_criterion_10_preservation_transforms(capsys):
    with capsys.disabled():
        _run(acceptance.criterion_10)


def test_criterion_11_tp2_algebra(capsys):
    with capsys.disabled():
        _run(acceptance.criterion_11)


def test_criterion_12_route_agreement(capsys):
    with capsys.disabled():
        _run(acceptance.criterion_12)

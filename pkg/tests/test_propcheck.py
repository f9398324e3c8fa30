import math

import pytest

from renyi_converse import propcheck
from renyi_converse.errors import RenyiConverseError


def test_all_default_checks_pass_small():
    reports = propcheck.run_checks(trials=5, seed=3)
    assert len(reports) == len(propcheck.CHECKS)
    for r in reports:
        assert r.passed, f"{r.check_id} failed with worst margin {r.worst_margin}"


def test_selftest_inverted_fails():
    report = propcheck.check_selftest_inverted(trials=20, seed=0)
    assert not report.passed
    assert report.worst_margin < 0.0
    assert report.failures


def test_reports_are_deterministic():
    a = propcheck.check_dpi(trials=10, seed=7)
    b = propcheck.check_dpi(trials=10, seed=7)
    assert a == b
    c = propcheck.check_dpi(trials=10, seed=8)
    assert a.worst_margin != c.worst_margin


def test_infinite_margins_do_not_poison_worst():
    # a check can legitimately report +inf when every trial is one-sided;
    # the aggregator must keep inf only in that degenerate case
    r = propcheck.check_dpi(trials=3, seed=1)
    assert math.isfinite(r.worst_margin) or not r.failures


def test_unknown_check_id_rejected():
    with pytest.raises(RenyiConverseError):
        propcheck.run_checks(["does_not_exist"], trials=2)


def test_report_config_echoes_inputs():
    r = propcheck.check_vdh(trials=4, seed=11)
    assert r.config["seed"] == 11
    assert r.trials == 4
    assert "tolerance" in r.config

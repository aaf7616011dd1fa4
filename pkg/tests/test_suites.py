import json

import pytest

from qdiv import suites

QUICK = {name: 3 for name in suites.SUITES}


@pytest.mark.parametrize("name", sorted(suites.SUITES))
def test_each_suite_passes_a_short_run(name):
    rep = suites.run_suite(name, suites.SuiteConfig(seed=7, trials=QUICK[name]))
    assert rep.ok, rep.summary_line()
    assert rep.passed + rep.failed >= 1
    assert rep.worst_violation <= rep.tolerance


def test_reports_are_reproducible():
    cfg = suites.SuiteConfig(seed=3, trials=4)
    a = suites.run_suite("chain_rule", cfg).to_json()
    b = suites.run_suite("chain_rule", cfg).to_json()
    assert a == b
    assert json.loads(a)["suite"] == "chain_rule"


def test_golden_cases_cover_the_catalogue():
    cases = suites.golden_cases()
    assert len(cases) == 11
    rep = suites.run_suite("golden_values")
    assert rep.passed == 11 and rep.ok


def test_tolerance_override_can_fail_a_suite():
    cfg = suites.SuiteConfig(seed=1, trials=3, tolerances={"variational_consistency": 0.0})
    rep = suites.run_suite("variational_consistency", cfg)
    assert not rep.ok and rep.counterexamples
    assert "FAIL" in rep.summary_line()


def test_config_validation():
    with pytest.raises(KeyError):
        suites.run_suite("no_such_suite")
    with pytest.raises(ValueError):
        suites.SuiteConfig(trials=-1)
    with pytest.raises(ValueError):
        suites.SuiteConfig(dims=(1,))

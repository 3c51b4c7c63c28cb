"""Every acceptance criterion at its stated tolerance, one printed line each."""
import json
import math

import pytest

from lvs.acceptance import CRITERIA, SUITES, Criterion, RunReport, run_acceptance_suite, \
    run_criterion

SEED = 0


@pytest.mark.parametrize("cid", [row[0] for row in CRITERIA],
                         ids=[f"{row[0]:02d}-{row[1]}" for row in CRITERIA])
def test_criterion(cid, capsys):
    c = run_criterion(cid, SEED)
    with capsys.disabled():
        print("\n" + c.line())
    assert c.status == "ran"
    assert c.passed, c.details
    if c.runtime_limit_s is not None:
        assert c.runtime_s < c.runtime_limit_s


def test_suite_membership():
    for _, _, _, suites, *_ in CRITERIA:
        assert suites and set(suites) <= set(SUITES) - {"all"}


def test_report_is_json_and_reproducible():
    a = run_acceptance_suite(seed=3, only={1, 2, 12})
    b = run_acceptance_suite(seed=3, only={1, 2, 12})
    assert [c.id for c in a.criteria] == [1, 2, 12]
    assert [c.measured for c in a.criteria] == [c.measured for c in b.criteria]
    d = json.loads(json.dumps(a.to_dict()))
    assert set(d) == {"command", "config", "criteria", "seed", "wall_clock_s", "passed"}
    assert all({"id", "name", "paper_ref", "measured", "threshold", "pass",
                "runtime_s"} <= set(c) for c in d["criteria"])
    assert d["passed"] is True and a.exit_code == 0


def test_suite_filter():
    rep = run_acceptance_suite("classical", only={1, 3, 12})
    assert [c.id for c in rep.criteria] == [1, 12]
    with pytest.raises(ValueError):
        run_acceptance_suite("nope")


def test_oversized_quantum_criterion_is_skipped():
    c = run_criterion(4, quantum_limit=8)
    assert c.status == "skipped" and math.isnan(c.measured)
    assert c.line().startswith("[SKIP]")
    rep = RunReport("x", {}, [c], 0)
    assert rep.passed and rep.exit_code == 0


def test_failed_criterion_sets_exit_code():
    bad = Criterion(1, "x", "claim", 1.0, "<= 0", False)
    assert bad.line().startswith("[FAIL]")
    assert RunReport("x", {}, [bad], 0).exit_code == 1

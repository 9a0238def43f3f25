import numpy as np
import pytest

from latticeckn.lattice import Box
from latticeckn.suites import SUITES, SuiteResult, random_function, run_suite


def test_random_functions_are_nonnegative_and_seeded():
    box = Box(2, 4)
    a = random_function(np.random.default_rng(3), box)
    b = random_function(np.random.default_rng(3), box)
    assert np.array_equal(a, b) and np.all(a >= 0) and a.any()


@pytest.mark.parametrize("suite", SUITES)
def test_suites_pass_on_small_boxes(suite):
    r = run_suite(suite, 20, 0, 2, 4)
    assert r.ok and r.violations == 0 and r.worst <= 0


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope", 1, 0, 1, 1)


def test_violations_are_recorded():
    r = SuiteResult("hl", 1, 1, 2, 0)
    r.record(0, -0.5)
    r.record(1, 1e-3, {"p": 2})
    assert not r.ok and r.violations == 1 and r.failures[0]["case"] == {"p": 2}
    assert r.to_dict()["ok"] is False


def test_suites_detect_a_broken_inequality(monkeypatch):
    # swapping the rearrangement for the identity leaves HL tight and makes
    # a planted reversed check fail
    import latticeckn.suites as suites

    monkeypatch.setattr(suites, "schwarz_dense", lambda arr, box, cfg=None: (np.flip(arr), 1))
    r = run_suite("idempotence", 10, 0, 1, 5)
    assert not r.ok

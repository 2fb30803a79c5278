"""The catalog doubles as the regression suite: every entry's expected map
must be reproduced bit-for-bit by re-running the named analyses."""

import pytest

from woldlab import catalog
from woldlab.errors import MalformedInputError


def test_names_are_unique():
    names = catalog.names()
    assert len(names) == len(set(names))


def test_get_unknown_rejected():
    with pytest.raises(MalformedInputError):
        catalog.get("no_such_operator")


@pytest.mark.parametrize("entry", catalog.fixtures(), ids=lambda e: e.name)
def test_expected_results_reproduced(entry):
    actual = catalog.regression_results(entry)
    for key in sorted(entry.expected):
        assert actual[key] == entry.expected[key], (entry.name, key)


@pytest.mark.parametrize(
    "entry",
    [e for e in catalog.fixtures() if e.kind == "operator"],
    ids=lambda e: e.name,
)
def test_operator_entries_validate(entry):
    op = entry.build()
    # construction re-runs all structural invariants; spot-check lane ids
    assert [l.lane_id for l in op.lanes] == sorted(l.lane_id for l in op.lanes)


@pytest.mark.parametrize(
    "entry",
    [e for e in catalog.fixtures() if e.kind == "pair"],
    ids=lambda e: e.name,
)
def test_pair_entries_commute(entry):
    from woldlab.core import commutes

    v1, v2 = entry.build()
    assert commutes(v1, v2).is_true


def test_builds_are_fresh_objects():
    a = catalog.get("shift").build()
    b = catalog.get("shift").build()
    assert a is not b

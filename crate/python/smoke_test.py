"""Smoke test for the unitfrob extension module.

Build and install first:
    pip install --no-build-isolation -e crates/python
then run with pytest or as a script.
"""

import json
from fractions import Fraction

import pytest

import unitfrob


def hasse_coefficient(coeffs, p):
    """x^(p-1) coefficient of f^((p-1)/2), f given low degree first."""
    acc = [1]
    for _ in range((p - 1) // 2):
        nxt = [0] * (len(acc) + len(coeffs) - 1)
        for i, a in enumerate(acc):
            for j, b in enumerate(coeffs):
                nxt[i + j] = (nxt[i + j] + a * b) % p
        acc = nxt
    return acc[p - 1] if p - 1 < len(acc) else 0


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_twist_index_is_one_half(p):
    w = unitfrob.LocalModule.twist(p, (p - 1) // 2)
    assert (w.m, w.s, w.q) == (1, 0, p)
    assert w.is_unit()
    assert w.minimal_root_index() == (1, 2)
    assert w.minimal_root_exponents() == [-1]


def test_local_module_from_strings():
    w = unitfrob.LocalModule(5, 1, 0, [["t^2"]])
    assert w.minimal_root_index() == (1, 2)
    assert "LocalModule" in repr(w)


def test_bound_matches_fractions():
    idx = [(1, 2), (3, 2)]
    want = 2 - sum(Fraction(a, b) for a, b in idx)
    got = unitfrob.chi_lower_bound(2, idx)
    assert Fraction(*got) == want


@pytest.mark.parametrize("f,coeffs,p", [("x^3 + 1", [1, 0, 0, 1], 5), ("x^3 + x", [0, 1, 0, 1], 5), ("x^3 + 1", [1, 0, 0, 1], 7)])
def test_hasse_witt_and_chi(f, coeffs, p):
    p_rank = 0 if hasse_coefficient(coeffs, p) == 0 else 1
    assert unitfrob.hasse_witt(f, p) == p_rank
    rep = json.loads(unitfrob.etale_chi(json.dumps({"kind": "tame-cover", "f": f}), p))
    assert rep["ss1"] == p_rank
    assert rep["chi"] == 1 - p_rank
    assert rep["chi"] >= Fraction(rep["bound"]["num"], rep["bound"]["den"])


def test_run_case_round_trip():
    case = {"p": 5, "spec": {"kind": "shriek", "rank": 2, "punctures": ["0", "inf"]}}
    rep = json.loads(unitfrob.run_case(json.dumps(case), name="shriek", oracle=True))
    assert rep["schema_version"] == unitfrob.SCHEMA_VERSION
    assert rep["chi"] == rep["oracle"]["chi_top"] == -2


def test_errors():
    with pytest.raises(unitfrob.SchemaError):
        unitfrob.run_case('{"p": 6, "spec": {"kind": "constant", "rank": 1}}')
    with pytest.raises(unitfrob.UnitFrobError):
        unitfrob.hasse_witt("x^2", 5)
    assert issubclass(unitfrob.SchemaError, unitfrob.UnitFrobError)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))

"""End-to-end check of the pypcm extension module.

Build and install the extension first:

    pip install --no-build-isolation -e crates/python
    python python/smoke_test.py
"""

import json
import pathlib
import sys

import pypcm

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "fixtures"


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def check_matrix_roundtrip():
    a = pypcm.Pcm.from_rows([[1, 2, None], ["1/2", 1, 3], [None, "1/3", 1]])
    assert a.n == 3 and a.missing_count == 1
    assert a.missing_pairs() == [(0, 2)]
    assert close(a.get(1, 0), 0.5)
    b = pypcm.parse(a.to_json())
    assert a == b
    assert pypcm.parse(a.to_csv()) == a
    b.set(0, 2, 6)
    assert b.is_complete() and close(b.get(2, 0), 1 / 6)
    try:
        pypcm.Pcm.from_rows([[1, 2], [3, 1]])
    except pypcm.PcmError as e:
        assert str(e).startswith("ReciprocityViolation"), e
    else:
        raise AssertionError("reciprocity not enforced")


def check_weights_and_completion():
    w = [8.0, 4.0, 2.0, 1.0]
    a = pypcm.Pcm.from_weights(w)
    a.clear(0, 2)
    a.clear(1, 3)
    for method in ("llsm", "em", "harker", "tree-gm"):
        got = pypcm.weights(a, method, gauge="last-one")
        assert all(close(x, y, 1e-7) for x, y in zip(got, w)), (method, got)
    lex = pypcm.parse((FIXTURES / "example3.csv").read_text())
    done, doc = pypcm.complete(lex, "lex")
    assert done.is_complete()
    assert close(done.get(0, 2), 4.0, 1e-7) and close(done.get(0, 3), 8.0, 1e-7)
    assert [(f["i"], f["j"]) for f in doc["filled"]] == [(1, 3), (1, 4)]


def check_consistency():
    a = pypcm.parse((FIXTURES / "example7.csv").read_text())
    report = pypcm.cr(a)
    assert abs(report["cr"] - 0.0936) < 1e-3, report
    assert pypcm.ri(5, 2, "table") == (0.739, "table")
    assert close(pypcm.ri_approx(5, 2), 0.7393333333, 1e-9)
    mean, sd = pypcm.simulate_ri(4, 1, samples=2000, seed=1)
    assert 0.0 < mean < 1.0 and sd > 0.0
    assert pypcm.simulate_ri(4, 1, samples=2000, seed=1) == (mean, sd)
    analysis = pypcm.analyze(a)
    assert analysis["graph"]["connected"] and len(analysis["weights"]) == 6
    assert len(pypcm.triads(a)["triads"]) >= 1


def check_bwm():
    m = pypcm.bwm_matrix(4, [2, 3, 5], [2, 3])
    rep = pypcm.bwm_check(m)
    assert rep["n"] == 4
    viol = pypcm.ordinal_violations(m)
    assert rep["theorem1_holds"] is False or not viol["violations"], (rep, viol)


def check_session():
    order = (FIXTURES / "example7_figure_order.txt").read_text().strip()
    a = pypcm.parse((FIXTURES / "example7.csv").read_text())
    s = pypcm.Session(6, policy=order, scale="saaty")
    crs = []
    while (pair := s.next_pair()) is not None:
        i, j = pair
        rec = s.submit(i, j, a.get(i, j) if a.get(i, j) >= 1 else f"1/{round(1 / a.get(i, j))}")
        crs.append(None if rec is None else rec["cr_generalized"])
    assert s.status == "completed" and len(crs) == 15
    assert crs[5] < 0.1 < crs[6], crs
    assert abs(crs[-1] - 0.0936) < 1e-3
    again = pypcm.Session.from_json(s.to_json())
    assert again.report()["answered"] == 15
    assert json.loads(s.to_json())["id"] == s.id


def main():
    checks = [
        check_matrix_roundtrip,
        check_weights_and_completion,
        check_consistency,
        check_bwm,
        check_session,
    ]
    failed = 0
    for check in checks:
        try:
            check()
            print(f"ok   {check.__name__}")
        except Exception as e:  # report every check, then fail
            failed += 1
            print(f"FAIL {check.__name__}: {e!r}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
